// HTML renderers. Pure string functions: payload in, markup out. Every score
// placed in the markup comes from RawNum.raw, so the page shows exactly what
// the service sent. No similarity arithmetic happens here.

import { RawNum, RawValue } from "./rawJson.js";
import { ExplorationState } from "./state.js";
import { Breakdown, ImageSummary, RankedList, ScoreNode } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function traitText(value: RawValue | undefined): string {
  if (value === undefined || value === null) return "";
  if (value instanceof RawNum) return value.raw;
  if (typeof value === "string") return value;
  if (typeof value === "boolean") return value ? "true" : "false";
  return "";
}

export function renderTile(
  summary: ImageSummary,
  options: { score?: RawNum; selected?: boolean } = {},
): string {
  const classes = ["tile"];
  if (options.selected) classes.push("tile-selected");
  const headline = ["medium", "group", "framing"]
    .map((key) => traitText(summary.traits[key]))
    .filter((text) => text.length > 0)
    .join(" · ");
  const image = summary.imageRef
    ? `<img class="thumb" src="${escapeHtml(summary.imageRef)}" alt="${escapeHtml(summary.imageId)}">`
    : `<div class="thumb placeholder"><span>${escapeHtml(summary.imageId)}</span>` +
      `<small>${escapeHtml(headline)}</small></div>`;
  const score = options.score
    ? `<span class="score">${escapeHtml(options.score.raw)}</span>`
    : "";
  return (
    `<figure class="${classes.join(" ")}" data-image-id="${escapeHtml(summary.imageId)}">` +
    image +
    `<figcaption><span class="tile-id">${escapeHtml(summary.imageId)}</span>${score}</figcaption>` +
    `</figure>`
  );
}

export function renderRankedGrid(
  ranked: RankedList,
  summaries: Map<string, ImageSummary>,
  state: ExplorationState,
): string {
  if (ranked.entries.length === 0) {
    return `<p class="empty">No candidates to show.</p>`;
  }
  const tiles = ranked.entries.map((entry) => {
    const summary = summaries.get(entry.imageId) ?? {
      imageId: entry.imageId,
      imageRef: null,
      traits: {},
    };
    return renderTile(summary, {
      score: entry.similarity,
      selected: entry.imageId === state.selectedCandidate,
    });
  });
  return `<div class="grid" data-window="${state.window}">${tiles.join("")}</div>`;
}

const LEAF_PAIR = /^(.*)~(.*)$/;

function renderNode(node: ScoreNode, depth: number): string {
  const label =
    `<span class="node-name">${escapeHtml(node.name)}</span>` +
    `<span class="node-value">${escapeHtml(node.similarity.raw)}</span>`;
  if (node.children.length === 0) {
    const pair = depth >= 3 ? LEAF_PAIR.exec(node.name) : null;
    const matched = pair !== null && pair[1] !== "" && pair[2] !== "";
    const classes = matched ? "leaf matched-pair" : "leaf";
    return `<li class="${classes}" data-path="${escapeHtml(node.path)}">${label}</li>`;
  }
  const children = node.children.map((child) => renderNode(child, depth + 1)).join("");
  const open = depth < 2 ? " open" : "";
  return (
    `<li data-path="${escapeHtml(node.path)}"><details${open}>` +
    `<summary>${label}</summary><ul>${children}</ul></details></li>`
  );
}

export function renderBreakdown(breakdown: Breakdown): string {
  const pairs = breakdown.matchPairs
    .map(([a, b]) => `<span class="pair">${escapeHtml(a)} ↔ ${escapeHtml(b)}</span>`)
    .join(" ");
  const unmatched = [...breakdown.unmatchedFirst, ...breakdown.unmatchedSecond]
    .map((id) => `<span class="unpaired">${escapeHtml(id)}</span>`)
    .join(" ");
  return (
    `<div class="breakdown">` +
    `<header><h3>${escapeHtml(breakdown.first)} vs ${escapeHtml(breakdown.second)}</h3>` +
    `<p class="overall">overall <strong>${escapeHtml(breakdown.similarity.raw)}</strong></p>` +
    `<p class="pairs">matched: ${pairs || "none"}</p>` +
    (unmatched ? `<p class="pairs">unpaired: ${unmatched}</p>` : "") +
    `</header><ul class="tree">${renderNode(breakdown.tree, 0)}</ul></div>`
  );
}

export function renderBanner(message: string): string {
  return `<div class="banner" role="alert">${escapeHtml(message)}</div>`;
}
