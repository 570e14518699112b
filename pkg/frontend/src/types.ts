// Typed views over service payloads. Numbers stay as RawNum so the UI can
// show the service's exact bytes.

import { asArray, asNum, asObject, asString, RawNum, RawValue } from "./rawJson.js";

export interface RankedEntry {
  imageId: string;
  similarity: RawNum;
}

export interface RankedList {
  reference: string;
  entries: RankedEntry[];
}

export interface ScoreNode {
  path: string;
  name: string;
  similarity: RawNum;
  weight: RawNum;
  children: ScoreNode[];
}

export interface Breakdown {
  first: string;
  second: string;
  similarity: RawNum;
  matchPairs: [string, string][];
  unmatchedFirst: string[];
  unmatchedSecond: string[];
  tree: ScoreNode;
}

export interface ImageSummary {
  imageId: string;
  imageRef: string | null;
  traits: { [key: string]: RawValue };
}

export interface ImagesPage {
  total: number;
  images: ImageSummary[];
}

export function rankedListFrom(value: RawValue): RankedList {
  const root = asObject(value, "rank payload");
  const entries = asArray(root["entries"] ?? [], "entries").map((entry, i) => {
    const e = asObject(entry, `entries[${i}]`);
    return {
      imageId: asString(e["image_id"] ?? null, "image_id"),
      similarity: asNum(e["similarity"] ?? null, "similarity"),
    };
  });
  return { reference: asString(root["reference"] ?? null, "reference"), entries };
}

function scoreNodeFrom(value: RawValue, where: string): ScoreNode {
  const node = asObject(value, where);
  const childrenRaw = node["children"];
  return {
    path: asString(node["path"] ?? null, `${where}.path`),
    name: asString(node["name"] ?? null, `${where}.name`),
    similarity: asNum(node["similarity"] ?? null, `${where}.similarity`),
    weight: asNum(node["weight"] ?? null, `${where}.weight`),
    children: childrenRaw === undefined
      ? []
      : asArray(childrenRaw, `${where}.children`).map((c, i) =>
          scoreNodeFrom(c, `${where}.children[${i}]`)),
  };
}

export function breakdownFrom(value: RawValue): Breakdown {
  const root = asObject(value, "score payload");
  const match = asObject(root["match"] ?? {}, "match");
  const pairs = asArray(match["pairs"] ?? [], "match.pairs").map((pair, i) => {
    const p = asArray(pair, `match.pairs[${i}]`);
    return [asString(p[0] ?? null, "pair id"), asString(p[1] ?? null, "pair id")] as [string, string];
  });
  const ids = (key: string) =>
    asArray(match[key] ?? [], `match.${key}`).map((v) => asString(v, key));
  return {
    first: asString(root["first"] ?? null, "first"),
    second: asString(root["second"] ?? null, "second"),
    similarity: asNum(root["similarity"] ?? null, "similarity"),
    matchPairs: pairs,
    unmatchedFirst: ids("unmatched_first"),
    unmatchedSecond: ids("unmatched_second"),
    tree: scoreNodeFrom(root["tree"] ?? null, "tree"),
  };
}

export function imagesPageFrom(value: RawValue): ImagesPage {
  const root = asObject(value, "images payload");
  const images = asArray(root["images"] ?? [], "images").map((entry, i) => {
    const e = asObject(entry, `images[${i}]`);
    const ref = e["image_ref"];
    return {
      imageId: asString(e["image_id"] ?? null, "image_id"),
      imageRef: typeof ref === "string" ? ref : null,
      traits: asObject(e["traits"] ?? {}, "traits"),
    };
  });
  return { total: asNum(root["total"] ?? null, "total").value, images };
}
