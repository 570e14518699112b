// Controller: state changes in, rendered HTML out through an output sink.
// Slider bursts debounce into a single /rank; a new rank aborts any request
// still in flight, and stale responses are discarded, so the grid always
// shows the last-issued query. Breakdowns are fetched once per (pair,
// weights) and cached; collapsing or expanding tree nodes never refetches.

import { ApiClient, ServiceError } from "./api.js";
import { debounce, Debounced } from "./debounce.js";
import {
  breakdownKey,
  ExplorationState,
  initialState,
  validateState,
  Window,
} from "./state.js";
import { renderBanner, renderBreakdown, renderRankedGrid } from "./render.js";
import { Breakdown, ImageSummary } from "./types.js";

export interface OutputSink {
  setGrid(html: string): void;
  setBreakdown(html: string): void;
  setBanner(html: string): void;
}

export const RANK_DEBOUNCE_MS = 150;

export class ExplorerApp {
  state: ExplorationState = initialState();
  readonly summaries = new Map<string, ImageSummary>();
  private readonly breakdowns = new Map<string, Breakdown>();
  private rankSeq = 0;
  private inFlight: AbortController | null = null;
  private readonly scheduleRank: Debounced<[]>;

  constructor(
    readonly api: ApiClient,
    readonly out: OutputSink,
    debounceMs: number = RANK_DEBOUNCE_MS,
  ) {
    this.scheduleRank = debounce(() => void this.refreshGrid(), debounceMs);
  }

  async loadImages(limit: number = 200): Promise<void> {
    const page = await this.api.images(0, limit);
    for (const summary of page.images) {
      this.summaries.set(summary.imageId, summary);
    }
    if (this.state.reference === null && page.images.length > 0) {
      this.state.reference = page.images[0]!.imageId;
    }
  }

  selectReference(imageId: string): void {
    this.state.reference = imageId;
    this.state.selectedCandidate = null;
    this.scheduleRank();
  }

  setWeights(alpha: number, beta: number, gamma: number): void {
    this.state.alpha = alpha;
    this.state.beta = beta;
    this.state.gamma = gamma;
    this.scheduleRank();
  }

  setGroupWeight(path: string, weight: number): void {
    this.state.groupWeights[path] = weight;
    this.scheduleRank();
  }

  setWindow(window: Window): void {
    this.state.window = window;
    this.scheduleRank();
  }

  setK(k: number): void {
    this.state.k = k;
    this.scheduleRank();
  }

  /** Issue the rank the debounced scheduler decided on. */
  async refreshGrid(): Promise<void> {
    const problem = validateState(this.state);
    if (problem !== null) {
      this.out.setBanner(renderBanner(problem));
      return;
    }
    if (this.state.reference === null) {
      this.out.setBanner(renderBanner("pick a reference image first"));
      return;
    }
    const seq = ++this.rankSeq;
    if (this.inFlight !== null) {
      this.inFlight.abort();
    }
    const controller = new AbortController();
    this.inFlight = controller;
    try {
      const ranked = await this.api.rank(this.state, controller.signal);
      if (seq !== this.rankSeq) return; // a newer query already won
      this.out.setBanner("");
      this.out.setGrid(renderRankedGrid(ranked, this.summaries, this.state));
    } catch (error) {
      if (seq !== this.rankSeq || (error instanceof DOMException && error.name === "AbortError")) {
        return;
      }
      this.out.setBanner(renderBanner(describe(error)));
    } finally {
      if (this.inFlight === controller) this.inFlight = null;
    }
  }

  async showBreakdown(candidateId: string): Promise<void> {
    if (this.state.reference === null) return;
    this.state.selectedCandidate = candidateId;
    const key = breakdownKey(this.state, candidateId);
    let breakdown = this.breakdowns.get(key);
    if (breakdown === undefined) {
      try {
        breakdown = await this.api.score(
          this.state.reference,
          candidateId,
          this.state.alpha,
          this.state.beta,
          this.state.gamma,
        );
      } catch (error) {
        this.out.setBanner(renderBanner(describe(error)));
        return;
      }
      this.breakdowns.set(key, breakdown);
    }
    this.out.setBreakdown(renderBreakdown(breakdown));
  }
}

function describe(error: unknown): string {
  if (error instanceof ServiceError) {
    return `service error ${error.status} (${error.reason}): ${error.message}`;
  }
  return error instanceof Error ? error.message : String(error);
}
