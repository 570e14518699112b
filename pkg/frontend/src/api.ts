// Service client. Rank and score responses go through the raw-number parser
// so every similarity reaching the DOM is the service's exact text.

import { parseRawJson } from "./rawJson.js";
import { rankRequestBody, ExplorationState } from "./state.js";
import { Breakdown, breakdownFrom, ImagesPage, imagesPageFrom, RankedList, rankedListFrom } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly reason: string,
    message: string,
  ) {
    super(message);
  }
}

async function errorFrom(response: Response): Promise<ServiceError> {
  let reason = `http_${response.status}`;
  let message = response.statusText;
  try {
    const body = (await response.json()) as { reason?: string; message?: string };
    if (body.reason) reason = body.reason;
    if (body.message) message = body.message;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ServiceError(response.status, reason, message);
}

export class ApiClient {
  constructor(
    readonly baseUrl: string = "",
    readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async images(offset: number, limit: number): Promise<ImagesPage> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/images?offset=${offset}&limit=${limit}`,
    );
    if (!response.ok) throw await errorFrom(response);
    return imagesPageFrom(parseRawJson(await response.text()));
  }

  async rank(state: ExplorationState, signal?: AbortSignal): Promise<RankedList> {
    const response = await this.fetchImpl(`${this.baseUrl}/rank`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: rankRequestBody(state),
      signal,
    });
    if (!response.ok) throw await errorFrom(response);
    return rankedListFrom(parseRawJson(await response.text()));
  }

  async score(
    a: string,
    b: string,
    alpha: number,
    beta: number,
    gamma: number,
  ): Promise<Breakdown> {
    const params = new URLSearchParams({
      a,
      b,
      alpha: String(alpha),
      beta: String(beta),
      gamma: String(gamma),
    });
    const response = await this.fetchImpl(`${this.baseUrl}/score?${params}`);
    if (!response.ok) throw await errorFrom(response);
    return breakdownFrom(parseRawJson(await response.text()));
  }
}
