import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { ExplorerApp, OutputSink } from "../src/app.js";

interface Call {
  url: string;
  init?: RequestInit;
}

function rankBody(entries: [string, string][]): string {
  const list = entries
    .map(([id, sim]) => `{"image_id":"${id}","similarity":${sim}}`)
    .join(",");
  return `{"reference":"ref","query":{},"entries":[${list}]}`;
}

const SELF_SCORE_BODY =
  `{"first":"ref","second":"ref","similarity":1.0,` +
  `"weights":{"alpha":1.0,"beta":1.0,"gamma":1.0},` +
  `"match":{"pairs":[],"unmatched_first":[],"unmatched_second":[],"total_cost":0.0},` +
  `"tree":{"path":"overall","name":"overall","similarity":1.0,"weight":1.0}}`;

class Sink implements OutputSink {
  grid = "";
  breakdown = "";
  banner = "";
  setGrid(html: string) {
    this.grid = html;
  }
  setBreakdown(html: string) {
    this.breakdown = html;
  }
  setBanner(html: string) {
    this.banner = html;
  }
}

function appWith(
  responder: (call: Call, index: number) => Promise<Response> | Response,
): { app: ExplorerApp; sink: Sink; calls: Call[] } {
  const calls: Call[] = [];
  const fetchImpl = (url: string, init?: RequestInit) => {
    const call = { url, init };
    calls.push(call);
    return Promise.resolve(responder(call, calls.length - 1));
  };
  const sink = new Sink();
  const app = new ExplorerApp(new ApiClient("", fetchImpl), sink, 150);
  app.state.reference = "ref";
  return { app, sink, calls };
}

describe("rank debouncing", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("a burst of slider changes issues exactly one /rank", async () => {
    const { app, sink, calls } = appWith(() =>
      new Response(rankBody([["a", "0.9"], ["b", "0.5"]]), { status: 200 }),
    );
    app.setWeights(1, 1, 1);
    app.setWeights(1, 0.9, 1);
    app.setWeights(1, 0.8, 1);
    app.setWeights(1, 0.7, 1);
    expect(calls.length).toBe(0);
    await vi.advanceTimersByTimeAsync(149);
    expect(calls.length).toBe(0);
    await vi.advanceTimersByTimeAsync(2);
    await vi.runAllTimersAsync();
    expect(calls.filter((c) => c.url.endsWith("/rank")).length).toBe(1);
    const body = JSON.parse(String(calls[0]!.init?.body));
    expect(body.weights.beta).toBe(0.7); // the last state of the burst wins
    expect(sink.grid).toContain("0.9");
  });

  it("window and k changes also go through the debounced path", async () => {
    const { app, calls } = appWith(() =>
      new Response(rankBody([["a", "0.9"]]), { status: 200 }),
    );
    app.setWindow("last");
    app.setK(4);
    await vi.runAllTimersAsync();
    expect(calls.length).toBe(1);
    const body = JSON.parse(String(calls[0]!.init?.body));
    expect(body.window).toBe("last");
    expect(body.k).toBe(4);
  });
});

describe("rank responses", () => {
  it("the last-issued query wins even when responses arrive out of order", async () => {
    let releaseFirst: (response: Response) => void = () => {};
    const { app, sink } = appWith((call, index) => {
      if (index === 0) {
        return new Promise<Response>((resolve) => {
          releaseFirst = resolve;
        });
      }
      return new Response(rankBody([["second", "0.7"]]), { status: 200 });
    });
    const first = app.refreshGrid();
    const second = app.refreshGrid();
    releaseFirst(new Response(rankBody([["first", "0.9"]]), { status: 200 }));
    await Promise.all([first, second]);
    expect(sink.grid).toContain("second");
    expect(sink.grid).not.toContain("first");
  });

  it("service errors surface as a banner and keep state", async () => {
    const { app, sink } = appWith(() =>
      new Response('{"reason":"UnknownImage","message":"image missing"}', { status: 404 }),
    );
    app.state.k = 12;
    await app.refreshGrid();
    expect(sink.banner).toContain("UnknownImage");
    expect(sink.banner).toContain("image missing");
    expect(app.state.k).toBe(12);
  });

  it("invalid states never reach the service", async () => {
    const { app, sink, calls } = appWith(() => new Response("{}", { status: 200 }));
    app.state.alpha = 0;
    app.state.beta = 0;
    app.state.gamma = 0;
    await app.refreshGrid();
    expect(calls.length).toBe(0);
    expect(sink.banner).toContain("at least one level weight");
  });
});

describe("breakdowns", () => {
  it("fetches a pair once and renders the all-1.0 self tree", async () => {
    const { app, sink, calls } = appWith(() =>
      new Response(SELF_SCORE_BODY, { status: 200 }),
    );
    await app.showBreakdown("ref");
    await app.showBreakdown("ref"); // collapse/expand or reselect: cached
    expect(calls.filter((c) => c.url.includes("/score")).length).toBe(1);
    expect(sink.breakdown).toContain(">1.0<");
    expect(sink.breakdown).toContain("ref vs ref");
  });

  it("a missing candidate shows a banner", async () => {
    const { app, sink } = appWith(() =>
      new Response('{"reason":"UnknownImage","message":"nope"}', { status: 404 }),
    );
    await app.showBreakdown("ghost");
    expect(sink.banner).toContain("404");
    expect(sink.breakdown).toBe("");
  });
});
