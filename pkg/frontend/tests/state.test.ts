import { describe, expect, it } from "vitest";

import { initialState, rankRequestBody, validateState } from "../src/state.js";

describe("exploration state", () => {
  it("starts valid", () => {
    expect(validateState(initialState())).toBeNull();
  });

  it("rejects negative weights", () => {
    const state = { ...initialState(), beta: -0.1 };
    expect(validateState(state)).toMatch(/non-negative/);
  });

  it("rejects all-zero level weights", () => {
    const state = { ...initialState(), alpha: 0, beta: 0, gamma: 0 };
    expect(validateState(state)).toMatch(/at least one/);
  });

  it("rejects k below one", () => {
    const state = { ...initialState(), k: 0 };
    expect(validateState(state)).toMatch(/k must be/);
  });

  it("serializes the rank request the service expects", () => {
    const state = {
      ...initialState(),
      reference: "img-1",
      alpha: 1,
      beta: 0,
      gamma: 0.5,
      window: "last" as const,
      k: 12,
    };
    expect(JSON.parse(rankRequestBody(state))).toEqual({
      reference: "img-1",
      weights: { alpha: 1, beta: 0, gamma: 0.5 },
      k: 12,
      window: "last",
    });
  });

  it("includes group weights only when set", () => {
    const state = { ...initialState(), reference: "x" };
    expect(JSON.parse(rankRequestBody(state)).weights.node_weights).toBeUndefined();
    state.groupWeights = { "plastic/chromatic": 0.5 };
    expect(JSON.parse(rankRequestBody(state)).weights.node_weights).toEqual({
      "plastic/chromatic": 0.5,
    });
  });
});
