// Exploration state: what the scholar is currently asking the engine.

export type Window = "top" | "median" | "last";

export interface ExplorationState {
  reference: string | null;
  alpha: number;
  beta: number;
  gamma: number;
  groupWeights: { [path: string]: number };
  window: Window;
  k: number;
  selectedCandidate: string | null;
}

export function initialState(): ExplorationState {
  return {
    reference: null,
    alpha: 1,
    beta: 1,
    gamma: 1,
    groupWeights: {},
    window: "top",
    k: 8,
    selectedCandidate: null,
  };
}

export function validateState(state: ExplorationState): string | null {
  const weights = [state.alpha, state.beta, state.gamma];
  if (weights.some((w) => w < 0) || Object.values(state.groupWeights).some((w) => w < 0)) {
    return "weights must be non-negative";
  }
  if (!weights.some((w) => w > 0)) {
    return "at least one level weight must be positive";
  }
  if (state.k < 1) {
    return "k must be at least 1";
  }
  return null;
}

export function rankRequestBody(state: ExplorationState): string {
  const weights: { [key: string]: unknown } = {
    alpha: state.alpha,
    beta: state.beta,
    gamma: state.gamma,
  };
  if (Object.keys(state.groupWeights).length > 0) {
    weights["node_weights"] = state.groupWeights;
  }
  return JSON.stringify({
    reference: state.reference,
    weights,
    k: state.k,
    window: state.window,
  });
}

// key for the per-pair breakdown cache: one fetch per (pair, weights)
export function breakdownKey(state: ExplorationState, candidate: string): string {
  return [state.reference, candidate, state.alpha, state.beta, state.gamma].join("|");
}
