"""Per-category minimum-cost instance matching between two images.

The solver is a dense Jonker-Volgenant shortest-augmenting-path assignment
(O(n^3) worst case), exact and deterministic: rows are augmented in order and
column scans take the first minimum, so equal-cost optima resolve in
lexicographic (row, col) order. Faces form one pool; objects pool by detector
label; centroids are normalized by their own image's dimensions before the
squared-Euclidean cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .records import ImageRecord


@dataclass(frozen=True)
class CostMatrix:
    row_ids: tuple
    col_ids: tuple
    cost: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.cost, dtype=np.float64)
        if c.ndim != 2 or c.shape != (len(self.row_ids), len(self.col_ids)):
            raise ValueError("cost shape does not match id lists")
        if c.size and (not np.all(np.isfinite(c)) or np.any(c < 0)):
            raise ValueError("cost entries must be finite and non-negative")


@dataclass(frozen=True)
class PoolMatch:
    """Assignment inside one category pool, as index pairs."""

    key: tuple[str, str]  # (kind, category)
    row_ids: tuple[str, ...]
    col_ids: tuple[str, ...]
    pairs: tuple[tuple[int, int], ...]
    cost: float


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple[tuple, ...]  # (row id, col id)
    unmatched_i: tuple
    unmatched_j: tuple
    total_cost: float
    pools: tuple[PoolMatch, ...] = field(default=())


def solve_assignment(cost: np.ndarray) -> tuple[list[int], list[int], float]:
    """Minimum-cost partial bijection of size min(M, N) on a dense matrix.

    Returns (rows, cols, total) with selections listed in ascending row order
    and the total summed in that order.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise ValueError("expected a 2-D cost matrix")
    n, m = cost.shape
    if n == 0 or m == 0:
        return [], [], 0.0
    # tiny pools dominate in practice; closed forms keep the same
    # lexicographic tie order as the general algorithm
    if n == 1:
        j = int(np.argmin(cost[0]))
        return [0], [j], float(cost[0, j])
    if m == 1:
        i = int(np.argmin(cost[:, 0]))
        return [i], [0], float(cost[i, 0])
    if n == 2 and m == 2:
        straight = float(cost[0, 0]) + float(cost[1, 1])
        crossed = float(cost[0, 1]) + float(cost[1, 0])
        if straight <= crossed:
            return [0, 1], [0, 1], straight
        return [0, 1], [1, 0], crossed
    transposed = n > m
    if transposed:
        cost = cost.T
        n, m = m, n

    col_to_row = np.full(m + 1, -1, dtype=np.int64)
    u = np.zeros(n, dtype=np.float64)
    v = np.zeros(m + 1, dtype=np.float64)
    inf = np.inf

    for i in range(n):
        col_to_row[m] = i
        j0 = m
        minv = np.full(m, inf, dtype=np.float64)
        way = np.full(m, m, dtype=np.int64)
        free = np.ones(m, dtype=bool)
        while True:
            i0 = col_to_row[j0]
            reduced = cost[i0] - u[i0] - v[:m]
            better = free & (reduced < minv)
            minv[better] = reduced[better]
            way[better] = j0
            free_idx = np.flatnonzero(free)
            k = int(free_idx[np.argmin(minv[free_idx])])
            delta = float(minv[k])
            # dual update over the columns already visited (plus the virtual one)
            visited = np.concatenate((~free, [True]))
            u[col_to_row[visited]] += delta
            v[visited] -= delta
            minv[free] -= delta
            free[k] = False
            j0 = k
            if col_to_row[j0] == -1:
                break
        while j0 != m:
            j1 = int(way[j0])
            col_to_row[j0] = col_to_row[j1]
            j0 = j1

    pairs: list[tuple[int, int]] = []
    for j in range(m):
        if col_to_row[j] >= 0:
            pairs.append((int(col_to_row[j]), j))
    if transposed:
        pairs = [(c, r) for r, c in pairs]
        cost = cost.T
    pairs.sort()
    rows = [r for r, _ in pairs]
    cols = [c for _, c in pairs]
    total = 0.0
    for r, c in pairs:
        total += float(cost[r, c])
    return rows, cols, total


def linear_sum_assignment(matrix: CostMatrix | np.ndarray | Sequence) -> MatchResult:
    """Solve one cost matrix into a MatchResult (ids default to indices)."""
    if isinstance(matrix, CostMatrix):
        row_ids, col_ids, cost = matrix.row_ids, matrix.col_ids, matrix.cost
    else:
        cost = np.asarray(matrix, dtype=np.float64)
        if cost.size == 0:
            cost = cost.reshape((cost.shape[0] if cost.ndim >= 1 else 0, 0))
        row_ids = tuple(range(cost.shape[0]))
        col_ids = tuple(range(cost.shape[1]))
    rows, cols, total = solve_assignment(np.asarray(cost, dtype=np.float64))
    matched_rows = set(rows)
    matched_cols = set(cols)
    return MatchResult(
        pairs=tuple((row_ids[r], col_ids[c]) for r, c in zip(rows, cols)),
        unmatched_i=tuple(row_ids[r] for r in range(len(row_ids)) if r not in matched_rows),
        unmatched_j=tuple(col_ids[c] for c in range(len(col_ids)) if c not in matched_cols),
        total_cost=total,
    )


def pool_key(kind: str, category: str) -> tuple[str, str]:
    return (kind, "face" if kind == "face" else category)


def normalized_centroids(record: ImageRecord, instance_ids: Sequence[str]) -> np.ndarray:
    by_id = {i.instance_id: i for i in record.instances}
    pts = np.empty((len(instance_ids), 2), dtype=np.float64)
    for k, iid in enumerate(instance_ids):
        cx, cy = by_id[iid].centroid
        pts[k, 0] = cx / record.width
        pts[k, 1] = cy / record.height
    return pts


def squared_distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def match_instances(rec_i: ImageRecord, rec_j: ImageRecord) -> MatchResult:
    """Optimal per-pool pairing between two records' instances."""
    pools_i: dict[tuple[str, str], list[str]] = {}
    pools_j: dict[tuple[str, str], list[str]] = {}
    for rec, pools in ((rec_i, pools_i), (rec_j, pools_j)):
        for inst in rec.instances:
            pools.setdefault(pool_key(inst.kind, inst.category), []).append(inst.instance_id)

    pairs: list[tuple[str, str]] = []
    unmatched_i: list[str] = []
    unmatched_j: list[str] = []
    pool_matches: list[PoolMatch] = []
    total = 0.0
    for key in sorted(set(pools_i) | set(pools_j)):
        ids_i = pools_i.get(key, [])
        ids_j = pools_j.get(key, [])
        if not ids_i or not ids_j:
            unmatched_i.extend(ids_i)
            unmatched_j.extend(ids_j)
            pool_matches.append(PoolMatch(key, tuple(ids_i), tuple(ids_j), (), 0.0))
            continue
        cost = squared_distance_matrix(
            normalized_centroids(rec_i, ids_i), normalized_centroids(rec_j, ids_j)
        )
        rows, cols, pool_cost = solve_assignment(cost)
        total += pool_cost
        pairs.extend((ids_i[r], ids_j[c]) for r, c in zip(rows, cols))
        unmatched_i.extend(ids_i[r] for r in range(len(ids_i)) if r not in set(rows))
        unmatched_j.extend(ids_j[c] for c in range(len(ids_j)) if c not in set(cols))
        pool_matches.append(PoolMatch(
            key, tuple(ids_i), tuple(ids_j), tuple(zip(rows, cols)), pool_cost,
        ))
    return MatchResult(
        pairs=tuple(pairs),
        unmatched_i=tuple(unmatched_i),
        unmatched_j=tuple(unmatched_j),
        total_cost=total,
        pools=tuple(pool_matches),
    )
