"""Hierarchical pairwise similarity: overall -> level -> group -> measure ->
matched instance.

One scoring core serves both the fast path (rank loops: numbers only) and the
detail path (full breakdown tree), so CLI, HTTP, and ranking agree to the last
bit. Instance measures are evaluated in per-kind blocks: all scalar measures
of a pool share one |a-b|/span kernel and all confidence vectors share one
segmented cosine kernel. The pair is canonicalized by image_id before scoring,
which makes the breakdown exactly symmetric.

Aggregation is a weighted arithmetic mean at every node. Instances without a
counterpart contribute the minimum similarity (0) to each of their measures;
measures with no basis on either side (e.g. face traits between two face-less
images) count as vacuously similar (1.0), mirroring min(0,0)/max(0,0) = 1 for
counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import metrics
from .errors import DimensionMismatch, FrescoError, RegistryMismatch, ZeroVector
from .matching import MatchResult, PoolMatch, pool_key, solve_assignment, squared_distance_matrix
from .records import ConfVector, ImageRecord
from .registry import LEVELS, MeasureDescriptor, Registry, default_registry
from .traits import (
    DEFAULT_PERSON_LABELS,
    DEFAULT_THRESHOLDS,
    ThresholdConfig,
    TraitVector,
    derive_traits,
)


@dataclass(frozen=True)
class WeightConfig:
    """Level weights plus optional per-node overrides (path or measure id)."""

    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    node_weights: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        levels = (self.alpha, self.beta, self.gamma)
        if any(w < 0 for w in levels) or any(w < 0 for w in self.node_weights.values()):
            raise ValueError("weights must be non-negative")
        if not any(w > 0 for w in levels):
            raise ValueError("at least one level weight must be positive")

    def level_weight(self, level: str) -> float:
        return {"plastic": self.alpha, "figurative": self.beta, "enunciational": self.gamma}[level]


DEFAULT_WEIGHTS = WeightConfig()


@dataclass(frozen=True)
class ScoreNode:
    path: str
    name: str
    similarity: float
    weight: float
    children: tuple["ScoreNode", ...] = ()

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "path": self.path,
            "name": self.name,
            "similarity": self.similarity,
            "weight": self.weight,
        }
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out

    def find(self, path: str) -> "ScoreNode | None":
        for node in self.walk():
            if node.path == path:
                return node
        return None

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class ScoreBreakdown:
    first_id: str
    second_id: str
    root: ScoreNode
    match: MatchResult
    weights: WeightConfig

    @property
    def similarity(self) -> float:
        return self.root.similarity

    def to_json(self) -> dict:
        return {
            "first": self.first_id,
            "second": self.second_id,
            "similarity": self.root.similarity,
            "weights": {
                "alpha": self.weights.alpha,
                "beta": self.weights.beta,
                "gamma": self.weights.gamma,
                **({"node_weights": dict(sorted(self.weights.node_weights.items()))}
                   if self.weights.node_weights else {}),
            },
            "match": {
                "pairs": [list(p) for p in self.match.pairs],
                "unmatched_first": list(self.match.unmatched_i),
                "unmatched_second": list(self.match.unmatched_j),
                "total_cost": self.match.total_cost,
            },
            "tree": self.root.to_json(),
        }


@dataclass(frozen=True)
class PairScore:
    """Fast-path result: the root plus whatever level values were computed."""

    similarity: float
    levels: dict[str, float]


# ---------------------------------------------------------------------------
# prepared records

@dataclass(frozen=True)
class PreparedPool:
    key: tuple[str, str]
    ids: tuple[str, ...]
    centroids: np.ndarray  # (n, 2), normalized by own image dims
    scal: np.ndarray  # (n, S) scalar measures, clamped into range
    conf: np.ndarray | None  # (n, D) concatenated confidence vectors
    conf_norms: np.ndarray | None  # (n, n_segments)
    conf_labels: tuple[tuple[str, ...], ...]  # label list per segment
    sets: dict[str, list[frozenset]]


@dataclass(frozen=True)
class PreparedRecord:
    record: ImageRecord
    traits: TraitVector
    image_values: dict[str, Any]
    pools: dict[tuple[str, str], PreparedPool]
    registry: Registry


@dataclass(frozen=True)
class _KindLayout:
    """Per-kind block layout derived from the registry."""

    scal_ids: tuple[str, ...]
    scal_lo: np.ndarray
    scal_hi: np.ndarray
    scal_span: np.ndarray
    conf_ids: tuple[str, ...]
    set_ids: tuple[str, ...]


@dataclass(frozen=True)
class _Plan:
    """Positive-weight subtree of one WeightConfig, in registry order."""

    levels: tuple  # (level, lw, ((gpath, group, gw, ((desc, mw), ...)), ...))
    needed_sets: frozenset[str]


def _hellinger_fast(h1: np.ndarray, h2: np.ndarray) -> float:
    if np.array_equal(h1, h2):
        return 1.0
    bc = np.sqrt(h1 * h2).sum(axis=1)
    distances = np.sqrt(np.clip(1.0 - bc, 0.0, 1.0))
    return 1.0 - float(distances.mean())


class Scorer:
    """Binds a registry and threshold config; prepares records and scores pairs."""

    def __init__(
        self,
        registry: Registry | None = None,
        thresholds: ThresholdConfig = DEFAULT_THRESHOLDS,
        person_labels: frozenset[str] = DEFAULT_PERSON_LABELS,
    ):
        self.registry = registry if registry is not None else default_registry()
        self.thresholds = thresholds
        self.person_labels = person_labels
        self._image_descs = [d for d in self.registry.descriptors if d.scope == "image"]
        self._instance_descs = [d for d in self.registry.descriptors if d.scope == "instance"]
        self._layouts = {kind: self._build_layout(kind) for kind in ("face", "object")}
        self._image_fns = {d.measure_id: self._compile_image(d) for d in self._image_descs}

    def _build_layout(self, kind: str) -> _KindLayout:
        scal_ids, lo, hi = [], [], []
        conf_ids, set_ids = [], []
        for d in self._instance_descs:
            if d.applies_to != "all" and d.applies_to != kind:
                continue
            if d.metric == "abs_error":
                scal_ids.append(d.measure_id)
                lo.append(d.range[0])
                hi.append(d.range[1])
            elif d.metric == "cosine":
                conf_ids.append(d.measure_id)
            elif d.metric == "jaccard":
                set_ids.append(d.measure_id)
            else:
                raise FrescoError(
                    f"instance measure '{d.measure_id}' uses unsupported metric '{d.metric}'"
                )
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        return _KindLayout(tuple(scal_ids), lo, hi, hi - lo, tuple(conf_ids), tuple(set_ids))

    # -- preparation -----------------------------------------------------

    def prepare(self, record: ImageRecord, traits: TraitVector | None = None) -> PreparedRecord:
        if traits is None:
            traits = derive_traits(record, self.thresholds, self.person_labels)

        image_values: dict[str, Any] = {}
        for d in self._image_descs:
            value = traits.image.get(d.measure_id)
            if value is not None:
                if d.metric == "palette_cielab":
                    value = metrics.palette_mean_lab(value)
                elif d.metric == "cosine":
                    if isinstance(value, ConfVector):
                        vec, labels = value.values, value.labels
                    else:
                        vec, labels = np.asarray(value, dtype=np.float64), None
                    value = (vec, float(np.linalg.norm(vec)), labels)
            image_values[d.measure_id] = value

        order: list[tuple[str, str]] = []
        members: dict[tuple[str, str], list] = {}
        for inst in record.instances:
            key = pool_key(inst.kind, inst.category)
            if key not in members:
                members[key] = []
                order.append(key)
            members[key].append(inst)

        pools: dict[tuple[str, str], PreparedPool] = {}
        for key in order:
            insts = members[key]
            kind = key[0]
            layout = self._layouts[kind]
            n = len(insts)
            ids = tuple(i.instance_id for i in insts)
            centroids = np.empty((n, 2), dtype=np.float64)
            scal = np.empty((n, len(layout.scal_ids)), dtype=np.float64)
            for k, inst in enumerate(insts):
                cx, cy = inst.centroid
                centroids[k, 0] = cx / record.width
                centroids[k, 1] = cy / record.height
                values = traits.instances[inst.instance_id]
                for c, mid in enumerate(layout.scal_ids):
                    scal[k, c] = values[mid]
            np.clip(scal, layout.scal_lo, layout.scal_hi, out=scal)

            conf = None
            conf_norms = None
            conf_labels: tuple[tuple[str, ...], ...] = ()
            if layout.conf_ids:
                segments: list[np.ndarray] = []
                labels_per_seg: list[tuple[str, ...]] = []
                for mid in layout.conf_ids:
                    vecs = [traits.instances[i.instance_id][mid] for i in insts]
                    labels = vecs[0].labels
                    for v in vecs:
                        if v.labels != labels:
                            raise DimensionMismatch(
                                f"instances of '{record.image_id}' disagree on '{mid}' labels"
                            )
                    labels_per_seg.append(labels)
                    segments.append(np.stack([v.values for v in vecs]))
                conf = np.concatenate(segments, axis=1)
                conf_labels = tuple(labels_per_seg)
                norms = [np.sqrt(np.einsum("ij,ij->i", s, s)) for s in segments]
                conf_norms = np.stack(norms, axis=1)

            sets: dict[str, list[frozenset]] = {
                mid: [frozenset(traits.instances[i.instance_id][mid]) for i in insts]
                for mid in layout.set_ids
            }
            pools[key] = PreparedPool(key, ids, centroids, scal, conf, conf_norms, conf_labels, sets)

        return PreparedRecord(record, traits, image_values, pools, self.registry)

    # -- image-scope similarity -------------------------------------------

    def _compile_image(self, d: MeasureDescriptor):
        """One closure per descriptor; mirrors the public metric functions."""
        if d.metric == "abs_error":
            lo, hi = d.range
            span = hi - lo

            def fn(va, vb):
                va = lo if va < lo else (hi if va > hi else va)
                vb = lo if vb < lo else (hi if vb > hi else vb)
                return 1.0 - abs(va - vb) / span
        elif d.metric == "binary":
            def fn(va, vb):
                return 1.0 if va == vb else 0.0
        elif d.metric == "count_ratio":
            def fn(va, vb):
                if va == vb:
                    return 1.0
                return min(va, vb) / max(va, vb)
        elif d.metric == "hellinger":
            def fn(va, vb):
                if va.shape != vb.shape:
                    raise DimensionMismatch(f"histogram bins {va.shape} vs {vb.shape}")
                return _hellinger_fast(va, vb)
        elif d.metric == "palette_cielab":
            def fn(va, vb):
                return 1.0 - min(metrics.delta_e76(va, vb) / 100.0, 1.0)
        elif d.metric == "jaccard":
            fn = metrics.jaccard_similarity
        elif d.metric == "continuous_jaccard":
            fn = metrics.continuous_jaccard
        else:  # cosine on (values, norm, labels) triples prepared ahead of time
            signed = d.signed

            def fn(va, vb):
                vec_a, norm_a, labels_a = va
                vec_b, norm_b, labels_b = vb
                if labels_a != labels_b:
                    raise DimensionMismatch("label lists differ")
                if vec_a.shape != vec_b.shape:
                    raise DimensionMismatch(f"vector shapes {vec_a.shape} vs {vec_b.shape}")
                if norm_a == 0.0 or norm_b == 0.0:
                    raise ZeroVector("cosine similarity undefined on an all-zero vector")
                if np.array_equal(vec_a, vec_b):
                    return 1.0
                cos = float(np.dot(vec_a, vec_b)) / (norm_a * norm_b)
                cos = max(-1.0, min(1.0, cos))
                if signed:
                    return (cos + 1.0) / 2.0
                return max(0.0, cos)
        return fn

    def _image_similarity(self, d: MeasureDescriptor, a: PreparedRecord, b: PreparedRecord) -> float:
        va = a.image_values[d.measure_id]
        vb = b.image_values[d.measure_id]
        if va is None or vb is None:
            return 1.0 if va is vb else 0.0
        try:
            return self._image_fns[d.measure_id](va, vb)
        except FrescoError as exc:
            raise type(exc)(f"{d.path}: {exc}") from exc

    # -- instance-scope blocks ----------------------------------------------

    def _instance_values(
        self,
        a: PreparedRecord,
        b: PreparedRecord,
        pool_pairs: dict,
        include_unpaired: bool,
        detail: bool,
        needed_sets: set[str],
    ) -> tuple[dict[str, float], dict[str, list[ScoreNode]]]:
        """Compound value per instance measure, plus leaf nodes in detail mode."""
        pair_sums: dict[str, float] = {}
        leaves: dict[str, list[ScoreNode]] = {}
        slots = {"face": 0, "object": 0}
        pairs_n = {"face": 0, "object": 0}

        def add_leaf(mid: str, name: str, value: float) -> None:
            d = self.registry.by_id[mid]
            leaves.setdefault(mid, []).append(
                ScoreNode(f"{d.path}/{name}", name, value, 1.0)
            )

        for key, (pa, pb, rows, cols) in pool_pairs.items():
            kind = key[0]
            layout = self._layouts[kind]
            na = len(pa.ids) if pa else 0
            nb = len(pb.ids) if pb else 0
            slots[kind] += max(na, nb)
            pairs_n[kind] += len(rows)
            if rows:
                xa = pa.scal[rows]
                xb = pb.scal[cols]
                sims = 1.0 - np.abs(xa - xb) / layout.scal_span
                colsum = sims.sum(axis=0)
                for c, mid in enumerate(layout.scal_ids):
                    pair_sums[mid] = pair_sums.get(mid, 0.0) + float(colsum[c])
                if detail:
                    for c, mid in enumerate(layout.scal_ids):
                        for k, (r, j) in enumerate(zip(rows, cols)):
                            add_leaf(mid, f"{pa.ids[r]}~{pb.ids[j]}", float(sims[k, c]))
                if layout.conf_ids:
                    conf_sims = self._conf_block(pa, pb, rows, cols, layout)
                    conf_colsum = conf_sims.sum(axis=0)
                    for c, mid in enumerate(layout.conf_ids):
                        pair_sums[mid] = pair_sums.get(mid, 0.0) + float(conf_colsum[c])
                    if detail:
                        for c, mid in enumerate(layout.conf_ids):
                            for k, (r, j) in enumerate(zip(rows, cols)):
                                add_leaf(mid, f"{pa.ids[r]}~{pb.ids[j]}", float(conf_sims[k, c]))
                for mid in layout.set_ids:
                    if mid not in needed_sets and not detail:
                        continue
                    sa = pa.sets[mid]
                    sb = pb.sets[mid]
                    total = pair_sums.get(mid, 0.0)
                    for r, j in zip(rows, cols):
                        s = metrics.jaccard_similarity(sa[r], sb[j])
                        total += s
                        if detail:
                            add_leaf(mid, f"{pa.ids[r]}~{pb.ids[j]}", s)
                    pair_sums[mid] = total
            if detail and include_unpaired:
                matched_a, matched_b = set(rows), set(cols)
                for mids in (layout.scal_ids, layout.conf_ids, layout.set_ids):
                    for mid in mids:
                        for r in range(na):
                            if r not in matched_a:
                                add_leaf(mid, f"{pa.ids[r]}~", 0.0)
                        for c in range(nb):
                            if c not in matched_b:
                                add_leaf(mid, f"~{pb.ids[c]}", 0.0)

        values: dict[str, float] = {}
        for d in self._instance_descs:
            if d.applies_to == "all":
                denom = slots["face"] + slots["object"]
                npairs = pairs_n["face"] + pairs_n["object"]
            else:
                denom = slots[d.applies_to]
                npairs = pairs_n[d.applies_to]
            sum_m = pair_sums.get(d.measure_id, 0.0)
            if include_unpaired:
                values[d.measure_id] = sum_m / denom if denom else 1.0
            else:
                values[d.measure_id] = sum_m / npairs if npairs else (0.0 if denom else 1.0)
        return values, leaves

    def _conf_block(
        self,
        pa: PreparedPool,
        pb: PreparedPool,
        rows: list[int],
        cols: list[int],
        layout: _KindLayout,
    ) -> np.ndarray:
        if pa.conf_labels != pb.conf_labels:
            raise DimensionMismatch("confidence label lists differ between images")
        starts = []
        offset = 0
        for labels in pa.conf_labels:
            starts.append(offset)
            offset += len(labels)
        starts = np.asarray(starts, dtype=np.intp)
        xa = pa.conf[rows]
        xb = pb.conf[cols]
        dots = np.add.reduceat(xa * xb, starts, axis=1)
        equal = np.minimum.reduceat((xa == xb).astype(np.float64), starts, axis=1) == 1.0
        denom = pa.conf_norms[rows] * pb.conf_norms[cols]
        with np.errstate(invalid="ignore", divide="ignore"):
            cos = dots / denom
        sims = np.maximum(np.clip(cos, -1.0, 1.0), 0.0)
        sims = np.where(np.isnan(sims), 0.0, sims)
        return np.where(equal, 1.0, sims)

    # -- matching ------------------------------------------------------------

    def _match_pools(self, a: PreparedRecord, b: PreparedRecord) -> dict:
        pool_pairs: dict = {}
        for key in sorted(set(a.pools) | set(b.pools)):
            pa = a.pools.get(key)
            pb = b.pools.get(key)
            if pa is not None and pb is not None:
                cost = squared_distance_matrix(pa.centroids, pb.centroids)
                rows, cols, _ = solve_assignment(cost)
            else:
                rows, cols = [], []
            pool_pairs[key] = (pa, pb, rows, cols)
        return pool_pairs

    def match_result(self, a: PreparedRecord, b: PreparedRecord, pool_pairs: dict | None = None) -> MatchResult:
        if pool_pairs is None:
            pool_pairs = self._match_pools(a, b)
        pairs: list[tuple[str, str]] = []
        unmatched_i: list[str] = []
        unmatched_j: list[str] = []
        pool_matches: list[PoolMatch] = []
        total = 0.0
        for key, (pa, pb, rows, cols) in pool_pairs.items():
            ids_a = pa.ids if pa else ()
            ids_b = pb.ids if pb else ()
            cost = 0.0
            for r, c in zip(rows, cols):
                dx = pa.centroids[r, 0] - pb.centroids[c, 0]
                dy = pa.centroids[r, 1] - pb.centroids[c, 1]
                cost += float(dx * dx + dy * dy)
            total += cost
            pairs.extend((ids_a[r], ids_b[c]) for r, c in zip(rows, cols))
            matched_a, matched_b = set(rows), set(cols)
            unmatched_i.extend(ids_a[r] for r in range(len(ids_a)) if r not in matched_a)
            unmatched_j.extend(ids_b[c] for c in range(len(ids_b)) if c not in matched_b)
            pool_matches.append(PoolMatch(key, ids_a, ids_b, tuple(zip(rows, cols)), cost))
        return MatchResult(tuple(pairs), tuple(unmatched_i), tuple(unmatched_j), total, tuple(pool_matches))

    def _pool_pairs_from_match(self, a: PreparedRecord, b: PreparedRecord, match: MatchResult) -> dict:
        pool_pairs: dict = {}
        for pm in match.pools:
            pa = a.pools.get(pm.key)
            pb = b.pools.get(pm.key)
            if (pa.ids if pa else ()) != pm.row_ids or (pb.ids if pb else ()) != pm.col_ids:
                raise FrescoError("match result does not correspond to these records")
            rows = [r for r, _ in pm.pairs]
            cols = [c for _, c in pm.pairs]
            pool_pairs[pm.key] = (pa, pb, rows, cols)
        return pool_pairs

    # -- pair scoring ----------------------------------------------------------

    def _check_compatible(self, a: PreparedRecord, b: PreparedRecord) -> None:
        if a.registry is not b.registry and a.registry.fingerprint != b.registry.fingerprint:
            raise RegistryMismatch("records were prepared under different registries")

    def _measure_weight(self, d: MeasureDescriptor, weights: WeightConfig) -> float:
        nw = weights.node_weights
        if nw:
            if d.path in nw:
                return nw[d.path]
            if d.measure_id in nw:
                return nw[d.measure_id]
        return d.weight

    def measure_value(
        self,
        a: PreparedRecord,
        b: PreparedRecord,
        measure: MeasureDescriptor | str,
        include_unpaired: bool = True,
        match: MatchResult | None = None,
    ) -> float:
        """Compound similarity of one measure between two prepared records."""
        d = self.registry.get(measure) if isinstance(measure, str) else measure
        self._check_compatible(a, b)
        if d.scope == "image":
            return self._image_similarity(d, a, b)
        if match is not None and match.pools:
            pool_pairs = self._pool_pairs_from_match(a, b, match)
        else:
            pool_pairs = self._match_pools(a, b)
        values, _ = self._instance_values(
            a, b, pool_pairs, include_unpaired, detail=False, needed_sets={d.measure_id}
        )
        return values[d.measure_id]

    def weight_plan(self, weights: WeightConfig) -> _Plan:
        """Resolve effective weights once; reused across a whole rank loop."""
        levels = []
        needed_sets = set()
        for level in LEVELS:
            lw = weights.level_weight(level)
            if lw == 0.0:
                continue
            groups = []
            for group, descs in self.registry.tree[level].items():
                gpath = f"{level}/{group}"
                gw = weights.node_weights.get(gpath, 1.0)
                if gw == 0.0:
                    continue
                entries = []
                for d in descs:
                    mw = self._measure_weight(d, weights)
                    if mw == 0.0:
                        continue
                    entries.append((d, mw))
                    if d.scope == "instance" and d.metric == "jaccard":
                        needed_sets.add(d.measure_id)
                if entries:
                    groups.append((gpath, group, gw, tuple(entries)))
            if groups:
                levels.append((level, lw, tuple(groups)))
        return _Plan(tuple(levels), frozenset(needed_sets))

    def score_pair(
        self,
        a: PreparedRecord,
        b: PreparedRecord,
        weights: WeightConfig = DEFAULT_WEIGHTS,
        detail: bool = False,
        include_unpaired: bool = True,
        pool_pairs: dict | None = None,
        plan: _Plan | None = None,
    ) -> tuple[PairScore, ScoreNode | None, dict]:
        """Shared scoring core. Returns (PairScore, detail tree root, pool pairs)."""
        self._check_compatible(a, b)
        if pool_pairs is None:
            pool_pairs = self._match_pools(a, b)
        if plan is None:
            plan = self.weight_plan(weights)
        instance_values, instance_leaves = self._instance_values(
            a, b, pool_pairs, include_unpaired, detail,
            set(self._layouts["face"].set_ids + self._layouts["object"].set_ids)
            if detail else plan.needed_sets,
        )

        if not detail:
            return self._fast_aggregate(a, b, plan, instance_values), None, pool_pairs
        return self._detail_aggregate(
            a, b, weights, instance_values, instance_leaves
        ) + (pool_pairs,)

    def _fast_aggregate(self, a, b, plan: _Plan, instance_values) -> PairScore:
        level_values: dict[str, float] = {}
        root_num = 0.0
        root_den = 0.0
        image_sim = self._image_similarity
        for level, lw, groups in plan.levels:
            level_num = 0.0
            level_den = 0.0
            for _, _, gw, entries in groups:
                group_num = 0.0
                group_den = 0.0
                for d, mw in entries:
                    if d.scope == "image":
                        value = image_sim(d, a, b)
                    else:
                        value = instance_values[d.measure_id]
                    group_num += mw * value
                    group_den += mw
                level_num += gw * (group_num / group_den)
                level_den += gw
            level_value = level_num / level_den
            level_values[level] = level_value
            root_num += lw * level_value
            root_den += lw
        if root_den == 0.0:
            raise FrescoError("no positively weighted level produced a value")
        return PairScore(root_num / root_den, level_values)

    def _detail_aggregate(
        self, a, b, weights: WeightConfig, instance_values, instance_leaves
    ) -> tuple[PairScore, ScoreNode]:
        level_nodes: list[ScoreNode] = []
        level_values: dict[str, float] = {}
        root_num = 0.0
        root_den = 0.0
        for level in LEVELS:
            lw = weights.level_weight(level)
            group_nodes: list[ScoreNode] = []
            level_num = 0.0
            level_den = 0.0
            for group, descs in self.registry.tree[level].items():
                gpath = f"{level}/{group}"
                gw = weights.node_weights.get(gpath, 1.0)
                measure_nodes: list[ScoreNode] = []
                group_num = 0.0
                group_den = 0.0
                for d in descs:
                    mw = self._measure_weight(d, weights)
                    if d.scope == "image":
                        value = self._image_similarity(d, a, b)
                    else:
                        value = instance_values[d.measure_id]
                    group_num += mw * value
                    group_den += mw
                    measure_nodes.append(ScoreNode(
                        d.path, d.name, value, mw,
                        tuple(instance_leaves.get(d.measure_id, ())),
                    ))
                if group_den == 0.0:
                    continue
                group_value = group_num / group_den
                level_num += gw * group_value
                level_den += gw
                group_nodes.append(ScoreNode(gpath, group, group_value, gw, tuple(measure_nodes)))
            if level_den == 0.0:
                continue
            level_value = level_num / level_den
            level_values[level] = level_value
            root_num += lw * level_value
            root_den += lw
            level_nodes.append(ScoreNode(level, level, level_value, lw, tuple(group_nodes)))
        if root_den == 0.0:
            raise FrescoError("no positively weighted level produced a value")
        root_value = root_num / root_den
        root = ScoreNode("overall", "overall", root_value, 1.0, tuple(level_nodes))
        return PairScore(root_value, level_values), root


_default_scorer: Scorer | None = None


def default_scorer() -> Scorer:
    global _default_scorer
    if _default_scorer is None:
        _default_scorer = Scorer()
    return _default_scorer


def _canonical(a: PreparedRecord, b: PreparedRecord) -> tuple[PreparedRecord, PreparedRecord]:
    if b.record.image_id < a.record.image_id:
        return b, a
    return a, b


def fresco_score(
    rec_i: ImageRecord,
    rec_j: ImageRecord,
    traits_i: TraitVector | None = None,
    traits_j: TraitVector | None = None,
    weights: WeightConfig = DEFAULT_WEIGHTS,
    scorer: Scorer | None = None,
) -> ScoreBreakdown:
    """Full breakdown tree between two records (canonical image_id order)."""
    scorer = scorer or default_scorer()
    a = scorer.prepare(rec_i, traits_i)
    b = scorer.prepare(rec_j, traits_j)
    return score_prepared(a, b, weights, scorer)


def score_prepared(
    a: PreparedRecord,
    b: PreparedRecord,
    weights: WeightConfig = DEFAULT_WEIGHTS,
    scorer: Scorer | None = None,
) -> ScoreBreakdown:
    scorer = scorer or default_scorer()
    a, b = _canonical(a, b)
    pair, root, pool_pairs = scorer.score_pair(a, b, weights, detail=True)
    match = scorer.match_result(a, b, pool_pairs)
    return ScoreBreakdown(a.record.image_id, b.record.image_id, root, match, weights)


_LEVEL_ISOLATE = {
    "plastic": WeightConfig(1.0, 0.0, 0.0),
    "figurative": WeightConfig(0.0, 1.0, 0.0),
    "enunciational": WeightConfig(0.0, 0.0, 1.0),
}


def level_score(
    rec_i: ImageRecord,
    rec_j: ImageRecord,
    level: str,
    match: MatchResult | None = None,
    scorer: Scorer | None = None,
) -> float:
    """One level's subtree value, for per-level ranking."""
    if level not in _LEVEL_ISOLATE:
        raise FrescoError(f"unknown level '{level}'")
    scorer = scorer or default_scorer()
    a = scorer.prepare(rec_i)
    b = scorer.prepare(rec_j)
    pool_pairs = None
    if match is not None and match.pools:
        pool_pairs = scorer._pool_pairs_from_match(a, b, match)
    pair, _, _ = scorer.score_pair(a, b, _LEVEL_ISOLATE[level], pool_pairs=pool_pairs)
    return pair.levels[level]


def measure_score(
    rec_i: ImageRecord,
    rec_j: ImageRecord,
    measure_id: str,
    match: MatchResult | None = None,
    include_unpaired: bool = True,
    scorer: Scorer | None = None,
) -> float:
    """Single-measure compound similarity."""
    scorer = scorer or default_scorer()
    a = scorer.prepare(rec_i)
    b = scorer.prepare(rec_j)
    return scorer.measure_value(a, b, measure_id, include_unpaired, match)
