"""Immutable in-memory archive: cached traits, ranking, distributions, export.

Scoring a reference against the archive is exhaustive (the similarity is not a
metric, so there is no index to prune with); candidates are scored serially or
across forked workers with a deterministic merge, so identical queries always
produce identical bytes.
"""

from __future__ import annotations

import csv
import multiprocessing
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import DuplicateId, InvariantViolation, IoFailure, UnknownImage, UnknownMeasure
from .records import ImageRecord, validate_archive
from .scoring import (
    DEFAULT_WEIGHTS,
    PreparedRecord,
    ScoreBreakdown,
    Scorer,
    WeightConfig,
    score_prepared,
)

WINDOWS = ("top", "median", "last")

# derived categorical traits usable in distributions and the tabular export
CATEGORICAL_IMAGE_TRAITS = {
    "0.1": "image medium",
    "1.2.1-grayscale": "grayscale flag",
    "2.2.1.1-group": "group-size bucket",
    "2.2.4.4": "man-made vs natural",
    "3.1.3-class": "portrait vs scene",
    "3.1.3-indoor_outdoor": "indoor vs outdoor",
}
CATEGORICAL_INSTANCE_TRAITS = {
    "1.3.1-band": "vertical band",
    "1.3.2-band": "horizontal band",
    "1.3.3-class": "central vs peripheral",
    "2.5.2-label": "dominant emotion",
}


@dataclass(frozen=True)
class BuildStats:
    records: int
    faces: int
    objects: int
    seconds: float


@dataclass(frozen=True)
class RankedEntry:
    image_id: str
    similarity: float
    breakdown: ScoreBreakdown | None = None

    def to_json(self) -> dict:
        out: dict[str, Any] = {"image_id": self.image_id, "similarity": self.similarity}
        if self.breakdown is not None:
            out["breakdown"] = self.breakdown.to_json()
        return out


@dataclass(frozen=True)
class RankedList:
    reference_id: str
    entries: tuple[RankedEntry, ...]
    query: dict

    def to_json(self) -> dict:
        return {
            "reference": self.reference_id,
            "query": self.query,
            "entries": [e.to_json() for e in self.entries],
        }


@dataclass(frozen=True)
class Distribution:
    measure_id: str
    kind: str  # "histogram" | "tally"
    count: int
    bin_edges: tuple[float, ...] | None
    fractions: tuple[float, ...] | None
    tally: dict[str, float] | None

    def rows(self) -> list[tuple[str, float]]:
        """Plot-ready two-column rows (bin midpoint or label, fraction)."""
        if self.kind == "histogram":
            mids = [
                (self.bin_edges[i] + self.bin_edges[i + 1]) / 2.0
                for i in range(len(self.bin_edges) - 1)
            ]
            return [(repr(m), f) for m, f in zip(mids, self.fractions)]
        return [(label, f) for label, f in sorted(self.tally.items())]

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "measure": self.measure_id, "kind": self.kind, "count": self.count,
        }
        if self.kind == "histogram":
            out["bin_edges"] = list(self.bin_edges)
            out["fractions"] = list(self.fractions)
        else:
            out["tally"] = dict(sorted(self.tally.items()))
        return out

    def to_csv(self) -> str:
        lines = ["value,fraction"]
        lines += [f"{label},{repr(f)}" for label, f in self.rows()]
        return "\n".join(lines) + "\n"


class Archive:
    """Ordered records plus prepared scoring data; immutable after build."""

    def __init__(self, scorer: Scorer, prepared: list[PreparedRecord], stats: BuildStats):
        self.scorer = scorer
        self.prepared = prepared
        self.stats = stats
        self.index: dict[str, int] = {
            p.record.image_id: i for i, p in enumerate(prepared)
        }

    def __len__(self) -> int:
        return len(self.prepared)

    def ids(self) -> list[str]:
        return [p.record.image_id for p in self.prepared]

    def get(self, image_id: str) -> PreparedRecord:
        try:
            return self.prepared[self.index[image_id]]
        except KeyError:
            raise UnknownImage(f"image '{image_id}' not in archive") from None

    def record(self, image_id: str) -> ImageRecord:
        return self.get(image_id).record

    # -- queries ---------------------------------------------------------

    def score(self, id_a: str, id_b: str, weights: WeightConfig = DEFAULT_WEIGHTS) -> ScoreBreakdown:
        return score_prepared(self.get(id_a), self.get(id_b), weights, self.scorer)

    def rank(
        self,
        reference_id: str,
        weights: WeightConfig = DEFAULT_WEIGHTS,
        k: int = 8,
        window: str = "top",
        workers: int | None = None,
    ) -> RankedList:
        reference = self.get(reference_id)
        if k < 1:
            raise ValueError("k must be >= 1")
        plan = self.scorer.weight_plan(weights)

        def score_one(candidate: PreparedRecord) -> float:
            pair, _, _ = self.scorer.score_pair(reference, candidate, weights, plan=plan)
            return pair.similarity

        candidates = [p for p in self.prepared if p.record.image_id != reference_id]
        sims = self._map_scores(score_one, candidates, workers)
        query = {
            "weights": {"alpha": weights.alpha, "beta": weights.beta, "gamma": weights.gamma,
                        **({"node_weights": dict(sorted(weights.node_weights.items()))}
                           if weights.node_weights else {})},
            "k": k,
            "window": window,
        }
        return self._ranked(reference_id, candidates, sims, k, window, query)

    def rank_by_measure(
        self,
        reference_id: str,
        measure_id: str,
        k: int = 8,
        include_unpaired: bool = True,
        window: str = "top",
        workers: int | None = None,
    ) -> RankedList:
        reference = self.get(reference_id)
        if k < 1:
            raise ValueError("k must be >= 1")
        descriptor = self.scorer.registry.get(measure_id)

        def score_one(candidate: PreparedRecord) -> float:
            return self.scorer.measure_value(reference, candidate, descriptor, include_unpaired)

        candidates = [p for p in self.prepared if p.record.image_id != reference_id]
        sims = self._map_scores(score_one, candidates, workers)
        query = {"measure": measure_id, "include_unpaired": include_unpaired,
                 "k": k, "window": window}
        return self._ranked(reference_id, candidates, sims, k, window, query)

    def _map_scores(self, score_one, candidates: list[PreparedRecord], workers: int | None) -> list[float]:
        n = len(candidates)
        if workers is None:
            cpu = os.cpu_count() or 1
            workers = min(4, cpu) if n >= 4000 and cpu > 1 else 1
        if workers > 1 and n >= 2 * workers and hasattr(os, "fork"):
            try:
                return _forked_map(score_one, candidates, workers)
            except Exception:
                pass  # fall back to serial; results are identical either way
        return [score_one(c) for c in candidates]

    def _ranked(
        self,
        reference_id: str,
        candidates: list[PreparedRecord],
        sims: list[float],
        k: int,
        window: str,
        query: dict,
    ) -> RankedList:
        if window not in WINDOWS:
            raise ValueError(f"window must be one of {WINDOWS}")
        order = sorted(
            range(len(candidates)),
            key=lambda i: (-sims[i], candidates[i].record.image_id),
        )
        n = len(order)
        k_eff = min(k, n)
        if window == "top":
            picked = order[:k_eff]
        elif window == "last":
            picked = order[n - k_eff:]
        else:
            start = (n - k_eff) // 2
            picked = order[start:start + k_eff]
        entries = tuple(
            RankedEntry(candidates[i].record.image_id, sims[i]) for i in picked
        )
        return RankedList(reference_id, entries, query)

    # -- distributions -----------------------------------------------------

    def _trait_values(self, measure_id: str, scope_instance: bool) -> list:
        values = []
        for prepared in self.prepared:
            if scope_instance:
                for inst_values in prepared.traits.instances.values():
                    if measure_id in inst_values:
                        values.append(inst_values[measure_id])
            else:
                v = prepared.traits.image.get(measure_id)
                if v is not None:
                    values.append(v)
        return values

    def distribution(self, measure_id: str, bins: int = 20) -> Distribution:
        registry = self.scorer.registry
        if measure_id in registry:
            descriptor = registry.get(measure_id)
            if descriptor.metric == "abs_error":
                values = self._trait_values(measure_id, descriptor.scope == "instance")
                counts, edges = np.histogram(
                    np.asarray(values, dtype=np.float64), bins=bins, range=descriptor.range
                )
                total = int(counts.sum())
                fractions = counts / total if total else counts.astype(np.float64)
                return Distribution(measure_id, "histogram", len(values),
                                    tuple(float(e) for e in edges),
                                    tuple(float(f) for f in fractions), None)
            if descriptor.metric == "count_ratio":
                values = self._trait_values(measure_id, descriptor.scope == "instance")
                return _tally(measure_id, [str(v) for v in values])
            raise UnknownMeasure(
                f"measure '{measure_id}' has no scalar or categorical distribution"
            )
        if measure_id in CATEGORICAL_IMAGE_TRAITS:
            return _tally(measure_id, [_label(v) for v in self._trait_values(measure_id, False)])
        if measure_id in CATEGORICAL_INSTANCE_TRAITS:
            return _tally(measure_id, [_label(v) for v in self._trait_values(measure_id, True)])
        raise UnknownMeasure(f"measure '{measure_id}' not in registry")

    # -- tabular export ------------------------------------------------------

    def export_table(self, path: str, max_instances: int = 8) -> int:
        """One CSV row per image; a column dictionary lands next to it."""
        columns, describe = _column_plan(self.scorer, max_instances)
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow([c for c, _ in columns])
                for prepared in self.prepared:
                    writer.writerow(_row_for(prepared, columns, max_instances))
            with open(_dict_path(path), "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["column", "description"])
                for name, description in describe:
                    writer.writerow([name, description])
        except OSError as exc:
            raise IoFailure(f"cannot write '{path}': {exc}") from exc
        return len(self.prepared)


def _label(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _tally(measure_id: str, labels: list[str]) -> Distribution:
    counts: dict[str, int] = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    total = len(labels)
    fractions = {label: c / total for label, c in counts.items()} if total else {}
    return Distribution(measure_id, "tally", total, None, None, fractions)


def _dict_path(path: str) -> str:
    return path + ".columns.csv"


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, frozenset):
        return "|".join(sorted(value))
    return str(value)


def _column_plan(scorer: Scorer, max_instances: int):
    """(column key tuples, (name, description) rows), deterministic order."""
    registry = scorer.registry
    columns: list[tuple] = [("id",)]
    describe: list[tuple[str, str]] = [("image_id", "record identifier")]
    for d in registry.descriptors:
        if d.scope != "image" or d.metric not in ("abs_error", "count_ratio", "binary", "jaccard"):
            continue
        columns.append(("image", d.measure_id))
        describe.append((d.measure_id, d.name))
    for mid, description in CATEGORICAL_IMAGE_TRAITS.items():
        if mid in registry:
            continue  # already exported as a registry binary measure
        columns.append(("image", mid))
        describe.append((mid, description))
    for kind in ("face", "object"):
        layout_ids = list(scorer._layouts[kind].scal_ids)
        cat_ids = [mid for mid in CATEGORICAL_INSTANCE_TRAITS
                   if kind == "face" or not mid.startswith("2.5")]
        extra = ["category"] if kind == "object" else []
        for slot in range(max_instances):
            for mid in layout_ids + cat_ids + extra:
                name = f"{kind}{slot}.{mid}"
                columns.append(("inst", kind, slot, mid))
                description = (
                    "detector label" if mid == "category"
                    else CATEGORICAL_INSTANCE_TRAITS.get(mid)
                    or registry.get(mid).name
                )
                describe.append((name, f"{kind} {slot}: {description}"))
    names = [describe[i][0] for i in range(len(columns))]
    return list(zip(names, columns)), describe


def _row_for(prepared: PreparedRecord, columns, max_instances: int) -> list[str]:
    record = prepared.record
    traits = prepared.traits
    faces = [i for i in record.instances if i.kind == "face"][:max_instances]
    objects = [i for i in record.instances if i.kind == "object"][:max_instances]
    row: list[str] = []
    for _, key in columns:
        if key[0] == "id":
            row.append(record.image_id)
        elif key[0] == "image":
            row.append(_format_cell(traits.image.get(key[1])))
        else:
            _, kind, slot, mid = key
            pool = faces if kind == "face" else objects
            if slot >= len(pool):
                row.append("")
                continue
            inst = pool[slot]
            if mid == "category":
                row.append(inst.category)
            else:
                row.append(_format_cell(traits.instances[inst.instance_id].get(mid)))
    return row


# ---------------------------------------------------------------------------
# build + module-level operation wrappers

def build(
    records: Sequence[ImageRecord],
    scorer: Scorer | None = None,
    validate: bool = True,
) -> Archive:
    """Derive traits and scoring data for every record; linear in archive size."""
    scorer = scorer or Scorer()
    if validate:
        violations = validate_archive(records)
        for v in violations:
            if v.kind == "duplicate_id":
                raise DuplicateId(v.message)
        if violations:
            first = violations[0]
            raise InvariantViolation(first.field, first.message, first.image_id)
    t0 = time.perf_counter()
    prepared = [scorer.prepare(r) for r in records]
    seconds = time.perf_counter() - t0
    faces = sum(len(r.faces()) for r in records)
    objects = sum(len(r.objects()) for r in records)
    return Archive(scorer, prepared, BuildStats(len(records), faces, objects, seconds))


def rank(archive: Archive, reference_id: str, weights: WeightConfig = DEFAULT_WEIGHTS,
         k: int = 8, window: str = "top", workers: int | None = None) -> RankedList:
    return archive.rank(reference_id, weights, k, window, workers)


def rank_by_measure(archive: Archive, reference_id: str, measure_id: str, k: int = 8,
                    include_unpaired: bool = True, window: str = "top",
                    workers: int | None = None) -> RankedList:
    return archive.rank_by_measure(reference_id, measure_id, k, include_unpaired, window, workers)


def distribution(archive: Archive, measure_id: str, bins: int = 20) -> Distribution:
    return archive.distribution(measure_id, bins)


def export_table(archive: Archive, path: str, max_instances: int = 8) -> int:
    return archive.export_table(path, max_instances)


# -- forked parallel scoring --------------------------------------------------

_FORK_JOB = None


def _score_span(span: tuple[int, int]) -> list[float]:
    score_one, candidates = _FORK_JOB
    lo, hi = span
    return [score_one(candidates[i]) for i in range(lo, hi)]


def _forked_map(score_one, candidates: list, workers: int) -> list[float]:
    # children inherit the archive and closure via fork; only span bounds and
    # the resulting floats cross process boundaries
    global _FORK_JOB
    _FORK_JOB = (score_one, candidates)
    try:
        n = len(candidates)
        chunk = max(1, (n + workers * 4 - 1) // (workers * 4))
        spans = [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            parts = list(pool.map(_score_span, spans))
        return [value for part in parts for value in part]
    finally:
        _FORK_JOB = None
