"""Cross-model agreement analyses over an archive: people presence,
group-size distributions, and thresholded topic overlap.

A synset maps one concept to the label lists each task uses for it, so the
same notion of "person" can be probed through faces, detector boxes,
segmentation coverage, tags, or caption phrasing. The archive schema has no
panoptic channel, so the recognized task name `panoptic` is reported as
unsupported rather than silently aliased to another source.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import EmptyArchive, MissingEmbedding, UnknownTask, UnsupportedTask
from .records import EmbeddingTable, ImageRecord
from .traits import DEFAULT_THRESHOLDS, GROUP_SIZES, ThresholdConfig, discretize_group_size

TASKS = ("face_detection", "object_detection", "panoptic", "semantic", "tagging", "captioning")
COUNTABLE_TASKS = ("face_detection", "object_detection")
LABELED_TASKS = ("object_detection", "semantic", "tagging")

TASK_ALIASES = {
    "faces": "face_detection",
    "objects": "object_detection",
    "tags": "tagging",
    "semantic": "semantic",
    "captions": "captioning",
    "panoptic": "panoptic",
}


@dataclass(frozen=True)
class SynsetConfig:
    """concept -> task -> label list (or trigger phrases for captioning)."""

    concepts: dict[str, dict[str, tuple[str, ...]]]

    def __post_init__(self):
        for concept, tasks in self.concepts.items():
            for task, labels in tasks.items():
                if task not in TASKS:
                    raise UnknownTask(f"synset '{concept}' names unknown task '{task}'")
                if not labels:
                    raise ValueError(f"synset '{concept}' has an empty label list for '{task}'")

    def labels(self, concept: str, task: str) -> tuple[str, ...]:
        try:
            return self.concepts[concept][task]
        except KeyError:
            raise UnknownTask(f"no '{concept}' labels configured for task '{task}'") from None


DEFAULT_SYNSETS = SynsetConfig({
    "person": {
        "face_detection": ("face",),
        "object_detection": ("person", "man", "woman", "boy", "girl"),
        "semantic": ("person", "people"),
        "tagging": ("person", "people", "man", "woman", "boy", "girl",
                    "family", "crowd", "portrait", "selfie"),
        "captioning": ("person", "people", "man", "woman", "boy", "girl",
                       "family", "crowd", "portrait", "selfie", "mother", "father"),
    },
})


def load_synsets(path: str) -> SynsetConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return SynsetConfig({
        concept: {task: tuple(labels) for task, labels in tasks.items()}
        for concept, tasks in raw.items()
    })


def _check_task(task: str) -> None:
    if task not in TASKS:
        raise UnknownTask(f"unknown task '{task}' (expected one of {TASKS})")
    if task == "panoptic":
        raise UnsupportedTask("the archive schema carries no panoptic annotations")


def person_count_for_task(record: ImageRecord, task: str, synset: SynsetConfig) -> int | None:
    """Person count where the task is countable, else None (presence only)."""
    if task == "face_detection":
        return sum(1 for i in record.instances if i.kind == "face")
    if task == "object_detection":
        labels = set(synset.labels("person", task))
        return sum(1 for i in record.instances if i.kind == "object" and i.category in labels)
    return None


def person_present(record: ImageRecord, task: str, synset: SynsetConfig) -> bool:
    count = person_count_for_task(record, task, synset)
    if count is not None:
        return count > 0
    if task == "semantic":
        labels = set(synset.labels("person", task))
        return any(fraction > 0 for label, fraction in record.coverage.items() if label in labels)
    if task == "tagging":
        labels = set(synset.labels("person", task))
        return any(t.label in labels for t in record.tags)
    # captioning: case-insensitive substring triggers
    text = record.caption.text.lower()
    return any(phrase.lower() in text for phrase in synset.labels("person", "captioning"))


@dataclass(frozen=True)
class PresenceStats:
    task: str
    images: int
    presence_fraction: float
    mean_count: float | None  # None for presence-only tasks


def people_presence(
    records: list[ImageRecord],
    synset: SynsetConfig = DEFAULT_SYNSETS,
    task: str = "face_detection",
) -> PresenceStats:
    """Fraction of images with at least one person, and mean count if countable."""
    _check_task(task)
    if not records:
        raise EmptyArchive("people_presence needs at least one record")
    present = 0
    counts: list[int] = []
    for record in records:
        count = person_count_for_task(record, task, synset)
        if count is not None:
            counts.append(count)
            present += count > 0
        else:
            present += person_present(record, task, synset)
    return PresenceStats(
        task=task,
        images=len(records),
        presence_fraction=present / len(records),
        mean_count=sum(counts) / len(counts) if counts else None,
    )


def group_distribution(
    records: list[ImageRecord],
    task: str = "object_detection",
    cfg: ThresholdConfig = DEFAULT_THRESHOLDS,
    synset: SynsetConfig = DEFAULT_SYNSETS,
) -> dict[str, float]:
    """Fraction of images per group-size bucket, for a countable task."""
    _check_task(task)
    if task not in COUNTABLE_TASKS:
        raise UnsupportedTask(f"task '{task}' reports presence only, not counts")
    if not records:
        raise EmptyArchive("group_distribution needs at least one record")
    tally = {label: 0 for label in GROUP_SIZES}
    for record in records:
        count = person_count_for_task(record, task, synset)
        tally[discretize_group_size(count, cfg)] += 1
    return {label: tally[label] / len(records) for label in GROUP_SIZES}


# ---------------------------------------------------------------------------
# topic overlap

def task_labels(record: ImageRecord, task: str) -> frozenset[str]:
    """The set of topics one task reports for one image."""
    _check_task(task)
    if task == "tagging":
        return record.tag_labels()
    if task == "object_detection":
        return frozenset(i.category for i in record.instances if i.kind == "object")
    if task == "semantic":
        return frozenset(label for label, fraction in record.coverage.items() if fraction > 0)
    raise UnsupportedTask(f"task '{task}' produces no label set")


def topic_overlap(
    labels_a: frozenset[str] | set[str],
    labels_b: frozenset[str] | set[str],
    emb: EmbeddingTable,
    tau: float,
) -> tuple[int, int, int]:
    """(first only, common, second only) under greedy one-to-one matching.

    Candidate pairs with cosine >= tau are taken in descending-similarity
    order (ties lexicographic), each label matched at most once. Raising tau
    can only shrink the candidate prefix, so the common count is monotone
    non-increasing in tau.
    """
    la = sorted(labels_a)
    lb = sorted(labels_b)
    for label in la + lb:
        if label not in emb:
            raise MissingEmbedding(label)
    candidates: list[tuple[float, str, str]] = []
    for a in la:
        va = emb[a]
        for b in lb:
            sim = float(np.dot(va, emb[b]))
            if sim >= tau:
                candidates.append((-sim, a, b))
    candidates.sort()
    used_a: set[str] = set()
    used_b: set[str] = set()
    common = 0
    for _, a, b in candidates:
        if a in used_a or b in used_b:
            continue
        used_a.add(a)
        used_b.add(b)
        common += 1
    return len(la) - common, common, len(lb) - common


@dataclass(frozen=True)
class OverlapRow:
    tau: float
    first_only: int
    common: int
    second_only: int

    @property
    def fractions(self) -> tuple[float, float, float]:
        total = self.first_only + self.common + self.second_only
        if total == 0:
            return (0.0, 1.0, 0.0)  # no topics anywhere: vacuously in common
        return (self.first_only / total, self.common / total, self.second_only / total)


@dataclass(frozen=True)
class OverlapReport:
    first_task: str
    second_task: str
    images: int
    rows: tuple[OverlapRow, ...]


DEFAULT_OVERLAP_THRESHOLDS = (0.80, 0.85, 0.90)


def overlap_report(
    records: list[ImageRecord],
    task_pair: tuple[str, str],
    emb: EmbeddingTable,
    thresholds: tuple[float, ...] = DEFAULT_OVERLAP_THRESHOLDS,
) -> OverlapReport:
    """Aggregate per-image topic overlap across an archive."""
    first_task, second_task = task_pair
    if not records:
        raise EmptyArchive("overlap_report needs at least one record")
    label_sets = [
        (task_labels(r, first_task), task_labels(r, second_task)) for r in records
    ]
    rows = []
    for tau in thresholds:
        first_only = common = second_only = 0
        for la, lb in label_sets:
            f, c, s = topic_overlap(la, lb, emb, tau)
            first_only += f
            common += c
            second_only += s
        rows.append(OverlapRow(tau, first_only, common, second_only))
    return OverlapReport(first_task, second_task, len(records), tuple(rows))


def parse_task_pair(spec: str) -> tuple[str, str]:
    """'tags-objects' -> ('tagging', 'object_detection')."""
    parts = spec.lower().split("-")
    if len(parts) != 2:
        raise UnknownTask(f"task pair must look like 'tags-objects', got '{spec}'")
    tasks = []
    for part in parts:
        name = TASK_ALIASES.get(part, part)
        if name not in TASKS:
            raise UnknownTask(f"unknown task '{part}'")
        tasks.append(name)
    return tasks[0], tasks[1]


# ---------------------------------------------------------------------------
# report rendering

def render_presence_table(stats: list[PresenceStats]) -> str:
    header = f"{'Task':<18} {'Images with people':>20} {'People per image':>18}"
    lines = [header, "-" * len(header)]
    for s in stats:
        mean = f"{s.mean_count:.2f}" if s.mean_count is not None else "-"
        lines.append(f"{s.task:<18} {s.presence_fraction * 100:>19.2f}% {mean:>18}")
    return "\n".join(lines)


def render_group_table(distributions: dict[str, dict[str, float]]) -> str:
    header = f"{'Task':<18}" + "".join(f" {label:>14}" for label in GROUP_SIZES)
    lines = [header, "-" * len(header)]
    for task, dist in distributions.items():
        lines.append(
            f"{task:<18}" + "".join(f" {dist[label] * 100:>13.2f}%" for label in GROUP_SIZES)
        )
    return "\n".join(lines)


def render_overlap_table(report: OverlapReport) -> str:
    title = f"{report.first_task} vs {report.second_task} ({report.images} images)"
    header = f"{'tau':>6} {'In first':>10} {'In common':>10} {'In second':>10}"
    lines = [title, header, "-" * len(header)]
    for row in report.rows:
        f, c, s = row.fractions
        lines.append(f"{row.tau:>6.2f} {f * 100:>9.2f}% {c * 100:>9.2f}% {s * 100:>9.2f}%")
    return "\n".join(lines)


def overlap_report_csv(report: OverlapReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["first_task", "second_task", "tau",
                     "n_first_only", "n_common", "n_second_only",
                     "in_first", "in_common", "in_second"])
    for row in report.rows:
        f, c, s = row.fractions
        writer.writerow([report.first_task, report.second_task, repr(row.tau),
                         row.first_only, row.common, row.second_only,
                         repr(f), repr(c), repr(s)])
    return buf.getvalue()
