"""Command-line surface of the engine.

Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import archive as arc
from .config import ENV_VAR, EngineConfig, load_config
from .consistency import (
    DEFAULT_OVERLAP_THRESHOLDS,
    DEFAULT_SYNSETS,
    group_distribution,
    load_synsets,
    overlap_report,
    overlap_report_csv,
    parse_task_pair,
    people_presence,
    render_group_table,
    render_overlap_table,
    render_presence_table,
)
from .errors import FrescoError
from .records import (
    iter_records,
    load_embedding_table,
    load_records,
    save_embedding_table,
    save_records,
    serialize_record,
    validate_archive,
)
from .scoring import Scorer, WeightConfig
from .synth import make_embedding_table, synthesize
from .traits import traits_to_dict


def _parse_weights(spec: str | None, fallback: WeightConfig) -> WeightConfig:
    if spec is None:
        return fallback
    parts = spec.split(",")
    if len(parts) != 3:
        raise FrescoError(f"--weights expects 'a,b,g', got '{spec}'")
    return WeightConfig(float(parts[0]), float(parts[1]), float(parts[2]))


def _read_records(path: str):
    if path == "-":
        return list(iter_records(sys.stdin))
    return load_records(path)


def _scorer(config: EngineConfig) -> Scorer:
    registry = config.load_registry()
    return Scorer(registry, config.thresholds)


def _load_archive(config: EngineConfig, override: str | None) -> arc.Archive:
    path = override or config.archive
    if path is None:
        raise FrescoError(f"no archive configured; pass --archive or set it in {ENV_VAR}")
    return arc.build(_read_records(path), _scorer(config))


def _synsets(config: EngineConfig):
    if config.synsets_path:
        return load_synsets(config.synsets_path)
    return DEFAULT_SYNSETS


def cmd_ingest(args, config: EngineConfig) -> int:
    records = _read_records(args.file)
    violations = validate_archive(records)
    if violations:
        for v in violations:
            print(f"{v.kind}\t{v.image_id}\t{v.field}\t{v.message}", file=sys.stderr)
        print(f"{len(violations)} violation(s) in {len(records)} record(s)", file=sys.stderr)
        return 1
    archive = arc.build(records, _scorer(config), validate=False)
    stats = archive.stats
    print(f"ingested {stats.records} records "
          f"({stats.faces} faces, {stats.objects} objects) "
          f"in {stats.seconds:.2f}s")
    if args.cache:
        with open(args.cache, "w", encoding="utf-8") as fh:
            for prepared in archive.prepared:
                fh.write(json.dumps(
                    {"image_id": prepared.record.image_id,
                     "traits": traits_to_dict(prepared.traits)},
                    separators=(",", ":"), sort_keys=True))
                fh.write("\n")
        print(f"trait cache written to {args.cache}")
    return 0


def cmd_derive(args, config: EngineConfig) -> int:
    archive = _load_archive(config, args.archive)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for prepared in archive.prepared:
            out.write(json.dumps(
                {"image_id": prepared.record.image_id,
                 "traits": traits_to_dict(prepared.traits)},
                separators=(",", ":"), sort_keys=True))
            out.write("\n")
    finally:
        if args.out:
            out.close()
    return 0


def cmd_score(args, config: EngineConfig) -> int:
    archive = _load_archive(config, args.archive)
    weights = _parse_weights(args.weights, config.weights)
    breakdown = archive.score(args.id_a, args.id_b, weights)
    if args.breakdown:
        print(json.dumps(breakdown.to_json(), indent=2))
    else:
        print(repr(breakdown.similarity))
    return 0


def cmd_rank(args, config: EngineConfig) -> int:
    archive = _load_archive(config, args.archive)
    if args.measure:
        ranked = archive.rank_by_measure(
            args.id, args.measure, args.k,
            include_unpaired=not args.exclude_unpaired, window=args.window,
        )
    else:
        if args.level:
            weights = WeightConfig(
                1.0 if args.level == "plastic" else 0.0,
                1.0 if args.level == "figurative" else 0.0,
                1.0 if args.level == "enunciational" else 0.0,
            )
        else:
            weights = _parse_weights(args.weights, config.weights)
        ranked = archive.rank(args.id, weights, args.k, window=args.window)
    for entry in ranked.entries:
        print(f"{entry.image_id}\t{repr(entry.similarity)}")
    return 0


def cmd_consistency(args, config: EngineConfig) -> int:
    archive = _load_archive(config, args.archive)
    records = [p.record for p in archive.prepared]
    synsets = _synsets(config)
    if args.task_pair == "presence":
        stats = [people_presence(records, synsets, t)
                 for t in ("face_detection", "object_detection", "semantic", "tagging", "captioning")]
        print(render_presence_table(stats))
        return 0
    if args.task_pair == "groups":
        dists = {t: group_distribution(records, t, archive.scorer.thresholds, synsets)
                 for t in ("face_detection", "object_detection")}
        print(render_group_table(dists))
        return 0
    pair = parse_task_pair(args.task_pair)
    emb_path = args.embeddings or config.embeddings_path
    if emb_path is None:
        raise FrescoError("topic overlap needs an embedding table (--embeddings)")
    emb = load_embedding_table(emb_path)
    thresholds = tuple(float(t) for t in args.thresholds.split(",")) \
        if args.thresholds else DEFAULT_OVERLAP_THRESHOLDS
    report = overlap_report(records, pair, emb, thresholds)
    if args.csv:
        sys.stdout.write(overlap_report_csv(report))
    else:
        print(render_overlap_table(report))
    return 0


def cmd_dist(args, config: EngineConfig) -> int:
    archive = _load_archive(config, args.archive)
    dist = archive.distribution(args.measure, args.bins)
    if args.csv:
        sys.stdout.write(dist.to_csv())
    else:
        print(json.dumps(dist.to_json(), indent=2))
    return 0


def cmd_export(args, config: EngineConfig) -> int:
    archive = _load_archive(config, args.archive)
    rows = archive.export_table(args.path, config.max_export_instances)
    print(f"wrote {rows} rows to {args.path}")
    return 0


def cmd_synth(args, config: EngineConfig) -> int:
    result = synthesize(args.n, args.seed, bins=args.bins, dups=args.dups)
    if args.out and args.out != "-":
        save_records(result.records, args.out)
    else:
        for record in result.records:
            sys.stdout.write(serialize_record(record))
            sys.stdout.write("\n")
    if args.truth:
        with open(args.truth, "w", encoding="utf-8") as fh:
            json.dump(result.truth, fh, indent=2, sort_keys=True)
    if args.embeddings_out:
        save_embedding_table(make_embedding_table(), args.embeddings_out)
    return 0


def cmd_serve(args, config: EngineConfig) -> int:
    from .service import serve

    archive = _load_archive(config, args.archive)
    if args.bind:
        config.bind = args.bind
    serve(archive, config, ui_dir=args.ui)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fresco",
        description="Score, rank, and audit annotated image archives.",
    )
    parser.add_argument("--config", help=f"config file (or set {ENV_VAR})")
    parser.add_argument("--archive", help="archive JSONL path, overrides config")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate an archive and build it once")
    p.add_argument("file", help="records JSONL path, or - for stdin")
    p.add_argument("--cache", help="write derived traits JSONL here")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("derive", help="emit derived traits for the archive")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(fn=cmd_derive)

    p = sub.add_parser("score", help="score a pair of images")
    p.add_argument("id_a")
    p.add_argument("id_b")
    p.add_argument("--weights", help="level weights a,b,g")
    p.add_argument("--breakdown", action="store_true", help="print the full tree")
    p.set_defaults(fn=cmd_score)

    p = sub.add_parser("rank", help="rank the archive against a reference image")
    p.add_argument("id")
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--level", choices=("plastic", "figurative", "enunciational"))
    p.add_argument("--measure", help="rank by a single measure id")
    p.add_argument("--weights", help="level weights a,b,g")
    p.add_argument("--window", choices=("top", "median", "last"), default="top")
    p.add_argument("--exclude-unpaired", action="store_true",
                   help="average only matched instances for --measure rankings")
    p.set_defaults(fn=cmd_rank)

    p = sub.add_parser("consistency", help="cross-model agreement reports")
    p.add_argument("task_pair",
                   help="'tags-objects', 'objects-semantic', ... or 'presence' / 'groups'")
    p.add_argument("--thresholds", help="comma-separated similarity thresholds")
    p.add_argument("--embeddings", help="embedding table path")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(fn=cmd_consistency)

    p = sub.add_parser("dist", help="distribution of one measure over the archive")
    p.add_argument("measure")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(fn=cmd_dist)

    p = sub.add_parser("export", help="export the archive as a CSV table")
    p.add_argument("path")
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("synth", help="generate a synthetic archive with ground truth")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dups", type=int, default=0)
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--out", help="records path (default stdout)")
    p.add_argument("--truth", help="ground-truth JSON path")
    p.add_argument("--embeddings-out", help="write the label embedding table here")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("serve", help="serve the HTTP API over the archive")
    p.add_argument("--bind", help="host:port")
    p.add_argument("--ui", help="static UI directory to mount at /ui")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        return args.fn(args, config)
    except FrescoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
