"""Regenerate every golden file under samples/ from the deterministic
generator. Run from the repo root:

    python scripts/regenerate_goldens.py

Goldens are byte-stable across runs and platforms; tests compare against
these bytes exactly, so only regenerate when the engine's numbers are
supposed to change.
"""

from __future__ import annotations

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from fresco import archive as arc
from fresco.consistency import overlap_report, overlap_report_csv
from fresco.records import save_embedding_table, save_records
from fresco.scoring import score_prepared
from fresco.synth import make_embedding_table, synthesize
from fresco.traits import traits_to_dict

SAMPLES = os.path.join(os.path.dirname(__file__), "..", "samples")

# pair_a: the first seed-7 record carrying 2 faces + 3 objects, plus its
# successor. The scan is deterministic, so the fixture is too.
PAIR_A_SEED = 7
PAIR_A_POOL = 60
CONSISTENCY_N = 100


def pair_a_records(records):
    for i in range(len(records) - 1):
        if len(records[i].faces()) == 2 and len(records[i].objects()) == 3:
            return [records[i], records[i + 1]]
    raise RuntimeError("no fixture candidate in the seed pool")


def main() -> None:
    os.makedirs(SAMPLES, exist_ok=True)
    result = synthesize(PAIR_A_POOL, seed=PAIR_A_SEED)
    pair = pair_a_records(result.records)
    save_records(pair, os.path.join(SAMPLES, "pair_a.jsonl"))

    archive = arc.build(pair)
    traits = traits_to_dict(archive.prepared[0].traits)
    with open(os.path.join(SAMPLES, "pair_a.traits.golden"), "w", encoding="utf-8") as fh:
        json.dump(traits, fh, indent=2, sort_keys=True)
        fh.write("\n")

    breakdown = score_prepared(archive.prepared[0], archive.prepared[1], scorer=archive.scorer)
    with open(os.path.join(SAMPLES, "pair_a.score.golden"), "w", encoding="utf-8") as fh:
        json.dump(breakdown.to_json(), fh, indent=2)
        fh.write("\n")

    archive.export_table(os.path.join(SAMPLES, "export.golden.csv"))

    emb = make_embedding_table()
    save_embedding_table(emb, os.path.join(SAMPLES, "embeddings.tsv"))

    big = synthesize(CONSISTENCY_N, seed=PAIR_A_SEED)
    report = overlap_report(big.records, ("tagging", "object_detection"), emb)
    with open(os.path.join(SAMPLES, "consistency.golden.csv"), "w", encoding="utf-8") as fh:
        fh.write(overlap_report_csv(report))

    print(f"goldens written to {os.path.abspath(SAMPLES)}")


if __name__ == "__main__":
    main()
