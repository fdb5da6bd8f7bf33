"""Regenerate the golden score fixtures used by the CLI tests.

Writes one clean/stamped ACTD pair with manifests, plus the expected
scores CSV computed with scikit-learn's ROC AUC.

    python scripts/make_golden.py crates/cli/tests/fixtures/golden
"""

import json
import struct
import sys
from pathlib import Path

import numpy as np
from sklearn.metrics import roc_auc_score

MODEL = "tiny"
SCENARIO = "latin"
N_IMAGES = 60
LAYERS = [("logits", 6, "logit"), ("pool", 10, "feature")]


def write_actd(path, values, manifest):
    rows, cols = values.shape
    with open(path, "wb") as f:
        f.write(b"ACTD")
        f.write(struct.pack("<HBQQ", 1, 1, rows, cols))
        f.write(values.astype("<f4").tobytes(order="C"))
    manifest_path = path.with_name(path.stem + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")


def main(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20240611)
    reps = [
        {"layer": name, "index": i, "kind": kind}
        for name, count, kind in LAYERS
        for i in range(count)
    ]
    cols = len(reps)
    clean = rng.normal(size=(N_IMAGES, cols))
    shift = rng.uniform(-1.5, 1.5, size=cols)
    stamped = clean + shift + 0.5 * rng.normal(size=(N_IMAGES, cols))
    # coarse rounding on a few columns so ties occur across groups
    for c in (1, 4, 9):
        clean[:, c] = np.round(clean[:, c])
        stamped[:, c] = np.round(stamped[:, c])
    clean = clean.astype(np.float32)
    stamped = stamped.astype(np.float32)
    ids = [f"img{i:03d}" for i in range(N_IMAGES)]
    # stamped rows stored in reverse order; matching is by image id
    for group, values, row_ids in (
        ("clean", clean, ids),
        ("stamped", stamped[::-1], ids[::-1]),
    ):
        manifest = {
            "schema_version": 1,
            "n_rows": N_IMAGES,
            "n_cols": cols,
            "image_ids": row_ids,
            "reps": reps,
            "scenario": SCENARIO,
            "group": group,
            "model": MODEL,
        }
        write_actd(out / f"{MODEL}_{SCENARIO}_{group}.actd", np.ascontiguousarray(values), manifest)

    labels = np.r_[np.ones(N_IMAGES), np.zeros(N_IMAGES)]
    lines = ["rep,layer,kind,auc,diff"]
    for c, rep in enumerate(reps):
        scores = np.r_[stamped[:, c], clean[:, c]].astype(np.float64)
        auc = roc_auc_score(labels, scores)
        diff = max(auc, 1.0 - auc)
        lines.append(f"{rep['index']},{rep['layer']},{rep['kind']},{auc!r},{diff!r}")
    (out / f"expected_scores_{MODEL}_{SCENARIO}.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/cli/tests/fixtures/golden")
