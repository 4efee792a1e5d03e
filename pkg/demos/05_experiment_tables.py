"""Run a reduced experiment grid end to end and render result tables.

Uses a small synthetic corpus so it finishes in seconds; drop the
families/methods filters (or use the qflake CLI) for the full grid.

Run:  python demos/05_experiment_tables.py
"""

import tempfile
from pathlib import Path

from qflake import generate_corpus, load_manifest, run_paper_suite
from qflake.experiment import table_to_csv, write_results

workdir = Path(tempfile.mkdtemp(prefix="qflake_demo_"))
manifest = generate_corpus(workdir, n_flaky=10, n_nonflaky=30, seed=5)
corpus = load_manifest(manifest)
print(f"corpus: {len(corpus)} files under {workdir}")

tables = run_paper_suite(
    corpus,
    seed=5,
    families=("dt", "knn"),
    methods=("vanilla", "smote", "threshold", "hybrid"),
    n_folds=5,
)

print("\nimbalanced table (method x model, mean over 5 folds):")
print(f"{'method':10s} {'model':6s} {'acc':>6s} {'f1':>6s} {'mcc':>6s}  notes")
for row in tables["table_imbalanced"].rows:
    meta = row.metadata
    notes = []
    if meta["smote"]:
        notes.append(f"smote+{meta['smote_synthetic_per_fold'][0]}rows")
    if meta["threshold_mode"] == "tuned":
        notes.append(f"t={meta['selected_threshold_per_fold']}")
    print(
        f"{row.method:10s} {row.family:6s} {row.mean['accuracy']:6.3f} "
        f"{row.mean['f1']:6.3f} {row.mean['mcc']:6.3f}  {' '.join(notes)}"
    )

out = write_results(tables, workdir / "results", {"seed": 5, "demo": True})
print(f"\nCSV + run.json written to {out}")
print("balanced table head:")
print("\n".join(table_to_csv(tables["table_balanced"]).splitlines()[:3]))
