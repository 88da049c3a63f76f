"""A small benchmark study: several strategies, repetitions and ranks.

Runs are written to a results file, read back and aggregated into the
per-run summary and the average-rank table. The same result files can be
aggregated from the shell with ``adasamp report``.
"""

import tempfile
from pathlib import Path

from adasamp import ExperimentConfig, aggregate, read_results, run_adaptive, write_results

strategies = ("guess", "mmse", "tead", "lhs")
out = Path(tempfile.mkdtemp()) / "study.jsonl"
runs = []
for function in ("himmelblau", "humpsingle"):
    for strategy in strategies:
        config = ExperimentConfig(function, strategy, m_max=40, m_test=3000, n_restarts=2, reps=2, seed=5)
        runs += [run_adaptive(config, rep) for rep in range(config.reps)]
write_results(runs, out)
print(f"wrote {len(runs)} runs to {out}")

summary = aggregate(read_results(out))
print(f"{'strategy':>9} {'mean R2':>8} {'mean area':>10} {'rank R2':>8} {'rank area':>10}")
for row in summary.rank_table:
    print(f"{row['strategy']:>9} {row['mean_r2']:8.4f} {row['mean_r2area']:10.4f} "
          f"{row['mean_rank_r2']:8.2f} {row['mean_rank_r2area']:10.2f}")
