"""One adaptive run against the space-filling baseline.

Uses a reduced test set and fewer hyperparameter restarts so the demo
finishes in well under a minute; the learning curves still separate.
"""

import numpy as np

from adasamp import ExperimentConfig, run_adaptive

common = dict(m_test=5000, n_restarts=3, seed=0)
for strategy in ("guess", "lhs"):
    result = run_adaptive(ExperimentConfig("branin", strategy, **common))
    h = result.r2_history
    marks = ", ".join(f"m={result.records[i].m}: {h[i]:.3f}" for i in (0, len(h) // 4, len(h) // 2, -1))
    print(f"{strategy:>5}: {marks}")
    print(f"       best R^2 {result.best_r2:.4f}, R^2 area {result.r2_area:.4f}")

last = result.records[-1]
print("every iteration is recorded; e.g. the final sample", np.round(last.x, 3), f"with y = {last.y:.3f}")
