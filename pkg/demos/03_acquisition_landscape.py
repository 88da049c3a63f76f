"""Where would each strategy sample next?

Fits one GP to 15 Branin points, then asks every strategy for its next
point over the same candidate set. Strategies that need extra models
(a kernel committee or a GP on leave-one-out errors) get them here too.
"""

import numpy as np

from adasamp import STRATEGIES, AcquisitionContext, Dataset, FitOptions, fit, get_benchmark
from adasamp.acquisition import committee_fit, fit_eloo_model
from adasamp.core import DesignDomain, scale_unit_to_domain
from adasamp.doe import LhsConfig, candidate_set, lhs

branin = get_benchmark("branin")
X = lhs(branin.domain, LhsConfig(15, seed=3))
options = FitOptions(seed=3)
model = fit(Dataset(X, branin(X), branin.domain), options)
C = candidate_set(DesignDomain.unit(2), 3000, seed=4)

for name, strategy in STRATEGIES.items():
    if strategy.acquisition is None:
        print(f"{name:>7}: space-filling baseline, no acquisition")
        continue
    ctx = AcquisitionContext(model, candidates=C)
    if name == "masa":
        ctx.committee = committee_fit(model.train_X, model.train_y, options)
    if name == "dlased":
        ctx.eloo_model = fit_eloo_model(model, ctx.loocv(), options)
    values = np.asarray(strategy.acquisition(ctx, C))
    best = scale_unit_to_domain(branin.domain, C[int(np.argmax(values))])
    print(f"{name:>7}: next x = ({best[0]:6.2f}, {best[1]:6.2f})")
