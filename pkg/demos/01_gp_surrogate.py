"""Fit a GP surrogate to a handful of Branin samples and inspect it.

Shows unit scaling of inputs, the fitted Matern 3/2 hyperparameters, the
posterior on held-out points and the closed-form leave-one-out residuals
next to their brute-force counterparts.
"""

import numpy as np

from adasamp import Dataset, FitOptions, fit, get_benchmark, predict
from adasamp.core import scale_domain_to_unit
from adasamp.doe import LhsConfig, candidate_set, lhs
from adasamp.gp import loocv_errors_bruteforce, loocv_errors_fast
from adasamp.metrics import r2

branin = get_benchmark("branin")
X = lhs(branin.domain, LhsConfig(20, seed=1))
data = Dataset(X, branin(X), branin.domain)
model = fit(data, FitOptions(seed=1))

print(f"length scale {model.kernel.length_scale:.3f}, noise variance {model.noise_variance:.2e}")
print(f"log marginal likelihood {model.log_likelihood:.2f}")

X_test = candidate_set(branin.domain, 2000, seed=2)
mean, var = predict(model, scale_domain_to_unit(branin.domain, X_test))
print(f"R^2 on 2000 test points: {r2(branin(X_test), mean):.4f}")
print(f"posterior std: median {np.median(np.sqrt(var)):.2f}, max {np.sqrt(var).max():.2f}")

fast = loocv_errors_fast(model)
brute = loocv_errors_bruteforce(model.train_X, model.train_y_norm, model.kernel,
                                model.noise_variance, model.jitter)
print(f"leave-one-out residuals (normalized units), first five: {np.round(fast[:5], 4)}")
print(f"largest fast vs brute-force difference: {np.max(np.abs(fast - brute)):.1e}")
