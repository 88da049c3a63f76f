"""Adaptive sampling for global Gaussian-process surrogate fits.

A small numpy/scipy library: GP regression with fast leave-one-out
errors, Latin hypercube designs, analytic benchmark functions, ten
sampling strategies, accuracy metrics and a seeded experiment harness.
"""

from .acquisition import STRATEGIES, AcquisitionContext, PrevIterState, get_strategy
from .benchmarks import BenchmarkFunction, get_benchmark, list_benchmarks
from .core import Dataset, DesignDomain, derive_seed, make_rng
from .gp import FitOptions, GpModel, fit, predict
from .harness import ExperimentConfig, RunResult, read_results, run_adaptive, run_lhs_baseline, write_results
from .kernels import KernelSpec
from .metrics import aggregate, r2, r2_area

__version__ = "0.1.0"

__all__ = [
    "STRATEGIES", "AcquisitionContext", "PrevIterState", "get_strategy",
    "BenchmarkFunction", "get_benchmark", "list_benchmarks",
    "Dataset", "DesignDomain", "derive_seed", "make_rng",
    "FitOptions", "GpModel", "fit", "predict",
    "ExperimentConfig", "RunResult", "read_results", "run_adaptive", "run_lhs_baseline", "write_results",
    "KernelSpec", "aggregate", "r2", "r2_area",
]
