"""Simulated low-precision rounding errors in linear algebra kernels and their analytic moments."""

from .bounds import BoundParams, BoundReport, bound_report
from .delta import DeltaModel, delta_histogram, empirical_delta, sample_delta
from .distributions import ScalarDistribution, parse_dist, sample_wishart, sample_wishart_chol
from .experiments import (ExperimentConfig, MseReport, ProbeResult, mc_mse, model_validity_probe,
                          reproduce_figure, zf_ls_pipeline)
from .formats import FloatFormat, make_format, round_to_format, unit_roundoff
from .kernels import (Audit, exact_reference, rounded_back_subst, rounded_dot, rounded_forward_subst,
                      rounded_lu_doolittle, rounded_matmul, rounded_matvec)
from .moments import (Autocorrelation, MomentPrediction, hbar_exact, hbar_fast, inner_variance,
                      lu_variances, matmul_autocorr, matvec_autocorr, trisolve_variances)

__version__ = "0.1.0"
