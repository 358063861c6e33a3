"""Geodesic distances on the (mu, sigma2, beta) manifold of pairwise
isotropic Gaussian-Markov random fields."""

from .christoffel import ChristoffelTensor, christoffel_general, christoffel_specialized
from .errors import (DivergenceError, DomainError, GmrfError, InvalidInputError,
                     NumericalError)
from .geodesic import (GeodesicCurve, GeodesicState, IntegratorConfig,
                       ReversalResult, curve_summary, euclidean_distance,
                       geodesic_rhs, integrate, reverse_run, rk4_step,
                       write_curve_csv, write_summary_json)
from .metric import (EntropyValue, InverseMetric, MetricDerivatives, MetricTensor,
                     entropy, inverse_metric, metric_derivatives, metric_tensor)
from .model import (INTERIOR_ONLY, SECOND_ORDER, TOROIDAL, FieldSample, McmcConfig,
                    ModelParams, NaturalDecomposition, NeighborhoodSpec,
                    export_field_csv, local_conditional_logpdf,
                    natural_decomposition, pseudo_log_likelihood, sample_field,
                    score)
from .oracles import OracleReport, fd_metric_derivatives, fd_score_check, mc_fisher
from .patches import (PatchStats, decompose, extract_patches, independence_stats,
                      kron_sum, patch_covariance, patch_stats, sum_all)

__version__ = "0.1.0"

__all__ = [
    "ChristoffelTensor", "christoffel_general", "christoffel_specialized",
    "DivergenceError", "DomainError", "GmrfError", "InvalidInputError",
    "NumericalError",
    "GeodesicCurve", "GeodesicState", "IntegratorConfig", "ReversalResult",
    "curve_summary", "euclidean_distance", "geodesic_rhs", "integrate",
    "reverse_run", "rk4_step", "write_curve_csv", "write_summary_json",
    "EntropyValue", "InverseMetric", "MetricDerivatives", "MetricTensor",
    "entropy", "inverse_metric", "metric_derivatives", "metric_tensor",
    "INTERIOR_ONLY", "SECOND_ORDER", "TOROIDAL", "FieldSample", "McmcConfig",
    "ModelParams", "NaturalDecomposition", "NeighborhoodSpec",
    "export_field_csv", "local_conditional_logpdf", "natural_decomposition",
    "pseudo_log_likelihood", "sample_field", "score",
    "OracleReport", "fd_metric_derivatives", "fd_score_check", "mc_fisher",
    "PatchStats", "decompose", "extract_patches", "independence_stats",
    "kron_sum", "patch_covariance", "patch_stats", "sum_all",
    "__version__",
]
