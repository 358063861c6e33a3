"""Independent brute-force checks of the closed-form expressions.

mc_fisher estimates the Fisher information directly from score samples of
simulated fields and compares against the closed-form tensor evaluated on
the pooled patch statistics of those same fields.  The finite-difference
oracles validate the analytic score and the analytic metric derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError
from .metric import metric_derivatives, metric_tensor
from .model import (SECOND_ORDER, FieldSample, McmcConfig, ModelParams,
                    NeighborhoodSpec, local_conditional_logpdf, neighbor_sums,
                    sample_field, score)
from .patches import PatchStats, decompose, extract_patches, patch_covariance


@dataclass
class OracleReport:
    """Estimate/reference pair with the worst-case discrepancies.

    max_rel_error_diag is the largest relative error over diagonal (or, for
    the generic comparisons, all reference-supported) entries;
    max_abs_error_offdiag the largest absolute error over the remaining
    ones.  stderr carries per-entry standard errors when the estimate is a
    Monte-Carlo average.
    """

    estimate: np.ndarray
    reference: np.ndarray
    max_rel_error_diag: float
    max_abs_error_offdiag: float
    n_samples: int
    stderr: np.ndarray | None = None

    def to_json_dict(self) -> dict:
        return {
            "estimate": self.estimate.tolist(),
            "reference": self.reference.tolist(),
            "max_rel_error_diag": self.max_rel_error_diag,
            "max_abs_error_offdiag": self.max_abs_error_offdiag,
            "n_samples": self.n_samples,
            "stderr": None if self.stderr is None else self.stderr.tolist(),
        }


def score_field(field: FieldSample, params: ModelParams,
                hood: NeighborhoodSpec = SECOND_ORDER) -> np.ndarray:
    """Score of the local conditional at every evaluated site, (n, 3)."""
    x, nsum = neighbor_sums(field, hood)
    s2 = params.sigma2
    centered_sum = nsum - hood.delta * params.mu
    r = (x - params.mu) - params.beta * centered_sum
    s1 = (1.0 - params.beta * hood.delta) * r / s2
    sc2 = -1.0 / (2.0 * s2) + r * r / (2.0 * s2 * s2)
    s3 = r * centered_sum / s2
    return np.stack([s1.ravel(), sc2.ravel(), s3.ravel()], axis=1)


def mc_fisher(params: ModelParams, hood: NeighborhoodSpec = SECOND_ORDER,
              cfg: McmcConfig = McmcConfig(), n_fields: int = 30) -> OracleReport:
    """Monte-Carlo Fisher estimate vs the closed form on pooled statistics.

    Samples ``n_fields`` independent fields (seeds cfg.seed, cfg.seed+1,
    ...), averages the 3x3 outer products of the per-site scores, and
    compares against the tensor computed from the patch covariance pooled
    over all fields.  Standard errors come from the spread of the per-field
    means, which respects the spatial correlation within a field.
    """
    if n_fields < 1:
        raise DomainError(f"need at least one field, got {n_fields}")
    per_field = np.zeros((n_fields, 3, 3))
    pooled_patches = []
    for k in range(n_fields):
        field_cfg = McmcConfig(lattice_size=cfg.lattice_size,
                               burn_in_sweeps=cfg.burn_in_sweeps,
                               sweeps_per_sample=cfg.sweeps_per_sample,
                               seed=cfg.seed + k,
                               divergence_threshold=cfg.divergence_threshold,
                               amplitude_cap=cfg.amplitude_cap)
        field = sample_field(params, hood, field_cfg)
        scores = score_field(field, params, hood)
        per_field[k] = scores.T @ scores / scores.shape[0]
        pooled_patches.append(extract_patches(field))
    estimate = per_field.mean(axis=0)
    estimate = 0.5 * (estimate + estimate.T)
    if n_fields > 1:
        stderr = per_field.std(axis=0, ddof=1) / np.sqrt(n_fields)
    else:
        stderr = np.full((3, 3), np.nan)

    sigma_p = patch_covariance(np.vstack(pooled_patches))
    rho, sigma_minus = decompose(sigma_p)
    stats = PatchStats(sigma_p=sigma_p, rho=rho, sigma_minus=sigma_minus,
                       n_patches=sum(p.shape[0] for p in pooled_patches))
    reference = metric_tensor(params, stats, hood.delta).g

    diag_rel = np.abs(np.diag(estimate) - np.diag(reference)) / np.abs(np.diag(reference))
    off = ~np.eye(3, dtype=bool)
    return OracleReport(
        estimate=estimate,
        reference=reference,
        max_rel_error_diag=float(np.max(diag_rel)),
        max_abs_error_offdiag=float(np.max(np.abs(estimate - reference)[off])),
        n_samples=n_fields,
        stderr=stderr,
    )


def fd_metric_derivatives(params: ModelParams, stats: PatchStats, delta: int = 8,
                          step: float = 1e-4, wrt: str = "theta2",
                          dg33_dtheta3_variant: str = "exact") -> OracleReport:
    """Central finite differences of the metric vs the closed-form derivatives.

    Statistics are held fixed across the secant evaluations, matching how
    the closed forms treat them.  ``wrt`` picks the coordinate (sigma2 or
    beta); the mu direction is identically flat and has no report.
    """
    if step <= 0:
        raise DomainError(f"step must be positive, got {step}")
    mu, s2, b = params.mu, params.sigma2, params.beta
    if wrt == "theta2":
        if s2 - step <= 0:
            raise DomainError("sigma2 - step must stay positive")
        hi = metric_tensor(ModelParams(mu, s2 + step, b), stats, delta).g
        lo = metric_tensor(ModelParams(mu, s2 - step, b), stats, delta).g
        reference = metric_derivatives(params, stats, delta).dg_dtheta2
    elif wrt == "theta3":
        hi = metric_tensor(ModelParams(mu, s2, b + step), stats, delta).g
        lo = metric_tensor(ModelParams(mu, s2, b - step), stats, delta).g
        reference = metric_derivatives(
            params, stats, delta, dg33_dtheta3_variant=dg33_dtheta3_variant).dg_dtheta3
    else:
        raise DomainError(f"unknown coordinate {wrt!r}")
    estimate = (hi - lo) / (2.0 * step)
    return _comparison_report(estimate, reference, n_samples=2)


def fd_score_check(params: ModelParams, samples, step: float = 1e-5) -> OracleReport:
    """Central finite differences of the log conditional vs the score.

    ``samples`` is a sequence of (x_i, neighbor_values) pairs; rows of the
    report hold one 3-vector per sample.
    """
    if step <= 0:
        raise DomainError(f"step must be positive, got {step}")
    mu, s2, b = params.mu, params.sigma2, params.beta
    if s2 - step <= 0:
        raise DomainError("sigma2 - step must stay positive")
    est_rows = []
    ref_rows = []
    for x_i, nb in samples:
        fd = [
            (local_conditional_logpdf(x_i, nb, ModelParams(mu + step, s2, b))
             - local_conditional_logpdf(x_i, nb, ModelParams(mu - step, s2, b))),
            (local_conditional_logpdf(x_i, nb, ModelParams(mu, s2 + step, b))
             - local_conditional_logpdf(x_i, nb, ModelParams(mu, s2 - step, b))),
            (local_conditional_logpdf(x_i, nb, ModelParams(mu, s2, b + step))
             - local_conditional_logpdf(x_i, nb, ModelParams(mu, s2, b - step))),
        ]
        est_rows.append(np.array(fd) / (2.0 * step))
        ref_rows.append(score(x_i, nb, params))
    return _comparison_report(np.array(est_rows), np.array(ref_rows),
                              n_samples=len(est_rows))


def _comparison_report(estimate: np.ndarray, reference: np.ndarray,
                       n_samples: int) -> OracleReport:
    """Entrywise comparison: relative where the reference is nonzero."""
    diff = np.abs(estimate - reference)
    nonzero = np.abs(reference) > 0
    max_rel = float(np.max(diff[nonzero] / np.abs(reference[nonzero]))) if nonzero.any() else 0.0
    max_abs = float(np.max(diff[~nonzero])) if (~nonzero).any() else 0.0
    return OracleReport(estimate=estimate, reference=reference,
                        max_rel_error_diag=max_rel, max_abs_error_offdiag=max_abs,
                        n_samples=n_samples)
