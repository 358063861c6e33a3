"""Closed-form metric tensor of the GMRF parameter manifold.

The metric is the 3x3 first-order Fisher information in the coordinates
theta = (mu, sigma2, beta), expressed through two patch statistics: the sum
of center-to-neighbor covariances S1 = sum(rho) and the sum of the
neighbor-block entries S2 = sum(sigma_minus).  Third and fourth order
Gaussian moments reduce (Isserlis) to Kronecker entry sums, which factor
into products of S1 and S2.  The (mu, sigma2) and (mu, beta) components
vanish identically, so the tensor is block diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .model import ModelParams
from .patches import PatchStats, kron_sum, sum_all


@dataclass
class MetricTensor:
    """Symmetric 3x3 metric with structural zeros at (1,2) and (1,3)."""

    g: np.ndarray

    @property
    def g11(self) -> float:
        return self.g[0, 0]

    @property
    def g22(self) -> float:
        return self.g[1, 1]

    @property
    def g23(self) -> float:
        return self.g[1, 2]

    @property
    def g33(self) -> float:
        return self.g[2, 2]

    def to_json_dict(self) -> dict:
        return {"g": self.g.tolist()}


@dataclass
class InverseMetric:
    """Inverse of the lambda-regularized metric, same zero pattern."""

    g_inv: np.ndarray
    lam: float

    def to_json_dict(self) -> dict:
        return {"g_inv": self.g_inv.tolist(), "lambda": self.lam}


@dataclass
class MetricDerivatives:
    """d g / d sigma2 and d g / d beta; the mu derivative vanishes."""

    dg_dtheta2: np.ndarray
    dg_dtheta3: np.ndarray

    def to_json_dict(self) -> dict:
        return {"dg_dtheta2": self.dg_dtheta2.tolist(),
                "dg_dtheta3": self.dg_dtheta3.tolist()}


@dataclass
class EntropyValue:
    """Conditional entropy of the field and its Gaussian part."""

    h_beta: float
    h_gauss: float


def _sums(stats: PatchStats):
    s1 = sum_all(stats.rho)
    s2 = sum_all(stats.sigma_minus)
    k11 = kron_sum(stats.rho, stats.rho)
    k12 = kron_sum(stats.rho, stats.sigma_minus)
    k22 = kron_sum(stats.sigma_minus, stats.sigma_minus)
    return s1, s2, k11, k12, k22


def _symmetric(g11, g22, g23, g33) -> np.ndarray:
    return np.array([[g11, 0.0, 0.0],
                     [0.0, g22, g23],
                     [0.0, g23, g33]])


def metric_tensor(params: ModelParams, stats: PatchStats, delta: int = 8) -> MetricTensor:
    """Fisher information at theta given patch statistics."""
    s1, s2, k11, k12, k22 = _sums(stats)
    s = params.sigma2
    b = params.beta
    one_bd = 1.0 - b * delta
    pair = 2.0 * b * s1 - b * b * s2
    g11 = one_bd * one_bd / s * (1.0 - pair / s)
    g22 = (0.5 / s ** 2 - pair / s ** 3
           + (3.0 * b ** 2 * k11 - 3.0 * b ** 3 * k12 + 3.0 * b ** 4 * k22) / s ** 4)
    g23 = ((s1 - b * s2) / s ** 2
           - (6.0 * b * k11 - 9.0 * b ** 2 * k12 + 3.0 * b ** 3 * k22) / (2.0 * s ** 3))
    g33 = s2 / s + (2.0 * k11 - 6.0 * b * k12 + 3.0 * b ** 2 * k22) / s ** 2
    return MetricTensor(g=_symmetric(g11, g22, g23, g33))


def inverse_metric(g: MetricTensor, lam: float = 0.01) -> InverseMetric:
    """Invert g + lam*I blockwise, preserving the zero pattern.

    The (sigma2, beta) block is scaled before forming its determinant so
    that fields sampled far outside the stable beta region (metric entries
    of order 1e100 and beyond) do not overflow.
    """
    a = g.g11 + lam
    p = g.g22 + lam
    q = g.g33 + lam
    r = g.g23
    scale = max(abs(p), abs(q), abs(r))
    if a == 0.0 or scale == 0.0 or not np.isfinite(scale) or not np.isfinite(a):
        raise NumericalError(
            f"regularized metric not invertible (g11+lam={a}, block scale={scale})")
    ps, qs, rs = p / scale, q / scale, r / scale
    det_s = ps * qs - rs * rs
    if abs(det_s) < 1e-14:
        raise NumericalError(
            "regularized (sigma2, beta) block is singular: "
            f"determinant {det_s * scale * scale} (scaled {det_s})")
    inv22 = qs / det_s / scale
    inv33 = ps / det_s / scale
    inv23 = -rs / det_s / scale
    return InverseMetric(g_inv=_symmetric(1.0 / a, inv22, inv23, inv33), lam=lam)


def metric_derivatives(params: ModelParams, stats: PatchStats, delta: int = 8,
                       dg33_dtheta3_variant: str = "exact") -> MetricDerivatives:
    """Closed-form derivatives of the metric w.r.t. sigma2 and beta.

    The statistics are treated as constants, matching how the tensor itself
    is evaluated.  ``dg33_dtheta3_variant`` selects between the exact beta
    derivative of g33 ("exact") and an alternative with an extra factor of
    beta on its first term ("scaled"); the latter is kept only so the
    discrepancy can be demonstrated against finite differences.
    """
    if dg33_dtheta3_variant not in ("exact", "scaled"):
        raise DomainError(f"unknown dg33 variant {dg33_dtheta3_variant!r}")
    s1, s2, k11, k12, k22 = _sums(stats)
    s = params.sigma2
    b = params.beta
    one_bd = 1.0 - b * delta
    pair = 2.0 * b * s1 - b * b * s2
    d_pair = 2.0 * s1 - 2.0 * b * s2

    dg11_d2 = -one_bd ** 2 / s ** 2 + 2.0 * one_bd ** 2 * pair / s ** 3
    dg22_d2 = (-1.0 / s ** 3 + 3.0 * pair / s ** 4
               - 4.0 * (3.0 * b ** 2 * k11 - 3.0 * b ** 3 * k12 + 3.0 * b ** 4 * k22) / s ** 5)
    dg23_d2 = (-2.0 * (s1 - b * s2) / s ** 3
               + 1.5 * (6.0 * b * k11 - 9.0 * b ** 2 * k12 + 3.0 * b ** 3 * k22) / s ** 4)
    dg33_d2 = -s2 / s ** 2 - 2.0 * (2.0 * k11 - 6.0 * b * k12 + 3.0 * b ** 2 * k22) / s ** 3

    dg11_d3 = (-2.0 * delta * one_bd / s * (1.0 - pair / s)
               - one_bd ** 2 * d_pair / s ** 2)
    dg22_d3 = (-d_pair / s ** 3
               + (6.0 * b * k11 - 9.0 * b ** 2 * k12 + 12.0 * b ** 3 * k22) / s ** 4)
    dg23_d3 = -s2 / s ** 2 - (6.0 * k11 - 18.0 * b * k12 + 9.0 * b ** 2 * k22) / (2.0 * s ** 3)
    if dg33_dtheta3_variant == "exact":
        dg33_d3 = (-6.0 * k12 + 6.0 * b * k22) / s ** 2
    else:
        dg33_d3 = -(6.0 * b * k12 - 6.0 * b * k22) / s ** 2

    return MetricDerivatives(
        dg_dtheta2=_symmetric(dg11_d2, dg22_d2, dg23_d2, dg33_d2),
        dg_dtheta3=_symmetric(dg11_d3, dg22_d3, dg23_d3, dg33_d3))


def entropy(params: ModelParams, stats: PatchStats) -> EntropyValue:
    """Expected self-information of the local conditional density.

    Quadratic in beta with statistics held fixed; equals the Gaussian
    entropy at beta = 0.
    """
    s1 = sum_all(stats.rho)
    s2 = sum_all(stats.sigma_minus)
    s = params.sigma2
    b = params.beta
    h_gauss = 0.5 * math.log(2.0 * math.pi * math.e * s)
    h_beta = h_gauss - (b * s1 - 0.5 * b * b * s2) / s
    return EntropyValue(h_beta=float(h_beta), h_gauss=float(h_gauss))
