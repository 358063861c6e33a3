"""Christoffel symbols of the metric.

Two implementations are kept deliberately: the specialized closed forms
(production path, exploiting the block structure and the vanishing mu
derivatives) and the general definition

    Gamma^k_ij = 1/2 * sum_m (d_i g_jm + d_j g_im - d_m g_ij) g^mk

as a cross-check oracle.  Of the 27 symbols, 13 vanish structurally and the
14 nonzero ones take 10 distinct values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import InverseMetric, MetricDerivatives


@dataclass
class ChristoffelTensor:
    """Three 3x3 matrices Gamma^k, symmetric in the lower indices."""

    gamma1: np.ndarray
    gamma2: np.ndarray
    gamma3: np.ndarray

    def stack(self) -> np.ndarray:
        return np.stack([self.gamma1, self.gamma2, self.gamma3])

    def to_json_dict(self) -> dict:
        return {"gamma1": self.gamma1.tolist(),
                "gamma2": self.gamma2.tolist(),
                "gamma3": self.gamma3.tolist()}


def christoffel_specialized(g_inv: InverseMetric, dg: MetricDerivatives) -> ChristoffelTensor:
    """The 10 distinct nonzero symbols from their closed forms."""
    gi = g_inv.g_inv
    d2 = dg.dg_dtheta2
    d3 = dg.dg_dtheta3
    g11_inv, g22_inv, g23_inv, g33_inv = gi[0, 0], gi[1, 1], gi[1, 2], gi[2, 2]

    c_11_2 = -0.5 * (d2[0, 0] * g22_inv + d3[0, 0] * g23_inv)
    c_11_3 = -0.5 * (d2[0, 0] * g23_inv + d3[0, 0] * g33_inv)
    c_12_1 = 0.5 * d2[0, 0] * g11_inv
    c_13_1 = 0.5 * d3[0, 0] * g11_inv
    c_22_2 = 0.5 * (d2[1, 1] * g22_inv + (2.0 * d2[1, 2] - d3[1, 1]) * g23_inv)
    c_22_3 = 0.5 * (d2[1, 1] * g23_inv + (2.0 * d2[1, 2] - d3[1, 1]) * g33_inv)
    c_23_2 = 0.5 * (d3[1, 1] * g22_inv + d2[2, 2] * g23_inv)
    c_23_3 = 0.5 * (d3[1, 1] * g23_inv + d2[2, 2] * g33_inv)
    c_33_2 = 0.5 * ((2.0 * d3[1, 2] - d2[2, 2]) * g22_inv + d3[2, 2] * g23_inv)
    c_33_3 = 0.5 * ((2.0 * d3[1, 2] - d2[2, 2]) * g23_inv + d3[2, 2] * g33_inv)

    gamma1 = np.array([[0.0, c_12_1, c_13_1],
                       [c_12_1, 0.0, 0.0],
                       [c_13_1, 0.0, 0.0]])
    gamma2 = np.array([[c_11_2, 0.0, 0.0],
                       [0.0, c_22_2, c_23_2],
                       [0.0, c_23_2, c_33_2]])
    gamma3 = np.array([[c_11_3, 0.0, 0.0],
                       [0.0, c_22_3, c_23_3],
                       [0.0, c_23_3, c_33_3]])
    return ChristoffelTensor(gamma1=gamma1, gamma2=gamma2, gamma3=gamma3)


def christoffel_general(g_inv: InverseMetric, dg: MetricDerivatives) -> ChristoffelTensor:
    """Direct evaluation of the defining formula (test oracle)."""
    gi = g_inv.g_inv
    # partial derivative of g along each coordinate; d/d mu vanishes
    dgs = np.stack([np.zeros((3, 3)), dg.dg_dtheta2, dg.dg_dtheta3])
    gammas = np.zeros((3, 3, 3))
    for k in range(3):
        for i in range(3):
            for j in range(3):
                total = 0.0
                for m in range(3):
                    total += (dgs[i, j, m] + dgs[j, i, m] - dgs[m, i, j]) * gi[m, k]
                gammas[k, i, j] = 0.5 * total
    return ChristoffelTensor(gamma1=gammas[0], gamma2=gammas[1], gamma3=gammas[2])
