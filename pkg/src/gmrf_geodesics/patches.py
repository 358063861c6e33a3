"""Patch covariance statistics feeding the metric formulas.

Every 3x3 neighborhood patch of the field is flattened row by row into a
9-vector; the sample covariance of those vectors (divisor n) is the patch
covariance.  Its central row (minus the central entry) gives rho, the
covariances between a site and each of its 8 neighbors, and deleting the
central row and column gives the 8x8 neighbor-neighbor block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import INTERIOR_ONLY, FieldSample

# row-major offsets of a 3x3 patch; the center lands at flat index 4
_PATCH_OFFSETS = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1)]
CENTER_INDEX = 4


@dataclass
class PatchStats:
    """Patch covariance and its center/neighbor decomposition."""

    sigma_p: np.ndarray      # 9x9 patch covariance
    rho: np.ndarray          # 8 center-to-neighbor covariances
    sigma_minus: np.ndarray  # 8x8 neighbor-to-neighbor covariances
    n_patches: int

    def to_json_dict(self) -> dict:
        return {
            "sigma_p": self.sigma_p.tolist(),
            "rho": self.rho.tolist(),
            "sigma_minus": self.sigma_minus.tolist(),
            "n_patches": self.n_patches,
        }


def extract_patches(field: FieldSample) -> np.ndarray:
    """All 3x3 patches of the field as an (n, 9) matrix, rows piled.

    Toroidal fields contribute one patch per site; interior-only fields
    only the (H-2)(W-2) patches with full support.
    """
    v = field.values
    H, W = v.shape
    if field.boundary == INTERIOR_ONLY:
        cols = [v[1 + di:H - 1 + di, 1 + dj:W - 1 + dj].ravel()
                for di, dj in _PATCH_OFFSETS]
    else:
        cols = [np.roll(np.roll(v, -di, axis=0), -dj, axis=1).ravel()
                for di, dj in _PATCH_OFFSETS]
    return np.stack(cols, axis=1)


def patch_covariance(patches: np.ndarray) -> np.ndarray:
    """Sample covariance of the patch vectors, divisor n."""
    patches = np.asarray(patches, dtype=float)
    n = patches.shape[0]
    if n < 2:
        raise DomainError(f"need at least 2 patches, got {n}")
    centered = patches - patches.mean(axis=0)
    cov = centered.T @ centered / n
    return 0.5 * (cov + cov.T)


def decompose(sigma_p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split the 9x9 patch covariance into (rho, neighbor block)."""
    sigma_p = np.asarray(sigma_p, dtype=float)
    if sigma_p.shape != (9, 9):
        raise DomainError(f"expected a 9x9 matrix, got {sigma_p.shape}")
    keep = [i for i in range(9) if i != CENTER_INDEX]
    rho = sigma_p[CENTER_INDEX, keep]
    sigma_minus = sigma_p[np.ix_(keep, keep)]
    return rho, sigma_minus


def sum_all(a) -> float:
    """Sum of all entries of a vector or matrix."""
    return float(np.sum(a))


def kron_sum(a, b) -> float:
    """Entry sum of the Kronecker product of a and b.

    The sum factorizes as sum_all(a) * sum_all(b), which avoids forming
    the product and turns the triple and quadruple covariance summations
    into products of single sums.
    """
    return sum_all(a) * sum_all(b)


def patch_stats(field: FieldSample) -> PatchStats:
    """extract -> covariance -> decompose, bundled."""
    patches = extract_patches(field)
    sigma_p = patch_covariance(patches)
    rho, sigma_minus = decompose(sigma_p)
    return PatchStats(sigma_p=sigma_p, rho=rho, sigma_minus=sigma_minus,
                      n_patches=patches.shape[0])


def independence_stats(sigma2: float) -> PatchStats:
    """Exact patch statistics of an i.i.d. field: rho = 0, diagonal block.

    Useful as a deterministic stand-in for sampled statistics in analytic
    tests (it is the beta = 0 limit of the model).
    """
    if sigma2 <= 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    return PatchStats(sigma_p=sigma2 * np.eye(9), rho=np.zeros(8),
                      sigma_minus=sigma2 * np.eye(8), n_patches=0)
