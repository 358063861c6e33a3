"""Pairwise isotropic Gaussian-Markov random field model.

A field value x_i, conditioned on its neighborhood, is normal with mean
mu + beta * sum_{j in eta_i}(x_j - mu) and variance sigma2.  This module
holds the parameter/field types, the local conditional density and its
score, the pseudo-likelihood (product of local conditionals), the
natural-parameter decomposition of the pseudo-likelihood, and a seeded
Gibbs sampler that generates field outcomes on a 2-D lattice.

Randomness comes from numpy's PCG64 generator (``np.random.default_rng``),
so a fixed seed gives bit-identical fields on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DivergenceError, DomainError, InvalidInputError

_NEIGHBOR_OFFSETS = {
    "first": ((-1, 0), (1, 0), (0, -1), (0, 1)),
    "second": ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)),
    "third": ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1),
              (-2, 0), (2, 0), (0, -2), (0, 2)),
}

TOROIDAL = "toroidal"
INTERIOR_ONLY = "interior-only"


@dataclass(frozen=True)
class ModelParams:
    """A point theta = (mu, sigma2, beta) on the parameter manifold."""

    mu: float
    sigma2: float
    beta: float

    def __post_init__(self):
        for name in ("mu", "sigma2", "beta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidInputError(f"{name} must be finite, got {v}")
        if self.sigma2 <= 0.0:
            raise DomainError(f"sigma2 must be positive, got {self.sigma2}")

    def as_array(self) -> np.ndarray:
        return np.array([self.mu, self.sigma2, self.beta], dtype=float)


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Neighborhood system on the lattice: order and neighbor count delta."""

    order: str = "second"
    delta: int = 0

    def __post_init__(self):
        if self.order not in _NEIGHBOR_OFFSETS:
            raise DomainError(f"unknown neighborhood order {self.order!r}")
        expected = len(_NEIGHBOR_OFFSETS[self.order])
        if self.delta == 0:
            object.__setattr__(self, "delta", expected)
        elif self.delta != expected:
            raise DomainError(
                f"delta {self.delta} inconsistent with {self.order}-order "
                f"neighborhood (expected {expected})")

    @property
    def offsets(self) -> np.ndarray:
        return np.array(_NEIGHBOR_OFFSETS[self.order], dtype=np.int64)

    @property
    def margin(self) -> int:
        return int(np.max(np.abs(self.offsets)))


SECOND_ORDER = NeighborhoodSpec("second")


@dataclass
class FieldSample:
    """A lattice of real values plus the boundary convention."""

    values: np.ndarray
    boundary: str = TOROIDAL

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise DomainError("field must be a 2-D lattice")
        if min(self.values.shape) < 3:
            raise DomainError(
                f"lattice {self.values.shape} too small, need at least 3x3")
        if self.boundary not in (TOROIDAL, INTERIOR_ONLY):
            raise DomainError(f"unknown boundary mode {self.boundary!r}")
        if not np.isfinite(self.values).all():
            raise InvalidInputError("field contains non-finite values")

    @property
    def dims(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class McmcConfig:
    """Chain configuration for the Gibbs sampler.

    divergence_threshold aborts the chain (error) once any |x - mu| exceeds
    threshold * sqrt(sigma2); amplitude_cap instead stops sweeping early and
    keeps the (finite) field, which is how long integrations survive inverse
    temperatures outside the stable region.
    """

    lattice_size: tuple[int, int] = (64, 64)
    burn_in_sweeps: int = 100
    sweeps_per_sample: int = 5
    seed: int = 0
    divergence_threshold: float = 50.0
    amplitude_cap: float = 1e18

    def __post_init__(self):
        h, w = self.lattice_size
        if h < 16 or w < 16:
            raise DomainError(
                f"lattice_size {self.lattice_size} too small for covariance "
                "estimation, need at least 16x16")
        if self.burn_in_sweeps < 0 or self.sweeps_per_sample < 1:
            raise DomainError("need burn_in_sweeps >= 0 and sweeps_per_sample >= 1")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise DomainError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class NaturalDecomposition:
    """Exponential-family split of the pseudo-log-likelihood.

    log F(X | theta) = c . T + d(theta) + S(X), with S(X) = 0.
    """

    c: np.ndarray
    d: float
    sufficient_stats: np.ndarray
    s_of_x: float = 0.0

    def log_likelihood(self) -> float:
        return float(np.dot(self.c, self.sufficient_stats) + self.d + self.s_of_x)


def _check_finite_scalars(*pairs):
    for name, v in pairs:
        arr = np.asarray(v, dtype=float)
        if not np.isfinite(arr).all():
            raise InvalidInputError(f"{name} must be finite")


def local_conditional_logpdf(x_i: float, neighbor_values, params: ModelParams) -> float:
    """Log of the local conditional density of x_i given its neighbors."""
    _check_finite_scalars(("x_i", x_i), ("neighbor_values", neighbor_values))
    nb = np.asarray(neighbor_values, dtype=float)
    r = (x_i - params.mu) - params.beta * np.sum(nb - params.mu)
    return -0.5 * math.log(2.0 * math.pi * params.sigma2) - r * r / (2.0 * params.sigma2)


def score(x_i: float, neighbor_values, params: ModelParams) -> np.ndarray:
    """Gradient of the local conditional log-density in (mu, sigma2, beta)."""
    _check_finite_scalars(("x_i", x_i), ("neighbor_values", neighbor_values))
    nb = np.asarray(neighbor_values, dtype=float)
    delta = nb.size
    s2 = params.sigma2
    nsum = float(np.sum(nb - params.mu))
    r = (x_i - params.mu) - params.beta * nsum
    return np.array([
        (1.0 - params.beta * delta) * r / s2,
        -1.0 / (2.0 * s2) + r * r / (2.0 * s2 * s2),
        r * nsum / s2,
    ])


def neighbor_sums(field: FieldSample, hood: NeighborhoodSpec = SECOND_ORDER):
    """Per-site sums of raw neighbor values over the evaluated sites.

    Returns (x_eval, nsum): toroidal boundary evaluates every site, the
    interior-only boundary drops a margin wide enough for full neighborhoods.
    """
    v = field.values
    if field.boundary == TOROIDAL:
        s = np.zeros_like(v)
        for di, dj in _NEIGHBOR_OFFSETS[hood.order]:
            s += np.roll(np.roll(v, -di, axis=0), -dj, axis=1)
        return v, s
    m = hood.margin
    H, W = v.shape
    if H - 2 * m < 1 or W - 2 * m < 1:
        raise DomainError(f"lattice {v.shape} too small for interior evaluation")
    core = v[m:H - m, m:W - m]
    s = np.zeros_like(core)
    for di, dj in _NEIGHBOR_OFFSETS[hood.order]:
        s += v[m + di:H - m + di, m + dj:W - m + dj]
    return core, s


def pseudo_log_likelihood(field: FieldSample, params: ModelParams,
                          hood: NeighborhoodSpec = SECOND_ORDER) -> float:
    """Sum of local conditional log-densities over the evaluated sites."""
    x, nsum = neighbor_sums(field, hood)
    n = x.size
    r = (x - params.mu) - params.beta * (nsum - hood.delta * params.mu)
    return float(-0.5 * n * math.log(2.0 * math.pi * params.sigma2)
                 - np.sum(r * r) / (2.0 * params.sigma2))


def natural_decomposition(field: FieldSample, params: ModelParams,
                          hood: NeighborhoodSpec = SECOND_ORDER) -> NaturalDecomposition:
    """Natural parameters c, sufficient statistics T and d(theta).

    Satisfies c . T + d(theta) = pseudo_log_likelihood identically; at
    beta = 0 it collapses to the two-parameter Gaussian form (c3 = c4 = c5 = 0).
    """
    x, nsum = neighbor_sums(field, hood)
    n = x.size
    mu, s2, beta = params.mu, params.sigma2, params.beta
    delta = hood.delta
    T = np.array([
        np.sum(x),
        np.sum(x * x),
        np.sum(x * nsum),
        np.sum(nsum),
        np.sum(nsum * nsum),
    ])
    one_bd = 1.0 - beta * delta
    c = np.array([
        mu * one_bd / s2,
        -1.0 / (2.0 * s2),
        beta / s2,
        -beta * mu * one_bd / s2,
        -beta * beta / (2.0 * s2),
    ])
    d = (-0.5 * n * (math.log(2.0 * math.pi * s2) + mu * mu / s2)
         + beta * delta * mu * mu * n / s2 * (1.0 - beta * delta / 2.0))
    return NaturalDecomposition(c=c, d=float(d), sufficient_stats=T)


_STATUS_MESSAGES = {
    _kernels.SWEEP_THRESHOLD: "field amplitude exceeded the divergence threshold",
    _kernels.SWEEP_NONFINITE: "field contains non-finite values",
}


def run_chain(values: np.ndarray, params: ModelParams, hood: NeighborhoodSpec,
              rng: np.random.Generator, sweeps: int, interior_only: bool = False,
              threshold: float = np.inf, cap: float = np.inf) -> tuple[int, int]:
    """Advance a Gibbs chain in place by up to ``sweeps`` raster sweeps.

    Noise for all sweeps is drawn from ``rng`` up front, so the generator
    state advances the same way whether or not the chain stops early.
    Returns the kernel status code and the number of sweeps performed.
    """
    if sweeps == 0:
        return _kernels.SWEEP_OK, 0
    z = rng.standard_normal((sweeps,) + values.shape)
    if hood.order == "second":
        return _kernels.raster_gibbs8(values, z, params.mu, params.sigma2,
                                      params.beta, interior_only, threshold, cap)
    return _kernels.raster_gibbs_offsets(values, z, params.mu, params.sigma2,
                                         params.beta, hood.offsets, interior_only,
                                         threshold, cap)


def sample_field(params: ModelParams, hood: NeighborhoodSpec = SECOND_ORDER,
                 cfg: McmcConfig = McmcConfig(),
                 initial: FieldSample | None = None) -> FieldSample:
    """Generate a field outcome by Gibbs sampling.

    Cold start (no ``initial``): i.i.d. N(mu, sigma2) lattice followed by
    ``burn_in_sweeps`` sweeps.  Warm start: continues from ``initial`` for
    ``sweeps_per_sample`` sweeps.  Deterministic given ``cfg.seed``.

    Raises DivergenceError when the chain exceeds the divergence threshold
    or produces non-finite values (an unstable beta regime).
    """
    rng = np.random.default_rng(cfg.seed)
    boundary = TOROIDAL
    if initial is None:
        values = rng.normal(params.mu, math.sqrt(params.sigma2), cfg.lattice_size)
        sweeps = cfg.burn_in_sweeps
    else:
        values = initial.values.copy()
        boundary = initial.boundary
        sweeps = cfg.sweeps_per_sample
    status, done = run_chain(values, params, hood, rng, sweeps,
                             interior_only=(boundary == INTERIOR_ONLY),
                             threshold=cfg.divergence_threshold,
                             cap=cfg.amplitude_cap)
    if status in _STATUS_MESSAGES:
        raise DivergenceError(
            f"{_STATUS_MESSAGES[status]} after {done} sweeps "
            f"(beta={params.beta}, threshold={cfg.divergence_threshold})",
            sweep=done)
    return FieldSample(values=values, boundary=boundary)


def export_field_csv(field: FieldSample, path) -> None:
    """Write the lattice as CSV, one lattice row per line, full precision."""
    np.savetxt(path, field.values, fmt="%.17g", delimiter=",")
