"""Geodesic curves by fourth-order Runge-Kutta integration.

The second-order geodesic equations reduce, with gamma(t) the position and
alpha(t) the tangent, to the first-order system

    gamma' = alpha,        alpha'_k = -alpha^T Gamma^k alpha.

Two integration modes are provided.  In ``mcmc`` mode a fresh field outcome
is generated at the current position every iteration, its patch statistics
feed the metric and Christoffel symbols, and those are held fixed across the
four stages of the step.  In ``frozen`` mode the patch statistics never
change (supplied analytically or estimated once at the start) and the
Christoffel symbols are re-evaluated at every stage position, which keeps
the classical fourth-order accuracy of the scheme.

The reported geodesic distance accumulates ||alpha|| * h in coordinate
space; the Riemannian length sum(sqrt(alpha^T g alpha) * h) is tracked
alongside as a diagnostic.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .christoffel import ChristoffelTensor, christoffel_specialized
from .errors import DivergenceError, DomainError, GmrfError, InvalidInputError
from .metric import inverse_metric, metric_derivatives, metric_tensor
from .model import SECOND_ORDER, FieldSample, McmcConfig, ModelParams, NeighborhoodSpec, run_chain
from .patches import PatchStats, patch_stats


@dataclass
class GeodesicState:
    """Integration time, position gamma = (mu, sigma2, beta), tangent alpha."""

    t: float
    gamma: np.ndarray
    alpha: np.ndarray


@dataclass(frozen=True)
class IntegratorConfig:
    """Settings for one geodesic integration over t in [a, b] with n steps."""

    a: float = 0.0
    b: float = 5.0
    n: int = 200
    lam: float = 0.01
    mode: str = "mcmc"     # {"mcmc", "frozen"}
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    refresh: str = "warm"  # {"warm", "cold"}: chain evolution between iterations
    alpha_magnitude_warn: float = 0.5

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"need at least one step, got n={self.n}")
        if not self.b > self.a:
            raise DomainError(f"need b > a, got [{self.a}, {self.b}]")
        if self.mode not in ("mcmc", "frozen"):
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.refresh not in ("warm", "cold"):
            raise DomainError(f"unknown refresh policy {self.refresh!r}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n


@dataclass
class GeodesicCurve:
    """Trajectory, accumulated distances and the divergence marker."""

    states: list[GeodesicState]
    distance: float
    riemannian_length: float
    diverged_at: int | None = None
    cum_dist: np.ndarray = None

    @property
    def completed(self) -> bool:
        return self.diverged_at is None


@dataclass
class ReversalResult:
    """Reversed curve plus per-step distance to the forward trajectory."""

    curve: GeodesicCurve
    divergence: np.ndarray


def euclidean_distance(p, q) -> float:
    """Straight-line distance between two parameter points."""
    return float(np.linalg.norm(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)))


def _quadratic_forms(christoffel: ChristoffelTensor, alpha: np.ndarray) -> np.ndarray:
    return np.array([alpha @ christoffel.gamma1 @ alpha,
                     alpha @ christoffel.gamma2 @ alpha,
                     alpha @ christoffel.gamma3 @ alpha])


def geodesic_rhs(state: GeodesicState, christoffel: ChristoffelTensor) -> np.ndarray:
    """Right-hand side (gamma', alpha') of the first-order system."""
    return np.concatenate([state.alpha, -_quadratic_forms(christoffel, state.alpha)])


def rk4_step(state: GeodesicState, christoffel: ChristoffelTensor, h: float) -> GeodesicState:
    """One classical RK4 step with the Christoffel symbols held fixed."""
    if h <= 0:
        raise DomainError(f"step size must be positive, got {h}")
    y = np.concatenate([state.gamma, state.alpha])

    def f(yv):
        return np.concatenate([yv[3:], -_quadratic_forms(christoffel, yv[3:])])

    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    y_next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.isfinite(y_next).all():
        raise DivergenceError("integration state became non-finite")
    return GeodesicState(t=state.t + h, gamma=y_next[:3], alpha=y_next[3:])


class _Truncated(Exception):
    """Internal signal: stop integrating, keep the partial curve."""


def _christoffel_at(gamma: np.ndarray, stats: PatchStats, delta: int, lam: float):
    if not np.isfinite(gamma).all() or gamma[1] <= 0.0:
        raise _Truncated
    params = ModelParams(gamma[0], gamma[1], gamma[2])
    g = metric_tensor(params, stats, delta)
    try:
        g_inv = inverse_metric(g, lam)
    except GmrfError:
        raise _Truncated from None
    dg = metric_derivatives(params, stats, delta)
    return g, christoffel_specialized(g_inv, dg)


def _riemannian_speed(g: np.ndarray, alpha: np.ndarray) -> float:
    # MCMC-estimated metrics can lose positive definiteness in unstable
    # regimes; clamp so the diagnostic stays real.
    return math.sqrt(max(float(alpha @ g @ alpha), 0.0))


def integrate(start_gamma, start_alpha, cfg: IntegratorConfig,
              stats: PatchStats | None = None,
              hood: NeighborhoodSpec = SECOND_ORDER) -> GeodesicCurve:
    """Integrate a geodesic from (start_gamma, start_alpha) over [a, b].

    In mcmc mode, each iteration regenerates the field at the current
    position (warm refresh evolves one chain, cold refresh restarts it) and
    a supplied ``stats`` is ignored.  In frozen mode, ``stats`` is used as
    the fixed patch statistics; when omitted they are estimated from a
    single field sampled at the start position.

    On divergence (sigma2 <= 0, non-finite state, singular metric, chain
    breakdown) the curve is truncated and ``diverged_at`` records the
    failing iteration.
    """
    gamma = np.array(start_gamma, dtype=float)
    alpha = np.array(start_alpha, dtype=float)
    if gamma.shape != (3,) or alpha.shape != (3,):
        raise DomainError("start_gamma and start_alpha must be 3-vectors")
    if not (np.isfinite(gamma).all() and np.isfinite(alpha).all()):
        raise InvalidInputError("start state must be finite")
    if gamma[1] <= 0.0:
        raise DomainError(f"start sigma2 must be positive, got {gamma[1]}")
    if np.max(np.abs(alpha)) > cfg.alpha_magnitude_warn:
        warnings.warn(
            f"initial tangent {alpha.tolist()} has components beyond "
            f"{cfg.alpha_magnitude_warn}; the system can be unstable there",
            stacklevel=2)

    if cfg.mode == "frozen":
        return _integrate_frozen(gamma, alpha, cfg, stats, hood)
    return _integrate_mcmc(gamma, alpha, cfg, hood)


def _finish(states, cum, riem, diverged_at) -> GeodesicCurve:
    return GeodesicCurve(states=states, distance=cum[-1], riemannian_length=riem,
                         diverged_at=diverged_at, cum_dist=np.array(cum))


def _integrate_frozen(gamma, alpha, cfg, stats, hood) -> GeodesicCurve:
    if stats is None:
        params = ModelParams(gamma[0], gamma[1], gamma[2])
        values = _fresh_field(params, cfg, hood, np.random.default_rng(cfg.mcmc.seed))
        if values is None:
            raise DivergenceError("could not sample a field at the start position")
        stats = patch_stats(FieldSample(values=values))
    delta = hood.delta
    h = cfg.h

    def rhs(y):
        g_unused, chris = _christoffel_at(y[:3], stats, delta, cfg.lam)
        return np.concatenate([y[3:], -_quadratic_forms(chris, y[3:])])

    states = [GeodesicState(t=cfg.a, gamma=gamma.copy(), alpha=alpha.copy())]
    cum = [0.0]
    riem = 0.0
    y = np.concatenate([gamma, alpha])
    for i in range(cfg.n):
        try:
            g, _ = _christoffel_at(y[:3], stats, delta, cfg.lam)
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * h * k1)
            k3 = rhs(y + 0.5 * h * k2)
            k4 = rhs(y + h * k3)
        except _Truncated:
            return _finish(states, cum, riem, i)
        speed = float(np.linalg.norm(y[3:]))
        riem += _riemannian_speed(g.g, y[3:]) * h
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(y).all():
            return _finish(states, cum, riem, i)
        cum.append(cum[-1] + speed * h)
        states.append(GeodesicState(t=cfg.a + (i + 1) * h, gamma=y[:3].copy(),
                                    alpha=y[3:].copy()))
    return _finish(states, cum, riem, None)


def _fresh_field(params, cfg, hood, rng):
    """Cold-start chain at the current position; None when it breaks down."""
    values = rng.normal(params.mu, math.sqrt(params.sigma2), cfg.mcmc.lattice_size)
    status, _ = run_chain(values, params, hood, rng, cfg.mcmc.burn_in_sweeps,
                          threshold=cfg.mcmc.divergence_threshold,
                          cap=cfg.mcmc.amplitude_cap)
    if status in (_kernels.SWEEP_THRESHOLD, _kernels.SWEEP_NONFINITE):
        return None
    return values


def _integrate_mcmc(gamma, alpha, cfg, hood) -> GeodesicCurve:
    delta = hood.delta
    h = cfg.h
    rng = np.random.default_rng(cfg.mcmc.seed)
    values = None
    states = [GeodesicState(t=cfg.a, gamma=gamma.copy(), alpha=alpha.copy())]
    cum = [0.0]
    riem = 0.0
    state = states[0]
    for i in range(cfg.n):
        gm = state.gamma
        if not np.isfinite(gm).all() or gm[1] <= 0.0:
            return _finish(states, cum, riem, i)
        params = ModelParams(gm[0], gm[1], gm[2])
        if values is None or cfg.refresh == "cold":
            values = _fresh_field(params, cfg, hood, rng)
            if values is None:
                return _finish(states, cum, riem, i)
        else:
            status, _ = run_chain(values, params, hood, rng,
                                  cfg.mcmc.sweeps_per_sample,
                                  threshold=cfg.mcmc.divergence_threshold,
                                  cap=cfg.mcmc.amplitude_cap)
            if status in (_kernels.SWEEP_THRESHOLD, _kernels.SWEEP_NONFINITE):
                return _finish(states, cum, riem, i)
        stats = patch_stats(FieldSample(values=values))
        try:
            g, chris = _christoffel_at(gm, stats, delta, cfg.lam)
        except _Truncated:
            return _finish(states, cum, riem, i)
        speed = float(np.linalg.norm(state.alpha))
        riem += _riemannian_speed(g.g, state.alpha) * h
        try:
            state = rk4_step(state, chris, h)
        except DivergenceError:
            return _finish(states, cum, riem, i)
        state.t = cfg.a + (i + 1) * h
        cum.append(cum[-1] + speed * h)
        states.append(state)
    return _finish(states, cum, riem, None)


def reverse_run(curve: GeodesicCurve, cfg: IntegratorConfig,
                stats: PatchStats | None = None,
                hood: NeighborhoodSpec = SECOND_ORDER) -> ReversalResult:
    """Integrate back from the end of ``curve`` with the negated tangent.

    Returns the reversed curve together with the series
    ||gamma_rev(t_i) - gamma_fwd(t_{n-i})||; for a deterministic right-hand
    side the series stays at integrator-error level, while per-iteration
    field regeneration generally bifurcates.
    """
    if not curve.completed:
        raise DomainError("cannot reverse a curve that diverged")
    last = curve.states[-1]
    reversed_curve = integrate(last.gamma, -last.alpha, cfg, stats=stats, hood=hood)
    n_fwd = len(curve.states)
    m = min(len(reversed_curve.states), n_fwd)
    series = np.array([
        euclidean_distance(reversed_curve.states[i].gamma,
                           curve.states[n_fwd - 1 - i].gamma)
        for i in range(m)
    ])
    return ReversalResult(curve=reversed_curve, divergence=series)


def write_curve_csv(curve: GeodesicCurve, path) -> None:
    """Curve trajectory as CSV, one row per stored state."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,mu,sigma2,beta,alpha1,alpha2,alpha3,step_norm,cum_dist\n")
        for i, st in enumerate(curve.states):
            row = (st.t, st.gamma[0], st.gamma[1], st.gamma[2],
                   st.alpha[0], st.alpha[1], st.alpha[2],
                   float(np.linalg.norm(st.alpha)), curve.cum_dist[i])
            fh.write(",".join("%.12g" % v for v in row) + "\n")


def curve_summary(curve: GeodesicCurve, cfg: IntegratorConfig,
                  seed: int | None = None) -> dict:
    """JSON-ready summary of one run."""
    start, end = curve.states[0], curve.states[-1]
    return {
        "start": start.gamma.tolist(),
        "start_tangent": start.alpha.tolist(),
        "end": end.gamma.tolist(),
        "end_tangent": end.alpha.tolist(),
        "gd": curve.distance,
        "ed": euclidean_distance(start.gamma, end.gamma),
        "riemannian_length": curve.riemannian_length,
        "diverged_at": curve.diverged_at,
        "seed": seed,
        "mode": cfg.mode,
        "a": cfg.a,
        "b": cfg.b,
        "n": cfg.n,
        "lambda": cfg.lam,
    }


def write_summary_json(summary: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
