"""Parameter-update algorithms: contrastive-divergence initialization,
equilibrium-expectation estimation, and a persistent-chain baseline.

The equilibrium-expectation loop keeps one running accumulator of realized
statistic changes that is never reset, so after t updates it equals
g(x_t) - g(x_0) exactly for integer-valued statistics.  Each update moves
every parameter by a fixed fraction of its own magnitude, in the direction
that pushes the accumulated discrepancy back toward zero; the estimate is
the tail average of the parameter trace.

The contrastive-divergence loop instead resets its accumulator each update
and never moves the chain: proposals are accept-tested at the observed data
and only the accumulator advances, so the working state stays bit-identical
to the observation.

RNG contract: every update consumes ``rng.integers(0, n_sites, m)`` then
``rng.random(m)`` (ensemble runs draw ``(n_chains, m)`` matrices), making
runs replayable step by step with the public sweep API.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from . import kernel
from .core import BinaryState, ModelSpec
from .errors import ConfigError, DivergenceError, InvalidInputError
from .sampler import mh_step

DEFAULT_THETA_GUARD = 50.0


class StepSizeKind(str, Enum):
    """Step-magnitude functions f(theta, c) for the multiplicative update."""

    MAX_ABS_C = "max-abs-c"
    ABS_PLUS_C = "abs-plus-c"
    MAX_SQRT_C = "max-sqrt-c"


def step_size(kind: StepSizeKind, theta, c: float):
    """Per-parameter step magnitude before the learning-rate factor."""
    if c <= 0:
        raise ConfigError("step-size constant c must be positive")
    kind = StepSizeKind(kind)
    mag = np.abs(theta)
    if kind is StepSizeKind.MAX_ABS_C:
        return np.maximum(mag, c)
    if kind is StepSizeKind.ABS_PLUS_C:
        return mag + c
    return np.maximum(np.sqrt(mag), c)


@dataclass
class EstimatorConfig:
    """Knobs shared by the estimation loops.

    ``m`` is the number of sampler steps per parameter update, ``t_max``
    the number of updates, ``t_burn`` the burn-in dropped before tail
    averaging (defaults to t_max // 2), and ``theta_guard`` the runaway
    threshold that turns a nonexistent MLE into a diagnosable error.
    """

    a: float
    c: float
    m: int = 1
    t_max: int = 1000
    t_burn: int | None = None
    theta_guard: float = DEFAULT_THETA_GUARD

    def __post_init__(self):
        if self.a <= 0:
            raise ConfigError("learning rate a must be positive")
        if self.c <= 0:
            raise ConfigError("constant c must be positive")
        if int(self.m) != self.m or self.m < 1:
            raise ConfigError("steps per update m must be an integer >= 1")
        if int(self.t_max) != self.t_max or self.t_max < 1:
            raise ConfigError("t_max must be an integer >= 1")
        if self.theta_guard <= 0:
            raise ConfigError("theta_guard must be positive")
        if self.t_burn is not None and not 0 <= self.t_burn < self.t_max:
            raise ConfigError("t_burn must satisfy 0 <= t_burn < t_max")

    @property
    def burn(self) -> int:
        return self.t_max // 2 if self.t_burn is None else self.t_burn


@dataclass
class EstimationTrace:
    """Per-update history: parameters, statistic discrepancies, accept counts.

    Row t holds the parameter vector after update t+1 and the discrepancy
    d = g(x) - g(target) measured by that update's sweep.
    """

    theta: np.ndarray  # (t_max, L)
    d: np.ndarray  # (t_max, L)
    accepted: np.ndarray  # (t_max,)

    def __post_init__(self):
        if self.theta.shape != self.d.shape or self.theta.shape[0] != self.accepted.shape[0]:
            raise InvalidInputError("trace arrays disagree on the number of updates")

    def __len__(self) -> int:
        return self.theta.shape[0]

    @property
    def L(self) -> int:
        return self.theta.shape[1]


def tail_average(trace, t_burn: int) -> np.ndarray:
    """Elementwise mean of the parameter rows after the burn-in."""
    theta = trace.theta if isinstance(trace, EstimationTrace) else np.asarray(trace, float)
    if theta.ndim == 1:
        theta = theta[:, None]
    if not 0 <= t_burn < theta.shape[0]:
        raise InvalidInputError(
            f"burn-in {t_burn} leaves an empty tail in a {theta.shape[0]}-row trace"
        )
    return theta[t_burn:].mean(axis=0)


def ee_step(theta, d, cfg: EstimatorConfig, kind: StepSizeKind = StepSizeKind.MAX_ABS_C):
    """One sign-driven multiplicative update.

    Moves theta_i by a * f(theta_i, c) against the sign of d_i; an exactly
    matched statistic (d_i == 0) leaves its parameter untouched.
    """
    theta = np.asarray(theta, dtype=np.float64)
    return theta + cfg.a * step_size(kind, theta, cfg.c) * np.sign(-np.asarray(d))


def ee_soft_step(theta, d, cfg: EstimatorConfig, kind: StepSizeKind = StepSizeKind.MAX_ABS_C):
    """Magnitude-weighted variant: the raw discrepancy replaces its sign."""
    theta = np.asarray(theta, dtype=np.float64)
    return theta + cfg.a * step_size(kind, theta, cfg.c) * (-np.asarray(d, dtype=np.float64))


def _check_guard(theta: np.ndarray, guard: float, model: ModelSpec, algorithm: str):
    worst = int(np.argmax(np.abs(theta)))
    if abs(theta[worst]) > guard:
        raise DivergenceError(
            f"{algorithm} diverged: parameter {model.stat_names[worst]!r} reached "
            f"{theta[worst]:.3g} (|theta| guard {guard}); the MLE may not exist for this data",
            parameter=worst,
        )


def _draws(rng: np.random.Generator, n_sites: int, shape):
    sites = rng.integers(0, n_sites, shape)
    us = rng.random(shape)
    return sites, us


def cd_estimate(
    rng: np.random.Generator, model: ModelSpec, x_obs: BinaryState, cfg: EstimatorConfig
) -> tuple[np.ndarray, EstimationTrace]:
    """Contrastive-divergence estimate from a single observation.

    Starts at theta = 0; each update accept-tests m proposals at x_obs,
    sums the accepted statistic changes into a per-update accumulator, and
    steps theta against it.  x_obs is never modified.
    """
    model.validate_state(x_obs)
    theta = np.zeros(model.L)
    trace_theta = np.empty((cfg.t_max, model.L))
    trace_d = np.zeros((cfg.t_max, model.L))
    accepted = np.empty(cfg.t_max, dtype=np.int64)
    values = x_obs.values
    args = model.kernel_args
    for t in range(cfg.t_max):
        dg = np.zeros(model.L)
        sites, us = _draws(rng, model.n_sites, cfg.m)
        acc = kernel.advance_chain(values, sites, us, theta, *args, False, dg)
        theta = theta - cfg.a * dg
        _check_guard(theta, cfg.theta_guard, model, "CD")
        trace_theta[t] = theta
        accepted[t] = acc
    return theta.copy(), EstimationTrace(trace_theta, trace_d, accepted)


def ee_estimate(
    rng: np.random.Generator,
    model: ModelSpec,
    x_obs: BinaryState,
    theta0,
    cfg: EstimatorConfig,
    kind: StepSizeKind = StepSizeKind.MAX_ABS_C,
    soft: bool = False,
) -> tuple[np.ndarray, EstimationTrace]:
    """Equilibrium-expectation estimate from a single observation.

    The chain starts at x_obs and is advanced m move-performing steps per
    update; the never-reset accumulator tracks g(x_t) - g(x_obs) and drives
    the update.  Returns the tail average over updates after cfg.burn and
    the full trace.
    """
    model.validate_state(x_obs)
    theta = model.validate_theta(theta0).copy()
    update = ee_soft_step if soft else ee_step
    trace_theta = np.empty((cfg.t_max, model.L))
    trace_d = np.empty((cfg.t_max, model.L))
    accepted = np.empty(cfg.t_max, dtype=np.int64)
    values = x_obs.values.copy()
    args = model.kernel_args
    dg = np.zeros(model.L)
    for t in range(cfg.t_max):
        sites, us = _draws(rng, model.n_sites, cfg.m)
        acc = kernel.advance_chain(values, sites, us, theta, *args, True, dg)
        theta = update(theta, dg, cfg, kind)
        _check_guard(theta, cfg.theta_guard, model, "EE")
        trace_theta[t] = theta
        trace_d[t] = dg
        accepted[t] = acc
    trace = EstimationTrace(trace_theta, trace_d, accepted)
    return tail_average(trace, cfg.burn), trace


def _ensemble_models(models, n_chains: int) -> list[ModelSpec]:
    if isinstance(models, ModelSpec):
        return [models] * n_chains
    models = list(models)
    if len(models) != n_chains:
        raise InvalidInputError(f"{len(models)} models for {n_chains} chains")
    if len({m.L for m in models}) != 1:
        raise InvalidInputError("ensemble models must share one statistic count")
    return models


def cd_estimate_ensemble(
    rng: np.random.Generator,
    models,
    values2d: np.ndarray,
    cfg: EstimatorConfig,
) -> tuple[np.ndarray, EstimationTrace]:
    """Contrastive divergence against an ensemble of observations.

    ``models`` is one shared ModelSpec or one per chain (equal L); chain k
    is accept-tested at observation row k and the update uses the
    chain-mean accumulator.  Rows are never modified.
    """
    n_chains = values2d.shape[0]
    chain_models = _ensemble_models(models, n_chains)
    shared = isinstance(models, ModelSpec)
    L = chain_models[0].L
    n_sites = chain_models[0].n_sites
    theta = np.zeros(L)
    trace_theta = np.empty((cfg.t_max, L))
    trace_d = np.zeros((cfg.t_max, L))
    accepted = np.empty(cfg.t_max, dtype=np.int64)
    acc_out = np.zeros(n_chains, dtype=np.int64)
    for t in range(cfg.t_max):
        dg = np.zeros((n_chains, L))
        sites, us = _draws(rng, n_sites, (n_chains, cfg.m))
        acc_out[:] = 0
        if shared:
            kernel.advance_ensemble(
                values2d, sites, us, theta, *chain_models[0].kernel_args, False, dg, acc_out
            )
        else:
            for k, m in enumerate(chain_models):
                acc_out[k] = kernel.advance_chain(
                    values2d[k], sites[k], us[k], theta, *m.kernel_args, False, dg[k]
                )
        theta = theta - cfg.a * dg.mean(axis=0)
        _check_guard(theta, cfg.theta_guard, chain_models[0], "CD")
        trace_theta[t] = theta
        accepted[t] = acc_out.sum()
    return theta.copy(), EstimationTrace(trace_theta, trace_d, accepted)


def ee_estimate_ensemble(
    rng: np.random.Generator,
    models,
    values2d: np.ndarray,
    g_target,
    theta0,
    cfg: EstimatorConfig,
    kind: StepSizeKind = StepSizeKind.MAX_ABS_C,
    soft: bool = False,
) -> tuple[np.ndarray, EstimationTrace]:
    """Equilibrium expectation against an ensemble target.

    One chain per row of ``values2d`` (modified in place), each under its
    own model when ``models`` is a sequence.  The update compares the
    chain-mean statistics to ``g_target`` (the data-side mean).
    """
    n_chains = values2d.shape[0]
    chain_models = _ensemble_models(models, n_chains)
    shared = isinstance(models, ModelSpec)
    L = chain_models[0].L
    n_sites = chain_models[0].n_sites
    g_target = np.asarray(g_target, dtype=np.float64)
    if g_target.shape != (L,):
        raise InvalidInputError(f"g_target must have shape ({L},)")
    theta = chain_models[0].validate_theta(theta0).copy()
    update = ee_soft_step if soft else ee_step
    # Running per-chain stats; the kernel accumulates realized changes into
    # these rows so the ensemble mean is g-bar(x_t) at every update.
    g_curr = np.stack(
        [m.suff_stats_values(values2d[k]) for k, m in enumerate(chain_models)]
    )
    trace_theta = np.empty((cfg.t_max, L))
    trace_d = np.empty((cfg.t_max, L))
    accepted = np.empty(cfg.t_max, dtype=np.int64)
    acc_out = np.zeros(n_chains, dtype=np.int64)
    for t in range(cfg.t_max):
        sites, us = _draws(rng, n_sites, (n_chains, cfg.m))
        acc_out[:] = 0
        if shared:
            kernel.advance_ensemble(
                values2d, sites, us, theta, *chain_models[0].kernel_args, True, g_curr, acc_out
            )
        else:
            for k, m in enumerate(chain_models):
                acc_out[k] = kernel.advance_chain(
                    values2d[k], sites[k], us[k], theta, *m.kernel_args, True, g_curr[k]
                )
        d = g_curr.mean(axis=0) - g_target
        theta = update(theta, d, cfg, kind)
        _check_guard(theta, cfg.theta_guard, chain_models[0], "EE")
        trace_theta[t] = theta
        trace_d[t] = d
        accepted[t] = acc_out.sum()
    trace = EstimationTrace(trace_theta, trace_d, accepted)
    return tail_average(trace, cfg.burn), trace


def pcd_step(
    rng: np.random.Generator,
    model: ModelSpec,
    theta,
    x: BinaryState,
    x_obs: BinaryState,
    a_t: float,
    theta_guard: float = DEFAULT_THETA_GUARD,
) -> tuple[np.ndarray, BinaryState]:
    """One persistent-chain update: a sampler step, then
    theta += a_t * (g(x_obs) - g(x_new))."""
    if a_t <= 0:
        raise ConfigError("PCD learning rate must be positive")
    theta = model.validate_theta(theta)
    x_new, _, _ = mh_step(rng, model, theta, x)
    theta_new = theta + a_t * (model.suff_stats(x_obs) - model.suff_stats(x_new))
    _check_guard(theta_new, theta_guard, model, "PCD")
    return theta_new, x_new


def pcd_estimate(
    rng: np.random.Generator,
    model: ModelSpec,
    g_target,
    x0: BinaryState,
    rate: Callable[[int], float],
    t_max: int,
    theta0=None,
    theta_guard: float = DEFAULT_THETA_GUARD,
) -> tuple[np.ndarray, EstimationTrace]:
    """Persistent-chain estimation run against a statistic target.

    ``rate(t)`` supplies the learning rate of update t (1-based); schedules
    are deliberately caller-chosen.  Pass g(x_obs) as the target to recover
    the single-observation algorithm.
    """
    model.validate_state(x0)
    g_target = np.asarray(g_target, dtype=np.float64)
    if g_target.shape != (model.L,):
        raise InvalidInputError(f"g_target must have shape ({model.L},)")
    theta = np.zeros(model.L) if theta0 is None else model.validate_theta(theta0).copy()
    values = x0.values.copy()
    g_curr = model.suff_stats_values(values)
    args = model.kernel_args
    trace_theta = np.empty((t_max, model.L))
    trace_d = np.empty((t_max, model.L))
    accepted = np.empty(t_max, dtype=np.int64)
    for t in range(t_max):
        a_t = rate(t + 1)
        if a_t <= 0:
            raise ConfigError("PCD learning rate must stay positive")
        sites, us = _draws(rng, model.n_sites, 1)
        acc = kernel.advance_chain(values, sites, us, theta, *args, True, g_curr)
        theta = theta + a_t * (g_target - g_curr)
        _check_guard(theta, theta_guard, model, "PCD")
        trace_theta[t] = theta
        trace_d[t] = g_curr - g_target
        accepted[t] = acc
    return theta.copy(), EstimationTrace(trace_theta, trace_d, accepted)
