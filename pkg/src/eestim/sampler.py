"""Metropolis-Hastings sampling over single-site toggles.

RNG contract: one sweep of m steps consumes ``rng.integers(0, n_sites, m)``
followed by ``rng.random(m)``, in that order.  ``mh_step`` is a sweep of
m = 1, so chaining single steps reproduces a stepwise sweep bit for bit.
Sweeps longer than ``SWEEP_CHUNK`` draw in chunks of that size.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernel
from .core import BinaryState, ModelSpec, Proposal
from .errors import InvalidInputError

SWEEP_CHUNK = 1 << 20


def thread_count(requested: int | None = None) -> int:
    """Worker count for ensemble runs; EESTIM_THREADS overrides everything."""
    env = os.environ.get("EESTIM_THREADS")
    if env is not None:
        try:
            n = int(env)
        except ValueError as exc:
            raise InvalidInputError(f"EESTIM_THREADS={env!r} is not an integer") from exc
        if n < 1:
            raise InvalidInputError("EESTIM_THREADS must be at least 1")
        return n
    if requested is not None:
        return max(1, requested)
    return max(1, os.cpu_count() or 1)


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream: (seed, stream, build) fixes every draw."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        )


def spawn_generators(seed: int, count: int) -> list[np.random.Generator]:
    """Independent per-chain generators derived from one seed."""
    return [RngStream(seed, k).generator() for k in range(count)]


def propose_uniform_flip(rng: np.random.Generator, x: BinaryState) -> Proposal:
    """Pick a site uniformly at random; the toggle proposal is symmetric."""
    n = x.n_sites
    if n == 0:
        raise InvalidInputError("cannot propose a flip on an empty state")
    site = int(rng.integers(0, n))
    return Proposal(site, 1.0 / n, 1.0 / n)


def acceptance_prob(model: ModelSpec, theta, x: BinaryState, p: Proposal) -> float:
    """min{1, exp(theta . delta_g) * q_rev / q_fwd} for toggling p.site."""
    theta = model.validate_theta(theta)
    logr = float(theta @ model.change_stats(x, p)) + float(
        np.log(p.reverse_weight) - np.log(p.forward_weight)
    )
    if logr >= 0.0:
        return 1.0
    return float(np.exp(max(logr, -kernel.LOG_RATIO_CLAMP)))


@dataclass
class SweepResult:
    """Accumulated realized statistic changes over one sweep."""

    dg: np.ndarray
    accepted: int
    proposed: int


def advance_values(
    rng: np.random.Generator,
    model: ModelSpec,
    theta: np.ndarray,
    values: np.ndarray,
    m: int,
    perform_moves: bool,
    dg_accum: np.ndarray,
) -> int:
    """Run m kernel steps in place on a raw value vector; returns accept count."""
    accepted = 0
    done = 0
    while done < m:
        chunk = min(m - done, SWEEP_CHUNK)
        sites = rng.integers(0, model.n_sites, chunk)
        us = rng.random(chunk)
        accepted += kernel.advance_chain(
            values, sites, us, theta, *model.kernel_args, perform_moves, dg_accum
        )
        done += chunk
    return accepted


def run_sweep(
    rng: np.random.Generator,
    model: ModelSpec,
    theta,
    x: BinaryState,
    m: int,
    perform_moves: bool = True,
) -> tuple[BinaryState, SweepResult]:
    """m accept-tested single-site steps from x.

    With ``perform_moves`` accepted toggles are applied, so the accumulated
    dg telescopes to g(x_final) - g(x_initial).  Without it the state is
    never advanced: every step is accept-tested at the initial state and
    accepted changes only feed the accumulator (the returned state is the
    input object itself).
    """
    model.validate_state(x)
    theta = model.validate_theta(theta)
    if m < 1:
        raise InvalidInputError("sweep length m must be at least 1")
    dg = np.zeros(model.L)
    if perform_moves:
        out = x.copy()
        accepted = advance_values(rng, model, theta, out.values, m, True, dg)
        return out, SweepResult(dg, accepted, m)
    accepted = advance_values(rng, model, theta, x.values, m, False, dg)
    return x, SweepResult(dg, accepted, m)


def mh_step(
    rng: np.random.Generator, model: ModelSpec, theta, x: BinaryState
) -> tuple[BinaryState, bool, np.ndarray]:
    """One Metropolis-Hastings step; returns (state, accepted, realized dg)."""
    out, result = run_sweep(rng, model, theta, x, 1, perform_moves=True)
    return out, result.accepted == 1, result.dg


def equilibrate(
    rng: np.random.Generator, model: ModelSpec, theta, x: BinaryState, steps: int
) -> BinaryState:
    """Advance x by the given number of move-performing steps."""
    if steps < 0:
        raise InvalidInputError("step count must be nonnegative")
    if steps == 0:
        return x
    out, _ = run_sweep(rng, model, theta, x, steps, perform_moves=True)
    return out


def ensemble_mean_stats(chains, model: ModelSpec) -> np.ndarray:
    """Elementwise mean of sufficient statistics over an ensemble of states.

    Accepts a sequence of BinaryState or a (n_chains, n_sites) value matrix.
    """
    if isinstance(chains, np.ndarray):
        if chains.ndim != 2 or chains.shape[0] == 0:
            raise InvalidInputError("ensemble must be a nonempty (chains, sites) matrix")
        rows = chains
        total = np.zeros(model.L)
        for row in rows:
            total += model.suff_stats_values(row)
        return total / rows.shape[0]
    chains = list(chains)
    if not chains:
        raise InvalidInputError("ensemble must contain at least one chain")
    total = np.zeros(model.L)
    for chain in chains:
        total += model.suff_stats(chain)
    return total / len(chains)


def equilibrate_ensemble(
    generators: Sequence[np.random.Generator],
    model: ModelSpec,
    theta,
    values2d: np.ndarray,
    steps: int,
    threads: int | None = None,
) -> np.ndarray:
    """Advance every chain of an ensemble by ``steps`` moves, in place.

    Each chain consumes its own generator, so results are independent of
    the worker count.  The kernel releases the GIL, making thread-level
    parallelism effective.
    """
    theta = model.validate_theta(theta)
    if values2d.ndim != 2 or values2d.shape[1] != model.n_sites:
        raise InvalidInputError("ensemble values must have shape (chains, n_sites)")
    if len(generators) != values2d.shape[0]:
        raise InvalidInputError("need exactly one generator per chain")
    if steps == 0:
        return values2d
    scratch = np.zeros(model.L)

    def one(k: int):
        dg = scratch.copy()
        advance_values(generators[k], model, theta, values2d[k], steps, True, dg)

    workers = min(thread_count(threads), values2d.shape[0])
    if workers <= 1:
        for k in range(values2d.shape[0]):
            one(k)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(values2d.shape[0])))
    return values2d
