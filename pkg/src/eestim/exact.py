"""Brute-force enumeration oracle for small systems.

Enumerates all 2^n states of a model (n capped at 20) to evaluate the log
partition function, exact log-likelihood, exact moments, the exact MLE, iid
samples, and the stationary-drift residual of the single-flip
Metropolis-Hastings kernel.  All arithmetic is done in the log domain with
streaming log-sum-exp so large parameter vectors stay stable.

State index convention: bit k of the integer code holds site k (spin -1 for
bit 0, +1 for bit 1).
"""

from __future__ import annotations

import numpy as np

from .core import BinaryState, Encoding, ModelSpec
from .errors import EnumerationSizeError, EstimError, InvalidInputError, NonexistenceError

N_MAX = 20
KERNEL_N_MAX = 12  # transition-kernel helpers materialize per-site flip tables
_CHUNK_BITS = 16


def _as_target(model: ModelSpec, target) -> np.ndarray:
    if isinstance(target, BinaryState):
        return model.suff_stats(target)
    target = np.asarray(target, dtype=np.float64)
    if target.shape != (model.L,):
        raise InvalidInputError(f"target must have shape ({model.L},), got {target.shape}")
    return target


class EnumerationTable:
    """Cached enumeration of a model's statistics over all 2^n states."""

    def __init__(self, model: ModelSpec, cache_bytes: int = 1 << 29):
        if model.n_sites > N_MAX:
            raise EnumerationSizeError(
                f"{model.n_sites} sites exceed the {N_MAX}-site enumeration cap"
            )
        self.model = model
        self.n = model.n_sites
        self.size = 1 << self.n
        self.chunk = min(self.size, 1 << _CHUNK_BITS)
        self._cached = None
        if self.size * model.L * 8 <= cache_bytes:
            self._cached = [chunk.copy() for _, chunk in self._compute_chunks()]

    # -- state decoding ------------------------------------------------

    def values_for_codes(self, codes: np.ndarray) -> np.ndarray:
        """Decode integer state codes into site-value rows."""
        bits = (codes[:, None] >> np.arange(self.n)) & 1
        if self.model.encoding is Encoding.SPIN:
            return (2 * bits - 1).astype(np.int8)
        return bits.astype(np.int8)

    def _compute_chunks(self):
        m = self.model
        for start in range(0, self.size, self.chunk):
            codes = np.arange(start, min(start + self.chunk, self.size), dtype=np.int64)
            v = self.values_for_codes(codes).astype(np.float64)
            g = np.zeros((codes.shape[0], m.L))
            for site, stat, w in zip(m._node_site, m._node_stat, m._node_weight):
                g[:, stat] += w * v[:, site]
            for i, j, stat, w in zip(m._pair_i, m._pair_j, m._pair_stat, m._pair_weight):
                g[:, stat] += w * v[:, i] * v[:, j]
            yield start, g

    def stat_chunks(self):
        """Yield (start, G_chunk) over the state space in code order."""
        if self._cached is not None:
            start = 0
            for g in self._cached:
                yield start, g
                start += g.shape[0]
        else:
            yield from self._compute_chunks()

    def stat_matrix(self) -> np.ndarray:
        """The full (2^n, L) statistic matrix (materialized)."""
        return np.concatenate([g for _, g in self.stat_chunks()], axis=0)

    # -- scalar functionals ---------------------------------------------

    def log_partition(self, theta) -> float:
        theta = self.model.validate_theta(theta)
        run_max = -np.inf
        run_acc = 0.0
        for _, g in self.stat_chunks():
            s = g @ theta
            m = float(s.max())
            if m > run_max:
                run_acc = run_acc * np.exp(run_max - m) + float(np.exp(s - m).sum())
                run_max = m
            else:
                run_acc += float(np.exp(s - run_max).sum())
        return run_max + float(np.log(run_acc))

    def log_likelihood(self, theta, target) -> float:
        theta = self.model.validate_theta(theta)
        target = _as_target(self.model, target)
        return float(theta @ target) - self.log_partition(theta)

    def log_likelihood_many(self, thetas, target, block: int = 256) -> np.ndarray:
        """Exact log-likelihood of one target at many parameter vectors.

        Batches the state sums as matrix products; used for per-update
        likelihood curves over whole estimation traces.
        """
        thetas = np.asarray(thetas, dtype=np.float64)
        if thetas.ndim != 2 or thetas.shape[1] != self.model.L:
            raise InvalidInputError(f"thetas must have shape (T, {self.model.L})")
        target = _as_target(self.model, target)
        out = np.empty(thetas.shape[0])
        for start in range(0, thetas.shape[0], block):
            tb = thetas[start : start + block]
            run_max = np.full(tb.shape[0], -np.inf)
            run_acc = np.zeros(tb.shape[0])
            for _, g in self.stat_chunks():
                s = g @ tb.T
                m = s.max(axis=0)
                new_max = np.maximum(run_max, m)
                run_acc = run_acc * np.exp(run_max - new_max) + np.exp(s - new_max).sum(axis=0)
                run_max = new_max
            out[start : start + tb.shape[0]] = tb @ target - (run_max + np.log(run_acc))
        return out

    def probabilities(self, theta) -> np.ndarray:
        """Exact pi(x | theta) over all state codes."""
        theta = self.model.validate_theta(theta)
        logz = self.log_partition(theta)
        out = np.empty(self.size)
        pos = 0
        for _, g in self.stat_chunks():
            out[pos : pos + g.shape[0]] = np.exp(g @ theta - logz)
            pos += g.shape[0]
        return out

    def expectations(self, theta) -> np.ndarray:
        """Exact moment vector E_theta[g(x)]."""
        theta = self.model.validate_theta(theta)
        logz = self.log_partition(theta)
        mu = np.zeros(self.model.L)
        for _, g in self.stat_chunks():
            p = np.exp(g @ theta - logz)
            mu += p @ g
        return mu

    def stat_ranges(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-statistic (min, max) over all states: the hull's bounding box."""
        lo = np.full(self.model.L, np.inf)
        hi = np.full(self.model.L, -np.inf)
        for _, g in self.stat_chunks():
            np.minimum(lo, g.min(axis=0), out=lo)
            np.maximum(hi, g.max(axis=0), out=hi)
        return lo, hi

    def moments(self, theta) -> tuple[np.ndarray, np.ndarray]:
        """Exact per-statistic mean and variance."""
        theta = self.model.validate_theta(theta)
        logz = self.log_partition(theta)
        mu = np.zeros(self.model.L)
        m2 = np.zeros(self.model.L)
        for _, g in self.stat_chunks():
            p = np.exp(g @ theta - logz)
            mu += p @ g
            m2 += p @ (g * g)
        return mu, np.maximum(m2 - mu * mu, 0.0)

    def mean_cov(self, theta) -> tuple[np.ndarray, np.ndarray]:
        """Exact statistic mean and covariance matrix."""
        theta = self.model.validate_theta(theta)
        logz = self.log_partition(theta)
        mu = np.zeros(self.model.L)
        second = np.zeros((self.model.L, self.model.L))
        for _, g in self.stat_chunks():
            p = np.exp(g @ theta - logz)
            mu += p @ g
            second += (p[:, None] * g).T @ g
        return mu, second - np.outer(mu, mu)

    # -- inference -------------------------------------------------------

    def mle(
        self,
        target,
        tol: float = 1e-8,
        theta0=None,
        guard: float = 50.0,
        max_iter: int = 10_000,
        method: str = "newton",
    ) -> np.ndarray:
        """Exact MLE by damped ascent on the exact log-likelihood.

        The default ascent direction is the Newton step (the covariance of
        the statistics is the exact negative Hessian); ``method="gradient"``
        uses plain gradient ascent instead, which is reliable on small
        well-conditioned systems but stalls badly when statistic
        covariances are near-singular.  Either way the step is halved until
        the log-likelihood sufficiently increases.  Targets outside or on
        the boundary of the achievable-statistics hull have no finite
        maximizer; the iterates then run away and trip the guard.
        """
        target = _as_target(self.model, target)
        # A target pinned to an extreme achievable value needs a point mass,
        # which no finite parameter produces; catch it before the ascent,
        # since the moment residual decays to zero along the runaway
        # direction and would fake convergence.  (A constant statistic is
        # fine when the target matches its one achievable value.)
        lo, hi = self.stat_ranges()
        for i in range(self.model.L):
            interior = lo[i] < target[i] < hi[i] or (lo[i] == target[i] == hi[i])
            if not interior:
                raise NonexistenceError(
                    f"no finite MLE: target for {self.model.stat_names[i]!r} "
                    f"({target[i]}) is on or outside its achievable range "
                    f"[{lo[i]}, {hi[i]}]",
                    parameter=i,
                )
        if method not in ("newton", "gradient"):
            raise InvalidInputError(f"unknown MLE method {method!r}")
        theta = (
            np.zeros(self.model.L)
            if theta0 is None
            else self.model.validate_theta(theta0).copy()
        )
        ll = self.log_likelihood(theta, target)
        eta = 1.0
        for _ in range(max_iter):
            if method == "newton":
                mu, cov = self.mean_cov(theta)
                grad = target - mu
            else:
                grad = target - self.expectations(theta)
            if float(np.max(np.abs(grad))) < tol:
                return theta
            if method == "newton":
                # Tiny ridge keeps the solve defined for constant statistics
                # (zero covariance rows have zero gradient after the hull check).
                ridge = 1e-10 * max(float(np.max(np.diagonal(cov))), 1.0)
                direction = np.linalg.solve(cov + ridge * np.eye(self.model.L), grad)
                eta = 1.0
            else:
                direction = grad
            slope = float(grad @ direction)
            # Sufficient-increase backtracking; plain non-decrease would admit
            # a two-cycle bouncing between mirror points across the optimum.
            while True:
                cand = theta + eta * direction
                ll_cand = self.log_likelihood(cand, target)
                if ll_cand >= ll + 1e-4 * eta * slope:
                    break
                eta *= 0.5
                if eta < 1e-18:
                    raise EstimError("ascent stalled before reaching tolerance")
            theta, ll = cand, ll_cand
            worst = int(np.argmax(np.abs(theta)))
            if abs(theta[worst]) > guard:
                raise NonexistenceError(
                    f"no finite MLE: parameter {self.model.stat_names[worst]!r} "
                    f"passed |theta| > {guard} (target on the achievable-statistics boundary?)",
                    parameter=worst,
                )
            if method == "gradient":
                eta = min(eta * 2.0, 1e6)
        raise EstimError(f"exact MLE did not reach tolerance {tol} in {max_iter} iterations")

    def sample(self, rng: np.random.Generator, theta, count: int) -> list[BinaryState]:
        """iid draws from the exact distribution via cumulative inversion."""
        if count < 0:
            raise InvalidInputError("sample count must be nonnegative")
        if count == 0:
            return []
        cum = np.cumsum(self.probabilities(theta))
        codes = np.searchsorted(cum, rng.random(count), side="right")
        codes = np.minimum(codes, self.size - 1)
        rows = self.values_for_codes(codes.astype(np.int64))
        return [self.model.new_state(row) for row in rows]


def partition_function(model: ModelSpec, theta) -> float:
    """log Z(theta) by enumeration (returned in the log domain for safety)."""
    return EnumerationTable(model).log_partition(theta)


def log_likelihood(model: ModelSpec, theta, target) -> float:
    """Exact log-likelihood theta . g - log Z for an observation or mean target."""
    return EnumerationTable(model).log_likelihood(theta, target)


def exact_expectations(model: ModelSpec, theta) -> np.ndarray:
    return EnumerationTable(model).expectations(theta)


def exact_mle(model: ModelSpec, target, **kwargs) -> np.ndarray:
    return EnumerationTable(model).mle(target, **kwargs)


def exact_sample(rng: np.random.Generator, model: ModelSpec, theta, count: int):
    return EnumerationTable(model).sample(rng, theta, count)


def _flip_tables(table: EnumerationTable, theta: np.ndarray):
    """Per-site acceptance and statistic-change tables over all states."""
    model = table.model
    if table.n > KERNEL_N_MAX:
        raise EnumerationSizeError(
            f"{table.n} sites exceed the {KERNEL_N_MAX}-site transition-kernel cap"
        )
    g = table.stat_matrix()
    codes = np.arange(table.size, dtype=np.int64)
    for k in range(table.n):
        dg = g[codes ^ (1 << k)] - g
        logr = dg @ theta
        alpha = np.exp(np.minimum(logr, 0.0))
        yield k, dg, alpha


def theorem1_residual(model: ModelSpec, theta) -> float:
    """Stationary drift of the single-flip MH kernel.

    Computes || sum_x pi(x) sum_x' P(x -> x') [g(x') - g(x)] ||_inf exactly;
    it vanishes for any kernel with stationary distribution pi, so values
    above rounding noise expose a broken kernel or statistic table.
    """
    table = EnumerationTable(model)
    theta = model.validate_theta(theta)
    p = table.probabilities(theta)
    acc = np.zeros(model.L)
    for _, dg, alpha in _flip_tables(table, theta):
        acc += (p * alpha) @ dg
    return float(np.max(np.abs(acc))) / model.n_sites


def transition_matrix(model: ModelSpec, theta) -> np.ndarray:
    """Dense single-flip MH transition matrix over all state codes.

    Rejected proposals contribute to the diagonal.
    """
    table = EnumerationTable(model)
    theta = model.validate_theta(theta)
    n = table.n
    P = np.zeros((table.size, table.size))
    codes = np.arange(table.size, dtype=np.int64)
    for k, _, alpha in _flip_tables(table, theta):
        P[codes, codes ^ (1 << k)] = alpha / n
    P[codes, codes] += 1.0 - P.sum(axis=1)
    return P
