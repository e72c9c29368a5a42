"""Binary states, single-site proposals, and the generic model specification.

Every model in this package (Ising grids and chains, Boltzmann machines,
conditional random fields, directed-graph tie models) is a distribution
pi(x) proportional to exp(theta . g(x)) over binary site variables, whose
sufficient statistics decompose into single-site terms ``w * x_k`` and pair
terms ``w * x_i * x_j``.  ``ModelSpec`` stores those terms once and derives
per-site adjacency tables, so the statistic change caused by toggling one
site costs O(site degree) instead of O(system size).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError

VALUE_DTYPE = np.int8


class Encoding(str, Enum):
    """Site value encoding: Ising spins in {-1,+1} or graph ties in {0,1}."""

    SPIN = "spin"
    TIE = "tie"

    def legal_values(self) -> tuple[int, int]:
        return (-1, 1) if self is Encoding.SPIN else (0, 1)

    def toggled(self, value: int) -> int:
        """The opposite legal value."""
        return -value if self is Encoding.SPIN else 1 - value


def dims_size(dims: tuple) -> int:
    """Number of site variables implied by a dims descriptor.

    Descriptors are ``("grid", rows, cols)``, ``("chain", n)`` for a flat
    vector of n sites, and ``("digraph", n)`` for the n*(n-1) ordered-pair
    tie variables of a directed graph on n nodes.
    """
    kind = dims[0]
    if kind == "grid":
        return int(dims[1]) * int(dims[2])
    if kind == "chain":
        return int(dims[1])
    if kind == "digraph":
        return int(dims[1]) * (int(dims[1]) - 1)
    raise InvalidInputError(f"unknown dims kind {kind!r}")


@dataclass(eq=False)
class BinaryState:
    """A configuration of binary site variables plus layout metadata."""

    values: np.ndarray
    encoding: Encoding
    dims: tuple

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=VALUE_DTYPE)
        self.encoding = Encoding(self.encoding)
        if self.values.ndim != 1:
            raise InvalidInputError("state values must be a flat vector")
        expected = dims_size(self.dims)
        if self.values.shape[0] != expected:
            raise InvalidInputError(
                f"dims {self.dims} imply {expected} sites, got {self.values.shape[0]}"
            )
        lo, hi = self.encoding.legal_values()
        if not np.all((self.values == lo) | (self.values == hi)):
            raise InvalidInputError(
                f"state entries must all be {lo} or {hi} for {self.encoding.value} encoding"
            )

    @property
    def n_sites(self) -> int:
        return self.values.shape[0]

    def copy(self) -> "BinaryState":
        return BinaryState(self.values.copy(), self.encoding, self.dims)


@dataclass(frozen=True)
class Proposal:
    """A single-site toggle with its forward and reverse proposal weights."""

    site: int
    forward_weight: float
    reverse_weight: float

    def __post_init__(self):
        if self.site < 0:
            raise InvalidInputError(f"proposal site {self.site} is negative")
        for name in ("forward_weight", "reverse_weight"):
            w = getattr(self, name)
            if not (0.0 < w <= 1.0):
                raise InvalidInputError(f"proposal {name} {w} outside (0, 1]")


def apply_proposal(x: BinaryState, p: Proposal) -> BinaryState:
    """Return a copy of ``x`` with the proposal's site toggled."""
    if p.site >= x.n_sites:
        raise InvalidInputError(f"site {p.site} out of range for {x.n_sites} sites")
    out = x.copy()
    out.values[p.site] = x.encoding.toggled(int(out.values[p.site]))
    return out


class ModelSpec:
    """Statistic definitions, encoding, and precomputed change-statistic tables.

    Statistics are linear combinations of single-site and pair terms:

        g_s(x) = sum over node terms (k, s, w) of  w * x_k
               + sum over pair terms (i, j, s, w) of  w * x_i * x_j

    Each unordered pair term is stored once; the adjacency tables index it
    from both endpoints so ``change_stats`` touches only the toggled site's
    neighborhood.  Instances are immutable after construction and safe to
    share across threads.
    """

    def __init__(
        self,
        name: str,
        encoding: Encoding,
        dims: tuple,
        stat_names: Sequence[str],
        node_terms: Iterable[tuple[int, int, float]] = (),
        pair_terms: Iterable[tuple[int, int, int, float]] = (),
    ):
        self.name = name
        self.encoding = Encoding(encoding)
        self.dims = tuple(dims)
        self.n_sites = dims_size(self.dims)
        self.stat_names = tuple(stat_names)
        self.L = len(self.stat_names)

        node = list(node_terms)
        pair = list(pair_terms)
        self._node_site = np.array([t[0] for t in node], dtype=np.int64)
        self._node_stat = np.array([t[1] for t in node], dtype=np.int64)
        self._node_weight = np.array([t[2] for t in node], dtype=np.float64)
        self._pair_i = np.array([t[0] for t in pair], dtype=np.int64)
        self._pair_j = np.array([t[1] for t in pair], dtype=np.int64)
        self._pair_stat = np.array([t[2] for t in pair], dtype=np.int64)
        self._pair_weight = np.array([t[3] for t in pair], dtype=np.float64)
        self._check_indices()
        self._build_adjacency()

    def _check_indices(self):
        n, L = self.n_sites, self.L
        for arr, bound, what in (
            (self._node_site, n, "node site"),
            (self._node_stat, L, "node stat"),
            (self._pair_i, n, "pair site"),
            (self._pair_j, n, "pair site"),
            (self._pair_stat, L, "pair stat"),
        ):
            if arr.size and (arr.min() < 0 or arr.max() >= bound):
                raise InvalidInputError(f"{what} index out of range in model {self.name!r}")
        if np.any(self._pair_i == self._pair_j):
            raise InvalidInputError(f"pair term with identical endpoints in model {self.name!r}")

    def _build_adjacency(self):
        n = self.n_sites
        # Pair adjacency: every pair term appears once per endpoint.
        site = np.concatenate([self._pair_i, self._pair_j])
        other = np.concatenate([self._pair_j, self._pair_i])
        stat = np.concatenate([self._pair_stat, self._pair_stat])
        weight = np.concatenate([self._pair_weight, self._pair_weight])
        order = np.argsort(site, kind="stable")
        self._adj_other = np.ascontiguousarray(other[order])
        self._adj_stat = np.ascontiguousarray(stat[order])
        self._adj_weight = np.ascontiguousarray(weight[order])
        counts = np.bincount(site, minlength=n)
        self._adj_indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)

        order = np.argsort(self._node_site, kind="stable")
        self._nadj_stat = np.ascontiguousarray(self._node_stat[order])
        self._nadj_weight = np.ascontiguousarray(self._node_weight[order])
        counts = np.bincount(self._node_site, minlength=n) if self._node_site.size else np.zeros(n, np.int64)
        self._nadj_indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)

    @property
    def kernel_args(self) -> tuple:
        """Flat tables consumed by the compiled sampling kernel."""
        return (
            self._adj_indptr,
            self._adj_other,
            self._adj_stat,
            self._adj_weight,
            self._nadj_indptr,
            self._nadj_stat,
            self._nadj_weight,
            self.encoding is Encoding.SPIN,
        )

    def validate_state(self, x: BinaryState):
        if x.encoding is not self.encoding:
            raise InvalidInputError(
                f"state encoding {x.encoding.value} does not match model {self.encoding.value}"
            )
        if x.dims != self.dims:
            raise InvalidInputError(f"state dims {x.dims} do not match model dims {self.dims}")

    def validate_theta(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (self.L,):
            raise InvalidInputError(f"theta must have shape ({self.L},), got {theta.shape}")
        if not np.all(np.isfinite(theta)):
            raise InvalidInputError("theta entries must be finite")
        return theta

    def new_state(self, values) -> BinaryState:
        return BinaryState(values, self.encoding, self.dims)

    def random_state(self, rng: np.random.Generator) -> BinaryState:
        lo, hi = self.encoding.legal_values()
        values = rng.choice(np.array([lo, hi], dtype=VALUE_DTYPE), size=self.n_sites)
        return self.new_state(values)

    def suff_stats(self, x: BinaryState) -> np.ndarray:
        """Sufficient statistics g(x) computed from scratch."""
        self.validate_state(x)
        return self.suff_stats_values(x.values)

    def suff_stats_values(self, values: np.ndarray) -> np.ndarray:
        g = np.zeros(self.L)
        if self._node_site.size:
            np.add.at(g, self._node_stat, self._node_weight * values[self._node_site])
        if self._pair_i.size:
            prod = values[self._pair_i].astype(np.float64) * values[self._pair_j]
            np.add.at(g, self._pair_stat, self._pair_weight * prod)
        return g

    def change_stats(self, x: BinaryState, p: Proposal) -> np.ndarray:
        """g(toggle(x, p.site)) - g(x), computed from the site's neighborhood."""
        self.validate_state(x)
        if not 0 <= p.site < self.n_sites:
            raise InvalidInputError(f"site {p.site} out of range for {self.n_sites} sites")
        return self.change_stats_values(x.values, p.site)

    def change_stats_values(self, values: np.ndarray, site: int) -> np.ndarray:
        cur = int(values[site])
        delta = float(self.encoding.toggled(cur) - cur)
        dg = np.zeros(self.L)
        lo, hi = self._adj_indptr[site], self._adj_indptr[site + 1]
        if hi > lo:
            sl = slice(lo, hi)
            np.add.at(
                dg,
                self._adj_stat[sl],
                self._adj_weight[sl] * delta * values[self._adj_other[sl]],
            )
        lo, hi = self._nadj_indptr[site], self._nadj_indptr[site + 1]
        if hi > lo:
            sl = slice(lo, hi)
            np.add.at(dg, self._nadj_stat[sl], self._nadj_weight[sl] * delta)
        return dg

    def __repr__(self):
        return f"ModelSpec({self.name!r}, {self.encoding.value}, dims={self.dims}, L={self.L})"
