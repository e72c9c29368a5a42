"""Concrete model builders.

Sign convention: every statistic is defined exactly as the quantity that
multiplies its parameter in the exponent, e.g. the coupling statistic of an
Ising grid is -sum_<ij> s_i s_j.  Targets, estimators, and the enumeration
oracle all share the one definition, so the convention cancels in moment
equations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Encoding, ModelSpec
from .errors import InvalidInputError


def build_ising2d(
    rows: int, cols: int, include_field: bool = False, periodic: bool = False
) -> ModelSpec:
    """2D Ising model on a rows x cols grid with 4-neighbor bonds.

    Statistic 0 is the coupling -sum_<ij> s_i s_j over lattice bonds;
    with ``include_field`` statistic 1 is -sum_i s_i.  Boundaries are free
    by default; ``periodic`` adds wrap bonds along any direction of extent
    greater than two (a wrap bond across two sites would duplicate an
    existing bond).
    """
    if rows < 1 or cols < 1:
        raise InvalidInputError("grid dims must be at least 1x1")
    idx = lambda r, c: r * cols + c
    pair_terms = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                pair_terms.append((idx(r, c), idx(r, c + 1), 0, -1.0))
            if r + 1 < rows:
                pair_terms.append((idx(r, c), idx(r + 1, c), 0, -1.0))
    if periodic:
        if cols > 2:
            for r in range(rows):
                pair_terms.append((idx(r, cols - 1), idx(r, 0), 0, -1.0))
        if rows > 2:
            for c in range(cols):
                pair_terms.append((idx(rows - 1, c), idx(0, c), 0, -1.0))
    stat_names = ["coupling"]
    node_terms = []
    if include_field:
        stat_names.append("field")
        node_terms = [(k, 1, -1.0) for k in range(rows * cols)]
    return ModelSpec(
        f"ising2d_{rows}x{cols}",
        Encoding.SPIN,
        ("grid", rows, cols),
        stat_names,
        node_terms,
        pair_terms,
    )


def build_ising1d_periodic(n: int) -> ModelSpec:
    """1D periodic Ising chain with one free parameter per bond.

    Statistic b is -x_b x_{b+1 mod n}, so L equals n.
    """
    if n < 3:
        raise InvalidInputError("periodic chain needs at least 3 sites")
    pair_terms = [(b, (b + 1) % n, b, -1.0) for b in range(n)]
    stat_names = [f"bond_{b}_{(b + 1) % n}" for b in range(n)]
    return ModelSpec(
        f"ising1d_{n}", Encoding.SPIN, ("chain", n), stat_names, (), pair_terms
    )


def vbm_pair_index(n: int, i: int, j: int) -> int:
    """Flat index of pair (i, j), i < j, in row-major order over i < j."""
    if not 0 <= i < j < n:
        raise InvalidInputError(f"need 0 <= i < j < {n}, got ({i}, {j})")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def build_vbm(n: int) -> ModelSpec:
    """Fully visible Boltzmann machine: one statistic -x_i x_j per pair i < j."""
    if n < 2:
        raise InvalidInputError("Boltzmann machine needs at least 2 sites")
    pair_terms = []
    stat_names = []
    for i in range(n):
        for j in range(i + 1, n):
            pair_terms.append((i, j, vbm_pair_index(n, i, j), -1.0))
            stat_names.append(f"pair_{i}_{j}")
    return ModelSpec(f"vbm_{n}", Encoding.SPIN, ("chain", n), stat_names, (), pair_terms)


@dataclass(frozen=True)
class CrfFeatures:
    """Per-pixel and per-edge feature tables frozen from a noisy image y.

    Node features are [1, y_j]; edge features over 4-neighbor unordered
    edges are [1, |y_i - y_j|].
    """

    y: np.ndarray
    rows: int
    cols: int
    node_features: np.ndarray  # (n_pix, 2)
    edges: np.ndarray  # (n_edges, 2) site index pairs, i < j
    edge_features: np.ndarray  # (n_edges, 2)


def crf_features(y, rows: int, cols: int) -> CrfFeatures:
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.shape[0] != rows * cols:
        raise InvalidInputError(
            f"image with {y.shape[0]} pixels does not match {rows}x{cols}"
        )
    idx = lambda r, c: r * cols + c
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((idx(r, c), idx(r, c + 1)))
            if r + 1 < rows:
                edges.append((idx(r, c), idx(r + 1, c)))
    edges = np.array(edges, dtype=np.int64).reshape(-1, 2)
    node_features = np.column_stack([np.ones_like(y), y])
    gaps = np.abs(y[edges[:, 0]] - y[edges[:, 1]]) if edges.size else np.zeros(0)
    edge_features = np.column_stack([np.ones_like(gaps), gaps])
    return CrfFeatures(y, rows, cols, node_features, edges, edge_features)


def build_crf(y, rows: int, cols: int) -> ModelSpec:
    """Pairwise conditional random field for pixel labels given a noisy image.

    Parameters are [h1, h2, J1, J2] with statistics

        g_h1 = -sum_j x_j              g_h2 = -sum_j y_j x_j
        g_J1 = -sum_{i~j} x_i x_j      g_J2 = -sum_{i~j} |y_i - y_j| x_i x_j

    where i~j runs over unordered 4-neighbor pixel pairs.  The feature
    tables are frozen at construction, so the returned model is an
    unconditional exponential family over the label image x.
    """
    feats = crf_features(y, rows, cols)
    node_terms = []
    for j in range(rows * cols):
        node_terms.append((j, 0, -1.0))
        node_terms.append((j, 1, -feats.y[j]))
    pair_terms = []
    for (i, j), gap in zip(feats.edges, feats.edge_features[:, 1]):
        pair_terms.append((int(i), int(j), 2, -1.0))
        pair_terms.append((int(i), int(j), 3, -gap))
    model = ModelSpec(
        f"crf_{rows}x{cols}",
        Encoding.SPIN,
        ("grid", rows, cols),
        ["h1", "h2", "J1", "J2"],
        node_terms,
        pair_terms,
    )
    model.features = feats
    return model


def arc_index(n: int, i: int, j: int) -> int:
    """Flat index of directed arc i -> j in the length n*(n-1) tie vector.

    Layout is row-major over ordered pairs with the diagonal removed.
    """
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise InvalidInputError(f"need distinct node indices below {n}, got ({i}, {j})")
    return i * (n - 1) + (j if j < i else j - 1)


def arc_endpoints(n: int, index: int) -> tuple[int, int]:
    """Inverse of :func:`arc_index`."""
    if not 0 <= index < n * (n - 1):
        raise InvalidInputError(f"arc index {index} out of range")
    i, r = divmod(index, n - 1)
    j = r if r < i else r + 1
    return i, j


def build_mini_ergm(n: int) -> ModelSpec:
    """Directed-graph model with Arc and Mutual statistics over 0/1 ties.

    Arc counts present arcs, Mutual counts reciprocated pairs
    sum_{i<j} x_ij x_ji.  Toggling one arc changes both in O(1).
    """
    if n < 2:
        raise InvalidInputError("digraph model needs at least 2 nodes")
    node_terms = [(k, 0, 1.0) for k in range(n * (n - 1))]
    pair_terms = []
    for i in range(n):
        for j in range(i + 1, n):
            pair_terms.append((arc_index(n, i, j), arc_index(n, j, i), 1, 1.0))
    return ModelSpec(
        f"mini_ergm_{n}",
        Encoding.TIE,
        ("digraph", n),
        ["arc", "mutual"],
        node_terms,
        pair_terms,
    )
