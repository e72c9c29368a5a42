"""Numba-compiled inner loops for single-site Metropolis-Hastings.

Proposals are symmetric uniform site toggles, so the log acceptance ratio is
theta . delta_g, assembled term-by-term from the model's adjacency tables
without materializing the full change vector.  Realized changes of accepted
moves are added into ``dg_accum``; with ``perform_moves`` false the state is
left untouched (accept-test-only sweeps).

The site index and uniform draw for step t are ``sites[t]`` and ``us[t]``;
callers own the RNG so that draw order is an explicit, replayable contract.
"""

import numpy as np
from numba import njit

# Log-ratio clamp before exponentiation; min{1, e^r} is exact for r >= 0.
LOG_RATIO_CLAMP = 700.0


@njit(cache=True, nogil=True)
def advance_chain(
    values,
    sites,
    us,
    theta,
    adj_indptr,
    adj_other,
    adj_stat,
    adj_weight,
    nadj_indptr,
    nadj_stat,
    nadj_weight,
    spin,
    perform_moves,
    dg_accum,
):
    accepted = 0
    for t in range(sites.shape[0]):
        k = sites[t]
        cur = values[k]
        if spin:
            new = -cur
        else:
            new = 1 - cur
        delta = float(new - cur)
        logr = 0.0
        for idx in range(adj_indptr[k], adj_indptr[k + 1]):
            logr += adj_weight[idx] * delta * values[adj_other[idx]] * theta[adj_stat[idx]]
        for idx in range(nadj_indptr[k], nadj_indptr[k + 1]):
            logr += nadj_weight[idx] * delta * theta[nadj_stat[idx]]
        if logr >= 0.0 or us[t] < np.exp(max(logr, -LOG_RATIO_CLAMP)):
            accepted += 1
            for idx in range(adj_indptr[k], adj_indptr[k + 1]):
                dg_accum[adj_stat[idx]] += adj_weight[idx] * delta * values[adj_other[idx]]
            for idx in range(nadj_indptr[k], nadj_indptr[k + 1]):
                dg_accum[nadj_stat[idx]] += nadj_weight[idx] * delta
            if perform_moves:
                values[k] = new
    return accepted


@njit(cache=True, nogil=True)
def advance_ensemble(
    values2d,
    sites2d,
    us2d,
    theta,
    adj_indptr,
    adj_other,
    adj_stat,
    adj_weight,
    nadj_indptr,
    nadj_stat,
    nadj_weight,
    spin,
    perform_moves,
    dg_accum2d,
    accepted_out,
):
    for c in range(values2d.shape[0]):
        accepted_out[c] += advance_chain(
            values2d[c],
            sites2d[c],
            us2d[c],
            theta,
            adj_indptr,
            adj_other,
            adj_stat,
            adj_weight,
            nadj_indptr,
            nadj_stat,
            nadj_weight,
            spin,
            perform_moves,
            dg_accum2d[c],
        )
