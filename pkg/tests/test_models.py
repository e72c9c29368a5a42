import numpy as np
import pytest

from eestim import (
    EnumerationTable,
    InvalidInputError,
    Proposal,
    arc_endpoints,
    arc_index,
    build_crf,
    build_ising1d_periodic,
    build_ising2d,
    build_mini_ergm,
    build_vbm,
    crf_features,
    vbm_pair_index,
)

from conftest import rng


class TestIsing2d:
    def test_8x8_all_up(self):
        m = build_ising2d(8, 8)
        assert m.suff_stats(m.new_state(np.ones(64))).tolist() == [-112.0]

    def test_field_2x2(self):
        m = build_ising2d(2, 2, include_field=True)
        assert m.suff_stats(m.new_state([1, 1, 1, 1])).tolist() == [-4.0, -4.0]

    def test_checkerboard(self):
        m = build_ising2d(2, 2)
        assert m.suff_stats(m.new_state([1, -1, -1, 1])).tolist() == [4.0]

    def test_periodic_adds_wrap_bonds(self):
        free = build_ising2d(3, 3)
        wrap = build_ising2d(3, 3, periodic=True)
        x = np.ones(9, dtype=np.int8)
        assert free.suff_stats(free.new_state(x)).tolist() == [-12.0]
        assert wrap.suff_stats(wrap.new_state(x)).tolist() == [-18.0]

    def test_periodic_skips_duplicate_bonds_on_two_wide(self):
        # wrap across a 2-extent direction would double existing bonds
        m = build_ising2d(2, 2, periodic=True)
        assert m.suff_stats(m.new_state([1, 1, 1, 1])).tolist() == [-4.0]

    def test_bad_dims(self):
        with pytest.raises(InvalidInputError):
            build_ising2d(0, 3)


class TestIsing1d:
    def test_n15_all_up(self):
        m = build_ising1d_periodic(15)
        g = m.suff_stats(m.new_state(np.ones(15)))
        assert g.shape == (15,)
        assert np.all(g == -1.0)

    def test_n3_flip_site0(self):
        m = build_ising1d_periodic(3)
        g = m.suff_stats(m.new_state([-1, 1, 1]))
        assert g.tolist() == [1.0, -1.0, 1.0]

    def test_alternating_n4(self):
        m = build_ising1d_periodic(4)
        g = m.suff_stats(m.new_state([1, -1, 1, -1]))
        assert np.all(g == 1.0)

    def test_min_size(self):
        with pytest.raises(InvalidInputError):
            build_ising1d_periodic(2)


class TestVbm:
    def test_n15_has_105_stats(self):
        assert build_vbm(15).L == 105

    def test_all_up(self):
        m = build_vbm(3)
        assert m.suff_stats(m.new_state([1, 1, 1])).tolist() == [-1.0, -1.0, -1.0]

    def test_flip_first_site(self):
        m = build_vbm(3)
        g = m.suff_stats(m.new_state([-1, 1, 1]))
        # pairs (0,1), (0,2) flip sign, (1,2) stays
        assert g.tolist() == [1.0, 1.0, -1.0]

    def test_pair_index_round_trip(self):
        n = 7
        seen = set()
        for i in range(n):
            for j in range(i + 1, n):
                seen.add(vbm_pair_index(n, i, j))
        assert seen == set(range(n * (n - 1) // 2))
        with pytest.raises(InvalidInputError):
            vbm_pair_index(5, 3, 3)

    def test_nearest_neighbor_vbm_matches_chain_likelihood(self):
        """Pinning all non-adjacent couplings to zero reproduces the
        periodic chain's exact likelihood, bond for bond."""
        n = 8
        chain = build_ising1d_periodic(n)
        vbm = build_vbm(n)
        gen = rng(3)
        theta_1d = gen.normal(size=n)
        theta_vbm = np.zeros(vbm.L)
        for b in range(n):
            i, j = b, (b + 1) % n
            theta_vbm[vbm_pair_index(n, min(i, j), max(i, j))] = theta_1d[b]
        t_chain = EnumerationTable(chain)
        t_vbm = EnumerationTable(vbm)
        assert t_chain.log_partition(theta_1d) == pytest.approx(
            t_vbm.log_partition(theta_vbm), abs=1e-12
        )
        for _ in range(5):
            x = chain.random_state(gen)
            ll_chain = t_chain.log_likelihood(theta_1d, chain.suff_stats(x))
            ll_vbm = t_vbm.log_likelihood(theta_vbm, vbm.suff_stats(vbm.new_state(x.values)))
            assert ll_chain == pytest.approx(ll_vbm, abs=1e-12)


class TestCrf:
    def test_two_pixel_example(self):
        m = build_crf([1.0, -1.0], 1, 2)
        assert m.suff_stats(m.new_state([1, 1])).tolist() == [-2.0, 0.0, -1.0, -2.0]

    def test_zero_image_kills_feature_stats(self):
        m = build_crf(np.zeros((3, 3)), 3, 3)
        gen = rng(4)
        for _ in range(5):
            x = m.random_state(gen)
            g = m.suff_stats(x)
            assert g[1] == 0.0 and g[3] == 0.0

    def test_interior_flip_moves_h1_by_two(self):
        m = build_crf(rng(5).standard_normal((3, 3)), 3, 3)
        x = m.random_state(rng(6))
        dg = m.change_stats(x, Proposal(4, 1 / 9, 1 / 9))
        assert abs(dg[0]) == 2.0

    def test_feature_linearity(self):
        """Doubling y doubles the feature statistics and leaves the others."""
        y = rng(7).standard_normal((4, 4))
        x_vals = build_crf(y, 4, 4).random_state(rng(8)).values
        g1 = build_crf(y, 4, 4).suff_stats_values(x_vals)
        g2 = build_crf(2.0 * y, 4, 4).suff_stats_values(x_vals)
        assert g2[0] == g1[0] and g2[2] == g1[2]
        assert g2[1] == 2.0 * g1[1] and g2[3] == 2.0 * g1[3]

    def test_features_table(self):
        f = crf_features([0.0, 3.0], 1, 2)
        assert f.node_features.tolist() == [[1.0, 0.0], [1.0, 3.0]]
        assert f.edges.tolist() == [[0, 1]]
        assert f.edge_features.tolist() == [[1.0, 3.0]]

    def test_dims_mismatch(self):
        with pytest.raises(InvalidInputError):
            build_crf(np.zeros(5), 2, 3)


class TestMiniErgm:
    def test_empty_graph(self):
        m = build_mini_ergm(3)
        assert m.suff_stats(m.new_state(np.zeros(6))).tolist() == [0.0, 0.0]

    def test_complete_graph(self):
        m = build_mini_ergm(3)
        assert m.suff_stats(m.new_state(np.ones(6))).tolist() == [6.0, 3.0]

    def test_toggle_sequence_builds_mutual(self):
        m = build_mini_ergm(3)
        x = m.new_state(np.zeros(6))
        p01 = Proposal(arc_index(3, 0, 1), 1 / 6, 1 / 6)
        dg = m.change_stats(x, p01)
        assert dg.tolist() == [1.0, 0.0]
        x.values[arc_index(3, 0, 1)] = 1
        p10 = Proposal(arc_index(3, 1, 0), 1 / 6, 1 / 6)
        assert m.change_stats(x, p10).tolist() == [1.0, 1.0]

    def test_arc_index_round_trip(self):
        n = 6
        for idx in range(n * (n - 1)):
            i, j = arc_endpoints(n, idx)
            assert arc_index(n, i, j) == idx
        with pytest.raises(InvalidInputError):
            arc_index(4, 1, 1)
        with pytest.raises(InvalidInputError):
            arc_endpoints(4, 12)
