import numpy as np
import pytest

from eestim import (
    Encoding,
    EnumerationSizeError,
    EnumerationTable,
    InvalidInputError,
    ModelSpec,
    NonexistenceError,
    build_ising1d_periodic,
    build_ising2d,
    build_mini_ergm,
    build_vbm,
    exact_expectations,
    exact_mle,
    exact_sample,
    log_likelihood,
    partition_function,
    theorem1_residual,
    transition_matrix,
)

from conftest import rng


def bond_model():
    return build_ising2d(1, 2)


def field_model():
    """One spin with a single statistic -s, so Z = 2 cosh(theta)."""
    return ModelSpec("one_spin_field", Encoding.SPIN, ("chain", 1), ["field"], [(0, 0, -1.0)])


class TestPartitionFunction:
    def test_zero_theta_counts_states(self):
        m = build_vbm(15)
        assert partition_function(m, np.zeros(m.L)) == pytest.approx(15 * np.log(2), rel=1e-12)

    def test_single_spin_field(self):
        assert partition_function(field_model(), [0.7]) == pytest.approx(
            np.log(2 * np.cosh(0.7)), rel=1e-12
        )

    def test_two_spin_bond(self):
        z = 2 * np.exp(0.5) + 2 * np.exp(-0.5)
        assert partition_function(bond_model(), [0.5]) == pytest.approx(np.log(z), rel=1e-12)

    def test_size_cap(self):
        with pytest.raises(EnumerationSizeError):
            EnumerationTable(build_ising2d(5, 5))

    def test_extreme_theta_stays_finite(self):
        assert np.isfinite(partition_function(bond_model(), [600.0]))


class TestLogLikelihood:
    def test_zero_theta_uniform(self):
        m = build_vbm(15)
        x = m.new_state(np.ones(15))
        assert log_likelihood(m, np.zeros(m.L), x) == pytest.approx(-15 * np.log(2), rel=1e-12)

    def test_zero_theta_any_size(self):
        for n in (2, 5, 9):
            m = build_vbm(n)
            x = m.random_state(rng(n))
            assert log_likelihood(m, np.zeros(m.L), x) == pytest.approx(
                -n * np.log(2), rel=1e-12
            )

    def test_two_spin_formula(self):
        m = bond_model()
        expected = -0.5 - np.log(2 * np.exp(0.5) + 2 * np.exp(-0.5))
        assert log_likelihood(m, [0.5], np.array([-1.0])) == pytest.approx(expected, rel=1e-12)

    def test_many_matches_singles(self):
        m = build_ising1d_periodic(5)
        table = EnumerationTable(m)
        gen = rng(1)
        thetas = gen.normal(size=(7, m.L))
        target = gen.normal(size=m.L)
        many = table.log_likelihood_many(thetas, target)
        singles = [table.log_likelihood(t, target) for t in thetas]
        np.testing.assert_allclose(many, singles, rtol=1e-12)


class TestExpectations:
    def test_spin_symmetry_at_zero(self):
        m = build_ising2d(2, 2)
        assert np.all(exact_expectations(m, [0.0]) == 0.0)

    def test_two_spin_tanh(self):
        for theta in (-1.2, -0.3, 0.0, 0.7, 2.0):
            mu = exact_expectations(bond_model(), [theta])
            assert mu[0] == pytest.approx(np.tanh(theta), abs=1e-12)

    def test_fair_coin_arcs(self):
        n = 4
        m = build_mini_ergm(n)
        mu = exact_expectations(m, np.zeros(2))
        assert mu[0] == pytest.approx(n * (n - 1) / 2, rel=1e-12)
        assert mu[1] == pytest.approx(n * (n - 1) / 2 / 4, rel=1e-12)

    def test_gradient_matches_finite_differences(self):
        """d logZ / d theta equals the exact moments (checked centrally)."""
        m = build_ising1d_periodic(4)
        table = EnumerationTable(m)
        gen = rng(2)
        h = 1e-5
        for _ in range(10):
            theta = gen.normal(size=m.L)
            mu = table.expectations(theta)
            for i in range(m.L):
                e = np.zeros(m.L)
                e[i] = h
                fd = (table.log_partition(theta + e) - table.log_partition(theta - e)) / (2 * h)
                assert fd == pytest.approx(mu[i], rel=1e-6, abs=1e-9)

    def test_concavity_along_random_lines(self):
        """Second central differences of the log-likelihood never exceed
        rounding noise above zero."""
        m = build_vbm(4)
        table = EnumerationTable(m)
        gen = rng(3)
        target = table.expectations(gen.normal(size=m.L) * 0.3)
        h = 1e-3
        for _ in range(20):
            theta = gen.normal(size=m.L)
            direction = gen.normal(size=m.L)
            direction /= np.linalg.norm(direction)
            ll = [
                table.log_likelihood(theta + s * h * direction, target) for s in (-1, 0, 1)
            ]
            second = (ll[0] - 2 * ll[1] + ll[2]) / h**2
            assert second <= 1e-10


class TestExactMle:
    def test_moment_match_at_origin(self):
        m = build_ising1d_periodic(4)
        table = EnumerationTable(m)
        target = table.expectations(np.zeros(m.L))
        assert np.max(np.abs(table.mle(target))) < 1e-8

    def test_two_spin_closed_form(self):
        theta = exact_mle(bond_model(), [0.5])
        assert theta[0] == pytest.approx(np.arctanh(0.5), abs=1e-6)

    def test_boundary_target_raises(self):
        with pytest.raises(NonexistenceError):
            exact_mle(bond_model(), [-1.0])

    def test_moment_residual_within_tolerance(self):
        m = build_vbm(5)
        table = EnumerationTable(m)
        gen = rng(4)
        target = table.expectations(gen.normal(size=m.L) * 0.5)
        theta = table.mle(target)
        assert np.max(np.abs(target - table.expectations(theta))) < 1e-8

    def test_start_invariance(self):
        m = build_ising1d_periodic(5)
        table = EnumerationTable(m)
        gen = rng(5)
        target = table.expectations(gen.normal(size=m.L) * 0.4)
        a = table.mle(target)
        b = table.mle(target, theta0=gen.normal(size=m.L))
        assert np.max(np.abs(a - b)) < 1e-6

    def test_gradient_method_agrees_on_small_model(self):
        m = bond_model()
        table = EnumerationTable(m)
        a = table.mle([0.3])
        b = table.mle([0.3], method="gradient")
        assert a[0] == pytest.approx(b[0], abs=1e-7)


class TestExactSample:
    def test_zero_count(self):
        assert exact_sample(rng(6), bond_model(), [0.0], 0) == []

    def test_uniform_histogram_chi_square(self):
        m = build_vbm(3)  # 8 states
        draws = 100_000
        states = exact_sample(rng(7), m, np.zeros(m.L), draws)
        codes = [int(((s.values > 0) * (1 << np.arange(3))).sum()) for s in states]
        counts = np.bincount(codes, minlength=8)
        expected = draws / 8
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        df = 7
        assert chi2 < df + 4 * np.sqrt(2 * df)

    def test_point_mass_limit_frequency(self):
        m = bond_model()
        theta = [6.0]  # strongly favors the two anti-aligned states
        table = EnumerationTable(m)
        pi = table.probabilities(theta)
        top = int(np.argmax(pi))
        draws = 20_000
        states = table.sample(rng(8), theta, draws)
        codes = [int(((s.values > 0) * (1 << np.arange(2))).sum()) for s in states]
        freq = np.bincount(codes, minlength=4)[top] / draws
        se = np.sqrt(pi[top] * (1 - pi[top]) / draws)
        assert abs(freq - pi[top]) < 3 * se

    def test_states_carry_model_shape(self):
        m = build_mini_ergm(3)
        s = exact_sample(rng(9), m, np.zeros(2), 1)[0]
        assert s.encoding is Encoding.TIE
        assert s.dims == ("digraph", 3)


class TestTheorem1Residual:
    def test_zero_theta(self):
        assert theorem1_residual(build_ising2d(2, 2), [0.0]) < 1e-12

    def test_random_theta_four_spins(self):
        gen = rng(10)
        m = build_ising2d(2, 2, include_field=True)
        for _ in range(5):
            assert theorem1_residual(m, gen.normal(size=2)) < 1e-10

    def test_two_spin_hand_built_kernel(self):
        """The 4-state single-flip chain assembled by hand: acceptance
        min(1, e^(theta*dg)) at flip probability 1/2 per site."""
        theta = 0.7
        m = bond_model()
        states = [np.array(v, dtype=np.int8) for v in ([-1, -1], [1, -1], [-1, 1], [1, 1])]
        g = np.array([-s[0] * s[1] for s in states], dtype=np.float64)
        P = np.zeros((4, 4))
        for a in range(4):
            for site in (0, 1):
                b = a ^ (1 << site)
                alpha = min(1.0, np.exp(theta * (g[b] - g[a])))
                P[a, b] = 0.5 * alpha
            P[a, a] = 1.0 - P[a].sum()
        np.testing.assert_allclose(P, transition_matrix(m, [theta]), atol=1e-15)
        w = np.exp(theta * g)
        pi = w / w.sum()
        drift = pi @ (P @ g - g)
        assert abs(drift) < 1e-12
        assert theorem1_residual(m, [theta]) < 1e-12

    def test_kernel_size_cap(self):
        with pytest.raises(EnumerationSizeError):
            theorem1_residual(build_vbm(13), np.zeros(build_vbm(13).L))


class TestStatRanges:
    def test_bond_model_ranges(self):
        lo, hi = EnumerationTable(bond_model()).stat_ranges()
        assert lo.tolist() == [-1.0] and hi.tolist() == [1.0]

    def test_ergm_ranges(self):
        lo, hi = EnumerationTable(build_mini_ergm(3)).stat_ranges()
        assert lo.tolist() == [0.0, 0.0]
        assert hi.tolist() == [6.0, 3.0]


class TestTargetValidation:
    def test_bad_target_shape(self):
        with pytest.raises(InvalidInputError):
            log_likelihood(bond_model(), [0.1], [0.5, 0.2])

    def test_bad_theta_shape(self):
        with pytest.raises(InvalidInputError):
            partition_function(bond_model(), [0.1, 0.2])
