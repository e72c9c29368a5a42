import numpy as np
import pytest

from eestim import BinaryState, InvalidInputError, NonexistenceError, RngStream, build_vbm
from eestim.experiments import (
    CrfExperimentConfig,
    ErgmDemoConfig,
    IsingExperimentConfig,
    classification_error,
    generate_crf_dataset,
    generate_vbm_dataset,
    run_crf_experiment,
    run_ergm_demo,
    run_ising_experiment,
    x_shape_image,
)
from eestim.io import read_digraph, read_state, read_trace


def stream(seed, k=0):
    return RngStream(seed, k).generator()


class TestXShapeImage:
    def test_reflection_symmetries(self):
        img = x_shape_image(40, 40)
        assert np.array_equal(img, img.T)
        assert np.array_equal(img, img[::-1, ::-1].T.T[::-1, ::-1])  # anti-transpose
        assert np.array_equal(img, np.rot90(np.rot90(img).T, -1).T.T)

    def test_anti_transpose_symmetry(self):
        img = x_shape_image(40, 40)
        anti = img[::-1, ::-1].T
        assert np.array_equal(img, anti)

    def test_corner_on_anti_diagonal(self):
        img = x_shape_image(40, 40)
        assert img[0, 39] == 1
        assert img[0, 0] == 1  # main diagonal
        assert img[0, 20] == -1

    def test_minimum_size(self):
        with pytest.raises(InvalidInputError):
            x_shape_image(4, 4)


class TestCrfDataset:
    def test_zero_noise_reproduces_image(self):
        ds = generate_crf_dataset(stream(1), 8, 8, 3, 2, noise_sd=0.0)
        for y in ds.train_y + ds.test_y:
            assert np.array_equal(y, x_shape_image(8, 8).astype(float))

    def test_counts_and_dims(self):
        ds = generate_crf_dataset(stream(2), 10, 12, 4, 3)
        assert len(ds.train_y) == 4 and len(ds.test_y) == 3
        assert ds.x_orig.dims == ("grid", 10, 12)
        assert ds.train_y[0].shape == (10, 12)

    def test_deterministic(self):
        a = generate_crf_dataset(stream(3), 8, 8, 2, 2)
        b = generate_crf_dataset(stream(3), 8, 8, 2, 2)
        assert np.array_equal(a.train_y[1], b.train_y[1])


class TestClassificationError:
    def test_perfect_labels(self):
        ds = generate_crf_dataset(stream(4), 8, 8, 1, 1)
        assert classification_error([ds.x_orig], ds.x_orig) == 0.0

    def test_all_flipped(self):
        ds = generate_crf_dataset(stream(5), 8, 8, 1, 1)
        flipped = BinaryState(-ds.x_orig.values, "spin", ds.x_orig.dims)
        assert classification_error([flipped], ds.x_orig) == 1.0

    def test_fraction(self):
        ds = generate_crf_dataset(stream(6), 40, 40, 1, 1)
        wrong = ds.x_orig.copy()
        wrong.values[:160] = -wrong.values[:160]
        assert classification_error([wrong], ds.x_orig) == pytest.approx(0.1)

    def test_dims_mismatch(self):
        ds = generate_crf_dataset(stream(7), 8, 8, 1, 1)
        other = BinaryState(np.ones(16, dtype=np.int8), "spin", ("grid", 4, 4))
        with pytest.raises(InvalidInputError):
            classification_error([other], ds.x_orig)

    def test_empty_rejected(self):
        ds = generate_crf_dataset(stream(8), 8, 8, 1, 1)
        with pytest.raises(InvalidInputError):
            classification_error([], ds.x_orig)


class TestVbmDataset:
    def test_bit_reproducible(self):
        a = generate_vbm_dataset(stream(9), 8, 50, 2000)
        b = generate_vbm_dataset(stream(9), 8, 50, 2000)
        assert np.array_equal(a.theta_star, b.theta_star)
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.g_bar, b.g_bar)

    def test_zero_couplings_give_centered_stats(self):
        n_chains = 400
        model = build_vbm(8)
        ds = generate_vbm_dataset(
            stream(10), 8, n_chains, 500, theta_star=np.zeros(model.L)
        )
        # each pair statistic is a mean of n_chains fair +-1 products
        assert np.max(np.abs(ds.g_bar)) <= 4 / np.sqrt(n_chains)

    def test_shapes(self):
        ds = generate_vbm_dataset(stream(11), 6, 20, 100)
        assert ds.states.shape == (20, 6)
        assert ds.g_bar.shape == (15,)


class TestIsingExperimentSmall:
    def test_synthetic_run_shapes_and_outputs(self, tmp_path):
        cfg = IsingExperimentConfig(
            seed=5,
            cd_steps=300,
            t_max=20_000,
            t_burn=10_000,
            out_dir=str(tmp_path / "out"),
        )
        res = run_ising_experiment(cfg)
        assert len(res.trace) == cfg.t_max
        assert res.synthetic and res.oracle_mle is not None
        back = read_trace(tmp_path / "out" / "trace.csv")
        assert np.array_equal(back.theta, res.trace.theta)
        x_back = read_state(tmp_path / "out" / "x_obs.txt")
        assert np.array_equal(x_back.values, res.x_obs.values)
        assert (tmp_path / "out" / "report.txt").exists()
        assert (tmp_path / "out" / "summary.txt").exists()

    def test_missing_image_file_rejected(self):
        with pytest.raises(InvalidInputError):
            run_ising_experiment(IsingExperimentConfig(image_path="/nonexistent/img.txt"))

    def test_image_file_run(self, tmp_path):
        # a 3x3 image with mixed bonds keeps the statistic off the hull
        from eestim.io import write_state

        img = BinaryState([1, 1, -1, 1, 1, 1, -1, 1, -1], "spin", ("grid", 3, 3))
        path = tmp_path / "img.txt"
        write_state(path, img)
        cfg = IsingExperimentConfig(
            image_path=str(path), cd_steps=200, t_max=4000, t_burn=2000
        )
        res = run_ising_experiment(cfg)
        assert not res.synthetic
        assert res.oracle_mle is None
        assert len(res.trace) == 4000


class TestErgmDemoSmall:
    def test_empty_graph_is_degenerate(self, tmp_path):
        from eestim.io import write_digraph
        from eestim.models import build_mini_ergm

        m = build_mini_ergm(5)
        empty = m.new_state(np.zeros(20, dtype=np.int8))
        path = tmp_path / "graph.txt"
        write_digraph(path, empty)
        with pytest.raises(NonexistenceError):
            run_ergm_demo(ErgmDemoConfig(graph_path=str(path)))

    def test_complete_graph_is_degenerate(self, tmp_path):
        from eestim.io import write_digraph
        from eestim.models import build_mini_ergm

        m = build_mini_ergm(4)
        full = m.new_state(np.ones(12, dtype=np.int8))
        path = tmp_path / "graph.txt"
        write_digraph(path, full)
        with pytest.raises(NonexistenceError):
            run_ergm_demo(ErgmDemoConfig(graph_path=str(path)))

    def test_small_demo_outputs(self, tmp_path):
        cfg = ErgmDemoConfig(
            seed=3,
            n_nodes=4,
            gen_exact=True,
            cd_steps=200,
            ee_steps=5000,
            ee_burn=2500,
            out_dir=str(tmp_path / "out"),
        )
        res = run_ergm_demo(cfg)
        assert res.oracle_mle is not None
        graph_back = read_digraph(tmp_path / "out" / "graph.txt")
        assert np.array_equal(graph_back.values, res.x_obs.values)
        assert (tmp_path / "out" / "summary.txt").exists()


class TestCrfExperimentSmall:
    def test_small_run_curve_and_outputs(self, tmp_path):
        cfg = CrfExperimentConfig(
            seed=2,
            rows=8,
            cols=8,
            n_train=3,
            n_test=2,
            cd_steps=200,
            ee_phases=((0.01, 150), (0.001, 150)),
            ee_burn=200,
            anneal_steps=100,
            eval_every=10,
            out_dir=str(tmp_path / "out"),
        )
        res = run_crf_experiment(cfg)
        assert res.error_steps[0] == 0
        assert res.error_steps[-1] == 200 + 300
        assert np.all((res.error_curve >= 0) & (res.error_curve <= 1))
        assert len(res.trace_cd) == 200 and len(res.trace_ee) == 300
        assert (tmp_path / "out" / "error_curve.csv").exists()
        assert (tmp_path / "out" / "train_00.txt").exists()
        back = read_trace(tmp_path / "out" / "trace_ee.csv")
        assert np.array_equal(back.theta, res.trace_ee.theta)

    def test_cd_final_error_is_on_curve(self):
        cfg = CrfExperimentConfig(
            seed=3,
            rows=8,
            cols=8,
            n_train=2,
            n_test=2,
            cd_steps=57,
            ee_phases=((0.01, 40),),
            ee_burn=20,
            anneal_steps=50,
            eval_every=10,
        )
        res = run_crf_experiment(cfg)
        # evaluation lands on the phase boundary even off the cadence
        assert 57 in res.error_steps.tolist()
