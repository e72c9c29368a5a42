import numpy as np
import pytest

from eestim import BinaryState, build_mini_ergm
from eestim.cli import main
from eestim.io import read_state, write_digraph, write_state


def run(argv):
    return main([str(a) for a in argv])


class TestGenerate:
    def test_crf_dataset(self, tmp_path, capsys):
        out = tmp_path / "crf"
        assert run(["generate", "--model", "crf", "--out", out, "--rows", 8, "--cols", 8,
                    "--n-train", 2, "--n-test", 1]) == 0
        assert (out / "x_orig.txt").exists()
        assert (out / "train_01.txt").exists()
        assert (out / "test_00.txt").exists()

    def test_ising_image(self, tmp_path):
        out = tmp_path / "ising"
        assert run(["generate", "--model", "ising2d", "--out", out, "--rows", 3,
                    "--cols", 3, "--theta-star", 0.3]) == 0
        img = read_state(out / "image.txt")
        assert img.dims == ("grid", 3, 3)

    def test_vbm_small(self, tmp_path):
        out = tmp_path / "vbm"
        assert run(["generate", "--model", "vbm", "--out", out, "--n-sites", 6,
                    "--n-chains", 20, "--anneal-steps", 200]) == 0
        assert (out / "gbar.txt").exists()


class TestEstimateAndDiagnose:
    def test_estimate_then_diagnose_round_trip(self, tmp_path):
        img = BinaryState([1, 1, -1, 1, 1, 1, -1, 1, -1], "spin", ("grid", 3, 3))
        write_state(tmp_path / "img.txt", img)
        out = tmp_path / "fit"
        code = run(["estimate", "--model", "ising2d", "--in", tmp_path / "img.txt",
                    "--a", 0.001, "--c", 0.01, "--steps", 20000, "--seed", 4,
                    "--cd-steps", 300, "--out", out])
        assert code == 0
        assert (out / "trace.csv").exists()
        assert run(["diagnose", "--in", out / "trace.csv", "--tau", 0.1]) == 0

    def test_diagnose_failure_exit_code(self, tmp_path):
        # drifting discrepancies can never pass the ratio gate
        path = tmp_path / "trace.csv"
        rows = ["t,theta_1,d_1,accepted"]
        rows += [f"{t},{0.1 * t!r},{1.0 + 0.1 * t!r},1" for t in range(1, 21)]
        path.write_text("\n".join(rows) + "\n")
        assert run(["diagnose", "--in", path, "--burnin", 10]) == 4

    def test_missing_file_exit_code(self, tmp_path):
        assert run(["estimate", "--model", "ising2d", "--in", tmp_path / "nope.txt"]) == 2

    def test_malformed_file_exit_code(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("spin 2 2\n1 1 maybe 1\n")
        assert run(["estimate", "--model", "ising2d", "--in", bad]) == 2

    def test_divergent_estimation_exit_code(self, tmp_path):
        # an all-aligned image has its statistic on the hull boundary, so the
        # initializer walks the coupling out through the guard
        img = BinaryState([1, 1, 1, 1], "spin", ("grid", 2, 2))
        write_state(tmp_path / "img.txt", img)
        assert run(["estimate", "--model", "ising2d", "--in", tmp_path / "img.txt",
                    "--cd-a", 0.5, "--cd-steps", 100000, "--guard", 3.0,
                    "--a", 0.05, "--steps", 1000, "--seed", 1]) == 3


class TestExact:
    def setup_bond(self, tmp_path):
        write_state(tmp_path / "bond.txt", BinaryState([1, -1], "spin", ("grid", 1, 2)))
        return tmp_path / "bond.txt"

    def test_logz(self, tmp_path, capsys):
        path = self.setup_bond(tmp_path)
        assert run(["exact", "--op", "logz", "--model", "ising2d", "--in", path,
                    "--theta", "0.5"]) == 0
        out = capsys.readouterr().out
        z = 2 * np.exp(0.5) + 2 * np.exp(-0.5)
        assert float(out.split("= ")[1]) == pytest.approx(np.log(z), rel=1e-12)

    def test_mle_from_target(self, tmp_path, capsys):
        path = self.setup_bond(tmp_path)
        assert run(["exact", "--op", "mle", "--model", "ising2d", "--in", path,
                    "--target", "0.5"]) == 0
        printed = capsys.readouterr().out
        assert "theta_mle" in printed
        value = float(printed.split("theta_mle = ")[1].splitlines()[0])
        assert value == pytest.approx(np.arctanh(0.5), abs=1e-6)

    def test_boundary_mle_exit_code(self, tmp_path):
        path = self.setup_bond(tmp_path)
        assert run(["exact", "--op", "mle", "--model", "ising2d", "--in", path,
                    "--target", "1.0"]) == 3

    def test_sample_writes_states(self, tmp_path):
        path = self.setup_bond(tmp_path)
        out = tmp_path / "draws"
        assert run(["exact", "--op", "sample", "--model", "ising2d", "--in", path,
                    "--theta", "0.3", "--count", 3, "--out", out, "--seed", 8]) == 0
        assert (out / "sample_0002.txt").exists()

    def test_expectations(self, tmp_path, capsys):
        path = self.setup_bond(tmp_path)
        assert run(["exact", "--op", "expectations", "--model", "ising2d", "--in", path,
                    "--theta", "0.7"]) == 0
        value = float(capsys.readouterr().out.split("= ")[1])
        assert value == pytest.approx(np.tanh(0.7), abs=1e-12)


class TestExperimentCommand:
    def test_ergm_demo_with_graph_file(self, tmp_path, capsys):
        m = build_mini_ergm(4)
        values = np.zeros(12, dtype=np.int8)
        values[[0, 3, 5, 7, 10]] = 1  # arcs 0->1, 1->0, 1->3, 2->1, 3->2 (has a mutual pair)
        write_digraph(tmp_path / "g.txt", m.new_state(values))
        cfg = tmp_path / "run.cfg"
        cfg.write_text("cd_steps = 100\nee_steps = 2000\nee_burn = 1000\n")
        code = run(["experiment", "ergm", "--in", tmp_path / "g.txt", "--config", cfg,
                    "--out", tmp_path / "out"])
        assert code == 0
        assert (tmp_path / "out" / "trace.csv").exists()

    def test_degenerate_graph_exit_code(self, tmp_path):
        m = build_mini_ergm(4)
        write_digraph(tmp_path / "g.txt", m.new_state(np.zeros(12, dtype=np.int8)))
        assert run(["experiment", "ergm", "--in", tmp_path / "g.txt"]) == 3

    def test_unknown_config_key_exit_code(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("definitely_not_a_knob = 1\n")
        assert run(["experiment", "ergm", "--config", cfg]) == 2
