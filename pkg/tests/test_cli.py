import json

import pytest

from obtri.cli import EXIT_INVARIANT, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestBound:
    def test_json_output(self, capsys):
        code, out, _ = run(["bound", "--dim", "2", "--n-max", "5000"], capsys)
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["manifest"]["subcommand"] == "bound"
        assert payload["result"]["lower_bound"] == pytest.approx(1 / 3, abs=1e-3)
        assert payload["result"]["monotone"] is True

    def test_csv_output(self, capsys):
        code, out, _ = run(["bound", "--dim", "3", "--n-max", "100",
                            "--format", "csv"], capsys)
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0].startswith("d,n,t_n,")
        assert lines[-1].startswith("# manifest:")

    def test_bad_dim_usage_error(self, capsys):
        code, _, err = run(["bound", "--dim", "1", "--n-max", "100"], capsys)
        assert code == EXIT_USAGE
        assert "error" in err

    def test_file_output(self, tmp_path, capsys):
        path = tmp_path / "bound.json"
        code, _, _ = run(["bound", "--dim", "2", "--n-max", "100",
                          "--output", str(path)], capsys)
        assert code == EXIT_OK
        assert json.loads(path.read_text())["result"]["base_n"] == 4


class TestTable:
    def test_csv_rows(self, capsys):
        code, out, _ = run(["table", "--dims", "4..6", "--n-max", "2000"], capsys)
        assert code == EXIT_OK
        lines = [ln for ln in out.strip().splitlines() if not ln.startswith("#")]
        assert lines[0] == "d,base_n,n_max,lower_bound,asymptotic,naive"
        assert len(lines) == 4
        assert lines[1].startswith("4,16,2000,")

    def test_bad_range(self, capsys):
        with pytest.raises(SystemExit) as err:
            run(["table", "--dims", "8..4"], capsys)
        assert err.value.code == EXIT_USAGE


class TestSphere:
    def test_quadrature_only(self, capsys):
        code, out, _ = run(["sphere", "--dim", "3"], capsys)
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["result"]["quadrature"] == pytest.approx(0.5, abs=1e-8)
        assert payload["result"]["mc"] is None

    def test_with_mc(self, capsys):
        code, out, _ = run(["sphere", "--dim", "2", "--mc-samples", "20000",
                            "--seed", "5"], capsys)
        payload = json.loads(out)
        assert code == EXIT_OK
        assert payload["manifest"]["seed"] == 5
        mc = payload["result"]["mc"]
        assert abs(mc["p_hat"] - 0.75) < 0.02

    def test_entropy_seed_recorded(self, capsys):
        code, out, _ = run(["sphere", "--dim", "2", "--mc-samples", "1000"], capsys)
        payload = json.loads(out)
        assert payload["manifest"]["seed"] is not None


class TestMc:
    def write_spec(self, tmp_path, obj):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(obj))
        return str(path)

    def test_single_arc_probability_one(self, tmp_path, capsys):
        spec = self.write_spec(tmp_path, {"kind": "single_arc",
                                          "params": {"arc_angle": 0.4}})
        code, out, _ = run(["mc", "--spec", spec, "--samples", "5000",
                            "--seed", "9"], capsys)
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["result"]["p_hat"] == 1.0

    def test_worker_determinism(self, tmp_path, capsys):
        spec = self.write_spec(tmp_path, {"kind": "sphere", "params": {"d": 3}})
        counts = []
        for workers in ("1", "4", "16"):
            code, out, _ = run(["mc", "--spec", spec, "--samples", "100000",
                                "--seed", "77", "--workers", workers], capsys)
            assert code == EXIT_OK
            counts.append(json.dumps(json.loads(out)["result"]["counts"]))
        assert counts[0] == counts[1] == counts[2]

    def test_csv_append(self, tmp_path, capsys):
        spec = self.write_spec(tmp_path, {"kind": "sphere", "params": {"d": 2}})
        sweep = tmp_path / "sweep.csv"
        for seed in ("1", "2"):
            run(["mc", "--spec", spec, "--samples", "2000", "--seed", seed,
                 "--append-csv", str(sweep)], capsys)
        assert len(sweep.read_text().strip().splitlines()) == 2

    def test_missing_spec_file(self, capsys):
        code, _, err = run(["mc", "--spec", "/nonexistent.json",
                            "--samples", "10", "--seed", "1"], capsys)
        assert code == EXIT_USAGE


class TestFixedpoint:
    def test_optimize(self, capsys):
        code, out, _ = run(["fixedpoint"], capsys)
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["result"]["p"] == pytest.approx(0.8051875, abs=1e-6)
        assert payload["result"]["obtuse"] == pytest.approx(0.326097, abs=1e-6)

    def test_scan(self, capsys):
        code, out, _ = run(["fixedpoint", "--scan", "--scan-points", "9"], capsys)
        assert code == EXIT_OK
        lines = [ln for ln in out.strip().splitlines() if not ln.startswith("#")]
        assert lines[0] == "p,acute,obtuse"
        assert len(lines) == 10


class TestSearch:
    def test_search_json(self, capsys):
        code, out, _ = run(["search", "--n", "4", "--dim", "2", "--iterations",
                            "500", "--restarts", "1", "--seed", "3"], capsys)
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["result"]["bound"] == 1
        assert payload["result"]["best_count"] >= 1

    def test_invariant_violation_exit_code(self, capsys, monkeypatch):
        import obtri.cli as cli_mod
        from obtri.search import InvariantViolation

        def fake_search(params):
            raise InvariantViolation("count 0 below bound 1")

        monkeypatch.setattr(cli_mod, "search_min", fake_search)
        code, _, err = run(["search", "--n", "4", "--dim", "2", "--seed", "1"], capsys)
        assert code == EXIT_INVARIANT
        assert "invariant" in err


class TestSelfSimilar:
    def test_report_fields(self, capsys):
        code, out, _ = run(["selfsimilar", "--p", "0.8051875",
                            "--samples", "20000", "--seed", "4"], capsys)
        assert code == EXIT_OK
        payload = json.loads(out)
        assert abs(payload["result"]["obtuse_hat"] - 0.326) < 0.05
        assert payload["result"]["tail_mass"] < 1e-9


class TestNumericalFailureExit:
    def test_exit_three(self, capsys, monkeypatch):
        import obtri.cli as cli_mod
        from obtri.specfun import NumericalError

        def fake_quad(d, tol):
            raise NumericalError("no convergence", context={"d": d})

        monkeypatch.setattr(cli_mod, "obtuse_prob_sphere", fake_quad)
        code, _, err = run(["sphere", "--dim", "3"], capsys)
        assert code == EXIT_NUMERICAL
        assert "numerical failure" in err


class TestReplay:
    def test_replay_mc(self, tmp_path, capsys):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"kind": "sphere", "params": {"d": 2}}))
        first = tmp_path / "first.json"
        code, _, _ = run(["mc", "--spec", str(spec), "--samples", "5000",
                          "--seed", "42", "--output", str(first)], capsys)
        assert code == EXIT_OK
        manifest = tmp_path / "first.json"
        replay_spec = tmp_path / "replayed_spec.json"
        second = tmp_path / "second.json"
        code, _, _ = run(["replay", "--manifest", str(manifest),
                          "--spec", str(replay_spec), "--output", str(second)], capsys)
        assert code == EXIT_OK
        a = json.loads(first.read_text())["result"]["counts"]
        b = json.loads(second.read_text())["result"]["counts"]
        assert a == b


class TestWorkersEnv:
    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("OBTRI_WORKERS", "4")
        from obtri.cli import _default_workers
        assert _default_workers() == 4

    def test_env_garbage_falls_back(self, monkeypatch):
        monkeypatch.setenv("OBTRI_WORKERS", "lots")
        from obtri.cli import _default_workers
        assert _default_workers() == 1


class TestReplaySearch:
    def test_replay_search_bit_identical(self, tmp_path, capsys):
        first = tmp_path / "first.json"
        code, _, _ = run(["search", "--n", "5", "--dim", "2", "--iterations",
                          "400", "--restarts", "2", "--seed", "31",
                          "--output", str(first)], capsys)
        assert code == EXIT_OK
        second = tmp_path / "second.json"
        code, _, _ = run(["replay", "--manifest", str(first),
                          "--output", str(second)], capsys)
        assert code == EXIT_OK
        a = json.loads(first.read_text())["result"]
        b = json.loads(second.read_text())["result"]
        assert a["points"] == b["points"]
        assert a["best_count"] == b["best_count"]
