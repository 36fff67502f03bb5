import json
import math

import pytest

from lossyphase.cli import EXIT_GUARD, EXIT_OK, EXIT_USAGE, main, parse_angle


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParseAngle:
    def test_tokens(self):
        assert parse_angle("pi/4") == pytest.approx(math.pi / 4.0, abs=0.0)
        assert parse_angle("pi") == pytest.approx(math.pi, abs=0.0)
        assert parse_angle("3*pi/2") == pytest.approx(1.5 * math.pi, abs=1e-15)
        assert parse_angle("-pi/2") == pytest.approx(-math.pi / 2.0, abs=1e-15)

    def test_float_literal(self):
        assert parse_angle("0.7853981633974483") == 0.7853981633974483

    def test_garbage_rejected(self):
        with pytest.raises(ValueError):
            parse_angle("about pi")


class TestStatePrep:
    def test_fidelity_one(self, capsys):
        code, out, _ = run(capsys, "state-prep", "--chi", "1.7", "--half-n", "1")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["result"]["forward_fidelity"] >= 1.0 - 1e-10
        assert doc["version"].startswith("lossyphase ")
        assert "wall_time_ms" in doc

    def test_four_photon_chi_zero(self, capsys):
        # chi = 0 at n = 2 keeps the |2,2> component (amplitude 2/sqrt(6)
        # before normalization); only the n = 1 member of the family is NOON.
        code, out, _ = run(capsys, "state-prep", "--chi", "0", "--half-n", "2")
        assert code == EXIT_OK
        amps = json.loads(out)["result"]["amplitudes_re"]
        ref = [1.0, 0.0, 2.0 / math.sqrt(6.0), 0.0, 1.0]
        norm = math.sqrt(sum(a * a for a in ref))
        for got, want in zip(amps, ref):
            assert got == pytest.approx(want / norm, abs=1e-12)

    def test_out_of_range_chi_exits_2(self, capsys):
        code, _, err = run(capsys, "state-prep", "--chi", "3")
        assert code == EXIT_USAGE
        assert "chi" in err


class TestProbs:
    def test_table_schema(self, capsys):
        code, out, _ = run(capsys, "probs", "--n-photons", "2", "--chi", "1.7",
                           "--eta", "0.6")
        assert code == EXIT_OK
        doc = json.loads(out)["result"]
        assert doc["n_photons"] == 2 and doc["eta"] == 0.6
        assert len(doc["entries"]) == 6
        assert set(doc["entries"][0]) == {"L", "k", "re", "im"}


class TestFisherScan:
    def test_header_and_argmax(self, capsys):
        code, out, _ = run(
            capsys, "fisher-scan", "--n-photons", "2", "--eta", "0.6",
            "--phi", "pi/2", "--theta", "0", "--chi-min", "0",
            "--chi-max", "2", "--chi-step", "0.02",
        )
        assert code == EXIT_OK
        lines = [l for l in out.strip().split("\n") if not l.startswith("#")]
        assert lines[0] == "chi,fisher"
        rows = [(float(a), float(b)) for a, b in
                (line.split(",") for line in lines[1:])]
        assert len(rows) == 101
        best_chi = max(rows, key=lambda r: r[1])[0]
        assert 0.7 <= best_chi <= 0.9

    def test_divergent_point_becomes_nan_row(self, capsys):
        phi = repr(math.pi / 2.0 + 1e-7)
        code, out, err = run(
            capsys, "fisher-scan", "--n-photons", "2", "--eta", "1.0",
            "--phi", phi, "--theta", "0", "--chi-min", "0",
            "--chi-max", "0", "--chi-step", "0.02",
        )
        assert code == EXIT_OK
        assert "warning" in err
        assert out.strip().split("\n")[-1] == "0,nan"

    def test_degenerate_single_row(self, capsys):
        code, out, _ = run(
            capsys, "fisher-scan", "--n-photons", "2", "--eta", "0.6",
            "--phi", "1.0", "--theta", "0", "--chi-min", "0.5",
            "--chi-max", "0.6", "--chi-step", "5.0",
        )
        assert code == EXIT_OK
        lines = [l for l in out.strip().split("\n") if not l.startswith("#")]
        assert len(lines) == 2


class TestEvaluate:
    def test_exact_single_photon(self, capsys):
        code, out, _ = run(capsys, "evaluate", "--n1", "1", "--eta", "0.6",
                           "--method", "exact")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["result"]["mu"] == pytest.approx(0.3, abs=1e-12)
        assert doc["config"]["method"] == "exact"

    def test_speedup_regression_fixture(self, capsys):
        # (7,1) at chi2 = 1.7, eta = 0.6: the variance-sweep minimum;
        # value pinned after first computation.
        code, out, _ = run(capsys, "evaluate", "--n1", "7", "--n2", "1",
                           "--chi2", "1.7", "--eta", "0.6",
                           "--method", "speedup")
        assert code == EXIT_OK
        doc = json.loads(out)["result"]
        assert doc["holevo_variance"] == pytest.approx(
            0.2963458477377132, abs=1e-9
        )
        assert doc["branches_evaluated"] == (2 ** 8 - 1) * 6

    def test_branch_guard_exits_3(self, capsys):
        code, _, err = run(
            capsys, "evaluate", "--n1", "2", "--n2", "2", "--chi2", "1.8",
            "--n4", "6", "--chi4", "1.3", "--eta", "0.6", "--method", "exact",
        )
        assert code == EXIT_GUARD
        assert "guard" in err

    def test_mc_is_seeded(self, capsys):
        argv = ("evaluate", "--n1", "1", "--eta", "0.6", "--method", "mc",
                "--trials", "2000", "--seed", "9")
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        a, b = json.loads(out1), json.loads(out2)
        assert a["result"]["mu"] == b["result"]["mu"]
        assert a["seed"] == 9


class TestOptimize:
    def test_tiny_instance(self, capsys):
        code, out, _ = run(capsys, "optimize", "--n", "3", "--eta", "1.0",
                           "--chi-step", "0.5")
        assert code == EXIT_OK
        doc = json.loads(out)["result"]
        assert doc["best_variance"] <= doc["sql_baseline"] + 1e-12

    def test_csv_format(self, capsys):
        code, out, _ = run(capsys, "--format", "csv", "optimize", "--n", "2",
                           "--eta", "0.9", "--chi-step", "1.0")
        assert code == EXIT_OK
        lines = [l for l in out.strip().split("\n") if not l.startswith("#")]
        assert lines[0] == "n1,n2,chi2,n4,chi4,eta,mu,holevo_variance,branches,method"


class TestConfigFile:
    def test_flags_override_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"n1": 1, "eta": 0.3, "method": "exact"}))
        code, out, _ = run(capsys, "--config", str(cfg), "evaluate",
                           "--eta", "0.6")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["config"]["eta"] == 0.6      # flag wins
        assert doc["config"]["n1"] == 1         # config fills the rest
        assert doc["result"]["mu"] == pytest.approx(0.3, abs=1e-12)

    def test_missing_config_exits_2(self, capsys):
        code, _, err = run(capsys, "--config", "/nonexistent.json",
                           "evaluate", "--eta", "0.6")
        assert code == EXIT_USAGE

    def test_output_file(self, capsys, tmp_path):
        out_path = tmp_path / "artifact.json"
        code, _, _ = run(capsys, "--output", str(out_path), "evaluate",
                         "--n1", "1", "--eta", "0.6", "--method", "exact")
        assert code == EXIT_OK
        doc = json.loads(out_path.read_text())
        assert doc["result"]["mu"] == pytest.approx(0.3, abs=1e-12)


def test_missing_required_parameter(capsys):
    code, _, err = run(capsys, "probs", "--chi", "1.0", "--eta", "0.5")
    assert code == EXIT_USAGE
    assert "n-photons" in err
