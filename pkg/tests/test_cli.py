"""CLI surface: flags, schemas, exit codes, determinism."""

import json

from hillband.cli import run_command


def run(capsys, *argv):
    code = run_command(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestInfo:
    def test_classification_json(self, capsys):
        code, out, _ = run(capsys, "info", "--n", "2,2,1,0")
        assert code == 0
        d = json.loads(out)
        assert d["case"] == "B" and d["g"] == 3 and d["m"] == 2
        assert d["dual"] == [3, 1, 0, 0]

    def test_condition_vector(self, capsys):
        code, out, _ = run(capsys, "info", "--n", "1,2,2,1")
        d = json.loads(out)
        assert d["c1"] is True and d["case"] == "none" and d["m"] is None


class TestDisc:
    def test_value(self, capsys):
        code, out, _ = run(capsys, "disc", "--n", "1,0,0,0", "--tau", "1.0",
                           "--E", "2,0")
        assert code == 0
        d = json.loads(out)
        assert abs(d["delta"][0] + 1.4053926432) < 1e-6
        assert d["det_defect"] < 1e-9


class TestQpolySpectrum:
    def test_qpoly_schema(self, capsys):
        code, out, _ = run(capsys, "qpoly", "--n", "1,0,0,0", "--tau", "1.0")
        assert code == 0
        d = json.loads(out)
        assert d["degree"] == 3
        assert d["coeffs"][0] == [1, 0]
        assert d["z_constancy"] <= 1e-9
        assert len(d["roots"]) == 3

    def test_round_trip_roots_match_spectrum(self, capsys):
        code, qout, _ = run(capsys, "qpoly", "--n", "2,2,1,0", "--tau", "1.0")
        code2, sout, _ = run(capsys, "spectrum", "--n", "2,2,1,0", "--tau", "1.0")
        assert code == 0 and code2 == 0
        qroots = json.loads(qout)["roots"]
        sroots = json.loads(sout)["roots"]
        assert qroots == sroots

    def test_spectrum_bands(self, capsys):
        _, out, _ = run(capsys, "spectrum", "--n", "1,0,0,0", "--tau", "1.0")
        d = json.loads(out)
        assert d["all_real_distinct"] is True
        assert len(d["bands"]) == 2
        assert d["bands"][0][0] is None

    def test_hidden_full_tau_flag(self, capsys):
        code, out, _ = run(capsys, "qpoly", "--n", "2,1,2,0",
                           "--tau-full", "0.0,0.5")
        assert code == 0
        d = json.loads(out)
        assert d["degree"] == 7

    def test_hidden_full_tau_off_axis(self, capsys):
        code, out, _ = run(capsys, "qpoly", "--n", "2,1,2,0",
                           "--tau-full", "0.3,1.1")
        assert code == 0
        d = json.loads(out)
        assert d["degree"] == 7 and d["tau_re"] == 0.3
        # general tau: coefficients genuinely complex
        assert any(abs(c[1]) > 1.0 for c in d["coeffs"])


class TestDeterminism:
    def test_byte_identical_runs(self, capsys):
        _, a, _ = run(capsys, "spectrum", "--n", "2,2,1,0", "--tau", "1.0")
        _, b, _ = run(capsys, "spectrum", "--n", "2,2,1,0", "--tau", "1.0")
        assert a == b

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "q.json"
        code, out, _ = run(capsys, "qpoly", "--n", "1,0,0,0", "--tau", "1.0",
                           "--out", str(path))
        assert code == 0 and out == ""
        assert json.loads(path.read_text())["degree"] == 3


class TestScan:
    def test_condition_vector_rows_flag_complex(self, capsys):
        code, out, _ = run(capsys, "scan", "--n", "1,2,2,1",
                           "--tau-list", "0.5,0.8,1.0,1.5")
        assert code == 0
        lines = out.strip().split("\n")
        header = lines[0].split(",")
        assert lines[0].startswith("tau_im,all_real_distinct,num_complex_pairs")
        assert len(lines) == 5
        for row in lines[1:]:
            vals = dict(zip(header, row.split(",")))
            assert vals["all_real_distinct"] == "false"
            assert int(vals["num_complex_pairs"]) >= 1

    def test_threads_env_same_output(self, capsys, monkeypatch):
        _, a, _ = run(capsys, "scan", "--n", "2,2,1,0", "--tau-list", "0.8,1.2")
        monkeypatch.setenv("HILLBAND_THREADS", "2")
        _, b, _ = run(capsys, "scan", "--n", "2,2,1,0", "--tau-list", "0.8,1.2")
        assert a == b


class TestArcs:
    def test_csv_header(self, capsys):
        code, out, _ = run(capsys, "arcs", "--n", "1,0,0,0", "--tau", "1.0",
                           "--window=-8,8,-0.5,0.5", "--res", "96")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "arc_id,re_E,im_E,re_Delta"
        assert len(lines) > 10


class TestVerifyCommand:
    def test_lame_exit_zero(self, capsys):
        code, out, _ = run(capsys, "verify", "--n", "1,0,0,0", "--tau", "1.0")
        assert code == 0
        d = json.loads(out)
        assert d["all_pass"] is True

    def test_exit_three_on_mismatch(self, capsys, monkeypatch):
        import hillband.cli as cli_mod

        def fake_verify(spec, settings=None):
            return {"all_pass": False, "thm11_consistent": False}

        monkeypatch.setattr(cli_mod, "verify_theorems", fake_verify)
        code, _, _ = run(capsys, "verify", "--n", "1,0,0,0", "--tau", "1.0")
        assert code == 3


class TestExitCodes:
    def test_usage_error_bad_n(self, capsys):
        code, _, err = run(capsys, "info", "--n", "1,2,3")
        assert code == 1 and "usage error" in err

    def test_usage_error_low_tau(self, capsys):
        code, _, err = run(capsys, "qpoly", "--n", "1,0,0,0", "--tau", "0.1")
        assert code == 1

    def test_numeric_failure(self, capsys):
        code, _, err = run(capsys, "qpoly", "--n", "9,0,0,0", "--tau", "1.0")
        assert code == 2 and "UnsupportedMultiplicity" in err

    def test_unknown_command(self, capsys):
        code, _, _ = run(capsys, "frobnicate")
        assert code == 1
