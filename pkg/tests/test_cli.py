"""End-to-end tests for the command-line front end.

Everything goes through ``main(argv)`` so the tests exercise the same
path as the installed ``sirmap`` script without spawning processes.
"""

import json
import math

import pytest

from sirmap.cli import PRESETS, main
from sirmap.equilibria import beta2_threshold, thresholds


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestDispatchAndErrors:
    def test_no_command_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_preset_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "analyze", "--preset", "nope")
        assert code == 2
        assert "unknown preset" in err

    def test_bad_model_parameter_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "analyze", "--K", "1.5")
        assert code == 2
        assert "error:" in err

    def test_scan_without_range_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "scan", "--param", "r")
        assert code == 2
        assert "--lo" in err

    def test_cycles_bad_n_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "cycles", "--n", "2")
        assert code == 2

    def test_missing_config_file_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "analyze", "--config", "/nonexistent/opts.cfg")
        assert code == 2

    def test_simulate_divergence_exits_three(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--r", "40", "--steps", "10")
        assert code == 3
        assert "escaped" in err

    def test_lyapunov_divergence_exits_three(self, capsys):
        code, _, err = run_cli(
            capsys, "lyapunov", "--r", "40", "--steps", "2000", "--transient", "0"
        )
        assert code == 3


class TestConfigPrecedence:
    def test_flags_beat_config_beat_preset(self, capsys, tmp_path):
        cfg = tmp_path / "opts.cfg"
        cfg.write_text("# comment line\nr = 2.2\n\ni0 = 0.05\n")
        base = ["analyze", "--preset", "endemic-focus", "--config", str(cfg)]

        doc = run_json(capsys, *base)
        assert doc["params"]["r"] == 2.2  # config overrides the preset's 1.8

        doc = run_json(capsys, *base, "--r", "2.5")
        assert doc["params"]["r"] == 2.5  # flag overrides the config

        doc = run_json(capsys, "analyze", "--preset", "endemic-focus")
        assert doc["params"]["r"] == 1.8

    def test_config_rejects_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "opts.cfg"
        cfg.write_text("growth = 2.0\n")
        code, _, err = run_cli(capsys, "analyze", "--config", str(cfg))
        assert code == 2
        assert "unknown option" in err

    def test_config_rejects_bare_line(self, capsys, tmp_path):
        cfg = tmp_path / "opts.cfg"
        cfg.write_text("just-a-word\n")
        code, _, err = run_cli(capsys, "analyze", "--config", str(cfg))
        assert code == 2
        assert "key=value" in err


class TestSimulate:
    def test_csv_shape_and_index(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--preset", "endemic-focus",
            "--transient", "5", "--steps", "4",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,S,I"
        assert len(lines) == 5
        first = lines[1].split(",")
        assert first[0] == "5"
        assert all(math.isfinite(float(c)) for c in first[1:])

    def test_deterministic_bytes(self, capsys):
        argv = ["simulate", "--preset", "locked-ten", "--transient", "100", "--steps", "20"]
        _, out1, _ = run_cli(capsys, *argv)
        _, out2, _ = run_cli(capsys, *argv)
        assert out1 == out2

    def test_out_file_matches_stdout(self, capsys, tmp_path):
        argv = ["simulate", "--preset", "three-cycle", "--transient", "50", "--steps", "6"]
        _, out, _ = run_cli(capsys, *argv)
        path = tmp_path / "orbit.csv"
        code, silent, _ = run_cli(capsys, *argv, "--out", str(path))
        assert code == 0
        assert silent == ""
        assert path.read_text() == out


class TestAnalyze:
    def test_endemic_focus_report(self, capsys):
        doc = run_json(capsys, "analyze", "--preset", "endemic-focus")
        assert doc["disease_free"]["stability"] == "saddle"
        en = doc["endemic"]
        assert en["stability"] == "stable focus"
        assert abs(en["location"][0] - 0.2) < 1.0e-12
        assert abs(en["location"][1] - 0.176) < 1.0e-12
        assert doc["thresholds"]["beta0"] < 3.0
        ra, rb = doc["reproduction_candidates"]
        assert ra > 1.0
        assert ra < rb
        assert doc["normal_form"] is None

    def test_flip_boundary_reports_coefficient(self, capsys):
        doc = run_json(capsys, "analyze", "--r", "3.0", "--beta", "0.5")
        nf = doc["normal_form"]
        assert nf["at"] == "disease_free"
        assert nf["kind"] == "flip"
        assert abs(nf["coefficient"] - 9.0) < 1.0e-9
        assert nf["branch_stable"] is True

    def test_ns_boundary_reports_coefficient(self, capsys):
        doc = run_json(capsys, "analyze", "--r", str(35.0 / 16.0), "--beta", "3.0")
        nf = doc["normal_form"]
        assert nf["at"] == "endemic"
        assert nf["kind"] == "ns"
        assert abs(nf["coefficient"] + 6.145222981770832) < 1.0e-9
        assert nf["branch_stable"] is True
        assert abs(nf["modulus_slope"] - 0.128125) < 1.0e-9

    def test_strong_resonance_reported_not_crashed(self, capsys):
        th = thresholds(2.0, 1.0, 0.5)
        b2 = beta2_threshold(th.r_max, 1.0, 0.5)
        doc = run_json(capsys, "analyze", "--r", str(th.r_max), "--beta", str(b2))
        nf = doc["normal_form"]
        assert nf["kind"] == "resonance"

    def test_subcritical_growth_has_no_thresholds(self, capsys):
        doc = run_json(capsys, "analyze", "--r", "0.8")
        assert doc["thresholds"] is None
        assert doc["endemic"] is None
        assert doc["reproduction_candidates"] is None


class TestScan:
    def test_csv_layout(self, capsys):
        code, out, _ = run_cli(
            capsys, "scan", "--param", "r", "--lo", "2.8", "--hi", "3.0",
            "--steps", "3", "--keep", "5", "--transient", "500",
            "--beta", "1.1",
        )
        assert code == 0
        lines = out.strip().splitlines()
        header = lines[0].split(",")
        assert header[:3] == ["r", "lyap_max", "escaped_at"]
        assert header[3:8] == ["S_1", "S_2", "S_3", "S_4", "S_5"]
        assert header[8:] == ["I_1", "I_2", "I_3", "I_4", "I_5"]
        assert len(lines) == 4
        for line in lines[1:]:
            cells = line.split(",")
            assert cells[2] == ""  # nothing escapes down here
            assert float(cells[1]) < 0.0

    def test_escaped_rows_flagged(self, capsys):
        code, out, _ = run_cli(
            capsys, "scan", "--param", "r", "--lo", "3.9", "--hi", "4.26",
            "--steps", "4", "--keep", "4", "--transient", "2000",
            "--beta", "1.1",
        )
        assert code == 0
        lines = out.strip().splitlines()
        last = lines[-1].split(",")
        assert last[2] != ""  # escape step recorded
        assert last[1] == "nan"
        first = lines[1].split(",")
        assert first[2] == ""
        assert float(first[1]) > 0.0

    def test_preset_supplies_range(self, capsys):
        code, out, _ = run_cli(
            capsys, "scan", "--preset", "flip-cascade-scan",
            "--steps", "3", "--keep", "3", "--transient", "200",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 4
        assert float(lines[1].split(",")[0]) == 2.8

    def test_deterministic_bytes(self, capsys):
        argv = [
            "scan", "--param", "beta", "--lo", "1.2", "--hi", "3.2",
            "--steps", "4", "--keep", "4", "--transient", "300",
        ]
        _, out1, _ = run_cli(capsys, *argv)
        _, out2, _ = run_cli(capsys, *argv)
        assert out1 == out2


class TestCycles:
    def test_three_cycle_json(self, capsys):
        doc = run_json(capsys, "cycles", "--n", "3")
        assert doc["n"] == 3
        assert len(doc["r_values"]) == 1
        assert abs(doc["r_values"][0] - (1.0 + 2.0 * math.sqrt(2.0))) < 1.0e-9

    def test_window_forwarded(self, capsys):
        doc = run_json(capsys, "cycles", "--n", "5", "--lo", "3.7", "--hi", "3.8")
        assert len(doc["r_values"]) == 1
        assert abs(doc["r_values"][0] - 3.7381723752726311) < 1.0e-8


class TestRegions:
    def test_triangle_probe_clean(self, capsys):
        doc = run_json(
            capsys, "regions", "--preset", "triangle-region",
            "--samples", "200", "--steps", "200",
        )
        assert doc["region"]["case"] == 1
        assert doc["escape_count"] == 0
        assert doc["escapes"] == []

    def test_leaky_region_reported_not_fatal(self, capsys):
        # this parameter set passes the shape conditions but the region
        # is not actually invariant; the CLI must report, not crash
        doc = run_json(
            capsys, "regions", "--preset", "curved-region",
            "--samples", "400", "--steps", "400",
        )
        assert doc["region"]["case"] == 3
        assert doc["escape_count"] > 0
        assert all(e["constraint"] == "I>nullcline" for e in doc["escapes"])

    def test_no_region_note(self, capsys):
        doc = run_json(capsys, "regions", "--r", "1.1", "--beta", "5.0", "--steps", "50")
        assert doc["region"] is None
        assert "note" in doc

    def test_seed_changes_starts_but_stays_deterministic(self, capsys):
        argv = ["regions", "--preset", "capped-region", "--samples", "100", "--steps", "100"]
        doc_a = run_json(capsys, *argv, "--seed", "7")
        doc_b = run_json(capsys, *argv, "--seed", "7")
        assert doc_a == doc_b
        assert doc_a["seed"] == 7


class TestLyapunov:
    def test_sink_exponents_json(self, capsys):
        doc = run_json(
            capsys, "lyapunov", "--preset", "endemic-focus",
            "--steps", "5000", "--transient", "2000",
        )
        assert doc["n"] == 5000
        assert doc["lambda_max"] < 0.0
        assert doc["lambda_min"] <= doc["lambda_max"]

    def test_axis_chaos_positive_exponent(self, capsys):
        doc = run_json(
            capsys, "lyapunov", "--preset", "axis-chaos",
            "--steps", "20000", "--transient", "1000",
        )
        assert abs(doc["lambda_max"] - math.log(2.0)) < 0.01


class TestPresetTable:
    def test_every_preset_resolves(self, capsys):
        # smoke: analyze accepts every orbit/region preset; scan presets
        # carry a sweep and go through scan instead
        for name, bundle in PRESETS.items():
            if "param" in bundle:
                code, _, err = run_cli(
                    capsys, "scan", "--preset", name,
                    "--steps", "2", "--keep", "2", "--transient", "50",
                )
            else:
                code, _, err = run_cli(capsys, "analyze", "--preset", name)
            assert code == 0, (name, err)
