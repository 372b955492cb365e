import json

import pytest

from groupwalk.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_growth_csv(capsys):
    code, out, _ = run_cli(capsys, "growth", "--group", "Z:10", "--gens", "0,1,-1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# groupwalk")
    assert lines[1].startswith("# config:")
    assert "diameter=5" in lines[1]
    assert lines[2].startswith("# seed:")
    assert lines[3] == "m,volume,ball_fraction,modgrowth_lhs,modgrowth_rhs"
    assert len(lines) == 4 + 5  # header block + one row per radius


def test_walk_mix_json(capsys):
    code, out, _ = run_cli(capsys, "walk", "mix", "--group", "Z:3", "--law", "lazy",
                           "--metric", "tv", "--clock", "discrete", "--eps", "0.1")
    assert code == 0
    body = json.loads(out)
    assert body["mixing_time"] == 2


def test_walk_curve_csv_columns(capsys):
    code, out, _ = run_cli(capsys, "walk", "curve", "--group", "Z:5", "--steps", "0..6")
    assert code == 0
    header = [l for l in out.splitlines() if not l.startswith("#")][0]
    assert header == "clock,time,tv,hellinger,tv_upper_bound,tv_lower_bound"


def test_product_curve_csv(capsys):
    code, out, _ = run_cli(capsys, "product", "curve", "--factors", "Z:3,Z:5",
                           "--weights", "0.5,0.5", "--times", "0.5,2")
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0] == ("t,hellinger_exact,tv_lower,tv_upper,lemmaA1_lower,"
                        "lemmaA1_upper,oracle_available,oracle_value")
    assert len(lines) == 3
    assert lines[1].split(",")[6] == "true"


def test_laplace_tau_json(capsys):
    code, out, _ = run_cli(capsys, "laplace", "tau", "--a", "1,1,1",
                           "--lam", "1,2,3", "--c", "1.5")
    assert code == 0
    body = json.loads(out)
    assert body["j"] == 2 and abs(body["tau_c"] - 0.5493061443340549) < 1e-12


def test_verify_named_suite(capsys):
    code, out, _ = run_cli(capsys, "verify", "sandwich", "--group", "Z:7",
                           "--steps", "0..20")
    assert code == 0
    assert "sandwich: PASS" in out


def test_verify_single_check(capsys):
    code, out, _ = run_cli(capsys, "verify", "laplace")
    assert code == 0
    assert "laplace-criterion: PASS" in out


def test_verify_unknown_suite_fails(capsys):
    code, _, err = run_cli(capsys, "verify", "nonsense")
    assert code == 1


def test_invalid_group_exit_code(capsys):
    code, _, err = run_cli(capsys, "growth", "--group", "Q:9")
    assert code == 1
    assert "error" in err


def test_unknown_flag_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["growth", "--group", "Z:5", "--bogus"])
    assert exc.value.code == 1


def test_family_scan_outputs(tmp_path, capsys):
    spec = tmp_path / "family.cfg"
    spec.write_text("kind = GP\nrecipe = lazy-cycle\nweight_rule = constant:c=1\n"
                    "n_range = 1..16\n")
    base = str(tmp_path / "scan")
    code, _, _ = run_cli(capsys, "family", "scan", "--spec", str(spec),
                         "--output", base)
    assert code == 0
    csv_doc = (tmp_path / "scan.csv").read_text()
    assert csv_doc.splitlines()[3].startswith("n,log_q,log_t,log_l1,stat")
    summary = json.loads((tmp_path / "scan.json").read_text())
    assert summary["verdict"] in ("growing", "bounded", "inconclusive")
    assert "thresholds" in summary


def test_experiment_heisenberg_files(tmp_path, capsys):
    base = str(tmp_path / "heis")
    code, _, _ = run_cli(capsys, "experiment", "heisenberg", "--gamma", "1.5",
                         "--n-max", "30", "--output", base)
    assert code == 0
    summary = json.loads((tmp_path / "heis.json").read_text())
    assert summary["verdict"] == "bounded"
    csv_doc = (tmp_path / "heis.csv").read_text()
    assert "n,log_q,log_t,log_l1,stat,verdict" in csv_doc


def test_experiment_randomized_stdout_json(capsys):
    code, out, _ = run_cli(capsys, "experiment", "randomized", "--mode", "exp",
                           "--dist", "uniform(1,3)", "--trials", "3",
                           "--n-max", "60", "--format", "json")
    assert code == 0
    body = json.loads(out)
    assert body["fractions"]["bounded"] == 1.0


def test_byte_identical_reruns(tmp_path, capsys):
    args = ["experiment", "randomized", "--mode", "exp", "--dist", "uniform(1,3)",
            "--trials", "3", "--n-max", "60", "--seed", "7"]
    outputs = []
    for name in ("a", "b"):
        base = str(tmp_path / name)
        code, _, _ = run_cli(capsys, *args, "--output", base)
        assert code == 0
        outputs.append((tmp_path / f"{name}.csv").read_bytes()
                       + (tmp_path / f"{name}.json").read_bytes())
    assert outputs[0] == outputs[1]


def test_config_file_overrides_flags(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("eps = 0.5\n")
    code, out, _ = run_cli(capsys, "walk", "mix", "--group", "Z:3", "--eps", "0.1",
                           "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["eps"] == 0.5


def test_progress_goes_to_stderr_only(capsys):
    code, out, err = run_cli(capsys, "experiment", "heisenberg", "--gamma", "1.5",
                             "--n-max", "20", "--progress", "--format", "json")
    assert code == 0
    assert "heisenberg experiment" in err
    json.loads(out)  # stdout stays pure data


def test_group_info_json(capsys):
    code, out, _ = run_cli(capsys, "group", "--group", "P:Z:2,Z:3")
    assert code == 0
    body = json.loads(out)
    assert body["order"] == 6


def test_failed_verify_returns_2(capsys, monkeypatch):
    # the verify command imports verify_all at call time, so patch the module
    from groupwalk import verify as verify_mod
    from groupwalk.verify import CheckResult, VerifyReport

    def broken(seed=42, only=None):
        return VerifyReport((CheckResult("demo", "fail", "synthetic failure"),), seed)

    monkeypatch.setattr(verify_mod, "verify_all", broken)
    code, out, _ = run_cli(capsys, "verify")
    assert code == 2
    assert "demo: FAIL" in out


def test_factor_cache_env_round_trip(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("GROUPWALK_CACHE_DIR", str(tmp_path))
    args = ["product", "curve", "--factors", "Z:3,Z:5", "--weights", "0.5,0.5",
            "--times", "1.0"]
    code, first, _ = run_cli(capsys, *args)
    assert code == 0
    assert (tmp_path / "factor_curves.json").exists()
    code, second, _ = run_cli(capsys, *args)
    assert code == 0
    assert first == second
