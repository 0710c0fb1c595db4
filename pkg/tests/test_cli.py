import json
import subprocess
import sys

import pytest

from siegeltheta.cli import RunConfig, build_parser, main
from siegeltheta.identities import REGISTRY


def run_main(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gopel_lists_fifteen_lines(capsys):
    code, out, _ = run_main(capsys, "gopel", "--genus", "2")
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln.strip()]
    assert len(lines) == 15
    assert "00 01 02 03" in lines


def test_eval_json_shape(capsys):
    code, out, _ = run_main(
        capsys, "eval", "--char", "(0;0)", "--tau", "[[[0,1]]]"
    )
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"value", "grad", "hess", "tail_bound"}
    assert abs(payload["value"][0] - 1.0864348112133080) < 1e-12
    assert payload["value"][1] == 0.0


def test_eval_with_z_and_genus2_label(capsys):
    code, out, _ = run_main(
        capsys,
        "eval",
        "--char",
        "20",
        "--tau",
        '[[[0.1,1.0],[0.0,0.1]],[[0.0,0.1],[0.0,1.2]]]',
        "--z",
        "[[0.05,0.0],[0.0,0.02]]",
    )
    assert code == 0
    payload = json.loads(out)
    assert len(payload["grad"]) == 2


def test_verify_single_identity_exit_zero(capsys, tmp_path):
    out_path = tmp_path / "report.json"
    code, out, _ = run_main(
        capsys,
        "verify",
        "genus2_quadratic",
        "--genus",
        "2",
        "--samples",
        "2",
        "--seed",
        "5",
        "--json",
        str(out_path),
    )
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["overall"] == "pass"
    assert [c["name"] for c in payload["checks"]] == ["genus2_quadratic"]
    assert "genus2_quadratic" in out and "pass" in out


def test_verify_unknown_identity_exits_2(capsys):
    code, _, err = run_main(capsys, "verify", "not_an_identity", "--samples", "1")
    assert code == 2
    assert "unknown" in err


def test_verify_wrong_genus_exits_2(capsys):
    code, _, err = run_main(capsys, "verify", "gopel_quartet", "--genus", "1", "--samples", "1")
    assert code == 2


def test_verify_failure_exit_one(capsys):
    code, out, _ = run_main(
        capsys, "verify", "genus2_quartic", "--samples", "1", "--tol", "1e-30"
    )
    assert code == 1
    assert "fail" in out


def test_verify_report_byte_identical_modulo_timing(capsys, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code, _, _ = run_main(
            capsys,
            "verify",
            "genus2_eta_explicit",
            "--samples",
            "2",
            "--seed",
            "9",
            "--json",
            str(p),
        )
        assert code == 0
    a = json.loads(paths[0].read_text())
    b = json.loads(paths[1].read_text())
    a.pop("timing")
    b.pop("timing")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_report_rendering(capsys, tmp_path):
    out_path = tmp_path / "r.json"
    run_main(capsys, "verify", "genus2_quadratic", "--samples", "1", "--json", str(out_path))
    code, out, _ = run_main(capsys, "report", str(out_path))
    assert code == 0
    assert "overall: pass" in out


def test_formal_chi(capsys):
    code, out, _ = run_main(capsys, "formal", "chi")
    assert code == 0
    assert "zero polynomial" in out


def test_formal_gopel_sum(capsys):
    code, out, _ = run_main(capsys, "formal", "gopel-sum")
    assert code == 0


def test_halphen_integrate(capsys):
    code, out, _ = run_main(
        capsys, "halphen", "integrate", "--from", "0+1i", "--to", "0+2i", "--steps", "500"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["endpoint_error_vs_theta"] < 1e-9


def test_halphen_check(capsys):
    code, out, _ = run_main(capsys, "halphen", "check", "--samples", "5", "--seed", "2")
    assert code == 0
    assert json.loads(out)["max_rel_residual"] < 1e-9


def test_fourier_command_with_crosscheck(capsys):
    code, out, _ = run_main(
        capsys, "fourier", "--char", "(0;0)", "--order", "40", "--tau", "[[[0,2]]]"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["coefficients"][0]["coeff"] == 1
    assert payload["crosscheck"]["within_bounds"] is True


def test_runconfig_validation():
    with pytest.raises(ValueError):
        RunConfig(genus=4)
    with pytest.raises(ValueError):
        RunConfig(samples=0)
    with pytest.raises(KeyError):
        RunConfig(identities=["nope"])
    cfg = RunConfig(identities=["second_order_system"])
    assert cfg.to_json()["identities"] == ["second_order_system"]


def test_registry_names_usable_from_parser():
    parser = build_parser()
    args = parser.parse_args(["verify", "all", "--genus", "2"])
    assert args.identity == "all"
    for name in REGISTRY:
        parser.parse_args(["verify", name])


def test_module_entrypoint_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "siegeltheta", "gopel"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 15


def test_verify_all_runs_full_registry(capsys, tmp_path):
    out_path = tmp_path / "all.json"
    code, out, _ = run_main(
        capsys,
        "verify",
        "all",
        "--genus",
        "2",
        "--samples",
        "1",
        "--seed",
        "7",
        "--json",
        str(out_path),
    )
    assert code == 0
    payload = json.loads(out_path.read_text())
    names = [c["name"] for c in payload["checks"]]
    assert len(names) >= 12
    assert names == [n for n in REGISTRY if 2 in REGISTRY[n].genera]
    assert payload["overall"] == "pass"
    assert set(payload["timing"]["wall_times"]) == set(names)


def test_workers_pool_matches_serial(capsys, tmp_path):
    serial = tmp_path / "serial.json"
    pooled = tmp_path / "pooled.json"
    for path, workers in ((serial, "1"), (pooled, "2")):
        code, _, _ = run_main(
            capsys,
            "verify",
            "genus2_quartic",
            "--samples",
            "2",
            "--seed",
            "4",
            "--json",
            str(path),
            "--workers",
            workers,
        )
        assert code == 0
    a = json.loads(serial.read_text())
    b = json.loads(pooled.read_text())
    assert a["checks"] == b["checks"]
