import json
import re

import numpy as np
import pytest
from click.testing import CliRunner

from volterra_choquet.cli import EXIT_BAD_SPEC, EXIT_SUITE_FAILED, EXIT_TOLERANCE, cli, fmt9

runner = CliRunner()


def invoke(*args):
    return runner.invoke(cli, list(args))


def test_integrate_paper_value():
    result = invoke("integrate", "--f", "preset:one", "--capacity", "exp-saturation")
    assert result.exit_code == 0
    body = json.loads(result.output)
    assert body == {"value": 0.632120559, "error_estimate": 0.0}


def test_integrate_window():
    result = invoke(
        "integrate", "--f", "preset:one", "--capacity", "exp-saturation", "--on", "0,0.5"
    )
    assert result.exit_code == 0
    assert json.loads(result.output)["value"] == pytest.approx(1 - np.exp(-0.5), abs=1e-9)


def test_invalid_spec_exits_2_with_stderr_diagnostic():
    result = invoke("integrate", "--f", "preset:bogus", "--capacity", "exp-saturation")
    assert result.exit_code == EXIT_BAD_SPEC
    assert "bogus" in result.stderr
    result = invoke("integrate", "--f", "preset:one", "--capacity", '{"distortion": "power", "p": 7}')
    assert result.exit_code == EXIT_BAD_SPEC
    result = invoke("integrate", "--f", "not json at all", "--capacity", "exp-saturation")
    assert result.exit_code == EXIT_BAD_SPEC


def test_unconverged_tolerance_exits_3():
    result = invoke(
        "integrate", "--f", "preset:ramp", "--capacity", "power:0.5", "--tolerance", "1e-16"
    )
    assert result.exit_code == EXIT_TOLERANCE
    assert "tolerance" in result.stderr


def test_byte_identical_reruns():
    args = ("volterra", "--f", "preset:exp-gamma", "--capacity", "power:0.5", "--grid", "33")
    out1 = invoke(*args)
    out2 = invoke(*args)
    assert out1.exit_code == out2.exit_code == 0
    assert out1.output == out2.output
    header, first = out1.output.splitlines()[:2]
    assert header == "x,Vf"
    assert first == "0,0"


def test_orbit_closed_form_column():
    result = invoke("orbit", "--n", "1", "--capacity", "exp-saturation", "--grid", "9")
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0] == "x,orbit0,orbit1,closed1"
    for line in lines[1:]:
        x, _, orbit1, closed1 = line.split(",")
        assert orbit1 == closed1  # engine matches 1 - e^(-x) at print precision
        assert closed1 == fmt9(1 - np.exp(-float(x)))


def test_orbit_without_closed_forms():
    result = invoke("orbit", "--n", "1", "--capacity", "identity", "--grid", "5")
    assert result.output.splitlines()[0] == "x,orbit0,orbit1"


def test_norm_command():
    result = invoke("norm", "--f", "preset:one", "--p", "2", "--capacity", "exp-saturation")
    assert json.loads(result.output) == {"lp_norm": 0.795060098}


def test_opnorm_command():
    result = invoke("opnorm", "--grid", "128", "--iters", "60")
    body = json.loads(result.output)
    assert body["reference"] == 0.636619772
    assert abs(body["estimate"] - 2 / np.pi) <= 5e-3


def test_check_command_exit_codes():
    result = invoke("check", "--suite", "translation", "--seed", "1", "--samples", "10")
    assert result.exit_code == 0
    body = json.loads(result.output)
    assert body["ok"] is True
    # intentionally-failing suite exits 0 when violations are found as expected
    result = invoke("check", "--suite", "capacity-laws[t^2]", "--seed", "1", "--samples", "300")
    assert result.exit_code == 0
    assert json.loads(result.output)["violation_count"] >= 1
    result = invoke("check", "--suite", "unknown-suite", "--seed", "1", "--samples", "10")
    assert result.exit_code == EXIT_BAD_SPEC


def test_check_reports_deterministic_modulo_runtime():
    args = ("check", "--suite", "homogeneity", "--seed", "5", "--samples", "12")
    strip = lambda s: re.sub(r'"runtime_ms": [0-9.e+-]+', '"runtime_ms": X', s)  # noqa: E731
    assert strip(invoke(*args).output) == strip(invoke(*args).output)


def test_span_command(tmp_path):
    targets = tmp_path / "targets.json"
    targets.write_text(
        json.dumps(
            [
                {"name": "sq", "function": {"type": "preset", "name": "square", "n_nodes": 65}},
            ]
        )
    )
    result = invoke(
        "span", "--targets", str(targets), "--n-max", "3", "--capacity", "exp-saturation",
        "--grid", "65",
    )
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0] == "n,target,residual"
    assert lines[1].startswith("0,sq,")
    residuals = [float(line.split(",")[2]) for line in lines[1:]]
    assert residuals == sorted(residuals, reverse=True)


def test_span_missing_file_exits_2(tmp_path):
    result = invoke(
        "span", "--targets", str(tmp_path / "nope.json"), "--capacity", "exp-saturation"
    )
    assert result.exit_code == EXIT_BAD_SPEC


def test_function_spec_from_file(tmp_path):
    spec = tmp_path / "f.json"
    spec.write_text(json.dumps({"type": "step", "nodes": [0, 1 / 3, 2 / 3, 1], "values": [3, 1, 2]}))
    result = invoke("integrate", "--f", f"@{spec}", "--capacity", "power:0.5")
    assert result.exit_code == 0
    assert json.loads(result.output)["value"] == pytest.approx(
        1 + np.sqrt(2 / 3) + np.sqrt(1 / 3), abs=1e-8
    )


def test_main_entry_point():
    from volterra_choquet.cli import main

    assert main(["integrate", "--f", "preset:one", "--capacity", "identity"]) == 0
    assert main(["integrate", "--f", "preset:one"]) == EXIT_BAD_SPEC  # missing capacity
    assert main(["no-such-command"]) == EXIT_BAD_SPEC


def test_server_mode_round_trip(monkeypatch):
    # route the thin client's HTTP calls into the ASGI app in-process
    import httpx
    from fastapi.testclient import TestClient

    from volterra_choquet.service import app

    tc = TestClient(app)
    monkeypatch.setattr(
        httpx, "post", lambda url, json, timeout: tc.post(url.replace("http://svc", ""), json=json)
    )
    local = invoke("integrate", "--f", "preset:one", "--capacity", "exp-saturation")
    remote = invoke(
        "--server", "http://svc", "integrate", "--f", "preset:one", "--capacity", "exp-saturation"
    )
    assert remote.exit_code == 0
    assert remote.output == local.output
    # server-side rejections surface as spec errors
    bad = invoke("--server", "http://svc", "integrate", "--f", "preset:zzz", "--capacity", "identity")
    assert bad.exit_code == EXIT_BAD_SPEC
