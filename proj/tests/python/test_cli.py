"""End-to-end checks of the opcert command-line tool."""

import json
import os
import subprocess

import pytest

CLI = os.environ.get("OPCERT_CLI")

pytestmark = pytest.mark.skipif(not CLI, reason="OPCERT_CLI not set")


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("OPSPACE_SEED", None)
    if env:
        full_env.update(env)
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=full_env, timeout=600)


@pytest.fixture()
def emit(tmp_path):
    def _emit(name, *extra):
        path = tmp_path / f"{name}.json"
        proc = run("catalog", "emit", name, "--out", str(path), *extra)
        assert proc.returncode == 0, proc.stderr
        return path

    return _emit


def test_catalog_list():
    proc = run("catalog", "list")
    assert proc.returncode == 0
    names = [line.split()[0] for line in proc.stdout.splitlines() if line.strip()]
    for name in ["m2-full", "m2-upper", "m2-sym3", "circle-1zzbar", "circle-1z", "two-circles"]:
        assert name in names


def test_two_circle_file_shape(emit):
    data = json.loads(emit("two-circles").read_text())
    assert data["format"] == "opcert-space/1"
    assert data["kind"] == "function"
    assert data["points"] == 720
    assert len(data["basis"]) == 4


def test_unitary_passes(emit):
    proc = run("check", "unitary", str(emit("m2-full")), "--format", "json")
    assert proc.returncode == 0, proc.stdout + proc.stderr
    report = json.loads(proc.stdout)
    assert report["format"] == "opcert-report/1"
    assert report["exit_code"] == 0
    assert report["report"]["verdict"] == "pass"


def test_non_unitary_element_fails(emit):
    proc = run("check", "unitary", str(emit("m2-full")), "--element", "1,0,0,0.5", "--level", "1")
    assert proc.returncode == 1


def test_system_fails_on_upper_triangular(emit):
    proc = run("check", "system", str(emit("m2-upper")))
    assert proc.returncode == 1


def test_missing_unit_is_an_input_error(tmp_path):
    path = tmp_path / "nounit.json"
    path.write_text(
        json.dumps(
            {
                "format": "opcert-space/1",
                "kind": "matrix",
                "rows": 1,
                "cols": 1,
                "basis": [[[[1, 0]]]],
            }
        )
    )
    proc = run("check", "unitary", str(path))
    assert proc.returncode == 3
    assert "unit" in proc.stderr


def test_malformed_file_is_an_input_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{ not json")
    assert run("check", "unitary", str(path)).returncode == 3


def test_involution_recovery(emit):
    proc = run("recover", "involution", str(emit("m2-full")), "--x", "0,1,0,0", "--format", "json")
    assert proc.returncode == 0, proc.stdout + proc.stderr
    report = json.loads(proc.stdout)
    vectors = report["vectors"]
    recovered = vectors["recovered"] if isinstance(vectors, dict) else dict(vectors)["recovered"]
    assert abs(recovered[2][0] - 1.0) < 0.02


def test_reports_are_deterministic(emit, tmp_path):
    space = str(emit("m2-sym3"))
    outs = []
    for k, env in enumerate([{}, {"OPSPACE_SEED": "20080513"}]):
        out = tmp_path / f"r{k}.json"
        proc = run("check", "system", space, "--out", str(out), env=env)
        assert proc.returncode == 0, proc.stdout + proc.stderr
        data = json.loads(out.read_text())
        data.pop("timestamp")
        data.pop("command")  # differs only in the output path
        outs.append(data)
    assert outs[0] == outs[1]


def test_seed_flag_overrides_environment(emit, tmp_path):
    out = tmp_path / "seed.json"
    proc = run("check", "unitary", str(emit("m2-full")), "--seed", "7", "--out", str(out), env={"OPSPACE_SEED": "9"})
    assert proc.returncode == 0
    assert json.loads(out.read_text())["seed"] == 7
