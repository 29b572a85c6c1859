"""End-to-end checks of the noqe command-line tool.

Run through ctest, which sets NOQE_BIN and NOQE_SOURCE_DIR.
"""

import csv
import json
import os
import shutil
import subprocess
from pathlib import Path

import jsonschema
import pytest

BIN = os.environ.get("NOQE_BIN", "noqe")
SRC = Path(os.environ.get("NOQE_SOURCE_DIR", Path(__file__).resolve().parents[2]))
H2 = SRC / "data" / "h2"
SCHEMA = json.loads((SRC / "schema" / "report.schema.json").read_text())


def run(*args, check_code=0):
    proc = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True, timeout=600)
    if check_code is not None:
        assert proc.returncode == check_code, proc.stderr + proc.stdout
    return proc


def validate(path):
    report = json.loads(Path(path).read_text())
    jsonschema.validate(report, SCHEMA)
    return report


def write_config(tmp_path, base="config_shadow.json", **overrides):
    cfg = json.loads((H2 / base).read_text())
    cfg["hamiltonian"] = str(H2 / "hamiltonian.json")
    for ref in cfg["references"]:
        ref["circuit"] = str(H2 / ref["circuit"])
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


@pytest.fixture(scope="module")
def small_shadow(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("small")
    return write_config(tmp, budget=500, bootstrap=5)


def test_acquire_writes_six_datasets_deterministically(tmp_path, small_shadow):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    run("acquire", "--config", small_shadow, "--out", a)
    run("acquire", "--config", small_shadow, "--out", b)
    run("acquire", "--config", small_shadow, "--out", c, "--seed", 99)
    names = sorted(p.name for p in a.glob("*.jsonl"))
    assert names == sorted(f"ref{r}{s}.jsonl" for r in (1, 2) for s in ("", "_R", "_I"))
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()
        assert (a / name).read_bytes() != (c / name).read_bytes()
    header = json.loads((a / "ref1.jsonl").read_text().splitlines()[0])
    assert header["n"] == 500


def test_estimate_from_saved_datasets_matches_fresh_run(tmp_path, small_shadow):
    data = tmp_path / "data"
    run("acquire", "--config", small_shadow, "--out", data)
    cfg = json.loads(Path(small_shadow).read_text())
    cfg["datasets"] = str(data)
    saved = tmp_path / "saved.json"
    saved.write_text(json.dumps(cfg))
    run("estimate", "--config", saved, "--out", tmp_path / "from_saved")
    run("estimate", "--config", small_shadow, "--out", tmp_path / "fresh")
    a = validate(tmp_path / "from_saved" / "estimate.json")
    b = validate(tmp_path / "fresh" / "estimate.json")
    assert a["estimates"]["S"] == b["estimates"]["S"]
    assert a["estimates"]["H"] == b["estimates"]["H"]


def test_corrupt_dataset_exits_with_data_error(tmp_path, small_shadow):
    data = tmp_path / "data"
    run("acquire", "--config", small_shadow, "--out", data)
    path = data / "ref2_R.jsonl"
    lines = path.read_text().splitlines(keepends=True)
    path.write_text("".join(lines[:-3]))
    cfg = json.loads(Path(small_shadow).read_text())
    cfg["datasets"] = str(data)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cfg))
    proc = run("estimate", "--config", bad, "--out", tmp_path / "o", check_code=3)
    assert "ref2_R" in proc.stderr or "record" in proc.stderr


def test_solve_exact_mode_reproduces_exact_energy(tmp_path, small_shadow):
    run("solve", "--config", small_shadow, "--out", tmp_path, "--exact-mode")
    report = validate(tmp_path / "solve.json")
    assert report["exact_mode"] is True
    assert abs(report["energy_error"]) < 1e-10
    assert report["hamiltonian"]["terms"] == 27


def test_distill_flag_keeps_raw_estimates(tmp_path, small_shadow):
    run("estimate", "--config", small_shadow, "--out", tmp_path, "--distill", "--estimator-m", "2")
    report = validate(tmp_path / "estimate.json")
    assert report["config"]["distill"] is True
    assert report["config"]["estimator_m"] == 2
    assert "raw_estimates" in report
    element = report["estimates"]["elements"][0]
    assert element["distilled"] and "raw_re" in element


def test_hadamard_report(tmp_path):
    cfg = write_config(tmp_path, "config_hadamard.json", budget=20000)
    run("hadamard", "--config", cfg, "--out", tmp_path)
    report = validate(tmp_path / "hadamard.json")
    assert report["method"] == "hadamard"
    assert abs(report["energy_error"]) < 0.05


def test_zne_report(tmp_path):
    cfg = write_config(tmp_path, "config_zne.json", zne={"scales": [1, 2, 3], "shots_per_scale": 5000})
    run("zne", "--config", cfg, "--out", tmp_path)
    report = validate(tmp_path / "zne.json")
    assert report["method"] == "zne-hadamard"
    assert report["zne"]["scales"] == [1, 2, 3]


def test_sweep_csv(tmp_path):
    cfg = write_config(tmp_path, "config_sweep.json", budget=300, sweep={"lambdas": [0.5, 1.0], "methods": ["shadow", "hadamard"]})
    run("sweep", "--config", cfg, "--out", tmp_path)
    with open(tmp_path / "sweep.csv") as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0].keys()) == ["lambda", "method", "quantity", "value", "se", "true_value", "abs_error"]
    assert {r["method"] for r in rows} == {"shadow", "hadamard"}
    assert {float(r["lambda"]) for r in rows} == {0.5, 1.0}
    for r in rows:
        assert abs(abs(float(r["value"]) - float(r["true_value"])) - float(r["abs_error"])) < 1e-9


@pytest.mark.parametrize(
    "args",
    [
        ["solve"],
        ["solve", "--config", "/nonexistent/config.json"],
        ["solve", "--config", "{cfg}", "--estimator-m", "4"],
        ["launch", "--config", "{cfg}"],
    ],
)
def test_config_errors_exit_2(tmp_path, small_shadow, args):
    args = [a.replace("{cfg}", str(small_shadow)) for a in args]
    run(*args, check_code=2)


def test_bad_field_is_named(tmp_path):
    cfg = write_config(tmp_path, estimator_m=7)
    proc = run("solve", "--config", cfg, check_code=2)
    assert "estimator_m" in proc.stderr


def test_malformed_hamiltonian_exit_2(tmp_path):
    ham = tmp_path / "h.json"
    ham.write_text('{"num_qubits": 4, "terms": [{"pauli": "ZZZ", "re": 1, "im": 0}]}')
    cfg = write_config(tmp_path, hamiltonian=str(ham))
    proc = run("solve", "--config", cfg, "--exact-mode", check_code=2)
    assert "term 0" in proc.stderr


def test_non_finite_matrices_exit_4(tmp_path):
    # ZZZZ is +1 on every two-electron state, so H11 overflows to infinity.
    ham = tmp_path / "h.json"
    ham.write_text(json.dumps({"num_qubits": 4, "terms": [
        {"pauli": "IIII", "re": 1e308, "im": 0}, {"pauli": "ZZZZ", "re": 1e308, "im": 0}]}))
    cfg = write_config(tmp_path, hamiltonian=str(ham))
    run("solve", "--config", cfg, "--exact-mode", "--out", tmp_path, check_code=4)
