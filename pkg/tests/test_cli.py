import json
import math

import numpy as np
import pytest

from overbarrier.cli import main
from overbarrier.exact import reflectance_closed_form
from overbarrier.potentials import (
    Family,
    FourierSeriesParams,
    PotentialSpec,
    fourier_spec_to_json,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_reflect_exact_matches_closed_form(capsys):
    code, out, _ = run(capsys, "reflect", "--family", "sech2", "--delta", "0.5",
                       "--eps", "0.5", "--method", "exact")
    assert code == 0
    doc = json.loads(out)
    want = reflectance_closed_form(PotentialSpec(Family.SECH_SQUARED, 0.5, 0.5))
    assert doc["R"] == pytest.approx(want, rel=1e-6)
    assert doc["method"] == "exact"
    assert doc["status"] == "ok"
    assert doc["backend"] == "invariant_embedding"


def test_reflect_method_tags(capsys):
    for method in ("closed-form", "born", "wkb"):
        code, out, _ = run(capsys, "reflect", "--family", "sech2", "--delta", "0.3",
                           "--eps", "0.8", "--method", method)
        assert code == 0
        doc = json.loads(out)
        assert doc["method"] == method
        assert "status" in doc and "R" in doc


def test_reflect_backend_flag(capsys):
    code, out, _ = run(capsys, "reflect", "--family", "fermi", "--delta", "0.5",
                       "--eps", "1.0", "--backend", "tm")
    assert code == 0
    assert json.loads(out)["backend"] == "transfer_matrix"


def test_domain_error_exit_code(capsys):
    code, _, err = run(capsys, "reflect", "--family", "fermi", "--delta", "1.2",
                       "--eps", "0.5")
    assert code == 1
    assert "above-barrier" in err


def test_usage_error_exit_code(capsys):
    code, _, _ = run(capsys, "--no-such-flag")
    assert code == 64


def test_numeric_floor_exit_code(capsys):
    # R ~ 1e-35: certified below floor, a demanded number is not deliverable
    code, out, _ = run(capsys, "reflect", "--family", "fermi", "--delta", "0.1",
                       "--eps", "0.15", "--method", "exact")
    assert code == 2
    assert json.loads(out)["status"] == "below_numeric_floor"


def test_wkb_forbidden_for_tabulated(tmp_path, capsys):
    data = tmp_path / "shape.dat"
    z = np.linspace(-5, 5, 101)
    data.write_text("\n".join(f"{zi} {math.exp(-zi*zi)}" for zi in z))
    code, _, err = run(capsys, "reflect", "--tabulated", str(data), "--delta", "0.3",
                       "--eps", "1.0", "--method", "wkb")
    assert code == 1
    assert "analytic" in err


def test_turning_points_json(capsys):
    code, out, _ = run(capsys, "turning-points", "--family", "gauss",
                       "--delta", "0.5", "--eps", "0.5")
    assert code == 0
    doc = json.loads(out)
    want = math.sqrt(math.log(2.0)) / 0.5
    assert doc["turning_points"][0]["im"] == pytest.approx(want, abs=1e-10)
    assert doc["method"] == "wkb"


def test_dump_shape_csv(tmp_path, capsys):
    out_csv = tmp_path / "shape.csv"
    code, _, _ = run(capsys, "reflect", "--family", "gauss", "--delta", "0.5",
                     "--eps", "1.0", "--method", "born",
                     "--dump-shape", str(out_csv))
    assert code == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "z,U"
    mid = lines[1 + len(lines) // 2].split(",")
    assert abs(float(mid[1])) <= 1.0


def test_sweep_outputs_are_byte_identical(tmp_path, capsys):
    args = ["sweep", "--family", "sech2", "--delta-min", "1e-3",
            "--delta-max", "0.5", "--delta-points", "6",
            "--eps-min", "0.3", "--eps-max", "1.0", "--eps-points", "4"]
    a_cells, a_line = tmp_path / "a.csv", tmp_path / "al.csv"
    b_cells, b_line = tmp_path / "b.csv", tmp_path / "bl.csv"
    code, _, _ = run(capsys, *args, "--out", str(a_cells), "--line", str(a_line))
    assert code == 0
    code, _, _ = run(capsys, *args, "--out", str(b_cells), "--line", str(b_line))
    assert code == 0
    assert a_cells.read_bytes() == b_cells.read_bytes()
    assert a_line.read_bytes() == b_line.read_bytes()


def test_localize_ensemble_and_reproducibility(tmp_path, capsys):
    args = ["localize", "--correlation", "gaussian", "--eps", "1.0",
            "--delta", "0.1", "--L0", "1000", "--n", "5", "--seed", "9"]
    code, out_a, _ = run(capsys, *args)
    assert code == 0
    code, out_b, _ = run(capsys, *args)
    assert out_a == out_b
    doc = json.loads(out_a)
    assert doc["method"] == "ensemble"
    assert doc["lloc_inv"] > 0
    dump = tmp_path / "lnt.csv"
    code, _, _ = run(capsys, *args, "--dump-lnt", str(dump))
    rows = dump.read_text().splitlines()
    assert rows[0] == "index,ln_T"
    assert len(rows) == 6


def test_localize_born_and_hist(capsys):
    code, out, _ = run(capsys, "localize", "--eps", "1.0", "--delta", "0.05",
                       "--L0", "100", "--method", "born")
    assert code == 0
    doc = json.loads(out)
    want = 0.25 * 0.05**2 * math.sqrt(math.pi) * math.exp(-1.0)
    assert doc["lloc_inv"] == pytest.approx(want, rel=1e-12)

    code, out, _ = run(capsys, "localize", "--eps", "0.4", "--delta", "0.7",
                       "--L0", "150", "--n", "3", "--seed", "2",
                       "--method", "wkb-hist")
    assert code == 0
    doc = json.loads(out)
    assert doc["up_to_constant"] is True
    assert doc["n_points"] > 0


def test_fourier_json_input(tmp_path, capsys):
    params = FourierSeriesParams(np.array([0.3]), np.array([2.0]),
                                 np.array([0.1]), 5.0, 60.0)
    spec = PotentialSpec(Family.FOURIER_SERIES, 0.05, 1.0, params)
    path = tmp_path / "spec.json"
    path.write_text(fourier_spec_to_json(spec))
    code, out, _ = run(capsys, "reflect", "--fourier-json", str(path),
                       "--method", "born")
    assert code == 0
    assert json.loads(out)["family"] == "fourier"


def test_config_file_merging(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"family": "sech2", "delta": 0.5, "eps": 0.5,
                               "method": "closed-form"}))
    code, out, _ = run(capsys, "--config", str(cfg), "reflect")
    assert code == 0
    doc = json.loads(out)
    want = reflectance_closed_form(PotentialSpec(Family.SECH_SQUARED, 0.5, 0.5))
    assert doc["R"] == pytest.approx(want, rel=1e-12)
    # explicit flags beat the config
    code, out, _ = run(capsys, "--config", str(cfg), "reflect", "--delta", "0.3")
    assert json.loads(out)["delta"] == 0.3


def test_validate_fermi(capsys):
    code, out, _ = run(capsys, "validate", "--family", "fermi")
    assert code == 0
    assert "PASS" in out and "FAIL" not in out.replace("overall: PASS", "")


def test_validate_gauss(capsys):
    code, out, _ = run(capsys, "validate", "--family", "gauss")
    assert code == 0
    assert "overall: PASS" in out
