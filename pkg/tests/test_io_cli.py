import json

import numpy as np
import pytest

from me2ph import FEBlock, MERep, PHRep
from me2ph.cli import main
from me2ph.io import read_me_file, read_ph_file, write_me_file, write_ph_file
from conftest import SCALE
from genutil import rep_from_terms


@pytest.fixture()
def worked_me_file(tmp_path, worked_rep):
    path = tmp_path / "input.json"
    write_me_file(worked_rep, path)
    return path


def test_me_file_round_trip(tmp_path, worked_rep):
    path = tmp_path / "rep.json"
    write_me_file(worked_rep, path)
    loaded, _tol = read_me_file(path)
    assert np.array_equal(loaded.alpha, worked_rep.alpha)
    assert np.array_equal(loaded.A, worked_rep.A)
    again = tmp_path / "rep2.json"
    write_me_file(loaded, again)
    assert path.read_bytes() == again.read_bytes()


def test_me_file_complex_entries(tmp_path, worked_minimal):
    path = tmp_path / "minimal.json"
    write_me_file(worked_minimal, path)
    doc = json.loads(path.read_text())
    assert isinstance(doc["A"][4][4], list)  # [re, im] encoding
    loaded, _ = read_me_file(path)
    assert np.array_equal(loaded.alpha, worked_minimal.alpha)
    assert np.array_equal(loaded.A, worked_minimal.A)


def test_me_file_tolerance_override(tmp_path):
    path = tmp_path / "loose.json"
    path.write_text(json.dumps({
        "alpha": [0.7, 0.2],
        "A": [[-1.0, 0.0], [0.0, -2.0]],
        "tolerances": {"alpha_sum": 0.5},
    }))
    rep, tol = read_me_file(path)
    assert tol.alpha_sum == 0.5
    assert rep.order == 2


def test_ph_file_round_trip(tmp_path, worked_conversion):
    ph, _ = worked_conversion
    path = tmp_path / "out.json"
    write_ph_file(ph, path)
    loaded = read_ph_file(path)
    assert loaded.order == ph.order
    assert np.array_equal(loaded.head_gamma, ph.head_gamma)
    assert np.array_equal(loaded.tail_weights, ph.tail_weights)
    assert loaded.blocks == ph.blocks
    assert (loaded.prefix.l, loaded.prefix.mu) == (ph.prefix.l, ph.prefix.mu)


def test_ph_file_sidecar_for_huge_tails(tmp_path):
    n = 1_000_001
    weights = np.full(n, 0.5 / n)
    ph = PHRep(np.array([0.5]), (FEBlock(1, 1.0, 0.0),), 10.0, n, weights)
    path = tmp_path / "big.json"
    write_ph_file(ph, path)
    sidecar = tmp_path / "big.json.weights"
    assert sidecar.exists()
    assert sidecar.stat().st_size == 8 * n
    loaded = read_ph_file(path)
    assert np.array_equal(loaded.tail_weights, weights)


def test_convert_cli_exponential(tmp_path, capsys):
    inp = tmp_path / "exp.json"
    write_me_file(MERep(np.array([1.0]), np.array([[-1.0]])), inp)
    out = tmp_path / "exp.ph.json"
    code = main(["convert", str(inp), str(out)])
    assert code == 0
    captured = capsys.readouterr()
    assert "final order: 1" in captured.out
    doc = json.loads(out.read_text())
    assert doc["tail"] is None and doc["prefix"] is None


def test_convert_cli_worked_example_paper_bounds(tmp_path, capsys, worked_me_file):
    out = tmp_path / "worked.ph.json"
    code = main(["convert", str(worked_me_file), str(out), "--paper-bounds"])
    assert code == 0
    captured = capsys.readouterr()
    assert "tau: 0.5" in captured.out
    assert "final order: 403309" in captured.out
    assert '"lambda": 806600.0' in captured.out
    loaded = read_ph_file(out)
    assert loaded.order == 403309


def test_convert_cli_deterministic_output(tmp_path, capsys, worked_me_file):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert main(["convert", str(worked_me_file), str(out1), "--paper-bounds"]) == 0
    first = capsys.readouterr().out
    assert main(["convert", str(worked_me_file), str(out2), "--paper-bounds"]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert out1.read_bytes() == out2.read_bytes()


def test_convert_cli_dec_violation(tmp_path, capsys):
    rep = rep_from_terms([(-1.0 + 0j, [0.6]), (-1.0 + 2j, [0.2 + 0.1j])])
    inp = tmp_path / "tie.json"
    write_me_file(rep, inp)
    code = main(["convert", str(inp), str(tmp_path / "x.json")])
    assert code == 2
    err = capsys.readouterr().err
    assert "dec-violation" in err
    assert "-1+2j" in err or "-1-2j" in err


def test_convert_cli_positive_density_violation(tmp_path, capsys):
    rep = rep_from_terms([(-1.0 + 0j, [1.0]), (-2.0 + 4j, [2.5])])
    inp = tmp_path / "dip.json"
    write_me_file(rep, inp)
    code = main(["convert", str(inp), str(tmp_path / "x.json")])
    assert code == 3
    assert "positive-density" in capsys.readouterr().err


def test_convert_cli_max_order(tmp_path, capsys, worked_me_file):
    code = main(["convert", str(worked_me_file), str(tmp_path / "x.json"),
                 "--paper-bounds", "--max-order", "1000"])
    assert code == 4
    assert "numeric" in capsys.readouterr().err


def test_convert_cli_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code = main(["convert", str(bad), str(tmp_path / "x.json")])
    assert code == 1


def test_validate_cli_me_file(capsys, worked_me_file):
    code = main(["validate", str(worked_me_file)])
    assert code == 0
    verdict = json.loads(capsys.readouterr().out)
    assert verdict == {"markovian": False, "dec": True, "positive_density": True}


def test_validate_cli_against(tmp_path, capsys, worked_me_file):
    out = tmp_path / "w.ph.json"
    assert main(["convert", str(worked_me_file), str(out), "--paper-bounds"]) == 0
    capsys.readouterr()
    code = main(["validate", str(out), "--against", str(worked_me_file)])
    assert code == 0
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["markovian"] is True
    assert verdict["dec"] is True
    assert verdict["positive_density"] is True
    assert verdict["equivalence"]["pass"] is True


def test_validate_cli_malformed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    assert main(["validate", str(bad)]) == 1


def test_pdf_cli_exponential(tmp_path, capsys):
    inp = tmp_path / "exp.json"
    write_me_file(MERep(np.array([1.0]), np.array([[-1.0]])), inp)
    code = main(["pdf", str(inp), "--grid", "0:1:2"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "x,f"
    x0, f0 = lines[1].split(",")
    x1, f1 = lines[2].split(",")
    assert (float(x0), float(f0)) == pytest.approx((0.0, 1.0))
    assert (float(x1), float(f1)) == pytest.approx((1.0, np.exp(-1)))


def test_pdf_cli_worked_example_value(capsys, worked_me_file):
    code = main(["pdf", str(worked_me_file), "--grid", "1:1:1"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    expected = SCALE * (
        2 * np.exp(-1) + np.exp(-3) - 10 * np.exp(-4)
        + np.exp(-5) * (8 * np.cos(3) + 4 * np.sin(3))
    )
    assert float(lines[1].split(",")[1]) == pytest.approx(expected, rel=1e-10)


def test_pdf_cli_ph_and_me_agree(tmp_path, capsys, worked_me_file):
    out = tmp_path / "w.ph.json"
    assert main(["convert", str(worked_me_file), str(out), "--paper-bounds"]) == 0
    capsys.readouterr()
    assert main(["pdf", str(worked_me_file), "--grid", "0.5:6:12"]) == 0
    me_rows = capsys.readouterr().out.strip().splitlines()[1:]
    assert main(["pdf", str(out), "--grid", "0.5:6:12"]) == 0
    ph_rows = capsys.readouterr().out.strip().splitlines()[1:]
    for me_row, ph_row in zip(me_rows, ph_rows):
        fm = float(me_row.split(",")[1])
        fp = float(ph_row.split(",")[1])
        assert fp == pytest.approx(fm, rel=1e-5)


def test_pdf_cli_bad_grid(tmp_path, worked_me_file):
    assert main(["pdf", str(worked_me_file), "--grid", "nope"]) == 1
