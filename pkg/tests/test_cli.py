import csv

import pytest

from sgbsde.cli import main
from sgbsde.config import emit
from sgbsde.harness import SUMMARY_HEADER
from sgbsde.presets import get_preset
from sgbsde.sgd import EmpiricalSchedule, GroupRate


def test_grid_count(capsys):
    assert main(["grid", "count", "--dim", "100", "--level", "3", "--family", "modhat"]) == 0
    assert capsys.readouterr().out.strip() == "20401"


def test_grid_count_table(tmp_path):
    out = tmp_path / "counts.csv"
    assert main(["grid", "count", "--table", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["family", "dim", "level", "count"]
    assert ["prewavelet", "3", "3", "225"] in rows


def test_grid_count_needs_arguments(capsys):
    assert main(["grid", "count"]) == 2
    assert "--dim" in capsys.readouterr().err


def test_presets_list(capsys):
    assert main(["presets", "list"]) == 0
    assert "periodic-d3-picard" in capsys.readouterr().out


def test_solve_preset_writes_csv(tmp_path):
    out, z0, coeffs = tmp_path / "s.csv", tmp_path / "z.csv", tmp_path / "c.csv"
    code = main([
        "solve", "--preset", "quadratic-d5-prewavelet", "--M", "50", "--seed", "3",
        "--out", str(out), "--z0-out", str(z0), "--coeffs-out", str(coeffs),
    ])
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == SUMMARY_HEADER
    assert rows[1][1] == "3"
    assert len(list(csv.reader(z0.open()))) == 1 + 5
    assert coeffs.read_text().startswith("k,n,l,value")


def test_solve_config_file_and_dump(tmp_path, capsys):
    path = tmp_path / "exp.ini"
    path.write_text(emit(get_preset("bifurcation-a0.4-picard")))
    assert main(["solve", "--config", str(path), "--dump-config", "--warm-start", "off"]) == 0
    text = capsys.readouterr().out
    assert "warm_start = off" in text


def test_bad_preset_is_config_error(capsys):
    assert main(["solve", "--preset", "nope"]) == 2
    assert "preset" in capsys.readouterr().err


def test_bad_config_file_is_config_error(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("[model]\nname = heston\n")
    assert main(["solve", "--config", str(path)]) == 2
    assert "model.name" in capsys.readouterr().err


def test_missing_file_is_config_error(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "missing.ini")]) == 2


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_exit_code(tmp_path, capsys):
    huge = EmpiricalSchedule(*[GroupRate(1.0, 0.0, 1e6, 0.0)] * 3)
    cfg = get_preset("quadratic-d5-prewavelet").with_(schedule=huge, dim=2, level=2, M=3000)
    path = tmp_path / "diverge.ini"
    path.write_text(emit(cfg))
    assert main(["solve", "--config", str(path)]) == 3
    assert "diverged" in capsys.readouterr().err


def test_reference_row(capsys):
    assert main(["reference", "--dim", "5", "--samples", "100000", "--seed", "0"]) == 0
    header, row = [line.split(",") for line in capsys.readouterr().out.strip().splitlines()]
    assert header[:3] == ["y0", "ci_low", "ci_high"] and len(header) == 8
    assert 1.0943 <= float(row[0]) <= 1.1009


def test_reproduce_table1(capsys):
    assert main(["reproduce", "table1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "target,quantity,artifact,published,abs_diff"
    assert all(float(line.rsplit(",", 1)[1]) == 0 for line in lines[1:])


def test_reproduce_unknown_target(capsys):
    assert main(["reproduce", "table9"]) == 2


def test_argparse_rejects_bad_flag():
    with pytest.raises(SystemExit):
        main(["solve", "--warm-start", "maybe"])
