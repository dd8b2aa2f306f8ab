import csv
import io

import numpy as np
import pytest

from sgbsde.harness import (
    REPRODUCE_HEADER,
    SUMMARY_HEADER,
    csv_text,
    reproduce,
    run,
    run_many,
    run_seeds,
    summary_rows,
)
from sgbsde.presets import get_preset


def small(name, **changes):
    return get_preset(name).with_(**{"M": 200, **changes})


def test_run_is_bit_reproducible():
    cfg = small("bifurcation-a0.4-picard", P=2)
    a, b = run(cfg), run(cfg)
    assert [r.y0 for r in a.iterations] == [r.y0 for r in b.iterations]
    np.testing.assert_array_equal(a.coeffs.flat(), b.coeffs.flat())
    assert a.config["model"] == "bifurcation"


def test_periodic_preset_reports_mse_per_iteration():
    rep = run(small("periodic-d3-picard", M=100))
    assert len(rep.iterations) == 5
    assert all(it.mse is not None for it in rep.iterations)


def test_run_many_interval():
    cfg = small("financial-d2-prewavelet", runs=3)
    summary = run_many(cfg)
    assert len(summary.reports) == 3
    assert len(set(run_seeds(cfg))) == 3
    assert summary.ci_low <= summary.mean <= summary.ci_high
    assert summary.mean == pytest.approx(summary.estimates.mean())


def test_summary_csv_schema():
    reports = [run(small("bifurcation-a0.4-picard", P=2))]
    text = csv_text(SUMMARY_HEADER, summary_rows(reports))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == SUMMARY_HEADER
    assert [r[3] for r in rows[1:]] == ["1", "2", "final"]
    # full double precision with a '.' separator
    assert float(rows[-1][4]) == reports[0].y0


@pytest.mark.parametrize("target", ["table1", "table3"])
def test_reproduce_tables_exactly(target):
    rows = reproduce(target)
    assert len(rows) >= 12
    assert all(r[4] == 0 for r in rows)
    assert len(rows[0]) == len(REPRODUCE_HEADER)


def test_table3_includes_hundred_dimensions():
    rows = reproduce("table3")
    assert ["table3", "d=100 level=3", 20401, 20401, 0] in rows


def test_reproduce_challenging_rows():
    rows = reproduce("challenging-d1", scale=0.02)
    quantities = [r[1] for r in rows]
    assert quantities[0] == "closed form y0"
    assert rows[0][2] == pytest.approx(1.3776, abs=5e-5)
    assert "picard error" in quantities


def test_reproduce_unknown_target():
    with pytest.raises(KeyError, match="table1"):
        reproduce("table9")
