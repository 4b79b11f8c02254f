import csv
import io
from fractions import Fraction

import pytest

from irpfl.harness import (CSV_COLUMNS, BOUNDS, ExperimentConfig, certify, certify_one,
                           default_workers, sequence_of_seeds)
from irpfl.instance import Variant


def _rows(report):
    return list(csv.DictReader(io.StringIO(report.to_csv())))


def test_seed_ranges():
    assert sequence_of_seeds("0-3") == [0, 1, 2, 3]
    assert sequence_of_seeds("5") == [5]
    assert sequence_of_seeds([2, 1]) == [2, 1]


def test_config_rejects_oversized_ranges():
    with pytest.raises(ValueError):
        ExperimentConfig(n_range=(2, 7), seeds=[0])
    with pytest.raises(ValueError):
        ExperimentConfig(problem="iap", variant="CAP_SPLIT", capacity=5, T_range=(1, 9))
    with pytest.raises(ValueError):
        ExperimentConfig(variant="CAP_SPLIT")
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"bogus": 1})
    ExperimentConfig(n_range=(2, 9), oracle=False)


def test_config_round_trip():
    cfg = ExperimentConfig(variant="CAP_UNSPLIT", capacity=4, seeds="0-2", n_range=(2, 4), T_range=(1, 3))
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_empty_report():
    report = certify(ExperimentConfig(seeds=[]))
    assert report.passed and report.rows == []
    assert report.to_csv().strip() == ",".join(CSV_COLUMNS)


def test_uncapacitated_run(tmp_path):
    out = tmp_path / "r.csv"
    cfg = ExperimentConfig(seeds="0-5", n_range=(2, 4), T_range=(1, 3), output=str(out))
    report = certify(cfg, workers=1)
    assert report.passed, report.failures()
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == CSV_COLUMNS
    assert [int(r["seed"]) for r in rows] == list(range(6))
    for r in rows:
        assert r["pass"] == "pass"
        assert Fraction(r["rounded_total"]) >= Fraction(r["lp_obj"])
        assert Fraction(r["oracle_opt"]) >= Fraction(r["lp_obj"])
    assert report.max_ratio_vs_lp <= 12


def test_ratio_cells_are_exact_and_decimal():
    row = certify_one(ExperimentConfig(seeds=[3], n_range=(3, 3), T_range=(2, 2)), 3)
    cells = dict(zip(CSV_COLUMNS, row.to_csv_row()))
    exact, approx = cells["ratio_vs_lp"].split(" ")
    assert abs(float(Fraction(exact)) - float(approx.strip("()"))) < 1e-6


def test_deterministic_and_parallel_order():
    cfg = ExperimentConfig(problem="iap", variant="CAP_UNSPLIT", capacity=6, seeds="0-5",
                           T_range=(2, 5), items_per_day=2)
    a = certify(cfg, workers=1)
    b = certify(cfg, workers=2)
    strip = lambda rep: [r.to_csv_row() for r in rep.rows]
    assert strip(a) == strip(b)
    assert a.passed


def test_workers_env(monkeypatch):
    monkeypatch.setenv("IRPFL_WORKERS", "3")
    assert default_workers() == 3


def test_uncapacitated_iap_uses_exact_dp():
    cfg = ExperimentConfig(problem="iap", variant="UNCAP", seeds="0-4", T_range=(3, 8))
    report = certify(cfg)
    assert report.passed
    assert all(r.rounded_total == r.oracle_opt for r in report.rows)


def test_bounds_table():
    assert BOUNDS[("sirpfl", Variant.UNCAP)] == (2, 12, 4, 12)
    assert BOUNDS[("iap", Variant.CAP_UNSPLIT)][3] == 6
    assert BOUNDS[("sirpfl", Variant.CAP_UNSPLIT)][3] == 48
