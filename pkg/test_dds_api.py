#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
API Tests
=========
"""

import json

import numpy as np
import pytest

from dds_api import DualDysonAPI, SweepPoint, check_finite
from dds_config import SpectrumSection, parse_config
from dds_errors import CutoffTooSmall, NumericalError, OutputError, ValidationError
from dds_hhg import HhgParams, Populations
from dds_jc import JcAmplitudes, JcParams
from dds_series import TimeGrid


@pytest.fixture
def api():
    instance = DualDysonAPI(max_workers=2)
    yield instance
    instance.close()


def test_choose_series():
    assert DualDysonAPI.choose_series(JcParams.from_ratio(0.5)) == "dyson"
    assert DualDysonAPI.choose_series(JcParams.from_ratio(3.0)) == "dual"
    assert DualDysonAPI.choose_series(JcParams(1.0, 1.0, 0.2)) == "dual"
    assert DualDysonAPI.choose_series(JcParams.from_ratio(3.0), "dyson") == "dyson"


def test_jc_compare_tables_and_summary(api):
    p = JcParams.from_ratio(0.2)
    result = api.jc_compare(p, JcAmplitudes(1.0, 0.0), TimeGrid(0.0, 10.0, 101))
    table = result.tables()["jc-compare.csv"]
    assert table.header == ("t", "err_order0", "err_order1", "err_order2", "err_order2_resummed")
    assert len(table.rows) == 101
    summary = result.get_summary()
    assert summary["series"] == "dyson" and np.isclose(summary["lambda"], 0.2)
    assert summary["max_error"]["err_order2"] < summary["max_error"]["err_order0"]
    assert set(summary["population_error"]["err_order1"]) == {"early", "full"}


def test_dual_compare_has_no_resummed_column(api):
    result = api.jc_compare(JcParams.from_ratio(8.0), JcAmplitudes(0.6, 0.8), TimeGrid(0.0, 5.0, 51))
    assert result.series == "dual"
    assert "err_order2_resummed" not in result.errors
    with pytest.raises(ValidationError):
        api.jc_compare(JcParams.from_ratio(8.0), JcAmplitudes(1.0, 0.0), TimeGrid(0.0, 5.0, 51), "magnus")


def test_renormalized_gap_and_bessel_identity(api):
    gap = api.renormalized_gap(0.5, 1.0, 0.5)
    assert np.isclose(gap["z"], 1.0)
    assert np.isclose(gap["omega0R"], 0.5 * 0.7651976865579666)
    assert set(gap["hyper_raman"]) == {"n1+", "n1-", "n2+", "n2-"}
    identity = api.bessel_identity(1.0, points=16)
    assert identity["cutoff"] == 21 and identity["max_residual"] < 1e-10
    with pytest.raises(CutoffTooSmall):
        api.bessel_identity(5.0, cutoff=10)


def test_sweep_keeps_input_order(api):
    values = [1.5, 0.5, 1.0]
    points = [(z, HhgParams.from_z(z, 0.1)) for z in values]
    init = Populations(np.sqrt(0.5), np.sqrt(0.5))

    def grid_for(p: HhgParams) -> TimeGrid:
        dt = p.period / 64
        return TimeGrid(0.0, 4095 * dt, 4096)

    result = api.sweep("z", points, init, grid_for, SpectrumSection(1e-7, True), (1,))
    assert [point.value for point in result.points] == values
    rows = result.tables()["sweep.csv"].rows
    assert len(rows) == 6 and [r[0] for r in rows[::2]] == values
    assert result.get_summary()["within_one_bin"] is True


def test_sweep_point_missing_line_leaves_empty_cells(api):
    p = HhgParams.from_z(1.5, 0.1)
    grid = TimeGrid(0.0, 1023 * p.period / 64, 1024)
    spectrum = api.hhg_spectrum(p, Populations(1.0, 0.0), grid)
    rows = SweepPoint(1.5, spectrum, {}).rows((1,))
    assert all(r[6] is None and r[7] is None for r in rows)


def test_report_and_export(api, tmp_path):
    config = parse_config(json.dumps({"experiment": "wkbj-demo",
                                      "wkbj": {"profile": "constant", "k": 1.0, "x1": 2.0},
                                      "grid": {"samples": 11}}))
    result = api.run(config)
    report = api.report(result, config)
    assert report["experiment"] == "wkbj-demo" and report["seedless"] is False
    assert report["config"]["wkbj"]["k"] == 1.0
    path = tmp_path / "report.json"
    api.export_json(result, path, config)
    assert json.loads(path.read_text()) == json.loads(json.dumps(report))
    with pytest.raises(OutputError):
        api.export_json(result, tmp_path / "missing" / "report.json")


def test_check_finite():
    check_finite({"a": [1.0, {"b": 2}], "c": None})
    with pytest.raises(NumericalError):
        check_finite({"a": [1.0, float("inf")]})


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
