#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command Line Tests
==================
"""

import json

import pytest

from dds_api import DualDysonAPI, PlotSpec, Table
from dds_cli import _cell, create_parser, main, render_csv
from dds_errors import NumericalError

JC = {"experiment": "jc-compare", "jc": {"omega": 1.0, "omega0": 1.5, "g": 0.1}, "grid": {"samples": 256}}
HHG = {"experiment": "hhg-spectrum", "hhg": {"omega0": 0.1, "omegaL": 1.0, "field": 0.75},
       "init": {"c1": 0.6, "c2": 0.8}, "grid": {"periods": 16}}


def _write(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if isinstance(doc, dict) else doc, encoding="utf-8")
    return path


def test_parser_arguments():
    args = create_parser().parse_args(["run.json", "--out", "o", "--seedless", "-v"])
    assert str(args.config) == "run.json" and str(args.out) == "o"
    assert args.seedless and args.verbose


def test_cell_formatting():
    assert _cell(None) == ""
    assert _cell(3) == "3"
    assert _cell(True) == "1"
    assert _cell(0.1) == "0.10000000000000001"
    assert _cell("hyper-raman+") == "hyper-raman+"
    with pytest.raises(NumericalError):
        _cell(float("nan"))


def test_render_csv():
    text = render_csv(Table(("a", "b"), [(1, 0.5), (2, None)]))
    assert text == "a,b\n1,0.5\n2,\n"


def test_jc_compare_artifacts(tmp_path):
    out = tmp_path / "jc"
    assert main([str(_write(tmp_path, JC)), "--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["jc-compare.csv", "jc-compare.json", "plot.gp"]
    lines = (out / "jc-compare.csv").read_text().splitlines()
    assert lines[0] == "t,err_order0,err_order1,err_order2,err_order2_resummed"
    assert len(lines) == 257
    report = json.loads((out / "jc-compare.json").read_text())
    assert report["experiment"] == "jc-compare"
    assert report["summary"]["series"] == "dyson"
    assert report["config"]["grid"]["samples"] == 256
    assert "set logscale y" in (out / "plot.gp").read_text()


def test_hhg_artifacts(tmp_path):
    out = tmp_path / "hhg"
    assert main([str(_write(tmp_path, HHG)), "--out", str(out), "--seedless"]) == 0
    assert (out / "hhg-spectrum.csv").read_text().splitlines()[0] == "t,x"
    assert (out / "hhg-spectrum-spectrum.csv").read_text().splitlines()[0] == "omega,power"
    assert (out / "hhg-spectrum-peaks.csv").read_text().splitlines()[0] == "freq,height,kind,order"
    report = json.loads((out / "hhg-spectrum.json").read_text())
    assert report["seedless"] is True
    assert report["config"]["init"]["c2"] == [0.8, 0.0]


def test_identical_configs_give_identical_bytes(tmp_path):
    config = _write(tmp_path, HHG)
    for tag in ("a", "b"):
        assert main([str(config), "--out", str(tmp_path / tag)]) == 0
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes(), f.name


def test_out_key_is_default_directory(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main([str(_write(tmp_path, {**JC, "out": "from-config"}))]) == 0
    assert (tmp_path / "from-config" / "jc-compare.csv").exists()


def test_configuration_errors_exit_2(tmp_path):
    assert main([str(_write(tmp_path, "{broken"))]) == 2
    assert main([str(_write(tmp_path, {**JC, "colour": "red"}))]) == 2
    assert main([str(_write(tmp_path, {"experiment": "hhg-spectrum", "hhg": {"omega0": 0.1, "field": 1.0}}))]) == 2


def test_numerical_errors_exit_3(tmp_path):
    doc = {"experiment": "wkbj-demo", "wkbj": {"profile": "linear", "a": 1.0, "b": -1.0, "x1": 2.0}}
    assert main([str(_write(tmp_path, doc)), "--out", str(tmp_path / "w")]) == 3


def test_io_errors_exit_4(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    assert main([str(_write(tmp_path, JC)), "--out", str(blocker)]) == 4
    assert main([str(tmp_path / "missing.json")]) == 4


def test_unexpected_errors_exit_1(tmp_path, monkeypatch):
    def crash(self, config):
        raise RuntimeError("boom")

    monkeypatch.setattr(DualDysonAPI, "run", crash)
    assert main([str(_write(tmp_path, JC)), "--out", str(tmp_path / "o")]) == 1
    assert not (tmp_path / "o").exists()


def test_plot_spec_columns():
    spec = PlotSpec("x.csv", (2, 3), "title")
    assert not spec.log_y and spec.columns == (2, 3)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
