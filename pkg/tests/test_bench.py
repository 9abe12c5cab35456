import csv
import io
import json

import numpy as np
import pytest

from uapprox import bench
from uapprox.bench import ConfigError, RunConfig
from uapprox.metrics import NormKind


def test_table_sweeps_and_columns():
    assert bench.TABLES[1].sweep == (5, 10, 50, 100, 500, 1000)
    assert bench.TABLES[2].sweep == (5, 10, 50)
    assert bench.TABLES[3].sweep == (5, 10, 25, 50, 75)
    assert bench.TABLES[4].sweep == (5, 10, 25, 50, 60)
    assert len(bench.TABLES[5].sweep) == 1
    widths = {1: 5, 2: 5, 3: 9, 4: 9, 5: 9}
    for t, w in widths.items():
        assert len(bench.TABLES[t].functions) == w


@pytest.mark.parametrize("kw, message", [
    (dict(functions=()), "function list"),
    (dict(sweep=()), "sweep"),
    (dict(sweep=(0,)), "sweep value"),
    (dict(construction="spline"), "construction"),
    (dict(formats=("xlsx",)), "format"),
])
def test_config_validation(kw, message):
    base = dict(construction="taylor", functions=("exp(x)",), sweep=(5,))
    base.update(kw)
    with pytest.raises(ConfigError, match=message):
        RunConfig(**base)


def test_unknown_function_rejected():
    with pytest.raises(KeyError):
        RunConfig("taylor", ("tan(x)",), (5,))


def test_for_table_uses_env_seed(monkeypatch):
    monkeypatch.setenv("UAPPROX_SEED", "17")
    assert RunConfig.for_table(5).seed == 17
    assert RunConfig.for_table(5, seed=3).seed == 3
    monkeypatch.delenv("UAPPROX_SEED")
    assert RunConfig.for_table(5).seed == 1
    with pytest.raises(ConfigError):
        RunConfig.for_table(6)


def test_table2_shape_and_csv():
    cfg = RunConfig.for_table(2)
    reports = bench.run_table(cfg)
    rows = list(csv.reader(io.StringIO(bench.to_csv(cfg, reports))))
    assert rows[0] == ["M"] + list(bench.TABLES[2].functions)
    assert [r[0] for r in rows[1:]] == ["5", "10", "50"]
    assert all(len(r) == 6 for r in rows)
    assert not bench.failed(reports)


def test_na_isolation():
    # log(x) is undefined on part of the shifted domain; its cell alone is NA
    cfg = RunConfig("resnet_eps2", ("sin(2*pi*x/5)", "log(x)", "exp(x)"), (5, 10),
                    domain=(-1.0, 9.0))
    reports = bench.run_table(cfg)
    for r in reports:
        if r.function == "log(x)":
            assert r.error and bench.cell_text(r).startswith("NA:")
        else:
            assert r.error is None and np.isfinite(r.value)
    assert "NA:" in bench.to_csv(cfg, reports)


def test_cell_formatting():
    assert bench.format_value(0.030599) == "3.05990e-02"
    assert bench.format_value(0.0) == "0.00000e+00"
    assert bench.format_value(float("inf")) == "inf"
    assert bench.format_value(float("nan")) == "nan"
    assert bench.param_text((10, 5)) == "10/5"


def test_csv_is_deterministic():
    cfg = RunConfig("taylor", ("exp(x)", "sin(2*pi*x/0.5)"), (5, 10))
    assert bench.to_csv(cfg, bench.run_table(cfg)) == bench.to_csv(cfg, bench.run_table(cfg))


def test_writers(tmp_path):
    cfg = RunConfig("ffn", ("x^2",), (5, 10), table=None, out_dir=tmp_path,
                    formats=("csv", "md", "json"))
    reports = bench.run_table(cfg)
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["ffn.csv", "ffn.json", "ffn.md"]
    md = (tmp_path / "ffn.md").read_text()
    assert "| param | x^2 |" in md
    doc = json.loads((tmp_path / "ffn.json").read_text())
    assert len(doc["cells"]) == 2 and doc["norm"] == "sup"
    assert doc["cells"][0]["epsilon2"] == reports[0].epsilon2


def test_fnn_cell_single_layer():
    cfg = RunConfig("fnn", ("sin(2*pi*x)",), (4,), norm=NormKind.L2_RMS, domain=(-1.0, 1.0))
    (r,) = bench.run_table(cfg)
    assert r.value <= 1e-8


def test_fnn_cell_na_for_undefined_target():
    cfg = RunConfig("fnn", ("log(x)",), ((3, 2),), norm=NormKind.L2_RMS, domain=(-1.0, 1.0),
                    iters=5)
    (r,) = bench.run_table(cfg)
    assert r.error and "undefined" in r.error
