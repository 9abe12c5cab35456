import xml.etree.ElementTree as ET

from click.testing import CliRunner

from uapprox.cli import main


def run(*args, env=None):
    return CliRunner().invoke(main, list(args), env=env)


def test_functions_lists_zoo():
    res = run("functions")
    assert res.exit_code == 0
    assert "rect_1_to_10" in res.output and "gaussian" in res.output


def test_selftest_passes():
    res = run("selftest")
    assert res.exit_code == 0, res.output
    assert "FAIL" not in res.output


def test_table2_csv():
    res = run("table", "2")
    assert res.exit_code == 0
    lines = res.output.splitlines()
    assert lines[0].startswith("M,sin(2*pi*x/5)")
    assert len(lines) == 4


def test_table_out_dir(tmp_path):
    res = run("table", "2", "--out", str(tmp_path), "--format", "csv", "--format", "md")
    assert res.exit_code == 0
    assert (tmp_path / "table2.csv").exists() and (tmp_path / "table2.md").exists()


def test_sweep_taylor():
    res = run("sweep", "--construction", "taylor", "--function", "x^2", "--params", "5,10")
    assert res.exit_code == 0
    assert res.output.splitlines() == ["param,epsilon1,epsilon2", "5,0.00000e+00,",
                                       "10,0.00000e+00,"]


def test_sweep_resnet_has_both_columns():
    res = run("sweep", "--construction", "resnet", "--function", "sin(2*pi*x/5)",
              "--params", "5")
    assert res.exit_code == 0
    _, row = res.output.splitlines()
    assert all(cell for cell in row.split(","))


def test_sweep_error_exit_code():
    res = run("sweep", "--construction", "fnn", "--function", "log(x)", "--params", "3")
    # log(x) is defined on its own domain, so this succeeds
    assert res.exit_code == 0
    res = run("sweep", "--construction", "taylor", "--function", "x^(-2)", "--params", "5",
              "--norm", "sup")
    assert res.exit_code == 0


def test_fnn_sweep_uses_env_seed():
    args = ("sweep", "--construction", "fnn", "--function", "exp(x)", "--params", "3:2",
            "--iters", "20")
    a = run(*args, env={"UAPPROX_SEED": "5"})
    b = run(*args, "--seed", "5")
    assert a.exit_code == 0 and a.output == b.output


def test_plot_command(tmp_path):
    out = tmp_path / "p.svg"
    res = run("plot", "--function", "sin(2*pi*x/5)", "--construction", "resnet", "--param", "10",
              "--out", str(out))
    assert res.exit_code == 0
    root = ET.fromstring(out.read_bytes())
    assert len(root.findall(".//{http://www.w3.org/2000/svg}polyline")) == 2


def test_bad_table_id():
    assert run("table", "9").exit_code != 0
