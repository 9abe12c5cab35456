"""``uapprox`` command line: tables, single sweeps, plots and a quick self-test."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import bench, bitnet, fourier, taylor, targets, trapnet
from .metrics import NormKind

NORM_CHOICES = ["sup", "rms", "l2", "l1", "l2_rms", "l2_unnormalized"]


def _seed(seed):
    return bench.default_seed() if seed is None else seed


def _norm(text):
    return None if text is None else NormKind.parse(text)


@click.group()
def main():
    """Constructive approximating networks and their error tables."""


@main.command()
@click.argument("table_id", type=click.IntRange(1, 5))
@click.option("--norm", type=click.Choice(NORM_CHOICES), default=None,
              help="Norm of the difference (default depends on the table).")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Write table files here instead of printing.")
@click.option("--format", "fmt", type=click.Choice(["csv", "md", "json"]), multiple=True,
              help="Output format(s); repeatable.")
@click.option("--seed", type=int, default=None, help="Seed (default: $UAPPROX_SEED or 1).")
@click.option("--iters", type=int, default=5000, show_default=True,
              help="Training iterations (table 5).")
def table(table_id, norm, out_dir, fmt, seed, iters):
    """Reproduce one of the five error tables."""
    fmts = tuple(fmt) or ("csv",)
    cfg = bench.RunConfig.for_table(table_id, norm=_norm(norm), seed=_seed(seed),
                                    out_dir=out_dir, formats=fmts, iters=iters)
    reports = bench.run_table(cfg)
    if out_dir is None:
        for f in fmts:
            click.echo(bench._WRITERS[f](cfg, reports), nl=False)
    else:
        for f in fmts:
            click.echo(str(out_dir / f"table{table_id}.{f}"))
    bad = bench.failed(reports)
    for r in bad:
        click.echo(f"NA {r.function} {r.params}: {r.error}", err=True)
    sys.exit(1 if bad else 0)


_SWEEP_KIND = {"ffn": "ffn", "resnet": "resnet", "fnn": "fnn", "taylor": "taylor"}


def _parse_params(text: str, construction: str):
    out = []
    for item in text.split(","):
        item = item.strip()
        if construction == "fnn" and ":" in item:
            k, j = item.split(":")
            out.append((int(k), int(j)))
        else:
            out.append(int(item))
    return tuple(out)


@main.command()
@click.option("--construction", type=click.Choice(list(_SWEEP_KIND)), required=True)
@click.option("--function", "fid", required=True, help="Target id (see `uapprox functions`).")
@click.option("--params", required=True,
              help="Comma list: M (resnet), n (ffn), N (taylor), K or K:J (fnn).")
@click.option("--norm", type=click.Choice(NORM_CHOICES), default="sup", show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--iters", type=int, default=5000, show_default=True)
def sweep(construction, fid, params, norm, seed, iters):
    """Errors of one construction on one function over a parameter list."""
    sweep_vals = _parse_params(params, construction)
    norm = NormKind.parse(norm)
    if construction == "resnet":
        cfgs = [bench.RunConfig("resnet_eps1", (fid,), sweep_vals, norm=norm),
                bench.RunConfig("resnet_eps2", (fid,), sweep_vals, norm=norm)]
    elif construction == "ffn":
        cfgs = [None, bench.RunConfig("ffn", (fid,), sweep_vals, norm=norm)]
    elif construction == "taylor":
        cfgs = [bench.RunConfig("taylor", (fid,), sweep_vals, norm=norm), None]
    else:
        cfgs = [bench.RunConfig("fnn", (fid,), sweep_vals, norm=norm, seed=_seed(seed),
                                iters=iters), None]
    cols = [bench.run_table(c) if c is not None else None for c in cfgs]
    click.echo("param,epsilon1,epsilon2")
    errored = False
    for i, p in enumerate(sweep_vals):
        cells = []
        for col in cols:
            if col is None:
                cells.append("")
            else:
                errored |= col[i].error is not None
                cells.append(bench.cell_text(col[i]))
        click.echo(",".join([bench.param_text(p)] + cells))
    sys.exit(1 if errored else 0)


@main.command()
@click.option("--function", "fid", required=True)
@click.option("--construction", type=click.Choice(["taylor", "ffn", "resnet", "trapezoid", "fnn"]),
              required=True)
@click.option("--param", type=str, required=True,
              help="N (taylor), n (ffn), M (resnet/trapezoid), K or K:J (fnn).")
@click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--seed", type=int, default=None)
def plot(fid, construction, param, out, seed):
    """Write an SVG of a target and its approximant."""
    from .plot import emit_plot

    f = targets.get(fid)
    if construction == "taylor":
        t = taylor.build_taylor(f, N=int(param))
        curves = [(f"Taylor N={param}", t)]
    elif construction == "ffn":
        t = taylor.build_taylor(f, N=bench.FFN_DEGREE)
        net = bitnet.build_poly_net(t, int(param), f.domain)
        from .netcore import forward_many
        curves = [(f"bit network n={param}", lambda x: forward_many(net, x))]
    elif construction in ("resnet", "trapezoid"):
        mode = "rectangular" if construction == "resnet" else "trapezoidal"
        curves = [(f"{mode} M={param}", trapnet.build_piecewise(f, int(param), mode))]
    else:
        p = _parse_params(param, "fnn")[0]
        if isinstance(p, tuple):
            m0 = fourier.init_hybrid(f, p[0], p[1], _seed(seed))
            m, _ = fourier.train_gradient(m0, f)
        else:
            m, _ = fourier.fit_single(f, p)
        curves = [(f"Fourier {param}", m)]
    out.write_text(emit_plot(f, curves))
    click.echo(str(out))


@main.command()
def functions():
    """List the target ids with their domains."""
    for f in targets.make_zoo():
        click.echo(f"{f.id}\t[{f.domain[0]:g}, {f.domain[1]:g}]\t{f.description}")


@main.command()
def selftest():
    """Run the quick property checks; exit 1 on any failure."""
    from .selftest import run_all

    ok = True
    for name, passed, detail in run_all():
        ok &= passed
        click.echo(f"{'PASS' if passed else 'FAIL'} {name}" + (f": {detail}" if detail else ""))
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
