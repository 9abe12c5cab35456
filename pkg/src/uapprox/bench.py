"""Table definitions, the cell runner, and CSV / Markdown / JSON writers."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import bitnet, fourier, taylor, targets, trapnet
from .metrics import ErrorReport, EvaluationError, Grid, NormKind

DEFAULT_SEED = 1
FFN_DEGREE = 10  # Taylor degree behind the bit-network table

Param = Union[int, tuple[int, int]]


@dataclasses.dataclass(frozen=True)
class TableSpec:
    title: str
    construction: str  # resnet_eps1 | resnet_eps2 | taylor | ffn | fnn
    label: str  # header of the parameter column
    functions: tuple[str, ...]
    sweep: tuple[Param, ...]
    norm: NormKind
    domain: Optional[tuple[float, float]] = None  # overrides each target's own domain
    grid_points: Optional[int] = None


_RESNET_FUNCS = ("sin(2*pi*x/5)", "sin(2*pi*x/2.5)", "rect_1_to_10", "rect_1_to_10_2cycles",
                 "log(x)")

TABLES: dict[int, TableSpec] = {
    1: TableSpec("Epsilon 1, piecewise (ResNet) construction", "resnet_eps1", "M",
                 _RESNET_FUNCS, (5, 10, 50, 100, 500, 1000), NormKind.L1,
                 # the integral needs many points per cell at M = 1000
                 grid_points=1_000_001),
    2: TableSpec("Epsilon 2, piecewise (ResNet) construction", "resnet_eps2", "M",
                 _RESNET_FUNCS, (5, 10, 50), NormKind.SUP),
    3: TableSpec("Epsilon 1, Taylor polynomial", "taylor", "N",
                 ("gaussian", "x^2", "x^(-2)", "sinc2", "sin(2*pi*x/0.5)", "sin(2*pi*x/0.25)",
                  "exp(x)", "exp(-x)", "sinc2_new"), (5, 10, 25, 50, 75), NormKind.SUP),
    4: TableSpec("Epsilon 2, bit-extraction feedforward network", "ffn", "n",
                 ("gaussian", "x^2", "x^(-2)", "sinc2", "sin(2*pi*x/0.5)", "sin(2*pi*x/0.25)",
                  "log(x)(from 0.1)", "exp(x)", "exp(-x)"), (5, 10, 25, 50, 60), NormKind.SUP),
    5: TableSpec("Error, hybrid Fourier network", "fnn", "K/J",
                 ("gaussian", "x^2", "x^(-2)", "sinc2", "sin(2*pi*x)", "sin(4*pi*x)", "exp(x)",
                  "exp(-x)", "log(x)"), ((10, 5),), NormKind.L2_RMS, (-1.0, 1.0)),
}

CONSTRUCTIONS = ("resnet_eps1", "resnet_eps2", "taylor", "ffn", "fnn")


class ConfigError(ValueError):
    pass


def default_seed() -> int:
    env = os.environ.get("UAPPROX_SEED")
    return int(env) if env not in (None, "") else DEFAULT_SEED


@dataclasses.dataclass(frozen=True)
class RunConfig:
    construction: str
    functions: tuple[str, ...]
    sweep: tuple[Param, ...]
    norm: NormKind = NormKind.SUP
    table: Optional[int] = None
    grid_points: Optional[int] = None
    domain: Optional[tuple[float, float]] = None
    seed: int = DEFAULT_SEED
    label: str = "param"
    iters: int = 5000
    samples: int = 10000
    taylor_degree: int = FFN_DEGREE
    out_dir: Optional[Path] = None
    formats: tuple[str, ...] = ("csv",)

    def __post_init__(self):
        if self.construction not in CONSTRUCTIONS:
            raise ConfigError(f"unknown construction {self.construction!r}")
        if not self.functions:
            raise ConfigError("function list is empty")
        if not self.sweep:
            raise ConfigError("parameter sweep is empty")
        for fid in self.functions:
            targets.get(fid)  # raises KeyError for unknown ids
        for p in self.sweep:
            vals = p if isinstance(p, tuple) else (p,)
            if any(int(v) != v or v < 1 for v in vals):
                raise ConfigError(f"invalid sweep value {p!r}")
        for fmt in self.formats:
            if fmt not in ("csv", "md", "json"):
                raise ConfigError(f"unknown output format {fmt!r}")
        object.__setattr__(self, "norm", NormKind(self.norm))

    @classmethod
    def for_table(cls, table: int, norm: Optional[NormKind] = None,
                  seed: Optional[int] = None, **kw) -> "RunConfig":
        if table not in TABLES:
            raise ConfigError(f"no table {table!r}; choose 1..5")
        spec = TABLES[table]
        return cls(spec.construction, spec.functions, spec.sweep,
                   norm=spec.norm if norm is None else NormKind(norm), table=table,
                   domain=spec.domain, seed=default_seed() if seed is None else seed,
                   label=spec.label, grid_points=kw.pop("grid_points", spec.grid_points), **kw)


# -- cells ---------------------------------------------------------------------------


_CELL_ERRORS = (targets.SingularityError, targets.NoTaylorRule, bitnet.BoundError,
                EvaluationError, fourier.TrainingDivergence, fourier.SingularSystemError,
                ArithmeticError, ValueError, np.linalg.LinAlgError)


def _target(cfg: RunConfig, fid: str) -> targets.TargetFunction:
    f = targets.get(fid)
    return f.restrict(*cfg.domain) if cfg.domain else f


def _grid(cfg: RunConfig, f: targets.TargetFunction) -> Grid:
    if cfg.construction == "fnn":
        return fourier.sample_grid(f.domain, cfg.grid_points or cfg.samples)
    return Grid(f.domain, cfg.grid_points or 10001)


def _param_dict(cfg: RunConfig, p: Param) -> dict:
    if cfg.construction in ("resnet_eps1", "resnet_eps2"):
        return {"M": p}
    if cfg.construction == "taylor":
        return {"N": p}
    if cfg.construction == "ffn":
        return {"n": p, "N": cfg.taylor_degree}
    K, J = p if isinstance(p, tuple) else (p, 0)
    return {"K": K, "J": J, "seed": cfg.seed, "iters": cfg.iters, "samples": cfg.samples}


def _check_domain(f: targets.TargetFunction, grid: Grid) -> None:
    xs = grid.abscissae()
    with np.errstate(all="ignore"):
        ys = np.asarray(f(xs), dtype=float)
    bad = np.isnan(ys)
    if bad.any():
        raise EvaluationError(f"{f.id} is undefined at x={xs[np.argmax(bad)]:.6g}")


def _compute(cfg: RunConfig, f: targets.TargetFunction, grid: Grid, p: Param):
    kind = cfg.construction
    if kind in ("resnet_eps1", "resnet_eps2"):
        pw = trapnet.build_piecewise(f, p)
        if kind == "resnet_eps1":
            return trapnet.epsilon1_resnet(f, pw, grid, cfg.norm), None
        return None, trapnet.epsilon2_resnet(pw, grid=grid, norm=cfg.norm)
    if kind == "taylor":
        t = taylor.build_taylor(f, N=p)
        return taylor.epsilon1_taylor(f, t, grid, cfg.norm), None
    if kind == "ffn":
        t = dataclasses.replace(taylor.build_taylor(f, N=cfg.taylor_degree), source_id=f.id,
                                domain=f.domain)
        return None, bitnet.epsilon2_ffn(None, t, p, grid, cfg.norm)
    K, J = p if isinstance(p, tuple) else (p, 0)
    _check_domain(f, grid)
    if J:
        m0 = fourier.init_hybrid(f, K, J, cfg.seed, samples=cfg.samples)
        m, _ = fourier.train_gradient(m0, f, cfg.samples, cfg.iters, cfg.seed)
    else:
        m, _ = fourier.fit_single(f, K, cfg.samples)
    return fourier.table5_error(m, f, grid.points, cfg.norm), None


def run_cell(cfg: RunConfig, fid: str, p: Param) -> ErrorReport:
    f = _target(cfg, fid)
    grid = _grid(cfg, f)
    params = _param_dict(cfg, p)
    try:
        eps1, eps2 = _compute(cfg, f, grid, p)
    except _CELL_ERRORS as exc:
        reason = " ".join(str(exc).split()) or type(exc).__name__
        return ErrorReport(cfg.construction, fid, cfg.norm, grid, params, error=reason)
    return ErrorReport(cfg.construction, fid, cfg.norm, grid, params, epsilon1=eps1,
                       epsilon2=eps2)


def run_table(cfg: RunConfig) -> list[ErrorReport]:
    """One report per (parameter, function) cell, rows in sweep order."""
    reports = [run_cell(cfg, fid, p) for p in cfg.sweep for fid in cfg.functions]
    if cfg.out_dir is not None:
        write_outputs(cfg, reports)
    return reports


# -- output ----------------------------------------------------------------------------


def format_value(v: Optional[float]) -> str:
    if v is None:
        return ""
    if np.isnan(v):
        return "nan"
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.5e}"


def cell_text(r: ErrorReport) -> str:
    return f"NA:{r.error}" if r.error is not None else format_value(r.value)


def param_text(p: Param) -> str:
    return "/".join(str(v) for v in p) if isinstance(p, tuple) else str(p)


def _rows(cfg: RunConfig, reports: Sequence[ErrorReport]) -> list[list[str]]:
    width = len(cfg.functions)
    if len(reports) != width * len(cfg.sweep):
        raise ValueError("reports do not fill the table")
    return [[param_text(p)] + [cell_text(r) for r in reports[i * width:(i + 1) * width]]
            for i, p in enumerate(cfg.sweep)]


def to_csv(cfg: RunConfig, reports: Sequence[ErrorReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([cfg.label] + list(cfg.functions))
    w.writerows(_rows(cfg, reports))
    return buf.getvalue()


def to_markdown(cfg: RunConfig, reports: Sequence[ErrorReport]) -> str:
    head = [cfg.label] + list(cfg.functions)
    lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
    for row in _rows(cfg, reports):
        lines.append("| " + " | ".join(c.replace("|", "/") for c in row) + " |")
    title = TABLES[cfg.table].title if cfg.table in TABLES else cfg.construction
    return f"### {title} ({cfg.norm.value})\n\n" + "\n".join(lines) + "\n"


def to_json(cfg: RunConfig, reports: Sequence[ErrorReport]) -> str:
    return json.dumps({"table": cfg.table, "construction": cfg.construction,
                       "norm": cfg.norm.value, "seed": cfg.seed,
                       "cells": [r.to_dict() for r in reports]}, indent=2)


_WRITERS = {"csv": to_csv, "md": to_markdown, "json": to_json}


def write_outputs(cfg: RunConfig, reports: Sequence[ErrorReport]) -> list[Path]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"table{cfg.table}" if cfg.table else cfg.construction
    paths = []
    for fmt in cfg.formats:
        path = out / f"{stem}.{fmt}"
        path.write_text(_WRITERS[fmt](cfg, reports))
        paths.append(path)
    return paths


def failed(reports: Sequence[ErrorReport]) -> list[ErrorReport]:
    return [r for r in reports if r.error is not None]
