"""Degree-N Taylor models and the target-vs-polynomial error."""

from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np

from .metrics import Grid, NormKind, norm_of_diff
from .targets import TargetFunction


@dataclasses.dataclass(frozen=True)
class TaylorModel:
    center: float
    coeffs: tuple[float, ...]
    source_id: str = ""
    domain: Optional[tuple[float, float]] = None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return eval_taylor(self, x)


def build_taylor(f: TargetFunction, c: Optional[float] = None, N: int = 5) -> TaylorModel:
    """Taylor polynomial of ``f`` around ``c`` (defaults to the target's center)."""
    if N < 0:
        raise ValueError("degree must be non-negative")
    c = f.center if c is None else float(c)
    coeffs = f.taylor_coeffs(c, N)
    return TaylorModel(c, tuple(float(a) for a in coeffs), f.id, f.domain)


def eval_taylor(t: TaylorModel, x):
    """Horner evaluation in powers of ``x - center``.

    Scalars go through plain float arithmetic; arrays through numpy.  Both
    perform the identical sequence of rounded operations.
    """
    scalar = np.isscalar(x)
    d = np.asarray(x, dtype=float) - t.center
    acc = np.full_like(d, t.coeffs[-1])
    with np.errstate(over="ignore", invalid="ignore"):
        for a in t.coeffs[-2::-1]:
            acc = acc * d + a
    return float(acc) if scalar else acc


def epsilon1_taylor(f: TargetFunction, t: TaylorModel, grid: Optional[Grid] = None,
                    norm: NormKind = NormKind.SUP) -> float:
    grid = grid or Grid(f.domain)
    xs = grid.abscissae()
    keep = np.ones(xs.shape, dtype=bool)
    for s in f.singularities:
        keep &= xs != s
    return norm_of_diff(f, t, grid, norm, mask=keep)
