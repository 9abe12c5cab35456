"""The fixed zoo of univariate target functions.

Every target carries a vectorised evaluator, its default domain, the points
where it is undefined, and a Taylor-coefficient rule built from truncated
power-series recurrences (see :mod:`uapprox.series`).
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Optional

import numpy as np

from . import series


class SingularityError(ValueError):
    """Evaluation requested at (or numerically on top of) a singular point."""


class NoTaylorRule(ValueError):
    """The target has no Taylor expansion at the requested center."""


Jet = Callable[[float, int], np.ndarray]


@dataclasses.dataclass(frozen=True)
class TargetFunction:
    id: str
    domain: tuple[float, float]
    fn: Callable[[np.ndarray], np.ndarray] = dataclasses.field(repr=False, compare=False)
    jet: Optional[Jet] = dataclasses.field(default=None, repr=False, compare=False)
    singularities: tuple[float, ...] = ()
    center: float = 0.0
    rectangular: bool = False
    description: str = ""

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def restrict(self, lo: float, hi: float) -> "TargetFunction":
        return dataclasses.replace(self, domain=(float(lo), float(hi)))

    def taylor_coeffs(self, c: float, order: int) -> np.ndarray:
        """Coefficients ``f^(k)(c)/k!`` for ``k = 0..order``."""
        if self.jet is None:
            raise NoTaylorRule(f"{self.id} has no Taylor rule")
        if any(c == s for s in self.singularities):
            raise NoTaylorRule(f"{self.id} is singular at the center {c}")
        coeffs = self.jet(float(c), int(order))
        if not np.all(np.isfinite(coeffs)):
            raise NoTaylorRule(f"{self.id}: non-finite Taylor coefficients at {c}")
        return coeffs

    def taylor_rule(self, c: float, k: int) -> float:
        return float(self.taylor_coeffs(c, k)[k])


def evaluate(f: TargetFunction, x: float) -> float:
    """Scalar evaluation with the singularity check."""
    x = float(x)
    for s in f.singularities:
        if abs(x - s) < 1e-300:
            raise SingularityError(f"{f.id} is undefined at x={x!r}")
    return float(f(x))


def _sinc(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)


def _rect(lo: float, hi: float, cycles: int) -> Callable[[np.ndarray], np.ndarray]:
    pieces = 2 * cycles
    width = (hi - lo) / pieces

    def fn(x):
        idx = np.floor((np.asarray(x, dtype=float) - lo) / width)
        idx = np.clip(idx, 0, pieces - 1)
        return np.where(idx % 2 == 0, 1.0, -1.0)

    return fn


# -- jets ---------------------------------------------------------------------


def _jet_poly(coeffs_in_x: list[float]) -> Jet:
    def jet(c, n):
        u = series.variable(c, n)
        out = series.constant(0.0, n)
        for a in reversed(coeffs_in_x):
            out = series.mul(out, u)
            out[0] += a
        return out

    return jet


def _jet_gaussian(c, n):
    u = series.variable(c, n)
    return series.exp(-series.mul(u, u))


def _jet_inv_square(c, n):
    u = series.variable(c, n)
    return series.div(series.constant(1.0, n), series.mul(u, u))


def _jet_exp(sign: float) -> Jet:
    def jet(c, n):
        return series.exp(sign * series.variable(c, n))

    return jet


def _jet_sin(omega: float) -> Jet:
    def jet(c, n):
        return series.sin_cos(omega * series.variable(c, n))[0]

    return jet


def _jet_log(c, n):
    return series.log(series.variable(c, n))


def _sinc_series(c, n):
    if c == 0.0:
        # sin expanded at 0, then every term divided by x
        s = series.sin_cos(series.variable(0.0, n + 1))[0]
        return series.shift_down(s)[: n + 1]
    u = series.variable(c, n)
    return series.div(series.sin_cos(u)[0], u)


def _jet_sinc2(c, n):
    s = _sinc_series(c, n)
    return series.mul(s, s)


def _jet_sinc2_new(c, n):
    if c != 0.0:
        raise NoTaylorRule("sinc2_new is defined by the divide-by-x recipe at 0 only")
    return _jet_sinc2(0.0, n)


def _sin_target(label: str, omega: float, domain, description: str) -> TargetFunction:
    return TargetFunction(
        id=label,
        domain=domain,
        fn=lambda x, w=omega: np.sin(w * x),
        jet=_jet_sin(omega),
        description=description,
    )


def make_zoo() -> list[TargetFunction]:
    """Every target used by the five tables, each on its primary domain."""
    two_pi = 2.0 * math.pi
    return [
        TargetFunction("gaussian", (0.0, 1.0), lambda x: np.exp(-x * x), _jet_gaussian,
                       description="exp(-x^2)"),
        TargetFunction("x^2", (0.0, 1.0), lambda x: x * x, _jet_poly([0.0, 0.0, 1.0])),
        TargetFunction("x^(-2)", (0.0, 1.0), lambda x: 1.0 / (x * x), _jet_inv_square,
                       singularities=(0.0,), center=0.01),
        TargetFunction("sinc2", (0.0, 1.0), lambda x: _sinc(x) ** 2, _jet_sinc2,
                       center=0.01, description="(sin x / x)^2"),
        TargetFunction("sinc2_new", (0.0, 1.0), lambda x: _sinc(x) ** 2, _jet_sinc2_new,
                       description="(sin x / x)^2, coefficients from sin x divided by x"),
        _sin_target("sin(2*pi*x/5)", two_pi / 5.0, (0.0, 10.0), "period 5"),
        _sin_target("sin(2*pi*x/2.5)", two_pi / 2.5, (0.0, 10.0), "period 2.5"),
        _sin_target("sin(2*pi*x/0.5)", two_pi / 0.5, (0.0, 1.0), "period 0.5"),
        _sin_target("sin(2*pi*x/0.25)", two_pi / 0.25, (0.0, 1.0), "period 0.25"),
        _sin_target("sin(2*pi*x)", two_pi, (-1.0, 1.0), "period 1"),
        _sin_target("sin(4*pi*x)", 2.0 * two_pi, (-1.0, 1.0), "period 0.5"),
        TargetFunction("exp(x)", (0.0, 1.0), np.exp, _jet_exp(1.0)),
        TargetFunction("exp(-x)", (0.0, 1.0), lambda x: np.exp(-x), _jet_exp(-1.0), center=0.01),
        TargetFunction("log(x)", (0.01, 10.0), np.log, _jet_log, singularities=(0.0,),
                       center=1.0),
        TargetFunction("log(x)(from 0.1)", (0.1, 1.0), np.log, _jet_log, singularities=(0.0,),
                       center=1.0),
        TargetFunction("rect_1_to_10", (0.0, 10.0), _rect(0.0, 10.0, 1), rectangular=True,
                       description="+1 on [0,5), -1 on [5,10]"),
        TargetFunction("rect_1_to_10_2cycles", (0.0, 10.0), _rect(0.0, 10.0, 2),
                       rectangular=True, description="alternating +-1 on quarters of [0,10]"),
    ]


_ZOO = {f.id: f for f in make_zoo()}


def get(target_id: str) -> TargetFunction:
    try:
        return _ZOO[target_id]
    except KeyError:
        raise KeyError(f"unknown function id {target_id!r}") from None


def ids() -> list[str]:
    return list(_ZOO)
