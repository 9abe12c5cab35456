"""Fast property checks bundled with the package (used by ``uapprox selftest``)."""

from __future__ import annotations

import math
from typing import Callable, Iterator

import numpy as np

from . import _backend, bitnet, fourier, targets, taylor, trapnet
from .metrics import Grid
from .netcore import forward, forward_many


def _gadget() -> str:
    for k in (1.0, 2.0, 10.0):
        net = bitnet.bit_product_gadget(k)
        for a in (0.0, 1.0):
            for b in (0.0, 1.0):
                if forward(net, (a, b)) != a * b:
                    return f"AND fails at k={k}, ({a}, {b})"
        for x2 in np.linspace(0.0, 1.0, 101):
            if forward(net, (1.0, x2)) != x2 or forward(net, (0.0, x2)) != 0.0:
                return f"gating fails at k={k}, x2={x2}"
    return ""


def _bits() -> str:
    rng = np.random.default_rng(0)
    for x in rng.uniform(0.0, 1.0, 50):
        for n in (5, 20, 60):
            got = bitnet.extract_bits(x, n).value
            if got != bitnet.truncate(x, n):
                return f"extract_bits({x}, {n}) = {got}"
    return ""


def _poly_net() -> str:
    f = targets.get("exp(x)")
    t = taylor.build_taylor(f, N=6)
    xs = np.linspace(0.0, 1.0, 201)
    for n in (8, 30, 60):
        net = bitnet.build_poly_net(t, n, f.domain)
        gap = np.max(np.abs(forward_many(net, xs) - taylor.eval_taylor(t, bitnet.quantize(t, xs, n))))
        if gap > 1e-9:
            return f"n={n}: gap {gap:.3g}"
    return ""


def _resnet() -> str:
    f = targets.get("sin(2*pi*x/5)")
    for mode in ("rectangular", "trapezoidal"):
        p = trapnet.build_piecewise(f, 20, mode)
        e = trapnet.epsilon2_resnet(p, grid=Grid(p.domain, 2001))
        if e > 1e-9:
            return f"{mode}: {e:.3g}"
    return ""


def _fourier_lowering() -> str:
    rng = np.random.default_rng(3)
    m = fourier.FourierModel("hybrid", math.pi, 0.3, rng.normal(size=3), [1.0, 2.0, 3.0],
                             rng.normal(size=3), rng.normal(size=2), rng.normal(size=2),
                             rng.normal(size=2), rng.normal(size=(2, 2)), rng.normal(size=2))
    xs = np.linspace(-1.0, 1.0, 1001)
    gap = np.max(np.abs(forward_many(fourier.lower_to_network(m), xs) - fourier.model_eval(m, xs)))
    return "" if gap <= 1e-10 else f"gap {gap:.3g}"


def _recovery() -> str:
    f = targets.get("sin(2*pi*x)")
    m, rep = fourier.fit_single(f, 3, 2000)
    if rep.final_loss > 1e-8 or abs(m.amp[1] - 1.0) > 1e-6:
        return f"residual {rep.final_loss:.3g}, A_2 = {m.amp[1]}"
    return ""


def _backends() -> str:
    if _backend.compiled is None:
        return ""
    net = bitnet.build_poly_net(taylor.build_taylor(targets.get("gaussian"), N=5), 12, (0.0, 1.0))
    xs = np.linspace(0.0, 1.0, 101)
    prev = _backend.name
    try:
        _backend.use("python")
        a = forward_many(net, xs)
        _backend.use("cython")
        b = forward_many(net, xs)
    finally:
        _backend.use(prev)
    return "" if np.array_equal(a, b) else "compiled and pure-Python forward passes differ"


CHECKS: list[tuple[str, Callable[[], str]]] = [
    ("bit product gadget truth table and gating", _gadget),
    ("bit extraction equals truncation", _bits),
    ("polynomial network equals quantised Horner", _poly_net),
    ("piecewise network equals piecewise model", _resnet),
    ("Fourier network equals model evaluation", _fourier_lowering),
    ("exact recovery of an in-span target", _recovery),
    ("kernel backends agree bit for bit", _backends),
]


def run_all() -> Iterator[tuple[str, bool, str]]:
    for name, check in CHECKS:
        try:
            detail = check()
        except Exception as exc:  # report, keep going
            detail = f"{type(exc).__name__}: {exc}"
        yield name, not detail, detail
