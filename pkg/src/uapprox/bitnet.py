"""Step/ReLU feedforward construction: binary digits of the input, bit-gated
products, and a Horner evaluation of a Taylor polynomial on the quantised input.

Layout of :func:`build_poly_net` (``d = x - c``; ``S`` is the smallest power of
two with ``|d| <= S`` on the domain):

* one layer splitting ``d`` into ``relu(d)``, ``relu(-d)`` and the sign bit
  ``step(d)``;
* ``n`` extractor layers producing the bits of ``v = |d| / S``;
* one layer of AND gadgets pairing every bit with the sign bit;
* three layers per Horner step: split the accumulator into positive and
  negative parts, gate each part by every signed bit, and sum the gated terms
  with weights ``+-S 2^-(i+1)``.

Every gated term is an exact product and units use correctly rounded
summation, so each Horner step yields ``fl(acc * d_q)``.  Wherever the
quantisation is exact (``d_q == d``) the network reproduces
:func:`uapprox.taylor.eval_taylor` bit for bit.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Optional

import numpy as np

from . import targets
from .metrics import Grid, NormKind, reduce_norm
from .netcore import NetworkGraph, Unit, forward_layers, forward_many, unit
from .taylor import TaylorModel, eval_taylor

MAX_BITS = 64
BOUND = 1e6


class BoundError(OverflowError):
    """Horner accumulators cannot be brought inside the gadget bound."""


@dataclasses.dataclass(frozen=True)
class BitExpansion:
    n: int
    bits: tuple[int, ...]
    value: float


class _Stack:
    """Builds layers by naming signals instead of tracking unit indices."""

    def __init__(self, inputs: list[str]):
        self.layers: list[list[Unit]] = []
        self.index = {name: i for i, name in enumerate(inputs)}
        self.n_inputs = len(inputs)

    def add(self, new: list[tuple[str, str, dict[str, float], float]],
            carry: list[str] = ()):
        units, index = [], {}
        for name, act, edges, bias in new:
            index[name] = len(units)
            units.append(unit(act, {self.index[s]: w for s, w in edges.items()}, bias))
        for name in carry:
            index[name] = len(units)
            units.append(unit("identity", {self.index[name]: 1.0}))
        self.layers.append(units)
        self.index = index

    def graph(self, out: dict[str, float], bias: float = 0.0) -> NetworkGraph:
        weights = [0.0] * len(self.layers[-1])
        for name, w in out.items():
            weights[self.index[name]] = w
        return NetworkGraph(tuple(tuple(l) for l in self.layers), tuple(weights),
                            output_bias=bias, n_inputs=self.n_inputs)


def bit_product_gadget(k: float = 1.0) -> NetworkGraph:
    """Two-input, one-ReLU network computing ``max{0, k(x1 - 1) + x2}``."""
    if k < 1:
        raise ValueError(f"gadget scale k must be >= 1, got {k}")
    s = _Stack(["x1", "x2"])
    s.add([("y", "relu", {"x1": k, "x2": 1.0}, -k)])
    return s.graph({"y": 1.0})


def required_bits(eps: float) -> int:
    """Bits needed for an ``eps``-accurate binary expansion."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    return math.ceil(math.log2(1.0 / eps)) + 1


def _extract(s: _Stack, n: int, source: dict[str, float], carry: list[str]) -> list[str]:
    """Append ``n`` extractor layers expanding ``sum(source)``; returns bit names.

    Layer i holds the residual ``r_i`` (with ``r_1`` the source and
    ``r_{i+1} = 2 r_i - b_i``), the bit ``b_i = step(r_i - 1/2)``, the carried
    signals and all earlier bits.
    """
    s.add([("r1", "identity", source, 0.0), ("b1", "binary_step", source, -0.5)], carry)
    for i in range(2, n + 1):
        prev = {f"r{i-1}": 2.0, f"b{i-1}": -1.0}
        s.add([(f"r{i}", "identity", prev, 0.0), (f"b{i}", "binary_step", prev, -0.5)],
              list(carry) + [f"b{j}" for j in range(1, i)])
    return [f"b{j}" for j in range(1, n + 1)]


def build_bit_extractor(n: int) -> NetworkGraph:
    """``n`` layers of step/identity units; the output is ``sum_i b_i 2^-i``."""
    if not 1 <= n <= MAX_BITS:
        raise ValueError(f"bit count must be in 1..{MAX_BITS}")
    s = _Stack(["x"])
    bits = _extract(s, n, {"x": 1.0}, [])
    return s.graph({b: 2.0 ** -(i + 1) for i, b in enumerate(bits)})


def _read_bits(net: NetworkGraph, x: float, n: int) -> tuple[int, ...]:
    last = forward_layers(net, x)[-1]
    # last layer: r_n, b_n, b_1..b_{n-1}
    return tuple(int(v) for v in list(last[2:2 + n - 1]) + [last[1]])


def extract_bits(x: float, n: int) -> BitExpansion:
    x = float(x)
    if not 0.0 <= x < 1.0:
        raise ValueError(f"x={x} is outside [0, 1)")
    bits = _read_bits(build_bit_extractor(n), x, n)
    value = math.fsum(b * 2.0 ** -(i + 1) for i, b in enumerate(bits))
    return BitExpansion(n, bits, value)


def truncate(v, n: int):
    """``floor(v 2^n) / 2^n``, the value the extractor reconstructs.

    At ``v = 1`` every bit fires, so the extractor saturates at ``1 - 2^-n``.
    """
    scale = 2.0 ** n
    return np.minimum(np.floor(np.asarray(v, dtype=float) * scale), scale - 1.0) / scale


# -- polynomial networks --------------------------------------------------------


def _pow2_at_least(d: float) -> float:
    if d <= 0.0:
        return 1.0
    m, e = math.frexp(d)
    return d if m == 0.5 else math.ldexp(1.0, e)


def expansion_scale(t: TaylorModel, domain: Optional[tuple[float, float]] = None) -> float:
    lo, hi = domain or t.domain or (0.0, 1.0)
    return _pow2_at_least(max(abs(lo - t.center), abs(hi - t.center)))


def quantize(t: TaylorModel, x, n: int, domain=None):
    """Input the polynomial network actually evaluates: ``c + sign(d) S trunc(|d|/S)``."""
    S = expansion_scale(t, domain)
    d = np.asarray(x, dtype=float) - t.center
    dq = np.sign(d) * S * truncate(np.abs(d) / S, n)
    return t.center + dq


def _horner_scale(coeffs: tuple[float, ...], S: float) -> int:
    """Binary exponent e such that accumulators scaled by 2^-e stay within BOUND."""
    bound, worst = 0.0, 0.0
    for a in coeffs[:0:-1]:  # a_N .. a_1 feed gated accumulators
        bound = bound * S + abs(a)
        worst = max(worst, bound)
    if not math.isfinite(worst):
        raise BoundError("Horner accumulator bound is not finite")
    if worst <= BOUND:
        return 0
    e = math.ceil(math.log2(worst / BOUND))
    if e > 1000:
        raise BoundError(f"accumulators of size {worst:.3g} cannot be rescaled")
    tiny = np.finfo(float).tiny * 2.0 ** 60
    if any(a != 0.0 and abs(math.ldexp(a, -e)) < tiny for a in coeffs):
        raise BoundError("rescaling would push coefficients into the subnormal range")
    return e


def build_poly_net(t: TaylorModel, n: int, domain=None) -> NetworkGraph:
    """Network evaluating ``t`` at the ``n``-bit quantisation of its input."""
    if not 1 <= n <= MAX_BITS:
        raise ValueError(f"bit count must be in 1..{MAX_BITS}")
    S = expansion_scale(t, domain)
    coeffs = t.coeffs
    e = _horner_scale(coeffs, S)
    scaled = [math.ldexp(a, -e) for a in coeffs]
    c = t.center

    s = _Stack(["x"])
    s.add([
        ("dp", "relu", {"x": 1.0}, -c),
        ("dm", "relu", {"x": -1.0}, c),
        ("sg", "binary_step", {"x": 1.0}, -c),
    ])
    bits = _extract(s, n, {"dp": 1.0 / S, "dm": 1.0 / S}, ["sg"])
    # AND of each bit with the sign bit and with its complement (gadget, k = 1)
    pos = [f"bp{i}" for i in range(n)]
    neg = [f"bm{i}" for i in range(n)]
    s.add([(pos[i], "relu", {b: 1.0, "sg": 1.0}, -1.0) for i, b in enumerate(bits)]
          + [(neg[i], "relu", {b: 1.0, "sg": -1.0}, 0.0) for i, b in enumerate(bits)])
    signed = pos + neg

    N = len(coeffs) - 1
    if N == 0:
        return s.graph({}, bias=coeffs[0])
    K = BOUND
    p_edges: dict[str, float] = {}  # empty for the leading coefficient
    for k in range(N - 1, -1, -1):
        a = scaled[k + 1]
        s.add([("ap", "relu", dict(p_edges), a),
               ("am", "relu", {name: -w for name, w in p_edges.items()}, -a)], signed)
        gates, terms = [], {}
        for i in range(n):
            wgt = S * 2.0 ** -(i + 1)
            for tag, bit, acc, sign in (("pp", pos[i], "ap", 1.0), ("mp", pos[i], "am", -1.0),
                                        ("pm", neg[i], "ap", -1.0), ("mm", neg[i], "am", 1.0)):
                name = f"g{tag}{i}"
                gates.append((name, "relu", {bit: K, acc: 1.0}, -K))
                terms[name] = sign * wgt
        s.add(gates, signed if k > 0 else [])
        s.add([("p", "identity", terms, 0.0)], signed if k > 0 else [])
        p_edges = {"p": 1.0}
    return s.graph({"p": math.ldexp(1.0, e)}, bias=coeffs[0])


def epsilon2_ffn(f_id: Optional[str], t: TaylorModel, n: int, grid: Optional[Grid] = None,
                 norm: NormKind = NormKind.SUP, net: Optional[NetworkGraph] = None) -> float:
    """Norm over the grid of network output minus the Taylor polynomial."""
    grid = grid or Grid(t.domain)
    net = net or build_poly_net(t, n, grid.domain)
    xs = grid.abscissae()
    if f_id is not None:
        for sing in targets.get(f_id).singularities:
            xs = xs[xs != sing]
    out = forward_many(net, xs)
    ref = eval_taylor(t, xs)
    with np.errstate(invalid="ignore"):
        diff = np.where(out == ref, 0.0, out - ref)
    return reduce_norm(diff, grid, norm)
