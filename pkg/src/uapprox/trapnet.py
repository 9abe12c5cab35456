"""Piecewise (rectangular / trapezoidal) approximants and their residual-network lowering.

Rectangular mode holds the left sample over each cell.  Trapezoidal mode joins
consecutive samples linearly, so the region under every cell is a trapezoid.
Both lower to the same residual chain: each stage adds
``(v_i - v_{i-1}) * ramp((x - start_i) / w)`` to a running sum, where
``ramp(z) = min(1, relu(z))``.  For trapezoids ``w`` is the cell width and the
ramp spans the cell; for rectangles ``w = a * 1e-6`` and the ramp is a
near-step just left of the node.
"""

from __future__ import annotations

import dataclasses
import enum
from typing import Optional

import numpy as np

from .metrics import Grid, NormKind, norm_of_diff, reduce_norm
from .netcore import NetworkGraph, forward_many, unit
from .targets import SingularityError, TargetFunction

STEP_RAMP = 1e-6


class Mode(str, enum.Enum):
    RECTANGULAR = "rectangular"
    TRAPEZOIDAL = "trapezoidal"


@dataclasses.dataclass(frozen=True)
class PiecewiseModel:
    mode: Mode
    M: int
    nodes: np.ndarray = dataclasses.field(repr=False)
    values: np.ndarray = dataclasses.field(repr=False)
    domain: tuple[float, float] = (0.0, 1.0)

    @property
    def spacing(self) -> float:
        lo, hi = self.domain
        return (hi - lo) / self.M

    @property
    def ramp_width(self) -> float:
        return self.spacing if self.mode is Mode.TRAPEZOIDAL else self.spacing * STEP_RAMP

    def __call__(self, x):
        return eval_piecewise(self, x)


def build_piecewise(f: TargetFunction, M: int, mode: Mode | str = Mode.RECTANGULAR,
                    domain: Optional[tuple[float, float]] = None) -> PiecewiseModel:
    if M < 1:
        raise ValueError("need at least one cell")
    mode = Mode(mode)
    lo, hi = domain or f.domain
    nodes = np.linspace(lo, hi, M + 1)
    a = (hi - lo) / M
    for s in f.singularities:
        hit = nodes == s
        if hit.any():
            nudged = s + 1e-9 * a
            if not lo <= nudged <= hi:
                raise SingularityError(f"node {s} of {f.id} cannot be moved inside the domain")
            nodes = np.where(hit, nudged, nodes)
    with np.errstate(all="ignore"):
        values = np.asarray(f(nodes), dtype=float)
    if not np.all(np.isfinite(values)):
        raise SingularityError(f"{f.id} is not finite at every sample node")
    return PiecewiseModel(mode, M, nodes, values, (float(lo), float(hi)))


def eval_piecewise(p: PiecewiseModel, x):
    scalar = np.isscalar(x)
    xs = np.asarray(x, dtype=float)
    lo, hi = p.domain
    if np.any((xs < lo) | (xs > hi)):
        raise ValueError(f"abscissa outside the domain {p.domain}")
    cell = np.clip(np.searchsorted(p.nodes, xs, side="right") - 1, 0, p.M - 1)
    if p.mode is Mode.RECTANGULAR:
        out = p.values[cell]
    else:
        left, right = p.nodes[cell], p.nodes[cell + 1]
        t = (xs - left) / (right - left)
        out = p.values[cell] + t * (p.values[cell + 1] - p.values[cell])
        out = np.where(xs == left, p.values[cell], out)
    return float(out) if scalar else out


def _ramps(p: PiecewiseModel) -> list[tuple[float, float]]:
    """``(start, jump)`` for every ramp; each rises over ``[start, start + w]``."""
    w = p.ramp_width
    v = p.values
    if p.mode is Mode.RECTANGULAR:
        # near-steps ending at each interior node
        return [(p.nodes[i] - w, v[i] - v[i - 1]) for i in range(1, p.M)]
    return [(p.nodes[i - 1], v[i] - v[i - 1]) for i in range(1, p.M + 1)]


def lower_to_resnet(p: PiecewiseModel) -> NetworkGraph:
    """Residual chain carrying ``[x, acc]`` with one four-layer stage per ramp.

    A stage computes ``u = relu(z)`` with ``z = (x - start) / w``, then
    ``relu(u - 1)``, then the clamped ramp ``h = u - relu(u - 1)`` (exactly 0
    or 1 off the ramp), and finally ``acc + jump * h``.
    """
    w = p.ramp_width
    layers = [(unit("identity", {0: 1.0}), unit("identity", {}, float(p.values[0])))]
    for start, jump in _ramps(p):
        if jump == 0.0:
            continue
        x_, acc = unit("identity", {0: 1.0}), unit("identity", {1: 1.0})
        layers.append((x_, acc, unit("relu", {0: 1.0 / w}, -start / w)))
        layers.append((x_, acc, unit("identity", {2: 1.0}), unit("relu", {2: 1.0}, -1.0)))
        layers.append((x_, acc, unit("identity", {2: 1.0, 3: -1.0})))
        layers.append((x_, unit("identity", {1: 1.0, 2: float(jump)})))
    return NetworkGraph(tuple(layers), (0.0, 1.0))


def ramp_mask(p: PiecewiseModel, xs: np.ndarray) -> np.ndarray:
    """True for abscissae more than one ramp width from every interior node.

    Always true for trapezoids, whose ramps are the approximant itself.
    """
    keep = np.ones(np.shape(xs), dtype=bool)
    if p.mode is Mode.TRAPEZOIDAL:
        return keep
    w = p.ramp_width
    for node in p.nodes[1:-1]:
        keep &= np.abs(xs - node) > w
    return keep


def _grid_for(f: TargetFunction, p: PiecewiseModel, grid: Optional[Grid]) -> Grid:
    return grid or Grid(p.domain)


def epsilon1_resnet(f: TargetFunction, p: PiecewiseModel, grid: Optional[Grid] = None,
                    norm: NormKind = NormKind.L1) -> float:
    """Target versus its piecewise approximant."""
    grid = _grid_for(f, p, grid)
    xs = grid.abscissae()
    keep = np.ones(xs.shape, dtype=bool)
    for s in f.singularities:
        keep &= xs != s
    return norm_of_diff(f, p, grid, norm, mask=keep)


def epsilon2_resnet(p: PiecewiseModel, net: Optional[NetworkGraph] = None,
                    grid: Optional[Grid] = None, norm: NormKind = NormKind.SUP) -> float:
    """Piecewise approximant versus its network, off the near-step ramp bands."""
    net = net or lower_to_resnet(p)
    grid = grid or Grid(p.domain)
    xs = grid.abscissae()
    keep = ramp_mask(p, xs)
    diff = eval_piecewise(p, xs[keep]) - forward_many(net, xs[keep])
    return reduce_norm(diff, grid, norm)
