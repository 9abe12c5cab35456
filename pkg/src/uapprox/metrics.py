"""Evaluation grids, norms of differences, and the error report record."""

from __future__ import annotations

import dataclasses
import datetime as _dt
import enum
import json
from typing import Callable, Optional

import numpy as np

Evaluable = Callable[[np.ndarray], np.ndarray]


class EvaluationError(ValueError):
    pass


class NormKind(str, enum.Enum):
    SUP = "sup"
    L2_RMS = "l2_rms"
    L2_UNNORMALIZED = "l2_unnormalized"
    L1 = "l1"

    @classmethod
    def parse(cls, text: str) -> "NormKind":
        aliases = {"rms": cls.L2_RMS, "l2": cls.L2_UNNORMALIZED, "inf": cls.SUP,
                   "max": cls.SUP}
        if text in aliases:
            return aliases[text]
        return cls(text)


@dataclasses.dataclass(frozen=True)
class Grid:
    domain: tuple[float, float]
    points: int = 10001
    offset: bool = False

    def __post_init__(self):
        if self.points < 2:
            raise ValueError("a grid needs at least two points")
        lo, hi = self.domain
        if not hi > lo:
            raise ValueError(f"empty domain {self.domain}")

    @property
    def step(self) -> float:
        lo, hi = self.domain
        return (hi - lo) / (self.points if self.offset else self.points - 1)

    def abscissae(self) -> np.ndarray:
        lo, hi = self.domain
        if self.offset:
            return lo + (np.arange(self.points) + 0.5) * self.step
        return np.linspace(lo, hi, self.points)


def reduce_norm(diff: np.ndarray, grid: Grid, norm: NormKind) -> float:
    """Collapse pointwise differences on ``grid`` into one number."""
    d = np.abs(np.asarray(diff, dtype=float))
    if d.size == 0:
        return 0.0
    norm = NormKind(norm)
    if norm is NormKind.SUP:
        return float(d.max())
    if norm is NormKind.L2_RMS:
        return float(np.sqrt(np.mean(d * d)))
    if norm is NormKind.L2_UNNORMALIZED:
        return float(np.sqrt(np.sum(d * d)))
    # l1: integral of |g - h| over the domain
    lo, hi = grid.domain
    if grid.offset or d.size != grid.points:
        return float(np.mean(d) * (hi - lo))
    return float(np.trapezoid(d, dx=grid.step))


def _sample(fn: Evaluable, xs: np.ndarray, label: str) -> np.ndarray:
    with np.errstate(all="ignore"):
        vals = np.asarray(fn(xs), dtype=float)
    if vals.shape != xs.shape:
        vals = np.broadcast_to(vals, xs.shape)
    bad = np.isnan(vals)
    if bad.any():
        x0 = xs[np.argmax(bad)]
        raise EvaluationError(f"{label} is undefined at x={float(x0)!r}")
    return vals


def norm_of_diff(g: Evaluable, h: Evaluable, grid: Grid, norm: NormKind,
                 mask: Optional[np.ndarray] = None) -> float:
    """Norm of ``g - h`` sampled on ``grid``; ``mask`` keeps a subset of points."""
    xs = grid.abscissae()
    gv = _sample(g, xs, "first operand")
    hv = _sample(h, xs, "second operand")
    with np.errstate(invalid="ignore", over="ignore"):
        diff = gv - hv
    # equal infinities count as agreement
    diff = np.where(gv == hv, 0.0, diff)
    if mask is not None:
        diff = diff[mask]
    return reduce_norm(diff, grid, norm)


@dataclasses.dataclass
class ErrorReport:
    construction: str
    function: str
    norm: NormKind
    grid: Grid
    params: dict
    epsilon1: Optional[float] = None
    epsilon2: Optional[float] = None
    error: Optional[str] = None
    timestamp: str = dataclasses.field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())

    def __post_init__(self):
        if self.epsilon1 is None and self.epsilon2 is None and self.error is None:
            raise ValueError("a report needs at least one epsilon (or an error reason)")

    @property
    def value(self) -> Optional[float]:
        return self.epsilon2 if self.epsilon1 is None else self.epsilon1

    CSV_COLUMNS = ("construction", "function", "params", "norm", "grid_lo", "grid_hi",
                   "grid_points", "grid_offset", "epsilon1", "epsilon2", "error")

    def csv_row(self) -> list[str]:
        return [
            self.construction, self.function,
            json.dumps(self.params, sort_keys=True), self.norm.value,
            repr(self.grid.domain[0]), repr(self.grid.domain[1]),
            str(self.grid.points), str(int(self.grid.offset)),
            "" if self.epsilon1 is None else repr(self.epsilon1),
            "" if self.epsilon2 is None else repr(self.epsilon2),
            self.error or "",
        ]

    def to_dict(self) -> dict:
        return {
            "construction": self.construction, "function": self.function,
            "params": self.params, "norm": self.norm.value,
            "grid": {"domain": list(self.grid.domain), "points": self.grid.points,
                     "offset": self.grid.offset},
            "epsilon1": self.epsilon1, "epsilon2": self.epsilon2,
            "error": self.error, "timestamp": self.timestamp,
        }
