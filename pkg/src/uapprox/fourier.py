"""Sinusoidal networks: single layer (a truncated Fourier series), double
layer (sines of sums of sines) and the hybrid that adds both.

Training eliminates the parameters that enter linearly (dc, skip amplitudes
and phases, outer amplitudes) by least squares at every step and runs Adam on
the rest (inner frequencies and phases, outer weights and biases).
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from typing import Optional

import numpy as np

from . import _backend
from .metrics import EvaluationError, Grid, NormKind, reduce_norm
from .netcore import NetworkGraph, unit
from .targets import TargetFunction

INIT_SCALE = 0.01


class SingularSystemError(ValueError):
    """Too few samples to determine the least-squares basis."""


class TrainingDivergence(FloatingPointError):
    """The training loss became non-finite."""


class Variant(str, enum.Enum):
    SINGLE = "single"
    DOUBLE = "double"
    HYBRID = "hybrid"


def _arr(v, shape=None) -> np.ndarray:
    a = np.array(v, dtype=float)
    return a.reshape(shape) if shape is not None else a


@dataclasses.dataclass(frozen=True, eq=False)
class FourierModel:
    """``dc + sum_k A_k sin(k w0 x + phi_k) + sum_j c_j sin(sum_l W_jl sin(nu_l x + psi_l) + b_j)``."""

    variant: Variant
    base_freq: float
    dc: float = 0.0
    amp: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(0))
    mult: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(0))
    phase: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(0))
    nu: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(0))
    psi: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(0))
    c: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(0))
    W: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros((0, 0)))
    b: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(0))
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        for name in ("amp", "mult", "phase", "nu", "psi", "c", "b"):
            object.__setattr__(self, name, _arr(getattr(self, name)).reshape(-1))
        J, L = len(self.c), len(self.nu)
        object.__setattr__(self, "W", _arr(self.W).reshape(J, L))
        if not len(self.amp) == len(self.mult) == len(self.phase):
            raise ValueError("skip units need amplitude, multiplier and phase")
        if len(self.psi) != L or len(self.b) != J:
            raise ValueError("inner/outer unit arrays disagree in length")
        if self.variant is Variant.SINGLE and (L or J):
            raise ValueError("a single-layer model has no double part")
        if self.variant is Variant.DOUBLE and len(self.amp):
            raise ValueError("a double-layer model has no skip units")

    @property
    def K(self) -> int:
        return len(self.amp)

    @property
    def L(self) -> int:
        return len(self.nu)

    @property
    def J(self) -> int:
        return len(self.c)

    @property
    def skip_units(self) -> list[tuple[float, float, float]]:
        return [(float(a), float(k), float(p)) for a, k, p in zip(self.amp, self.mult, self.phase)]

    @property
    def inner_units(self) -> list[tuple[float, float]]:
        return [(float(v), float(p)) for v, p in zip(self.nu, self.psi)]

    @property
    def outer_units(self) -> list[tuple[float, list[float], float]]:
        return [(float(c), [float(w) for w in row], float(b))
                for c, row, b in zip(self.c, self.W, self.b)]

    @property
    def parameter_count(self) -> int:
        return 3 * self.K + 2 * self.L + self.J * (2 + self.L) + 1

    def replace(self, **kw) -> "FourierModel":
        return dataclasses.replace(self, **kw)

    def __call__(self, x):
        return model_eval(self, x)


@dataclasses.dataclass(frozen=True)
class FitReport:
    final_loss: float
    iterations: int
    seed: Optional[int]
    parameter_count: int


# -- evaluation ------------------------------------------------------------------


def _skip_part(m: FourierModel, x: np.ndarray) -> np.ndarray:
    if not m.K:
        return np.zeros_like(x)
    arg = (m.mult * m.base_freq)[:, None] * x[None, :] + m.phase[:, None]
    return m.amp @ np.sin(arg)


def _double_features(m: FourierModel, x: np.ndarray) -> np.ndarray:
    return _backend.kernels.double_layer_features(
        np.ascontiguousarray(x), m.nu, m.psi, np.ascontiguousarray(m.W), m.b)


def _double_part(m: FourierModel, x: np.ndarray) -> np.ndarray:
    if not m.J:
        return np.zeros_like(x)
    return m.c @ _double_features(m, x)


def model_eval(m: FourierModel, x):
    scalar = np.isscalar(x)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = m.dc + _skip_part(m, xs) + _double_part(m, xs)
    return float(out[0]) if scalar else out


# -- single-layer least squares --------------------------------------------------


def sample_grid(domain: tuple[float, float], samples: int) -> Grid:
    # half-step offset: endpoints (often singular) are never sampled
    return Grid(domain, samples, offset=True)


def _rms(r: np.ndarray) -> float:
    return float(np.sqrt(np.mean(r * r)))


def _harmonic_basis(x: np.ndarray, w0: float, K: int) -> np.ndarray:
    k = np.arange(1, K + 1)
    arg = np.outer(x, k * w0)
    return np.hstack([np.ones((x.size, 1)), np.sin(arg), np.cos(arg)])


def _skip_from_coeffs(alpha: np.ndarray, beta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # alpha sin t + beta cos t = A sin(t + phi)
    return np.hypot(alpha, beta), np.arctan2(beta, alpha)


def fit_single(f: TargetFunction, K: int, samples: int = 10000) -> tuple[FourierModel, FitReport]:
    """Least-squares truncated Fourier series with ``w0 = 2 pi / (b - a)``."""
    if K < 1:
        raise ValueError("K must be at least 1")
    if samples < 4 * K + 2:
        raise SingularSystemError(f"{samples} samples cannot determine {2 * K + 1} coefficients")
    lo, hi = f.domain
    w0 = 2.0 * math.pi / (hi - lo)
    x = sample_grid(f.domain, samples).abscissae()
    with np.errstate(all="ignore"):
        y = np.asarray(f(x), dtype=float)
    if not np.all(np.isfinite(y)):
        raise EvaluationError(f"{f.id} is not finite on the sample grid")
    A = _harmonic_basis(x, w0, K)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    amp, phase = _skip_from_coeffs(coef[1:K + 1], coef[K + 1:])
    m = FourierModel(Variant.SINGLE, w0, float(coef[0]), amp, np.arange(1.0, K + 1), phase)
    loss = _rms(model_eval(m, x) - y)
    return m, FitReport(loss, 0, None, m.parameter_count)


# -- initialisation ----------------------------------------------------------------


def init_hybrid(f: TargetFunction, K: int, J: int, seed: int = 0, L: Optional[int] = None,
                samples: int = 10000) -> FourierModel:
    """Skip part from :func:`fit_single`; inner units at harmonics; small random outer units."""
    if K < 1 or J < 1:
        raise ValueError("K and J must be at least 1")
    L = J if L is None else L
    single, _ = fit_single(f, K, samples)
    rng = np.random.default_rng(seed)
    c = rng.uniform(-INIT_SCALE, INIT_SCALE, J)
    W = rng.uniform(-INIT_SCALE, INIT_SCALE, (J, L))
    b = rng.uniform(-INIT_SCALE, INIT_SCALE, J)
    return single.replace(variant=Variant.HYBRID, nu=np.arange(1.0, L + 1) * single.base_freq,
                          psi=np.zeros(L), c=c, W=W, b=b, seed=seed)


def init_double(f: TargetFunction, J: int, seed: int = 0, L: Optional[int] = None) -> FourierModel:
    L = J if L is None else L
    lo, hi = f.domain
    w0 = 2.0 * math.pi / (hi - lo)
    rng = np.random.default_rng(seed)
    return FourierModel(Variant.DOUBLE, w0, 0.0, nu=np.arange(1.0, L + 1) * w0, psi=np.zeros(L),
                        c=rng.uniform(-INIT_SCALE, INIT_SCALE, J),
                        W=rng.uniform(-INIT_SCALE, INIT_SCALE, (J, L)),
                        b=rng.uniform(-INIT_SCALE, INIT_SCALE, J), seed=seed)


# -- full-parameter loss and gradient ---------------------------------------------
#
# Flat layout: dc, amp(K), phase(K), nu(L), psi(L), c(J), W(J*L), b(J).
# Skip multipliers and the base frequency are structure, not parameters.


def pack(m: FourierModel) -> np.ndarray:
    return np.concatenate([[m.dc], m.amp, m.phase, m.nu, m.psi, m.c, m.W.ravel(), m.b])


def unpack(m: FourierModel, theta: np.ndarray) -> FourierModel:
    K, L, J = m.K, m.L, m.J
    cuts = np.cumsum([1, K, K, L, L, J, J * L])
    dc, amp, phase, nu, psi, c, W, b = np.split(np.asarray(theta, dtype=float), cuts)
    return m.replace(dc=float(dc[0]), amp=amp, phase=phase, nu=nu, psi=psi, c=c,
                     W=W.reshape(J, L), b=b)


def loss_and_grad(m: FourierModel, x: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean squared residual and its gradient in the :func:`pack` layout."""
    r = model_eval(m, x) - y
    n = x.size
    g = 2.0 * r / n
    arg = (m.mult * m.base_freq)[:, None] * x[None, :] + m.phase[:, None]
    g_amp = np.sin(arg) @ g
    g_phase = m.amp * (np.cos(arg) @ g)
    if m.J:
        feats = _double_features(m, x)
        g_c = feats @ g
        g_nu, g_psi, g_W, g_b = _backend.kernels.double_layer_grad(
            np.ascontiguousarray(x), g, m.c, m.nu, m.psi, np.ascontiguousarray(m.W), m.b)
    else:
        g_c = np.zeros(0)
        g_nu, g_psi, g_W, g_b = np.zeros(m.L), np.zeros(m.L), np.zeros((0, m.L)), np.zeros(0)
    grad = np.concatenate([[g.sum()], g_amp, g_phase, g_nu, g_psi, g_c,
                           np.asarray(g_W).ravel(), g_b])
    return float(np.mean(r * r)), grad


# -- training ---------------------------------------------------------------------


class _Projector:
    """Least squares over the fixed columns (dc and skip harmonics) plus the
    ``J`` outer features, done on the orthogonal complement of the fixed part."""

    def __init__(self, m: FourierModel, x: np.ndarray, y: np.ndarray):
        fixed = (_harmonic_basis(x, m.base_freq, m.K) if m.K else np.ones((x.size, 1)))
        self.K = m.K
        self.Q, self.R = np.linalg.qr(fixed)
        self.y = y
        self.y_perp = y - self.Q @ (self.Q.T @ y)

    def amplitudes(self, feats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Outer amplitudes and the model-minus-target residual."""
        fp = feats - (feats @ self.Q) @ self.Q.T
        c, *_ = np.linalg.lstsq(fp.T, self.y_perp, rcond=None)
        return c, fp.T @ c - self.y_perp

    def model(self, m: FourierModel, feats: np.ndarray, c: np.ndarray) -> FourierModel:
        coef = np.linalg.solve(self.R, self.Q.T @ (self.y - feats.T @ c))
        K = self.K
        amp, phase = _skip_from_coeffs(coef[1:K + 1], coef[K + 1:])
        return m.replace(dc=float(coef[0]), amp=amp, phase=phase, c=c)


def train_gradient(m0: FourierModel, f: TargetFunction, samples: int = 10000, iters: int = 5000,
                   seed: Optional[int] = None, lr: float = 0.01,
                   betas: tuple[float, float] = (0.9, 0.99)) -> tuple[FourierModel, FitReport]:
    """Full-batch Adam on the nonlinear parameters; linear ones solved exactly each step.

    The step size follows a cosine decay from ``lr`` to ``lr / 100``.  The
    returned model is the best iterate by RMS residual; the starting model and,
    for hybrids, its skip part alone (outer amplitudes zeroed) are candidates too.
    """
    if m0.variant is Variant.SINGLE:
        raise ValueError("train_gradient needs a double or hybrid model")
    if m0.K and not np.array_equal(m0.mult, np.arange(1.0, m0.K + 1)):
        raise ValueError("hybrid training expects skip multipliers 1..K")
    x = sample_grid(f.domain, samples).abscissae()
    with np.errstate(all="ignore"):
        y = np.asarray(f(x), dtype=float)
    if not np.all(np.isfinite(y)):
        raise TrainingDivergence(f"{f.id} is not finite on the sample grid; the loss is undefined")
    seed = m0.seed if seed is None else seed
    proj = _Projector(m0, x, y)

    L, J = m0.L, m0.J
    theta = np.concatenate([m0.nu, m0.psi, m0.W.ravel(), m0.b])
    mom, vel = np.zeros_like(theta), np.zeros_like(theta)
    (b1, b2), eps = betas, 1e-12
    best_it, best_theta, best_loss = None, theta, math.inf
    for it in range(1, iters + 1):
        nu, psi = theta[:L], theta[L:2 * L]
        W, b = theta[2 * L:2 * L + J * L].reshape(J, L), theta[2 * L + J * L:]
        s_in, c_in, s_out, c_out = _backend.kernels.double_layer_terms(x, nu, psi, W, b)
        c, r = proj.amplitudes(s_out)
        loss = _rms(r)
        if not math.isfinite(loss):
            raise TrainingDivergence(f"loss became non-finite at iteration {it}")
        if loss < best_loss:
            best_it, best_theta, best_loss = it, theta, loss
        if it == iters:
            break
        # at the least-squares amplitudes the reduced gradient is the partial one
        dz = (2.0 / x.size) * c[:, None] * r[None, :] * c_out
        dI = (W.T @ dz) * c_in
        grad = np.concatenate([dI @ x, dI.sum(axis=1), (dz @ s_in.T).ravel(), dz.sum(axis=1)])
        mom = b1 * mom + (1 - b1) * grad
        vel = b2 * vel + (1 - b2) * grad * grad
        step = lr * (0.01 + 0.99 * 0.5 * (1 + math.cos(math.pi * it / iters)))
        theta = theta - step * (mom / (1 - b1 ** it)) / (np.sqrt(vel / (1 - b2 ** it)) + eps)

    candidates = [m0]
    if m0.variant is Variant.HYBRID:
        candidates.append(m0.replace(c=np.zeros(J)))
    if best_it is not None:
        t = best_theta
        m = m0.replace(nu=t[:L], psi=t[L:2 * L], W=t[2 * L:2 * L + J * L].reshape(J, L),
                       b=t[2 * L + J * L:])
        feats = _double_features(m, x)
        c, _ = proj.amplitudes(feats)
        candidates.append(proj.model(m, feats, c))
    # rank candidates by the residual of the model as evaluated, not the projection
    best, best_loss = None, math.inf
    for cand in candidates:
        loss = _rms(model_eval(cand, x) - y)
        if not math.isfinite(loss):
            raise TrainingDivergence(f"non-finite loss for {f.id}")
        if loss < best_loss:
            best, best_loss = cand, loss
    return best.replace(seed=seed), FitReport(best_loss, iters, seed, best.parameter_count)


# -- errors and lowering ------------------------------------------------------------


def table5_error(m: FourierModel, f: TargetFunction, samples: int = 10000,
                 norm: NormKind = NormKind.L2_RMS) -> float:
    grid = sample_grid(f.domain, samples)
    x = grid.abscissae()
    with np.errstate(all="ignore"):
        r = model_eval(m, x) - np.asarray(f(x), dtype=float)
    return reduce_norm(r, grid, norm)


def lower_to_network(m: FourierModel) -> NetworkGraph:
    """Sine-activation network: skip units and inner units share the first layer."""
    first = [unit("sine", {0: float(k * m.base_freq)}, float(p))
             for k, p in zip(m.mult, m.phase)]
    first += [unit("sine", {0: float(v)}, float(p)) for v, p in zip(m.nu, m.psi)]
    skip_w = tuple(float(a) for a in m.amp) + (0.0,) * m.L
    if not m.J:
        return NetworkGraph((tuple(first),), skip_w, output_bias=m.dc)
    K = m.K
    outer = tuple(unit("sine", {K + l: float(m.W[j, l]) for l in range(m.L)}, float(m.b[j]))
                  for j in range(m.J))
    skips = ((0, skip_w),) if K else ()
    return NetworkGraph((tuple(first), outer), tuple(float(c) for c in m.c), skips,
                        output_bias=m.dc)


# -- JSON --------------------------------------------------------------------------


def to_dict(m: FourierModel) -> dict:
    return {
        "variant": m.variant.value,
        "base_freq": m.base_freq,
        "dc": m.dc,
        "skip_units": [{"amplitude": a, "multiplier": k, "phase": p} for a, k, p in m.skip_units],
        "inner_units": [{"frequency": v, "phase": p} for v, p in m.inner_units],
        "outer_units": [{"amplitude": c, "weights": w, "bias": b} for c, w, b in m.outer_units],
        "seed": m.seed,
    }


def from_dict(doc: dict) -> FourierModel:
    skip, inner, outer = doc.get("skip_units", []), doc.get("inner_units", []), doc.get("outer_units", [])
    L = len(inner)
    return FourierModel(
        Variant(doc["variant"]), float(doc["base_freq"]), float(doc.get("dc", 0.0)),
        amp=[u["amplitude"] for u in skip], mult=[u["multiplier"] for u in skip],
        phase=[u["phase"] for u in skip],
        nu=[u["frequency"] for u in inner], psi=[u["phase"] for u in inner],
        c=[u["amplitude"] for u in outer],
        W=np.array([u["weights"] for u in outer], dtype=float).reshape(len(outer), L),
        b=[u["bias"] for u in outer], seed=doc.get("seed"),
    )


def dumps(m: FourierModel) -> str:
    return json.dumps(to_dict(m))


def loads(text: str) -> FourierModel:
    return from_dict(json.loads(text))
