"""Pure-Python implementations of the kernels in ``_kernels.pyx``.

Network forward passes are bit-identical to the compiled versions.  The
Fourier helpers agree to rounding (summation order differs).
"""

from __future__ import annotations

import math

import numpy as np


def _naive(terms):
    s = 0.0
    for t in terms:
        s += t
    return s


def _fsum(terms):
    for t in terms:
        if not math.isfinite(t):
            return _naive(terms)
    try:
        return math.fsum(terms) + 0.0
    except OverflowError:
        return _naive(terms)


def _run(act, ptr, src, w, bias, x):
    n_in = len(x)
    nodes = [float(v) for v in x] + [0.0] * len(act)
    sin = math.sin
    for u in range(len(act)):
        lo, hi = ptr[u], ptr[u + 1]
        k = hi - lo
        if k == 0:
            pre = bias[u]
        elif k == 1:
            pre = w[lo] * nodes[src[lo]] + bias[u]
        else:
            terms = [w[e] * nodes[src[e]] for e in range(lo, hi)]
            terms.append(bias[u])
            pre = _fsum(terms)
        code = act[u]
        v = n_in + u
        if code == 1:
            nodes[v] = pre if pre > 0.0 else 0.0
        elif code == 2:
            nodes[v] = 1.0 if pre >= 0.0 else 0.0
        elif code == 3:
            nodes[v] = sin(pre)
        else:
            nodes[v] = pre
    return nodes


def _lists(act, ptr, src, w, bias):
    return ([int(a) for a in act], [int(p) for p in ptr], [int(s) for s in src],
            [float(v) for v in w], [float(v) for v in bias])


def forward_nodes(act, ptr, src, w, bias, x):
    return np.array(_run(*_lists(act, ptr, src, w, bias), list(x)))


def forward_many(act, ptr, src, w, bias, out_src, out_w, out_bias, xs):
    prog = _lists(act, ptr, src, w, bias)
    out_src = [int(s) for s in out_src]
    out_w = [float(v) for v in out_w]
    res = np.empty(len(xs))
    for i, x in enumerate(xs):
        nodes = _run(*prog, list(x))
        terms = [wt * nodes[s] for s, wt in zip(out_src, out_w)]
        terms.append(float(out_bias))
        res[i] = _fsum(terms)
    return res


def _inner(x, nu, psi):
    return np.sin(nu[:, None] * x[None, :] + psi[:, None])


def _pre_outer(inner, W, b):
    z = np.repeat(b[:, None], inner.shape[1], axis=1)
    for l in range(inner.shape[0]):
        z = z + W[:, l, None] * inner[l][None, :]
    return z


def double_layer_features(x, nu, psi, W, b):
    return np.sin(_pre_outer(_inner(x, nu, psi), W, b))


def double_layer_grad(x, g, c, nu, psi, W, b):
    arg = nu[:, None] * x[None, :] + psi[:, None]
    inner, dinner = np.sin(arg), np.cos(arg)
    dz = g[None, :] * c[:, None] * np.cos(_pre_outer(inner, W, b))
    dI = (W.T @ dz) * dinner
    return dI @ x, dI.sum(axis=1), dz @ inner.T, dz.sum(axis=1)


def double_layer_terms(x, nu, psi, W, b):
    arg = nu[:, None] * x[None, :] + psi[:, None]
    inner = np.sin(arg)
    z = _pre_outer(inner, W, b)
    return inner, np.cos(arg), np.sin(z), np.cos(z)
