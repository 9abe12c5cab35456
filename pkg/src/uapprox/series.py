"""Truncated power series arithmetic.

A series is a 1-D float array ``s`` with ``s[k]`` the coefficient of ``h**k``
where ``h = x - c``.  All operations truncate to the length of their inputs.
The transcendental functions use the standard first-order recurrences
(``f' = g(u) u'`` solved coefficient by coefficient), which stay well
conditioned up to degrees in the hundreds.
"""

from __future__ import annotations

import numpy as np


def variable(c: float, order: int) -> np.ndarray:
    """Series of the identity ``x`` expanded around ``c``."""
    s = np.zeros(order + 1)
    s[0] = c
    if order >= 1:
        s[1] = 1.0
    return s


def constant(value: float, order: int) -> np.ndarray:
    s = np.zeros(order + 1)
    s[0] = value
    return s


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = len(a)
    return np.convolve(a, b)[:n]


def div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if b[0] == 0.0:
        raise ZeroDivisionError("series division by a series vanishing at the center")
    n = len(a)
    q = np.zeros(n)
    for k in range(n):
        q[k] = (a[k] - np.dot(q[:k], b[k:0:-1])) / b[0]
    return q


def exp(u: np.ndarray) -> np.ndarray:
    n = len(u)
    e = np.zeros(n)
    e[0] = np.exp(u[0])
    # k e_k = sum_{j=1}^{k} j u_j e_{k-j}
    j = np.arange(n, dtype=float)
    for k in range(1, n):
        e[k] = np.dot(j[1 : k + 1] * u[1 : k + 1], e[k - 1 :: -1][:k]) / k
    return e


def sin_cos(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = len(u)
    s = np.zeros(n)
    c = np.zeros(n)
    s[0] = np.sin(u[0])
    c[0] = np.cos(u[0])
    j = np.arange(n, dtype=float)
    for k in range(1, n):
        ju = j[1 : k + 1] * u[1 : k + 1]
        s[k] = np.dot(ju, c[k - 1 :: -1][:k]) / k
        c[k] = -np.dot(ju, s[k - 1 :: -1][:k]) / k
    return s, c


def log(u: np.ndarray) -> np.ndarray:
    if u[0] <= 0.0:
        raise ValueError("log series needs a positive value at the center")
    n = len(u)
    out = np.zeros(n)
    out[0] = np.log(u[0])
    j = np.arange(n, dtype=float)
    # u * L' = u'  =>  k u0 L_k = k u_k - sum_{j=1}^{k-1} j L_j u_{k-j}
    for k in range(1, n):
        acc = k * u[k] - np.dot(j[1:k] * out[1:k], u[k - 1 : 0 : -1])
        out[k] = acc / (k * u[0])
    return out


def shift_down(a: np.ndarray) -> np.ndarray:
    """Divide a series with zero constant term by ``h`` (one order is lost)."""
    if a[0] != 0.0:
        raise ValueError("series has a nonzero constant term")
    out = np.zeros(len(a))
    out[:-1] = a[1:]
    return out
