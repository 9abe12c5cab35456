# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: network forward passes and the double-layer Fourier terms.

Must stay bit-for-bit equivalent to ``_fallback.py``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sin, cos, isfinite
from libc.stdlib cimport malloc, free


cdef extern from "math.h" nogil:
    void sincos(double x, double *s, double *c)

cnp.import_array()


cdef double _fsum(double *terms, Py_ssize_t n, double *p) noexcept nogil:
    """Correctly rounded sum (same algorithm as CPython's math.fsum).

    ``p`` is scratch space for at least ``n`` partials.  Any non-finite term,
    or overflow of a partial, falls back to naive left-to-right summation.
    """
    cdef Py_ssize_t i, j, k, m = 0
    cdef double x, y, t, hi, lo, yr
    for k in range(n):
        if not isfinite(terms[k]):
            return _naive(terms, n)
    for k in range(n):
        x = terms[k]
        i = 0
        for j in range(m):
            y = p[j]
            if fabs(x) < fabs(y):
                t = x
                x = y
                y = t
            hi = x + y
            yr = hi - x
            lo = y - yr
            if lo != 0.0:
                p[i] = lo
                i += 1
            x = hi
        m = i
        if x != 0.0:
            if not isfinite(x):
                return _naive(terms, n)
            p[m] = x
            m += 1
    hi = 0.0
    lo = 0.0
    if m > 0:
        m -= 1
        hi = p[m]
        while m > 0:
            x = hi
            m -= 1
            y = p[m]
            hi = x + y
            yr = hi - x
            lo = y - yr
            if lo != 0.0:
                break
        if m > 0 and ((lo < 0.0 and p[m - 1] < 0.0) or (lo > 0.0 and p[m - 1] > 0.0)):
            y = lo * 2.0
            x = hi + y
            yr = x - hi
            if y == yr:
                hi = x
    return hi


cdef double _naive(double *terms, Py_ssize_t n) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t k
    for k in range(n):
        s += terms[k]
    return s


cdef inline double _activate(signed char code, double z) noexcept nogil:
    if code == 1:
        return z if z > 0.0 else 0.0
    if code == 2:
        return 1.0 if z >= 0.0 else 0.0
    if code == 3:
        return sin(z)
    return z


cdef void _run(const signed char[::1] act, const long long[::1] ptr,
               const long long[::1] src, const double[::1] w, const double[::1] bias,
               const double[::1] x, double *nodes, double *terms, double *scratch) noexcept nogil:
    cdef Py_ssize_t u, e, n_units = act.shape[0], k, n_in = x.shape[0]
    cdef double pre
    for k in range(n_in):
        nodes[k] = x[k]
    for u in range(n_units):
        k = 0
        for e in range(ptr[u], ptr[u + 1]):
            terms[k] = w[e] * nodes[src[e]]
            k += 1
        if k == 0:
            pre = bias[u]
        elif k == 1:
            pre = terms[0] + bias[u]
        else:
            terms[k] = bias[u]
            pre = _fsum(terms, k + 1, scratch)
        nodes[n_in + u] = _activate(act[u], pre)


cdef Py_ssize_t _max_fanin(const long long[::1] ptr, Py_ssize_t n_out) noexcept nogil:
    cdef Py_ssize_t u, best = n_out
    for u in range(ptr.shape[0] - 1):
        if ptr[u + 1] - ptr[u] > best:
            best = ptr[u + 1] - ptr[u]
    return best


def forward_nodes(const signed char[::1] act, const long long[::1] ptr,
                  const long long[::1] src, const double[::1] w, const double[::1] bias,
                  const double[::1] x):
    cdef Py_ssize_t n_units = act.shape[0]
    cdef Py_ssize_t width = _max_fanin(ptr, 0) + 2
    out = np.empty(n_units + x.shape[0])
    cdef double[::1] nodes = out
    cdef double *terms = <double *>malloc(width * sizeof(double))
    cdef double *scratch = <double *>malloc(width * sizeof(double))
    if terms == NULL or scratch == NULL:
        free(terms)
        free(scratch)
        raise MemoryError()
    try:
        _run(act, ptr, src, w, bias, x, &nodes[0], terms, scratch)
    finally:
        free(terms)
        free(scratch)
    return out


def forward_many(const signed char[::1] act, const long long[::1] ptr,
                 const long long[::1] src, const double[::1] w, const double[::1] bias,
                 const long long[::1] out_src, const double[::1] out_w, double out_bias,
                 const double[:, ::1] xs):
    cdef Py_ssize_t n_units = act.shape[0], n_x = xs.shape[0], n_out = out_src.shape[0]
    cdef Py_ssize_t width = _max_fanin(ptr, n_out) + 2
    cdef Py_ssize_t i, k
    result = np.empty(n_x)
    cdef double[::1] res = result
    cdef double *nodes = <double *>malloc((n_units + xs.shape[1]) * sizeof(double))
    cdef double *terms = <double *>malloc(width * sizeof(double))
    cdef double *scratch = <double *>malloc(width * sizeof(double))
    if nodes == NULL or terms == NULL or scratch == NULL:
        free(nodes)
        free(terms)
        free(scratch)
        raise MemoryError()
    try:
        with nogil:
            for i in range(n_x):
                _run(act, ptr, src, w, bias, xs[i, :], nodes, terms, scratch)
                for k in range(n_out):
                    terms[k] = out_w[k] * nodes[out_src[k]]
                terms[n_out] = out_bias
                res[i] = _fsum(terms, n_out + 1, scratch)
    finally:
        free(nodes)
        free(terms)
        free(scratch)
    return result


def double_layer_features(const double[::1] x, const double[::1] nu, const double[::1] psi,
                          const double[:, ::1] W, const double[::1] b):
    """Outer-unit outputs ``sin(W sin(nu x + psi) + b)`` as a (J, N) array."""
    cdef Py_ssize_t n = x.shape[0], L = nu.shape[0], J = b.shape[0]
    cdef Py_ssize_t i, j, l
    cdef double z
    out = np.empty((J, n))
    cdef double[:, ::1] O = out
    cdef double *inner = <double *>malloc((L + 1) * sizeof(double))
    if inner == NULL:
        raise MemoryError()
    with nogil:
        for i in range(n):
            for l in range(L):
                inner[l] = sin(nu[l] * x[i] + psi[l])
            for j in range(J):
                z = b[j]
                for l in range(L):
                    z = z + W[j, l] * inner[l]
                O[j, i] = sin(z)
    free(inner)
    return out


def double_layer_grad(const double[::1] x, const double[::1] g, const double[::1] c,
                      const double[::1] nu, const double[::1] psi,
                      const double[:, ::1] W, const double[::1] b):
    """Gradient of ``sum_i g_i * sum_j c_j sin(z_ij)`` w.r.t. nu, psi, W, b."""
    cdef Py_ssize_t n = x.shape[0], L = nu.shape[0], J = b.shape[0]
    cdef Py_ssize_t i, j, l
    cdef double z, dz, di
    g_nu = np.zeros(L)
    g_psi = np.zeros(L)
    g_W = np.zeros((J, L))
    g_b = np.zeros(J)
    cdef double[::1] gnu = g_nu, gpsi = g_psi, gb = g_b
    cdef double[:, ::1] gW = g_W
    cdef double *inner = <double *>malloc((L + 1) * sizeof(double))
    cdef double *dinner = <double *>malloc((L + 1) * sizeof(double))
    cdef double *dI = <double *>malloc((L + 1) * sizeof(double))
    if inner == NULL or dinner == NULL or dI == NULL:
        free(inner)
        free(dinner)
        free(dI)
        raise MemoryError()
    with nogil:
        for i in range(n):
            for l in range(L):
                inner[l] = sin(nu[l] * x[i] + psi[l])
                dinner[l] = cos(nu[l] * x[i] + psi[l])
                dI[l] = 0.0
            for j in range(J):
                z = b[j]
                for l in range(L):
                    z = z + W[j, l] * inner[l]
                dz = g[i] * c[j] * cos(z)
                gb[j] += dz
                for l in range(L):
                    gW[j, l] += dz * inner[l]
                    dI[l] += dz * W[j, l]
            for l in range(L):
                di = dI[l] * dinner[l]
                gnu[l] += di * x[i]
                gpsi[l] += di
    free(inner)
    free(dinner)
    free(dI)
    return g_nu, g_psi, g_W, g_b


def double_layer_terms(const double[::1] x, const double[::1] nu, const double[::1] psi,
                       const double[:, ::1] W, const double[::1] b):
    """Sines and cosines of the inner (L, N) and outer (J, N) pre-activations."""
    cdef Py_ssize_t n = x.shape[0], L = nu.shape[0], J = b.shape[0]
    cdef Py_ssize_t i, j, l
    cdef double z
    s_in, c_in = np.empty((L, n)), np.empty((L, n))
    s_out, c_out = np.empty((J, n)), np.empty((J, n))
    cdef double[:, ::1] SI = s_in, CI = c_in, SO = s_out, CO = c_out
    with nogil:
        for i in range(n):
            for l in range(L):
                sincos(nu[l] * x[i] + psi[l], &SI[l, i], &CI[l, i])
            for j in range(J):
                z = b[j]
                for l in range(L):
                    z = z + W[j, l] * SI[l, i]
                sincos(z, &SO[j, i], &CO[j, i])
    return s_in, c_in, s_out, c_out
