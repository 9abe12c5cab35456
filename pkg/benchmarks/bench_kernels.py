"""Compiled versus pure-Python kernels on the workloads that dominate the tables.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from uapprox import _backend, bitnet, fourier, taylor, targets
from uapprox.netcore import forward_many


def _best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads():
    f = targets.get("exp(x)")
    net = bitnet.build_poly_net(taylor.build_taylor(f, N=10), 30, f.domain)
    xs = np.linspace(0.0, 1.0, 2001)
    yield (f"bit network forward ({sum(map(len, net.layers))} units, {xs.size} points)",
           lambda: forward_many(net, xs))

    rng = np.random.default_rng(0)
    x = np.linspace(-1.0, 1.0, 10000)
    nu, psi = rng.normal(size=5), rng.normal(size=5)
    W, b = rng.normal(size=(5, 5)), rng.normal(size=5)
    yield ("double-sine terms (J=L=5, 10000 samples)",
           lambda: _backend.kernels.double_layer_terms(x, nu, psi, W, b))

    g = targets.get("gaussian").restrict(-1.0, 1.0)
    m0 = fourier.init_hybrid(g, 10, 5, seed=1)
    yield ("hybrid training, 50 iterations", lambda: fourier.train_gradient(m0, g, 10000, 50))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _backend.compiled is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e .` first")
    print(f"{'workload':58s} {'cython s':>10s} {'python s':>10s} {'speedup':>8s}")
    for label, fn in workloads():
        res = {}
        for which in ("cython", "python"):
            _backend.use(which)
            fn()  # warm up
            res[which] = _best(fn, args.repeat)
        _backend.use("cython")
        print(f"{label:58s} {res['cython']:10.4f} {res['python']:10.4f} "
              f"{res['python'] / res['cython']:7.1f}x")


if __name__ == "__main__":
    main()
