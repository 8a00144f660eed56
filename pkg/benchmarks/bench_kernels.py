"""Compiled vs pure-Python kernel timings.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints one line per kernel: best-of-N seconds for each backend, the speedup
and the largest relative difference between the two results.
"""
import argparse
import timeit

import numpy as np

from wavebranch import _pykernels as py

try:
    from wavebranch import _ckernels as cy
except ImportError:
    cy = None


def cases():
    omega_int = np.array([0.0, 1.0, -1.0])  # Omega of w = 1 - 2p
    n = 2048
    y = np.linspace(0.0, 1.0, 2 * n + 1)
    c_half = 2.0 * np.cos(3 * y)
    diag = 2.0 + np.sin(np.arange(4096.0))
    off = -np.ones(4095)
    tau2 = np.linspace(0.0, 25.0, 201)
    return {
        "horner": lambda K: [K.horner(omega_int, x) for x in np.linspace(0, 1, 2000)],
        "quad_power": lambda K: K.quad_power(omega_int, 4.0, -1.5, 0.0, 1.0, 1, 1e-14, 1e-13)[0],
        "shoot_profile": lambda K: K.shoot_profile(c_half, 1.0 / n, 9.0)[0],
        "shoot_end": lambda K: K.shoot_end(c_half, 1.0 / n, tau2)[0],
        "sturm_count": lambda K: K.sturm_count(diag, off, np.linspace(0, 4, 64)),
        "tridiag_lowest": lambda K: K.tridiag_lowest(diag, off, 4, 1e-13),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if cy is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`")
        return
    print(f"{'kernel':16s} {'cython [s]':>12s} {'python [s]':>12s} {'speedup':>9s} {'max rel diff':>13s}")
    for name, fn in cases().items():
        tc = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat))
        tp = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        a = np.asarray(fn(cy), dtype=float)
        b = np.asarray(fn(py), dtype=float)
        diff = float(np.max(np.abs(a - b) / np.maximum(1e-300, np.abs(b))))
        print(f"{name:16s} {tc:12.3e} {tp:12.3e} {tp / tc:9.1f} {diff:13.2e}")


if __name__ == "__main__":
    main()
