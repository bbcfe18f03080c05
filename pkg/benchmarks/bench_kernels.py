"""Compare the compiled pattern kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--n 512] [--grid 200] [--repeat 5]
"""

import argparse
import time

import numpy as np

from nfkit import _kernels
from nfkit._kernels import fallback
from nfkit.geometry import Carrier, make_uniform_linear_array


def time_call(fn, *args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=512, help="number of array elements")
    parser.add_argument("--grid", type=int, default=200, help="grid side (angles and distances)")
    parser.add_argument("--repeat", type=int, default=5, help="timing repetitions (best kept)")
    args = parser.parse_args()

    carrier = Carrier(28e9)
    array = make_uniform_linear_array(args.n, carrier=carrier)
    rng = np.random.default_rng(0)
    weights = rng.standard_normal(args.n) + 1j * rng.standard_normal(args.n)
    weights /= np.linalg.norm(weights)
    basis = rng.standard_normal((args.n, 4)) + 1j * rng.standard_normal((args.n, 4))
    basis = np.ascontiguousarray(np.linalg.qr(basis)[0])
    angles = np.radians(np.linspace(10.0, 170.0, args.grid))
    dists = np.linspace(2.0, 200.0, args.grid)

    print(f"backend in use: {_kernels.BACKEND}")
    print(f"problem: {args.n} elements, {args.grid}x{args.grid} polar grid\n")

    cases = [
        ("pattern_gain_grid", (array.elements, weights, angles, dists, carrier.wavenumber)),
        ("projection_gain_grid", (array.elements, basis, angles, dists, carrier.wavenumber)),
    ]
    for name, call_args in cases:
        t_active, out_active = time_call(getattr(_kernels, name), *call_args, repeat=args.repeat)
        t_fallback, out_fallback = time_call(getattr(fallback, name), *call_args, repeat=args.repeat)
        err = float(np.max(np.abs(out_active - out_fallback)))
        speedup = t_fallback / t_active if t_active > 0 else float("inf")
        print(
            f"{name:22s} active={t_active * 1e3:8.2f} ms  "
            f"fallback={t_fallback * 1e3:8.2f} ms  "
            f"speedup={speedup:5.2f}x  max_abs_diff={err:.3e}"
        )


if __name__ == "__main__":
    main()
