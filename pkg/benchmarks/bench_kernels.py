"""Numba vs NumPy timings for the real-backend kernels.

    python3 benchmarks/bench_kernels.py [--repeat 7]

Each kernel runs on inputs shaped like the ones the package feeds it, then
the verify ensemble is timed end to end with GHR_DISABLE_NUMBA toggled.
"""
import argparse
import os
import timeit

import numpy as np

from ghr import _kernels
from ghr.oracle import run_ensemble


def workloads(rng):
    out = []
    for n in (3, 6, 12):
        a = rng.standard_normal((n, n))
        out.append((f"lu_det {n}x{n}", "lu_det", (a,)))
    for rows, dim in ((3, 8), (7, 24), (12, 64)):
        x = rng.standard_normal((rows, dim))
        out.append((f"mgs_reorth {rows}x{dim}", "mgs_reorth", (x, np.full(rows, 1e-20))))
    for levels in (16, 256):
        e = rng.standard_normal(levels)
        p = rng.uniform(size=levels)
        out.append((f"spectral_moments {levels} levels, order 24", "spectral_moments", (e, p / p.sum(), 24)))
    kappa = np.concatenate([[0.0], rng.uniform(size=24)])
    out.append(("cumulants_to_central order 24", "cumulants_to_central", (kappa, _kernels._binomials(24), 24)))
    return out


def _parts(result):
    return result if isinstance(result, tuple) else (result,)


def best(fn, args, repeat, number):
    return min(timeit.repeat(lambda: fn(*args), repeat=repeat, number=number)) / number


def bench_kernels(repeat):
    fast = _kernels.numba_kernels()
    rows = []
    for label, name, args in workloads(np.random.default_rng(0)):
        ref = getattr(_kernels.NUMPY, name)
        t_np = best(ref, args, repeat, 200)
        if fast is None:
            rows.append((label, t_np, None))
            continue
        jitted = getattr(fast, name)
        jitted(*args)  # compile outside the timed region
        for x, y in zip(_parts(ref(*args)), _parts(jitted(*args))):
            assert np.allclose(x, y, rtol=1e-10, atol=1e-12), f"{label}: backends disagree"
        rows.append((label, t_np, best(jitted, args, repeat, 200)))
    return rows


def bench_ensemble(repeat):
    def once():
        run_ensemble([4, 6, 8, 12], range(25), 5)

    out = {}
    saved = os.environ.get("GHR_DISABLE_NUMBA")
    try:
        for flag, name in (("1", "numpy"), ("0", "numba")):
            os.environ["GHR_DISABLE_NUMBA"] = flag
            once()
            out[name] = min(timeit.repeat(once, repeat=max(repeat // 2, 1), number=1))
    finally:
        if saved is None:
            os.environ.pop("GHR_DISABLE_NUMBA", None)
        else:
            os.environ["GHR_DISABLE_NUMBA"] = saved
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=7)
    args = parser.parse_args()

    print(f"{'kernel':42s} {'numpy us':>10s} {'numba us':>10s} {'speedup':>8s}")
    for label, t_np, t_nb in bench_kernels(args.repeat):
        if t_nb is None:
            print(f"{label:42s} {t_np * 1e6:10.2f} {'n/a':>10s}")
        else:
            print(f"{label:42s} {t_np * 1e6:10.2f} {t_nb * 1e6:10.2f} {t_np / t_nb:7.1f}x")
    ens = bench_ensemble(args.repeat)
    print(f"\nverify ensemble (100 models, k_max 5): numpy {ens['numpy']:.3f}s, numba {ens['numba']:.3f}s")


if __name__ == "__main__":
    main()
