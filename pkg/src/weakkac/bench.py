"""Timing comparison of the jitted and plain numpy kernel paths.

Run as ``python -m weakkac.bench [--dim N] [--repeat R]``.  Reports the best
wall time over R runs for each hot kernel on a random structure tensor of the
requested dimension.  When numba is unavailable (or WKA_NO_NUMBA is set) only
the numpy column is produced.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import kernels


def _inputs(dim: int, seed: int):
    rng = np.random.default_rng(seed)
    mult = rng.standard_normal((dim, dim, dim)) \
        + 1j * rng.standard_normal((dim, dim, dim))
    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    rows = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return np.ascontiguousarray(mult), np.ascontiguousarray(x), \
        np.ascontiguousarray(rows)


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(dim: int, repeat: int, seed: int = 74) -> list[tuple[str, float, float]]:
    """Times each kernel; returns (name, numpy_seconds, numba_seconds) rows.

    The numba column is NaN when the jitted path is not loaded.
    """
    mult, x, rows = _inputs(dim, seed)
    cases = [
        ("multiply", lambda f: f(mult, x, x)),
        ("product_table", lambda f: f(mult, rows, rows)),
        ("assoc_residual", lambda f: f(mult)),
    ]
    out = []
    for name, call in cases:
        np_fn = getattr(kernels, f"_{name}_np")
        t_np = _best(lambda: call(np_fn), repeat)
        t_nb = float("nan")
        if kernels.HAS_NUMBA:
            nb_fn = getattr(kernels, f"_{name}_nb")
            call(nb_fn)  # pay JIT compilation outside the timed region
            t_nb = _best(lambda: call(nb_fn), repeat)
        out.append((name, t_np, t_nb))
    return out


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m weakkac.bench",
        description="compare the numba and numpy kernel paths")
    parser.add_argument("--dim", type=int, default=24,
                        help="algebra dimension for the synthetic tensors")
    parser.add_argument("--repeat", type=int, default=5,
                        help="runs per kernel; the best time is reported")
    parser.add_argument("--seed", type=int, default=74)
    args = parser.parse_args(argv)

    rows = run(args.dim, args.repeat, args.seed)
    print(f"kernel timings at dim {args.dim} (best of {args.repeat})")
    print(f"{'kernel':<16} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, t_np, t_nb in rows:
        if np.isnan(t_nb):
            print(f"{name:<16} {t_np:>12.3e} {'-':>12} {'-':>9}")
        else:
            print(f"{name:<16} {t_np:>12.3e} {t_nb:>12.3e} "
                  f"{t_np / t_nb:>8.1f}x")
    if not kernels.HAS_NUMBA:
        print("numba path not loaded; timings cover the numpy fallback only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
