"""Benchmark the compiled statevector kernels against the pure-numpy fallback.

Times the four gate kernels (one-qubit, diagonal, permutation, dense) on
random inputs for a range of wire counts and prints the speedup of the
compiled backend.  Run as::

    python3 benchmarks/bench_kernels.py [--wires 12 16 20] [--repeats 20]
"""

import argparse
import time

import numpy as np

from pdoenc import _kernels_py

try:
    from pdoenc import _kernels
except ImportError:
    _kernels = None


def random_state(n, rng):
    psi = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return psi / np.linalg.norm(psi)


def make_cases(n, rng):
    """One representative call per kernel: (name, func-name, args)."""
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    k = min(n, 6)
    wires = np.arange(1, k + 1, dtype=np.int64)
    perm = rng.permutation(1 << k).astype(np.int64)
    diag = np.exp(2j * np.pi * rng.random(1 << k))
    q, _ = np.linalg.qr(
        rng.standard_normal((1 << k, 1 << k))
        + 1j * rng.standard_normal((1 << k, 1 << k))
    )
    ctrl = 1 << (n - 1)
    return [
        ("apply_1q", (n, 0, h, ctrl, 0)),
        ("apply_diag", (n, wires, diag, 0, 0)),
        ("apply_perm", (n, wires, perm, 0, 0)),
        ("apply_dense", (n, wires, q, 0, 0)),
    ]


def bench(impl, name, psi, args, repeats):
    func = getattr(impl, name)
    best = np.inf
    for _ in range(repeats):
        work = psi.copy()
        t0 = time.perf_counter()
        func(work, *args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--wires", type=int, nargs="+", default=[12, 16, 20])
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    if _kernels is None:
        print("compiled extension unavailable; timing the fallback only")
    header = f"{'kernel':<12} {'wires':>5} {'python':>12} {'cython':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in args.wires:
        psi = random_state(n, rng)
        for name, call_args in make_cases(n, rng):
            t_py = bench(_kernels_py, name, psi, call_args, args.repeats)
            if _kernels is not None:
                t_cy = bench(_kernels, name, psi, call_args, args.repeats)
                print(
                    f"{name:<12} {n:>5} {t_py * 1e3:>10.3f}ms "
                    f"{t_cy * 1e3:>10.3f}ms {t_py / t_cy:>7.1f}x"
                )
            else:
                print(f"{name:<12} {n:>5} {t_py * 1e3:>10.3f}ms {'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()
