"""
Benchmark of the modular elimination kernels.

    python3 benchmarks/bench_rref.py [--sizes 100 200 400] [--repeat 3] [--sympy]

Compares the numba kernel with the numpy fallback on random dense matrices
mod p, then times one end-to-end oracle computation in a subprocess per
backend (the backend is fixed at import time by PROLONGATION_NO_NUMBA).
With --sympy the exact rational RREF is also timed against sympy's.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from prolongation import _kernels
from prolongation.exact import ExactMatrix, elimination_prime, rref

ORACLE_SNIPPET = (
    "import time; from prolongation.tensorlab import classical_prolongations; "
    "from prolongation._kernels import backend_name; "
    "t = time.perf_counter(); r = classical_prolongations(4, 'riemannian', 'sym0(2)', 1); "
    "print(backend_name(), r.dims, round(time.perf_counter() - t, 3))"
)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def bench_kernels(sizes, repeat, seed):
    p = elimination_prime(0)
    rng = np.random.default_rng(seed)
    print(f"{'size':>6} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for m in sizes:
        # rank-deficient on purpose: half the rows are combinations of the rest
        half = rng.integers(0, p, size=(m // 2, m), dtype=np.int64)
        mix = rng.integers(0, 5, size=(m - m // 2, m // 2), dtype=np.int64)
        a = np.vstack([half, (mix @ half) % p])
        t_np = best_of(lambda: _kernels.rref_mod_p_numpy(a.copy(), p), repeat)
        if _kernels.rref_mod_p_numba is None:
            print(f"{m:>6} {t_np:>10.4f} {'n/a':>10} {'':>8}")
            continue
        _kernels.rref_mod_p_numba(a[:2, :2].copy(), p)  # compile outside the timing
        r_np = _kernels.rref_mod_p_numpy(a.copy(), p)
        r_nb = _kernels.rref_mod_p_numba(a.copy(), p)
        assert np.array_equal(r_np[0], r_nb[0]) and list(r_np[1]) == list(r_nb[1])
        t_nb = best_of(lambda: _kernels.rref_mod_p_numba(a.copy(), p), repeat)
        print(f"{m:>6} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.1f}")


def bench_sympy(m, seed):
    import sympy as sp

    rng = np.random.default_rng(seed)
    num = rng.integers(-9, 10, size=(m, m + 10), dtype=np.int64)
    num[m // 2 :] = (rng.integers(-2, 3, size=(m - m // 2, m // 2)) @ num[: m // 2])
    A = ExactMatrix(num, 7)
    t = time.perf_counter()
    R, piv = rref(A)
    t_ours = time.perf_counter() - t
    S = sp.Matrix(num.tolist()) / 7
    t = time.perf_counter()
    _, spiv = S.rref()
    t_sp = time.perf_counter() - t
    assert tuple(piv) == tuple(spiv)
    print(f"exact rref {m}x{m + 10}: package {t_ours:.3f} s, sympy {t_sp:.3f} s")


def bench_oracle():
    for flag in ("0", "1"):
        env = dict(os.environ, PROLONGATION_NO_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", ORACLE_SNIPPET], env=env, capture_output=True, text=True, check=True)
        print("oracle riemannian n=4 sym0(2):", out.stdout.strip())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sympy", action="store_true")
    ap.add_argument("--sympy-size", type=int, default=60)
    args = ap.parse_args()
    print(f"default backend: {_kernels.backend_name()}")
    bench_kernels(args.sizes, args.repeat, args.seed)
    bench_oracle()
    if args.sympy:
        bench_sympy(args.sympy_size, args.seed)


if __name__ == "__main__":
    main()
