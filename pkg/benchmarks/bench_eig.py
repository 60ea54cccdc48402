"""Timing comparison of the pure-Python and compiled Jacobi eigensolvers.

Runs both backends on dense random Hermitian matrices and on the banded
Gram matrices the pipeline actually produces, checks that eigenvalues
agree, and prints a timing table.

Usage: python3 benchmarks/bench_eig.py [--sizes 16,32,64,96] [--repeats 3]
"""

import argparse
import time

import numpy as np

from krein_realize import GramSpec, OperatorSeries, build_form_matrix
from krein_realize import _jacobi as jacobi_py
from krein_realize.linalg import _jacobi_cy


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2.0


def gram_matrix(n):
    series = OperatorSeries.from_scalars([1.0, 3.0], 0.8)
    return build_form_matrix(GramSpec(series, 0.5, n)).ptilde


def best_time(fn, repeats):
    timings = []
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        timings.append(time.perf_counter() - start)
    return min(timings), result


def bench_case(label, h, repeats):
    t_py, (w_py, _, sweeps_py) = best_time(
        lambda: jacobi_py.jacobi_eigh(h.copy()), repeats
    )
    if _jacobi_cy is None:
        print("%-18s %6d  %10.2f ms  %10s  %8s  sweeps %d" % (
            label, h.shape[0], 1e3 * t_py, "n/a", "n/a", sweeps_py))
        return
    t_cy, (w_cy, _, sweeps_cy) = best_time(
        lambda: _jacobi_cy.jacobi_eigh(h.copy()), repeats
    )
    drift = float(np.max(np.abs(w_py - w_cy)))
    if drift > 1e-10 * (1.0 + float(np.max(np.abs(w_py)))):
        raise SystemExit(
            "backend disagreement on %s: max eigenvalue drift %g"
            % (label, drift)
        )
    print("%-18s %6d  %10.2f ms  %7.2f ms  %7.1fx  sweeps %d/%d" % (
        label, h.shape[0], 1e3 * t_py, 1e3 * t_cy, t_py / t_cy,
        sweeps_py, sweeps_cy))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="16,32,64,96",
                        help="comma-separated matrix sizes")
    parser.add_argument("--repeats", type=int, default=3,
                        help="repetitions per case (best time wins)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rng = np.random.default_rng(args.seed)

    if _jacobi_cy is None:
        print("compiled backend not built; timing pure Python only")
    print("%-18s %6s  %13s  %10s  %8s" % (
        "case", "n", "python", "compiled", "speedup"))
    for n in sizes:
        bench_case("dense random", random_hermitian(rng, n), args.repeats)
    for n in sizes:
        bench_case("gram degree-one", gram_matrix(n), args.repeats)


if __name__ == "__main__":
    main()
