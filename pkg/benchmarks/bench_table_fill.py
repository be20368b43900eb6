"""Timing: vectorized parity-table fill vs a per-pair scalar loop.

The dense parity table is the only place where a Python-level inner loop
could dominate runtime.  The production path precomputes one small table per
mode and gathers products along the packed lower triangle with numpy; the
reference path below evaluates every unordered pair through the scalar
kernel.  The eigensolves themselves are LAPACK calls either way, so once the
fill is vectorized there is no hot Python loop left worth compiling.

    python benchmarks/bench_table_fill.py
"""

import math
import time

import numpy as np

from sbparity import (
    PerModeCap,
    SpectralLaw,
    TotalQuantaCap,
    bath_from_modes,
    d_matrix,
    discretize_bath,
    enumerate_basis,
    l_element,
)


def scalar_fill(basis, bath):
    """Reference: one kernel call per unordered pair."""
    prefactor = math.exp(-2.0 * bath.sum_q2)
    packed = np.empty(basis.dim * (basis.dim + 1) // 2)
    pos = 0
    for i, m in enumerate(basis.vectors):
        for j in range(i + 1):
            packed[pos] = prefactor * l_element(m, basis.vectors[j], bath)
            pos += 1
    return packed


def bench(label, basis, bath, repeats=3):
    t_vec = min(
        _timed(lambda: d_matrix(basis, bath)) for _ in range(repeats)
    )
    t_scalar = min(
        _timed(lambda: scalar_fill(basis, bath)) for _ in range(repeats)
    )
    check = d_matrix(basis, bath).d.packed
    assert np.allclose(check, scalar_fill(basis, bath), rtol=1e-12, atol=1e-300)
    print(
        f"{label:<28} dim {basis.dim:>4}   vectorized {t_vec * 1e3:8.2f} ms   "
        f"per-pair {t_scalar * 1e3:8.2f} ms   speedup {t_scalar / t_vec:6.1f}x"
    )


def _timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def main():
    single = bath_from_modes([(1.0, 1.0)])
    two = discretize_bath(SpectralLaw(0.3, 0.7, 1.0), 2, 2.0)
    three = discretize_bath(SpectralLaw(0.3, 0.7, 1.0), 3, 2.0)
    bench("single mode, cap 40", enumerate_basis(1, PerModeCap(40)), single)
    bench("single mode, cap 120", enumerate_basis(1, PerModeCap(120)), single)
    bench("two modes, cap 12", enumerate_basis(2, PerModeCap(12)), two)
    bench("three modes, total cap 10", enumerate_basis(3, TotalQuantaCap(10)), three)
    bench("three modes, total cap 16", enumerate_basis(3, TotalQuantaCap(16)), three)


if __name__ == "__main__":
    main()
