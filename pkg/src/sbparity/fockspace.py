"""Truncated multi-mode occupation bases and the matrix elements of the
bosonic parity factor between displaced oscillator number states.

The central kernel is the single-mode overlap factor

    L(m, n; q) = sum_{j=0}^{min(m,n)} (-1)**j * sqrt(m! n!) * (2q)**(m+n-2j)
                 / ((m-j)! (n-j)! j!)

whose multi-mode product, scaled by exp(-2 * sum_k q_k**2), gives the parity
matrix element D between displaced number states.  The alternating sum
cancels catastrophically when evaluated naively, so every term is formed as
sign * exp(log-magnitude) with log-factorials and the terms are accumulated
by compensated (Neumaier) summation in descending magnitude.  An exact
rational evaluation backs the unit tests, and :func:`overlap_oracle` provides
an independent route through the bare number basis.

The sign convention fixed by the oracle under q = +lam/(2*omega):
D(0, 1) = +2q * exp(-2q**2) for a single mode.  Branch spectra are invariant
under flipping the sign of every odd row (a similarity transform), which is
covered by a property test.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .bath import BathModel
from .errors import CapacityError, ConvergenceError, ParameterError
from .symmat import SymmetricMatrix

__all__ = [
    "PerModeCap",
    "TotalQuantaCap",
    "default_policy",
    "BasisSet",
    "enumerate_basis",
    "l_element_single",
    "l_element",
    "l_row",
    "l_row_squared_logsum",
    "l_scaled_rational",
    "single_mode_l_table",
    "ParityElementTable",
    "d_matrix",
    "overlap_oracle",
    "FACTORIAL_GUARD",
    "MAX_BASIS_STATES",
]

# Occupations above this would overflow Gamma in double precision anyway;
# everything downstream relies on staying below it.
FACTORIAL_GUARD = 170

# Default cap on enumerated basis dimension.
MAX_BASIS_STATES = 200_000

# Default cap on dense parity-table dimension (memory bound, ~dim**2/2 floats).
MAX_TABLE_DIM = 5_000

_LGAMMA = math.lgamma
_NEG_INF = float("-inf")


@dataclass(frozen=True)
class PerModeCap:
    """Keep occupation vectors with every entry <= cap."""

    cap: int
    kind = "per-mode"


@dataclass(frozen=True)
class TotalQuantaCap:
    """Keep occupation vectors whose entries sum to <= cap."""

    cap: int
    kind = "total-quanta"


def default_policy(n_modes: int, cap: int):
    """Per-mode cap for one or two modes, total-quanta cap beyond that."""
    return PerModeCap(cap) if n_modes <= 2 else TotalQuantaCap(cap)


@dataclass(frozen=True)
class BasisSet:
    """Lexicographically ordered occupation vectors under a truncation policy.

    Index 0 is always the all-zeros vector; ``index_of`` inverts ``vectors``.
    Immutable after construction.
    """

    n_modes: int
    policy: PerModeCap | TotalQuantaCap
    vectors: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @cached_property
    def occupations(self) -> np.ndarray:
        occ = np.array(self.vectors, dtype=np.int64).reshape(self.dim, self.n_modes)
        occ.setflags(write=False)
        return occ

    @cached_property
    def _index(self) -> dict:
        return {v: i for i, v in enumerate(self.vectors)}

    def index_of(self, vec) -> int:
        return self._index[tuple(int(v) for v in vec)]


def _total_quanta_vectors(n_modes: int, cap: int):
    vec = [0] * n_modes
    out = []

    def rec(pos, budget):
        if pos == n_modes - 1:
            for v in range(budget + 1):
                vec[pos] = v
                out.append(tuple(vec))
            vec[pos] = 0
            return
        for v in range(budget + 1):
            vec[pos] = v
            rec(pos + 1, budget - v)
        vec[pos] = 0

    rec(0, cap)
    return out


def enumerate_basis(n_modes: int, policy, max_states: int = MAX_BASIS_STATES) -> BasisSet:
    """Enumerate the truncated basis in lexicographic order.

    Raises
    ------
    CapacityError
        If the basis dimension would exceed ``max_states``.
    """
    if not isinstance(n_modes, int) or n_modes < 1:
        raise ParameterError(f"n_modes must be an integer >= 1, got {n_modes}")
    if policy.cap < 0:
        raise ParameterError(f"truncation cap must be >= 0, got {policy.cap}")
    if isinstance(policy, PerModeCap):
        dim = (policy.cap + 1) ** n_modes
    elif isinstance(policy, TotalQuantaCap):
        dim = math.comb(policy.cap + n_modes, n_modes)
    else:
        raise ParameterError(f"unknown truncation policy {policy!r}")
    if dim > max_states:
        raise CapacityError(
            f"basis would hold {dim} states, above the guard of {max_states}"
        )
    if isinstance(policy, PerModeCap):
        vectors = tuple(itertools.product(range(policy.cap + 1), repeat=n_modes))
    else:
        vectors = tuple(_total_quanta_vectors(n_modes, policy.cap))
    return BasisSet(n_modes=n_modes, policy=policy, vectors=vectors)


def _check_occupation(n: int):
    if n > FACTORIAL_GUARD:
        raise CapacityError(
            f"occupation {n} exceeds the factorial guard of {FACTORIAL_GUARD}"
        )
    if n < 0:
        raise ParameterError(f"occupations must be >= 0, got {n}")


def _l_single_log(m: int, n: int, q: float) -> tuple[float, float]:
    """(log-magnitude, sign) of the single-mode factor L(m, n; q), q >= 0."""
    if q == 0.0:
        if m == n:
            return 0.0, -1.0 if m % 2 else 1.0
        return _NEG_INF, 0.0
    if n < m:
        m, n = n, m  # canonical order makes the float result exactly symmetric
    log2q = math.log(2.0 * q)
    base = 0.5 * (_LGAMMA(m + 1) + _LGAMMA(n + 1))
    terms = [
        (
            base + (m + n - 2 * j) * log2q
            - _LGAMMA(m - j + 1) - _LGAMMA(n - j + 1) - _LGAMMA(j + 1),
            -1.0 if j % 2 else 1.0,
        )
        for j in range(min(m, n) + 1)
    ]
    terms.sort(key=lambda t: -t[0])
    shift = terms[0][0]
    # Neumaier compensation over descending magnitudes.
    total = 0.0
    comp = 0.0
    for mag, sign in terms:
        x = sign * math.exp(mag - shift)
        t = total + x
        if abs(total) >= abs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        total = t
    total += comp
    if total == 0.0:
        return _NEG_INF, 0.0
    return shift + math.log(abs(total)), math.copysign(1.0, total)


def l_element_single(m: int, n: int, q: float) -> float:
    """Single-mode L(m, n; q) in double precision."""
    _check_occupation(m)
    _check_occupation(n)
    logmag, sign = _l_single_log(m, n, q)
    if sign == 0.0:
        return 0.0
    return sign * math.exp(logmag)


def l_element(m, n, bath: BathModel) -> float:
    """Multi-mode L element: product of per-mode factors."""
    m = tuple(int(v) for v in m)
    n = tuple(int(v) for v in n)
    if len(m) != bath.n_modes or len(n) != bath.n_modes:
        raise ParameterError(
            f"occupation vectors of length {len(m)}/{len(n)} do not match "
            f"{bath.n_modes} bath modes"
        )
    out = 1.0
    for mk, nk, mode in zip(m, n, bath.modes):
        out *= l_element_single(mk, nk, mode.q)
    return out


def l_row(m: int, q: float, nmax: int) -> np.ndarray:
    """Single-mode row [L(m, 0; q), ..., L(m, nmax; q)]."""
    _check_occupation(m)
    _check_occupation(nmax)
    return np.array([l_element_single(m, n, q) for n in range(nmax + 1)])


def l_row_squared_logsum(m: int, q: float, nmax: int) -> float:
    """log of sum_{n<=nmax} L(m, n; q)**2, stable for large q."""
    _check_occupation(m)
    _check_occupation(nmax)
    logs = []
    for n in range(nmax + 1):
        logmag, sign = _l_single_log(m, n, q)
        if sign != 0.0:
            logs.append(2.0 * logmag)
    if not logs:
        return _NEG_INF
    shift = max(logs)
    return shift + math.log(math.fsum(math.exp(v - shift) for v in logs))


def l_scaled_rational(m: int, n: int, q: Fraction) -> Fraction:
    """Exact L(m, n; q) / sqrt(m! n!) for rational q (test reference)."""
    q = Fraction(q)
    total = Fraction(0)
    for j in range(min(m, n) + 1):
        total += (
            Fraction((-1) ** j)
            * (2 * q) ** (m + n - 2 * j)
            / (math.factorial(m - j) * math.factorial(n - j) * math.factorial(j))
        )
    return total


def single_mode_l_table(q: float, cap: int) -> np.ndarray:
    """Symmetric (cap+1) x (cap+1) table of single-mode L values."""
    _check_occupation(cap)
    dim = cap + 1
    table = np.empty((dim, dim))
    for m in range(dim):
        for n in range(m + 1):
            table[m, n] = table[n, m] = l_element_single(m, n, q)
    return table


@dataclass(frozen=True)
class ParityElementTable:
    """Symmetric L and D = prefactor * L tables over a basis.

    ``prefactor`` is exp(-2 * sum_k q_k**2).  Both tables live in packed
    symmetric storage: one cell per unordered index pair.
    """

    basis: BasisSet
    prefactor: float
    l: SymmetricMatrix
    d: SymmetricMatrix

    def l_dense(self) -> np.ndarray:
        return self.l.to_dense()

    def d_dense(self) -> np.ndarray:
        return self.d.to_dense()


def d_matrix(basis: BasisSet, bath: BathModel, max_dim: int = MAX_TABLE_DIM) -> ParityElementTable:
    """Parity matrix element table D over ``basis``.

    Each unordered pair is evaluated once, as a product over modes of
    precomputed single-mode tables gathered along the packed lower triangle.
    """
    if basis.n_modes != bath.n_modes:
        raise ParameterError(
            f"basis has {basis.n_modes} modes but bath has {bath.n_modes}"
        )
    if basis.dim > max_dim:
        raise CapacityError(
            f"dense parity table of dimension {basis.dim} exceeds guard {max_dim}"
        )
    occ = basis.occupations
    rows, cols = np.tril_indices(basis.dim)
    packed_l = np.ones(rows.shape[0])
    for k, mode in enumerate(bath.modes):
        table_k = single_mode_l_table(mode.q, int(occ[:, k].max()))
        packed_l *= table_k[occ[rows, k], occ[cols, k]]
    prefactor = math.exp(-2.0 * bath.sum_q2)
    l_mat = SymmetricMatrix(basis.dim, packed_l)
    d_mat = SymmetricMatrix(basis.dim, prefactor * packed_l)
    return ParityElementTable(basis=basis, prefactor=prefactor, l=l_mat, d=d_mat)


# ---------------------------------------------------------------------------
# Independent oracle: contract the parity factor through the bare number basis.
# ---------------------------------------------------------------------------

NORM_DEFICIT_TOL = 1e-12


def _displaced_coeffs(n: int, q: float, cutoff: int) -> np.ndarray:
    """Bare-basis coefficients of the displaced number state |n>_A.

    Expands (a+ + q)**n / sqrt(n!) * exp(-q a+ - q**2/2) |0> by the binomial
    theorem and the exponential series; entry j is <j | n>_A.
    """
    if q == 0.0:
        out = np.zeros(cutoff + 1)
        if n <= cutoff:
            out[n] = 1.0
        return out
    logq = math.log(q)
    pref = -0.5 * q * q - 0.5 * _LGAMMA(n + 1)
    out = np.empty(cutoff + 1)
    for j in range(cutoff + 1):
        terms = []
        for i in range(min(j, n) + 1):
            mag = (
                pref
                + _LGAMMA(n + 1) - _LGAMMA(i + 1) - _LGAMMA(n - i + 1)  # log C(n, i)
                + (n - i) * logq + (j - i) * logq
                + 0.5 * _LGAMMA(j + 1) - _LGAMMA(j - i + 1)
            )
            terms.append((mag, -1.0 if (j - i) % 2 else 1.0))
        shift = max(t[0] for t in terms)
        acc = math.fsum(sign * math.exp(mag - shift) for mag, sign in terms)
        out[j] = math.exp(shift) * acc if acc != 0.0 else 0.0
    return out


def overlap_oracle(m, n, bath: BathModel, bare_cutoff: int) -> float:
    """Parity matrix element between displaced states via the bare basis.

    Fully independent of the L-formula route: the displaced states are
    expanded in the bare number basis from their defining expression, the
    bare parity signs (-1)**j are applied, and the expansions contracted.

    Raises
    ------
    ConvergenceError
        If any expansion norm falls short of 1 by more than 1e-12; carries
        the achieved deficit.
    """
    m = tuple(int(v) for v in m)
    n = tuple(int(v) for v in n)
    if len(m) != bath.n_modes or len(n) != bath.n_modes:
        raise ParameterError(
            f"occupation vectors of length {len(m)}/{len(n)} do not match "
            f"{bath.n_modes} bath modes"
        )
    for v in (*m, *n):
        _check_occupation(v)
    if bare_cutoff < 0:
        raise ParameterError(f"bare_cutoff must be >= 0, got {bare_cutoff}")
    parity = np.where(np.arange(bare_cutoff + 1) % 2, -1.0, 1.0)
    value = 1.0
    for mk, nk, mode in zip(m, n, bath.modes):
        cm = _displaced_coeffs(mk, mode.q, bare_cutoff)
        cn = _displaced_coeffs(nk, mode.q, bare_cutoff)
        for occ, c in ((mk, cm), (nk, cn)):
            deficit = max(0.0, 1.0 - float(c @ c))
            if deficit > NORM_DEFICIT_TOL:
                raise ConvergenceError(
                    f"bare cutoff {bare_cutoff} leaves norm deficit {deficit:.3e} "
                    f"for displaced state n={occ}, q={mode.q:.6g}",
                    deficit=deficit,
                )
        value *= float(np.sum(parity * cm * cn))
    return value
