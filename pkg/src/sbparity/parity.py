"""Truncation-induced parity breaking: diagonal invariance sums, deficiency,
the critical dissipation strength, and the closure bookkeeping for the bare
number basis.

In the complete displaced basis the squared bosonic parity factor is the
identity, which for the diagonal element at occupation m reads

    exp(-4 * sum_k q_k**2) * sum_n L(m, n)**2 = 1.

Truncating the inner sum at a cap makes the left side fall short of 1; the
shortfall (the "deficiency") grows with the dissipation strength alpha
because every q_k**2 is linear in alpha.  The critical alpha reported here is
the root of deficiency(alpha) = epsilon for a caller-chosen tolerance
epsilon, since at any finite cap the deficiency is positive for every
alpha > 0 and a parameter-free crossing point does not exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

from .bath import BathModel, SpectralLaw, discretize_bath
from .errors import InvariantViolation, ParameterError, SearchError
from .fockspace import (
    FACTORIAL_GUARD,
    BasisSet,
    PerModeCap,
    TotalQuantaCap,
    _l_single_log,
    d_matrix,
    enumerate_basis,
)

__all__ = [
    "Discretization",
    "o_diagonal",
    "parity_deficiency",
    "CriticalPoint",
    "critical_alpha",
    "ParityAudit",
    "d_square_audit",
    "ClosureReport",
    "closure_report",
]

# Truncation caps above this make the diagonal sums pointlessly long.
MAX_SERIES_CAP = 1_000_000

_CLAMP_SLACK = 1e-14


@dataclass(frozen=True)
class Discretization:
    """Bath discretization parameters fed to the critical-alpha search."""

    n_modes: int
    lambda_disc: float
    omega_c: float = 1.0


def _normalize_m(m, n_modes: int) -> tuple[int, ...]:
    if m is None:
        return (0,) * n_modes
    m = tuple(int(v) for v in m)
    if len(m) != n_modes:
        raise ParameterError(
            f"reference occupation has length {len(m)}, expected {n_modes}"
        )
    for v in m:
        if v < 0:
            raise ParameterError(f"occupations must be >= 0, got {v}")
        if v > FACTORIAL_GUARD:
            raise ParameterError(
                f"reference occupation {v} exceeds the guard of {FACTORIAL_GUARD}"
            )
    return m


def _check_cap(n_tr: int):
    if not isinstance(n_tr, int) or n_tr < 0:
        raise ParameterError(f"truncation cap must be an integer >= 0, got {n_tr}")
    if n_tr > MAX_SERIES_CAP:
        raise ParameterError(
            f"truncation cap {n_tr} exceeds the series guard of {MAX_SERIES_CAP}"
        )


def _log_o_mode(m: int, q: float, n_tr: int) -> float:
    """log of sum_{n<=n_tr} L(m, n; q)**2 for a single mode."""
    if q == 0.0:
        # Only n == m contributes, with value 1; it is lost if m is capped out.
        return 0.0 if m <= n_tr else float("-inf")
    if m == 0:
        # L(0, n)**2 = mu**n / n! with mu = 4 q**2: a partial exponential series.
        mu = 4.0 * q * q
        n = np.arange(n_tr + 1, dtype=float)
        logs = n * math.log(mu) - gammaln(n + 1.0)
        shift = float(np.max(logs))
        return shift + math.log(float(np.sum(np.exp(logs - shift))))
    logs = []
    for n in range(n_tr + 1):
        logmag, sign = _l_single_log(m, n, q)
        if sign != 0.0:
            logs.append(2.0 * logmag)
    if not logs:
        return float("-inf")
    shift = max(logs)
    return shift + math.log(math.fsum(math.exp(v - shift) for v in logs))


def _log_o_total(m: tuple[int, ...], bath: BathModel, n_tr: int) -> float:
    """log of the diagonal sum under a total-quanta cap (direct enumeration)."""
    basis = enumerate_basis(bath.n_modes, TotalQuantaCap(n_tr))
    occ = basis.occupations
    log_prod = np.zeros(basis.dim)
    alive = np.ones(basis.dim, dtype=bool)
    for k, mode in enumerate(bath.modes):
        row = np.empty(n_tr + 1)
        for n in range(n_tr + 1):
            logmag, sign = _l_single_log(m[k], n, mode.q)
            row[n] = -np.inf if sign == 0.0 else 2.0 * logmag
        vals = row[occ[:, k]]
        alive &= np.isfinite(vals)
        log_prod = np.where(alive, log_prod + vals, -np.inf)
    if not np.any(alive):
        return float("-inf")
    shift = float(np.max(log_prod[alive]))
    return shift + math.log(float(np.sum(np.exp(log_prod[alive] - shift))))


def o_diagonal(m, bath: BathModel, n_tr: int, policy: str = "per-mode") -> float:
    """Truncated diagonal invariance sum O at reference occupation ``m``.

    Under the per-mode policy the sum over the truncated index set factorizes
    into per-mode partial sums; the total-quanta policy enumerates the index
    set directly.  Can overflow to inf at large couplings; callers needing
    the scaled combination should use :func:`parity_deficiency`, which works
    in log space throughout.
    """
    _check_cap(n_tr)
    m = _normalize_m(m, bath.n_modes)
    log_o = _log_o(m, bath, n_tr, policy)
    try:
        return math.exp(log_o)
    except OverflowError:
        return math.inf


def _log_o(m, bath, n_tr, policy):
    if policy == "per-mode":
        return math.fsum(
            _log_o_mode(mk, mode.q, n_tr) for mk, mode in zip(m, bath.modes)
        )
    if policy == "total-quanta":
        return _log_o_total(m, bath, n_tr)
    raise ParameterError(f"unknown truncation policy {policy!r}")


def parity_deficiency(
    bath: BathModel, n_tr: int, m=None, policy: str = "per-mode"
) -> float:
    """1 - exp(-4 * sum_q2) * O at reference ``m`` (defaults to all zeros).

    Always lies in [0, 1]; float noise within 1e-14 of the boundary is
    clamped, anything beyond raises because the underlying sum of squares
    cannot exceed the complete-basis value.
    """
    _check_cap(n_tr)
    m = _normalize_m(m, bath.n_modes)
    log_scaled = _log_o(m, bath, n_tr, policy) - 4.0 * bath.sum_q2
    deficiency = 1.0 - math.exp(min(log_scaled, 700.0))
    # The log-space roundoff grows with the exponent magnitude, so the clamp
    # slack does too; it stays at 1e-14 whenever 4*sum_q2 <= 1.
    slack = _CLAMP_SLACK * max(1.0, 4.0 * bath.sum_q2)
    if deficiency < 0.0:
        if deficiency < -slack:
            raise InvariantViolation(
                f"scaled diagonal sum exceeds 1 by {-deficiency:.3e}; "
                "the truncated sum of squares cannot beat the complete basis"
            )
        deficiency = 0.0
    elif deficiency > 1.0:
        if deficiency > 1.0 + slack:
            raise InvariantViolation(f"deficiency {deficiency:.17g} above 1")
        deficiency = 1.0
    return deficiency


@dataclass(frozen=True)
class CriticalPoint:
    """Root of deficiency(alpha) = epsilon plus the inputs that shaped it.

    ``ln_o_over_2beta`` evaluates ln(O)/2*beta at the root, the logarithmic
    form the deficiency condition rearranges into; ``o_value`` may be inf
    when the unscaled sum overflows double precision.
    """

    s: float
    alpha_c: float
    epsilon: float
    n_tr: int
    n_modes: int
    lambda_disc: float
    beta: float
    m_ref: tuple[int, ...]
    o_value: float
    ln_o_over_2beta: float

    def as_dict(self) -> dict:
        return {
            "s": self.s,
            "alpha_c": self.alpha_c,
            "epsilon": self.epsilon,
            "n_tr": self.n_tr,
            "n_modes": self.n_modes,
            "lambda_disc": self.lambda_disc,
            "beta": self.beta,
            "m_ref": list(self.m_ref),
            "o_value": self.o_value,
            "ln_o_over_2beta": self.ln_o_over_2beta,
        }


def critical_alpha(
    s: float,
    n_tr: int,
    disc: Discretization,
    epsilon: float = 0.01,
    m_ref=None,
    policy: str = "per-mode",
    bath_factory=None,
    alpha_hi_cap: float = 1e4,
    value_tol: float = 1e-10,
) -> CriticalPoint:
    """Dissipation strength at which the parity deficiency reaches epsilon.

    Brackets by doubling from alpha = 1 and bisects on the deficiency value;
    the returned root satisfies |deficiency(alpha_c) - epsilon| <= value_tol.
    ``bath_factory`` may replace the default logarithmic discretization with
    any callable alpha -> BathModel (used e.g. for single-mode reductions
    with a prescribed beta).

    Raises
    ------
    SearchError
        If no bracket exists below ``alpha_hi_cap``, or bisection exhausts
        float resolution without meeting ``value_tol``.
    """
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not s > 0.0:
        raise ParameterError(f"s must satisfy s > 0, got {s}")
    _check_cap(n_tr)
    if bath_factory is None:
        def bath_factory(a):
            return discretize_bath(
                SpectralLaw(a, s, disc.omega_c), disc.n_modes, disc.lambda_disc
            )

    probe = bath_factory(1.0)
    m = _normalize_m(m_ref, probe.n_modes)

    def objective(a):
        return parity_deficiency(bath_factory(a), n_tr, m, policy) - epsilon

    hi = 1.0
    f_hi = objective(hi)
    while f_hi < 0.0:
        hi *= 2.0
        if hi > alpha_hi_cap:
            raise SearchError(
                f"deficiency stays below epsilon={epsilon:g} for alpha up to "
                f"{alpha_hi_cap:g} (last value {f_hi + epsilon:.6g}); no bracket"
            )
        f_hi = objective(hi)
    lo = 0.0
    root = hi
    f_root = f_hi
    for _ in range(500):
        if abs(f_root) <= value_tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # interval exhausted at float resolution
        f_mid = objective(mid)
        if abs(f_mid) <= abs(f_root):
            root, f_root = mid, f_mid
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
    if abs(f_root) > value_tol:
        raise SearchError(
            f"bisection stalled at deficiency error {f_root:.3e} "
            f"(target {value_tol:g}) near alpha = {root:.17g}"
        )

    bath_c = bath_factory(root)
    log_o = _log_o(m, bath_c, n_tr, policy)
    try:
        o_value = math.exp(log_o)
    except OverflowError:
        o_value = math.inf
    beta = bath_c.beta
    return CriticalPoint(
        s=s,
        alpha_c=root,
        epsilon=epsilon,
        n_tr=n_tr,
        n_modes=bath_c.n_modes,
        lambda_disc=bath_c.lambda_disc if bath_c.lambda_disc is not None else math.nan,
        beta=beta,
        m_ref=m,
        o_value=o_value,
        ln_o_over_2beta=log_o / (2.0 * beta),
    )


@dataclass(frozen=True)
class ParityAudit:
    """Squared-parity audit over a truncated basis.

    ``d2_diag_residuals`` holds |(D@D)_mm - 1| per basis vector; the
    deficiency fields refer to the all-zeros reference diagonal.
    """

    m: tuple[int, ...]
    n_tr: int
    o_value: float
    scale: float
    deficiency: float
    d2_diag_residuals: np.ndarray
    d2_max_offdiag: float

    def as_dict(self) -> dict:
        return {
            "m": list(self.m),
            "n_tr": self.n_tr,
            "o_value": self.o_value,
            "scale": self.scale,
            "deficiency": self.deficiency,
            "d2_diag_residuals": [float(v) for v in self.d2_diag_residuals],
            "d2_max_offdiag": self.d2_max_offdiag,
        }


def d_square_audit(basis: BasisSet, bath: BathModel) -> ParityAudit:
    """Form D over ``basis``, square it, and report departures from identity."""
    table = d_matrix(basis, bath)
    dense = table.d_dense()
    square = dense @ dense
    diag = np.abs(np.diagonal(square) - 1.0)
    off = square - np.diag(np.diagonal(square))
    policy = basis.policy
    zeros = (0,) * basis.n_modes
    return ParityAudit(
        m=zeros,
        n_tr=policy.cap,
        o_value=o_diagonal(zeros, bath, policy.cap, policy.kind),
        scale=math.exp(-4.0 * bath.sum_q2),
        deficiency=parity_deficiency(bath, policy.cap, zeros, policy.kind),
        d2_diag_residuals=diag,
        d2_max_offdiag=float(np.max(np.abs(off))) if basis.dim > 1 else 0.0,
    )


@dataclass(frozen=True)
class ClosureReport:
    """Counting argument for the bare-basis characteristic system.

    At per-mode cutoff ``n_tr`` with ``n_modes`` modes, every equation at a
    cutoff-boundary occupation references an amplitude outside the subspace.
    ``ratio`` = unknowns_discarded / independent_equations reduces exactly to
    n_modes / (n_tr + 1); only when it vanishes is the system determinate.
    The displaced-basis equations contain no such boundary terms and close
    under every truncation.
    """

    n_modes: int
    n_tr: int
    unknowns_discarded: int
    independent_equations: int
    ratio: Fraction

    @property
    def ratio_value(self) -> float:
        return float(self.ratio)

    @property
    def conclusion(self) -> str:
        return (
            "bare-basis characteristic system is underdetermined at any finite "
            "cutoff (boundary amplitudes discarded); displaced-basis equations "
            "close under every truncation"
        )

    def as_dict(self) -> dict:
        return {
            "n_modes": self.n_modes,
            "n_tr": self.n_tr,
            "unknowns_discarded": self.unknowns_discarded,
            "independent_equations": self.independent_equations,
            "ratio": f"{self.ratio.numerator}/{self.ratio.denominator}",
            "ratio_value": self.ratio_value,
            "conclusion": self.conclusion,
        }


def closure_report(n_modes: int, n_tr: int) -> ClosureReport:
    """Exact discarded-unknowns ratio n_modes/(n_tr + 1) with its counts."""
    if not isinstance(n_modes, int) or n_modes < 1:
        raise ParameterError(f"n_modes must be an integer >= 1, got {n_modes}")
    if not isinstance(n_tr, int) or n_tr < 0:
        raise ParameterError(f"n_tr must be an integer >= 0, got {n_tr}")
    return ClosureReport(
        n_modes=n_modes,
        n_tr=n_tr,
        unknowns_discarded=n_modes * (n_tr + 1) ** (n_modes - 1),
        independent_equations=(n_tr + 1) ** n_modes,
        ratio=Fraction(n_modes, n_tr + 1),
    )
