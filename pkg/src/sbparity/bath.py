"""Bosonic environment: power-law spectral density and its logarithmic
discretization into a finite set of coupled modes.

The continuum bath J(w) = 2*pi*alpha*omega_c**(1-s)*w**s on (0, omega_c] is
binned geometrically.  Each bin contributes one mode whose squared coupling
carries the full spectral weight of the bin and whose frequency is the
J-weighted bin mean, so the total weight (1/pi) * integral of J is conserved
over the covered range by construction.

Derived scalars used downstream:

* ``sum_wq2``  -- sum over modes of omega_k * q_k**2; the polaron shift.
* ``sum_q2``   -- sum over modes of q_k**2.
* ``beta``     -- 2 * sum_q2 / alpha; independent of alpha because every
  q_k**2 scales linearly with alpha.  The continuum analogue diverges for
  s <= 1, so beta inherits a dependence on (n_modes, lambda_disc) that is
  reported alongside every quantity built from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ParameterError

__all__ = [
    "SpectralLaw",
    "Mode",
    "BathModel",
    "discretize_bath",
    "bath_from_modes",
    "e_min_eo",
    "e_min_eo_continuum",
    "beta_of",
]


@dataclass(frozen=True)
class SpectralLaw:
    """Continuum spectral density J(w) = 2*pi*alpha*omega_c**(1-s)*w**s.

    Parameters
    ----------
    alpha : float
        Dimensionless dissipation strength, >= 0.
    s : float
        Bath exponent (> 0): s < 1 sub-ohmic, s = 1 ohmic, s > 1 super-ohmic.
    omega_c : float
        Cutoff frequency (> 0); J vanishes above it.
    """

    alpha: float
    s: float
    omega_c: float

    def __post_init__(self):
        if not (self.alpha >= 0.0 and math.isfinite(self.alpha)):
            raise ParameterError(f"alpha must satisfy alpha >= 0, got {self.alpha}")
        if not (self.s > 0.0 and math.isfinite(self.s)):
            raise ParameterError(f"s must satisfy s > 0, got {self.s}")
        if not (self.omega_c > 0.0 and math.isfinite(self.omega_c)):
            raise ParameterError(f"omega_c must satisfy omega_c > 0, got {self.omega_c}")

    def j(self, omega: float) -> float:
        """Spectral density at frequency ``omega`` (0 outside (0, omega_c])."""
        if omega <= 0.0 or omega > self.omega_c:
            return 0.0
        return 2.0 * math.pi * self.alpha * self.omega_c ** (1.0 - self.s) * omega ** self.s


@dataclass(frozen=True)
class Mode:
    """One discretized bath mode.

    ``q`` is the dimensionless displacement lam / (2 * omega), kept as a
    property so the defining relation can never drift out of sync.
    """

    omega: float
    lam: float

    def __post_init__(self):
        if not (self.omega > 0.0 and math.isfinite(self.omega)):
            raise ParameterError(f"mode frequency must be > 0, got {self.omega}")
        if not (self.lam >= 0.0 and math.isfinite(self.lam)):
            raise ParameterError(f"mode coupling must be >= 0, got {self.lam}")

    @property
    def q(self) -> float:
        return self.lam / (2.0 * self.omega)


@dataclass(frozen=True)
class BathModel:
    """Immutable discretized bath plus the derived scalars.

    ``law`` is the continuum law the modes were derived from (may be None for
    a bath assembled from explicit modes).  ``lambda_disc`` is the geometric
    bin ratio, None when the modes were supplied directly.  Safe to share
    across workers; all operations on it are pure.
    """

    law: SpectralLaw | None
    lambda_disc: float | None
    modes: tuple[Mode, ...]
    sum_wq2: float
    sum_q2: float
    beta: float

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def omegas(self) -> tuple[float, ...]:
        return tuple(m.omega for m in self.modes)

    @property
    def qs(self) -> tuple[float, ...]:
        return tuple(m.q for m in self.modes)


def _derived_sums(modes) -> tuple[float, float]:
    sum_wq2 = math.fsum(m.omega * m.q * m.q for m in modes)
    sum_q2 = math.fsum(m.q * m.q for m in modes)
    return sum_wq2, sum_q2


def discretize_bath(law: SpectralLaw, n_modes: int, lambda_disc: float) -> BathModel:
    """Bin the continuum law into ``n_modes`` geometric bins.

    Bin k covers [omega_c * lambda_disc**-(k+1), omega_c * lambda_disc**-k].
    Per bin the squared coupling is (1/pi) * integral of J over the bin and
    the frequency is the J-weighted mean, evaluated in ratio form so that
    deep bins never underflow before their weight does.  ``lambda_disc`` may
    be ``math.inf``, in which case a single bin spans (0, omega_c].

    Raises
    ------
    ParameterError
        If the law is invalid, n_modes < 1, lambda_disc <= 1, or the lowest
        bin edge underflows to zero.
    """
    if not isinstance(n_modes, int) or n_modes < 1:
        raise ParameterError(f"n_modes must be an integer >= 1, got {n_modes}")
    if not lambda_disc > 1.0:
        raise ParameterError(f"lambda_disc must satisfy lambda_disc > 1, got {lambda_disc}")
    alpha, s, wc = law.alpha, law.s, law.omega_c

    r = 0.0 if math.isinf(lambda_disc) else 1.0 / lambda_disc
    # Bin-shape factors, identical for every bin of a geometric ladder:
    # weight(hi)   = 2*alpha*wc**(1-s) * hi**(s+1) * w_shape
    # omega(hi)    = hi * f_shape
    w_shape = (1.0 - r ** (s + 1.0)) / (s + 1.0)
    f_shape = ((s + 1.0) * (1.0 - r ** (s + 2.0))) / ((s + 2.0) * (1.0 - r ** (s + 1.0)))

    modes = []
    for k in range(n_modes):
        hi = wc * r ** k if k else wc
        if hi <= 0.0:
            raise ParameterError(
                f"bin edge underflowed at mode {k}; reduce n_modes or lambda_disc"
            )
        lam2 = 2.0 * alpha * wc ** (1.0 - s) * hi ** (s + 1.0) * w_shape
        modes.append(Mode(omega=hi * f_shape, lam=math.sqrt(lam2)))

    modes = tuple(modes)
    sum_wq2, sum_q2 = _derived_sums(modes)
    if alpha > 0.0:
        beta = 2.0 * sum_q2 / alpha
    else:
        # q_k**2 is exactly linear in alpha, so expose the slope at alpha = 1.
        ref = discretize_bath(SpectralLaw(1.0, s, wc), n_modes, lambda_disc)
        beta = ref.beta
    return BathModel(law=law, lambda_disc=lambda_disc, modes=modes,
                     sum_wq2=sum_wq2, sum_q2=sum_q2, beta=beta)


def bath_from_modes(modes, law: SpectralLaw | None = None) -> BathModel:
    """Assemble a bath from explicit (omega, lam) modes.

    Modes must be ordered by strictly decreasing frequency.  ``beta`` is
    2*sum_q2/alpha when a law with alpha > 0 is attached; for a decoupled
    bath it is 0, and otherwise it is NaN because the alpha-scaling argument
    that makes beta well defined does not apply to hand-picked couplings.
    """
    modes = tuple(m if isinstance(m, Mode) else Mode(*m) for m in modes)
    if not modes:
        raise ParameterError("at least one mode is required")
    for a, b in zip(modes, modes[1:]):
        if not a.omega > b.omega:
            raise ParameterError("modes must be ordered by decreasing frequency")
    if law is not None and any(m.omega > law.omega_c for m in modes):
        raise ParameterError("mode frequencies must lie in (0, omega_c]")
    sum_wq2, sum_q2 = _derived_sums(modes)
    if law is not None and law.alpha > 0.0:
        beta = 2.0 * sum_q2 / law.alpha
    elif sum_q2 == 0.0:
        beta = 0.0
    else:
        beta = math.nan
    return BathModel(law=law, lambda_disc=None, modes=modes,
                     sum_wq2=sum_wq2, sum_q2=sum_q2, beta=beta)


def e_min_eo(bath: BathModel) -> float:
    """Lowest branch-degeneracy energy: -sum_k lam_k**2 / (4*omega_k)."""
    return -bath.sum_wq2


def e_min_eo_continuum(law: SpectralLaw) -> float:
    """Continuum counterpart of :func:`e_min_eo`: -alpha*omega_c/(2*s)."""
    return -law.alpha * law.omega_c / (2.0 * law.s)


def beta_of(bath: BathModel) -> float:
    """The alpha-invariant ratio 2*sum_q2/alpha for this discretization."""
    return bath.beta
