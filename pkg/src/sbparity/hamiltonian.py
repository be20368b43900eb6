"""Assembly of the diagonal shifted-oscillator Hamiltonian, the even/odd
parity branches, and the Kronecker-sum validator.

In the displaced number basis the shifted-oscillator part is diagonal with
entries sum_k omega_k*n_k - sum_k omega_k*q_k**2, and the two parity branches
differ only in the sign of the tunneling term:

    H(even) = H0 - (delta/2) * D
    H(odd)  = H0 + (delta/2) * D

so H(even) + H(odd) = 2*H0 entrywise, and the odd branch at delta equals the
even branch at -delta.  Only delta >= 0 is accepted at the API boundary; the
swap identity covers negative tunneling.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .bath import BathModel
from .errors import CapacityError, ParameterError
from .fockspace import BasisSet, ParityElementTable, d_matrix
from .symmat import SymmetricMatrix, packed_size

__all__ = [
    "Branch",
    "ModelParams",
    "assemble_h0",
    "assemble_branch",
    "degenerate_energy_set",
    "kronecker_sum",
]


class Branch(enum.Enum):
    """Parity branch label; ``coupling_sign`` multiplies +(delta/2)*D."""

    EVEN = "+"
    ODD = "-"

    @property
    def coupling_sign(self) -> float:
        return -1.0 if self is Branch.EVEN else 1.0


@dataclass(frozen=True)
class ModelParams:
    """Tunneling amplitude plus the bath and basis it acts in."""

    delta: float
    bath: BathModel
    basis: BasisSet

    def __post_init__(self):
        if not (self.delta >= 0.0 and math.isfinite(self.delta)):
            raise ParameterError(
                f"delta must satisfy delta >= 0 (use the branch-swap identity "
                f"for negative tunneling), got {self.delta}"
            )
        if self.bath.n_modes != self.basis.n_modes:
            raise ParameterError(
                f"bath has {self.bath.n_modes} modes but basis has {self.basis.n_modes}"
            )


def h0_diagonal(basis: BasisSet, bath: BathModel) -> np.ndarray:
    """Diagonal entries sum_k omega_k*n_k - sum_k omega_k*q_k**2 per vector."""
    if basis.n_modes != bath.n_modes:
        raise ParameterError(
            f"basis has {basis.n_modes} modes but bath has {bath.n_modes}"
        )
    omegas = np.array(bath.omegas)
    return basis.occupations @ omegas - bath.sum_wq2


def assemble_h0(basis: BasisSet, bath: BathModel) -> SymmetricMatrix:
    """Shifted-oscillator Hamiltonian; diagonal in the displaced basis."""
    return SymmetricMatrix.from_diagonal(h0_diagonal(basis, bath))


def assemble_branch(
    params: ModelParams,
    branch: Branch,
    table: ParityElementTable | None = None,
) -> SymmetricMatrix:
    """One parity branch H0 -/+ (delta/2)*D as a packed symmetric matrix.

    ``table`` may carry a precomputed parity table to share across branches
    and sweep points; it must have been built over ``params.basis``.
    """
    if table is None:
        table = d_matrix(params.basis, params.bath)
    elif table.basis is not params.basis and table.basis != params.basis:
        raise ParameterError("parity table was built over a different basis")
    h0 = assemble_h0(params.basis, params.bath)
    packed = h0.packed + branch.coupling_sign * (0.5 * params.delta) * table.d.packed
    return SymmetricMatrix(params.basis.dim, packed)


def degenerate_energy_set(basis: BasisSet, bath: BathModel) -> np.ndarray:
    """Ascending energies at which the two branches could be degenerate.

    These are exactly the diagonal entries of H0; the minimum is
    -sum_k omega_k*q_k**2, independent of the tunneling amplitude.
    """
    return np.sort(h0_diagonal(basis, bath))


def kronecker_sum(a: SymmetricMatrix, b: SymmetricMatrix, max_dim: int = 4096) -> SymmetricMatrix:
    """A (x) I + I (x) B; its spectrum is all pairwise eigenvalue sums.

    Raises
    ------
    CapacityError
        If dim(A) * dim(B) exceeds ``max_dim`` (dense storage bound).
    """
    prod = a.dim * b.dim
    if prod > max_dim:
        raise CapacityError(
            f"Kronecker sum of dimension {prod} exceeds guard {max_dim}"
        )
    dense = np.kron(a.to_dense(), np.eye(b.dim)) + np.kron(np.eye(a.dim), b.to_dense())
    return SymmetricMatrix.from_dense(dense)
