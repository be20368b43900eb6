"""Dense real symmetric matrices in packed lower-triangle storage.

Each unordered index pair owns exactly one storage cell, so entry(i, j) and
entry(j, i) cannot disagree.  Instances are treated as immutable after
construction (the packed buffer is marked read-only).
"""

from __future__ import annotations

import numpy as np

__all__ = ["SymmetricMatrix", "packed_index", "packed_size"]


def packed_size(dim: int) -> int:
    return dim * (dim + 1) // 2


def packed_index(i: int, j: int) -> int:
    """Flat index of (i, j) in row-major lower-triangle packing."""
    if j > i:
        i, j = j, i
    return i * (i + 1) // 2 + j


class SymmetricMatrix:
    """dim x dim real symmetric matrix, lower triangle packed row-major."""

    __slots__ = ("dim", "packed")

    def __init__(self, dim: int, packed: np.ndarray):
        packed = np.asarray(packed, dtype=float)
        if packed.shape != (packed_size(dim),):
            raise ValueError(
                f"packed buffer has length {packed.shape}, expected ({packed_size(dim)},)"
            )
        packed.setflags(write=False)
        self.dim = dim
        self.packed = packed

    @classmethod
    def from_diagonal(cls, diag) -> "SymmetricMatrix":
        diag = np.asarray(diag, dtype=float)
        dim = diag.shape[0]
        packed = np.zeros(packed_size(dim))
        packed[_diag_indices(dim)] = diag
        return cls(dim, packed)

    @classmethod
    def from_dense(cls, a) -> "SymmetricMatrix":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        dim = a.shape[0]
        rows, cols = np.tril_indices(dim)
        return cls(dim, a[rows, cols].copy())

    def entry(self, i: int, j: int) -> float:
        return float(self.packed[packed_index(i, j)])

    def diagonal(self) -> np.ndarray:
        return self.packed[_diag_indices(self.dim)].copy()

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        rows, cols = np.tril_indices(self.dim)
        out[rows, cols] = self.packed
        out[cols, rows] = self.packed
        return out

    def __eq__(self, other):
        return (
            isinstance(other, SymmetricMatrix)
            and self.dim == other.dim
            and np.array_equal(self.packed, other.packed)
        )

    def __repr__(self):
        return f"SymmetricMatrix(dim={self.dim})"


def _diag_indices(dim: int) -> np.ndarray:
    i = np.arange(dim)
    return i * (i + 3) // 2
