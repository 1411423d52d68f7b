"""Dense matrices, sparse feature vectors, interference products, coherence.

Matrices are plain ``numpy`` float64 arrays. Functions in this package return
read-only arrays so that results can be shared between threads without
copying; :func:`as_matrix` is the single entry point that validates and
freezes user input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateInputError,
    DimensionError,
    NonFiniteError,
    ParameterError,
    SingularColumnError,
)

EXACT_TOL = 1e-12
SUM_TOL = 1e-9


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """Validate ``x`` as a finite 2-D float64 array and return a frozen copy."""
    arr = np.array(x, dtype=np.float64, order="C", copy=True)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must have positive dimensions, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = tuple(int(i) for i in np.argwhere(~np.isfinite(arr))[0])
        raise NonFiniteError(f"{name} has a non-finite entry at {bad}")
    arr.flags.writeable = False
    return arr


def freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def same_shape(B: np.ndarray, A: np.ndarray) -> None:
    if B.shape != A.shape:
        raise DimensionError(
            f"shape mismatch: B is {B.shape[0]}x{B.shape[1]}, A is {A.shape[0]}x{A.shape[1]}"
        )


def gram(B, A) -> np.ndarray:
    """Interference matrix ``C = B^T A``, so ``C[i, j] = <b_i, a_j>``.

    Raises :class:`DimensionError` if the shapes differ.
    """
    B = as_matrix(B, "B")
    A = as_matrix(A, "A")
    same_shape(B, A)
    return freeze(B.T @ A)


def square(C, name: str = "C") -> np.ndarray:
    C = as_matrix(C, name)
    if C.shape[0] != C.shape[1]:
        raise DimensionError(f"{name} must be square, got {C.shape[0]}x{C.shape[1]}")
    return C


@dataclass(frozen=True)
class CoherenceSummary:
    diag_min: float
    diag_max: float
    mu: float
    argmax_pair: tuple[int, int]


def coherence(C) -> CoherenceSummary:
    """Diagonal range and largest off-diagonal magnitude of a square matrix.

    Ties for the largest magnitude go to the lexicographically smallest
    ``(i, j)``.
    """
    C = square(C)
    m = C.shape[0]
    if m < 2:
        raise DegenerateInputError("coherence needs at least 2 columns")
    off = np.abs(C)
    np.fill_diagonal(off, -1.0)
    # argmax on a C-ordered array returns the first maximum in row-major order
    flat = int(np.argmax(off))
    i, j = divmod(flat, m)
    diag = np.diag(C)
    return CoherenceSummary(
        diag_min=float(diag.min()),
        diag_max=float(diag.max()),
        mu=float(off[i, j]),
        argmax_pair=(i, j),
    )


def column_norms(M) -> np.ndarray:
    M = as_matrix(M)
    return np.sqrt(np.einsum("ij,ij->j", M, M))


def normalize_columns(M) -> np.ndarray:
    """Scale every column to unit Euclidean norm.

    Raises :class:`SingularColumnError` naming the first zero column.
    """
    M = as_matrix(M)
    norms = column_norms(M)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise SingularColumnError(int(zero[0]))
    return freeze(M / norms)


@dataclass(frozen=True)
class SparseVector:
    """A sparse feature vector ``z`` in dimension ``dim``.

    In binary mode only the active coordinates are stored and every value is
    1; otherwise values lie in ``[-1, 1]``.
    """

    dim: int
    support: tuple[int, ...]
    values: tuple[float, ...]
    binary: bool = False

    def __post_init__(self):
        support = tuple(int(i) for i in self.support)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)
        if self.dim < 1:
            raise ParameterError(f"dim must be positive, got {self.dim}")
        if len(support) != len(values):
            raise ParameterError("support and values must have equal length")
        if len(support) > self.dim:
            raise ParameterError("support larger than dim")
        if any(b <= a for a, b in zip(support, support[1:])):
            raise ParameterError("support must be strictly increasing")
        if support and not (0 <= support[0] and support[-1] < self.dim):
            raise ParameterError(f"support index out of range [0, {self.dim})")
        if self.binary:
            if any(v != 1.0 for v in values):
                raise ParameterError("binary vectors store only ones")
        elif any(not (-1.0 <= v <= 1.0) for v in values):
            raise ParameterError("values must lie in [-1, 1]")

    @property
    def sparsity(self) -> int:
        return len(self.support)

    def to_dense(self) -> np.ndarray:
        z = np.zeros(self.dim)
        z[list(self.support)] = self.values
        return z

    @classmethod
    def from_dense(cls, z, binary: bool = False) -> "SparseVector":
        z = np.asarray(z, dtype=np.float64)
        support = np.flatnonzero(z)
        return cls(len(z), tuple(support), tuple(z[support]), binary=binary)

    @classmethod
    def random(cls, dim: int, k: int, rng: np.random.Generator, mode: str = "signs") -> "SparseVector":
        """Draw a vector with exactly ``k`` nonzeros on a uniform support.

        ``mode`` is ``"signs"`` (values +-1), ``"uniform"`` (values in
        [-1, 1]) or ``"binary"``.
        """
        if not 0 <= k <= dim:
            raise ParameterError(f"need 0 <= k <= dim, got k={k}, dim={dim}")
        support = np.sort(rng.choice(dim, size=k, replace=False))
        if mode == "signs":
            values = rng.choice([-1.0, 1.0], size=k)
        elif mode == "uniform":
            values = rng.uniform(-1.0, 1.0, size=k)
        elif mode == "binary":
            values = np.ones(k)
        else:
            raise ParameterError(f"unknown mode {mode!r}")
        return cls(dim, tuple(support), tuple(values), binary=mode == "binary")


def two_feature_pair() -> tuple[np.ndarray, np.ndarray]:
    """The two-feature (cat, happy) example with exact linear recovery.

    Returns ``(A, B)`` with columns ordered (cat, happy).
    """
    s3 = math.sqrt(3.0)
    A = np.array([[0.5, 1.0], [s3 / 2.0, 0.0]])
    B = np.array([[0.0, 1.0], [2.0 / s3, -1.0 / s3]])
    return freeze(A), freeze(B)
