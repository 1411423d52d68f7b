"""Random matrix families used to realize linear recovery.

* scaled Rademacher matrices (entries +-1/sqrt(d)),
* Gaussian matrices with columns normalized to unit length,
* the shifted pair ``a_i = c_i + lam * a_star``, ``b_i = c_i + lam * b_star``
  whose representation and probe directions are nearly orthogonal per
  feature yet highly correlated across features.

Every column is drawn from its own Philox stream (see :mod:`superpose.rng`),
so a matrix is a pure function of ``(d, m, seed)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import coherence, freeze, gram
from .errors import ConstructionError, ParameterError
from .rng import check_seed, column_generator, derive_seed

SHIFTED_RETRIES = 16
SHIFTED_FAILURE_RATE = 0.01


class Kind(str, enum.Enum):
    RADEMACHER = "rademacher"
    GAUSSIAN_UNIT = "gaussian"
    SHIFTED_PAIR = "shifted"


@dataclass(frozen=True)
class ConstructionSpec:
    d: int
    m: int
    kind: Kind
    seed: int
    delta: float | None = None
    epsilon: float | None = None
    k: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        check_seed(self.seed)
        if self.d < 1 or self.m < 2:
            raise ParameterError(f"need d >= 1 and m >= 2, got d={self.d}, m={self.m}")
        if self.kind is Kind.SHIFTED_PAIR:
            if self.delta is None or self.epsilon is None or self.k is None:
                raise ParameterError("shifted construction needs delta, epsilon and k")
            _check_shifted(self.m, self.delta, self.epsilon, self.k)

    def build(self):
        """Matrix for single-matrix kinds, ``(A, B)`` for the shifted pair."""
        if self.kind is Kind.RADEMACHER:
            return rademacher_matrix(self.d, self.m, self.seed)
        if self.kind is Kind.GAUSSIAN_UNIT:
            return gaussian_unit_matrix(self.d, self.m, self.seed)
        return shifted_pair(self.d, self.m, self.delta, self.epsilon, self.k, self.seed)


def _check_dims(d: int, m: int) -> None:
    if d < 1 or m < 1:
        raise ParameterError(f"need d >= 1 and m >= 1, got d={d}, m={m}")


def rademacher_matrix(d: int, m: int, seed: int) -> np.ndarray:
    """``d x m`` matrix with i.i.d. entries uniformly +1/sqrt(d) or -1/sqrt(d)."""
    _check_dims(d, m)
    signs = np.empty((d, m), dtype=np.float64)
    for j in range(m):
        bits = column_generator(seed, j).integers(0, 2, size=d, dtype=np.int8)
        signs[:, j] = 2.0 * bits - 1.0
    return freeze(signs / math.sqrt(d))


def gaussian_unit_matrix(d: int, m: int, seed: int) -> np.ndarray:
    """``d x m`` matrix of standard normal columns rescaled to unit norm."""
    _check_dims(d, m)
    out = np.empty((d, m), dtype=np.float64)
    for j in range(m):
        g = column_generator(seed, j)
        col = g.standard_normal(d)
        norm = np.linalg.norm(col)
        # a zero draw has probability zero; redraw from the same stream if it happens
        while norm == 0.0:
            col = g.standard_normal(d)
            norm = np.linalg.norm(col)
        out[:, j] = col / norm
    return freeze(out)


def dimension_for_incoherence(m: float, mu: float, delta: float) -> int:
    """Dimension at which a Rademacher matrix is ``mu``-incoherent w.p. >= 1 - delta.

    Returns ``ceil((2 / mu**2) * (2 ln m - ln delta))`` (natural logs, from
    Hoeffding plus a union bound over pairs).
    """
    if m < 2:
        raise ParameterError(f"m must be >= 2, got {m}")
    if not 0.0 < mu <= 1.0:
        raise ParameterError(f"mu must lie in (0, 1], got {mu}")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    value = (2.0 / mu**2) * (2.0 * math.log(m) - math.log(delta))
    # absorb float noise so that exact-integer values are not bumped up by one
    return math.ceil(value - 1e-9 * max(1.0, value))


def is_incoherent(C: np.ndarray, mu: float, tol: float = 1e-12) -> bool:
    """Whether the columns of ``C`` have unit norm and pairwise ``|<c_i,c_j>| < mu``."""
    s = coherence(gram(C, C))
    return abs(s.diag_min - 1.0) <= tol and abs(s.diag_max - 1.0) <= tol and s.mu < mu


def shift_scale(delta: float) -> float:
    """``lam = sqrt(1/delta - 1)``."""
    return math.sqrt(1.0 / delta - 1.0)


def shifted_pair_mu(delta: float, epsilon: float, k: int) -> float:
    """Incoherence level ``eps / (k (1 + lam)**2)`` sufficient for the shifted pair."""
    lam = shift_scale(delta)
    return epsilon / (k * (1.0 + lam) ** 2)


def shifted_pair_dimension(m: int, delta: float, epsilon: float, k: int) -> int:
    """Smallest ``d`` the shifted construction accepts for these parameters."""
    return dimension_for_incoherence(m + 2, shifted_pair_mu(delta, epsilon, k), SHIFTED_FAILURE_RATE)


def _check_shifted(m: int, delta: float, epsilon: float, k: int) -> None:
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 1 <= k <= m:
        raise ParameterError(f"k must lie in [1, m], got k={k}, m={m}")


def shifted_pair(d: int, m: int, delta: float, epsilon: float, k: int, seed: int):
    """Build ``(A, B)`` with ``a_i = c_i + lam a*`` and ``b_i = c_i + lam b*``.

    The base ``d x (m + 2)`` Rademacher matrix is certified
    ``mu``-incoherent with ``mu = eps / (k (1 + lam)**2)`` before use; the
    last two columns serve as ``a*`` and ``b*``. Up to 16 derived seeds are
    tried; :class:`ConstructionError` reports the best coherence achieved if
    none certifies.
    """
    _check_dims(d, m)
    _check_shifted(m, delta, epsilon, k)
    lam = shift_scale(delta)
    mu = shifted_pair_mu(delta, epsilon, k)
    best = math.inf
    for attempt in range(SHIFTED_RETRIES):
        base_seed = seed if attempt == 0 else derive_seed(seed, attempt)
        C = rademacher_matrix(d, m + 2, base_seed)
        achieved = coherence(gram(C, C)).mu
        best = min(best, achieved)
        if achieved < mu:
            cols = C[:, :m]
            a_star = C[:, m : m + 1]
            b_star = C[:, m + 1 : m + 2]
            return freeze(cols + lam * a_star), freeze(cols + lam * b_star)
    raise ConstructionError(
        f"no {mu:.6g}-incoherent base found in {SHIFTED_RETRIES} seeds at d={d} "
        f"(best achieved mu={best:.6g}); need roughly d >= {shifted_pair_dimension(m, delta, epsilon, k)}",
        achieved_mu=best,
    )
