"""Worst-case linear decoding error over k-sparse inputs.

For ``C = B^T A`` the readout error of feature ``i`` on input ``z`` is
``(C_ii - 1) z_i + sum_{j != i} C_ij z_j``. Over k-sparse ``z`` in
``[-1, 1]^m`` this is linear in ``z`` on each support, so its supremum is
the larger of

* ``|C_ii - 1|`` plus the ``k - 1`` largest off-diagonal ``|C_ij|`` (i active),
* the ``k`` largest off-diagonal ``|C_ij|`` (i inactive).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import ordered_map
from .constructions import rademacher_matrix
from .core import freeze, gram
from .errors import EnumerationGuardError, ParameterError
from .rng import check_seed, derive_seed

BRUTE_FORCE_MAX_M = 14
BRUTE_FORCE_MAX_K = 4


@dataclass(frozen=True)
class RecoveryReport:
    per_feature_error: np.ndarray
    max_error: float
    argmax_feature: int
    k: int

    @classmethod
    def from_errors(cls, errors: np.ndarray, k: int) -> "RecoveryReport":
        errors = freeze(np.asarray(errors, dtype=np.float64))
        i = int(np.argmax(errors))
        return cls(errors, float(errors[i]), i, int(k))

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "max_error": self.max_error,
            "argmax_feature": self.argmax_feature,
            "per_feature_error": [float(x) for x in self.per_feature_error],
        }


def _check_k(k: int, m: int) -> None:
    if not 1 <= k <= m:
        raise ParameterError(f"k must lie in [1, m={m}], got {k}")


def top_k_sums(offdiag_abs: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-row sums of the ``k`` and ``k - 1`` largest entries.

    ``offdiag_abs`` must be nonnegative with a zero diagonal; the zero is
    never among the strictly-largest entries, so it does not disturb the sums.
    """
    m = offdiag_abs.shape[1]
    top = np.partition(offdiag_abs, m - k, axis=1)[:, m - k :]
    top.sort(axis=1)
    sum_k = top.sum(axis=1)
    sum_km1 = top[:, 1:].sum(axis=1)
    return sum_k, sum_km1


def error_profile(C: np.ndarray, k: int) -> np.ndarray:
    """Exact per-feature worst-case error for an interference matrix ``C``."""
    m = C.shape[0]
    _check_k(k, m)
    off = np.abs(C)
    np.fill_diagonal(off, 0.0)
    sum_k, sum_km1 = top_k_sums(off, k)
    diag_dev = np.abs(np.diag(C) - 1.0)
    return np.maximum(diag_dev + sum_km1, sum_k)


def worst_case_error(A, B, k: int) -> RecoveryReport:
    """Supremum of ``|(B^T A z - z)_i|`` over k-sparse ``z`` in ``[-1, 1]^m``, per feature."""
    C = gram(B, A)
    return RecoveryReport.from_errors(error_profile(C, k), k)


def brute_force_error(A, B, k: int) -> RecoveryReport:
    """Same quantity as :func:`worst_case_error`, by enumerating sign vertices.

    Every support of size at most ``k`` and every sign pattern on it is
    visited; the error is affine in each coordinate so vertices suffice.
    Limited to ``m <= 14`` and ``k <= 4``.
    """
    C = gram(B, A)
    m = C.shape[0]
    _check_k(k, m)
    if m > BRUTE_FORCE_MAX_M or k > BRUTE_FORCE_MAX_K:
        raise EnumerationGuardError(
            f"enumeration limited to m <= {BRUTE_FORCE_MAX_M}, k <= {BRUTE_FORCE_MAX_K}; got m={m}, k={k}"
        )
    best = np.zeros(m)
    for size in range(1, k + 1):
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=size)))
        for support in itertools.combinations(range(m), size):
            Z = np.zeros((len(signs), m))
            Z[:, support] = signs
            E = np.abs(Z @ C.T - Z)
            np.maximum(best, E.max(axis=0), out=best)
    return RecoveryReport.from_errors(best, k)


def recovery_check(A, B, k: int, epsilon: float) -> bool:
    """True iff every k-sparse ``z`` in ``[-1, 1]^m`` is read out within ``< epsilon``."""
    return worst_case_error(A, B, k).max_error < epsilon


def in_lower_bound_regime(m: int, k: int, epsilon: float) -> bool:
    """Whether ``epsilon > k^{3/2} sqrt(5) / sqrt(m)``, the lower bound's hypothesis."""
    return epsilon > k**1.5 * math.sqrt(5.0) / math.sqrt(m)


@dataclass(frozen=True)
class PhaseScanResult:
    m: int
    k: int
    epsilon: float
    trials: int
    success_threshold: float
    d_star: int | None
    per_d_success: dict[int, int] = field(default_factory=dict)
    lower_bound_regime: bool = True

    @property
    def found(self) -> bool:
        return self.d_star is not None

    def success_fraction(self, d: int) -> float:
        return self.per_d_success[d] / self.trials

    def to_csv(self) -> str:
        rows = ["d,successes,trials"]
        rows.extend(f"{d},{self.per_d_success[d]},{self.trials}" for d in sorted(self.per_d_success))
        return "\n".join(rows) + "\n"

    def metadata(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "epsilon": self.epsilon,
            "trials": self.trials,
            "success_threshold": self.success_threshold,
            "d_star": self.d_star if self.d_star is not None else "not found",
            "lower_bound_regime": self.lower_bound_regime,
        }


def trial_seeds(seed: int, trials: int) -> list[int]:
    return [derive_seed(seed, t) for t in range(trials)]


def count_successes(m: int, k: int, epsilon: float, d: int, seeds: list[int]) -> int:
    """Number of seeds whose Rademacher matrix ``M`` (with ``A = B = M``) recovers."""

    def one(s: int) -> bool:
        M = rademacher_matrix(d, m, s)
        return recovery_check(M, M, k, epsilon)

    return sum(ordered_map(one, seeds))


def min_dimension_scan(
    m: int,
    k: int,
    epsilon: float,
    trials: int,
    success_threshold: float,
    d_min: int,
    d_max: int,
    seed: int,
) -> PhaseScanResult:
    """Smallest ``d`` at which random Rademacher embeddings recover often enough.

    ``d`` is doubled from ``d_min`` (capped at ``d_max``) until the success
    fraction reaches ``success_threshold``, then bisected between the last
    failing and first passing dimension. The same ``trials`` seeds are used
    at every ``d``. The result upper-bounds the true minimal dimension, which
    quantifies over all matrices rather than random ones.
    """
    check_seed(seed)
    if m < 2:
        raise ParameterError(f"m must be >= 2, got {m}")
    _check_k(k, m)
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    if not 0.0 < success_threshold <= 1.0:
        raise ParameterError(f"success_threshold must lie in (0, 1], got {success_threshold}")
    if not 1 <= d_min <= d_max:
        raise ParameterError(f"need 1 <= d_min <= d_max, got d_min={d_min}, d_max={d_max}")

    seeds = trial_seeds(seed, trials)
    counts: dict[int, int] = {}

    def passes(d: int) -> bool:
        if d not in counts:
            counts[d] = count_successes(m, k, epsilon, d, seeds)
        return counts[d] >= success_threshold * trials

    lo, hi, d = None, None, d_min
    while True:
        if passes(d):
            hi = d
            break
        lo = d
        if d >= d_max:
            break
        d = min(2 * d, d_max)
    if hi is not None:
        while lo is not None and hi - lo > 1:
            mid = (lo + hi) // 2
            if passes(mid):
                hi = mid
            else:
                lo = mid
    passing = [d for d in counts if counts[d] >= success_threshold * trials]
    return PhaseScanResult(
        m=m,
        k=k,
        epsilon=epsilon,
        trials=trials,
        success_threshold=success_threshold,
        d_star=min(passing) if passing else None,
        per_d_success=dict(sorted(counts.items())),
        lower_bound_regime=in_lower_bound_regime(m, k, epsilon),
    )
