"""Binary features and per-feature thresholds.

For binary k-sparse ``z`` the readout ``(Cz)_i`` with ``C = B^T A`` is a
sum of chosen row entries, so its extremes are explicit:

* smallest readout with ``z_i = 1``: ``C_ii`` plus the (at most ``k - 1``)
  negative off-diagonal entries of largest magnitude;
* largest readout with ``z_i = 0``: the (at most ``k``) largest positive
  off-diagonal entries, or 0.

A threshold ``t_i`` with ``(Cz)_i > t_i`` iff ``z_i = 1`` exists exactly
when the first exceeds the second.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .core import freeze, gram
from .errors import ContractViolation, EnumerationGuardError, ParameterError
from .recovery import top_k_sums

BRUTE_FORCE_MAX_M = 16
BRUTE_FORCE_MAX_K = 4

Sigma = Union[Callable, tuple[Sequence[float], Sequence[float]]]


@dataclass(frozen=True)
class MarginReport:
    min_active: np.ndarray
    max_inactive: np.ndarray
    k: int

    @property
    def margin(self) -> np.ndarray:
        return self.min_active - self.max_inactive

    @property
    def separable(self) -> bool:
        return bool(np.all(self.margin > 0))

    @property
    def witness_thresholds(self) -> np.ndarray | None:
        """``t_i = max_inactive_i``: inactive readouts sit at or below, active strictly above."""
        return self.max_inactive if self.separable else None

    @property
    def midpoint_thresholds(self) -> np.ndarray | None:
        return (self.min_active + self.max_inactive) / 2.0 if self.separable else None

    @property
    def per_feature(self) -> list[tuple[float, float, float]]:
        return [(float(a), float(b), float(a - b)) for a, b in zip(self.min_active, self.max_inactive)]

    def thresholds_valid(self, t) -> bool:
        """Whether ``t`` separates: ``max_inactive <= t < min_active`` for every feature."""
        t = np.broadcast_to(np.asarray(t, dtype=np.float64), self.min_active.shape)
        return bool(np.all(self.max_inactive <= t) and np.all(t < self.min_active))

    def to_dict(self) -> dict:
        def listed(x):
            return None if x is None else [float(v) for v in x]

        m = len(self.min_active)
        return {
            "k": self.k,
            "separable": self.separable,
            "k_at_least_sqrt_m": self.k >= math.sqrt(m),
            "per_feature": [
                {"min_active": a, "max_inactive": b, "margin": g} for a, b, g in self.per_feature
            ],
            "witness_thresholds": listed(self.witness_thresholds),
            "midpoint_thresholds": listed(self.midpoint_thresholds),
        }


def _check_k(k: int, m: int) -> None:
    if not 1 <= k <= m:
        raise ParameterError(f"k must lie in [1, m={m}], got {k}")


def margins_from_gram(C: np.ndarray, k: int) -> MarginReport:
    m = C.shape[0]
    _check_k(k, m)
    off = C.copy()
    np.fill_diagonal(off, 0.0)
    pos_top_k, _ = top_k_sums(np.maximum(off, 0.0), k)
    _, neg_top_km1 = top_k_sums(np.maximum(-off, 0.0), k)
    return MarginReport(freeze(np.diag(C) - neg_top_km1), freeze(pos_top_k), int(k))


def separation_margins(A, B, k: int) -> MarginReport:
    """Exact extreme readouts over binary k-sparse inputs, per feature."""
    return margins_from_gram(gram(B, A), k)


def binary_supports(m: int, k: int):
    """All subsets of ``range(m)`` of size at most ``k`` (empty set included)."""
    for size in range(k + 1):
        yield from itertools.combinations(range(m), size)


def brute_force_margins(A, B, k: int) -> MarginReport:
    """Same as :func:`separation_margins` by enumerating every binary k-sparse input.

    Limited to ``m <= 16`` and ``k <= 4``.
    """
    C = gram(B, A)
    m = C.shape[0]
    _check_k(k, m)
    if m > BRUTE_FORCE_MAX_M or k > BRUTE_FORCE_MAX_K:
        raise EnumerationGuardError(
            f"enumeration limited to m <= {BRUTE_FORCE_MAX_M}, k <= {BRUTE_FORCE_MAX_K}; got m={m}, k={k}"
        )
    min_active = np.full(m, np.inf)
    max_inactive = np.full(m, -np.inf)
    for support in binary_supports(m, k):
        z = np.zeros(m)
        z[list(support)] = 1.0
        readout = C @ z
        active = z == 1.0
        min_active[active] = np.minimum(min_active[active], readout[active])
        max_inactive[~active] = np.maximum(max_inactive[~active], readout[~active])
    return MarginReport(freeze(min_active), freeze(max_inactive), int(k))


def _as_callable(sigma: Sigma) -> Callable[[np.ndarray], np.ndarray]:
    if callable(sigma):
        probe = np.array([0.0, 1.0])
        try:
            vectorized = np.shape(sigma(probe)) == probe.shape
        except (TypeError, ValueError):
            vectorized = False
        if vectorized:
            return lambda x: np.asarray(sigma(x), dtype=np.float64)
        return lambda x: np.array([float(sigma(float(v))) for v in x])
    xs, ys = (np.asarray(v, dtype=np.float64) for v in sigma)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise ParameterError("sigma table needs matching 1-D arrays with strictly increasing x")
    return lambda x: np.interp(x, xs, ys)


def _check_monotone(f, lo: float, hi: float, samples: int) -> None:
    grid = np.linspace(lo, hi, samples)
    vals = f(grid)
    drops = np.flatnonzero(np.diff(vals) < 0)
    if drops.size:
        x = grid[drops[0]]
        raise ContractViolation(f"sigma decreases between {x:.6g} and {grid[drops[0] + 1]:.6g}")


def _sign_change(f) -> tuple[float, float] | None:
    """Bracket ``lo < hi`` with ``f(lo) <= 0 < f(hi)``, tightened by bisection."""
    lo = hi = None
    for e in range(-4, 64):
        for x in (-(2.0**e), 2.0**e):
            y = float(f(np.array([x]))[0])
            if y <= 0 and (lo is None or x > lo):
                lo = x
            if y > 0 and (hi is None or x < hi):
                hi = x
    if lo is None or hi is None or lo >= hi:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if float(f(np.array([mid]))[0]) > 0:
            hi = mid
        else:
            lo = mid
    return lo, hi


def monotone_transform_separation(
    A,
    B,
    k: int,
    sigma: Sigma,
    b_offset=None,
    samples: int = 2001,
) -> bool:
    """Whether ``sigma(B^T A z + b)_i > 0`` holds exactly when ``z_i = 1``.

    ``sigma`` is a callable or a ``(xs, ys)`` table (linearly interpolated)
    and must be nondecreasing; it is sampled on the range the readouts can
    reach and :class:`ContractViolation` is raised on any decrease. With
    ``b_offset`` omitted the offset is chosen to centre each feature's
    margin on the zero crossing of ``sigma``, so the answer is True exactly
    when the features are linearly separable (and ``sigma`` changes sign).
    Because ``sigma`` is monotone, checking the two extreme readouts of each
    feature covers every binary k-sparse input.
    """
    report = separation_margins(A, B, k)
    f = _as_callable(sigma)
    m = report.min_active.shape[0]
    if b_offset is not None:
        b = np.broadcast_to(np.asarray(b_offset, dtype=np.float64), (m,))
        if not np.all(np.isfinite(b)):
            raise ParameterError("b_offset must be finite")
    else:
        b = np.zeros(m)
    ends = np.concatenate([report.min_active + b, report.max_inactive + b, [0.0]])
    lo, hi = float(ends.min()) - 1.0, float(ends.max()) + 1.0
    _check_monotone(f, lo, hi, samples)

    if b_offset is None:
        if not report.separable:
            return False
        bracket = _sign_change(f)
        if bracket is None:
            return False
        _check_monotone(f, min(lo, bracket[0] - 1.0), max(hi, bracket[1] + 1.0), samples)
        crossing = 0.5 * (bracket[0] + bracket[1])
        b = crossing - report.midpoint_thresholds

    active_ok = np.all(f(report.min_active + b) > 0)
    inactive_ok = np.all(f(report.max_inactive + b) <= 0)
    return bool(active_ok and inactive_ok)
