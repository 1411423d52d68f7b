"""Cosine geometry of representation vectors ``a_i`` and probe vectors ``b_i``.

Two regimes are checked:

* the shifted construction, where each ``a_i`` is nearly orthogonal to its
  own ``b_i`` while all ``a_i`` (and all ``b_i``) are highly correlated;
* norm-bounded pairs (``||a_i||, ||b_i|| <= gamma``) with epsilon-recovery,
  where ``a_i`` and ``b_i`` must align and distinct features must be close
  to orthogonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import as_matrix, column_norms, same_shape
from .errors import DegenerateInputError, ParameterError, PreconditionError, SingularColumnError

NORM_SLACK = 1e-12


def cosine(u, v) -> float:
    """Normalized inner product, clamped to ``[-1, 1]``."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0:
        raise SingularColumnError(0, "first vector has zero norm")
    if nv == 0.0:
        raise SingularColumnError(1, "second vector has zero norm")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def _unit_columns(M: np.ndarray, name: str) -> np.ndarray:
    norms = column_norms(M)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise SingularColumnError(int(zero[0]), f"column {int(zero[0])} of {name} has zero norm")
    return M / norms


def _offdiag(G: np.ndarray) -> np.ndarray:
    return G[~np.eye(G.shape[0], dtype=bool)]


@dataclass(frozen=True)
class GeometryReport:
    max_self_cosine: float
    min_self_cosine: float
    min_rep_pair_cosine: float
    max_rep_pair_cosine: float
    min_probe_pair_cosine: float
    max_probe_pair_cosine: float
    bounds_checked: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.bounds_checked["clauses"].values())

    def to_dict(self) -> dict:
        return {
            "max_self_cosine": self.max_self_cosine,
            "min_self_cosine": self.min_self_cosine,
            "min_rep_pair_cosine": self.min_rep_pair_cosine,
            "max_rep_pair_cosine": self.max_rep_pair_cosine,
            "min_probe_pair_cosine": self.min_probe_pair_cosine,
            "max_probe_pair_cosine": self.max_probe_pair_cosine,
            "bounds_checked": self.bounds_checked,
            "passed": self.passed,
        }


def _extrema(A, B) -> dict:
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    same_shape(B, A)
    if A.shape[1] < 2:
        raise DegenerateInputError("geometry checks need at least 2 features")
    Au = _unit_columns(A, "A")
    Bu = _unit_columns(B, "B")
    self_cos = np.clip(np.einsum("ij,ij->j", Au, Bu), -1.0, 1.0)
    rep = np.clip(_offdiag(Au.T @ Au), -1.0, 1.0)
    probe = np.clip(_offdiag(Bu.T @ Bu), -1.0, 1.0)
    return {
        "max_self_cosine": float(np.abs(self_cos).max()),
        "min_self_cosine": float(self_cos.min()),
        "min_rep_pair_cosine": float(rep.min()),
        "max_rep_pair_cosine": float(rep.max()),
        "min_probe_pair_cosine": float(probe.min()),
        "max_probe_pair_cosine": float(probe.max()),
    }


def verify_construction_geometry(A, B, delta: float, tol: float) -> GeometryReport:
    """Check the three shifted-construction clauses with slack ``tol``.

    (i) ``max_i |cos(a_i, b_i)| < delta + tol``;
    (ii) ``min_{i != j} cos(a_i, a_j) > 1 - delta - tol``;
    (iii) ``min_{i != j} cos(b_i, b_j) > 1 - delta - tol``.

    ``tol`` stands in for the vanishing terms, which have no finite-size
    expression.
    """
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    if tol < 0:
        raise ParameterError(f"tol must be nonnegative, got {tol}")
    ex = _extrema(A, B)
    upper = delta + tol
    lower = 1.0 - delta - tol
    clauses = {
        "i": {"value": ex["max_self_cosine"], "bound": upper, "relation": "<", "pass": ex["max_self_cosine"] < upper},
        "ii": {"value": ex["min_rep_pair_cosine"], "bound": lower, "relation": ">", "pass": ex["min_rep_pair_cosine"] > lower},
        "iii": {
            "value": ex["min_probe_pair_cosine"],
            "bound": lower,
            "relation": ">",
            "pass": ex["min_probe_pair_cosine"] > lower,
        },
    }
    return GeometryReport(**ex, bounds_checked={"mode": "construction", "delta": delta, "tol": tol, "clauses": clauses})


def self_cosine_floor(epsilon: float, gamma: float) -> float:
    """``(1 - eps) / gamma^2``."""
    return (1.0 - epsilon) / gamma**2


def pair_cosine_ceiling(epsilon: float, gamma: float) -> float:
    """``eps gamma^2 / (1 - eps) + sqrt(1 - (1 - eps)^2 / gamma^4)``."""
    return epsilon * gamma**2 / (1.0 - epsilon) + math.sqrt(max(0.0, 1.0 - (1.0 - epsilon) ** 2 / gamma**4))


def verify_norm_bounded_geometry(A, B, epsilon: float, gamma: float) -> GeometryReport:
    """Check alignment and near-orthogonality implied by bounded norms.

    Requires ``||a_i||, ||b_i|| <= gamma`` (up to 1e-12 rounding slack),
    otherwise :class:`PreconditionError` lists the offending columns. Whether
    ``(A, B)`` actually achieves epsilon-recovery is the caller's concern;
    the clauses are only guaranteed when it does.
    """
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if gamma < 1.0:
        raise ParameterError(f"gamma must be >= 1, got {gamma}")
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    same_shape(B, A)
    limit = gamma * (1.0 + NORM_SLACK)
    offenders = [("A", int(j)) for j in np.flatnonzero(column_norms(A) > limit)]
    offenders += [("B", int(j)) for j in np.flatnonzero(column_norms(B) > limit)]
    if offenders:
        raise PreconditionError(f"column norms exceed gamma={gamma}: {offenders}", offenders)
    ex = _extrema(A, B)
    floor = self_cosine_floor(epsilon, gamma)
    ceiling = pair_cosine_ceiling(epsilon, gamma)
    clauses = {
        "i": {"value": ex["min_self_cosine"], "bound": floor, "relation": ">=", "pass": ex["min_self_cosine"] >= floor},
        "ii": {
            "value": ex["max_rep_pair_cosine"],
            "bound": ceiling,
            "relation": "<=",
            "pass": ex["max_rep_pair_cosine"] <= ceiling,
        },
        "iii": {
            "value": ex["max_probe_pair_cosine"],
            "bound": ceiling,
            "relation": "<=",
            "pass": ex["max_probe_pair_cosine"] <= ceiling,
        },
    }
    return GeometryReport(
        **ex, bounds_checked={"mode": "norm_bounded", "epsilon": epsilon, "gamma": gamma, "clauses": clauses}
    )
