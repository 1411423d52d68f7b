"""Nonlinear sparse decoders, for contrast with linear probes.

Orthogonal matching pursuit recovers k-sparse inputs exactly at embedding
dimensions roughly linear in ``k``; linear probes need roughly ``k^2``.
:func:`gap_experiment` measures both on the same matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import ordered_map
from .constructions import gaussian_unit_matrix, rademacher_matrix
from .core import SparseVector, as_matrix, column_norms, freeze
from .errors import DimensionError, ParameterError
from .recovery import recovery_check
from .rng import check_seed, derive_seed, generator

OMP_TOL = 1e-10
EXACT_RECOVERY_TOL = 1e-8


@dataclass(frozen=True)
class DecodeResult:
    z_hat: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    pinv_fallback: bool = False
    note: str = ""

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.z_hat))


def _prepare(A, x) -> tuple[np.ndarray, np.ndarray]:
    A = as_matrix(A, "A")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != A.shape[0]:
        raise DimensionError(f"x must have length d={A.shape[0]}, got shape {x.shape}")
    if A.shape[0] > A.shape[1]:
        raise DimensionError(f"decoders expect d <= m, got {A.shape[0]}x{A.shape[1]}")
    return A, x


def _result(A, x, z, iterations, tol, **kw) -> DecodeResult:
    residual = float(np.linalg.norm(A @ z - x))
    return DecodeResult(freeze(z), residual, iterations, residual <= tol, **kw)


def omp_decode(A, x, k: int, tol: float = OMP_TOL) -> DecodeResult:
    """Orthogonal matching pursuit with at most ``k`` greedy selections.

    Each step picks the column with the largest normalized correlation with
    the residual (ties to the smallest index) and refits least squares on
    the selected support. Stops early once the residual is ``<= tol``. A
    rank-deficient support falls back to the pseudo-inverse and sets
    ``pinv_fallback``.
    """
    A, x = _prepare(A, x)
    d, m = A.shape
    if not 1 <= k <= d:
        raise ParameterError(f"k must lie in [1, d={d}], got {k}")
    norms = column_norms(A)
    safe = np.where(norms > 0, norms, 1.0)
    support: list[int] = []
    coef = np.zeros(0)
    residual = x.copy()
    fallback = False
    it = 0
    for it in range(1, k + 1):
        if np.linalg.norm(residual) <= tol:
            it -= 1
            break
        corr = np.abs(A.T @ residual) / safe
        corr[norms == 0] = -1.0
        corr[support] = -1.0
        support.append(int(np.argmax(corr)))
        sub = A[:, support]
        if np.linalg.matrix_rank(sub) < len(support):
            coef = np.linalg.pinv(sub) @ x
            fallback = True
        else:
            coef = np.linalg.lstsq(sub, x, rcond=None)[0]
        residual = x - sub @ coef
    z = np.zeros(m)
    z[support] = coef
    return _result(A, x, z, it, tol, pinv_fallback=fallback)


def _soft(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def l1_decode(
    A,
    x,
    max_iter: int = 20000,
    tol: float = 1e-6,
    shrink: float = 0.2,
    final_ratio: float = 1e-10,
) -> DecodeResult:
    """Approximate ``argmin ||z||_1`` subject to ``Az = x``.

    Runs accelerated iterative shrinkage (FISTA) on
    ``0.5 ||Az - x||^2 + lam ||z||_1`` while ``lam`` decreases geometrically
    by ``shrink`` from ``||A^T x||_inf`` to ``final_ratio`` times that,
    warm-starting each stage. The result is then refit by least squares on
    its support when that lowers the residual. ``converged`` reports whether
    the final residual is ``<= tol``; ``note`` explains a failure.
    """
    A, x = _prepare(A, x)
    d, m = A.shape
    if max_iter < 1:
        raise ParameterError(f"max_iter must be positive, got {max_iter}")
    if not 0.0 < shrink < 1.0:
        raise ParameterError(f"shrink must lie in (0, 1), got {shrink}")
    lam_max = float(np.max(np.abs(A.T @ x)))
    if lam_max == 0.0:
        return _result(A, x, np.zeros(m), 0, tol)
    step = 1.0 / np.linalg.norm(A, 2) ** 2
    lam_min = lam_max * final_ratio
    z = np.zeros(m)
    total = 0
    lam = lam_max * shrink
    while total < max_iter:
        y, z_prev, t = z.copy(), z.copy(), 1.0
        for _ in range(max(1, min(2000, max_iter - total))):
            total += 1
            z = _soft(y - step * (A.T @ (A @ y - x)), step * lam)
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            y = z + ((t - 1.0) / t_next) * (z - z_prev)
            delta = np.linalg.norm(z - z_prev)
            z_prev, t = z, t_next
            if delta <= 1e-13 * max(1.0, np.linalg.norm(z)):
                break
        if lam <= lam_min:
            break
        lam = max(lam * shrink, lam_min)

    nz = np.flatnonzero(np.abs(z) > 1e-9 * np.max(np.abs(z), initial=0.0))
    if 0 < nz.size <= d:
        coef = np.linalg.lstsq(A[:, nz], x, rcond=None)[0]
        polished = np.zeros(m)
        polished[nz] = coef
        if np.linalg.norm(A @ polished - x) <= np.linalg.norm(A @ z - x):
            z = polished
    out = _result(A, x, z, total, tol)
    if not out.converged:
        out = DecodeResult(
            out.z_hat,
            out.residual_norm,
            out.iterations,
            False,
            note=f"residual {out.residual_norm:.3g} > tol {tol:.3g} after {total} iterations",
        )
    return out


def orthonormal_frame(d: int, m: int, seed: int) -> np.ndarray:
    """``d x m`` matrix with orthonormal columns (``d >= m``), from QR of a Gaussian draw."""
    if d < m:
        raise ParameterError(f"orthonormal frame needs d >= m, got d={d}, m={m}")
    q, r = np.linalg.qr(gaussian_unit_matrix(d, m, seed))
    # fix column signs so the frame is a deterministic function of the draw
    return freeze(q * np.sign(np.diag(r)))


def ladder_matrix(d: int, m: int, seed: int) -> np.ndarray:
    """Rademacher embedding below ``d = m``, an orthonormal frame from ``d = m`` on."""
    return orthonormal_frame(d, m, seed) if d >= m else rademacher_matrix(d, m, seed)


def default_ladder(m: int, k: int) -> list[int]:
    ladder = []
    d = 2
    while d < m:
        if d >= k:
            ladder.append(d)
        d *= 2
    ladder.append(m)
    return ladder


@dataclass(frozen=True)
class GapRow:
    d: int
    omp_success: float
    linear_success: float


@dataclass(frozen=True)
class GapReport:
    m: int
    k: int
    epsilon: float
    trials: int
    rows: tuple[GapRow, ...]

    def to_csv(self) -> str:
        lines = ["d,omp_success,linear_success,trials"]
        lines.extend(f"{r.d},{r.omp_success!r},{r.linear_success!r},{self.trials}" for r in self.rows)
        return "\n".join(lines) + "\n"

    def gap_dimensions(self, omp_min: float = 0.9, linear_max: float = 0.1) -> list[int]:
        return [r.d for r in self.rows if r.omp_success >= omp_min and r.linear_success <= linear_max]


def gap_experiment(
    m: int,
    k: int,
    epsilon: float,
    trials: int,
    seed: int,
    d_values: list[int] | None = None,
) -> GapReport:
    """Exact-recovery rate of OMP versus linear-recovery rate, per dimension.

    For trial ``t`` the same matrix ``M`` (see :func:`ladder_matrix`) serves
    both sides: OMP must return a random k-sparse sign vector ``z`` from
    ``Mz`` to within 1e-8, and the linear side checks epsilon-recovery with
    ``A = B = M``. The input ``z`` of trial ``t`` is the same at every ``d``.
    """
    check_seed(seed)
    if m < 2 or not 1 <= k <= m:
        raise ParameterError(f"need m >= 2 and 1 <= k <= m, got m={m}, k={k}")
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    ladder = sorted(set(d_values)) if d_values else default_ladder(m, k)
    if any(not 1 <= d <= m for d in ladder):
        raise ParameterError(f"ladder dimensions must lie in [1, m={m}]")
    matrix_seeds = [derive_seed(seed, t) for t in range(trials)]
    inputs = [SparseVector.random(m, k, generator(derive_seed(seed, t, 1))).to_dense() for t in range(trials)]

    rows = []
    for d in ladder:

        def one(t: int) -> tuple[bool, bool]:
            M = ladder_matrix(d, m, matrix_seeds[t])
            z = inputs[t]
            omp_ok = False
            if k <= d:
                z_hat = omp_decode(M, M @ z, k).z_hat
                omp_ok = bool(np.max(np.abs(z_hat - z)) <= EXACT_RECOVERY_TOL)
            return omp_ok, recovery_check(M, M, k, epsilon)

        results = ordered_map(one, range(trials))
        rows.append(
            GapRow(
                d,
                sum(r[0] for r in results) / trials,
                sum(r[1] for r in results) / trials,
            )
        )
    return GapReport(m, k, float(epsilon), trials, tuple(rows))
