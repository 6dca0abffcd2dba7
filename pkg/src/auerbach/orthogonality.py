"""Birkhoff-James orthogonality tests, dual bases and the Auerbach verifier."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOL,
    BasisMatrix,
    PExponent,
    PLike,
    ToleranceConfig,
    as_vector,
    dual_exponent,
    p_map_array,
    p_norm,
    row_norms,
)
from .errors import DomainError, RankError, ShapeError

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OrthogonalityVerdict:
    orthogonal: bool
    witness: float

    def __bool__(self) -> bool:
        return self.orthogonal


@dataclass(frozen=True)
class DualBasis:
    rows: np.ndarray
    source: BasisMatrix

    @property
    def p(self) -> PExponent:
        """The exponent of the space the functionals are measured in."""
        return dual_exponent(self.source.p)

    def as_basis(self) -> BasisMatrix:
        return BasisMatrix(self.rows, self.p)


@dataclass(frozen=True)
class AuerbachReport:
    auerbach: bool
    singular: bool
    row_residual: float
    dual_residual: float
    cross_residual: float | None
    reason: str

    def __bool__(self) -> bool:
        return self.auerbach

    def residuals(self) -> dict:
        return {
            "row_norm": self.row_residual,
            "dual_norm": self.dual_residual,
            "cross": self.cross_residual,
        }


def _nonzero(x: np.ndarray, what: str = "x") -> None:
    if not np.any(x):
        raise DomainError(f"{what} must be nonzero")


def bj_orthogonal_smooth(x, y, p: PLike, tol: ToleranceConfig = DEFAULT_TOL) -> OrthogonalityVerdict:
    """x is orthogonal to y iff y . pmap(x) = 0, tested relative to ||y|| ||x||^(p-1)."""
    pv = PExponent.of(p).require_smooth("bj_orthogonal_smooth")
    x = as_vector(x)
    y = as_vector(y)
    _nonzero(x)
    nx = p_norm(x, pv)
    ny = p_norm(y, pv)
    if ny == 0.0:
        return OrthogonalityVerdict(True, 0.0)
    # normalize before mapping so large p cannot overflow
    r = float(np.dot(y / ny, p_map_array(x / nx, pv)))
    return OrthogonalityVerdict(abs(r) <= tol.residual_tol, r)


def bj_directional(x, y, p: PLike, tol: ToleranceConfig = DEFAULT_TOL) -> OrthogonalityVerdict:
    """Orthogonality for p in {1, inf} from the one-sided derivatives of lambda -> ||x + lambda y||.

    The witness is the smaller of the two one-sided derivatives (scaled to
    unit x and y); orthogonal iff it is >= -residual_tol.
    """
    p = PExponent.of(p)
    if p.is_smooth:
        raise DomainError("bj_directional handles only p = 1 and p = inf")
    x = as_vector(x)
    y = as_vector(y)
    _nonzero(x)
    nx = p_norm(x, p)
    ny = p_norm(y, p)
    if ny == 0.0:
        return OrthogonalityVerdict(True, 0.0)
    x = x / nx
    y = y / ny
    if p.is_infinite:
        active = np.abs(x) >= 1.0 - tol.residual_tol
        s = np.sign(x[active])
        d_plus = float(np.max(s * y[active]))
        d_minus = float(np.max(-s * y[active]))
    else:
        zero = np.abs(x) <= tol.residual_tol
        slope = float(np.dot(np.sign(x[~zero]), y[~zero]))
        slack = float(np.abs(y[zero]).sum())
        d_plus = slack + slope
        d_minus = slack - slope
    w = min(d_plus, d_minus)
    return OrthogonalityVerdict(w >= -tol.residual_tol, w)


def golden_section_min(f, lo: float, hi: float, resolution: float = 1e-9) -> float:
    """Minimizer of a unimodal function on [lo, hi] to the given interval width."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > resolution:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def bj_minimization_oracle(x, y, p: PLike, tol: ToleranceConfig = DEFAULT_TOL) -> OrthogonalityVerdict:
    """Test ||x|| <= ||x + lambda y|| directly by minimizing over lambda.

    Both vectors are scaled to unit norm first (orthogonality is scale
    free), which guarantees the minimizer lies in the search window. The
    witness is the minimizing lambda in the caller's units.
    """
    p = PExponent.of(p)
    x = as_vector(x)
    y = as_vector(y)
    _nonzero(x)
    _nonzero(y, "y")
    nx = p_norm(x, p)
    ny = p_norm(y, p)
    ux = x / nx
    uy = y / ny
    if p.is_infinite:
        norm = lambda v: float(np.max(np.abs(v)))  # noqa: E731
    elif p.is_one:
        norm = lambda v: float(np.sum(np.abs(v)))  # noqa: E731
    else:
        pv = p.value
        norm = lambda v: float(np.sum(np.abs(v) ** pv) ** (1.0 / pv))  # noqa: E731
    lo, hi = tol.oracle_lambda_window
    lam = golden_section_min(lambda t: norm(ux + t * uy), lo, hi)
    orthogonal = norm(ux + lam * uy) >= 1.0 - tol.residual_tol
    return OrthogonalityVerdict(orthogonal, lam * nx / ny)


def as_basis(B, p: PLike | None = None) -> BasisMatrix:
    if isinstance(B, BasisMatrix):
        return B if p is None else B.at(p)
    if p is None:
        raise DomainError("an exponent is required when passing a raw matrix")
    return BasisMatrix(B, p)


def _check_square(B) -> None:
    a = np.asarray(B.rows if isinstance(B, BasisMatrix) else B)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")


def is_singular(rows: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    nrm = np.linalg.norm(rows, axis=1)
    if np.any(nrm == 0.0):
        return True
    return abs(np.linalg.det(rows / nrm[:, None])) <= tol.rank_tol


# inverse entries below this fraction of their row's largest are rounding noise
ZERO_SNAP = 1e-13


def _inverse_transpose(rows: np.ndarray) -> np.ndarray:
    """inv(rows)^T with rounding noise in structurally zero entries set to 0.

    Noise matters for exponents below 2, where the gradient map behaves like
    |x|^(p-1) near zero and blows 1e-17 up to ~1e-6.
    """
    D = np.linalg.inv(rows).T
    scale = np.max(np.abs(D), axis=1, keepdims=True)
    D[np.abs(D) <= ZERO_SNAP * scale] = 0.0
    return D


def dual_basis(B: BasisMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> DualBasis:
    """The biorthogonal functionals v^i(v_j) = delta_ij as rows (inverse transpose)."""
    B = as_basis(B)
    if is_singular(B.rows, tol):
        raise RankError("basis matrix is singular")
    D = _inverse_transpose(B.rows)
    D.setflags(write=False)
    return DualBasis(D, B)


def is_auerbach(B, p: PLike | None = None, tol: ToleranceConfig = DEFAULT_TOL) -> AuerbachReport:
    """Check unit rows and unit dual functionals (plus B pmap(B)^T = I for smooth p)."""
    if not isinstance(B, BasisMatrix):
        _check_square(B)
    B = as_basis(B, p)
    rows = B.rows
    row_res = float(np.max(np.abs(row_norms(rows, B.p) - 1.0)))
    if is_singular(rows, tol):
        return AuerbachReport(False, True, row_res, math.inf, None, "singular")
    D = _inverse_transpose(rows)
    q = dual_exponent(B.p)
    dual_res = float(np.max(np.abs(row_norms(D, q) - 1.0)))
    cross = None
    if B.p.is_smooth:
        # B pmap(B)^T = I; below p = 2 the same identity is checked on the dual
        # pair D pmap_q(D)^T = I, which is insensitive to noise in zero entries
        X, e = (rows, B.p.value) if B.p.value >= 2.0 else (D, q.value)
        cross = float(np.max(np.abs(X @ p_map_array(X, e).T - np.eye(B.n))))
    reasons = []
    if row_res > tol.residual_tol:
        reasons.append("row norms differ from 1")
    if dual_res > tol.residual_tol:
        reasons.append("dual functionals do not have unit norm")
    if cross is not None and cross > tol.residual_tol:
        reasons.append("rows are not mutually Birkhoff-James orthogonal")
    ok = not reasons
    return AuerbachReport(ok, False, row_res, dual_res, cross, "; ".join(reasons) or "ok")


def _sine(a: np.ndarray, b: np.ndarray) -> float:
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(np.linalg.norm(a - np.dot(a, b) * b))


def criticality_residual(B, p: PLike | None = None, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Largest sine of the angle between the cofactor vector of row i and pmap(row i).

    Zero exactly at critical points of det restricted to products of unit
    spheres, which for smooth p are the Auerbach bases.
    """
    B = as_basis(B, p)
    pv = B.p.require_smooth("criticality_residual")
    rows = B.rows
    if np.max(np.abs(row_norms(rows, pv) - 1.0)) > tol.residual_tol:
        raise DomainError("criticality_residual expects unit-norm rows")
    if is_singular(rows, tol):
        raise RankError("basis matrix is singular")
    # cofactor rows are det(B) * inv(B)^T; the scalar does not change angles
    C = np.linalg.inv(rows).T
    G = p_map_array(rows, pv)
    return max(_sine(C[i], G[i]) for i in range(B.n))
