"""Classification of bases: l^3 templates, disjoint-support subspaces and strong bases."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .canonical import CanonicalClass, Label, canonical_form, row_equivalence_count
from .constructions import (
    block_basis,
    hadamard2_basis,
    identity_basis,
    jinf_basis,
    jp_basis,
    nested_h2_basis,
    solve_rp,
)
from .core import DEFAULT_TOL, BasisMatrix, PExponent, PLike, ToleranceConfig, as_vector, p_norm
from .errors import DomainError, PreconditionError, ShapeError
from .orthogonality import as_basis, dual_basis, is_auerbach

__all__ = [
    "CanonicalClass",
    "Label",
    "canonical_form",
    "VectorType",
    "StrongType",
    "L3Classification",
    "classify_l3_vector",
    "classify_l3_basis",
    "is_spherical_point",
    "subspace_isometric_lp",
    "is_strong_auerbach",
    "classify_strong_vector",
    "row_equivalence_total",
    "ww_lower_bound_check",
]

MAX_SUBSPACE_N = 8


class VectorType(str, enum.Enum):
    AXIS = "AXIS"
    TWO_POINT = "TWO_POINT"
    JP_TYPE = "JP_TYPE"
    NONE = "NONE"


class StrongType(str, enum.Enum):
    AXIS = "AXIS"
    PAIR = "PAIR"
    NONE = "NONE"


def _smooth_not_2(p: PLike, what: str) -> float:
    pv = PExponent.of(p).require_smooth(what)
    if pv == 2.0:
        raise DomainError(f"{what} is not defined at p = 2")
    return pv


def classify_l3_vector(v, p: PLike, tol: ToleranceConfig = DEFAULT_TOL) -> VectorType:
    """Match a unit vector of l^3_p, up to signed permutation, against

    AXIS (0, 0, 1), TWO_POINT (0, c, c) with c = 2^(-1/p), and
    JP_TYPE (r, 1, 1) / (2 + r^p)^(1/p) with r = r_p.
    """
    pv = _smooth_not_2(p, "classify_l3_vector")
    v = as_vector(v)
    if v.size != 3:
        raise ShapeError("classify_l3_vector expects a vector in R^3")
    if abs(p_norm(v, pv) - 1.0) > tol.residual_tol:
        raise DomainError("classify_l3_vector expects a unit vector")
    a = np.sort(np.abs(v))
    c = 2.0 ** (-1.0 / pv)
    r = solve_rp(pv).value
    s = (2.0 + r**pv) ** (-1.0 / pv)
    templates = (
        (VectorType.AXIS, (0.0, 0.0, 1.0)),
        (VectorType.TWO_POINT, (0.0, c, c)),
        (VectorType.JP_TYPE, tuple(sorted((r * s, s, s)))),
    )
    for kind, t in templates:
        if np.max(np.abs(a - np.array(t))) <= tol.quantization_step:
            return kind
    return VectorType.NONE


@dataclass(frozen=True)
class L3Classification:
    label: Label
    t: float | None = None
    via_duality: bool = False
    name: str | None = None


def _recover_t(cls: CanonicalClass, B: BasisMatrix, tol: ToleranceConfig) -> float | None:
    mags = np.unique(np.round(np.abs(B.rows).ravel(), 12))
    candidates = sorted({float(m) for m in mags if m <= 1.0 + tol.quantization_step} | {1.0}, reverse=True)
    for t in candidates:
        if cls.close_to(canonical_form(jinf_basis(min(t, 1.0)), tol)):
            return min(t, 1.0)
    return None


def classify_l3_basis(B, p: PLike | None = None, tol: ToleranceConfig = DEFAULT_TOL) -> L3Classification:
    """Name a verified Auerbach basis of l^3_p.

    Finite p: IDENTITY, BLOCK_H2 or JP by canonical-class match, anything
    else OTHER. p = 2: ORTHOGONAL_GROUP. p = inf: IDENTITY, BLOCK_H2 or
    membership in the J_inf(t) family with t recovered up to sign. p = 1:
    the dual basis is classified at p = inf.
    """
    B = as_basis(B, p)
    if B.n != 3:
        raise ShapeError("classify_l3_basis expects a 3 x 3 basis")
    if not is_auerbach(B, tol=tol):
        raise PreconditionError("classify_l3_basis expects a verified Auerbach basis")
    if B.p.is_one:
        inner = classify_l3_basis(dual_basis(B, tol).as_basis(), tol=tol)
        return L3Classification(inner.label, inner.t, True, inner.name)
    if B.p.is_smooth and B.p.value == 2.0:
        return L3Classification(Label.ORTHOGONAL_GROUP)
    cls = canonical_form(B, tol)
    refs = [
        (Label.IDENTITY, "I3", identity_basis(3, B.p)),
        (Label.BLOCK_H2, "I1+H2", block_basis([identity_basis(1, B.p), hadamard2_basis(B.p)])),
    ]
    if B.p.is_smooth:
        refs.append((Label.JP, "JP", jp_basis(B.p, tol)))
        refs.append((Label.OTHER, "sub(H2,H2)", nested_h2_basis(B.p, tol)))
    for label, name, ref in refs:
        if cls.close_to(canonical_form(ref, tol)):
            return L3Classification(label, name=name)
    if B.p.is_infinite:
        t = _recover_t(cls, B, tol)
        if t is not None:
            return L3Classification(Label.JINF_FAMILY, t=t, name="JINF")
    return L3Classification(Label.OTHER)


def is_spherical_point(x, p: PLike, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """x and pmap(x) are collinear, i.e. all nonzero |x_i| coincide."""
    _smooth_not_2(p, "is_spherical_point")
    a = np.abs(as_vector(x))
    nz = a[a > tol.quantization_step]
    if nz.size == 0:
        return False
    return bool(nz.max() - nz.min() <= tol.quantization_step)


def _independent(M: np.ndarray, tol: ToleranceConfig) -> bool:
    s = np.linalg.svd(M, compute_uv=False)
    return s.size > 0 and s[-1] > tol.rank_tol * max(s[0], 1.0)


def subspace_isometric_lp(vectors, p: PLike, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether span(vectors) has a basis with mutually disjoint supports.

    Coordinates split the span into components: two coordinates belong to
    the same component when their columns in the m x n coefficient matrix
    are parallel, and coordinates with zero columns lie outside the span's
    support. A change of basis of the span rescales each component onto a
    single row exactly when every component has dimension one, so the test
    is that the number of components equals m.
    """
    _smooth_not_2(p, "subspace_isometric_lp")
    M = np.atleast_2d(np.asarray(vectors, dtype=float))
    m, n = M.shape
    if not m <= n <= MAX_SUBSPACE_N:
        raise DomainError(f"subspace_isometric_lp supports m <= n <= {MAX_SUBSPACE_N}")
    if not _independent(M, tol):
        raise DomainError("vectors are linearly dependent")
    cols = M.T
    norms = np.linalg.norm(cols, axis=1)
    scale = norms.max()
    directions: list[np.ndarray] = []
    for c, nc in zip(cols, norms):
        if nc <= tol.quantization_step * scale:
            continue
        u = c / nc
        if not any(np.linalg.norm(u - np.dot(u, d) * d) <= tol.quantization_step for d in directions):
            directions.append(u)
    return len(directions) == m


def classify_strong_vector(v, p: PLike, tol: ToleranceConfig = DEFAULT_TOL) -> StrongType:
    """AXIS for a signed unit coordinate vector, PAIR for two entries of modulus 2^(-1/p)."""
    pv = _smooth_not_2(p, "classify_strong_vector")
    a = np.abs(as_vector(v))
    nz = a[a > tol.quantization_step]
    if nz.size == 1 and abs(nz[0] - 1.0) <= tol.quantization_step:
        return StrongType.AXIS
    if nz.size == 2 and np.all(np.abs(nz - 2.0 ** (-1.0 / pv)) <= tol.quantization_step):
        return StrongType.PAIR
    return StrongType.NONE


def is_strong_auerbach(B, p: PLike | None = None, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Every nonempty subset of rows spans a subspace isometric to l^m_p."""
    B = as_basis(B, p)
    _smooth_not_2(B.p, "is_strong_auerbach")
    if B.n > MAX_SUBSPACE_N:
        raise DomainError(f"is_strong_auerbach supports n <= {MAX_SUBSPACE_N}")
    if not is_auerbach(B, tol=tol):
        raise PreconditionError("is_strong_auerbach expects a verified Auerbach basis")
    for m in range(2, B.n + 1):
        for subset in itertools.combinations(range(B.n), m):
            if not subspace_isometric_lp(B.rows[list(subset)], B.p, tol):
                return False
    return True


def row_equivalence_total(classes: list[CanonicalClass]) -> int:
    """Bases counted up to row permutations and row signs only."""
    return sum(row_equivalence_count(c) for c in classes)


def ww_lower_bound_check(classes: list[CanonicalClass], n: int) -> bool:
    """Row-equivalence count of the census is at least n(n-1)/2 + 1."""
    if not classes:
        return False
    if any(c.n != n for c in classes):
        raise ShapeError("all classes must have dimension n")
    return row_equivalence_total(classes) >= n * (n - 1) // 2 + 1
