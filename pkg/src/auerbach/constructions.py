"""Explicit Auerbach bases: identity, Hadamard pair, direct sums, J_p, J_inf(t),
Sylvester doubling, substitution, and the stationary {0, +-1} bases."""

from __future__ import annotations

import functools
import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .canonical import CanonicalClass, canonical_form
from .core import (
    DEFAULT_TOL,
    INFINITY,
    BasisMatrix,
    PExponent,
    PLike,
    ToleranceConfig,
    unit_rows,
)
from .errors import ConsistencyError, DomainError, PreconditionError
from .orthogonality import is_auerbach

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RpRoot:
    """Root of r^(p-1) + r - 1 = 0 in (0, 1].

    ``printed_residual`` is 1 - r - r^p, the residual of the variant with
    exponent p; it is nonzero except in degenerate cases and is kept for
    comparison only.
    """

    p: PExponent
    value: float
    residual: float
    printed_residual: float


def _inv_pow(p: PExponent) -> float:
    """1/p, with 1/inf = 0."""
    return 0.0 if p.is_infinite else 1.0 / p.as_float()


def solve_rp(p: PLike) -> RpRoot:
    """Bisection to a tight bracket, then Newton polish."""
    p = PExponent.of(p)
    pv = p.require_smooth("solve_rp")
    e = pv - 1.0

    def g(r: float) -> float:
        return r**e + r - 1.0

    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13:
            break
    r = 0.5 * (lo + hi)
    for _ in range(5):
        step = g(r) / (e * r ** (e - 1.0) + 1.0)
        r_new = min(max(r - step, lo), hi)
        if r_new == r:
            break
        r = r_new
    res = abs(g(r))
    if res > 1e-14:
        raise ConsistencyError(f"r_p residual {res:.3e} exceeds 1e-14 at p={pv}")
    return RpRoot(p, r, res, 1.0 - r - r**pv)


def identity_basis(n: int, p: PLike) -> BasisMatrix:
    if n < 1:
        raise DomainError("n must be >= 1")
    return BasisMatrix(np.eye(n), p)


def hadamard2_basis(p: PLike) -> BasisMatrix:
    """2^(-1/p) [[1, 1], [1, -1]]."""
    p = PExponent.of(p)
    c = 2.0 ** (-_inv_pow(p))
    return BasisMatrix(c * np.array([[1.0, 1.0], [1.0, -1.0]]), p)


def block_basis(parts: list[BasisMatrix]) -> BasisMatrix:
    """Direct sum: the parts placed on consecutive disjoint coordinate blocks."""
    if not parts:
        raise DomainError("block_basis needs at least one part")
    p = parts[0].p
    if any(part.p != p for part in parts):
        raise DomainError("all parts must share the same exponent")
    n = sum(part.n for part in parts)
    out = np.zeros((n, n))
    k = 0
    for part in parts:
        out[k : k + part.n, k : k + part.n] = part.rows
        k += part.n
    return BasisMatrix(out, p)


def _assert_auerbach(B: BasisMatrix, what: str, tol: ToleranceConfig) -> BasisMatrix:
    report = is_auerbach(B, tol=tol)
    if not report:
        raise ConsistencyError(f"{what} failed verification: {report.reason} {report.residuals()}")
    return B


def jp_basis(p: PLike, tol: ToleranceConfig = DEFAULT_TOL) -> BasisMatrix:
    """The non-stationary basis s [[1, 1, -r], [1, -r, 1], [-r, 1, 1]] of l^3_p.

    r = r_p and s = (2 + r^p)^(-1/p). Each row's off-diagonal pairing with
    the gradient map of another row is 1 - r - r^(p-1) = 0.
    """
    p = PExponent.of(p)
    pv = p.require_smooth("jp_basis")
    if pv == 2.0:
        log.info("jp_basis at p=2 yields an orthogonal matrix (one of a continuum of bases)")
    r = solve_rp(p).value
    s = (2.0 + r**pv) ** (-1.0 / pv)
    B = BasisMatrix(s * np.array([[1.0, 1.0, -r], [1.0, -r, 1.0], [-r, 1.0, 1.0]]), p)
    return _assert_auerbach(B, f"jp_basis({pv})", tol)


def jinf_basis(t: float) -> BasisMatrix:
    """[[1, 1, 1], [-1, 1, 1], [t, 1, -1]] in l^3_inf, for -1 <= t <= 1."""
    t = float(t)
    if not -1.0 <= t <= 1.0:
        raise DomainError(f"t must lie in [-1, 1], got {t}")
    return BasisMatrix([[1.0, 1.0, 1.0], [-1.0, 1.0, 1.0], [t, 1.0, -1.0]], INFINITY)


def sylvester_double(B: BasisMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> BasisMatrix:
    """2^(-1/p) [[B, B], [B, -B]], an Auerbach basis of l^(2n)_p."""
    if not is_auerbach(B, tol=tol):
        raise PreconditionError("sylvester_double requires a verified Auerbach basis")
    c = 2.0 ** (-_inv_pow(B.p))
    H = B.rows
    out = BasisMatrix(c * np.block([[H, H], [H, -H]]), B.p)
    return _assert_auerbach(out, "sylvester_double", tol)


def substitute_basis(outer: BasisMatrix, inner: BasisMatrix, coordinate: int = -1,
                     tol: ToleranceConfig = DEFAULT_TOL) -> BasisMatrix:
    """Expand one coordinate of ``outer`` into a copy of ``inner``.

    Coordinate ``coordinate`` of l^m_p is replaced by the span of
    ``inner``'s first row u, which embeds l^m_p isometrically in
    l^(m+k-1)_p; the remaining rows of ``inner`` complete the basis. With
    outer = inner = hadamard2_basis(p) this yields the l^3_p basis

        [[2^(-1/p),  2^(-2/p),  2^(-2/p)],
         [2^(-1/p), -2^(-2/p), -2^(-2/p)],
         [0,         2^(-1/p), -2^(-1/p)]].
    """
    if outer.p != inner.p:
        raise DomainError("outer and inner bases must share the same exponent")
    for B, what in ((outer, "outer"), (inner, "inner")):
        if not is_auerbach(B, tol=tol):
            raise PreconditionError(f"substitute_basis requires a verified {what} basis")
    m, k = outer.n, inner.n
    c = coordinate % m
    n = m + k - 1
    u = inner.rows[0]
    out = np.zeros((n, n))
    for i in range(m):
        row = list(outer.rows[i, :c]) + list(outer.rows[i, c] * u) + list(outer.rows[i, c + 1 :])
        out[i] = row
    for i in range(1, k):
        out[m + i - 1, c : c + k] = inner.rows[i]
    return _assert_auerbach(BasisMatrix(out, outer.p), "substitute_basis", tol)


def nested_h2_basis(p: PLike, tol: ToleranceConfig = DEFAULT_TOL) -> BasisMatrix:
    H = hadamard2_basis(p)
    return substitute_basis(H, H, coordinate=1, tol=tol)


def _sum_name(a: str, b: str) -> str:
    if all(x.startswith("I") and x[1:].isdigit() for x in (a, b)):
        return f"I{int(a[1:]) + int(b[1:])}"
    return f"{a}+{b}"


def _stationary_name(B: BasisMatrix) -> str:
    weights = sorted(int(w) for w in np.count_nonzero(np.abs(B.rows) > 0, axis=1))
    if len(set(weights)) == 1:
        return f"W({B.n},{weights[0]})"
    return "S[" + ",".join(map(str, weights)) + "]"


def known_constructions(n: int, p: PLike, tol: ToleranceConfig = DEFAULT_TOL) -> dict[str, BasisMatrix]:
    """Every basis of l^n_p reachable from I_1, the Hadamard pair, J_p and the
    stationary bases by direct sums, Sylvester doubling and substitution, one
    per canonical class.

    Names describe a construction path, e.g. ``"I1+H2"`` or ``"sub(H2,H2)"``;
    stationary bases not otherwise reached are named ``W(n,m)`` (weighing
    matrix of weight m) or ``S[row weights]``.
    """
    return dict(_catalogue(n, PExponent.of(p), tol))


@functools.lru_cache(maxsize=64)
def _catalogue(n: int, p: PExponent, tol: ToleranceConfig) -> dict[str, BasisMatrix]:
    atoms: dict[int, dict[str, BasisMatrix]] = {1: {"I1": identity_basis(1, p)}}
    if n >= 2:
        atoms[2] = {"H2": hadamard2_basis(p)}
    if n >= 3 and p.is_smooth:
        atoms[3] = {"JP": jp_basis(p, tol)}
    catalogue: dict[int, dict[str, BasisMatrix]] = {}
    seen: dict[int, list[CanonicalClass]] = {}

    def add(size: int, name: str, B: BasisMatrix) -> None:
        cls = canonical_form(B, tol)
        bucket = seen.setdefault(size, [])
        if any(cls.close_to(other) for other in bucket):
            return
        bucket.append(cls)
        catalogue.setdefault(size, {})[name] = B

    for size in range(1, n + 1):
        for name, B in atoms.get(size, {}).items():
            add(size, name, B)
        # direct sums of two smaller catalogue entries
        for a in range(1, size // 2 + 1):
            for (na, A), (nb, Bb) in itertools.product(catalogue.get(a, {}).items(),
                                                       catalogue.get(size - a, {}).items()):
                add(size, _sum_name(na, nb), block_basis([A, Bb]))
        if size % 2 == 0:
            for name, B in list(catalogue.get(size // 2, {}).items()):
                add(size, f"syl({name})", sylvester_double(B, tol))
        for m in range(2, size):
            k = size - m + 1
            for (no, O), (ni, I) in itertools.product(catalogue.get(m, {}).items(),
                                                      catalogue.get(k, {}).items()):
                for c in range(m):
                    add(size, f"sub({no},{ni})@{c}", substitute_basis(O, I, c, tol))
        if size <= MAX_STATIONARY_N:
            for cls in enumerate_stationary(size, p, tol):
                add(size, _stationary_name(cls.source), cls.source)
    return catalogue.get(n, {})


@dataclass(frozen=True)
class WeighingReport:
    """``is_stationary``: entries in {0, +-1} with mutually orthogonal nonzero rows.
    ``weight`` is m when W W^T = m I, else None."""

    is_stationary: bool
    weight: int | None


def weighing_check(W) -> WeighingReport:
    W = np.asarray(W)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        return WeighingReport(False, None)
    if not np.all(np.isin(W, (-1, 0, 1))):
        return WeighingReport(False, None)
    Wi = W.astype(np.int64)
    G = Wi @ Wi.T
    off = G - np.diag(np.diag(G))
    stationary = not np.any(off) and bool(np.all(np.diag(G) > 0))
    d = np.diag(G)
    weight = int(d[0]) if stationary and np.all(d == d[0]) else None
    return WeighingReport(stationary, weight)


def is_stationary(B: BasisMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Rows, rescaled so the smallest nonzero modulus is 1, form a {0, +-1} matrix with orthogonal rows."""
    step = tol.quantization_step
    rows = np.array(B.rows, dtype=float)
    scaled = np.empty_like(rows)
    for i, row in enumerate(rows):
        mags = np.abs(row[np.abs(row) > step])
        if mags.size == 0:
            return False
        scaled[i] = row / mags.min()
    W = np.rint(scaled)
    if np.max(np.abs(W - scaled)) > step:
        return False
    return weighing_check(W.astype(np.int64)).is_stationary


MAX_STATIONARY_N = 5


def _stationary_rows(n: int) -> np.ndarray:
    # all nonzero {0, +-1} rows whose first nonzero entry is +1, lexicographic order
    rows = [r for r in itertools.product((-1, 0, 1), repeat=n)
            if any(r) and next(v for v in r if v) == 1]
    return np.array(sorted(rows), dtype=np.int64)


def enumerate_stationary(n: int, p: PLike = 3.0, tol: ToleranceConfig = DEFAULT_TOL) -> list[CanonicalClass]:
    """All stationary bases of l^n_p up to signed row/column permutations.

    Depth-first search over increasing row indices (rows sign-normalized, so
    each unordered row set is visited once), with pairwise Euclidean
    orthogonality; results are merged by canonical form and returned sorted
    by representative.
    """
    if not 1 <= n <= MAX_STATIONARY_N:
        raise DomainError(f"enumerate_stationary supports 1 <= n <= {MAX_STATIONARY_N}")
    p = PExponent.of(p)
    R = _stationary_rows(n)
    ortho = (R @ R.T) == 0
    classes: dict[tuple, CanonicalClass] = {}
    stack: list[int] = []

    def visit(start: int, allowed: np.ndarray) -> None:
        if len(stack) == n:
            B = BasisMatrix(unit_rows(R[stack], p), p)
            cls = canonical_form(B, tol)
            if cls.key not in classes:
                classes[cls.key] = cls
            return
        for idx in np.nonzero(allowed[start:])[0] + start:
            stack.append(int(idx))
            visit(int(idx) + 1, allowed & ortho[idx])
            stack.pop()

    visit(0, np.ones(len(R), dtype=bool))
    return sorted(classes.values(), key=lambda c: c.key)
