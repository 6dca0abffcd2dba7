"""Newton solution of x_i . pmap(x_j) = delta_ij, multistart censuses and continuation in p."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .canonical import CanonicalClass, Label, canonical_form
from .constructions import known_constructions, weighing_check
from .core import (
    DEFAULT_TOL,
    BasisMatrix,
    PExponent,
    PLike,
    ToleranceConfig,
    dual_exponent,
    unit_rows,
)
from .errors import ConsistencyError, DomainError, PreconditionError
from .orthogonality import as_basis, dual_basis, is_auerbach

NEAR_P2 = 0.05
ARMIJO_SHRINK = 0.5
ARMIJO_C = 1e-4
PERTURBATION = 0.05
POLISH_STEPS = 3
# a census solution this close to a stationary basis is replaced by it
SNAP_RADIUS = 1e-3
# relative Jacobian singular value below which a solution is reported as
# non-isolated: near a degenerate root a 1e-10 residual leaves ~sqrt(1e-10) of
# distance, so approximate solutions there show singular values of that size
ISOLATION_TOL = 1e-5


class Status(str, enum.Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    SINGULAR_JACOBIAN = "singular_jacobian"
    NEAR_P2_REFUSED = "near_p2_refused"


@dataclass(frozen=True)
class SolveReport:
    solution: BasisMatrix | None
    residual: float
    iterations: int
    seed: int
    status: Status

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


_STATUS = {0: Status.CONVERGED, 1: Status.DIVERGED, 2: Status.SINGULAR_JACOBIAN}


def _smooth_p(p: PLike, lower: float, what: str) -> float:
    pv = PExponent.of(p).require_smooth(what)
    if pv < lower:
        raise DomainError(f"{what} requires p >= {lower}; solve at the dual exponent and use dualize_solution")
    return pv


def residual(X, p: PLike | None = None) -> np.ndarray:
    """Matrix of x_i . pmap(x_j) - delta_ij."""
    X = as_basis(X, p)
    pv = X.p.require_smooth("residual")
    return kernels.residual(np.ascontiguousarray(X.rows), pv)


def jacobian(X, p: PLike | None = None) -> np.ndarray:
    """Analytic n^2 x n^2 Jacobian of the residual, rows (i, j) and columns (i, k) in row-major order."""
    X = as_basis(X, p)
    pv = _smooth_p(X.p, 2.0, "jacobian")
    return kernels.residual_jacobian(np.ascontiguousarray(X.rows), pv)[1]


def residual_p_derivative(X: np.ndarray, p: float) -> np.ndarray:
    """d/dp of the residual at fixed X: sum_k x_ik x_jk |x_jk|^(p-2) ln|x_jk|."""
    mag = np.abs(X)
    nz = mag > 0
    L = np.zeros_like(X)
    L[nz] = X[nz] * np.exp((p - 2.0) * np.log(mag[nz])) * np.log(mag[nz])
    return X @ L.T


def newton_solve(seed_matrix, p: PLike | None = None, tol: ToleranceConfig = DEFAULT_TOL,
                 seed: int = 0) -> SolveReport:
    """Damped Newton with Armijo backtracking on ||F||^2.

    Once the residual is below ``residual_tol`` a few extra full steps
    polish the solution toward machine precision. Deterministic in its
    inputs; ``seed`` is recorded for provenance only.
    """
    X0 = as_basis(seed_matrix, p)
    pv = X0.p.require_smooth("newton_solve")
    if abs(pv - 2.0) < NEAR_P2:
        return SolveReport(None, math.inf, 0, seed, Status.NEAR_P2_REFUSED)
    if pv < 2.0:
        raise DomainError("newton_solve requires p > 2; solve at the dual exponent and use dualize_solution")
    X, r, iterations, code = kernels.newton_core(
        X0.rows, pv, tol.residual_tol, tol.newton_max_iter, POLISH_STEPS, ARMIJO_C, ARMIJO_SHRINK
    )
    status = _STATUS[code]
    if status is not Status.CONVERGED:
        return SolveReport(None, r, iterations, seed, status)
    solution = BasisMatrix(X, X0.p)
    if not is_auerbach(solution, tol=tol):
        return SolveReport(None, r, iterations, seed, Status.DIVERGED)
    return SolveReport(solution, r, iterations, seed, Status.CONVERGED)


def jacobian_min_sv(B: BasisMatrix) -> float:
    """Smallest singular value of the Newton Jacobian at B, relative to the largest.

    A value at rounding level means B is not an isolated solution: it sits
    on a continuum or at a bifurcation in p.
    """
    s = np.linalg.svd(jacobian(B), compute_uv=False)
    return float(s[-1] / s[0])


def snap_stationary(B: BasisMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> BasisMatrix:
    """Return the stationary basis within ``SNAP_RADIUS`` of B, or B itself.

    Stationary bases are Auerbach for every p, but at isolated exponents
    (W(4,3) at p = 4, for instance) the Jacobian drops rank there, Newton
    converges only linearly, and a residual of 1e-10 leaves the iterate
    ~1e-5 away. Without snapping such runs splinter into spurious classes.
    """
    rows = B.rows
    S = np.where(np.abs(rows) < SNAP_RADIUS, 0.0, np.sign(rows))
    if not np.all(S.any(axis=1)) or not weighing_check(S.astype(np.int64)).is_stationary:
        return B
    candidate = B.with_rows(unit_rows(S, B.p))
    if np.max(np.abs(candidate.rows - rows)) >= SNAP_RADIUS or not is_auerbach(candidate, tol=tol):
        return B
    return candidate


def dualize_solution(B: BasisMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> BasisMatrix:
    """The dual functionals of an Auerbach basis of l^n_p, as an Auerbach basis of l^n_q."""
    if not is_auerbach(B, tol=tol):
        raise PreconditionError("dualize_solution requires a verified Auerbach basis")
    D = dual_basis(B, tol).as_basis()
    report = is_auerbach(D, tol=tol)
    if not report:
        raise ConsistencyError(f"dual basis failed re-verification at p={D.p}: {report.reason}")
    return D


# -- multistart census --------------------------------------------------------


def _label_for(name: str | None, n: int) -> Label:
    if name is None:
        return Label.OTHER
    parts = name.split("+")
    if len(parts) == 1 and name == f"I{n}":
        return Label.IDENTITY
    if name == "JP":
        return Label.JP
    if all(part == "H2" or (part.startswith("I") and part[1:].isdigit()) for part in parts):
        return Label.BLOCK_H2
    return Label.OTHER


def _seed_matrix(k: int, n: int, p: float, rng_seed: int, library: list[np.ndarray]) -> np.ndarray:
    rng = np.random.default_rng([rng_seed, k])
    family = k % 3
    if family == 0 or not library:
        X = rng.standard_normal((n, n))
    else:
        X = library[(k // 3) % len(library)] + PERTURBATION * rng.standard_normal((n, n))
        if family == 2:
            X = X[:, rng.permutation(n)] * rng.choice((-1.0, 1.0), size=n)
            X = X[rng.permutation(n)] * rng.choice((-1.0, 1.0), size=n)[:, None]
    return unit_rows(X, p)


def _solve_chunk(args) -> list[tuple[int, np.ndarray, float]]:
    ks, n, p, rng_seed, library, tol = args
    out = []
    for k in ks:
        X = _seed_matrix(k, n, p, rng_seed, library)
        rep = newton_solve(BasisMatrix(X, p), tol=tol, seed=k)
        if rep.converged:
            B = snap_stationary(rep.solution, tol)
            res = rep.residual if B is rep.solution else float(np.max(np.abs(residual(B))))
            out.append((k, np.array(B.rows), res))
    return out


@dataclass
class Census:
    n: int
    p: PExponent
    num_seeds: int
    rng_seed: int
    converged: int
    classes: list[CanonicalClass]
    hits: list[int]
    solved_at: PExponent
    convention: str = "signed row and column permutations"

    @property
    def via_duality(self) -> bool:
        return self.solved_at != self.p


def _merge(classes: list[CanonicalClass], hits: list[int], cls: CanonicalClass, res: float) -> None:
    for i, other in enumerate(classes):
        if cls.close_to(other):
            hits[i] += 1
            if res < other.info.get("residual", math.inf):
                classes[i] = CanonicalClass(other.key, other.step, other.representative, cls.source,
                                            other.label, other.name, {**other.info, "residual": res})
            return
    classes.append(CanonicalClass(cls.key, cls.step, cls.representative, cls.source, None, None,
                                  {"residual": res}))
    hits.append(1)


def label_classes(classes: list[CanonicalClass], n: int, p: PLike,
                  tol: ToleranceConfig = DEFAULT_TOL) -> list[CanonicalClass]:
    """Attach labels and construction names by matching against ``known_constructions``."""
    known = [(name, canonical_form(B, tol)) for name, B in known_constructions(n, p, tol).items()]
    out = []
    for cls in classes:
        name = next((nm for nm, k in known if cls.close_to(k)), None)
        out.append(cls.relabel(_label_for(name, n), name))
    return out


def run_census(n: int, p: PLike, num_seeds: int, rng_seed: int = 0,
               tol: ToleranceConfig = DEFAULT_TOL, workers: int = 1) -> Census:
    """Multistart Newton census of Auerbach bases of l^n_p up to equivalence.

    Seeds cycle through three families: normalized Gaussian rows, perturbed
    known constructions, and perturbed constructions under a random signed
    row/column permutation. Seed k depends only on (rng_seed, k), so a
    larger budget reruns every smaller one. For 1 < p < 2 the census runs at
    the dual exponent and every class is dualized back.
    """
    p = PExponent.of(p)
    pv = p.require_smooth("run_census")
    if abs(pv - 2.0) < NEAR_P2:
        raise DomainError("continuum at p=2: the bases form the orthogonal group, classes cannot be counted")
    solve_p = dual_exponent(p) if pv < 2.0 else p
    sp = solve_p.value
    library = [np.array(B.rows) for B in known_constructions(n, solve_p, tol).values()]
    ks = list(range(num_seeds))
    if workers > 1:
        chunks = [ks[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as ex:
            found = [item for part in ex.map(_solve_chunk, [(c, n, sp, rng_seed, library, tol) for c in chunks])
                     for item in part]
        found.sort(key=lambda item: item[0])
    else:
        found = _solve_chunk((ks, n, sp, rng_seed, library, tol))
    classes: list[CanonicalClass] = []
    hits: list[int] = []
    for _, X, res in found:
        _merge(classes, hits, canonical_form(BasisMatrix(X, solve_p), tol), res)
    classes = [cls.relabel(None, None, jacobian_min_sv=jacobian_min_sv(cls.source)) for cls in classes]
    if solve_p != p:
        classes = [canonical_form(dualize_solution(cls.source, tol), tol).relabel(None, None, **cls.info)
                   for cls in classes]
    classes = label_classes(classes, n, p, tol)
    order = sorted(range(len(classes)), key=lambda i: classes[i].key)
    return Census(n, p, num_seeds, rng_seed, len(found), [classes[i] for i in order],
                  [hits[i] for i in order], solve_p)


def multistart_enumerate(n: int, p: PLike, num_seeds: int, rng_seed: int = 0,
                         tol: ToleranceConfig = DEFAULT_TOL, workers: int = 1) -> list[CanonicalClass]:
    return run_census(n, p, num_seeds, rng_seed, tol, workers).classes


# -- continuation -------------------------------------------------------------


@dataclass
class ContinuationTrace:
    p_grid: list[float]
    class_counts: list[int]
    class_survival: dict[int, list[CanonicalClass | None]]
    residuals: dict[int, list[float]] = field(default_factory=dict)
    broken: dict[int, float] = field(default_factory=dict)

    @property
    def all_survive(self) -> bool:
        return not self.broken


def continuation_track(classes: list[CanonicalClass | BasisMatrix], p0: PLike, p1: PLike, steps: int,
                       tol: ToleranceConfig = DEFAULT_TOL) -> ContinuationTrace:
    """Follow each basis along a geometric grid from p0 to p1 (both > 2).

    Each step uses the tangent predictor dX/dp = -J^-1 dF/dp, then Newton
    correction. A path that fails to re-converge is recorded in ``broken``
    with the exponent where it failed, and its later entries are None.
    """
    a = _smooth_p(p0, 2.0 + NEAR_P2, "continuation_track")
    b = _smooth_p(p1, 2.0 + NEAR_P2, "continuation_track")
    if steps < 1:
        raise DomainError("steps must be >= 1")
    grid = [a * (b / a) ** (k / steps) for k in range(steps + 1)]
    survival: dict[int, list[CanonicalClass | None]] = {}
    residuals: dict[int, list[float]] = {}
    broken: dict[int, float] = {}
    for idx, item in enumerate(classes):
        B = item.source if isinstance(item, CanonicalClass) else item
        start = newton_solve(B.at(a), tol=tol)
        path: list[CanonicalClass | None] = []
        res: list[float] = []
        if not start.converged:
            raise PreconditionError(f"class {idx} does not verify at p0={a}")
        X = np.array(start.solution.rows)
        path.append(canonical_form(start.solution, tol))
        res.append(start.residual)
        for k in range(1, len(grid)):
            pk_prev, pk = grid[k - 1], grid[k]
            if idx in broken:
                path.append(None)
                res.append(math.nan)
                continue
            J = kernels.residual_jacobian(X, pk_prev)[1]
            try:
                dX = -np.linalg.solve(J, residual_p_derivative(X, pk_prev).ravel()).reshape(X.shape)
                pred = X + (pk - pk_prev) * dX
            except np.linalg.LinAlgError:
                pred = X
            rep = newton_solve(BasisMatrix(pred, pk), tol=tol)
            if not rep.converged:
                broken[idx] = pk
                path.append(None)
                res.append(math.nan)
                continue
            X = np.array(rep.solution.rows)
            path.append(canonical_form(rep.solution, tol))
            res.append(rep.residual)
        survival[idx] = path
        residuals[idx] = res
    counts = []
    for k in range(len(grid)):
        distinct: list[CanonicalClass] = []
        for path in survival.values():
            c = path[k]
            if c is not None and not any(c.close_to(d) for d in distinct):
                distinct.append(c)
        counts.append(len(distinct))
    return ContinuationTrace(grid, counts, survival, residuals, broken)
