"""Pure numpy implementations of the hot kernels.

Mirrors ``_kernels.pyx`` function for function; used when the compiled
extension is unavailable or ``AUERBACH_PURE_PYTHON=1`` is set.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product

import numpy as np


def _abs_pow(a: np.ndarray, e: float) -> np.ndarray:
    mag = np.abs(a)
    out = np.zeros_like(mag)
    nz = mag > 0
    out[nz] = np.exp(e * np.log(mag[nz]))
    return out


def residual(X: np.ndarray, p: float) -> np.ndarray:
    """F[i, j] = x_i . pmap(x_j) - delta_ij."""
    P = X * _abs_pow(X, p - 2.0)
    return X @ P.T - np.eye(X.shape[0])


def residual_jacobian(X: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Residual and its n^2 x n^2 Jacobian; row index i*n+j, column index a*n+k."""
    n = X.shape[0]
    W = _abs_pow(X, p - 2.0)
    P = X * W
    F = X @ P.T - np.eye(n)
    J = np.zeros((n, n, n, n))
    ii = np.arange(n)
    # d F_ij / d x_ik = pmap(x_j)_k
    J[ii, :, ii, :] += P[None, :, :]
    # d F_ij / d x_jk = (p - 1) |x_jk|^(p-2) x_ik
    J[:, ii, ii, :] += (p - 1.0) * W[None, :, :] * X[:, None, :]
    return F, J.reshape(n * n, n * n)


@lru_cache(maxsize=None)
def signed_permutations(n: int) -> tuple[np.ndarray, np.ndarray]:
    perms = np.array(list(permutations(range(n))), dtype=np.int64)
    signs = np.array(list(product((1, -1), repeat=n)), dtype=np.int64)
    return perms, signs


def orbit_row_forms(Q: np.ndarray) -> np.ndarray:
    """Row-normalized, row-sorted forms of Q under every signed column permutation.

    Returns an int64 array of shape (2^n n!, n*n), one flattened form per
    group element. Row normalization makes the first nonzero entry positive.
    """
    Q = np.asarray(Q, dtype=np.int64)
    n = Q.shape[0]
    perms, signs = signed_permutations(n)
    T = np.transpose(Q[:, perms], (1, 0, 2))
    T = (T[:, None, :, :] * signs[None, :, None, :]).reshape(-1, n, n)
    first = np.argmax(T != 0, axis=2)
    lead = np.take_along_axis(T, first[..., None], axis=2)[..., 0]
    T = T * np.where(lead < 0, -1, 1)[..., None]
    for c in range(n - 1, -1, -1):
        idx = np.argsort(T[:, :, c], axis=1, kind="stable")
        T = np.take_along_axis(T, idx[..., None], axis=1)
    return T.reshape(T.shape[0], n * n)


def canonical_key(Q: np.ndarray) -> np.ndarray:
    """Lexicographic minimum of ``orbit_row_forms(Q)`` as an n x n int64 array."""
    n = np.asarray(Q).shape[0]
    forms = orbit_row_forms(Q)
    best = np.lexsort(forms.T[::-1])[0]
    return forms[best].reshape(n, n)


CONVERGED, DIVERGED, SINGULAR = 0, 1, 2


def newton_core(X, p: float, residual_tol: float, max_iter: int, polish_steps: int,
                armijo_c: float, shrink: float) -> tuple[np.ndarray, float, int, int]:
    """Damped Newton on the residual with Armijo backtracking on ||F||^2.

    After the residual first drops below ``residual_tol`` up to
    ``polish_steps`` further steps are taken; a polish step that does not
    reduce the residual is undone. Returns (X, max|F|, iterations, code)
    with code CONVERGED, DIVERGED or SINGULAR.
    """
    X = np.array(X, dtype=float)
    n = X.shape[0]
    F, J = residual_jacobian(X, p)
    r = float(np.max(np.abs(F)))
    iters = polish = 0
    status = DIVERGED
    while True:
        if r <= residual_tol:
            status = CONVERGED
            if r == 0.0 or polish >= polish_steps:
                break
            polish += 1
        if iters >= max_iter:
            break
        f = F.ravel()
        try:
            d = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            d = None
        if d is None or not np.all(np.isfinite(d)):
            if status != CONVERGED:
                status = SINGULAR
            break
        d = d.reshape(n, n)
        phi = float(f @ f)
        alpha = 1.0
        accepted = False
        while alpha > 1e-12:
            Xn = X + alpha * d
            Fn = residual(Xn, p)
            if float(np.sum(Fn * Fn)) <= (1.0 - 2.0 * armijo_c * alpha) * phi:
                accepted = True
                break
            alpha *= shrink
        if not accepted:
            break
        iters += 1
        Fn, Jn = residual_jacobian(Xn, p)
        r_new = float(np.max(np.abs(Fn)))
        if status == CONVERGED and r_new >= r:
            break
        X, F, J, r = Xn, Fn, Jn, r_new
        if not np.all(np.isfinite(X)) or np.max(np.abs(X)) > 1e6:
            status = DIVERGED
            break
    return X, r, iters, status
