# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: Newton residual/Jacobian and signed-permutation orbit minimization.

Same contracts as ``_kernels_py``.
"""

import numpy as np

from libc.math cimport exp, fabs, isfinite, log
from libc.stdint cimport int64_t

from auerbach._kernels_py import signed_permutations

# status codes, matching _kernels_py
cdef enum:
    CONVERGED = 0
    DIVERGED = 1
    SINGULAR = 2


cdef inline double _abs_pow(double a, double e) noexcept nogil:
    if a == 0.0:
        return 0.0
    return exp(e * log(fabs(a)))


def residual(X, double p):
    cdef const double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double s
    P_arr = np.empty((n, n))
    F_arr = np.empty((n, n))
    cdef double[:, ::1] P = P_arr
    cdef double[:, ::1] F = F_arr
    for j in range(n):
        for k in range(n):
            P[j, k] = x[j, k] * _abs_pow(x[j, k], p - 2.0)
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += x[i, k] * P[j, k]
            F[i, j] = s - (1.0 if i == j else 0.0)
    return F_arr


def residual_jacobian(X, double p):
    cdef const double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j, k, row
    cdef double s, w
    P_arr = np.empty((n, n))
    A_arr = np.empty((n, n))
    F_arr = np.empty((n, n))
    J_arr = np.zeros((n * n, n * n))
    cdef double[:, ::1] P = P_arr
    cdef double[:, ::1] A = A_arr
    cdef double[:, ::1] F = F_arr
    cdef double[:, ::1] J = J_arr
    for j in range(n):
        for k in range(n):
            w = _abs_pow(x[j, k], p - 2.0)
            P[j, k] = x[j, k] * w
            A[j, k] = (p - 1.0) * w
    for i in range(n):
        for j in range(n):
            s = 0.0
            row = i * n + j
            for k in range(n):
                s += x[i, k] * P[j, k]
                J[row, i * n + k] += P[j, k]
                J[row, j * n + k] += A[j, k] * x[i, k]
            F[i, j] = s - (1.0 if i == j else 0.0)
    return F_arr, J_arr


cdef inline int _row_cmp(int64_t[:, ::1] T, Py_ssize_t a, Py_ssize_t b, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t k
    for k in range(n):
        if T[a, k] < T[b, k]:
            return -1
        if T[a, k] > T[b, k]:
            return 1
    return 0


def canonical_key(Q):
    """Lexicographic minimum over signed column permutations of the row-normalized, row-sorted form."""
    cdef const int64_t[:, ::1] q = np.ascontiguousarray(Q, dtype=np.int64)
    cdef Py_ssize_t n = q.shape[0]
    perms_arr, _ = signed_permutations(n)
    cdef const int64_t[:, ::1] perms = perms_arr
    cdef Py_ssize_t G = perms.shape[0]
    cdef Py_ssize_t g, i, j, a, b, tmp
    cdef int64_t v, lead
    cdef int mask, cmp, have_best = 0
    T_arr = np.empty((n, n), dtype=np.int64)
    best_arr = np.empty((n, n), dtype=np.int64)
    order_arr = np.empty(n, dtype=np.intp)
    cdef int64_t[:, ::1] T = T_arr
    cdef int64_t[:, ::1] best = best_arr
    cdef Py_ssize_t[::1] order = order_arr
    with nogil:
        for g in range(G):
            for mask in range(1 << n):
                for i in range(n):
                    lead = 0
                    for j in range(n):
                        v = q[i, perms[g, j]]
                        if (mask >> j) & 1:
                            v = -v
                        T[i, j] = v
                        if lead == 0:
                            lead = v
                    if lead < 0:
                        for j in range(n):
                            T[i, j] = -T[i, j]
                # insertion sort of row indices
                for i in range(n):
                    order[i] = i
                for a in range(1, n):
                    b = a
                    while b > 0 and _row_cmp(T, order[b], order[b - 1], n) < 0:
                        tmp = order[b]
                        order[b] = order[b - 1]
                        order[b - 1] = tmp
                        b -= 1
                cmp = 0
                if have_best:
                    for i in range(n):
                        for j in range(n):
                            if T[order[i], j] != best[i, j]:
                                cmp = -1 if T[order[i], j] < best[i, j] else 1
                                break
                        if cmp != 0:
                            break
                if not have_best or cmp < 0:
                    for i in range(n):
                        for j in range(n):
                            best[i, j] = T[order[i], j]
                    have_best = 1
    return best_arr


cdef void _residual_into(const double[:, ::1] x, Py_ssize_t n, double p,
                         double[:, ::1] P, double[:, ::1] F) noexcept nogil:
    cdef Py_ssize_t i, j, k
    cdef double s
    for j in range(n):
        for k in range(n):
            P[j, k] = x[j, k] * _abs_pow(x[j, k], p - 2.0)
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += x[i, k] * P[j, k]
            F[i, j] = s - (1.0 if i == j else 0.0)


cdef void _jacobian_into(const double[:, ::1] x, Py_ssize_t n, double p,
                         const double[:, ::1] P, double[:, ::1] J) noexcept nogil:
    cdef Py_ssize_t i, j, k, row
    cdef double a
    for i in range(n * n):
        for j in range(n * n):
            J[i, j] = 0.0
    for i in range(n):
        for j in range(n):
            row = i * n + j
            for k in range(n):
                a = (p - 1.0) * _abs_pow(x[j, k], p - 2.0)
                J[row, i * n + k] += P[j, k]
                J[row, j * n + k] += a * x[i, k]


cdef double _max_abs(const double[:, ::1] F, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double m = 0.0
    for i in range(n):
        for j in range(n):
            if fabs(F[i, j]) > m or not isfinite(F[i, j]):
                m = fabs(F[i, j]) if isfinite(F[i, j]) else 1e308
    return m


cdef double _sum_sq(const double[:, ::1] F, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    for i in range(n):
        for j in range(n):
            s += F[i, j] * F[i, j]
    return s


cdef int _lu_solve(double[:, ::1] A, double[::1] b, Py_ssize_t m) noexcept nogil:
    """Solve A z = b in place (z returned in b) by partial-pivot elimination; 1 if singular."""
    cdef Py_ssize_t i, j, k, piv
    cdef double best, t, f
    for k in range(m):
        piv = k
        best = fabs(A[k, k])
        for i in range(k + 1, m):
            if fabs(A[i, k]) > best:
                best = fabs(A[i, k])
                piv = i
        if best == 0.0:
            return 1
        if piv != k:
            for j in range(m):
                t = A[k, j]
                A[k, j] = A[piv, j]
                A[piv, j] = t
            t = b[k]
            b[k] = b[piv]
            b[piv] = t
        for i in range(k + 1, m):
            f = A[i, k] / A[k, k]
            if f != 0.0:
                for j in range(k, m):
                    A[i, j] -= f * A[k, j]
                b[i] -= f * b[k]
    for i in range(m - 1, -1, -1):
        t = b[i]
        for j in range(i + 1, m):
            t -= A[i, j] * b[j]
        b[i] = t / A[i, i]
    for i in range(m):
        if not isfinite(b[i]):
            return 1
    return 0


def newton_core(X, double p, double residual_tol, int max_iter, int polish_steps,
                double armijo_c, double shrink):
    X_arr = np.array(X, dtype=np.float64, order="C")
    cdef Py_ssize_t n = X_arr.shape[0]
    cdef Py_ssize_t m = n * n
    cdef double[:, ::1] x = X_arr
    Xn_arr = np.empty((n, n))
    cdef double[:, ::1] xn = Xn_arr
    cdef double[:, ::1] P = np.empty((n, n))
    cdef double[:, ::1] F = np.empty((n, n))
    cdef double[:, ::1] Fn = np.empty((n, n))
    cdef double[:, ::1] J = np.empty((m, m))
    cdef double[::1] d = np.empty(m)
    cdef Py_ssize_t i, j
    cdef double r, r_new, phi, alpha, big
    cdef int iters = 0, polish = 0, status = DIVERGED, accepted
    with nogil:
        _residual_into(x, n, p, P, F)
        _jacobian_into(x, n, p, P, J)
        r = _max_abs(F, n)
        while True:
            if r <= residual_tol:
                status = CONVERGED
                if r == 0.0 or polish >= polish_steps:
                    break
                polish += 1
            if iters >= max_iter:
                break
            for i in range(n):
                for j in range(n):
                    d[i * n + j] = -F[i, j]
            if _lu_solve(J, d, m):
                if status != CONVERGED:
                    status = SINGULAR
                break
            phi = _sum_sq(F, n)
            alpha = 1.0
            accepted = 0
            while alpha > 1e-12:
                for i in range(n):
                    for j in range(n):
                        xn[i, j] = x[i, j] + alpha * d[i * n + j]
                _residual_into(xn, n, p, P, Fn)
                if _sum_sq(Fn, n) <= (1.0 - 2.0 * armijo_c * alpha) * phi:
                    accepted = 1
                    break
                alpha *= shrink
            if not accepted:
                break
            iters += 1
            r_new = _max_abs(Fn, n)
            if status == CONVERGED and r_new >= r:
                break
            big = 0.0
            for i in range(n):
                for j in range(n):
                    x[i, j] = xn[i, j]
                    F[i, j] = Fn[i, j]
                    if not isfinite(x[i, j]):
                        big = 1e308
                    elif fabs(x[i, j]) > big:
                        big = fabs(x[i, j])
            r = r_new
            # P still holds pmap(xn) from the accepted trial
            _jacobian_into(x, n, p, P, J)
            if big > 1e6:
                status = DIVERGED
                break
    return X_arr, r, iters, status
