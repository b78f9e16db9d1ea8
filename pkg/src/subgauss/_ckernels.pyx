# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_pykernels``.

All loops run without the GIL so callers may fan mask ranges across threads.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sqrt, fabs, log
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

ctypedef unsigned long long u64

cdef double LN2 = log(2.0)
cdef double EPS = np.finfo(float).eps
cdef double TINY = np.finfo(float).tiny
cdef int MAX_ITER = 200
cdef double EXP_CAP = 700.0


cdef inline double _moment(const double* v2, const double[::1] probs, Py_ssize_t A,
                           double s) noexcept nogil:
    cdef double acc = 0.0, r, s2 = s * s
    cdef Py_ssize_t a
    for a in range(A):
        r = v2[a] / s2
        if r > EXP_CAP:
            r = EXP_CAP
        acc += probs[a] * exp(r)
    return acc


cdef inline double _psi2(const double* v2, const double[::1] probs, Py_ssize_t A,
                         double rtol, long long* iters) noexcept nogil:
    """Bisection on s -> E exp(X^2/s^2); returns -1 if the iteration cap is hit."""
    cdef double mx2 = 0.0, hi, lo, mid
    cdef Py_ssize_t a
    cdef long long it
    for a in range(A):
        if v2[a] > mx2:
            mx2 = v2[a]
    if mx2 == 0.0:
        iters[0] = 0
        return 0.0
    hi = sqrt(mx2 / LN2)
    lo = 0.5 * hi
    it = 1
    while _moment(v2, probs, A, lo) <= 2.0:
        hi = lo
        lo *= 0.5
        it += 1
        if it > MAX_ITER:
            return -1.0
    while hi - lo > rtol * hi:
        it += 1
        if it > MAX_ITER:
            return -1.0
        mid = 0.5 * (lo + hi)
        if _moment(v2, probs, A, mid) <= 2.0:
            hi = mid
        else:
            lo = mid
    iters[0] = it
    return hi


cdef inline double _psi2_values(double* vals, const double[::1] probs, Py_ssize_t A,
                                double rtol, long long* iters) noexcept nogil:
    """psi_2 of raw values; overwrites ``vals`` with the normalized squares.

    psi_2 is homogeneous, so the bisection runs on values scaled to max |v| = 1.
    """
    cdef double mx = 0.0, norm
    cdef Py_ssize_t a
    for a in range(A):
        if fabs(vals[a]) > mx:
            mx = fabs(vals[a])
    if mx == 0.0:
        iters[0] = 0
        return 0.0
    for a in range(A):
        vals[a] = (vals[a] / mx) * (vals[a] / mx)
    norm = _psi2(vals, probs, A, rtol, iters)
    return norm if norm < 0 else norm * mx


def psi2_rows(values, probs, double rtol=1e-12):
    """psi_2 norm of every row of ``values`` under the common atom weights."""
    cdef const double[:, ::1] v = np.ascontiguousarray(values, dtype=float)
    cdef const double[::1] p = np.ascontiguousarray(probs, dtype=float)
    if v.shape[1] != p.shape[0]:
        raise ValueError("values must be (rows, atoms) matching probs")
    cdef Py_ssize_t B = v.shape[0], A = v.shape[1], b, a
    norms_arr = np.zeros(B)
    iters_arr = np.zeros(B, dtype=np.int64)
    cdef double[::1] norms = norms_arr
    cdef long long[::1] iters = iters_arr
    cdef double* v2 = <double*> malloc(max(A, 1) * sizeof(double))
    cdef bint failed = False
    try:
        with nogil:
            for b in range(B):
                for a in range(A):
                    v2[a] = v[b, a]
                norms[b] = _psi2_values(v2, p, A, rtol, &iters[b])
                if norms[b] < 0:
                    failed = True
                    break
    finally:
        free(v2)
    if failed:
        raise RuntimeError("psi2 bisection exceeded the iteration cap")
    return norms_arr, iters_arr


cdef inline void _snap(double* vals, const double* scale, Py_ssize_t A,
                       double count) noexcept nogil:
    # relative rounding bound, plus an absolute floor for subnormal partial sums
    cdef Py_ssize_t a
    cdef double floor = (count - 1.0) * TINY if count > 1.0 else 0.0
    for a in range(A):
        if fabs(vals[a]) <= count * EPS * scale[a] + floor:
            vals[a] = 0.0


def linear_values(points, theta, masks):
    """Values of <theta_H, x_a> for every mask H (rows) and atom a (columns)."""
    cdef const double[:, ::1] x = np.ascontiguousarray(points, dtype=float)
    cdef const double[::1] th = np.ascontiguousarray(theta, dtype=float)
    cdef const u64[::1] ms = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef Py_ssize_t A = x.shape[0], n = th.shape[0], M = ms.shape[0]
    out_arr = np.zeros((M, A))
    cdef double[:, ::1] out = out_arr
    cdef double* scale = <double*> malloc(max(A, 1) * sizeof(double))
    cdef Py_ssize_t r
    try:
        with nogil:
            for r in range(M):
                _linear_row(x, th, ms[r], n, A, &out[r, 0] if A else NULL, scale)
    finally:
        free(scale)
    return out_arr


cdef inline void _linear_row(const double[:, ::1] x, const double[::1] th, u64 h,
                             Py_ssize_t n, Py_ssize_t A, double* vals,
                             double* scale) noexcept nogil:
    cdef Py_ssize_t a, i
    cdef double t, count = 0.0
    for a in range(A):
        vals[a] = 0.0
        scale[a] = 0.0
    for i in range(n):
        if (h >> i) & 1 and th[i] != 0.0:
            count += 1.0
            for a in range(A):
                t = x[a, i] * th[i]
                vals[a] += t
                scale[a] += fabs(t)
    _snap(vals, scale, A, count)


def linear_psi2(points, probs, theta, masks, double rtol=1e-12):
    """psi_2 norm of <theta_H, X> for each mask H."""
    cdef const double[:, ::1] x = np.ascontiguousarray(points, dtype=float)
    cdef const double[::1] p = np.ascontiguousarray(probs, dtype=float)
    cdef const double[::1] th = np.ascontiguousarray(theta, dtype=float)
    cdef const u64[::1] ms = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef Py_ssize_t A = x.shape[0], n = th.shape[0], M = ms.shape[0], r, a
    out_arr = np.zeros(M)
    cdef double[::1] out = out_arr
    cdef double* vals = <double*> malloc(max(A, 1) * sizeof(double))
    cdef double* scale = <double*> malloc(max(A, 1) * sizeof(double))
    cdef long long it
    cdef bint failed = False
    try:
        with nogil:
            for r in range(M):
                _linear_row(x, th, ms[r], n, A, vals, scale)
                out[r] = _psi2_values(vals, p, A, rtol, &it)
                if out[r] < 0:
                    failed = True
                    break
    finally:
        free(vals)
        free(scale)
    if failed:
        raise RuntimeError("psi2 bisection exceeded the iteration cap")
    return out_arr


def edge_terms(points, edge_masks, weights):
    """W(e) * prod_{j in e} x_{a,j} for every atom a (rows) and edge e (columns)."""
    cdef const double[:, ::1] x = np.ascontiguousarray(points, dtype=float)
    cdef const u64[::1] em = np.ascontiguousarray(edge_masks, dtype=np.uint64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=float)
    cdef Py_ssize_t A = x.shape[0], n = x.shape[1], E = em.shape[0], a, k, j
    out_arr = np.empty((A, E))
    cdef double[:, ::1] out = out_arr
    cdef double t
    with nogil:
        for a in range(A):
            for k in range(E):
                t = w[k]
                for j in range(n):
                    if (em[k] >> j) & 1:
                        t = t * x[a, j]
                out[a, k] = t
    return out_arr


cdef inline void _hom_row(const double[:, ::1] terms, const u64[::1] em, u64 h,
                          Py_ssize_t A, double* vals, double* scale) noexcept nogil:
    cdef Py_ssize_t a, k, E = em.shape[0]
    cdef double t, count = 0.0
    for a in range(A):
        vals[a] = 0.0
        scale[a] = 0.0
    for k in range(E):
        if (h & em[k]) == em[k]:
            count += 1.0
            for a in range(A):
                t = terms[a, k]
                vals[a] += t
                scale[a] += fabs(t)
    _snap(vals, scale, A, count)


def hom_values(points, edge_masks, weights, masks):
    """Values of hom_{W[H]}(x_a) for every mask H (rows) and atom a (columns)."""
    cdef const double[:, ::1] terms = edge_terms(points, edge_masks, weights)
    cdef const u64[::1] em = np.ascontiguousarray(edge_masks, dtype=np.uint64)
    cdef const u64[::1] ms = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef Py_ssize_t A = terms.shape[0], M = ms.shape[0], r
    out_arr = np.zeros((M, A))
    cdef double[:, ::1] out = out_arr
    cdef double* scale = <double*> malloc(max(A, 1) * sizeof(double))
    try:
        with nogil:
            for r in range(M):
                _hom_row(terms, em, ms[r], A, &out[r, 0] if A else NULL, scale)
    finally:
        free(scale)
    return out_arr


def hom_psi2(points, probs, edge_masks, weights, masks, double rtol=1e-12):
    """psi_2 norm of hom_{W[H]}(X) for each mask H."""
    cdef const double[:, ::1] terms = edge_terms(points, edge_masks, weights)
    cdef const double[::1] p = np.ascontiguousarray(probs, dtype=float)
    cdef const u64[::1] em = np.ascontiguousarray(edge_masks, dtype=np.uint64)
    cdef const u64[::1] ms = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef Py_ssize_t A = terms.shape[0], M = ms.shape[0], r, a
    out_arr = np.zeros(M)
    cdef double[::1] out = out_arr
    cdef double* vals = <double*> malloc(max(A, 1) * sizeof(double))
    cdef double* scale = <double*> malloc(max(A, 1) * sizeof(double))
    cdef long long it
    cdef bint failed = False
    try:
        with nogil:
            for r in range(M):
                _hom_row(terms, em, ms[r], A, vals, scale)
                out[r] = _psi2_values(vals, p, A, rtol, &it)
                if out[r] < 0:
                    failed = True
                    break
    finally:
        free(vals)
        free(scale)
    if failed:
        raise RuntimeError("psi2 bisection exceeded the iteration cap")
    return out_arr


cdef double _link_max(const u64* monos, const double* coefs, Py_ssize_t K) noexcept nogil:
    cdef u64 support = 0, sub
    cdef Py_ssize_t k
    cdef double L, best = 0.0
    cdef bint disjoint = True
    for k in range(K):
        if support & monos[k]:
            disjoint = False
        support |= monos[k]
    if disjoint:
        # monomials in disjoint variables take their signs independently
        for k in range(K):
            best += fabs(coefs[k])
        return best
    if support:
        support &= support - 1  # global sign flip symmetry: pin the lowest variable
    sub = support
    while True:
        L = 0.0
        for k in range(K):
            if __builtin_popcountll(sub & monos[k]) & 1:
                L -= coefs[k]
            else:
                L += coefs[k]
        if fabs(L) > best:
            best = fabs(L)
        if sub == 0:
            break
        sub = (sub - 1) & support
    return best


def delta_vertex(edge_masks, weights, Py_ssize_t n, masks):
    """Exact per-coordinate oscillation of hom_{W[H]} over the cube, for each mask H."""
    cdef const u64[::1] em = np.ascontiguousarray(edge_masks, dtype=np.uint64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=float)
    cdef const u64[::1] ms = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef Py_ssize_t E = em.shape[0], M = ms.shape[0], r, i, k, K
    out_arr = np.zeros((M, n))
    cdef double[:, ::1] out = out_arr
    cdef u64* monos = <u64*> malloc(max(E, 1) * sizeof(u64))
    cdef double* coefs = <double*> malloc(max(E, 1) * sizeof(double))
    cdef u64 h, bit
    try:
        with nogil:
            for r in range(M):
                h = ms[r]
                for i in range(n):
                    bit = (<u64> 1) << i
                    if not (h & bit):
                        continue
                    K = 0
                    for k in range(E):
                        if (em[k] & h) == em[k] and (em[k] & bit):
                            monos[K] = em[k] ^ bit
                            coefs[K] = w[k]
                            K += 1
                    if K:
                        out[r, i] = 2.0 * _link_max(monos, coefs, K)
    finally:
        free(monos)
        free(coefs)
    return out_arr
