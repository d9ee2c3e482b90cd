# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Signatures mirror ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.math cimport sqrt

cnp.import_array()

NAME = "cython"

ctypedef double complex cplx


cdef inline double _abs2(cplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline cplx _conj(cplx z) noexcept nogil:
    return z.conjugate()


cdef cplx _det(cplx* a, int m) noexcept nogil:
    # LU with partial pivoting; destroys a (row-major m x m).
    cdef int i, j, c, piv
    cdef double best, mag
    cdef cplx det = 1.0
    cdef cplx f, t
    if m == 1:
        return a[0]
    if m == 2:
        return a[0] * a[3] - a[1] * a[2]
    for c in range(m):
        piv = c
        best = _abs2(a[c * m + c])
        for i in range(c + 1, m):
            mag = _abs2(a[i * m + c])
            if mag > best:
                best = mag
                piv = i
        if best == 0.0:
            return 0.0
        if piv != c:
            for j in range(c, m):
                t = a[c * m + j]
                a[c * m + j] = a[piv * m + j]
                a[piv * m + j] = t
            det = -det
        det = det * a[c * m + c]
        for i in range(c + 1, m):
            f = a[i * m + c] / a[c * m + c]
            for j in range(c + 1, m):
                a[i * m + j] = a[i * m + j] - f * a[c * m + j]
    return det


cdef void _minors(cplx[:, :] F, const cnp.int64_t[:, :] rows, cplx* out,
                  cplx* buf) noexcept nogil:
    cdef Py_ssize_t r, i, j
    cdef int m = <int>F.shape[1]
    for r in range(rows.shape[0]):
        if m == 0:
            out[r] = 1.0
            continue
        for i in range(m):
            for j in range(m):
                buf[i * m + j] = F[rows[r, i], j]
        out[r] = _det(buf, m)


def minors(F, rows):
    cdef cplx[:, :] Fv = np.asarray(F, dtype=np.complex128)
    cdef const cnp.int64_t[:, :] rv = np.asarray(rows, dtype=np.int64)
    cdef int m = <int>Fv.shape[1]
    out = np.empty(rv.shape[0], dtype=np.complex128)
    cdef cplx[::1] ov = out
    cdef cplx* buf = <cplx*>malloc(max(m * m, 1) * sizeof(cplx))
    with nogil:
        _minors(Fv, rv, &ov[0], buf)
    free(buf)
    return out


def compound(F, rows, cols):
    cdef cplx[:, :] Fv = np.asarray(F, dtype=np.complex128)
    cdef const cnp.int64_t[:, :] rv = np.asarray(rows, dtype=np.int64)
    cdef const cnp.int64_t[:, :] cv = np.asarray(cols, dtype=np.int64)
    cdef int m = <int>rv.shape[1]
    cdef Py_ssize_t r, c, i, j
    out = np.empty((rv.shape[0], cv.shape[0]), dtype=np.complex128)
    cdef cplx[:, ::1] ov = out
    cdef cplx* buf = <cplx*>malloc(max(m * m, 1) * sizeof(cplx))
    with nogil:
        for r in range(rv.shape[0]):
            for c in range(cv.shape[0]):
                if m == 0:
                    ov[r, c] = 1.0
                    continue
                for i in range(m):
                    for j in range(m):
                        buf[i * m + j] = Fv[rv[r, i], cv[c, j]]
                ov[r, c] = _det(buf, m)
    free(buf)
    return out


cdef void _scatter(const cplx[:] vec, cplx* mins, const cnp.int64_t[:] tj,
                   const cnp.int64_t[:] tl, const cnp.int64_t[:] tk,
                   const double[:] ts, cplx* v, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t r
    for r in range(d):
        v[r] = 0.0
    for r in range(tj.shape[0]):
        v[tk[r]] = v[tk[r]] + ts[r] * _conj(mins[tl[r]]) * vec[tj[r]]


def interior(vec, phi, table):
    cdef const cplx[:] vv = np.asarray(vec, dtype=np.complex128)
    cdef cplx[:, :] pv = np.asarray(phi, dtype=np.complex128)
    cdef const cnp.int64_t[:, :] sub = table.sub_rows
    cdef Py_ssize_t d = table.d
    cdef int m = <int>pv.shape[1]
    out = np.empty(d, dtype=np.complex128)
    cdef cplx[::1] ov = out
    cdef cplx* mins = <cplx*>malloc(sub.shape[0] * sizeof(cplx))
    cdef cplx* buf = <cplx*>malloc(max(m * m, 1) * sizeof(cplx))
    cdef const cnp.int64_t[:] tj = table.j
    cdef const cnp.int64_t[:] tl = table.l
    cdef const cnp.int64_t[:] tk = table.k
    cdef const double[:] ts = table.sign
    with nogil:
        _minors(pv, sub, mins, buf)
        _scatter(vv, mins, tj, tl, tk, ts, &ov[0], d)
    free(mins)
    free(buf)
    return out


cdef double _update(const cplx[:] vv, cplx[:, :] F, int slot, cplx[:, :] others,
                    const cnp.int64_t[:, :] sub, const cnp.int64_t[:] tj,
                    const cnp.int64_t[:] tl, const cnp.int64_t[:] tk,
                    const double[:] ts, cplx* mins, cplx* buf, cplx* v,
                    double thresh, double* step) noexcept nogil:
    # One slot update; step receives the phase-aligned column change.
    cdef Py_ssize_t d = F.shape[0]
    cdef int n = <int>F.shape[1]
    cdef int m = n - 1
    cdef Py_ssize_t i, c, cc
    cdef cplx g, ph
    cdef double nv = 0.0, mag, diff
    cc = 0
    for c in range(n):
        if c == slot:
            continue
        for i in range(d):
            others[i, cc] = F[i, c]
        cc += 1
    _minors(others, sub, mins, buf)
    _scatter(vv, mins, tj, tl, tk, ts, v, d)
    for c in range(m):
        g = 0.0
        for i in range(d):
            g = g + _conj(others[i, c]) * v[i]
        for i in range(d):
            v[i] = v[i] - others[i, c] * g
    for i in range(d):
        nv += _abs2(v[i])
    nv = sqrt(nv)
    step[0] = 0.0
    if nv > thresh:
        g = 0.0
        for i in range(d):
            v[i] = v[i] / nv
            g = g + _conj(F[i, slot]) * v[i]
        mag = sqrt(_abs2(g))
        ph = g / mag if mag > 0 else 1.0
        for i in range(d):
            diff = sqrt(_abs2(v[i] - F[i, slot] * ph))
            if diff > step[0]:
                step[0] = diff
            F[i, slot] = v[i]
    return nv


def update_slot(vec, cplx[:, :] F, int slot, table, double thresh):
    cdef const cplx[:] vv = np.asarray(vec, dtype=np.complex128)
    cdef const cnp.int64_t[:, :] sub = table.sub_rows
    cdef const cnp.int64_t[:] tj = table.j
    cdef const cnp.int64_t[:] tl = table.l
    cdef const cnp.int64_t[:] tk = table.k
    cdef const double[:] ts = table.sign
    cdef Py_ssize_t d = F.shape[0]
    cdef int m = <int>F.shape[1] - 1
    cdef double nv, step
    others_arr = np.empty((d, m), dtype=np.complex128)
    cdef cplx[:, :] others = others_arr
    cdef cplx* mins = <cplx*>malloc(sub.shape[0] * sizeof(cplx))
    cdef cplx* buf = <cplx*>malloc(max(m * m, 1) * sizeof(cplx))
    cdef cplx* v = <cplx*>malloc(d * sizeof(cplx))
    with nogil:
        nv = _update(vv, F, slot, others, sub, tj, tl, tk, ts, mins, buf, v, thresh, &step)
    free(mins)
    free(buf)
    free(v)
    return nv


def sweep(vec, cplx[:, :] F, table, double thresh, int start=0):
    cdef const cplx[:] vv = np.asarray(vec, dtype=np.complex128)
    cdef const cnp.int64_t[:, :] sub = table.sub_rows
    cdef const cnp.int64_t[:] tj = table.j
    cdef const cnp.int64_t[:] tl = table.l
    cdef const cnp.int64_t[:] tk = table.k
    cdef const double[:] ts = table.sign
    cdef Py_ssize_t d = F.shape[0]
    cdef int n = <int>F.shape[1]
    cdef int m = n - 1
    cdef int slot, bad = -1
    cdef double nv = 0.0, step, worst = 0.0
    others_arr = np.empty((d, m), dtype=np.complex128)
    cdef cplx[:, :] others = others_arr
    cdef cplx* mins = <cplx*>malloc(sub.shape[0] * sizeof(cplx))
    cdef cplx* buf = <cplx*>malloc(max(m * m, 1) * sizeof(cplx))
    cdef cplx* v = <cplx*>malloc(d * sizeof(cplx))
    with nogil:
        for slot in range(start, n):
            nv = _update(vv, F, slot, others, sub, tj, tl, tk, ts, mins, buf, v, thresh, &step)
            if nv <= thresh:
                bad = slot
                break
            if step > worst:
                worst = step
    free(mins)
    free(buf)
    free(v)
    return nv, worst, bad
