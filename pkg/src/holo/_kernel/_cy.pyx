# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot kernels.

Same contracts as _py.py (which is the reference); sequential C loops
instead of vectorized numpy. Product accumulation is sequential here but a
pairwise tree in _py, so the two backends agree to rounding (~1e-13 for
realistic chain lengths), not bit-exactly.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

__all__ = ["batch_unitary", "chain_expm_2x2", "chain_propagator"]

ctypedef double complex cdbl


cdef inline void _plane_rotate(cdbl[:, ::1] u, cdbl a, cdbl b, cdbl c,
                               cdbl d, Py_ssize_t i, Py_ssize_t j) noexcept:
    # right-multiply u by a rotation in columns (i, j)
    cdef Py_ssize_t r
    cdef cdbl ci, cj
    for r in range(4):
        ci = u[r, i]
        cj = u[r, j]
        u[r, i] = ci * a + cj * c
        u[r, j] = ci * b + cj * d


def batch_unitary(coords, bint half_angle, bint minus_i, bint conj_phase):
    """(M,4,4) stack of U = U13 U14 U23 U24 at M points.

    coords: (M, 8) float64 in canonical coordinate order.
    """
    coords_arr = np.ascontiguousarray(coords, dtype=float)
    if coords_arr.ndim != 2 or coords_arr.shape[1] != 8:
        raise ValueError(f"coords must be (M, 8), got {coords_arr.shape}")
    cdef double[:, ::1] cv = coords_arr
    cdef Py_ssize_t m = cv.shape[0]
    out = np.zeros((m, 4, 4), dtype=complex)
    cdef cdbl[:, :, ::1] uv = out
    cdef Py_ssize_t p, k
    cdef double t, ct, st, pr, pi
    cdef cdbl jj, ph, off01, off10
    cdef Py_ssize_t[4] rows = [0, 0, 1, 1]
    cdef Py_ssize_t[4] cols = [2, 3, 2, 3]
    jj = -1j if minus_i else 1j
    for p in range(m):
        uv[p, 0, 0] = uv[p, 1, 1] = uv[p, 2, 2] = uv[p, 3, 3] = 1.0
        for k in range(4):
            t = cv[p, k]
            if half_angle:
                t *= 0.5
            ct = cos(t)
            st = sin(t)
            pr = cos(cv[p, 4 + k])
            pi = sin(cv[p, 4 + k])
            if conj_phase:
                pi = -pi
            ph = pr + 1j * pi
            off01 = jj * ph * st
            off10 = jj * ph.conjugate() * st
            _plane_rotate(uv[p], ct, off01, off10, ct, rows[k], cols[k])
    return out


def chain_expm_2x2(ls):
    """exp(ls[N-1]) @ ... @ exp(ls[0]) for a stack of anti-hermitian 2x2s.

    Closed form per factor: L = i(a0 I + a . sigma), exp(L) =
    e^{i a0}(cos r I + i sin r (a . sigma)/r) with r = |a|.
    """
    ls_arr = np.ascontiguousarray(ls, dtype=complex)
    if ls_arr.ndim != 3 or ls_arr.shape[1:] != (2, 2):
        raise ValueError(f"expected (N, 2, 2), got {ls_arr.shape}")
    cdef cdbl[:, :, ::1] lv = ls_arr
    cdef Py_ssize_t n = lv.shape[0]
    out = np.eye(2, dtype=complex)
    if n == 0:
        return out
    cdef cdbl[:, ::1] acc = out
    cdef Py_ssize_t k
    cdef double a0, ax, ay, az, r, cr, snc
    cdef cdbl h01, phase, e00, e01, e10, e11, t00, t01, t10, t11
    for k in range(n):
        a0 = 0.5 * (lv[k, 0, 0].imag + lv[k, 1, 1].imag)
        az = 0.5 * (lv[k, 0, 0].imag - lv[k, 1, 1].imag)
        h01 = -1j * lv[k, 0, 1]
        ax = h01.real
        ay = -h01.imag
        r = sqrt(ax * ax + ay * ay + az * az)
        cr = cos(r)
        # sin(r)/r with the removable singularity handled by series
        snc = 1.0 - r * r / 6.0 if r < 1e-6 else sin(r) / r
        phase = cos(a0) + 1j * sin(a0)
        e00 = phase * (cr + 1j * snc * az)
        e01 = phase * (1j * snc * (ax - 1j * ay))
        e10 = phase * (1j * snc * (ax + 1j * ay))
        e11 = phase * (cr - 1j * snc * az)
        # acc <- e @ acc keeps later factors on the left
        t00 = e00 * acc[0, 0] + e01 * acc[1, 0]
        t01 = e00 * acc[0, 1] + e01 * acc[1, 1]
        t10 = e10 * acc[0, 0] + e11 * acc[1, 0]
        t11 = e10 * acc[0, 1] + e11 * acc[1, 1]
        acc[0, 0] = t00
        acc[0, 1] = t01
        acc[1, 0] = t10
        acc[1, 1] = t11
    return out


def chain_propagator(us, double dt, double omega, int nplus):
    """Time-ordered product of exp(-i H_k dt), H_k = U_k H0 U_k^dagger,
    H0 = (omega/2) diag(+1...,-1...) with nplus leading +1 entries.

    Exact two-band step: exp(-i H dt) = cos(omega dt/2) I
    - i sin(omega dt/2) U J U^dagger, J = diag(+-1).
    """
    us_arr = np.ascontiguousarray(us, dtype=complex)
    if us_arr.ndim != 3 or us_arr.shape[1] != us_arr.shape[2]:
        raise ValueError(f"expected (N, d, d), got {us_arr.shape}")
    cdef Py_ssize_t d = us_arr.shape[1]
    if not 0 < nplus < d:
        raise ValueError(f"nplus must be in (0, {d}), got {nplus}")
    out = np.eye(d, dtype=complex)
    cdef cdbl[:, :, ::1] uv = us_arr
    cdef Py_ssize_t n = uv.shape[0]
    if n == 0:
        return out
    cdef cdbl[:, ::1] acc = out
    scratch = np.empty((3, d, d), dtype=complex)
    cdef cdbl[:, ::1] s = scratch[0]
    cdef cdbl[:, ::1] f = scratch[1]
    cdef cdbl[:, ::1] nxt = scratch[2]
    cdef double x = 0.5 * omega * dt
    cdef double cx = cos(x)
    cdef cdbl msx = -1j * sin(x)
    cdef Py_ssize_t k, p, q, r
    cdef cdbl z
    for k in range(n):
        # S = U J U^dagger: S[p,q] = sum_r U[p,r] J_r conj(U[q,r])
        for p in range(d):
            for q in range(d):
                z = 0
                for r in range(nplus):
                    z += uv[k, p, r] * uv[k, q, r].conjugate()
                for r in range(nplus, d):
                    z -= uv[k, p, r] * uv[k, q, r].conjugate()
                s[p, q] = z
        for p in range(d):
            for q in range(d):
                f[p, q] = msx * s[p, q]
            f[p, p] += cx
        # acc <- f @ acc
        for p in range(d):
            for q in range(d):
                z = 0
                for r in range(d):
                    z += f[p, r] * acc[r, q]
                nxt[p, q] = z
        acc[:, :] = nxt
    return out
