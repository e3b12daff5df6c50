# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: resonant RK4 loop and Fock-basis Lindblad RK4 evolution.

Signature-compatible with squeezecav._kernels_py.
"""

import numpy as np

from libc.math cimport cosh, sinh, fabs, isfinite

U_MAX = 300.0
cdef double _U_MAX = 300.0


cdef inline void _sts_rhs(double u, double n, double g, double* du, double* dn) noexcept nogil:
    cdef double c = cosh(u)
    cdef double s = sinh(u)
    du[0] = 0.5 * g - c * s / (2.0 * n + 1.0)
    dn[0] = s * s - n


def sts_evolve(double u0, double nth0, double g, double dtau,
               long n_steps, long record_every):
    """Fixed-step RK4 for the on-resonance (u, n_th) equations.

    Returns (u_samples, nth_samples, steps_done); see the NumPy backend
    for the sampling and overflow-guard contract.
    """
    cdef long n_rec = n_steps // record_every + 1
    if n_steps % record_every:
        n_rec += 1
    u_np = np.empty(n_rec)
    n_np = np.empty(n_rec)
    cdef double[::1] u_out = u_np
    cdef double[::1] n_out = n_np
    cdef double u = u0, n = nth0
    cdef double du1, dn1, du2, dn2, du3, dn3, du4, dn4
    cdef long step, idx = 1, done = n_steps
    u_out[0] = u
    n_out[0] = n
    with nogil:
        for step in range(1, n_steps + 1):
            _sts_rhs(u, n, g, &du1, &dn1)
            _sts_rhs(u + 0.5 * dtau * du1, n + 0.5 * dtau * dn1, g, &du2, &dn2)
            _sts_rhs(u + 0.5 * dtau * du2, n + 0.5 * dtau * dn2, g, &du3, &dn3)
            _sts_rhs(u + dtau * du3, n + dtau * dn3, g, &du4, &dn4)
            u += dtau * (du1 + 2.0 * (du2 + du3) + du4) / 6.0
            n += dtau * (dn1 + 2.0 * (dn2 + dn3) + dn4) / 6.0
            if not (fabs(u) <= _U_MAX) or not isfinite(n):
                done = step - 1
                break
            if step % record_every == 0 or step == n_steps:
                u_out[idx] = u
                n_out[idx] = n
                idx += 1
    return u_np[:idx], n_np[:idx], done


cdef void _rhs(double complex[:, ::1] rho, double q,
               double[::1] sq1, double[::1] sq2,
               double complex[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t dim = rho.shape[0]
    cdef Py_ssize_t i, j
    cdef double complex acc
    for i in range(dim):
        for j in range(dim):
            acc = -0.5 * (i + j) * rho[i, j]
            if i + 1 < dim and j + 1 < dim:
                acc = acc + sq1[i + 1] * sq1[j + 1] * rho[i + 1, j + 1]
            if q != 0.0:
                if i + 2 < dim:
                    acc = acc + q * sq2[i] * rho[i + 2, j]
                if i >= 2:
                    acc = acc - q * sq2[i - 2] * rho[i - 2, j]
                if j >= 2:
                    acc = acc - q * sq2[j - 2] * rho[i, j - 2]
                if j + 2 < dim:
                    acc = acc + q * sq2[j] * rho[i, j + 2]
            out[i, j] = acc


def _check(rho):
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("rho must be a square matrix")
    if rho.dtype != np.complex128 or not rho.flags.c_contiguous:
        raise ValueError("rho must be C-contiguous complex128")


def _ladder_tables(Py_ssize_t dim):
    m = np.arange(dim, dtype=np.float64)
    return np.sqrt(m), np.sqrt((m + 1.0) * (m + 2.0))


def lindblad_rhs(rho, double g, out=None):
    """One application of the dimensionless Lindblad generator."""
    _check(rho)
    if out is None:
        out = np.empty_like(rho)
    sq1_np, sq2_np = _ladder_tables(rho.shape[0])
    cdef double[::1] sq1 = sq1_np
    cdef double[::1] sq2 = sq2_np
    cdef double complex[:, ::1] r = rho
    cdef double complex[:, ::1] o = out
    _rhs(r, 0.25 * g, sq1, sq2, o)
    return out


def lindblad_evolve(rho_arr, double g, double dtau, long n_steps):
    """Advance rho in place by n_steps fixed RK4 steps. Returns rho."""
    _check(rho_arr)
    cdef Py_ssize_t dim = rho_arr.shape[0]
    sq1_np, sq2_np = _ladder_tables(dim)
    cdef double[::1] sq1 = sq1_np
    cdef double[::1] sq2 = sq2_np
    cdef double complex[:, ::1] rho = rho_arr
    cdef double complex[:, ::1] k = np.empty((dim, dim), np.complex128)
    cdef double complex[:, ::1] acc = np.empty((dim, dim), np.complex128)
    cdef double complex[:, ::1] tmp = np.empty((dim, dim), np.complex128)
    cdef double q = 0.25 * g
    cdef Py_ssize_t step, i, j
    with nogil:
        for step in range(n_steps):
            _rhs(rho, q, sq1, sq2, k)
            for i in range(dim):
                for j in range(dim):
                    acc[i, j] = k[i, j]
                    tmp[i, j] = rho[i, j] + 0.5 * dtau * k[i, j]
            _rhs(tmp, q, sq1, sq2, k)
            for i in range(dim):
                for j in range(dim):
                    acc[i, j] = acc[i, j] + 2.0 * k[i, j]
                    tmp[i, j] = rho[i, j] + 0.5 * dtau * k[i, j]
            _rhs(tmp, q, sq1, sq2, k)
            for i in range(dim):
                for j in range(dim):
                    acc[i, j] = acc[i, j] + 2.0 * k[i, j]
                    tmp[i, j] = rho[i, j] + dtau * k[i, j]
            _rhs(tmp, q, sq1, sq2, k)
            for i in range(dim):
                for j in range(dim):
                    rho[i, j] = rho[i, j] + (dtau / 6.0) * (acc[i, j] + k[i, j])
    return rho_arr
