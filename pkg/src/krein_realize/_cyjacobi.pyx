# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled cyclic Jacobi eigensolver for dense Hermitian matrices.

Contract-identical twin of ``_jacobi.py``: same rotation formulas, same
deterministic sweep order, same skip rule and convergence test, so the two
backends are interchangeable up to floating-point rounding.
"""

import numpy as np

from libc.math cimport fabs, hypot, sqrt

BACKEND_NAME = "compiled"


cdef inline double _cabs(double complex z) noexcept:
    return hypot(z.real, z.imag)


cdef double _fro(double complex[:, ::1] h) noexcept:
    cdef Py_ssize_t i, j, n = h.shape[0]
    cdef double total = 0.0
    cdef double complex z
    for i in range(n):
        for j in range(n):
            z = h[i, j]
            total += z.real * z.real + z.imag * z.imag
    return sqrt(total)


cdef double _off(double complex[:, ::1] h) noexcept:
    cdef Py_ssize_t i, j, n = h.shape[0]
    cdef double total = 0.0
    cdef double complex z
    for i in range(n):
        for j in range(n):
            if i != j:
                z = h[i, j]
                total += z.real * z.real + z.imag * z.imag
    return sqrt(total)


def jacobi_eigh(h, double tol=1e-13, int max_sweeps=60):
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Same contract as the pure-Python backend: returns (eigenvalues
    ascending, unitary eigenvector matrix, sweeps) and raises RuntimeError
    when the sweep budget is exhausted before off(h) <= tol * ||h||_F.
    """
    a = np.array(h, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = a.shape[0]
    u = np.eye(n, dtype=np.complex128)
    if n < 2:
        return np.diag(a).real.copy(), u, 0
    cdef double complex[:, ::1] hv = a
    cdef double complex[:, ::1] uv = u
    cdef double fro = _fro(hv)
    if fro == 0.0:
        return np.zeros(n), u, 0
    cdef double skip = 0.5 * tol * fro / n
    cdef Py_ssize_t sweep, p, q, i
    cdef int sweeps = 0
    cdef bint converged = False
    cdef double mag, app, aqq, tau, t, c, s, g11, g12
    cdef double complex apq, ph, g21, g22, cp, cq, rp, rq, vp, vq
    for sweep in range(max_sweeps):
        if _off(hv) <= tol * fro:
            converged = True
            break
        sweeps = sweep + 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = hv[p, q]
                mag = _cabs(apq)
                if mag <= skip:
                    continue
                app = hv[p, p].real
                aqq = hv[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0.0 else -1.0) / (fabs(tau) + hypot(1.0, tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                ph = apq / mag
                g11 = c
                g12 = s
                g21 = -s * ph.conjugate()
                g22 = c * ph.conjugate()
                for i in range(n):
                    cp = hv[i, p]
                    cq = hv[i, q]
                    hv[i, p] = g11 * cp + g21 * cq
                    hv[i, q] = g12 * cp + g22 * cq
                for i in range(n):
                    rp = hv[p, i]
                    rq = hv[q, i]
                    hv[p, i] = g11 * rp + g21.conjugate() * rq
                    hv[q, i] = g12 * rp + g22.conjugate() * rq
                hv[p, p] = app - t * mag
                hv[q, q] = aqq + t * mag
                hv[p, q] = 0.0
                hv[q, p] = 0.0
                for i in range(n):
                    vp = uv[i, p]
                    vq = uv[i, q]
                    uv[i, p] = g11 * vp + g21 * vq
                    uv[i, q] = g12 * vp + g22 * vq
    if not converged:
        raise RuntimeError(
            "Jacobi sweep budget (%d) exhausted before off(h) <= %g * ||h||"
            % (max_sweeps, tol)
        )
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], u[:, order], sweeps
