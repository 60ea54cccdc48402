"""Pure-Python cyclic Jacobi eigensolver for dense Hermitian matrices.

This is the fallback backend; a compiled twin with the same contract lives
in ``_cyjacobi.pyx``.  Rotations are applied with numpy vector operations,
in the same deterministic (p, q) sweep order as the compiled kernel.
"""

import math

import numpy as np

BACKEND_NAME = "python"


def jacobi_eigh(h, tol=1e-13, max_sweeps=60):
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Parameters
    ----------
    h : (n, n) complex ndarray
        Hermitian input (symmetrized by the caller; only the upper triangle
        is trusted to equal the conjugate of the lower one).
    tol : float
        Convergence threshold: off(h) <= tol * ||h||_F, where off(h) is the
        Frobenius norm of the off-diagonal part.
    max_sweeps : int
        Sweep budget before giving up.

    Returns
    -------
    w : (n,) float ndarray
        Eigenvalues in ascending order.
    u : (n, n) complex ndarray
        Unitary matrix of eigenvectors, columns matching ``w``.
    sweeps : int
        Number of sweeps performed.

    Raises
    ------
    RuntimeError
        If the sweep budget is exhausted before convergence.
    """
    h = np.array(h, dtype=complex, order="C")
    n = h.shape[0]
    u = np.eye(n, dtype=complex)
    if n < 2:
        return np.diag(h).real.copy(), u, 0
    fro = np.linalg.norm(h)
    if fro == 0.0:
        return np.zeros(n), u, 0
    # rotations on entries this small cannot push off(h) above tol * fro / 2,
    # so they are skipped (n^2 entries of size s contribute at most n * s)
    skip = 0.5 * tol * fro / n
    sweeps = 0
    for sweep in range(max_sweeps):
        offmat = np.abs(h)
        np.fill_diagonal(offmat, 0.0)
        if np.linalg.norm(offmat) <= tol * fro:
            break
        sweeps = sweep + 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = h[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                app = h[p, p].real
                aqq = h[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ph = apq / mag
                g11 = c
                g12 = s
                g21 = -s * ph.conjugate()
                g22 = c * ph.conjugate()
                cp = h[:, p].copy()
                cq = h[:, q].copy()
                h[:, p] = g11 * cp + g21 * cq
                h[:, q] = g12 * cp + g22 * cq
                rp = h[p, :].copy()
                rq = h[q, :].copy()
                h[p, :] = np.conj(g11) * rp + np.conj(g21) * rq
                h[q, :] = np.conj(g12) * rp + np.conj(g22) * rq
                # closed forms for the rotated 2x2 block (more accurate than
                # the generic update, and they pin the annihilated entry)
                h[p, p] = app - t * mag
                h[q, q] = aqq + t * mag
                h[p, q] = 0.0
                h[q, p] = 0.0
                up = u[:, p].copy()
                uq = u[:, q].copy()
                u[:, p] = g11 * up + g21 * uq
                u[:, q] = g12 * up + g22 * uq
    else:
        raise RuntimeError(
            "Jacobi sweep budget (%d) exhausted before off(h) <= %g * ||h||"
            % (max_sweeps, tol)
        )
    w = np.diag(h).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], u[:, order], sweeps
