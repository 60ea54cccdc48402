"""Dense matrices over the complex numbers and the quaternions.

Complex matrices are plain numpy arrays.  Quaternionic matrices are stored
as a pair of complex arrays (a, b) meaning ``a + b j`` with j on the right
of each entry; in that convention the chi embedding

    chi(M) = [[a, b], [-conj(b), conj(a)]]

is an algebra homomorphism, which is what every eigenvalue argument here
rests on.  The module also provides the Hermitian eigensolvers for both
fields (cyclic Jacobi under the hood, compiled kernel when available) and
Krein adjoints J A* J.
"""

import numbers
import os

import numpy as np

from ._errors import ArgumentError, ConvergenceError, FieldError, PairingError
from .scalars import Quaternion, as_quaternion
from . import _jacobi as _jacobi_py

try:
    from . import _cyjacobi as _jacobi_cy
except ImportError:
    _jacobi_cy = None

__all__ = [
    "QuatMatrix",
    "EigDecomposition",
    "herm_eig",
    "quat_herm_eig",
    "hermitian_eig",
    "chi_embed",
    "chi_split",
    "krein_adjoint",
    "adjoint",
    "fro_norm",
    "max_abs",
    "op_norm",
    "op_norm_est",
    "eye_like",
    "zeros_like_field",
    "hstack",
    "solve_linear",
    "eig_backend_name",
]

_HERMITICITY_RTOL = 1e-12
_RESIDUAL_RTOL = 1e-10
_PAIRING_RTOL = 1e-8


def _pick_backend():
    """Resolve the Jacobi backend from KREIN_REALIZE_BACKEND (auto default)."""
    choice = os.environ.get("KREIN_REALIZE_BACKEND", "auto").strip().lower()
    if choice in ("", "auto"):
        return _jacobi_cy if _jacobi_cy is not None else _jacobi_py
    if choice in ("compiled", "cython"):
        if _jacobi_cy is None:
            raise ArgumentError(
                "KREIN_REALIZE_BACKEND=compiled but the compiled kernel is "
                "not importable; build the extension or use 'python'"
            )
        return _jacobi_cy
    if choice in ("python", "py"):
        return _jacobi_py
    raise ArgumentError(
        "KREIN_REALIZE_BACKEND must be auto, compiled, or python; got %r" % choice
    )


def eig_backend_name():
    """Name of the Jacobi backend that hermitian eigensolvers will use."""
    return _pick_backend().BACKEND_NAME


class QuatMatrix:
    """Dense quaternionic matrix stored as the complex pair ``a + b j``.

    Values are immutable by convention: operations return new instances and
    the component arrays are never mutated in place.  Scalar multiplication
    by non-real scalars is deliberately not overloaded; use :meth:`lmul` and
    :meth:`rmul`, since left and right products differ over the quaternions.
    """

    # keep numpy from broadcasting into our operators
    __array_ufunc__ = None
    __array_priority__ = 1000

    __slots__ = ("a", "b")

    def __init__(self, a, b=None):
        a = np.asarray(a, dtype=complex)
        if a.ndim != 2:
            raise ArgumentError("QuatMatrix needs 2-d components, got %d-d" % a.ndim)
        if b is None:
            b = np.zeros_like(a)
        else:
            b = np.asarray(b, dtype=complex)
        if b.shape != a.shape:
            raise ArgumentError(
                "component shapes differ: %r vs %r" % (a.shape, b.shape)
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("QuatMatrix is immutable")

    # ---- constructors -------------------------------------------------

    @classmethod
    def zeros(cls, rows, cols):
        return cls(np.zeros((rows, cols), dtype=complex))

    @classmethod
    def eye(cls, n):
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def from_complex(cls, arr):
        return cls(np.asarray(arr, dtype=complex))

    @classmethod
    def from_scalar(cls, q, n):
        """n x n scalar matrix q * I."""
        q = as_quaternion(q)
        return cls(q.z1 * np.eye(n, dtype=complex), q.z2 * np.eye(n, dtype=complex))

    @classmethod
    def from_entries(cls, entries):
        """Build from a nested list / object array of Quaternion entries."""
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        a = np.zeros((rows, cols), dtype=complex)
        b = np.zeros((rows, cols), dtype=complex)
        for i in range(rows):
            if len(entries[i]) != cols:
                raise ArgumentError("ragged entry rows")
            for j in range(cols):
                q = as_quaternion(entries[i][j])
                a[i, j] = q.z1
                b[i, j] = q.z2
        return cls(a, b)

    @classmethod
    def from_chi(cls, z, check=True, rtol=1e-10):
        """Inverse of :meth:`chi`: split a 2n x 2m block matrix.

        With ``check`` the reconstruction is verified, guarding against
        inputs that are not actually in the image of chi.
        """
        z = np.asarray(z, dtype=complex)
        if z.ndim != 2 or z.shape[0] % 2 or z.shape[1] % 2:
            raise ArgumentError("chi images have even dimensions")
        n = z.shape[0] // 2
        m = z.shape[1] // 2
        out = cls(z[:n, :m], z[:n, m:])
        if check:
            err = np.linalg.norm(z - out.chi())
            if err > rtol * (1.0 + np.linalg.norm(z)):
                raise ArgumentError(
                    "matrix is not a chi image (defect %.3e)" % err
                )
        return out

    # ---- structure ----------------------------------------------------

    @property
    def shape(self):
        return self.a.shape

    @property
    def ndim(self):
        return 2

    def chi(self):
        """Complex embedding [[a, b], [-conj(b), conj(a)]]."""
        return np.block([[self.a, self.b], [-np.conj(self.b), np.conj(self.a)]])

    def adjoint(self):
        """Conjugate transpose over the quaternions: (a, b) -> (a^H, -b^T)."""
        return QuatMatrix(self.a.conj().T, -self.b.T)

    def entry(self, i, j):
        return Quaternion.from_pair(self.a[i, j], self.b[i, j])

    def norm(self):
        """Frobenius norm (sum of squared quaternion entry moduli)."""
        return float(np.sqrt(np.sum(np.abs(self.a) ** 2 + np.abs(self.b) ** 2)))

    def copy(self):
        return QuatMatrix(self.a.copy(), self.b.copy())

    def is_hermitian(self, rtol=_HERMITICITY_RTOL):
        d = self - self.adjoint()
        return d.norm() <= rtol * (1.0 + self.norm())

    def __getitem__(self, key):
        a = self.a[key]
        b = self.b[key]
        if a.ndim != 2:
            raise ArgumentError(
                "index QuatMatrix with 2-d slices; use entry(i, j) for scalars"
            )
        return QuatMatrix(a, b)

    # ---- ring operations ----------------------------------------------

    def __add__(self, other):
        other = _as_quatmatrix(other)
        if other is NotImplemented:
            return NotImplemented
        return QuatMatrix(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_quatmatrix(other)
        if other is NotImplemented:
            return NotImplemented
        return QuatMatrix(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        other = _as_quatmatrix(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return QuatMatrix(-self.a, -self.b)

    def __mul__(self, other):
        # real scalars and real arrays commute with everything and are the
        # only elementwise factors allowed
        factor = _real_factor(other)
        if factor is NotImplemented:
            return NotImplemented
        return QuatMatrix(self.a * factor, self.b * factor)

    __rmul__ = __mul__

    def __truediv__(self, other):
        factor = _real_factor(other)
        if factor is NotImplemented:
            return NotImplemented
        return QuatMatrix(self.a / factor, self.b / factor)

    def __matmul__(self, other):
        if isinstance(other, QuatMatrix):
            a1, b1 = self.a, self.b
            a2, b2 = other.a, other.b
            return QuatMatrix(
                a1 @ a2 - b1 @ np.conj(b2),
                a1 @ b2 + b1 @ np.conj(a2),
            )
        if isinstance(other, np.ndarray):
            # right factor is a complex matrix X: (a + bj) X = aX + b conj(X) j
            other = np.asarray(other, dtype=complex)
            return QuatMatrix(self.a @ other, self.b @ np.conj(other))
        return NotImplemented

    def __rmatmul__(self, other):
        if isinstance(other, np.ndarray):
            # left factor is a complex matrix X: X (a + bj) = Xa + (Xb) j
            other = np.asarray(other, dtype=complex)
            return QuatMatrix(other @ self.a, other @ self.b)
        return NotImplemented

    def lmul(self, q):
        """Left scalar product q * M."""
        q = as_quaternion(q)
        za, zb = q.z1, q.z2
        return QuatMatrix(
            za * self.a - zb * np.conj(self.b),
            za * self.b + zb * np.conj(self.a),
        )

    def rmul(self, q):
        """Right scalar product M * q."""
        q = as_quaternion(q)
        za, zb = q.z1, q.z2
        return QuatMatrix(
            self.a * za - self.b * np.conj(zb),
            self.a * zb + self.b * np.conj(za),
        )

    def scale_columns(self, quats):
        """Right-multiply column k by the quaternion quats[k]."""
        if len(quats) != self.shape[1]:
            raise ArgumentError("need one scalar per column")
        cols = [
            self[:, k : k + 1].rmul(q) for k, q in enumerate(quats)
        ]
        return hstack(cols) if cols else self

    def inv(self):
        """Inverse through the chi embedding (chi of the inverse)."""
        n, m = self.shape
        if n != m:
            raise ArgumentError("inverse needs a square matrix")
        if n == 0:
            return self
        z = np.linalg.inv(self.chi())
        return QuatMatrix.from_chi(z, check=False)

    def __repr__(self):
        return "QuatMatrix(shape=%r)" % (self.shape,)


def _as_quatmatrix(value):
    if isinstance(value, QuatMatrix):
        return value
    if isinstance(value, np.ndarray) and value.ndim == 2:
        return QuatMatrix.from_complex(value)
    return NotImplemented


def _real_factor(value):
    """Validate an elementwise factor: real scalar or real ndarray."""
    if isinstance(value, numbers.Real) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value) and np.any(value.imag != 0.0):
            return NotImplemented
        return value.real if np.iscomplexobj(value) else value
    return NotImplemented


# ---- field-generic helpers ---------------------------------------------


def adjoint(x):
    """Conjugate transpose over either field."""
    if isinstance(x, QuatMatrix):
        return x.adjoint()
    return np.asarray(x).conj().T


def fro_norm(x):
    if isinstance(x, QuatMatrix):
        return x.norm()
    return float(np.linalg.norm(np.asarray(x)))


def max_abs(x):
    """Largest entry magnitude over either field (0.0 for empty input)."""
    if isinstance(x, QuatMatrix):
        if x.a.size == 0:
            return 0.0
        return float(np.max(np.hypot(np.abs(x.a), np.abs(x.b))))
    x = np.asarray(x)
    if x.size == 0:
        return 0.0
    return float(np.max(np.abs(x)))


def op_norm(x):
    """Operator 2-norm; quaternionic matrices go through the chi embedding,
    which preserves the norm."""
    if isinstance(x, QuatMatrix):
        if min(x.shape) == 0:
            return 0.0
        x = x.chi()
    x = np.asarray(x)
    if min(x.shape) == 0:
        return 0.0
    return float(np.linalg.svd(x, compute_uv=False)[0])


def op_norm_est(x, iters=60):
    """Deterministic power-iteration estimate of the operator 2-norm.

    Underestimates by construction (it is a Rayleigh quotient), which is the
    safe direction everywhere this estimate is compared against an upper
    bound.  The start vector is the all-ones vector, so reruns are
    bit-identical.
    """
    rows, cols = (x.shape if isinstance(x, QuatMatrix) else np.asarray(x).shape)
    if rows == 0 or cols == 0:
        return 0.0
    xh = adjoint(x)
    if isinstance(x, QuatMatrix):
        v = QuatMatrix(np.ones((cols, 1), dtype=complex))
    else:
        v = np.ones((cols, 1), dtype=complex)
    nv = fro_norm(v)
    est = 0.0
    for _ in range(iters):
        v = v / nv
        w = x @ v
        est = fro_norm(w)
        if est == 0.0:
            return 0.0
        v = xh @ w
        nv = fro_norm(v)
        if nv == 0.0:
            return est
    return float(np.sqrt(nv))


def eye_like(x, n):
    """Identity of size n in the field of x."""
    if isinstance(x, QuatMatrix):
        return QuatMatrix.eye(n)
    return np.eye(n, dtype=complex)


def zeros_like_field(x, rows, cols):
    if isinstance(x, QuatMatrix):
        return QuatMatrix.zeros(rows, cols)
    return np.zeros((rows, cols), dtype=complex)


def hstack(blocks):
    blocks = list(blocks)
    if not blocks:
        raise ArgumentError("hstack of nothing")
    if isinstance(blocks[0], QuatMatrix):
        return QuatMatrix(
            np.hstack([blk.a for blk in blocks]),
            np.hstack([blk.b for blk in blocks]),
        )
    return np.hstack([np.asarray(blk) for blk in blocks])


def solve_linear(m, rhs):
    """Solve m x = rhs over either field (chi embedding for quaternions)."""
    if isinstance(m, QuatMatrix):
        rhs_q = rhs if isinstance(rhs, QuatMatrix) else QuatMatrix.from_complex(rhs)
        n = m.shape[0]
        if n == 0:
            return rhs_q
        z = np.linalg.solve(m.chi(), rhs_q.chi())
        return QuatMatrix.from_chi(z, check=False)
    return np.linalg.solve(np.asarray(m, dtype=complex), np.asarray(rhs, dtype=complex))


# ---- eigendecompositions ------------------------------------------------


class EigDecomposition:
    """Eigenvalues (ascending, real) and eigenvectors of a Hermitian matrix."""

    __slots__ = ("values", "vectors", "sweeps")

    def __init__(self, values, vectors, sweeps):
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "sweeps", sweeps)

    def __setattr__(self, name, value):
        raise AttributeError("EigDecomposition is immutable")

    def __iter__(self):  # allow values, vectors = decomposition
        yield self.values
        yield self.vectors


def _check_hermitian(h, norm_h, defect):
    if defect > _HERMITICITY_RTOL * (1.0 + norm_h):
        raise ArgumentError(
            "matrix is not Hermitian: ||H - H*|| = %.3e exceeds %.1e * ||H||"
            % (defect, _HERMITICITY_RTOL)
        )


def herm_eig(h, tol=1e-13, max_sweeps=60, resid_tol=_RESIDUAL_RTOL):
    """Hermitian eigendecomposition of a complex matrix.

    Runs the cyclic Jacobi backend until off(H) <= tol * ||H||_F, then
    verifies the residual ||H U - U diag|| <= resid_tol * ||H||.

    Raises
    ------
    ArgumentError
        If the input is not Hermitian to 1e-12 relative.
    ConvergenceError
        If the sweep budget is exhausted or the residual check fails.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ArgumentError("herm_eig needs a square matrix")
    norm_h = float(np.linalg.norm(h))
    _check_hermitian(h, norm_h, float(np.linalg.norm(h - h.conj().T)))
    hs = 0.5 * (h + h.conj().T)
    backend = _pick_backend()
    try:
        w, u, sweeps = backend.jacobi_eigh(hs, tol=tol, max_sweeps=max_sweeps)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    resid = float(np.linalg.norm(h @ u - u * w[None, :]))
    if resid > resid_tol * (1.0 + norm_h):
        raise ConvergenceError(
            "eigendecomposition residual %.3e exceeds %.1e * ||H||"
            % (resid, resid_tol)
        )
    return EigDecomposition(w, u, sweeps)


def _quat_column_norm(v):
    return float(np.sqrt(np.sum(np.abs(v.a) ** 2 + np.abs(v.b) ** 2)))


def _quat_inner(u, v):
    """<v, u> = u* v as a Quaternion, for column matrices u, v."""
    m = u.adjoint() @ v
    return m.entry(0, 0)


def quat_herm_eig(h, tol=1e-13, max_sweeps=60, resid_tol=_RESIDUAL_RTOL,
                  pairing_rtol=_PAIRING_RTOL):
    """Hermitian eigendecomposition of a quaternionic matrix.

    Solves the complex Hermitian problem for chi(H); eigenvalues of the
    embedding come in symplectic pairs, each contributing one right
    eigenvector over the quaternions.  Pairs are matched consecutively in
    the sorted spectrum; a failure to pair raises :class:`PairingError`
    carrying the spectrum.  One quaternionic eigenvector per pair is
    extracted by quaternionic Gram-Schmidt over the candidate set
    ``x - conj(y) j`` built from the chi eigenvector halves, cluster by
    cluster; correctness is enforced by the residual check, not by the
    extraction recipe.

    Returns
    -------
    EigDecomposition
        values (n,) ascending; vectors an n x n unitary QuatMatrix.
    """
    if not isinstance(h, QuatMatrix):
        raise ArgumentError("quat_herm_eig needs a QuatMatrix")
    n = h.shape[0]
    if h.shape[1] != n:
        raise ArgumentError("quat_herm_eig needs a square matrix")
    norm_h = h.norm()
    _check_hermitian(h, norm_h, (h - h.adjoint()).norm())
    if n == 0:
        return EigDecomposition(np.zeros(0), QuatMatrix.zeros(0, 0), 0)
    hs = (h + h.adjoint()) * 0.5
    backend = _pick_backend()
    try:
        w2, u2, sweeps = backend.jacobi_eigh(hs.chi(), tol=tol, max_sweeps=max_sweeps)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc

    scale = float(np.max(np.abs(w2))) if w2.size else 0.0
    gap_tol = pairing_rtol * max(scale, 1e-300)
    pairs = []
    for i in range(n):
        lo, hi = w2[2 * i], w2[2 * i + 1]
        if abs(hi - lo) > gap_tol:
            raise PairingError(
                "chi spectrum failed to pair at position %d: gap %.3e "
                "exceeds %.1e" % (i, abs(hi - lo), gap_tol),
                spectrum=w2.copy(),
            )
        pairs.append(0.5 * (lo + hi))
    values = np.array(pairs)

    # group paired eigenvalues into clusters and extract per cluster
    clusters = []
    start = 0
    for i in range(1, n):
        if values[i] - values[i - 1] > gap_tol:
            clusters.append((start, i))
            start = i
    clusters.append((start, n))

    columns = []
    for lo, hi in clusters:
        need = hi - lo
        cands = []
        for i in range(2 * lo, 2 * hi):
            x = u2[:n, i : i + 1]
            y = u2[n:, i : i + 1]
            cands.append(QuatMatrix(x, -np.conj(y)))
        chosen = []
        for _ in range(need):
            best = None
            best_norm = -1.0
            for cand in cands:
                resid = cand
                for u in chosen:
                    resid = resid - u.rmul(_quat_inner(u, resid))
                rnorm = _quat_column_norm(resid)
                if rnorm > best_norm:
                    best_norm = rnorm
                    best = resid
            if best is None or best_norm <= 1e-6:
                raise ConvergenceError(
                    "could not extract %d independent quaternionic "
                    "eigenvectors for a cluster (best residual %.3e)"
                    % (need, best_norm)
                )
            chosen.append(best * (1.0 / best_norm))
        columns.extend(chosen)

    vectors = hstack(columns)
    # Greedy extraction inside a chained cluster can permute its members,
    # and the pair mean is then off by the full cluster spread, so each
    # column gets its Rayleigh quotient (second-order accurate) instead.
    hv = h @ vectors
    for i in range(n):
        col = vectors[:, i : i + 1]
        values[i] = _quat_inner(col, hv[:, i : i + 1]).w
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = QuatMatrix(vectors.a[:, order], vectors.b[:, order])
    resid = (h @ vectors - vectors * values[None, :]).norm()
    if resid > resid_tol * (1.0 + norm_h):
        raise ConvergenceError(
            "quaternionic eigendecomposition residual %.3e exceeds %.1e * ||H||"
            % (resid, resid_tol)
        )
    return EigDecomposition(values, vectors, sweeps)


def hermitian_eig(h, **kwargs):
    """Field dispatch: herm_eig for ndarrays, quat_herm_eig for QuatMatrix."""
    if isinstance(h, QuatMatrix):
        return quat_herm_eig(h, **kwargs)
    return herm_eig(h, **kwargs)


def chi_embed(m):
    """Complex embedding of a quaternionic matrix (block [[a,b],[-conj b, conj a]])."""
    if not isinstance(m, QuatMatrix):
        raise ArgumentError("chi_embed needs a QuatMatrix")
    return m.chi()


def chi_split(z, check=True):
    """Inverse of chi_embed; validates the block structure when check=True."""
    return QuatMatrix.from_chi(z, check=check)


# ---- Krein adjoints ------------------------------------------------------


def _check_signature(j, side, size):
    j = np.asarray(j)
    if np.iscomplexobj(j):
        if np.any(j.imag != 0.0):
            raise ArgumentError("%s signature entries must be real" % side)
        j = j.real
    if j.ndim == 2:
        if np.any(j != np.diag(np.diag(j))):
            raise ArgumentError("%s signature matrix must be diagonal" % side)
        j = np.diag(j)
    if j.ndim != 1:
        raise ArgumentError("%s signature must be a vector or diagonal matrix" % side)
    if j.shape[0] != size:
        raise ArgumentError(
            "%s signature has length %d, expected %d" % (side, j.shape[0], size)
        )
    if not np.all((j == 1.0) | (j == -1.0)):
        raise ArgumentError("%s signature entries must be +1 or -1" % side)
    return j.astype(float)


def krein_adjoint(a, j_domain=None, j_codomain=None):
    """Adjoint with respect to indefinite inner products: J A* J.

    For an operator ``a`` mapping a domain space to a codomain space,
    ``j_domain`` and ``j_codomain`` are the diagonal +-1 signatures of those
    spaces (given as vectors or diagonal matrices); ``None`` means a Hilbert
    space (identity signature).  For a square ``a`` with only ``j_domain``
    given, the same signature is used on both sides, so
    ``krein_adjoint(A, J)`` is the familiar ``J A* J``.  The operation is
    involutive: applying it twice returns the original matrix.
    """
    rows, cols = a.shape
    ah = adjoint(a)
    if j_codomain is None and j_domain is not None and rows == cols:
        j_codomain = j_domain
    if j_domain is not None:
        jd = _check_signature(j_domain, "domain", cols)
        ah = ah * jd[:, None]
    if j_codomain is not None:
        jc = _check_signature(j_codomain, "codomain", rows)
        ah = ah * jc[None, :]
    return ah
