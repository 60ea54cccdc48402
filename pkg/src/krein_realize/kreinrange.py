"""Spectral range machinery for the weighted Gram operator: cutoff into
kernel and kept eigenpairs, signature bookkeeping, and the positive and
indefinite forms carried by the operator range.

Everything downstream works in coordinates with respect to the kept
eigenvectors; the inverse of |P|^{1/2} is never formed, so the rapid decay
of the spectrum cannot be amplified.
"""

import numpy as np

from ._errors import ArgumentError
from .scalars import Quaternion
from .linalg import QuatMatrix, adjoint, hermitian_eig

__all__ = [
    "KreinBasis",
    "spectral_split",
    "hilbert_form",
    "krein_form",
]

CONDITION_BAND = 1e3


class KreinBasis:
    """Kept eigenpairs of a Hermitian matrix after a relative cutoff.

    eigenvalues are ordered by descending magnitude; signs are their
    signs; vectors holds the matching orthonormal eigenvector columns.
    n_zero counts the directions assigned to the numerical kernel, and
    warnings lists conditioning notes for kept eigenvalues that sit within
    three decades of the cutoff.
    """

    __slots__ = ("eigenvalues", "vectors", "signs", "cutoff", "n_zero", "warnings")

    def __init__(self, eigenvalues, vectors, signs, cutoff, n_zero, warnings=()):
        object.__setattr__(self, "eigenvalues", np.asarray(eigenvalues, dtype=float))
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "signs", np.asarray(signs, dtype=int))
        object.__setattr__(self, "cutoff", float(cutoff))
        object.__setattr__(self, "n_zero", int(n_zero))
        object.__setattr__(self, "warnings", tuple(warnings))

    def __setattr__(self, name, value):
        raise AttributeError("KreinBasis is immutable")

    @property
    def kept(self):
        return self.eigenvalues.shape[0]

    @property
    def ambient_dim(self):
        return self.vectors.shape[0]

    @property
    def field(self):
        return "quaternion" if isinstance(self.vectors, QuatMatrix) else "complex"

    @property
    def signature(self):
        n_plus = int(np.sum(self.signs > 0))
        n_minus = int(np.sum(self.signs < 0))
        return (n_plus, n_minus, self.n_zero)

    def coords(self, x):
        """Coefficients of x in the kept eigenbasis (projection built in)."""
        return adjoint(self.vectors) @ x

    def project(self, x):
        """(I - pi) x: the orthogonal projection onto the kept span."""
        return self.vectors @ self.coords(x)

    def _apply_diag(self, x, scale):
        c = self.coords(x)
        if isinstance(c, QuatMatrix):
            c = c * np.asarray(scale, dtype=float)[:, None]
        else:
            c = c * scale
        return self.vectors @ c

    def apply_abs(self, x):
        """|P| x on the kept span."""
        return self._apply_diag(x, np.abs(self.eigenvalues))

    def apply_abs_sqrt(self, x):
        """|P|^{1/2} x on the kept span."""
        return self._apply_diag(x, np.sqrt(np.abs(self.eigenvalues)))

    def apply_sigma(self, x):
        """The sign operator sigma x = sum_k s_k u_k <x-coefficient>."""
        return self._apply_diag(x, self.signs.astype(float))

    def apply(self, x):
        """P x reconstructed from the kept eigenpairs."""
        return self._apply_diag(x, self.eigenvalues)

    def reconstruct(self):
        """sum_k lambda_k u_k u_k*, the rank-kept reconstruction."""
        if isinstance(self.vectors, QuatMatrix):
            return self.vectors.scale_columns(self.eigenvalues) @ self.vectors.adjoint()
        return (self.vectors * self.eigenvalues[None, :]) @ adjoint(self.vectors)

    def __repr__(self):
        return "KreinBasis(signature=%r, cutoff=%g, field=%s)" % (
            self.signature,
            self.cutoff,
            self.field,
        )


def spectral_split(ptilde, eps):
    """Eigen-split of a Hermitian matrix with a relative kernel cutoff.

    Eigenvalues with |lambda| <= eps * max|lambda| populate the numerical
    kernel; the rest are kept, ordered by descending magnitude.  Kept
    eigenvalues within a factor 1000 of the cutoff produce a conditioning
    warning rather than an error.
    """
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ArgumentError("cutoff must lie strictly between 0 and 1, got %g" % eps)
    decomp = hermitian_eig(ptilde)
    values = np.asarray(decomp.values, dtype=float)
    total = values.shape[0]
    scale = float(np.max(np.abs(values))) if total else 0.0
    if scale == 0.0:
        keep_idx = np.array([], dtype=int)
    else:
        magnitude = np.abs(values)
        keep_mask = magnitude > eps * scale
        keep_idx = np.flatnonzero(keep_mask)
        order = np.argsort(-magnitude[keep_idx], kind="stable")
        keep_idx = keep_idx[order]
    kept_values = values[keep_idx]
    if isinstance(decomp.vectors, QuatMatrix):
        kept_vectors = QuatMatrix(
            decomp.vectors.a[:, keep_idx], decomp.vectors.b[:, keep_idx]
        )
    else:
        kept_vectors = decomp.vectors[:, keep_idx]
    signs = np.where(kept_values > 0.0, 1, -1)
    n_zero = total - keep_idx.shape[0]
    warnings = []
    if scale > 0.0:
        band = np.abs(kept_values) <= CONDITION_BAND * eps * scale
        n_band = int(np.sum(band))
        if n_band:
            warnings.append(
                "%d kept eigenvalue(s) within three decades of the cutoff "
                "%g * %g; signature and moments may be cutoff-sensitive"
                % (n_band, eps, scale)
            )
    return KreinBasis(kept_values, kept_vectors, signs, eps, n_zero, warnings)


def _zero_scalar(basis):
    if basis.field == "quaternion":
        return Quaternion(0.0)
    return 0j


def hilbert_form(x, y, basis):
    """The positive form of the range: sum_k conj(y_k) x_k / |lambda_k|.

    Arguments are ambient vectors; components outside the kept span are
    projected away.  With x = |P|^{1/2} f and y = |P|^{1/2} g this equals
    <f, (I - pi) g>, the Hilbert inner product of the operator range.
    """
    if basis.kept == 0:
        return _zero_scalar(basis)
    cx = basis.coords(x)
    cy = basis.coords(y)
    inv_mag = 1.0 / np.abs(basis.eigenvalues)
    if isinstance(cx, QuatMatrix):
        return (cy.adjoint() @ (cx * inv_mag[:, None])).entry(0, 0)
    return complex(np.vdot(cy, cx * inv_mag))


def krein_form(x, y, basis):
    """The indefinite form of the range: signs weight each kept direction.

    Equal to hilbert_form with y replaced by sigma y; negative squares
    appear exactly in the directions with negative eigenvalues.
    """
    if basis.kept == 0:
        return _zero_scalar(basis)
    cx = basis.coords(x)
    cy = basis.coords(y)
    weight = basis.signs / np.abs(basis.eigenvalues)
    if isinstance(cx, QuatMatrix):
        return (cy.adjoint() @ (cx * weight[:, None])).entry(0, 0)
    return complex(np.vdot(cy, cx * weight))
