"""Truncated Hermitian form of an operator series on a weighted space of
principal parts, computed three independent ways, and the weighted Gram
operator that represents it in orthonormal coordinates.

The ambient space holds vectors f(z) = sum_{u>=1} z^{-u} f_u with the
weighted norm sum_u R^{2u} ||f_u||^2, R = 1/r.  Truncation keeps the first
N coefficient blocks.  The form attached to an operator series Phi is

    [f, g] = sum_v sum_{u<=v} <Phi_{v-u} f_v, g_u>
           + sum_u sum_{v<=u} <Phi*_{u-v} f_v, g_u>

(both sums include the diagonal, so the diagonal weight is
Phi_0 + Phi_0*).  The same form is realized as a block matrix A and as a
double contour quadrature; the three routes cross-check each other.
"""

import math
from typing import NamedTuple

import numpy as np

from ._errors import ArgumentError, FieldError
from .scalars import Quaternion, as_quaternion
from .linalg import QuatMatrix, adjoint, op_norm, op_norm_est

__all__ = [
    "GramSpec",
    "CoeffVector",
    "GramOperator",
    "NormBoundReport",
    "form_coeff",
    "build_form_matrix",
    "form_contour",
    "cauchy_vector",
    "apply_p_cauchy",
    "shift_blocks_down",
    "shift_blocks_up",
    "weighted_norm",
    "norm_bound_check",
]


class GramSpec:
    """Operator series together with the weight radius and truncation order.

    Parameters
    ----------
    series : OperatorSeries
        The coefficients Phi_0 ... Phi_m with certified radius r0.
    r : float
        Weight radius, 0 < r < r0.  The certified radius must in turn be
        strictly below 1 for the norm bound of the form to hold.
    n_trunc : int
        Number of coefficient blocks kept (N >= 1).
    """

    __slots__ = ("series", "r", "n_trunc")

    def __init__(self, series, r, n_trunc):
        r = float(r)
        n_trunc = int(n_trunc)
        if series.radius >= 1.0:
            raise ArgumentError(
                "the weighted form needs a certified radius below 1, got %g"
                % series.radius
            )
        if not 0.0 < r < series.radius:
            raise ArgumentError(
                "weight radius must satisfy 0 < r < %g, got %g"
                % (series.radius, r)
            )
        if n_trunc < 1:
            raise ArgumentError("truncation order must be >= 1, got %d" % n_trunc)
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "n_trunc", n_trunc)

    def __setattr__(self, name, value):
        raise AttributeError("GramSpec is immutable")

    @property
    def d(self):
        return self.series.dim

    @property
    def field(self):
        return self.series.field

    @property
    def big_r(self):
        return 1.0 / self.r

    def weights(self):
        """Diagonal of D = diag(r^u x I_d), length N*d."""
        return np.repeat(self.r ** np.arange(1, self.n_trunc + 1), self.d)

    def __repr__(self):
        return "GramSpec(d=%d, N=%d, r=%g, field=%s)" % (
            self.d,
            self.n_trunc,
            self.r,
            self.field,
        )


class CoeffVector:
    """Flat stack of N coefficient blocks f_1 ... f_N, each of length d.

    Complex vectors are stored as a 1-d complex ndarray of length N*d;
    quaternionic vectors as an (N*d) x 1 QuatMatrix.
    """

    __slots__ = ("data", "dim")

    def __init__(self, data, dim):
        dim = int(dim)
        if dim < 1:
            raise ArgumentError("block dimension must be >= 1")
        if isinstance(data, QuatMatrix):
            if data.shape[1] != 1:
                raise ArgumentError("quaternionic coefficient data must be a column")
            total = data.shape[0]
        else:
            data = np.asarray(data, dtype=complex).reshape(-1)
            total = data.shape[0]
        if total == 0 or total % dim != 0:
            raise ArgumentError(
                "data length %d is not a positive multiple of dim %d" % (total, dim)
            )
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dim", dim)

    def __setattr__(self, name, value):
        raise AttributeError("CoeffVector is immutable")

    @classmethod
    def zeros(cls, n_trunc, dim, field="complex"):
        if field == "quaternion":
            return cls(QuatMatrix.zeros(n_trunc * dim, 1), dim)
        return cls(np.zeros(n_trunc * dim, dtype=complex), dim)

    @classmethod
    def from_blocks(cls, blocks):
        blocks = list(blocks)
        if not blocks:
            raise ArgumentError("need at least one block")
        if isinstance(blocks[0], QuatMatrix):
            a = np.vstack([b.a for b in blocks])
            b = np.vstack([b.b for b in blocks])
            return cls(QuatMatrix(a, b), blocks[0].shape[0])
        arrs = [np.asarray(b, dtype=complex).reshape(-1) for b in blocks]
        dim = arrs[0].shape[0]
        for k, a in enumerate(arrs):
            if a.shape[0] != dim:
                raise ArgumentError("block %d has length %d, expected %d"
                                    % (k + 1, a.shape[0], dim))
        return cls(np.concatenate(arrs), dim)

    @classmethod
    def unit(cls, n_trunc, dim, block, comp=0, field="complex"):
        """Standard basis vector supported on one component of one block."""
        if not 1 <= block <= n_trunc:
            raise ArgumentError("block index %d outside 1..%d" % (block, n_trunc))
        if not 0 <= comp < dim:
            raise ArgumentError("component index %d outside 0..%d" % (comp, dim - 1))
        if field == "quaternion":
            a = np.zeros((n_trunc * dim, 1), dtype=complex)
            a[(block - 1) * dim + comp, 0] = 1.0
            return cls(QuatMatrix(a, np.zeros_like(a)), dim)
        data = np.zeros(n_trunc * dim, dtype=complex)
        data[(block - 1) * dim + comp] = 1.0
        return cls(data, dim)

    @property
    def n_trunc(self):
        if isinstance(self.data, QuatMatrix):
            return self.data.shape[0] // self.dim
        return self.data.shape[0] // self.dim

    @property
    def field(self):
        return "quaternion" if isinstance(self.data, QuatMatrix) else "complex"

    def block(self, u):
        """Block f_u, 1-based.  Complex: (d,) ndarray; quaternionic: (d,1)."""
        if not 1 <= u <= self.n_trunc:
            raise ArgumentError("block index %d outside 1..%d" % (u, self.n_trunc))
        lo = (u - 1) * self.dim
        hi = u * self.dim
        if isinstance(self.data, QuatMatrix):
            return self.data[lo:hi, :]
        return self.data[lo:hi]

    def blocks(self):
        return [self.block(u) for u in range(1, self.n_trunc + 1)]

    def __add__(self, other):
        self._compatible(other)
        return CoeffVector(self.data + other.data, self.dim)

    def __sub__(self, other):
        self._compatible(other)
        return CoeffVector(self.data - other.data, self.dim)

    def _compatible(self, other):
        if not isinstance(other, CoeffVector):
            raise ArgumentError("expected a CoeffVector")
        if other.dim != self.dim or other.n_trunc != self.n_trunc:
            raise ArgumentError("coefficient vector shapes differ")
        if other.field != self.field:
            raise FieldError("coefficient vectors live over different fields")

    def __repr__(self):
        return "CoeffVector(N=%d, d=%d, field=%s)" % (
            self.n_trunc,
            self.dim,
            self.field,
        )


def _check_vector(f, spec, name):
    if not isinstance(f, CoeffVector):
        raise ArgumentError("%s must be a CoeffVector" % name)
    if f.dim != spec.d:
        raise ArgumentError(
            "%s has block dimension %d, the series needs %d" % (name, f.dim, spec.d)
        )
    if f.n_trunc != spec.n_trunc:
        raise ArgumentError(
            "%s has %d blocks, the truncation keeps %d"
            % (name, f.n_trunc, spec.n_trunc)
        )
    if f.field != spec.field:
        raise FieldError(
            "%s lives over %s but the series is %s" % (name, f.field, spec.field)
        )


def _block_pair(x, y):
    """<x, y> = y* x for one coefficient block, field generic."""
    if isinstance(x, QuatMatrix):
        return (y.adjoint() @ x).entry(0, 0)
    return complex(np.vdot(y, x))


def form_coeff(f, g, spec):
    """The Hermitian form [f, g] as a direct sum over coefficient blocks.

    Linear in f, conjugate-linear in g.  Only bands |u - v| <= deg(Phi)
    contribute; the double sum is evaluated band by band.
    """
    _check_vector(f, spec, "f")
    _check_vector(g, spec, "g")
    coeffs = spec.series.coeffs
    deg = spec.series.degree
    n = spec.n_trunc
    phi0 = coeffs[0]
    diag = phi0 + adjoint(phi0)
    total = None
    for u in range(1, n + 1):
        term = _block_pair(diag @ f.block(u), g.block(u))
        total = term if total is None else total + term
    for k in range(1, min(deg, n - 1) + 1):
        phik = coeffs[k]
        phik_adj = adjoint(phik)
        for u in range(1, n - k + 1):
            total = total + _block_pair(phik @ f.block(u + k), g.block(u))
            total = total + _block_pair(phik_adj @ f.block(u), g.block(u + k))
    return total


class GramOperator:
    """Block matrix A of the form plus its r-weighted conjugate P tilde.

    A carries blocks A_{u,u} = Phi_0 + Phi_0*, A_{u,v} = Phi_{v-u} above
    the diagonal and Phi*_{u-v} below; P tilde = D A D with
    D = diag(r^u x I_d) represents the form in coordinates where the
    ambient space is a standard l2.  Both are Hermitian exactly, by
    mirrored assembly.
    """

    __slots__ = ("spec", "a", "ptilde", "weights")

    def __init__(self, spec, a, ptilde, weights):
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "ptilde", ptilde)
        object.__setattr__(self, "weights", weights)

    def __setattr__(self, name, value):
        raise AttributeError("GramOperator is immutable")

    def apply_a(self, f):
        _check_vector(f, self.spec, "f")
        return CoeffVector(self.a @ f.data, self.spec.d)

    def apply_p(self, f):
        """(Pf)_u = r^{2u} (Af)_u, the unweighted action of P itself."""
        _check_vector(f, self.spec, "f")
        out = self.a @ f.data
        scale = self.weights ** 2
        if isinstance(out, QuatMatrix):
            out = out * scale[:, None]
        else:
            out = out * scale
        return CoeffVector(out, self.spec.d)


def build_form_matrix(spec):
    """Assemble the GramOperator of the truncated form.

    The strict upper triangle is built from the coefficient bands, the
    lower triangle is its mirrored adjoint, and the diagonal carries the
    Hermitian block Phi_0 + Phi_0*; A = A* holds exactly.
    """
    coeffs = spec.series.coeffs
    deg = spec.series.degree
    n = spec.n_trunc
    d = spec.d
    nd = n * d
    diag0 = coeffs[0] + adjoint(coeffs[0])
    if spec.field == "quaternion":
        ua = np.zeros((nd, nd), dtype=complex)
        ub = np.zeros((nd, nd), dtype=complex)
        for k in range(1, min(deg, n - 1) + 1):
            band = np.eye(n, k=k)
            ua += np.kron(band, coeffs[k].a)
            ub += np.kron(band, coeffs[k].b)
        upper = QuatMatrix(ua, ub)
        diag = QuatMatrix(np.kron(np.eye(n), diag0.a), np.kron(np.eye(n), diag0.b))
        a = upper + upper.adjoint() + diag
    else:
        upper = np.zeros((nd, nd), dtype=complex)
        for k in range(1, min(deg, n - 1) + 1):
            upper += np.kron(np.eye(n, k=k), coeffs[k])
        a = upper + upper.conj().T + np.kron(np.eye(n), diag0)
    weights = spec.weights()
    ptilde = a * np.outer(weights, weights)
    return GramOperator(spec, a, ptilde, weights)


def form_contour(f, g, spec, nodes=512):
    """The form [f, g] by double trapezoidal quadrature on |z| = r.

    Discretizes (1/4 pi^2) times the double contour integral of
    <C_Phi(a, b) f(a), g(b)> da conj(db) with the sesquianalytic kernel
    C_Phi(a, b) = (Phi(a) + Phi(b)*) / (1 - a conj(b)); with a = r e^{i
    theta}, b = r e^{i phi} the measure becomes a conj(b) d theta d phi /
    (4 pi^2).  Spectrally accurate for polynomial data, and a fully
    independent oracle for form_coeff.

    Complex scalars only; over the quaternions there is no single contour
    playing this role.
    """
    if spec.field != "complex":
        raise FieldError("the contour form is defined for complex series only")
    _check_vector(f, spec, "f")
    _check_vector(g, spec, "g")
    nodes = int(nodes)
    if nodes < 64 or nodes & (nodes - 1) != 0:
        raise ArgumentError("node count must be a power of two >= 64, got %d" % nodes)
    n = spec.n_trunc
    d = spec.d
    r = spec.r
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    a = r * np.exp(1j * theta)
    # principal-part samples f(a_p) = sum_u a_p^{-u} f_u
    powers = a[:, None] ** (-np.arange(1, n + 1)[None, :])
    fs = powers @ f.data.reshape(n, d)
    gs = powers @ g.data.reshape(n, d)
    # series samples Phi(a_p)
    zpow = a[:, None] ** np.arange(len(spec.series.coeffs))[None, :]
    phis = np.tensordot(zpow, np.stack(spec.series.coeffs), axes=([1], [0]))
    ab = a[:, None] * a.conj()[None, :]
    w = ab / (1.0 - ab) / float(nodes) ** 2
    phi_f = np.einsum("pij,pj->pi", phis, fs)
    phi_g = np.einsum("qij,qj->qi", phis, gs)
    term1 = np.vdot(gs, w.T @ phi_f)
    term2 = np.vdot(phi_g, w.T @ fs)
    return complex(term1 + term2)


def cauchy_vector(a, c, spec):
    """Coefficient blocks of the Cauchy section: (g_a c)_u = conj(a)^{u-1} c.

    Powers of conj(a) multiply c on the left, which matters over the
    quaternions.  The section belongs to the weighted space only for
    |a| < r, so larger |a| is a domain error.
    """
    n = spec.n_trunc
    d = spec.d
    if spec.field == "quaternion":
        q = as_quaternion(a)
        if abs(q) >= spec.r:
            raise ArgumentError(
                "|a| = %g is outside the evaluation disc |a| < r = %g"
                % (abs(q), spec.r)
            )
        if isinstance(c, QuatMatrix):
            col = c
        else:
            col = QuatMatrix.from_complex(np.asarray(c, dtype=complex).reshape(d, 1))
        if col.shape != (d, 1):
            raise ArgumentError("c must be a length-%d column" % d)
        abar = q.conjugate()
        power = Quaternion(1.0)
        blocks = []
        for _ in range(n):
            blocks.append(col.lmul(power))
            power = abar * power
        return CoeffVector.from_blocks(blocks)
    if isinstance(a, Quaternion):
        raise FieldError("quaternionic point on a complex series")
    a = complex(a)
    if abs(a) >= spec.r:
        raise ArgumentError(
            "|a| = %g is outside the evaluation disc |a| < r = %g" % (abs(a), spec.r)
        )
    c = np.asarray(c, dtype=complex).reshape(-1)
    if c.shape[0] != d:
        raise ArgumentError("c has length %d, expected %d" % (c.shape[0], d))
    powers = np.conj(a) ** np.arange(n)
    return CoeffVector(np.kron(powers, c), d)


def apply_p_cauchy(spec, w, xi, b):
    """Closed-form action of P on a Cauchy section, evaluated at |b| = r.

    Returns (r^2 / b) (Phi(b)* + Phi(conj w)) xi / (1 - conj(b) conj(w)),
    the value at b of P applied to the section with pole conj(w).  Serves
    as the analytic oracle for A acting on cauchy_vector coefficients.
    """
    if spec.field != "complex":
        raise FieldError("the Cauchy-section action is a complex-setting oracle")
    w = complex(w)
    b = complex(b)
    r = spec.r
    if abs(w) >= r:
        raise ArgumentError(
            "|w| = %g is outside the evaluation disc |w| < r = %g" % (abs(w), r)
        )
    if abs(abs(b) - r) > 1e-8 * r:
        raise ArgumentError("|b| = %g must sit on the circle |b| = r = %g"
                            % (abs(b), r))
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    if xi.shape[0] != spec.d:
        raise ArgumentError("xi has length %d, expected %d" % (xi.shape[0], spec.d))
    phi_b = spec.series.eval(b)
    phi_wbar = spec.series.eval(np.conj(w))
    kernel = (phi_b.conj().T + phi_wbar) / (1.0 - np.conj(b) * np.conj(w))
    return (r * r / b) * (kernel @ xi)


def shift_blocks_down(f):
    """(Tf)_u = f_{u+1}; the last block becomes zero."""
    if not isinstance(f, CoeffVector):
        raise ArgumentError("expected a CoeffVector")
    d = f.dim
    if isinstance(f.data, QuatMatrix):
        a = np.zeros_like(f.data.a)
        b = np.zeros_like(f.data.b)
        a[:-d] = f.data.a[d:]
        b[:-d] = f.data.b[d:]
        return CoeffVector(QuatMatrix(a, b), d)
    data = np.zeros_like(f.data)
    data[:-d] = f.data[d:]
    return CoeffVector(data, d)


def shift_blocks_up(g):
    """(Mg)_u = g_{u-1}; block one becomes zero, the last block falls off."""
    if not isinstance(g, CoeffVector):
        raise ArgumentError("expected a CoeffVector")
    d = g.dim
    if isinstance(g.data, QuatMatrix):
        a = np.zeros_like(g.data.a)
        b = np.zeros_like(g.data.b)
        a[d:] = g.data.a[:-d]
        b[d:] = g.data.b[:-d]
        return CoeffVector(QuatMatrix(a, b), d)
    data = np.zeros_like(g.data)
    data[d:] = g.data[:-d]
    return CoeffVector(data, d)


def weighted_norm(f, spec):
    """sqrt(sum_u R^{2u} ||f_u||^2), the ambient norm of the vector."""
    _check_vector(f, spec, "f")
    scale = spec.big_r ** np.arange(1, spec.n_trunc + 1)
    total = 0.0
    for u in range(1, spec.n_trunc + 1):
        blk = f.block(u)
        if isinstance(blk, QuatMatrix):
            nrm = blk.norm()
        else:
            nrm = float(np.linalg.norm(blk))
        total += (scale[u - 1] * nrm) ** 2
    return math.sqrt(total)


class NormBoundReport(NamedTuple):
    estimate: float
    bound: float
    max_phi: float
    passed: bool


def norm_bound_check(spec, samples=256):
    """Compare a power-iteration estimate of ||P tilde|| with its bound.

    The bound is 2 M r0^2 / (1 - r0^2)^2 with M the maximum of ||Phi(z)||
    over |z| = r0, sampled at `samples` points (on the i-slice circle in
    the quaternionic case).  The estimate never exceeds the true norm, so
    a failed check indicates a genuine violation.
    """
    samples = int(samples)
    if samples < 1:
        raise ArgumentError("need at least one sample point")
    gram = build_form_matrix(spec)
    estimate = op_norm_est(gram.ptilde)
    r0 = spec.series.radius
    max_phi = 0.0
    for k in range(samples):
        theta = 2.0 * math.pi * k / samples
        if spec.field == "quaternion":
            z = Quaternion(r0 * math.cos(theta), r0 * math.sin(theta))
        else:
            z = complex(r0 * math.cos(theta), r0 * math.sin(theta))
        max_phi = max(max_phi, op_norm(spec.series.eval(z)))
    bound = 2.0 * max_phi * r0 * r0 / (1.0 - r0 * r0) ** 2
    return NormBoundReport(
        estimate=float(estimate),
        bound=float(bound),
        max_phi=float(max_phi),
        passed=bool(estimate <= bound),
    )
