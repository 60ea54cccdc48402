"""Operator-valued power series: evaluation, the sharp transform, the
star product, and the star inverse of I - pT.

All series are finite (polynomial).  The left-coefficient convention is
fixed throughout: f(p) = sum_n p^n f_n with the scalar power multiplying
each matrix entry on the left, which over the quaternions is the left
slice-hyperholomorphic evaluation.
"""

import math
import numbers
from dataclasses import dataclass

import numpy as np

from ._errors import ArgumentError, DivergenceError, FieldError
from .scalars import Quaternion, as_quaternion
from .linalg import QuatMatrix, adjoint, fro_norm, op_norm

__all__ = [
    "OperatorSeries",
    "StarInverseResult",
    "eval_series",
    "sharp",
    "star_mul",
    "star_inv_linear",
    "slice_components",
]


class OperatorSeries:
    """Finite list of d x d matrix Taylor coefficients with a certified radius.

    Coefficients are either all complex ndarrays or all QuatMatrix; the
    radius r0 (0 < r0 <= 1) is the circle on which norm bounds for the
    associated forms are certified.
    """

    __slots__ = ("coeffs", "radius")

    def __init__(self, coeffs, radius):
        coeffs = list(coeffs)
        if not coeffs:
            raise ArgumentError("a series needs at least one coefficient")
        radius = float(radius)
        if not 0.0 < radius <= 1.0:
            raise ArgumentError("certified radius must lie in (0, 1], got %g" % radius)
        quat = isinstance(coeffs[0], QuatMatrix)
        norm = []
        d = None
        for k, c in enumerate(coeffs):
            if isinstance(c, QuatMatrix) != quat:
                raise FieldError("coefficient %d mixes scalar fields" % k)
            if not quat:
                c = np.asarray(c, dtype=complex)
            if c.ndim != 2 or c.shape[0] != c.shape[1]:
                raise ArgumentError("coefficient %d is not square" % k)
            if d is None:
                d = c.shape[0]
            elif c.shape[0] != d:
                raise ArgumentError(
                    "coefficient %d is %dx%d, expected %dx%d"
                    % (k, c.shape[0], c.shape[1], d, d)
                )
            norm.append(c)
        object.__setattr__(self, "coeffs", tuple(norm))
        object.__setattr__(self, "radius", radius)

    def __setattr__(self, name, value):
        raise AttributeError("OperatorSeries is immutable")

    @classmethod
    def from_scalars(cls, values, radius):
        """Build a 1x1 series from scalar coefficients (complex or Quaternion)."""
        quat = any(isinstance(v, Quaternion) for v in values)
        coeffs = []
        for v in values:
            if quat:
                coeffs.append(QuatMatrix.from_scalar(as_quaternion(v), 1))
            else:
                coeffs.append(np.array([[complex(v)]]))
        return cls(coeffs, radius)

    @property
    def dim(self):
        return self.coeffs[0].shape[0]

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def field(self):
        return "quaternion" if isinstance(self.coeffs[0], QuatMatrix) else "complex"

    def quaternionic_coeffs(self):
        """Coefficients promoted to QuatMatrix (identity on quaternionic series)."""
        if self.field == "quaternion":
            return self.coeffs
        return tuple(QuatMatrix.from_complex(c) for c in self.coeffs)

    def eval(self, p):
        """Left evaluation sum_n p^n Phi_n.

        A complex point on a complex series gives a complex ndarray; any
        quaternionic ingredient promotes the result to a QuatMatrix.
        """
        if self.field == "complex" and not isinstance(p, Quaternion):
            p = complex(p)
            out = np.zeros_like(self.coeffs[0])
            power = 1.0 + 0.0j
            for c in self.coeffs:
                out = out + power * c
                power = power * p
            return out
        q = as_quaternion(p)
        coeffs = self.quaternionic_coeffs()
        out = QuatMatrix.zeros(self.dim, self.dim)
        power = Quaternion(1.0)
        for c in coeffs:
            out = out + c.lmul(power)
            power = power * q
        return out

    def sharp(self):
        """Coefficient-wise adjoint; an involution."""
        return OperatorSeries([adjoint(c) for c in self.coeffs], self.radius)

    def __repr__(self):
        return "OperatorSeries(d=%d, degree=%d, field=%s, radius=%g)" % (
            self.dim,
            self.degree,
            self.field,
            self.radius,
        )


def eval_series(f, p):
    """Module-level alias for :meth:`OperatorSeries.eval`."""
    return f.eval(p)


def sharp(f):
    """Module-level alias for :meth:`OperatorSeries.sharp`."""
    return f.sharp()


def star_mul(f, g):
    """Star product: the Cauchy product of the coefficient lists.

    Over the complex numbers this coincides with the pointwise product of
    the polynomial functions; over the quaternions it is the product that
    keeps left slice-hyperholomorphic series closed under multiplication.
    The certified radius of the product is the smaller input radius.
    """
    if not isinstance(f, OperatorSeries) or not isinstance(g, OperatorSeries):
        raise ArgumentError("star_mul needs two OperatorSeries")
    if f.field != g.field:
        raise FieldError(
            "cannot star-multiply %s and %s series" % (f.field, g.field)
        )
    if f.dim != g.dim:
        raise ArgumentError(
            "dimension mismatch: %d vs %d" % (f.dim, g.dim)
        )
    fc = f.coeffs
    gc = g.coeffs
    out = []
    for n in range(len(fc) + len(gc) - 1):
        lo = max(0, n - len(gc) + 1)
        hi = min(n, len(fc) - 1)
        acc = None
        for r in range(lo, hi + 1):
            term = fc[r] @ gc[n - r]
            acc = term if acc is None else acc + term
        out.append(acc)
    return OperatorSeries(out, min(f.radius, g.radius))


@dataclass(frozen=True)
class StarInverseResult:
    """Partial star sum for (I - pT)^{-star} with its certificate.

    value
        The partial sum sum_{n <= order} p^n T^n.
    tail_bound
        Geometric bound (|p| ||T||)^{order+1} / (1 - |p| ||T||) on the
        dropped tail, in operator norm.
    norm_t
        The operator norm of T used in the bound (exact, via svd).
    closed_form
        The closed-form inverse when available, else None.
    closed_form_available
        False when the companion matrix could not be inverted.
    discrepancy
        Frobenius distance between value and closed_form (None when the
        closed form is unavailable).
    """

    value: object
    tail_bound: float
    norm_t: float
    closed_form: object
    closed_form_available: bool
    discrepancy: object


def _star_partial_sum(t, p, order):
    quat = isinstance(t, QuatMatrix)
    m = t.shape[0]
    if quat or isinstance(p, Quaternion):
        tq = t if quat else QuatMatrix.from_complex(np.asarray(t, dtype=complex))
        q = as_quaternion(p)
        out = QuatMatrix.zeros(m, m)
        power_t = QuatMatrix.eye(m)
        power_p = Quaternion(1.0)
        for _ in range(order + 1):
            out = out + power_t.lmul(power_p)
            power_t = power_t @ tq
            power_p = power_p * q
        return out
    t = np.asarray(t, dtype=complex)
    p = complex(p)
    out = np.zeros((m, m), dtype=complex)
    power = np.eye(m, dtype=complex)
    scal = 1.0 + 0.0j
    for _ in range(order + 1):
        out = out + scal * power
        power = power @ t
        scal = scal * p
    return out


def _closed_form_inverse(t, p):
    """Closed form for (I - pT)^{-star}; raises LinAlgError when singular."""
    if isinstance(t, QuatMatrix):
        m = t.shape[0]
        q = as_quaternion(p)
        if q.is_real():
            return (QuatMatrix.eye(m) - t * q.w).inv()
        s = q.inverse()
        smod2 = s.norm_sq()
        companion = t @ t - t * (2.0 * s.w) + QuatMatrix.eye(m) * smod2
        factor = (t - QuatMatrix.from_scalar(s.conjugate(), m)) @ companion.inv()
        return -factor.lmul(q.inverse())
    t = np.asarray(t, dtype=complex)
    p = complex(p)
    m = t.shape[0]
    return np.linalg.inv(np.eye(m, dtype=complex) - p * t)


def star_inv_linear(t, p, order):
    """Star inverse of I - pT as a certified partial sum plus a closed form.

    The convergent series sum_n p^n T^n is the ground truth; the closed
    form (the ordinary resolvent over the complex numbers, the rational
    expression through the companion matrix T^2 - 2 Re(s) T + |s|^2 I with
    s = 1/p for non-real quaternionic p) is computed alongside and the
    discrepancy reported.  A singular companion yields
    ``closed_form_available=False`` with the series result intact.

    Raises
    ------
    DivergenceError
        If |p| ||T|| >= 1, where the geometric series has no certificate.
    """
    if isinstance(t, QuatMatrix):
        if t.shape[0] != t.shape[1]:
            raise ArgumentError("star_inv_linear needs a square matrix")
    else:
        t = np.asarray(t, dtype=complex)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ArgumentError("star_inv_linear needs a square matrix")
    order = int(order)
    if order < 0:
        raise ArgumentError("order must be non-negative")
    norm_t = op_norm(t)
    mod_p = abs(as_quaternion(p)) if isinstance(p, Quaternion) else abs(complex(p))
    rho = mod_p * norm_t
    if rho >= 1.0:
        raise DivergenceError(
            "|p| ||T|| = %.6g >= 1: the star series for (I - pT)^{-star} "
            "has no convergence certificate" % rho
        )
    value = _star_partial_sum(t, p, order)
    tail = (rho ** (order + 1)) / (1.0 - rho) if norm_t > 0.0 else 0.0
    try:
        closed = _closed_form_inverse(t, p)
    except np.linalg.LinAlgError:
        return StarInverseResult(
            value=value,
            tail_bound=tail,
            norm_t=norm_t,
            closed_form=None,
            closed_form_available=False,
            discrepancy=None,
        )
    return StarInverseResult(
        value=value,
        tail_bound=tail,
        norm_t=norm_t,
        closed_form=closed,
        closed_form_available=True,
        discrepancy=fro_norm(value - closed),
    )


def _check_axis(axis):
    axis = as_quaternion(axis)
    if abs(axis.w) > 1e-12 or abs(abs(axis) - 1.0) > 1e-12:
        raise ArgumentError(
            "slice axis must be a unit imaginary quaternion, got %r" % (axis,)
        )
    return axis


def slice_components(f, x, y, axis):
    """Split f on the slice through ``axis`` into even/odd components.

    Returns the pair (alpha, beta) with

        alpha = (f(x + Iy) + f(x - Iy)) / 2
        beta  = -I (f(x + Iy) - f(x - Iy)) / 2,   I = axis,

    both QuatMatrix.  For left power series these components do not depend
    on the chosen axis, and they satisfy alpha(x, -y) = alpha(x, y),
    beta(x, -y) = -beta(x, y).
    """
    if not isinstance(f, OperatorSeries):
        raise ArgumentError("slice_components needs an OperatorSeries")
    axis = _check_axis(axis)
    x = float(x)
    y = float(y)
    p_plus = Quaternion(x) + axis * y
    p_minus = Quaternion(x) - axis * y
    f_plus = f.eval(p_plus)
    f_minus = f.eval(p_minus)
    if not isinstance(f_plus, QuatMatrix):
        f_plus = QuatMatrix.from_complex(f_plus)
        f_minus = QuatMatrix.from_complex(f_minus)
    alpha = (f_plus + f_minus) * 0.5
    beta = (f_minus - f_plus).lmul(axis) * 0.5
    return alpha, beta
