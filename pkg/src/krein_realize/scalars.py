"""Quaternion scalars: products, conjugation, slice decomposition, chi embedding.

A quaternion is stored as four reals ``w + x i + y j + z k``.  The pair form
``q = z1 + z2 j`` with ``z1 = w + x i`` and ``z2 = y + z i`` is computed on
demand; it is the form used by the complex 2x2 embedding

    chi(q) = [[z1, z2], [-conj(z2), conj(z1)]],

which is a skew-field homomorphism into the complex 2x2 matrices.
"""

import math
import numbers
from dataclasses import dataclass

import numpy as np

from ._errors import ArgumentError

__all__ = [
    "Quaternion",
    "SliceForm",
    "quat_mul",
    "slice_decompose",
    "chi_scalar",
    "as_quaternion",
    "QUAT_ONE",
    "QUAT_I",
    "QUAT_J",
    "QUAT_K",
]

# below this relative size the imaginary part counts as zero and the slice
# axis falls back to i (total-function convention for real inputs)
_REAL_AXIS_RTOL = 1e-14


class Quaternion:
    """Immutable quaternion ``w + x i + y j + z k`` with real coefficients."""

    __slots__ = ("w", "x", "y", "z")

    def __init__(self, w, x=0.0, y=0.0, z=0.0):
        object.__setattr__(self, "w", float(w))
        object.__setattr__(self, "x", float(x))
        object.__setattr__(self, "y", float(y))
        object.__setattr__(self, "z", float(z))

    def __setattr__(self, name, value):
        raise AttributeError("Quaternion is immutable")

    @classmethod
    def from_complex(cls, c):
        """Embed a complex number ``a + b i`` as ``a + b i + 0 j + 0 k``."""
        c = complex(c)
        return cls(c.real, c.imag, 0.0, 0.0)

    @classmethod
    def from_pair(cls, z1, z2):
        """Build ``z1 + z2 j`` from the complex pair (z1, z2)."""
        z1 = complex(z1)
        z2 = complex(z2)
        return cls(z1.real, z1.imag, z2.real, z2.imag)

    @property
    def z1(self):
        """First complex component in the ``q = z1 + z2 j`` split."""
        return complex(self.w, self.x)

    @property
    def z2(self):
        """Second complex component in the ``q = z1 + z2 j`` split."""
        return complex(self.y, self.z)

    @property
    def real(self):
        return self.w

    @property
    def vec(self):
        """Imaginary (vector) part as a 3-array (x, y, z)."""
        return np.array([self.x, self.y, self.z])

    def conjugate(self):
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm_sq(self):
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def __abs__(self):
        return math.sqrt(self.norm_sq())

    def inverse(self):
        n2 = self.norm_sq()
        if n2 == 0.0:
            raise ZeroDivisionError("inverse of zero quaternion")
        c = self.conjugate()
        return Quaternion(c.w / n2, c.x / n2, c.y / n2, c.z / n2)

    def is_real(self, rtol=_REAL_AXIS_RTOL):
        return math.sqrt(
            self.x * self.x + self.y * self.y + self.z * self.z
        ) <= rtol * (1.0 + abs(self))

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Quaternion(
            self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __pos__(self):
        return self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return quat_mul(self, other)

    def __rmul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return quat_mul(other, self)

    def __truediv__(self, other):
        if isinstance(other, numbers.Real):
            return Quaternion(
                self.w / other, self.x / other, self.y / other, self.z / other
            )
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        # right division: self * other^{-1}
        return quat_mul(self, other.inverse())

    def __pow__(self, n):
        if not isinstance(n, numbers.Integral) or n < 0:
            raise ArgumentError("quaternion powers require a non-negative integer")
        out = QUAT_ONE
        base = self
        n = int(n)
        while n:
            if n & 1:
                out = quat_mul(out, base)
            base = quat_mul(base, base)
            n >>= 1
        return out

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (
            self.w == other.w
            and self.x == other.x
            and self.y == other.y
            and self.z == other.z
        )

    def __hash__(self):
        return hash((self.w, self.x, self.y, self.z))

    def isclose(self, other, tol=1e-14):
        other = _coerce(other)
        return abs(self - other) <= tol * (1.0 + abs(self) + abs(other))

    def __repr__(self):
        return "Quaternion(%g, %g, %g, %g)" % (self.w, self.x, self.y, self.z)


def _coerce(value):
    """Coerce a real/complex number to Quaternion; NotImplemented otherwise."""
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, numbers.Real) and not isinstance(value, bool):
        return Quaternion(float(value))
    if isinstance(value, numbers.Complex):
        return Quaternion.from_complex(complex(value))
    return NotImplemented


def as_quaternion(value):
    """Coerce a real, complex, or Quaternion value to a Quaternion.

    Raises
    ------
    ArgumentError
        If the value is not a scalar of a supported kind.
    """
    q = _coerce(value)
    if q is NotImplemented:
        raise ArgumentError("cannot interpret %r as a quaternion" % (value,))
    return q


def quat_mul(a, b):
    """Hamilton product of two quaternions.

    The unique bilinear product generated by ``i^2 = j^2 = k^2 = ijk = -1``;
    associative, with ``|ab| = |a| |b|``.
    """
    a = as_quaternion(a)
    b = as_quaternion(b)
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


QUAT_ONE = Quaternion(1.0)
QUAT_I = Quaternion(0.0, 1.0)
QUAT_J = Quaternion(0.0, 0.0, 1.0)
QUAT_K = Quaternion(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class SliceForm:
    """Decomposition ``q = x0 + axis * y`` with y >= 0 and a unit imaginary axis."""

    x0: float
    y: float
    axis: Quaternion

    def to_quaternion(self):
        return Quaternion(self.x0) + self.axis * self.y


def slice_decompose(q):
    """Split a quaternion as ``x0 + I y`` with ``y = |Im(q)| >= 0``.

    For inputs whose imaginary part is (numerically) zero the axis defaults
    to ``i``; this keeps the function total, since the sphere of imaginary
    units degenerates at real points.
    """
    q = as_quaternion(q)
    y = math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z)
    if y <= _REAL_AXIS_RTOL * (1.0 + abs(q)):
        return SliceForm(x0=q.w, y=y, axis=QUAT_I)
    return SliceForm(
        x0=q.w, y=y, axis=Quaternion(0.0, q.x / y, q.y / y, q.z / y)
    )


def chi_scalar(q):
    """Complex 2x2 image of a quaternion under the chi embedding."""
    q = as_quaternion(q)
    z1 = q.z1
    z2 = q.z2
    return np.array(
        [[z1, z2], [-np.conj(z2), np.conj(z1)]], dtype=complex
    )
