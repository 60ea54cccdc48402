"""Model space of the sharp transform and its coisometric realization.

From a spectral split of the weighted Gram operator we synthesize a basis
of functions F_k with Krein-Gram matrix diag(s_k), the point evaluation C
at the origin, and the backward shift R0 in those coordinates.  The
canonical correctness statement is the moment identity

    C R0^n C^{[*]} = Phi_n*   (n >= 1),     C C^{[*]} = Phi_0 + Phi_0*,

with Krein adjoints taken in the signature J = diag(s_k).
"""

import math
from dataclasses import dataclass

import numpy as np

from ._errors import ArgumentError, ConvergenceError, DivergenceError, FieldError
from .scalars import Quaternion, as_quaternion
from .linalg import QuatMatrix, adjoint, fro_norm, krein_adjoint, op_norm

__all__ = [
    "ModelSpace",
    "Realization",
    "RealizationValue",
    "CoisometryDefect",
    "build_model_space",
    "build_c",
    "build_r0",
    "build_realization",
    "realization_eval",
    "moment_check",
    "moment_equiv",
    "kernel_closed",
    "kernel_synth",
    "kernel_reconstruct",
    "coisometry_defect",
]


class ModelSpace:
    """Taylor tables of the synthesized basis functions F_k.

    table stacks the Taylor coefficients row-blockwise: rows n*d ... (n+1)*d
    hold the n-th coefficients of all m kept functions, with

        (F_k)_n = R^{n+1} |lambda_k|^{1/2} (u_k)_{block n+1}.

    signs carries the Krein-Gram diagonal [F_k, F_k] = s_k.
    """

    __slots__ = ("spec", "table", "signs")

    def __init__(self, spec, table, signs):
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "signs", np.asarray(signs, dtype=int))

    def __setattr__(self, name, value):
        raise AttributeError("ModelSpace is immutable")

    @property
    def kept(self):
        return self.table.shape[1]

    @property
    def dim(self):
        return self.spec.d

    @property
    def n_trunc(self):
        return self.spec.n_trunc

    @property
    def field(self):
        return "quaternion" if isinstance(self.table, QuatMatrix) else "complex"

    def coeff_block(self, n):
        """The d x m matrix of n-th Taylor coefficients, 0 <= n < N."""
        if not 0 <= n < self.n_trunc:
            raise ArgumentError("coefficient index %d outside 0..%d"
                                % (n, self.n_trunc - 1))
        lo = n * self.dim
        hi = (n + 1) * self.dim
        if isinstance(self.table, QuatMatrix):
            return self.table[lo:hi, :]
        return self.table[lo:hi, :]

    def coeff(self, k, n):
        """The n-th Taylor coefficient of F_k (a length-d column)."""
        blk = self.coeff_block(n)
        if isinstance(blk, QuatMatrix):
            return blk[:, k:k + 1]
        return blk[:, k]

    def eval_columns(self, z):
        """F(z): the d x m matrix whose k-th column is F_k(z) (left eval)."""
        if self.field == "complex" and not isinstance(z, Quaternion):
            z = complex(z)
            out = np.zeros((self.dim, self.kept), dtype=complex)
            power = 1.0 + 0.0j
            for n in range(self.n_trunc):
                out = out + power * self.coeff_block(n)
                power = power * z
            return out
        q = as_quaternion(z)
        out = QuatMatrix.zeros(self.dim, self.kept)
        power = Quaternion(1.0)
        for n in range(self.n_trunc):
            blk = self.coeff_block(n)
            if not isinstance(blk, QuatMatrix):
                blk = QuatMatrix.from_complex(blk)
            out = out + blk.lmul(power)
            power = power * q
        return out

    def __repr__(self):
        return "ModelSpace(d=%d, kept=%d, field=%s)" % (
            self.dim,
            self.kept,
            self.field,
        )


def build_model_space(basis, spec):
    """Scale the kept eigenvectors into Taylor tables of the F_k."""
    nd = spec.n_trunc * spec.d
    if basis.ambient_dim != nd:
        raise ArgumentError(
            "basis lives in dimension %d, the truncation needs %d"
            % (basis.ambient_dim, nd)
        )
    if basis.field != spec.field:
        raise FieldError(
            "basis over %s does not match a %s series" % (basis.field, spec.field)
        )
    dinv = spec.big_r ** np.arange(1, spec.n_trunc + 1)
    dinv = np.repeat(dinv, spec.d)
    roots = np.sqrt(np.abs(basis.eigenvalues))
    if isinstance(basis.vectors, QuatMatrix):
        table = (basis.vectors * dinv[:, None]).scale_columns(roots)
    else:
        table = basis.vectors * dinv[:, None] * roots[None, :]
    return ModelSpace(spec, table, basis.signs)


def build_c(model):
    """Point evaluation at the origin: column k is F_k(0)."""
    return model.coeff_block(0)


def _r0_shift_check(model, r0):
    """Cross-check R0 against the Taylor shift on an evaluation grid.

    Comparing coefficient tables directly amplifies the cutoff-dropped
    directions by R^n, so the two constructions are compared as functions
    at points well inside the disc of radius r, where the weight decay
    dominates.
    """
    if model.kept == 0:
        return None
    spec = model.spec
    pts = [0.9 * spec.r, -0.9 * spec.r, 0.6 * spec.r, -0.3 * spec.r]
    if model.field == "complex":
        pts += [0.9 * spec.r * complex(math.cos(a), math.sin(a))
                for a in (0.9, 2.2, 4.1)]
    f0 = model.eval_columns(0.0)
    worst = 0.0
    for z in pts:
        fz = model.eval_columns(z)
        shifted = fz @ r0
        quotient = (fz - f0) * (1.0 / z) if isinstance(fz, QuatMatrix) \
            else (fz - f0) / z
        worst = max(worst, fro_norm(shifted - quotient))
    return worst


def build_r0(model, basis):
    """Backward shift in the Krein-orthonormal coordinates.

    (R0)_{lk} = R |lambda_k|^{1/2} |lambda_l|^{-1/2} <S u_k, u_l> with S
    the block shift dropping block one.  The matrix is cross-checked
    against the Taylor-shift action (F_k(z) - F_k(0))/z on a grid; a
    mismatch beyond the cutoff-calibrated tolerance raises.
    """
    spec = model.spec
    m = model.kept
    if m == 0:
        if model.field == "quaternion":
            return QuatMatrix.zeros(0, 0)
        return np.zeros((0, 0), dtype=complex)
    nd = spec.n_trunc * spec.d
    shift = np.eye(nd, k=spec.d)
    mid = adjoint(basis.vectors) @ (shift @ basis.vectors)
    roots = np.sqrt(np.abs(basis.eigenvalues))
    factor = spec.big_r * np.outer(1.0 / roots, roots)
    r0 = mid * factor
    worst = _r0_shift_check(model, r0)
    cut_abs = basis.cutoff * float(np.max(np.abs(basis.eigenvalues)))
    tol = 100.0 * math.sqrt(cut_abs) + 1e-12
    if worst is not None and worst > tol:
        raise ConvergenceError(
            "backward-shift constructions disagree: grid defect %.3e "
            "exceeds the cutoff-calibrated tolerance %.3e" % (worst, tol)
        )
    return r0


class Realization:
    """Coisometric state realization (C, R0) with signature J = diag(s_k).

    skew stores the skew-adjoint part (Phi_0 - Phi_0*)/2, reported in the
    signed arrangements of realization_eval but never entering the moment
    identity.
    """

    __slots__ = ("c", "r0", "j", "skew")

    def __init__(self, c, r0, j, skew):
        j = np.asarray(j, dtype=float)
        if j.ndim != 1 or not np.all(np.abs(j) == 1.0):
            raise ArgumentError("signature must be a vector of +1/-1 entries")
        if c.shape[1] != j.shape[0] or r0.shape != (j.shape[0], j.shape[0]):
            raise ArgumentError("state dimensions of C, R0 and J disagree")
        if skew.shape != (c.shape[0], c.shape[0]):
            raise ArgumentError("skew part must be d x d")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r0", r0)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "skew", skew)

    def __setattr__(self, name, value):
        raise AttributeError("Realization is immutable")

    @property
    def dim(self):
        return self.c.shape[0]

    @property
    def state_dim(self):
        return self.c.shape[1]

    @property
    def field(self):
        return "quaternion" if isinstance(self.c, QuatMatrix) else "complex"

    def c_adj(self):
        """C^{[*]} = J C*: Krein adjoint into the model coordinates."""
        return krein_adjoint(self.c, j_domain=self.j,
                             j_codomain=np.ones(self.dim))

    def r0_adj(self):
        """R0^{[*]} = J R0* J."""
        return krein_adjoint(self.r0, j_domain=self.j)

    def __repr__(self):
        return "Realization(d=%d, state=%d, field=%s)" % (
            self.dim,
            self.state_dim,
            self.field,
        )


def build_realization(model, basis):
    """Assemble (C, R0, J, skew) from a model space and its Krein basis."""
    c = build_c(model)
    r0 = build_r0(model, basis)
    phi0 = model.spec.series.coeffs[0]
    skew = (phi0 - adjoint(phi0)) * 0.5
    return Realization(c, r0, basis.signs.astype(float), skew)


def _moments(real, nmax):
    """[C R0^n C^{[*]} for n = 0..nmax]."""
    c_adj = real.c_adj()
    out = []
    y = real.c
    for _ in range(nmax + 1):
        out.append(y @ c_adj)
        y = y @ real.r0
    return out


@dataclass(frozen=True)
class RealizationValue:
    """Value of the realized function with its derived arrangements.

    value is G(p) = sum_n p^n C R0^n C^{[*]} (the resolvent form over the
    complex numbers); sharp_part subtracts the constant so that it
    approximates the sharp transform of the series; the two signed
    arrangements combine G with the skew part of the constant term.
    tail_bound certifies the dropped tail of the power series (zero when
    the resolvent was solved exactly).
    """

    value: object
    sharp_part: object
    arrangement_plus: object
    arrangement_minus: object
    tail_bound: float


def _resolvent_radius(real):
    """Largest eigenvalue modulus of R0.

    This is the scale on which (I - z R0) degenerates, and hence the
    natural certified disc for the directly solved resolvents.  The
    coordinate 2-norm of R0 is not usable here: in an indefinite model
    space the Krein-orthonormal coordinates skew it far above the
    operator's actual resolvent scale.
    """
    if real.state_dim == 0:
        return 0.0
    if real.field == "quaternion":
        eigs = np.linalg.eigvals(real.r0.chi())
    else:
        eigs = np.linalg.eigvals(real.r0)
    return float(np.max(np.abs(eigs)))


def _g_complex(real, p):
    m = real.state_dim
    rhs = real.c_adj()
    sys = np.eye(m, dtype=complex) - p * real.r0
    return real.c @ np.linalg.solve(sys, rhs)


def _g_quat(real, p, order):
    d = real.dim
    c_adj = real.c_adj()
    out = QuatMatrix.zeros(d, d)
    power = Quaternion(1.0)
    y = real.c
    for _ in range(order + 1):
        out = out + (y @ c_adj).lmul(power)
        power = power * p
        y = y @ real.r0
    return out


def realization_eval(real, p, order=32):
    """Evaluate G(p) = C star (I - p R0)^{-star} C^{[*]}.

    Over the complex numbers the star inverse is the ordinary resolvent
    and is solved exactly; p must stay inside the resolvent disc
    |p| < 1 / rho(R0) with rho the spectral radius.  Over the quaternions
    the left power series is summed to `order` with a geometric tail
    certificate, which needs the stronger condition |p| ||R0|| < 1.
    """
    if real.field == "complex" and not isinstance(p, Quaternion):
        p = complex(p)
        rho = abs(p) * _resolvent_radius(real)
        if rho >= 1.0:
            raise DivergenceError(
                "|p| rho(R0) = %.6g >= 1: the resolvent degenerates" % rho
            )
        g_p = _g_complex(real, p)
        g_mp = _g_complex(real, -p)
        tail = 0.0
    else:
        if real.field == "complex":
            raise FieldError("quaternionic point on a complex realization")
        q = as_quaternion(p)
        norm_r0 = op_norm(real.r0)
        rho = abs(q) * norm_r0
        if rho >= 1.0:
            raise DivergenceError(
                "|p| ||R0|| = %.6g >= 1: outside the certified disc" % rho
            )
        order = int(order)
        if order < 0:
            raise ArgumentError("order must be non-negative")
        g_p = _g_quat(real, q, order)
        g_mp = _g_quat(real, -q, order)
        c_norm = op_norm(real.c)
        tail = 0.0
        if norm_r0 > 0.0 and rho > 0.0:
            tail = c_norm * c_norm * rho ** (order + 1) / (1.0 - rho)
    cc = real.c @ real.c_adj()
    half_cc = cc * 0.5
    skew = real.skew
    return RealizationValue(
        value=g_p,
        sharp_part=g_p - half_cc - skew,
        arrangement_plus=(g_mp - half_cc) + skew,
        arrangement_minus=(half_cc - g_p) + skew,
        tail_bound=float(tail),
    )


def moment_check(real, series, nmax):
    """Error norms of the moment identity against the series coefficients.

    Returns [e_0, ..., e_nmax] with e_0 = ||C C^{[*]} - (Phi_0 + Phi_0*)||
    and e_n = ||C R0^n C^{[*]} - Phi_n*|| in Frobenius norm.
    """
    if series.field != real.field:
        raise FieldError(
            "realization over %s cannot be checked against a %s series"
            % (real.field, series.field)
        )
    if series.dim != real.dim:
        raise ArgumentError(
            "series dimension %d does not match realization dimension %d"
            % (series.dim, real.dim)
        )
    nmax = int(nmax)
    if nmax < 0:
        raise ArgumentError("nmax must be non-negative")
    moments = _moments(real, nmax)
    errors = []
    for n, mom in enumerate(moments):
        if n == 0:
            target = series.coeffs[0] + adjoint(series.coeffs[0])
        elif n <= series.degree:
            target = adjoint(series.coeffs[n])
        else:
            target = None
        diff = mom if target is None else mom - target
        errors.append(fro_norm(diff))
    return errors


def moment_equiv(real_a, real_b, nmax):
    """Moment distances between two realizations of (purportedly) one series."""
    if real_a.dim != real_b.dim:
        raise ArgumentError(
            "output dimensions differ: %d vs %d" % (real_a.dim, real_b.dim)
        )
    if real_a.field != real_b.field:
        raise FieldError("realizations live over different fields")
    nmax = int(nmax)
    if nmax < 0:
        raise ArgumentError("nmax must be non-negative")
    ma = _moments(real_a, nmax)
    mb = _moments(real_b, nmax)
    return [fro_norm(x - y) for x, y in zip(ma, mb)]


def kernel_closed(series, p, a, terms=None):
    """Kernel of the series: sum_t p^t (S(p) + S(a)*) conj(a)^t.

    With terms=None (complex scalars only) the geometric sum is taken in
    closed form, (S(p) + S(a)*) / (1 - p conj(a)); otherwise the first
    `terms` summands are accumulated, which is the truncation-consistent
    object over either field.
    """
    if series.field == "complex" and not isinstance(p, Quaternion) \
            and not isinstance(a, Quaternion):
        p = complex(p)
        a = complex(a)
        mid = series.eval(p) + adjoint(series.eval(a))
        if terms is None:
            return mid / (1.0 - p * np.conj(a))
        terms = int(terms)
        factor = (p * np.conj(a)) ** np.arange(terms)
        return mid * complex(np.sum(factor))
    if terms is None:
        raise ArgumentError(
            "the geometric closed form needs complex scalars; pass terms"
        )
    terms = int(terms)
    q = as_quaternion(p)
    abar = as_quaternion(a).conjugate()
    sp = series.eval(q)
    sa_adj = series.eval(as_quaternion(a)).adjoint()
    if not isinstance(sp, QuatMatrix):
        sp = QuatMatrix.from_complex(sp)
        sa_adj = QuatMatrix.from_complex(sa_adj)
    mid = sp + sa_adj
    out = QuatMatrix.zeros(series.dim, series.dim)
    term = mid
    for t in range(terms):
        if t > 0:
            term = term.lmul(q).rmul(abar)
        out = out + term
    return out


def kernel_synth(model, z, w):
    """sum_k s_k F_k(z) F_k(w)*: the kernel synthesized from the basis."""
    fz = model.eval_columns(z)
    fw = model.eval_columns(w)
    signs = model.signs.astype(float)
    if isinstance(fz, QuatMatrix):
        return fz.scale_columns(signs) @ fw.adjoint()
    return (fz * signs[None, :]) @ adjoint(fw)


def kernel_reconstruct(real, z, w):
    """Resolvent form C (I - zR0)^{-1} [(I - wR0)^{-1}]^{[*]} C^{[*]}.

    Assembled through Krein adjoints in the signature J.  The resolvents
    are solved directly, so the admissible points are those inside the
    resolvent disc |z| < 1 / rho(R0).  Over the quaternions the ordinary
    matrix resolvent is only meaningful for real z and w (where scalars
    commute); non-real points are rejected.
    """
    if real.state_dim == 0:
        if real.field == "quaternion":
            return QuatMatrix.zeros(real.dim, real.dim)
        return np.zeros((real.dim, real.dim), dtype=complex)
    radius = _resolvent_radius(real)
    m = real.state_dim
    if real.field == "quaternion":
        zq = as_quaternion(z)
        wq = as_quaternion(w)
        if not (zq.is_real() and wq.is_real()):
            raise FieldError(
                "the resolvent-form kernel needs real points over the "
                "quaternions; use kernel_synth or kernel_closed off the axis"
            )
        if max(abs(zq), abs(wq)) * radius >= 1.0:
            raise DivergenceError("|z| rho(R0) must stay below 1")
        rz = (QuatMatrix.eye(m) - real.r0 * zq.w).inv()
        rw = (QuatMatrix.eye(m) - real.r0 * wq.w).inv()
    else:
        z = complex(z)
        w = complex(w)
        if max(abs(z), abs(w)) * radius >= 1.0:
            raise DivergenceError("|z| rho(R0) must stay below 1")
        eye = np.eye(m, dtype=complex)
        rz = np.linalg.inv(eye - z * real.r0)
        rw = np.linalg.inv(eye - w * real.r0)
    rw_adj = krein_adjoint(rw, j_domain=real.j)
    return real.c @ rz @ rw_adj @ real.c_adj()


@dataclass(frozen=True)
class CoisometryDefect:
    """Coisometry defect restricted to the observable subspace, plus raw.

    observable is the asserted quantity; raw is the unrestricted defect
    ||R0 R0^{[*]} - I||, dominated by the truncation edge and reported for
    diagnostics only.
    """

    observable: float
    raw: float

    def __float__(self):
        return self.observable


def _orthonormal_columns(cols, drop_tol=1e-10):
    """Modified Gram-Schmidt over either field; near-dependent columns drop."""
    kept = []
    ref = None
    for col in cols:
        if isinstance(col, QuatMatrix):
            v = col.copy()
            base = v.norm()
            for u in kept:
                coef = (u.adjoint() @ v).entry(0, 0)
                v = v - u.rmul(coef)
            for u in kept:
                coef = (u.adjoint() @ v).entry(0, 0)
                v = v - u.rmul(coef)
            nrm = v.norm()
            if nrm > drop_tol * max(base, 1e-300):
                kept.append(v * (1.0 / nrm))
        else:
            v = np.array(col, dtype=complex)
            base = float(np.linalg.norm(v))
            for u in kept:
                v = v - u * np.vdot(u, v)
            for u in kept:
                v = v - u * np.vdot(u, v)
            nrm = float(np.linalg.norm(v))
            if nrm > drop_tol * max(base, 1e-300):
                kept.append(v / nrm)
    return kept


def coisometry_defect(real, k_order):
    """Defect of R0 R0^{[*]} = I on the observable subspace.

    The subspace is spanned by R0^{[*]n} C^{[*]} e_c for n <= k_order over
    the standard coefficient basis, orthonormalized in the Euclidean
    sense.  Finite sections of a coisometric shift fail the identity at
    the truncation edge, so only this restriction is meaningful to assert.
    """
    k_order = int(k_order)
    if k_order < 0:
        raise ArgumentError("k_order must be non-negative")
    if real.state_dim == 0:
        return CoisometryDefect(0.0, 0.0)
    c_adj = real.c_adj()
    r0_adj = real.r0_adj()
    defect_op = real.r0 @ r0_adj
    if isinstance(defect_op, QuatMatrix):
        defect_op = defect_op - QuatMatrix.eye(real.state_dim)
    else:
        defect_op = defect_op - np.eye(real.state_dim, dtype=complex)
    raw = op_norm(defect_op)
    cols = []
    block = c_adj
    for _ in range(k_order + 1):
        for cidx in range(real.dim):
            if isinstance(block, QuatMatrix):
                cols.append(block[:, cidx:cidx + 1])
            else:
                cols.append(block[:, cidx])
        block = r0_adj @ block
    basis_cols = _orthonormal_columns(cols)
    if not basis_cols:
        return CoisometryDefect(0.0, float(raw))
    if isinstance(c_adj, QuatMatrix):
        qa = np.hstack([v.a for v in basis_cols])
        qb = np.hstack([v.b for v in basis_cols])
        q = QuatMatrix(qa, qb)
    else:
        q = np.stack(basis_cols, axis=1)
    restricted = adjoint(q) @ defect_op @ q
    return CoisometryDefect(float(op_norm(restricted)), float(raw))
