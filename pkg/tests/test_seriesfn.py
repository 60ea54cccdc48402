import numpy as np
import pytest

from krein_realize import (
    ArgumentError,
    DivergenceError,
    FieldError,
    OperatorSeries,
    QUAT_I,
    QUAT_J,
    QuatMatrix,
    Quaternion,
    eval_series,
    op_norm,
    sharp,
    slice_components,
    star_inv_linear,
    star_mul,
)


def random_series(rng, d, deg, radius=0.8):
    coeffs = [
        rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        for _ in range(deg + 1)
    ]
    return OperatorSeries(coeffs, radius)


def random_quat_series(rng, d, deg, radius=0.8):
    coeffs = [
        QuatMatrix(
            rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)),
            rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)),
        )
        for _ in range(deg + 1)
    ]
    return OperatorSeries(coeffs, radius)


# --- construction -------------------------------------------------------


def test_series_validation():
    with pytest.raises(ArgumentError):
        OperatorSeries([], 0.5)
    with pytest.raises(ArgumentError):
        OperatorSeries([np.eye(2)], 0.0)
    with pytest.raises(ArgumentError):
        OperatorSeries([np.eye(2)], 1.5)
    with pytest.raises(ArgumentError):
        OperatorSeries([np.ones((2, 3))], 0.5)
    with pytest.raises(ArgumentError):
        OperatorSeries([np.eye(2), np.eye(3)], 0.5)
    with pytest.raises(FieldError):
        OperatorSeries([np.eye(1), QuatMatrix.from_complex(np.eye(1))], 0.5)


def test_series_immutable():
    s = OperatorSeries([np.eye(2)], 0.5)
    with pytest.raises(AttributeError):
        s.radius = 0.7


def test_series_properties():
    s = OperatorSeries([np.eye(3), 2 * np.eye(3)], 0.6)
    assert s.dim == 3
    assert s.degree == 1
    assert s.field == "complex"
    rng = np.random.default_rng(300)
    q = random_quat_series(rng, 2, 2)
    assert q.field == "quaternion"
    assert q.degree == 2


def test_from_scalars():
    s = OperatorSeries.from_scalars([1.0, 3.0], 0.8)
    assert s.dim == 1 and s.field == "complex"
    assert s.coeffs[1][0, 0] == 3.0
    q = OperatorSeries.from_scalars([Quaternion(1.0), QUAT_J * 0.5], 0.8)
    assert q.field == "quaternion"
    assert q.coeffs[1].entry(0, 0).isclose(Quaternion(0, 0, 0.5, 0))


# --- evaluation ---------------------------------------------------------


def test_eval_identity_series():
    s = OperatorSeries([np.eye(2)], 0.9)
    for p in (0.0, 0.3, 0.1 + 0.2j):
        assert np.allclose(s.eval(p), np.eye(2))
    # quaternionic point promotes
    out = s.eval(QUAT_J * 0.25)
    assert isinstance(out, QuatMatrix)
    assert (out - QuatMatrix.from_complex(np.eye(2))).norm() <= 1e-15


def test_eval_linear_at_j():
    # Phi(p) = p I evaluated at j gives j I
    s = OperatorSeries([np.zeros((2, 2)), np.eye(2)], 0.9)
    out = s.eval(QUAT_J)
    assert (out - QuatMatrix.from_scalar(QUAT_J, 2)).norm() <= 1e-15


def test_eval_matches_polynomial():
    rng = np.random.default_rng(301)
    s = random_series(rng, 2, 4)
    z = 0.17 - 0.05j
    direct = sum(z ** n * c for n, c in enumerate(s.coeffs))
    assert np.max(np.abs(s.eval(z) - direct)) <= 1e-14
    assert np.max(np.abs(eval_series(s, z) - direct)) <= 1e-14


def test_eval_left_powers_matter():
    # coefficient j with point i: left evaluation gives i j = k, while a
    # right convention would give j i = -k
    s = OperatorSeries([QuatMatrix.zeros(1, 1), QuatMatrix.from_scalar(QUAT_J, 1)], 0.9)
    out = s.eval(QUAT_I)
    assert out.entry(0, 0).isclose(Quaternion(0, 0, 0, 1))


# --- sharp --------------------------------------------------------------


def test_sharp_adjoints_coefficients():
    rng = np.random.default_rng(302)
    s = random_series(rng, 3, 2)
    sh = s.sharp()
    for c, cs in zip(s.coeffs, sh.coeffs):
        assert np.allclose(cs, c.conj().T)
    assert sharp(sharp(s)).coeffs[1] == pytest.approx(s.coeffs[1])


def test_sharp_fixes_hermitian_coefficients():
    rng = np.random.default_rng(303)
    coeffs = []
    for _ in range(3):
        x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        coeffs.append(0.5 * (x + x.conj().T))
    s = OperatorSeries(coeffs, 0.7)
    sh = s.sharp()
    for c, cs in zip(s.coeffs, sh.coeffs):
        assert np.max(np.abs(c - cs)) <= 1e-15


# --- star product -------------------------------------------------------


def test_star_mul_complex_is_polynomial_product():
    rng = np.random.default_rng(304)
    f = random_series(rng, 2, 3)
    g = random_series(rng, 2, 2)
    fg = star_mul(f, g)
    assert fg.degree == 5
    assert fg.radius == min(f.radius, g.radius)
    z = 0.21 + 0.07j
    assert np.max(np.abs(fg.eval(z) - f.eval(z) @ g.eval(z))) <= 1e-12


def test_star_mul_unit():
    rng = np.random.default_rng(305)
    f = random_quat_series(rng, 2, 3)
    one = OperatorSeries([QuatMatrix.from_complex(np.eye(2).astype(complex))], 1.0)
    fg = star_mul(f, one)
    for c, d in zip(f.coeffs, fg.coeffs):
        assert (c - d).norm() <= 1e-15


def test_star_mul_associative_quaternionic():
    rng = np.random.default_rng(306)
    f = random_quat_series(rng, 2, 2)
    g = random_quat_series(rng, 2, 1)
    h = random_quat_series(rng, 2, 2)
    left = star_mul(star_mul(f, g), h)
    right = star_mul(f, star_mul(g, h))
    for c, d in zip(left.coeffs, right.coeffs):
        assert (c - d).norm() <= 1e-12


def test_star_mul_rejects_mixed_fields():
    rng = np.random.default_rng(307)
    with pytest.raises(FieldError):
        star_mul(random_series(rng, 2, 1), random_quat_series(rng, 2, 1))


# --- star inverse of I - pT ----------------------------------------------


def test_star_inv_t_zero():
    res = star_inv_linear(np.zeros((3, 3)), 0.4, order=5)
    assert np.allclose(res.value, np.eye(3))
    assert res.tail_bound == 0.0


def test_star_inv_complex_matches_resolvent():
    rng = np.random.default_rng(308)
    for _ in range(25):
        t = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        t /= 2.5 * np.linalg.norm(t, 2)
        p = 0.5 * np.exp(2j * np.pi * rng.random())
        res = star_inv_linear(t, p, order=220)
        assert res.closed_form_available
        assert res.discrepancy <= 1e-10
        direct = np.linalg.inv(np.eye(4) - p * t)
        assert np.max(np.abs(res.value - direct)) <= 1e-10


def test_star_inv_quaternionic_real_point():
    rng = np.random.default_rng(309)
    t = QuatMatrix(
        rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)),
        rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)),
    )
    t = t * (1.0 / (2.0 * op_norm(t)))
    res = star_inv_linear(t, Quaternion(0.35), order=200)
    assert res.closed_form_available
    assert res.discrepancy <= 1e-11


def test_star_inv_quaternionic_general_point():
    rng = np.random.default_rng(310)
    for _ in range(25):
        t = QuatMatrix(
            rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)),
            rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)),
        )
        t = t * (1.0 / (2.5 * op_norm(t)))
        v = rng.standard_normal(3)
        v *= 0.25 / np.linalg.norm(v)
        p = Quaternion(0.3, v[0], v[1], v[2])
        res = star_inv_linear(t, p, order=220)
        assert res.closed_form_available
        assert res.discrepancy <= 1e-10


def test_star_inv_defining_identity():
    # (I - zT) star sum_n z^n T^n telescopes coefficient-wise to
    # I - z^{order+1} T^{order+1}; the star product is coefficient
    # convolution, so the check is exact matrix arithmetic
    rng = np.random.default_rng(311)
    t = QuatMatrix(
        rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)),
        rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)),
    )
    t = t * (1.0 / (3.0 * op_norm(t)))
    order = 6
    eye = QuatMatrix.from_complex(np.eye(3).astype(complex))
    powers = [eye]
    for _ in range(order):
        powers.append(t @ powers[-1])
    inv_series = OperatorSeries(powers, 1.0)
    linear = OperatorSeries([eye, t * (-1.0)], 1.0)
    prod = star_mul(linear, inv_series)
    assert (prod.coeffs[0] - eye).norm() <= 1e-14
    for n in range(1, order + 1):
        assert prod.coeffs[n].norm() <= 1e-14
    assert (prod.coeffs[order + 1] + t @ powers[-1]).norm() <= 1e-14


def test_star_inv_tail_bound_is_honest():
    rng = np.random.default_rng(312)
    t = rng.standard_normal((4, 4))
    t /= 2.0 * np.linalg.norm(t, 2)
    p = 0.5
    for order in (5, 10, 20):
        res = star_inv_linear(t, p, order=order)
        assert res.discrepancy <= res.tail_bound * (1.0 + 1e-12) + 1e-15


def test_star_inv_divergence_guard():
    t = np.eye(2)
    with pytest.raises(DivergenceError):
        star_inv_linear(t, 1.0, order=10)
    with pytest.raises(DivergenceError):
        star_inv_linear(QuatMatrix.from_complex(np.eye(2).astype(complex)),
                        Quaternion(0, 1.0, 0, 0), order=10)


def test_star_inv_rejects_bad_shapes():
    with pytest.raises(ArgumentError):
        star_inv_linear(np.ones((2, 3)), 0.1, order=4)
    with pytest.raises(ArgumentError):
        star_inv_linear(np.eye(2), 0.1, order=-1)


# --- slice components -----------------------------------------------------


def test_slice_constant_series():
    s = OperatorSeries.from_scalars([Quaternion(2.0, 0, 0, 0)], 0.9)
    alpha, beta = slice_components(s, 0.2, 0.1, QUAT_I)
    assert (alpha - QuatMatrix.from_scalar(Quaternion(2.0), 1)).norm() <= 1e-15
    assert beta.norm() <= 1e-15


def test_slice_axis_independence():
    rng = np.random.default_rng(313)
    s = random_quat_series(rng, 2, 3)
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    ax1 = QUAT_I
    ax2 = Quaternion(0.0, v[0], v[1], v[2])
    a1, b1 = slice_components(s, 0.2, 0.15, ax1)
    a2, b2 = slice_components(s, 0.2, 0.15, ax2)
    assert (a1 - a2).norm() <= 1e-12
    assert (b1 - b2).norm() <= 1e-12


def test_slice_parity():
    rng = np.random.default_rng(314)
    s = random_quat_series(rng, 2, 4)
    a_pos, b_pos = slice_components(s, 0.1, 0.2, QUAT_J)
    a_neg, b_neg = slice_components(s, 0.1, -0.2, QUAT_J)
    assert (a_pos - a_neg).norm() <= 1e-12
    assert (b_pos + b_neg).norm() <= 1e-12


def test_slice_reconstruction():
    rng = np.random.default_rng(315)
    s = random_quat_series(rng, 2, 3)
    x, y = 0.12, 0.2
    axis = Quaternion(0.0, 0.6, 0.0, 0.8)
    alpha, beta = slice_components(s, x, y, axis)
    p = Quaternion(x) + axis * y
    recon = alpha + beta.lmul(axis)
    assert (s.eval(p) - recon).norm() <= 1e-13


def test_slice_axis_validation():
    s = OperatorSeries.from_scalars([Quaternion(1.0)], 0.9)
    with pytest.raises(ArgumentError):
        slice_components(s, 0.1, 0.1, Quaternion(0.5, 1.0, 0.0, 0.0))
    with pytest.raises(ArgumentError):
        slice_components(s, 0.1, 0.1, Quaternion(0.0, 2.0, 0.0, 0.0))


def test_slice_promotes_complex_series():
    s = OperatorSeries([np.eye(2), 3.0 * np.eye(2)], 0.9)
    alpha, beta = slice_components(s, 0.1, 0.05, QUAT_I)
    assert isinstance(alpha, QuatMatrix)
    # alpha = I + 3x I, beta = 3y I for a linear series
    assert (alpha - QuatMatrix.from_complex((1.3 * np.eye(2)).astype(complex))).norm() <= 1e-13
    assert (beta - QuatMatrix.from_complex((0.15 * np.eye(2)).astype(complex))).norm() <= 1e-13
