import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bmduality.core import ExactComplex
from bmduality.kelvin import KelvinFunction as K
from bmduality.potentials import (DELTA_MIN, SurfaceProximityError, bm_integral, bm_integrals,
                                  bm_kernel_density, bm_kernel_density_via_phi, calibrate_surface_constant,
                                  complex_normal_derivative, cr_test, decay_check, fundamental_solution,
                                  jump_check, kernel_is_harmonic_in_zeta, richardson, surface_form_constant,
                                  surface_form_density)
from bmduality.quadrature import build_sphere

z1, z2 = K.z(1, 2), K.z(2, 2)
zb1, zb2 = K.zbar(1, 2), K.zbar(2, 2)


@pytest.fixture(scope="module")
def s3():
    return build_sphere(2, 1.0)


def test_fundamental_solution_values():
    assert fundamental_solution([1, 0, 0, 0]) == pytest.approx(-1 / (4 * math.pi ** 2), rel=1e-15)
    assert fundamental_solution([0, 2, 0, 0]) == pytest.approx(-1 / (16 * math.pi ** 2), rel=1e-15)
    assert fundamental_solution([1, 0]) == 0.0
    assert fundamental_solution([0, 0, 3, 4]) == pytest.approx(-1 / (100 * math.pi ** 2))
    with pytest.raises(ZeroDivisionError):
        fundamental_solution([0, 0, 0, 0])
    with pytest.raises(ValueError):
        fundamental_solution([1, 2, 3])


def test_surface_form_constants():
    assert surface_form_constant(1) == ExactComplex(0, 1)
    assert surface_form_constant(2) == ExactComplex(-2)
    assert surface_form_constant(3) == ExactComplex(0, -4)
    k = surface_form_density(np.array([[0.6, 0.8j]]), 2, 1.0)
    np.testing.assert_allclose(k, [[-1.2, -1.6j]])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_kernel_presentations_agree(n):
    rng = np.random.default_rng(n)
    z = rng.standard_normal((100, n)) + 1j * rng.standard_normal((100, n))
    zeta = rng.standard_normal((100, n)) + 1j * rng.standard_normal((100, n))
    kappa = rng.standard_normal((100, n)) + 1j * rng.standard_normal((100, n))
    for a, b, k in zip(z, zeta, kappa):
        d = bm_kernel_density(a, b, k)
        assert abs(d - bm_kernel_density_via_phi(a, b, k)) <= 1e-12 * abs(d)


def test_kernel_is_cauchy_for_n1():
    z, zeta = np.array([0.2 + 0.1j]), np.array([1j])
    kappa = surface_form_density(zeta, 1, 1.0)
    # ds = |dzeta| and dzeta = i zeta ds on the unit circle
    expected = 1 / (2j * math.pi * (zeta[0] - z[0])) * 1j * zeta[0]
    assert bm_kernel_density(z, zeta, kappa) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(ZeroDivisionError):
        bm_kernel_density(zeta, zeta, kappa)


@pytest.mark.parametrize("n,j", [(2, 1), (2, 2), (3, 3), (4, 2)])
def test_kernel_harmonic_in_zeta(n, j):
    assert kernel_is_harmonic_in_zeta(n, j)


def test_kernel_for_n1_is_reciprocal():
    # conj(w) / |w|^2 = 1 / w
    assert kernel_is_harmonic_in_zeta(1, 1)


def test_bm_integral_examples(s3):
    ones = np.ones(s3.size)
    assert bm_integral(ones, s3, [0, 0]).value == pytest.approx(1, abs=1e-6)
    ev = bm_integral(z1 * z2, s3, [0.3, 0.1 + 0.2j])
    assert ev.side == "interior"
    assert ev.value == pytest.approx(0.03 + 0.06j, abs=1e-6)
    ext = bm_integral(z1 * z1, s3, [2, 0])
    assert ext.side == "exterior" and abs(ext.value) < 1e-6
    assert abs(bm_integral(K.constant(2), s3, [0, 1.5j]).value) < 1e-12
    # raw samples stay on the fixed rule, which is coarser off-centre
    assert abs(bm_integral(ones, s3, [0, 1.5j]).value) < 1e-5


def test_bm_integral_refuses_near_surface(s3):
    with pytest.raises(SurfaceProximityError):
        bm_integral(z1, s3, [0.97, 0])
    with pytest.raises(SurfaceProximityError):
        bm_integral(z1, s3, [0, 1.01j])
    with pytest.raises(ValueError):
        bm_integral(z1, s3, [0.1, 0.1, 0.1])
    # an explicit smaller margin is honoured
    assert bm_integral(z1, s3, [0.97, 0], delta_min=0.01).value == pytest.approx(0.97, abs=1e-6)


def test_bm_integrals_share_rule(s3):
    a, b = bm_integrals([z1, lambda x: np.conj(x[:, 0])], s3, [0.2, 0.3j])
    assert a.surface is b.surface
    assert a.value == pytest.approx(0.2, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 1 - 1.02 * DELTA_MIN), st.floats(0, 2 * math.pi), st.floats(0, math.pi / 2))
def test_reproduction_property(rho, phase, tilt):
    q = build_sphere(2, 1.0)
    z = rho * np.array([math.cos(tilt) * np.exp(1j * phase), math.sin(tilt)])
    f = z1 * z1 * z2 + 2j * z2
    assert bm_integral(f, q, z).value == pytest.approx(z[0] ** 2 * z[1] + 2j * z[1], abs=1e-9)


def test_calibration_recovers_constant():
    for n in (1, 2, 3):
        assert calibrate_surface_constant(n) == pytest.approx(complex(surface_form_constant(n)), rel=1e-12)
    assert calibrate_surface_constant(2, R=0.5) == pytest.approx(-2, rel=1e-12)


def test_cr_test_examples(s3):
    outside = [np.array([1.3, 0.2j]), np.array([0.4, -1.5]), np.array([1.1 + 1.1j, 0])]
    assert cr_test(z1 * z1 * z2, s3, outside)["max_abs"] < 1e-6
    res = cr_test(zb1, s3, outside)
    assert res["max_abs"] > 1e-2 and res["argmax"] is not None
    assert cr_test(K.zero(2), s3, outside)["max_abs"] == 0.0
    with pytest.raises(SurfaceProximityError):
        cr_test(z1, s3, [np.array([0.5, 0])])


def test_richardson_removes_linear_and_quadratic_terms():
    h = [0.2, 0.1, 0.05, 0.025]
    vals = [3 + 2 * t - 5 * t * t for t in h]
    lim, table = richardson(vals)
    assert lim == pytest.approx(3, abs=1e-12)
    assert len(table) == 3


@pytest.mark.parametrize("w0,zeta0", [(K.constant(2), (1, 0)), (z1, (1, 0)), (zb1 * z2, (0.6, 0.8j))])
def test_jump_matches_data(s3, w0, zeta0):
    res = jump_check(w0, s3, zeta0)
    assert res.jump == pytest.approx(res.expected, abs=1e-2)
    if w0 == K.constant(2):
        assert abs(res.jump - 1) < 1e-3


def test_jump_zero_and_validation(s3):
    assert jump_check(K.zero(2), s3, (1, 0)).jump == 0
    with pytest.raises(ValueError):
        jump_check(z1, s3, (0.5, 0))
    with pytest.raises(ValueError):
        jump_check(z1, s3, (1, 0), offsets=(0.2, 0.15))
    with pytest.raises(ValueError):
        jump_check(z1, s3, (1, 0), offsets=(0.02, 0.01, 0.005))


def test_complex_normal_derivative_examples():
    r2 = z1 * zb1 + z2 * zb2
    assert complex_normal_derivative(r2, (0.6, 0.8j)) == pytest.approx(1)
    assert complex_normal_derivative(z1 * z2 + 3, (0.6, 0.8j)) == 0
    assert complex_normal_derivative(zb1, (1, 0)) == pytest.approx(1)
    assert complex_normal_derivative(r2, (2, 0), R=2) == pytest.approx(2)
    with pytest.raises(ValueError):
        complex_normal_derivative(zb1, (0.5, 0))


def test_decay_examples():
    r = decay_check(K.inv_norm_pow(2, 1))
    assert r.exponent_value == pytest.approx(-2, abs=1e-9)
    assert r.passed
    mags = [abs(v) for v in r.sphere_integrals]
    # integrand degree -5 against a 3-dimensional measure
    assert mags[1] / mags[0] == pytest.approx(1e-2, rel=1e-9)
    r = decay_check(K.monomial((1, 0), (0, 0), 2))
    assert r.exponent_value == pytest.approx(-3, abs=0.05)
    assert r.passed
    with pytest.raises(ValueError):
        decay_check(z1)
