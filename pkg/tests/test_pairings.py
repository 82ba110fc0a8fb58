import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bmduality.core import ExactComplex, PiMultiple, multi_indices_upto
from bmduality.harmonics import hermitian_form, kelvin_extend
from bmduality.kelvin import KelvinFunction as K, gradient_dbar, make_annihilator, make_contrast
from bmduality.pairings import (NotAdmissibleError, PairingMismatchError, PairingReport, admissible_from_holomorphic,
                                annihilator_suite, cauchy_pairing_1d, contour_independence, contrast_value,
                                dual_functional, energy_constant, energy_identity_check, grothendieck_pairing,
                                surface_pairing, pairing_table_csv, parse_pairing_table, residue_pairing_1d)
from bmduality.quadrature import build_sphere

from conftest import gaussian, holomorphic_polys

# independent nested scipy quadrature on S^3 (Hopf coordinates)
ORACLE_ONE_G0 = 39.478417604357425
ORACLE_Z1_KZ1 = 39.47841760435743

z1, z2 = K.z(1, 2), K.z(2, 2)
zb1 = K.zbar(1, 2)


@pytest.fixture(scope="module")
def s3():
    return build_sphere(2, 1.0)


def test_contrast_g0_matches_oracle(s3):
    rep = grothendieck_pairing(K.constant(2), make_contrast((0, 0), 2), 1, quad=s3)
    assert rep.value_exact == PiMultiple(4, 2)
    assert complex(rep.value_exact) == pytest.approx(ORACLE_ONE_G0, rel=1e-14)
    assert rep.value_quadrature == pytest.approx(ORACLE_ONE_G0, rel=1e-8)
    assert rep.discrepancy < 1e-8
    # the annihilator constructor carries the extra factor 2 of its definition
    assert grothendieck_pairing(K.constant(2), make_annihilator((0, 0), (0, 0), 2), 1,
                                quadrature=False).value_exact == PiMultiple(8, 2)


def test_surface_pairing_z1():
    rep = surface_pairing(z1, kelvin_extend(z1), 1, resolution=(24, 24, 16))
    assert rep.value_exact == PiMultiple(4, 2)
    assert complex(rep.value_exact) == pytest.approx(ORACLE_Z1_KZ1, rel=1e-14)
    assert rep.discrepancy < 1e-8


def test_pairing_zero_and_errors():
    assert not grothendieck_pairing(K.zero(2), make_contrast((1, 0), 2), quadrature=False).value_exact
    with pytest.raises(ValueError):
        grothendieck_pairing(zb1, make_contrast((1, 0), 2), quadrature=False)
    with pytest.raises(ValueError):
        surface_pairing(z1, z1 * zb1, quadrature=False)
    with pytest.raises(ValueError):
        grothendieck_pairing(K.z(1, 3), make_contrast((1, 0), 2), quadrature=False)


def test_kelvin_one_annihilates_nonconstants():
    v = kelvin_extend(K.constant(2))
    for s in multi_indices_upto(2, 3)[1:]:
        assert not surface_pairing(K.monomial(s), v, 1, quadrature=False).value_exact


def test_annihilator_table_n2(s3):
    rows = annihilator_suite(2, [(1, 0)], 4, R=Fraction(4, 5), contrast=[], resolution=(24, 24, 16))
    assert len(rows) == 15
    for r in rows:
        assert not r.report.value_exact
        assert abs(r.report.value_quadrature) <= 1e-8


@pytest.mark.parametrize("p", [(0, 0), (1, 0), (0, 2), (2, 1), (1, 1, 0)])
def test_contrast_closed_form(p):
    n = len(p)
    rep = grothendieck_pairing(K.monomial(p), make_contrast(p, n), 1, quadrature=False)
    assert rep.value_exact == contrast_value(p, n)
    assert rep.value_exact


def test_contrast_phase_for_p10():
    # c_2 (1 - |p| - n) = (-2)(-2): positive real
    v = complex(contrast_value((1, 0), 2))
    assert v.real > 0 and v.imag == 0


def test_scale_covariance():
    for p in [(0, 0), (2, 1)]:
        a = grothendieck_pairing(K.monomial(p), make_contrast(p, 2), 1, quadrature=False).value_exact
        b = grothendieck_pairing(K.monomial(p), make_contrast(p, 2), Fraction(3, 7), quadrature=False).value_exact
        assert a == b


def test_contour_examples():
    rep = contour_independence(z1 * z2, kelvin_extend(z1 * z2), [0.6, 0.8, 0.95], resolution=(24, 24, 16))
    assert rep.deviation_exact <= 1e-10
    assert rep.deviation_quadrature <= 1e-8
    rep = contour_independence(K.constant(2), kelvin_extend(K.constant(2)), [0.5, 1.0], quadrature=False)
    assert all(v == PiMultiple(4, 2) for v in rep.exact)
    rep = contour_independence(K.zero(2), kelvin_extend(z1), [0.5, 1.0], quadrature=False)
    assert rep.deviation_exact == 0 and not any(rep.exact)


@settings(max_examples=20, deadline=None)
@given(holomorphic_polys(max_deg=2), holomorphic_polys(max_deg=2), holomorphic_polys(max_deg=2), gaussian)
def test_sesquilinearity(u1, u2, h, a):
    v = admissible_from_holomorphic(h)
    w = admissible_from_holomorphic(u2)

    def P(u, vv):
        return surface_pairing(u, vv, 1, quadrature=False).value_exact

    assert P(u1 * a + u2, v) == P(u1, v).scale(a) + P(u2, v)
    assert P(u1, v * a + w) == P(u1, v).scale(a.conjugate()) + P(u1, w)


@settings(max_examples=15, deadline=None)
@given(holomorphic_polys(max_deg=2), st.sampled_from([Fraction(1, 2), Fraction(3, 4), Fraction(5, 4)]))
def test_contour_independence_property(u, R):
    v = admissible_from_holomorphic(u)
    a = surface_pairing(u, v, 1, quadrature=False).value_exact
    b = surface_pairing(u, v, R, quadrature=False).value_exact
    assert a == b


def test_energy_examples():
    r = energy_identity_check(kelvin_extend(z1))
    assert r.balanced and r.pairing and r.w == z1
    assert complex(r.energy) == pytest.approx(math.pi ** 2)
    r = energy_identity_check(kelvin_extend(K.constant(2)))
    assert r.energy == hermitian_form(K.constant(2), K.constant(2)).exterior == PiMultiple(1, 2)
    assert r.pairing == PiMultiple(4, 2)
    r = energy_identity_check(K.zero(2))
    assert r.balanced and not r.pairing and not r.energy
    with pytest.raises(NotAdmissibleError):
        energy_identity_check(kelvin_extend(zb1))
    with pytest.raises(NotAdmissibleError):
        energy_identity_check(z1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_energy_constant_all_dimensions(n):
    assert energy_constant(n) == -(ExactComplex(0, 2) ** n)
    u = K.z(1, n) + K.constant(n, ExactComplex(1, 2)) if n > 1 else K.z(1, 1) * K.z(1, 1)
    r = energy_identity_check(admissible_from_holomorphic(u))
    assert r.balanced


@settings(max_examples=15, deadline=None)
@given(holomorphic_polys(max_deg=2))
def test_energy_identity_property(u):
    r = energy_identity_check(admissible_from_holomorphic(u, Fraction(1, 2)), Fraction(1, 2))
    assert r.balanced
    assert complex(r.energy).real >= 0


def test_dual_functional_examples():
    f = dict(dual_functional(kelvin_extend(K.constant(2)), 4))
    assert [s for s, c in f.items() if c] == [(0, 0)]
    f = dict(dual_functional(kelvin_extend(z1 + z2), 4))
    nz = {s: c for s, c in f.items() if c}
    assert set(nz) == {(1, 0), (0, 1)}
    assert nz[(1, 0)] == nz[(0, 1)]
    assert not any(c for _, c in dual_functional(K.zero(2), 3))
    with pytest.raises(ValueError):
        dual_functional(z1 * zb1, 2)


def test_dual_functional_is_conjugate_linear():
    a, b = kelvin_extend(z1), kelvin_extend(z2 * z2)
    c = ExactComplex(2, -1)
    fa, fb = dual_functional(a, 3), dual_functional(b, 3)
    fab = dual_functional(a * c + b, 3)
    for (s, x), (_, y), (_, z) in zip(fa, fb, fab):
        assert z == x.scale(c.conjugate()) + y


def test_cauchy_pairing_1d():
    for k in range(4):
        u = K.monomial((k,))
        assert cauchy_pairing_1d(u, {k + 1: 1}) == pytest.approx(2j * math.pi, abs=1e-12)
        assert cauchy_pairing_1d(u, {k + 1: 1}, R=0.3) == pytest.approx(2j * math.pi, abs=1e-12)
        assert abs(cauchy_pairing_1d(u, {k + 2: 1})) < 1e-12
        assert residue_pairing_1d(u, {k + 1: 1}) == PiMultiple(ExactComplex(0, 2), 1)
    assert cauchy_pairing_1d(K.zero(1), {1: 1}) == 0
    with pytest.raises(ValueError):
        cauchy_pairing_1d(z1, {1: 1})
    with pytest.raises(ValueError):
        residue_pairing_1d(K.z(1, 1), {0: 1})


def test_pairing_report_validation():
    rep = PairingReport(PiMultiple(1, 2), complex(math.pi ** 2) + 1e-6, 1.0, 1e-6)
    with pytest.raises(PairingMismatchError):
        rep.validate()
    assert rep.validate(1e-5) is rep
    assert PairingReport(None, 2j, 1.0).value == 2j


def test_table_round_trip():
    rows = annihilator_suite(2, [(0, 1)], 2, resolution=(16, 16, 12))
    text = pairing_table_csv(rows)
    parsed = parse_pairing_table(text)
    assert len(parsed) == 2 * len(rows)
    assert text.splitlines()[0] == "s,q_or_p,value_re,value_im,method,discrepancy"
    for rec, row in zip(parsed[::2], rows):
        assert rec["s"] == row.s and rec["q_or_p"] == row.q_or_p and rec["method"] == "exact"
        assert rec["value"] == complex(row.report.value_exact)
        assert rec["discrepancy"] == row.report.discrepancy
    contrast = [r for r in parsed if r["s"] == (0, 0) and r["q_or_p"] == (0, 0)]
    np.testing.assert_allclose([r["value"] for r in contrast], ORACLE_ONE_G0, rtol=1e-8)


def test_gradient_of_admissible_solves_adjoint_system():
    v = admissible_from_holomorphic(z1 * z2 + 1)
    assert gradient_dbar(v).adjoint_divergence().is_zero()
