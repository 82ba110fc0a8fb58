from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bmduality.core import ExactComplex, PiMultiple
from bmduality.exact_linalg import SingularMatrixError, nullspace, rref, solve
from bmduality.harmonics import (BoundaryExpansion, IllConditionedError, build_basis, dimension_formula,
                                 dirichlet_exterior, dirichlet_interior, hermitian_form, holomorphic_gram,
                                 kelvin_extend, project_holomorphic, trace_expansion)
from bmduality.kelvin import KelvinFunction as K, evaluate, is_harmonic, is_holomorphic, laplacian

from conftest import holomorphic_polys, polynomials

z1, z2 = K.z(1, 2), K.z(2, 2)
zb1, zb2 = K.zbar(1, 2), K.zbar(2, 2)


def test_exact_linear_algebra():
    A = [[Fraction(1), Fraction(2), Fraction(3)], [Fraction(2), Fraction(4), Fraction(6)]]
    ns = nullspace(A, 3)
    assert len(ns) == 2
    for v in ns:
        assert all(sum(a * x for a, x in zip(row, v)) == 0 for row in A)
    _, piv = rref(A)
    assert piv == [0]
    M = [[ExactComplex(1), ExactComplex(0, 1)], [ExactComplex(2), ExactComplex(1)]]
    x = solve(M, [ExactComplex(1), ExactComplex(0)])
    assert M[0][0] * x[0] + M[0][1] * x[1] == 1
    assert M[1][0] * x[0] + M[1][1] * x[1] == 0
    with pytest.raises(SingularMatrixError):
        solve([[Fraction(1), Fraction(1)], [Fraction(2), Fraction(2)]], [1, 2])


@pytest.mark.parametrize("r,n,J", [(0, 2, 1), (1, 2, 4), (2, 2, 9), (3, 2, 16), (2, 3, 20), (0, 1, 1), (5, 1, 2)])
def test_dimension_formula(r, n, J):
    assert dimension_formula(r, n) == J


@pytest.mark.parametrize("n,r_max", [(1, 4), (2, 4), (3, 3)])
def test_basis_is_harmonic_orthonormal(n, r_max):
    for r in range(r_max + 1):
        b = build_basis(r, n)
        assert len(b) == dimension_formula(r, n)
        assert all(laplacian(h).is_zero() for h in b.polys)
        assert all(h.homogeneous_degree() == r for h in b.polys)
        G = b.orthonormal_gram()
        assert all(G[i][j] == (1 if i == j else 0) for i in range(len(b)) for j in range(len(b)))


def test_orthonormal_scale_normalizes_numerically():
    from bmduality.quadrature import build_sphere, integrate
    q = build_sphere(2, 1.0)
    b = build_basis(2, 2)
    for j, h in enumerate(b.polys):
        vals = evaluate(h, q.nodes) * b.orthonormal_scale(j)
        assert integrate(np.abs(vals) ** 2, q) == pytest.approx(1.0, rel=1e-12)


def test_kelvin_extend():
    assert kelvin_extend(z1 * zb2) == K.monomial((1, 0), (0, 1), 3)
    assert kelvin_extend(K.constant(2)) == K.inv_norm_pow(2, 1)
    with pytest.raises(ValueError):
        kelvin_extend(z1 * zb1)
    with pytest.raises(ValueError):
        kelvin_extend(z1 + z1 * z2)
    assert kelvin_extend(K.zero(2)).is_zero()


def test_trace_expansion_example():
    e = trace_expansion(zb1 * z2 + K.inv_norm_pow(2, 1), 1)
    assert dirichlet_interior(e) == K.constant(2) + zb1 * z2
    assert dirichlet_exterior(e) == K.inv_norm_pow(2, 1) + (zb1 * z2).times_norm_pow(-3)
    with pytest.raises(ValueError):
        trace_expansion(z1 * z1 * z2, 1, r_max=2)


def test_dirichlet_on_scaled_ball():
    R = Fraction(4, 5)
    e = trace_expansion(z1 * zb2 + 3, R)
    ext = dirichlet_exterior(e)
    assert is_harmonic(ext)
    pt = np.array([0.8 * 0.6, 0.8 * 0.8j])
    assert evaluate(ext, pt) == pytest.approx(evaluate(z1 * zb2 + 3, pt))


@settings(max_examples=25, deadline=None)
@given(polynomials(max_deg=2))
def test_dirichlet_round_trip(w):
    e = trace_expansion(w, 1)
    inner, outer = dirichlet_interior(e), dirichlet_exterior(e)
    assert is_harmonic(inner) and is_harmonic(outer)
    assert trace_expansion(inner, 1, e.r_max) == e
    assert trace_expansion(outer, 1, e.r_max) == e
    if is_harmonic(w):
        assert inner == w


def test_boundary_expansion_validation():
    with pytest.raises(ValueError):
        BoundaryExpansion(2, 1, 1, {(2, 0): 1})
    with pytest.raises(ValueError):
        BoundaryExpansion(2, 1, 1, {(1, 7): 1})


def test_hermitian_form_of_one():
    hd = hermitian_form(K.constant(2), K.constant(2), 1)
    assert hd.interior == PiMultiple(0, 2)
    assert hd.exterior == PiMultiple(1, 2)
    assert hd.exterior_part == pytest.approx(np.pi ** 2)
    hd3 = hermitian_form(K.constant(3), K.constant(3), 1)
    assert hd3.exterior == PiMultiple(1, 3)
    with pytest.raises(ValueError):
        hermitian_form(K.inv_norm_pow(2, 1), K.constant(2))


@settings(max_examples=20, deadline=None)
@given(polynomials(max_deg=1), polynomials(max_deg=1), st.sampled_from([ExactComplex(2), ExactComplex(1, -1)]))
def test_hermitian_form_symmetry_and_sesquilinearity(a, b, c):
    hab = hermitian_form(a, b).total
    assert hab == hermitian_form(b, a).total.conjugate()
    assert hermitian_form(a * c, b).total == hab.scale(c.conjugate())
    assert hermitian_form(a, b * c).total == hab.scale(c)
    assert complex(hermitian_form(a, a).total).real >= 0


def test_holomorphic_gram_is_diagonal():
    monos, G = holomorphic_gram(2, 2, 1)
    for i in range(len(monos)):
        for j in range(len(monos)):
            assert (G[i][j] == 0) == (i != j)


def test_projection_examples():
    assert project_holomorphic(zb1, 3, 1).is_zero()
    assert project_holomorphic(z1 + zb2, 3, 1) == z1
    assert project_holomorphic(z1 * z2, 3, 1) == z1 * z2
    assert project_holomorphic(K.zero(2), 3, 1).is_zero()
    with pytest.raises(IllConditionedError):
        project_holomorphic(K.z(1, 1), 2, 1)


@settings(max_examples=10, deadline=None)
@given(holomorphic_polys(max_deg=2), polynomials(max_deg=2))
def test_projection_idempotent_and_self_adjoint(u, w):
    pw = project_holomorphic(w, 4, 1)
    assert is_holomorphic(pw)
    assert project_holomorphic(pw, 4, 1) == pw
    assert project_holomorphic(u, 4, 1) == u
    assert hermitian_form(pw, u).total == hermitian_form(w, project_holomorphic(u, 4, 1)).total
