"""Surface pairings between holomorphic functions and exterior data on spheres.

Convention: every pairing is linear in the holomorphic slot ``u`` and
conjugate-linear in the second slot.  On ``Gamma = S_R``

    <u, g>_3 = int_Gamma sum_j conj(g_j) u kappa_j ds,   kappa_j = c_n zeta_j / R,

and ``<u, v> = <u, dbar v>_3`` for exterior harmonic ``v``.

The exact path expands the integrand into Kelvin terms, restricts them to
the sphere and sums closed-form moments; it is authoritative.  The
quadrature path is an independent validator.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ExactComplex, MultiIndex, PiMultiple, as_rational, multi_indices_upto
from .harmonics import dirichlet_exterior, dirichlet_interior, trace_expansion
from .kelvin import (KelvinFunction, KelvinVector, dbar, evaluate, gradient_dbar,
                     is_holomorphic, make_annihilator, make_contrast)
from .potentials import surface_form_constant, surface_form_density
from .quadrature import SphereQuadrature, build_sphere, integrate, sphere_integral_exact, volume_integral_exact

PAIRING_TOL = 1e-8


class PairingMismatchError(AssertionError):
    """Exact and quadrature values disagree beyond tolerance."""


class NotAdmissibleError(ValueError):
    pass


@dataclass(frozen=True)
class PairingReport:
    value_exact: PiMultiple | None
    value_quadrature: complex | None
    radius: float
    discrepancy: float | None = None

    @property
    def value(self) -> complex:
        """Authoritative float value (exact path when available)."""
        if self.value_exact is not None:
            return complex(self.value_exact)
        return self.value_quadrature

    def validate(self, tol: float = PAIRING_TOL, relative: bool = False) -> "PairingReport":
        if self.discrepancy is None:
            return self
        scale = max(abs(self.value), 1.0) if relative else 1.0
        if self.discrepancy > tol * scale:
            raise PairingMismatchError(
                f"exact {self.value_exact} = {complex(self.value_exact)!r} vs quadrature "
                f"{self.value_quadrature!r}: discrepancy {self.discrepancy:.3e} > {tol:.1e}")
        return self


def _require_holomorphic(u: KelvinFunction):
    if not is_holomorphic(u):
        raise ValueError("first argument must be holomorphic")


def _exact_pairing(u: KelvinFunction, g: KelvinVector, R) -> PiMultiple:
    n = u.n
    Rq = as_rational(R)
    integrand = KelvinFunction.zero(n)
    for j, gj in enumerate(g, start=1):
        if not gj.is_zero():
            integrand = integrand + gj.conjugate() * u * KelvinFunction.z(j, n)
    return sphere_integral_exact(integrand, Rq).scale(surface_form_constant(n) / ExactComplex(Rq))


def _quadrature_pairing(u: KelvinFunction, g: KelvinVector, quad: SphereQuadrature) -> complex:
    nodes = quad.nodes
    kappa = surface_form_density(nodes, quad.n, quad.R)
    uval = evaluate(u, nodes)
    vals = np.zeros(quad.size, dtype=complex)
    for j, gj in enumerate(g):
        if not gj.is_zero():
            vals += np.conj(evaluate(gj, nodes)) * kappa[:, j]
    return integrate(vals * uval, quad)


def grothendieck_pairing(u: KelvinFunction, g: KelvinVector, R=1, quad: SphereQuadrature | None = None,
                         resolution=None, quadrature: bool = True) -> PairingReport:
    """``<u, g>_3`` on S_R by the moment oracle and, optionally, by quadrature."""
    if u.n != g.n:
        raise ValueError("dimension mismatch")
    _require_holomorphic(u)
    exact = _exact_pairing(u, g, R)
    quad_val = None
    disc = None
    if quadrature:
        if quad is None:
            quad = build_sphere(u.n, float(R), resolution)
        elif abs(quad.R - float(R)) > 1e-12 * float(R):
            raise ValueError("quadrature radius differs from R")
        quad_val = _quadrature_pairing(u, g, quad)
        disc = abs(complex(exact) - quad_val)
    return PairingReport(exact, quad_val, float(R), disc)


def surface_pairing(u: KelvinFunction, v: KelvinFunction, R=1, **kw) -> PairingReport:
    """``<u, v> = <u, dbar v>_3`` for harmonic ``v``; ``dbar v`` solves the adjoint system."""
    g = gradient_dbar(v)
    if not g.adjoint_divergence().is_zero():
        raise ValueError("dbar v does not solve the adjoint Cauchy-Riemann system (v not harmonic)")
    return grothendieck_pairing(u, g, R, **kw)


@dataclass
class ContourReport:
    radii: tuple
    exact: list
    quadrature: list
    deviation_exact: float
    deviation_quadrature: float | None


def contour_independence(u: KelvinFunction, v: KelvinFunction, radii: Sequence,
                         quadrature: bool = True, resolution=None) -> ContourReport:
    """``<u, v>`` on several spheres and the largest pairwise deviation."""
    reps = [surface_pairing(u, v, R, quadrature=quadrature, resolution=resolution) for R in radii]
    ex = [complex(r.value_exact) for r in reps]
    dev = max((abs(a - b) for a in ex for b in ex), default=0.0)
    qv, qdev = [], None
    if quadrature:
        qv = [r.value_quadrature for r in reps]
        qdev = max((abs(a - b) for a in qv for b in qv), default=0.0)
    # exact path: compare the rational coefficients themselves
    coeffs = {r.value_exact.coeff for r in reps}
    if len(coeffs) == 1:
        dev = 0.0
    return ContourReport(tuple(radii), [r.value_exact for r in reps], qv, dev, qdev)


@dataclass(frozen=True)
class PairingRow:
    s: tuple
    q_or_p: tuple
    kind: str
    report: PairingReport


def annihilator_suite(n: int, q_list: Sequence, s_max: int, R=1, contrast: Sequence | None = None,
                      quadrature: bool = True, resolution=None) -> list[PairingRow]:
    """Pairings of all ``z^s`` (|s| <= s_max) with ``g^(0,q)``, plus contrast rows ``<z^p, g^(p)>_3``."""
    quad = build_sphere(n, float(R), resolution) if quadrature else None
    rows = []
    zero = MultiIndex.zero(n)
    for q in q_list:
        q = MultiIndex(q)
        if q.order < 1:
            raise ValueError("annihilators need |q| >= 1")
        g = make_annihilator(zero, q, n)
        for s in multi_indices_upto(n, s_max):
            rep = grothendieck_pairing(KelvinFunction.monomial(s), g, R, quad=quad, quadrature=quadrature)
            rows.append(PairingRow(tuple(s), tuple(q), "annihilator", rep))
    if contrast is None:
        contrast = multi_indices_upto(n, min(s_max, 3))
    for p in contrast:
        p = MultiIndex(p)
        rep = grothendieck_pairing(KelvinFunction.monomial(p), make_contrast(p, n), R, quad=quad,
                                   quadrature=quadrature)
        rows.append(PairingRow(tuple(p), tuple(p), "contrast", rep))
    return rows


def contrast_value(p: Sequence[int], n: int) -> PiMultiple:
    """Closed form ``c_n (1 - |p| - n) 2 p! / (n - 1 + |p|)! pi^n`` of ``<z^p, g^(p)>_3``."""
    p = MultiIndex(p)
    coeff = surface_form_constant(n) * (1 - p.order - n) * 2 * p.factorial()
    return PiMultiple(coeff / math.factorial(n - 1 + p.order), n)


def energy_constant(n: int) -> ExactComplex:
    """``-(2i)^n``: factor between the boundary pairing and the exterior dbar-energy."""
    return -(ExactComplex(0, 2) ** n)


@dataclass
class EnergyReport:
    w: KelvinFunction
    pairing: PiMultiple
    energy: PiMultiple
    constant: ExactComplex
    balanced: bool
    discrepancy: float
    cr_certificate: str


def admissible_from_holomorphic(u: KelvinFunction, R=1) -> KelvinFunction:
    """Exterior harmonic function, vanishing at infinity, whose trace on S_R is that of ``u``."""
    _require_holomorphic(u)
    return dirichlet_exterior(trace_expansion(u, R))


def energy_identity_check(v: KelvinFunction, R=1, tol: float = PAIRING_TOL) -> EnergyReport:
    """Compare ``<w, v>`` with ``sum_j ||dbar_j v||^2`` over the exterior of B(0, R).

    ``w`` is the harmonic interior continuation of the trace of ``v``; the
    trace is CR exactly when ``w`` is holomorphic, which is checked
    symbolically.  The identity holds with the factor :func:`energy_constant`.
    """
    Rq = as_rational(R)
    exp = trace_expansion(v, Rq)
    if dirichlet_exterior(exp) != v:
        raise NotAdmissibleError("v is not the decaying exterior harmonic continuation of its trace")
    w = dirichlet_interior(exp)
    if not is_holomorphic(w):
        raise NotAdmissibleError("trace of v is not CR: its harmonic continuation inside is not holomorphic")
    pairing = surface_pairing(w, v, Rq, quadrature=False).value_exact
    energy = PiMultiple(ExactComplex(0), v.n)
    for j in range(1, v.n + 1):
        d = dbar(v, j)
        if not d.is_zero():
            energy = energy + volume_integral_exact(d.conjugate() * d, Rq, "exterior")
    lam = energy_constant(v.n)
    expected = energy.scale(lam)
    disc = abs(complex(pairing) - complex(expected))
    balanced = (pairing - expected).coeff == 0 and disc <= tol
    return EnergyReport(w, pairing, energy, lam, balanced, disc, "exact (ball harmonic class)")


def dual_functional(v: KelvinFunction, s_max: int, R=1) -> list[tuple[tuple, PiMultiple]]:
    """Coefficients ``f_v(z^s) = <z^s, v>`` for ``|s| <= s_max`` (exact path)."""
    g = gradient_dbar(v)
    if not g.adjoint_divergence().is_zero():
        raise ValueError("v must be harmonic")
    return [(tuple(s), _exact_pairing(KelvinFunction.monomial(s), g, R))
            for s in multi_indices_upto(v.n, s_max)]


def _principal_part(h, n: int = 1) -> KelvinFunction:
    """``sum_k c_k z^-k`` as a Kelvin function (``z^-k = conj(z)^k |z|^-2k``)."""
    if isinstance(h, KelvinFunction):
        return h
    terms = {}
    for k, c in dict(h).items():
        if k < 1:
            raise ValueError("principal part must vanish at infinity (powers k >= 1)")
        terms[((0,), (k,), k)] = c
    return KelvinFunction(1, terms)


def _laurent(f: KelvinFunction) -> dict[int, ExactComplex]:
    """Laurent coefficients of a one-variable Kelvin function holomorphic off 0."""
    out: dict = {}
    for (p, q, m), c in f.canonical().terms.items():
        # z^p conj(z)^q |z|^-2m = z^(p - m) conj(z)^(q - m); meromorphic needs q == m
        if q[0] != m:
            raise ValueError("function is not a Laurent polynomial in z")
        k = p[0] - m
        out[k] = out.get(k, ExactComplex(0)) + c
    return out


def cauchy_pairing_1d(u: KelvinFunction, h, R=1, nodes: int = 256) -> complex:
    """``oint_{|z|=R} h u dz`` by the trapezoid rule."""
    if u.n != 1:
        raise ValueError("one-variable pairing needs n = 1")
    _require_holomorphic(u)
    h = _principal_part(h)
    theta = 2 * math.pi * np.arange(nodes) / nodes
    z = float(R) * np.exp(1j * theta)[:, None]
    f = evaluate(u, z) * evaluate(h, z) * 1j * z[:, 0]
    step = 2 * math.pi / nodes
    return complex(math.fsum(f.real) * step, math.fsum(f.imag) * step)


def residue_pairing_1d(u: KelvinFunction, h) -> PiMultiple:
    """Exact ``2 pi i Res_0(h u)``."""
    _require_holomorphic(u)
    lu = _laurent(u)
    lh = _laurent(_principal_part(h))
    if any(k >= 0 for k in lh):
        raise ValueError("principal part must vanish at infinity")
    res = ExactComplex(0)
    for k, c in lh.items():
        res = res + c * lu.get(-1 - k, ExactComplex(0))
    return PiMultiple(res * ExactComplex(0, 2), 1)


TABLE_COLUMNS = ("s", "q_or_p", "value_re", "value_im", "method", "discrepancy")


def _fmt(x: float) -> str:
    return "%.17g" % x


def _idx(t: tuple) -> str:
    return "(" + ",".join(str(int(v)) for v in t) + ")"


def pairing_table_csv(rows: Sequence[PairingRow]) -> str:
    """CSV with one line per (cell, method)."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(TABLE_COLUMNS)
    for row in rows:
        rep = row.report
        disc = "" if rep.discrepancy is None else _fmt(rep.discrepancy)
        if rep.value_exact is not None:
            v = complex(rep.value_exact)
            wr.writerow([_idx(row.s), _idx(row.q_or_p), _fmt(v.real), _fmt(v.imag), "exact", disc])
        if rep.value_quadrature is not None:
            v = rep.value_quadrature
            wr.writerow([_idx(row.s), _idx(row.q_or_p), _fmt(v.real), _fmt(v.imag), "quadrature", disc])
    return buf.getvalue()


def parse_pairing_table(text: str) -> list[dict]:
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        out.append({
            "s": tuple(int(x) for x in rec["s"].strip("()").split(",") if x),
            "q_or_p": tuple(int(x) for x in rec["q_or_p"].strip("()").split(",") if x),
            "value": complex(float(rec["value_re"]), float(rec["value_im"])),
            "method": rec["method"],
            "discrepancy": float(rec["discrepancy"]) if rec["discrepancy"] else None,
        })
    return out
