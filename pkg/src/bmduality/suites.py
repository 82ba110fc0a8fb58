"""Verification suites run by the command line front end.

Each suite appends :class:`~bmduality.report.CheckRecord` entries in a fixed
order; random inputs come from ``numpy.random.default_rng(cfg.seed)`` so a
run is a pure function of its configuration.
"""

from __future__ import annotations

import math
import time
from typing import Callable

import numpy as np

from .core import ExactComplex, MultiIndex, PiMultiple, as_rational, multi_indices, multi_indices_upto
from .harmonics import (IllConditionedError, build_basis, dimension_formula, dirichlet_exterior, dirichlet_interior,
                        hermitian_form, kelvin_extend, project_holomorphic, trace_expansion)
from .kelvin import KelvinFunction, evaluate, is_harmonic, make_contrast
from .pairings import (admissible_from_holomorphic, annihilator_suite, cauchy_pairing_1d,
                       contour_independence, contrast_value, dual_functional, energy_identity_check,
                       grothendieck_pairing, surface_pairing, residue_pairing_1d)
from .potentials import (DELTA_MIN, SurfaceProximityError, bm_integral, bm_integrals,
                         calibrate_surface_constant, complex_normal_derivative, cr_test, decay_check,
                         jump_check, surface_form_constant)
from .quadrature import build_sphere
from .report import RunConfig, SuiteReport, digest, environment_stamp

SUITES = ("harmonics", "reproduce", "cr", "jump", "pairing", "ball-example", "dirichlet",
          "density-probe")


class Recorder:
    def __init__(self, prefix: str):
        self.prefix = prefix
        self.records = []
        self.tables: dict[str, list] = {}

    def _add(self, cid, inputs, prov, value, expected, tol, ok, detail=""):
        from .report import CheckRecord
        self.records.append(CheckRecord(f"{self.prefix}/{cid}", digest(inputs), prov, value, expected, tol,
                                        "pass" if ok else "fail", detail))

    def close(self, cid, inputs, prov, value, expected, tol, rel=False, detail=""):
        err = abs(complex(value) - complex(expected))
        scale = max(abs(complex(expected)), 1e-300) if rel else 1.0
        self._add(cid, inputs, prov, value, expected, tol, err <= tol * scale, detail)

    def at_most(self, cid, inputs, prov, value, bound, detail=""):
        self._add(cid, inputs, prov, value, None, bound, abs(complex(value)) <= bound, detail)

    def at_least(self, cid, inputs, prov, value, bound, detail=""):
        self._add(cid, inputs, prov, value, None, bound, abs(complex(value)) >= bound, detail)

    def exact(self, cid, inputs, prov, value, expected, ok=None, detail=""):
        ok = (value == expected) if ok is None else ok
        self._add(cid, inputs, prov, _num(value), _num(expected), 0.0, ok, detail)

    def refuse(self, cid, inputs, prov, detail):
        from .report import CheckRecord
        self.records.append(CheckRecord(f"{self.prefix}/{cid}", digest(inputs), prov, None, None, None,
                                        "refused", detail))


def _num(x):
    if isinstance(x, PiMultiple):
        return complex(x)
    if isinstance(x, ExactComplex):
        return complex(x)
    return complex(x)


# -- random inputs ----------------------------------------------------------

def _gauss_int(rng, lo=-3, hi=3) -> ExactComplex:
    while True:
        c = ExactComplex(int(rng.integers(lo, hi + 1)), int(rng.integers(lo, hi + 1)))
        if c:
            return c


def random_holomorphic(rng, n: int, max_deg: int, terms: int = 3) -> KelvinFunction:
    monos = multi_indices_upto(n, max_deg)
    pick = rng.choice(len(monos), size=min(terms, len(monos)), replace=False)
    out = KelvinFunction.zero(n)
    for k in sorted(int(i) for i in pick):
        out = out + KelvinFunction.monomial(monos[k], coeff=_gauss_int(rng))
    return out


def random_exterior_harmonic(rng, n: int, max_deg: int, terms: int = 3) -> KelvinFunction:
    basis = [h for r in range(max_deg + 1) for h in build_basis(r, n).polys]
    pick = rng.choice(len(basis), size=min(terms, len(basis)), replace=False)
    out = KelvinFunction.zero(n)
    for k in sorted(int(i) for i in pick):
        out = out + kelvin_extend(basis[k]) * _gauss_int(rng)
    return out


def random_points(rng, n: int, count: int, rmin: float, rmax: float) -> np.ndarray:
    d = rng.standard_normal((count, 2 * n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    radii = rng.uniform(rmin, rmax, size=count)
    return (d[:, :n] + 1j * d[:, n:]) * radii[:, None]


def _pt(z) -> list:
    return [[float(c.real), float(c.imag)] for c in np.asarray(z, dtype=complex).ravel()]


def _coord_monomials(n: int) -> dict[str, KelvinFunction]:
    z = [KelvinFunction.z(j, n) for j in range(1, n + 1)]
    zb = [KelvinFunction.zbar(j, n) for j in range(1, n + 1)]
    j2 = 1 if n > 1 else 0
    return {"z1": z[0], "z1*z2": z[0] * z[j2], "z1^2*z2": z[0] * z[0] * z[j2],
            "zb1": zb[0], "zb1*zb2": zb[0] * zb[j2]}


# -- suites -------------------------------------------------------------------

def suite_harmonics(cfg: RunConfig, rec: Recorder):
    n = cfg.n
    for r in range(cfg.r_max + 1):
        inp = {"n": n, "r": r}
        basis = build_basis(r, n)
        rec.exact(f"dimension/r={r}", inp, "REFERENCE", len(basis), dimension_formula(r, n),
                  detail=f"J({r},{2 * n})")
        bad = sum(not is_harmonic(h) for h in basis.polys)
        bad += sum(not is_harmonic(kelvin_extend(h)) for h in basis.polys)
        rec.exact(f"laplacian/r={r}", inp, "REFERENCE", bad, 0, detail="non-harmonic basis or Kelvin extensions")
        G = basis.orthonormal_gram()
        off = sum(G[i][j] != (1 if i == j else 0) for i in range(len(G)) for j in range(len(G)))
        rec.exact(f"orthonormal/r={r}", inp, "DERIVED", off, 0, detail="Gram entries differing from identity")


def suite_reproduce(cfg: RunConfig, rec: Recorder):
    n, R = cfg.n, cfg.R
    res = cfg.effective_resolution
    quad = build_sphere(n, R, res)
    tol = cfg.tol_reproduction
    c_exact = complex(surface_form_constant(n))
    c_fit = calibrate_surface_constant(n, R, res)
    doubled = 2 * res if isinstance(res, int) else tuple(2 * v for v in res)
    c_fit2 = calibrate_surface_constant(n, R, doubled)
    rec.close("calibration/constant", {"n": n, "R": R}, "DERIVED", c_fit, c_exact, 1e-8,
              detail="fitted c_n vs 2^(n-1) i^n")
    rec.close("calibration/refinement", {"n": n, "R": R, "res": str(doubled)}, "DERIVED", c_fit2, c_fit, 1e-8)
    one = np.ones(quad.size)
    rec.close("constant-at-centre", {"n": n}, "REFERENCE", bm_integral(one, quad, np.zeros(n)).value, 1.0, tol)

    rng = np.random.default_rng(cfg.seed)
    margin = DELTA_MIN * 1.02
    inner = random_points(rng, n, 10, 0.1 * R, (1 - margin) * R)
    outer = random_points(rng, n, 10, (1 + margin) * R, 2 * R)
    monos = multi_indices_upto(n, min(cfg.s_max, 4))
    funcs = [KelvinFunction.monomial(s) for s in monos]
    err_in = [0.0] * len(funcs)
    err_out = [0.0] * len(funcs)
    refused = []
    for z in inner:
        try:
            evs = bm_integrals(funcs, quad, z)
        except SurfaceProximityError as exc:
            refused.append((z, str(exc)))
            continue
        for k, (f, ev) in enumerate(zip(funcs, evs)):
            err_in[k] = max(err_in[k], abs(ev.value - evaluate(f, z)))
    for z in outer:
        try:
            evs = bm_integrals(funcs, quad, z)
        except SurfaceProximityError as exc:
            refused.append((z, str(exc)))
            continue
        for k, ev in enumerate(evs):
            err_out[k] = max(err_out[k], abs(ev.value))
    for k, s in enumerate(monos):
        inp = {"s": list(s), "R": R, "seed": cfg.seed, "res": str(res)}
        rec.at_most(f"interior/s={tuple(s)}", inp, "REFERENCE", err_in[k], tol, detail="max |M- z^s - z^s|")
        rec.at_most(f"exterior/s={tuple(s)}", inp, "REFERENCE", err_out[k], tol, detail="max |M+ z^s|")
    for i, (z, msg) in enumerate(refused):
        rec.refuse(f"refused/{i}", {"z": _pt(z)}, "TRIVIAL", msg)
    if n == 2 and R == 1.0:
        f = KelvinFunction.z(1, 2) * KelvinFunction.z(2, 2)
        z = np.array([0.3, 0.1 + 0.2j])
        rec.close("example/z1z2", {"z": _pt(z)}, "DERIVED", bm_integral(f, quad, z).value, 0.03 + 0.06j, tol)
        f = KelvinFunction.z(1, 2) * KelvinFunction.z(1, 2)
        rec.at_most("example/z1^2-exterior", {"z": [2, 0]}, "REFERENCE",
                    abs(bm_integral(f, quad, np.array([2.0, 0])).value), tol)


def _exterior_samples(cfg: RunConfig) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed + 1)
    return random_points(rng, cfg.n, 10, (1 + DELTA_MIN * 1.02) * cfg.R, 1.5 * cfg.R)


def suite_cr(cfg: RunConfig, rec: Recorder):
    n, R = cfg.n, cfg.R
    quad = build_sphere(n, R, cfg.effective_resolution)
    samples = _exterior_samples(cfg)
    data = _coord_monomials(n)
    for name in ("z1", "z1*z2", "z1^2*z2"):
        out = cr_test(data[name], quad, samples)
        rec.at_most(f"holomorphic/{name}", {"w0": name, "n": n, "seed": cfg.seed}, "REFERENCE", out["max_abs"],
                    cfg.tol_reproduction, detail="max |M+ w0| (holomorphic trace)")
    for name in ("zb1", "zb1*zb2"):
        out = cr_test(data[name], quad, samples)
        rec.at_least(f"not-cr/{name}", {"w0": name, "n": n, "seed": cfg.seed}, "DERIVED", out["max_abs"], 1e-2,
                     detail=f"max |M+ w0| at z={_pt(out['argmax'])}")
    out = cr_test(KelvinFunction.zero(n), quad, samples)
    rec.exact("zero", {"w0": "0"}, "TRIVIAL", out["max_abs"], 0.0)
    if n >= 2:
        rec.close("normal-derivative/|z|^2", {"n": n}, "DERIVED",
                  complex_normal_derivative(KelvinFunction.norm_sq(n), _unit(n) * R, R), R * R, 1e-12)
        rec.close("normal-derivative/zb1", {"n": n}, "DERIVED",
                  complex_normal_derivative(KelvinFunction.zbar(1, n), _unit(n) * R, R), 1.0, 1e-12)


def _unit(n: int) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    e[0] = 1
    return e


def suite_jump(cfg: RunConfig, rec: Recorder):
    n, R = cfg.n, cfg.R
    quad = build_sphere(n, R, cfg.effective_resolution)
    rng = np.random.default_rng(cfg.seed + 2)
    points = random_points(rng, n, 5, R, R)
    points = R * points / np.linalg.norm(points, axis=1, keepdims=True)
    data = {"1": KelvinFunction.constant(n), "z1": KelvinFunction.z(1, n), "zb1": KelvinFunction.zbar(1, n)}
    for name, w0 in data.items():
        for i, zeta in enumerate(points):
            res = jump_check(w0, quad, zeta)
            detail = "monotone" if res.monotone else "non-monotone extrapolation sequence"
            rec.close(f"{name}/point{i}", {"w0": name, "zeta": _pt(zeta)}, "REFERENCE", res.jump, res.expected,
                      cfg.tol_jump, detail=detail)
    res = jump_check(KelvinFunction.zero(n), quad, points[0])
    rec.exact("zero", {"w0": "0"}, "TRIVIAL", res.jump, 0)


def _contrast_rows(cfg: RunConfig, rec: Recorder, p_max: int = 3) -> list:
    n, R = cfg.n, cfg.R
    rows = annihilator_suite(n, [], 0, R, contrast=multi_indices_upto(n, p_max),
                             resolution=cfg.resolution)
    for row in rows:
        exp = contrast_value(row.q_or_p, n)
        inp = {"p": list(row.q_or_p), "n": n, "R": R}
        rec.exact(f"contrast/p={row.q_or_p}/exact", inp, "DERIVED", row.report.value_exact, exp,
                  ok=row.report.value_exact == exp)
        rec.close(f"contrast/p={row.q_or_p}/quadrature", inp, "DERIVED", row.report.value_quadrature, complex(exp),
                  cfg.tol_pairing, rel=True)
    return rows


def suite_pairing(cfg: RunConfig, rec: Recorder):
    n, R = cfg.n, cfg.R
    Rq = as_rational(R)
    rows = _contrast_rows(cfg, rec)
    rec.tables["pairing"] = rows
    one = KelvinFunction.constant(n)
    if n >= 2:
        rep = grothendieck_pairing(one, make_contrast(MultiIndex.zero(n), n), 1, resolution=cfg.resolution)
        exp = contrast_value(MultiIndex.zero(n), n)
        rec.close("g0/exact", {"n": n}, "DERIVED", complex(rep.value_exact), complex(exp), cfg.tol_pairing, rel=True,
                  detail=f"{rep.value_exact}")
        rec.close("g0/quadrature", {"n": n}, "DERIVED", rep.value_quadrature, complex(exp), cfg.tol_pairing, rel=True)

    # contour independence on random pairs
    rng = np.random.default_rng(cfg.seed + 3)
    radii = [0.6 * R, 0.8 * R, 0.95 * R]
    dev_exact = dev_quad = 0.0
    for i in range(20):
        u = random_holomorphic(rng, n, 3)
        v = random_exterior_harmonic(rng, n, 3)
        rep = contour_independence(u, v, radii, resolution=cfg.resolution)
        dev_exact = max(dev_exact, rep.deviation_exact)
        dev_quad = max(dev_quad, rep.deviation_quadrature)
    inp = {"n": n, "seed": cfg.seed, "radii": radii, "pairs": 20}
    rec.at_most("contour/exact", inp, "REFERENCE", dev_exact, 1e-10)
    rec.at_most("contour/quadrature", inp, "REFERENCE", dev_quad, cfg.tol_pairing)

    # linear in u, conjugate-linear in v
    bad = 0
    for i in range(10):
        u1, u2 = random_holomorphic(rng, n, 3), random_holomorphic(rng, n, 3)
        v1, v2 = random_exterior_harmonic(rng, n, 3), random_exterior_harmonic(rng, n, 3)
        a = _gauss_int(rng)

        def P(u, v):
            return surface_pairing(u, v, Rq, quadrature=False).value_exact

        bad += P(u1 * a + u2, v1) != P(u1, v1).scale(a) + P(u2, v1)
        bad += P(u1, v1 * a + v2) != P(u1, v1).scale(a.conjugate()) + P(u1, v2)
    rec.exact("sesquilinearity", {"n": n, "seed": cfg.seed}, "DERIVED", bad, 0, detail="exact violations")

    # homogeneity: contrast value is radius independent
    scale_bad = 0
    for p in multi_indices_upto(n, 2):
        f = KelvinFunction.monomial(p)
        v = kelvin_extend(f)
        scale_bad += (surface_pairing(f, v, Rq, quadrature=False).value_exact
                      != surface_pairing(f, v, 1, quadrature=False).value_exact)
    rec.exact("scale-covariance", {"n": n, "R": R}, "DERIVED", scale_bad, 0)

    # dual functional examples
    # in one variable the continuation of 1 is constant and pairs to zero
    f1 = dual_functional(kelvin_extend(one), min(cfg.s_max, 4), Rq)
    nz = [s for s, v in f1 if v]
    want = [tuple([0] * n)] if n >= 2 else []
    rec.exact("dual/kelvin(1)", {"n": n}, "DERIVED", len(nz), len(want), ok=nz == want)
    if n >= 2:
        v = kelvin_extend(KelvinFunction.z(1, n) + KelvinFunction.z(2, n))
        f2 = dict(dual_functional(v, min(cfg.s_max, 4), Rq))
        nz = [s for s, val in f2.items() if val]
        e1, e2 = tuple(MultiIndex.unit(1, n)), tuple(MultiIndex.unit(2, n))
        rec.exact("dual/kelvin(z1+z2)", {"n": n}, "DERIVED", len(nz), 2,
                  ok=sorted(nz) == sorted([e1, e2]) and f2[e1] == f2[e2])

    # one-variable Cauchy pairing against the residue oracle
    worst = 0.0
    mism = 0
    for k in range(7):
        u = KelvinFunction.monomial((k,))
        for m in range(1, 7):
            val = cauchy_pairing_1d(u, {m: 1}, R)
            exact = residue_pairing_1d(u, {m: 1})
            expected = 2j * math.pi if m == k + 1 else 0j
            worst = max(worst, abs(val - expected))
            mism += abs(complex(exact) - expected) > 1e-15
    rec.at_most("cauchy-1d/trapezoid", {"k<=": 6, "m<=": 6, "R": R}, "DERIVED", worst, 1e-10)
    rec.exact("cauchy-1d/residue", {"k<=": 6, "m<=": 6}, "DERIVED", mism, 0)


def suite_ball(cfg: RunConfig, rec: Recorder):
    n, R = cfg.n, cfg.R
    Rq = as_rational(R)
    q_list = [q for k in range(1, cfg.q_max + 1) for q in multi_indices(n, k)]
    rows = annihilator_suite(n, q_list, cfg.s_max, R, contrast=[], resolution=cfg.resolution)
    by_q: dict = {}
    for row in rows:
        by_q.setdefault(row.q_or_p, []).append(row)
    for q, rs in by_q.items():
        inp = {"q": list(q), "s_max": cfg.s_max, "n": n, "R": R}
        nonzero = sum(bool(r.report.value_exact) for r in rs)
        rec.exact(f"annihilator/q={q}/exact", inp, "REFERENCE", nonzero, 0,
                  detail=f"{len(rs)} monomials, nonzero exact pairings")
        rec.at_most(f"annihilator/q={q}/quadrature", inp, "REFERENCE",
                    max(abs(r.report.value_quadrature) for r in rs), cfg.tol_pairing)
    contrast = _contrast_rows(cfg, rec)
    rec.tables["ball-example"] = rows + contrast

    for p in multi_indices_upto(n, 3):
        if n == 1 and p.order == 0:
            continue
        f = KelvinFunction.monomial(p)
        val = surface_pairing(f, kelvin_extend(f), Rq, quadrature=False).value_exact
        rec.at_least(f"nondegenerate/p={tuple(p)}", {"p": list(p)}, "REFERENCE", complex(val), 1e-6)

    # energy identity on admissible data
    rng = np.random.default_rng(cfg.seed + 4)
    us = [KelvinFunction.constant(n), KelvinFunction.z(1, n)]
    while len(us) < 10:
        us.append(random_holomorphic(rng, n, 3))
    for i, u in enumerate(us):
        v = admissible_from_holomorphic(u, Rq)
        e = energy_identity_check(v, Rq)
        inp = {"u": str(u), "R": R}
        rec.close(f"energy/{i}", inp, "REFERENCE", complex(e.pairing), complex(e.energy.scale(e.constant)),
                  cfg.tol_pairing, detail=f"<w,v>={e.pairing} E={e.energy} factor={e.constant}; {e.cr_certificate}")
    hd = hermitian_form(KelvinFunction.constant(n), KelvinFunction.constant(n), Rq)
    energy1 = energy_identity_check(admissible_from_holomorphic(KelvinFunction.constant(n), Rq), Rq).energy
    rec.exact("hD(1,1)/exterior-vs-energy", {"n": n, "R": R}, "DERIVED", hd.exterior, energy1,
              ok=hd.exterior == energy1)
    if n == 2 and Rq == 1:
        rec.close("hD(1,1)/exterior", {"n": 2, "R": 1}, "DERIVED", hd.exterior_part, math.pi ** 2, cfg.tol_pairing,
                  rel=True)
    zero = energy_identity_check(KelvinFunction.zero(n), Rq)
    rec.exact("energy/zero", {"v": "0"}, "TRIVIAL", complex(zero.pairing), 0j, ok=not zero.pairing and not zero.energy)

    if n >= 2:
        for name, v in (("|z|^(2-2n)", kelvin_extend(KelvinFunction.constant(n))),
                        ("kelvin(z1)", kelvin_extend(KelvinFunction.z(1, n)))):
            d = decay_check(v, seed=cfg.seed)
            rec.exact(f"decay/{name}", {"v": name}, "DERIVED", d.passed, True,
                      detail=f"exponents {d.exponent_value:.3f} (<= {d.bound_value}), "
                             f"{d.exponent_dbar:.3f} (<= {d.bound_dbar})")


def suite_dirichlet(cfg: RunConfig, rec: Recorder):
    n, R = cfg.n, cfg.R
    Rq = as_rational(R)
    rng = np.random.default_rng(cfg.seed + 5)
    bad = 0
    for i in range(5):
        w = random_holomorphic(rng, n, 3) + random_holomorphic(rng, n, 2).conjugate()
        e = trace_expansion(w, Rq)
        wi, we = dirichlet_interior(e), dirichlet_exterior(e)
        bad += not is_harmonic(wi) or not is_harmonic(we)
        bad += trace_expansion(wi, Rq, e.r_max) != e or trace_expansion(we, Rq, e.r_max) != e
    rec.exact("round-trip", {"n": n, "R": R, "seed": cfg.seed}, "DERIVED", bad, 0)

    one = KelvinFunction.constant(n)
    hd = hermitian_form(one, one, Rq)
    expected = PiMultiple(ExactComplex(Rq ** (2 * n - 2) * (n - 1)) / math.factorial(max(n - 1, 0)), n)
    rec.exact("hD(1,1)/interior", {"n": n, "R": R}, "DERIVED", hd.interior, PiMultiple(0, n),
              ok=not hd.interior)
    rec.exact("hD(1,1)/exterior", {"n": n, "R": R}, "DERIVED", hd.exterior, expected, ok=hd.exterior == expected)

    sym_bad = 0
    for i in range(5):
        a = random_holomorphic(rng, n, 2) + random_holomorphic(rng, n, 2).conjugate()
        b = random_holomorphic(rng, n, 2) + random_holomorphic(rng, n, 2).conjugate()
        sym_bad += hermitian_form(a, b, Rq).total != hermitian_form(b, a, Rq).total.conjugate()
    rec.exact("hD/hermitian-symmetry", {"n": n, "seed": cfg.seed}, "DERIVED", sym_bad, 0)

    deg = min(cfg.s_max, 4)
    try:
        _projection_checks(cfg, rec, rng, deg, Rq)
    except IllConditionedError as exc:
        rec.refuse("projection", {"n": n, "deg": deg}, "REFERENCE", str(exc))


def _projection_checks(cfg: RunConfig, rec: Recorder, rng, deg: int, Rq):
    n = cfg.n
    z1b = KelvinFunction.zbar(1, n)
    rec.exact("projection/zb1", {"n": n, "deg": deg}, "REFERENCE", int(not project_holomorphic(z1b, deg, Rq).is_zero()), 0)
    fixed = sum(project_holomorphic(KelvinFunction.monomial(s), deg, Rq) != KelvinFunction.monomial(s)
                for s in multi_indices_upto(n, deg))
    rec.exact("projection/holomorphic-fixed", {"n": n, "deg": deg}, "REFERENCE", fixed, 0)
    if n >= 2:
        w = KelvinFunction.z(1, n) + KelvinFunction.zbar(2, n)
        rec.exact("projection/z1+zb2", {"n": n}, "DERIVED",
                  int(project_holomorphic(w, deg, Rq) != KelvinFunction.z(1, n)), 0)
    idem, adj = 0.0, 0.0
    for i in range(5):
        a = random_holomorphic(rng, n, deg) + random_holomorphic(rng, n, 2).conjugate()
        b = random_holomorphic(rng, n, deg) + random_holomorphic(rng, n, 2).conjugate()
        pa = project_holomorphic(a, deg, Rq)
        idem = max(idem, _max_coeff(project_holomorphic(pa, deg, Rq) - pa))
        lhs = hermitian_form(pa, b, Rq).total
        rhs = hermitian_form(a, project_holomorphic(b, deg, Rq), Rq).total
        adj = max(adj, abs(complex(lhs - rhs)))
    rec.at_most("projection/idempotence", {"n": n, "seed": cfg.seed}, "REFERENCE", idem, 1e-10)
    rec.at_most("projection/self-adjoint", {"n": n, "seed": cfg.seed}, "REFERENCE", adj, 1e-10)


def _max_coeff(f: KelvinFunction) -> float:
    c = f.canonical()
    return max((abs(complex(v)) for v in c.terms.values()), default=0.0)


def suite_density(cfg: RunConfig, rec: Recorder, batch: int = 50):
    n, R = cfg.n, cfg.R
    Rq = as_rational(R)
    rng = np.random.default_rng(cfg.seed + 6)
    zero_vectors = 0
    smallest = math.inf
    for i in range(batch):
        u = random_holomorphic(rng, n, cfg.s_max, terms=int(rng.integers(1, 4)))
        if n == 1:
            # admissible data must vanish at infinity; drop the constant term
            u = KelvinFunction(1, {k: c for k, c in u.terms.items() if k[0] != (0,)})
            if u.is_zero():
                u = KelvinFunction.z(1, 1)
        v = admissible_from_holomorphic(u, Rq)
        vec = dual_functional(v, cfg.s_max, Rq)
        size = max(abs(complex(val)) for _, val in vec)
        smallest = min(smallest, size)
        zero_vectors += all(not val for _, val in vec)
    inp = {"n": n, "R": R, "batch": batch, "s_max": cfg.s_max, "seed": cfg.seed}
    rec.exact("annihilating-v", inp, "REFERENCE", zero_vectors, 0,
              detail="admissible v != 0 whose functional vanishes on all monomials")
    rec.at_least("smallest-functional", inp, "DERIVED", smallest, 1e-12)


RUNNERS: dict[str, Callable] = {
    "harmonics": suite_harmonics,
    "reproduce": suite_reproduce,
    "cr": suite_cr,
    "jump": suite_jump,
    "pairing": suite_pairing,
    "ball-example": suite_ball,
    "dirichlet": suite_dirichlet,
    "density-probe": suite_density,
}


def run_suite(name: str, cfg: RunConfig | None = None) -> SuiteReport:
    """Run a named suite (or ``all``) and collect its records."""
    cfg = (cfg or RunConfig()).validate()
    if name not in RUNNERS and name != "all":
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    names = SUITES if name == "all" else (name,)
    t0 = time.perf_counter()
    records, tables = [], {}
    for nm in names:
        rec = Recorder(nm)
        RUNNERS[nm](cfg, rec)
        records.extend(rec.records)
        tables.update(rec.tables)
    return SuiteReport(name, records, environment_stamp(cfg), time.perf_counter() - t0, tables)
