"""Bochner-Martinelli potentials on spheres.

The kernel is integrated against surface measure through the surface-form
density ``kappa_j(zeta) = c_n zeta_j / R`` with ``c_n = 2^(n-1) i^n``; with
this constant the potential of ``u0 = 1`` at the centre is exactly 1.

Off-surface evaluation of data given as a callable or a Kelvin function uses
a rule aligned with the target point (see
:func:`bmduality.quadrature.build_aligned_rule`), so accuracy does not decay
as the target approaches the sphere.  Data given as node samples are
integrated on the supplied rule as-is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import CPoint, ExactComplex, as_rational
from .kelvin import KelvinFunction, dbar, dbar_star, evaluate
from .quadrature import (SphereQuadrature, build_aligned_rule, build_sphere, integrate, sphere_area,
                         sphere_integral_exact)

DELTA_MIN = 0.05
JUMP_DELTA_MIN = 0.01
JUMP_OFFSETS = (0.2, 0.1, 0.05, 0.025)


class SurfaceProximityError(ValueError):
    """Target point lies closer to the surface than the configured margin."""


def sigma(n: int) -> float:
    """Area of the unit sphere S^{2n-1}."""
    return sphere_area(n, 1.0)


def fundamental_solution(x) -> float:
    """Fundamental solution of the Laplacian in R^{2n} at a real point x != 0.

    ``|x|^(2-2n) / ((2-2n) sigma_{2n})`` for 2n >= 3 and ``ln|x| / (2 pi)`` in the plane.
    """
    x = np.asarray(x, dtype=float).ravel()
    if len(x) < 2 or len(x) % 2:
        raise ValueError("x must be a real vector of even length 2n >= 2")
    r = math.sqrt(math.fsum(x * x))
    if r == 0:
        raise ZeroDivisionError("fundamental solution is singular at 0")
    n = len(x) // 2
    if n == 1:
        return math.log(r) / (2 * math.pi)
    return r ** (2 - 2 * n) / ((2 - 2 * n) * sigma(n))


def surface_form_constant(n: int) -> ExactComplex:
    """``c_n = 2^(n-1) i^n``: on S_R, ``(-1)^(j-1) dzeta-bar[j] ^ dzeta = c_n zeta_j / R ds``."""
    return ExactComplex(2 ** (n - 1)) * ExactComplex(0, 1) ** n


SURFACE_FORM_CONSTANTS = {n: surface_form_constant(n) for n in range(1, 7)}


def surface_form_density(zeta, n: int, R: float, c=None) -> np.ndarray:
    """Per-node vector kappa(zeta) = c_n zeta / R."""
    c = complex(surface_form_constant(n)) if c is None else complex(c)
    return c * np.asarray(zeta, dtype=complex) / float(R)


def _kernel_prefactor(n: int) -> complex:
    return math.factorial(n - 1) / (2j * math.pi) ** n


def bm_kernel_density(z, zeta, kappa) -> np.ndarray | complex:
    """``(n-1)!/(2 pi i)^n sum_j (conj(zeta_j) - conj(z_j)) |zeta - z|^(-2n) kappa_j``.

    ``zeta`` and ``kappa`` may be single points or (N, n) arrays.
    """
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    kappa = np.asarray(kappa, dtype=complex)
    single = zeta.ndim == 1
    zeta2, kappa2 = np.atleast_2d(zeta), np.atleast_2d(kappa)
    w = zeta2 - z[None, :]
    r2 = np.sum(w.real ** 2 + w.imag ** 2, axis=1)
    if np.any(r2 == 0):
        raise ZeroDivisionError("kernel evaluated at coincident points")
    n = zeta2.shape[1]
    out = _kernel_prefactor(n) * np.sum(w.conj() * kappa2, axis=1) / r2 ** n
    return complex(out[0]) if single else out


def mb_presentation_factor(n: int) -> complex:
    """Constant relating the kernel to the z-derivative of Phi: ``4 / (2i)^n``."""
    return 4 / (2j) ** n


def bm_kernel_density_via_phi(z, zeta, kappa) -> np.ndarray | complex:
    """Same density assembled from the symbolic ``d/dzeta_j`` of Phi(zeta - z)."""
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    kappa = np.asarray(kappa, dtype=complex)
    single = zeta.ndim == 1
    zeta2, kappa2 = np.atleast_2d(zeta), np.atleast_2d(kappa)
    w = zeta2 - z[None, :]
    n = zeta2.shape[1]
    if n == 1:
        # d/dw ln|w| / (2 pi) = 1 / (4 pi w)
        grads = [1 / (4 * math.pi * w[:, 0])]
    else:
        phi = KelvinFunction.inv_norm_pow(n, n - 1)
        scale = 1 / ((2 - 2 * n) * sigma(n))
        grads = [scale * evaluate(dbar_star(phi, j), w) for j in range(1, n + 1)]
    out = mb_presentation_factor(n) * sum(g * kappa2[:, j] for j, g in enumerate(grads))
    return complex(out[0]) if single else np.asarray(out)


@dataclass(frozen=True)
class BMEvaluation:
    point: CPoint
    value: complex
    side: str
    surface: SphereQuadrature = field(repr=False)
    distance: float = 0.0
    nodes_used: int = 0


def _side(z: np.ndarray, R: float) -> tuple[str, float]:
    rho = float(np.linalg.norm(z))
    return ("interior" if rho < R else "exterior"), abs(rho - R)


def _sample(u0, nodes: np.ndarray) -> np.ndarray:
    if isinstance(u0, KelvinFunction):
        return np.asarray(evaluate(u0, nodes))
    if callable(u0):
        return np.asarray(u0(nodes), dtype=complex)
    raise TypeError("boundary data must be node samples, a callable or a KelvinFunction")


def _aligned_orders(quad: SphereQuadrature) -> tuple[int, int]:
    """Panel and direction orders of the aligned rule derived from the rule's resolution."""
    res = quad.resolution
    if quad.scheme == "aligned-graded":
        return res
    if quad.n == 1:
        return max(8, int(res[0] if isinstance(res, tuple) else res) // 3), 1
    if quad.n == 2:
        return max(4, res[2] // 2), max(4, res[1] // 4)
    return max(4, res[1] // 2 + 1), max(4, res[1] // 2)


def bm_integral(u0, quad: SphereQuadrature, z, delta_min: float = DELTA_MIN,
                c=None) -> BMEvaluation:
    """Bochner-Martinelli integral of boundary data at an off-surface point.

    ``u0`` is an array of samples at ``quad.nodes``, or a callable / Kelvin
    function that is sampled on a rule aligned with ``z``.  Points within
    ``delta_min * R`` of the sphere are refused.
    """
    return bm_integrals([u0], quad, z, delta_min, c)[0]


def bm_integrals(data: Sequence, quad: SphereQuadrature, z, delta_min: float = DELTA_MIN,
                 c=None) -> list[BMEvaluation]:
    """:func:`bm_integral` for several data sets at one point, sharing the rule and kernel."""
    zz = np.asarray(z, dtype=complex).ravel()
    if len(zz) != quad.n:
        raise ValueError("point dimension does not match the surface")
    R = float(quad.R)
    side, dist = _side(zz, R)
    if dist < delta_min * R:
        raise SurfaceProximityError(
            f"point at distance {dist:.3g} from S_R is inside the margin {delta_min * R:.3g}")
    point = CPoint(tuple(zz))
    cache: dict = {}

    def kernel(rule):
        if id(rule) not in cache:
            kappa = surface_form_density(rule.nodes, quad.n, R, c)
            cache[id(rule)] = bm_kernel_density(zz, rule.nodes, kappa)
        return cache[id(rule)]

    aligned = None
    out = []
    for u0 in data:
        if isinstance(u0, (np.ndarray, list, tuple)):
            rule = quad
            samples = np.asarray(u0, dtype=complex).ravel()
        else:
            if aligned is None:
                po, oo = _aligned_orders(quad)
                aligned = build_aligned_rule(quad.n, R, zz, po, oo)
            rule = aligned
            samples = _sample(u0, rule.nodes)
        value = integrate(kernel(rule) * samples, rule)
        out.append(BMEvaluation(point, value, side, rule, dist, rule.size))
    return out


def calibrate_surface_constant(n: int, R=1.0, resolution=None) -> complex:
    """Fit ``c_n`` from the requirement that the potential of 1 at the centre equals 1."""
    quad = build_sphere(n, R, resolution)
    ones = np.ones(quad.size)
    raw = bm_integral(ones, quad, np.zeros(n), c=1.0).value
    return 1 / raw


def cr_test(w0, quad: SphereQuadrature, exterior_samples: Sequence,
            delta_min: float = DELTA_MIN) -> dict:
    """Largest ``|M+ w0|`` over exterior sample points, with the arg-max point."""
    best, where = 0.0, None
    values = []
    if isinstance(w0, KelvinFunction) and w0.is_zero():
        return {"max_abs": 0.0, "argmax": None, "values": [0j] * len(exterior_samples)}
    for z in exterior_samples:
        ev = bm_integral(w0, quad, z, delta_min)
        if ev.side != "exterior":
            raise SurfaceProximityError("cr_test samples must lie outside the sphere")
        values.append(ev.value)
        if abs(ev.value) > best or where is None:
            best, where = abs(ev.value), tuple(np.asarray(z, dtype=complex).ravel())
    return {"max_abs": best, "argmax": where, "values": values}


def richardson(values: Sequence[complex], order: int = 2) -> tuple[complex, list]:
    """Extrapolate a sequence on halving steps to step 0, eliminating ``h, h^2, ...``."""
    table = [list(values)]
    for k in range(1, order + 1):
        prev = table[-1]
        if len(prev) < 2:
            break
        f = 2 ** k
        table.append([(f * b - a) / (f - 1) for a, b in zip(prev[:-1], prev[1:])])
    return table[-1][-1], table


@dataclass
class JumpResult:
    point: tuple
    offsets: tuple
    interior: list
    exterior: list
    interior_limit: complex
    exterior_limit: complex
    jump: complex
    expected: complex | None
    monotone: bool
    notes: list = field(default_factory=list)


def _monotone(seq: Sequence[complex], limit: complex) -> bool:
    err = [abs(v - limit) for v in seq]
    return all(b <= a * (1 + 1e-9) + 1e-14 for a, b in zip(err[:-1], err[1:]))


def jump_check(w0, quad: SphereQuadrature, zeta0, offsets: Sequence[float] = JUMP_OFFSETS,
               min_offset: float = JUMP_DELTA_MIN) -> JumpResult:
    """Richardson-extrapolated ``M- - M+`` at a boundary point.

    Offsets are relative (``zeta0 (1 -+ delta)``), must halve successively and
    lie in ``(min_offset, 0.3)``.  Non-monotone convergence is reported in the
    result, not raised.
    """
    R = float(quad.R)
    zeta0 = np.asarray(zeta0, dtype=complex).ravel()
    if abs(np.linalg.norm(zeta0) - R) > 1e-9 * R:
        raise ValueError("zeta0 must lie on the sphere")
    offsets = tuple(float(d) for d in offsets)
    if any(not (min_offset < d < 0.3) for d in offsets):
        raise ValueError(f"offsets must lie in ({min_offset}, 0.3)")
    if any(abs(b - a / 2) > 1e-12 for a, b in zip(offsets[:-1], offsets[1:])):
        raise ValueError("offsets must halve successively")
    expected = None
    if isinstance(w0, KelvinFunction):
        expected = complex(evaluate(w0, zeta0))
        if w0.is_zero():
            z = [0j] * len(offsets)
            return JumpResult(tuple(zeta0), offsets, z, z, 0j, 0j, 0j, 0j, True)
    inner = [bm_integral(w0, quad, zeta0 * (1 - d), 0.0).value for d in offsets]
    outer = [bm_integral(w0, quad, zeta0 * (1 + d), 0.0).value for d in offsets]
    li, _ = richardson(inner)
    lo, _ = richardson(outer)
    mono = _monotone(inner, li) and _monotone(outer, lo)
    notes = [] if mono else ["non-monotone extrapolation sequence"]
    return JumpResult(tuple(zeta0), offsets, inner, outer, li, lo, li - lo, expected, mono, notes)


def complex_normal_derivative(f: KelvinFunction, zeta, R=1.0, tol: float = 1e-9) -> complex:
    """``sum_j conj(nu_j) dbar_j f(zeta)`` with the complex unit normal ``nu = zeta / R``."""
    zeta = np.asarray(zeta, dtype=complex).ravel()
    R = float(R)
    if abs(np.linalg.norm(zeta) - R) > tol * R:
        raise ValueError("zeta is not on the sphere S_R")
    total = 0j
    for j in range(1, f.n + 1):
        d = dbar(f, j)
        if not d.is_zero():
            total += complex(np.conj(zeta[j - 1]) / R) * evaluate(d, zeta)
    return total


def _fit_exponent(radii, values) -> float:
    x = np.log(np.asarray(radii, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class DecayReport:
    radii: tuple
    exponent_value: float
    exponent_dbar: float
    bound_value: int
    bound_dbar: int
    sphere_integrals: list
    passed: bool


def decay_check(v: KelvinFunction, radii: Sequence = (10, 100, 1000), directions: int = 32,
                seed: int = 0, slack: float = 0.1) -> DecayReport:
    """Measured decay exponents of ``v`` and ``dbar v`` and the vanishing boundary term at infinity.

    The boundary term ``int_{S_rho} sum_j conj(dbar_j v) v kappa_j ds`` is
    evaluated exactly at each radius.
    """
    n = v.n
    if any(d > 2 - 2 * n for d in v.canonical().term_degrees()):
        raise ValueError("decay_check expects terms of degree <= 2 - 2n")
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((directions, 2 * n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    unit = dirs[:, :n] + 1j * dirs[:, n:]
    grads = [dbar(v, j) for j in range(1, n + 1)]
    vmax, gmax = [], []
    for rho in radii:
        pts = unit * float(rho)
        vmax.append(float(np.max(np.abs(evaluate(v, pts)))))
        g = np.sqrt(sum(np.abs(evaluate(d, pts)) ** 2 for d in grads))
        gmax.append(float(np.max(g)))
    ev = _fit_exponent(radii, vmax) if min(vmax) > 0 else -math.inf
    eg = _fit_exponent(radii, gmax) if min(gmax) > 0 else -math.inf
    c = surface_form_constant(n)
    integrals = []
    for rho in radii:
        rho_q = as_rational(rho)
        integrand = KelvinFunction.zero(n)
        for j, d in enumerate(grads, start=1):
            integrand = integrand + d.conjugate() * v * KelvinFunction.z(j, n)
        val = sphere_integral_exact(integrand, rho_q).scale(c * (1 / ExactComplex(rho_q)))
        integrals.append(complex(val))
    mags = [abs(x) for x in integrals]
    tends = all(b <= a for a, b in zip(mags[:-1], mags[1:])) and mags[-1] <= mags[0] * 1e-3 + 1e-300
    ok = ev <= 2 - 2 * n + slack and eg <= 1 - 2 * n + slack and tends
    return DecayReport(tuple(radii), ev, eg, 2 - 2 * n, 1 - 2 * n, integrals, ok)


def kernel_is_harmonic_in_zeta(n: int, j: int) -> bool:
    """Exact check that ``conj(w_j) |w|^(-2n)`` is harmonic away from 0 (n > 1)."""
    from .kelvin import laplacian
    e = [0] * n
    e[j - 1] = 1
    f = KelvinFunction.monomial([0] * n, e, m=n)
    return laplacian(f).is_zero()
