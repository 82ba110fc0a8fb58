"""Quadrature on spheres S^{2n-1}_R and the exact monomial-moment oracle.

Fixed rules (:func:`build_sphere`):

* n = 1: trapezoid rule on the circle.
* n = 2: Hopf coordinates ``(z1, z2) = R (e^{i phi1} cos eta, e^{i phi2} sin eta)``,
  uniform grids in both phases and Gauss-Legendre in ``eta``.
* n >= 3: uniform phase grids times a collapsed Gauss-Jacobi rule on the
  simplex of squared moduli ``t_j = |z_j|^2 / R^2``.

Integrands that are nearly singular at a target point (Bochner-Martinelli
densities close to the surface) get a separate target-aligned rule,
:func:`build_aligned_rule`, with geometrically graded panels around the
boundary point nearest to the target.

Exact integrals are returned as :class:`~bmduality.core.PiMultiple`
values; the closed-form sphere moment is

    int_{S_R} |z^p|^2 ds = 2 pi^n p! / (n - 1 + |p|)! * R^(2n - 1 + 2|p|),

and off-diagonal moments (p != q) vanish.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .core import ExactComplex, MultiIndex, PiMultiple, as_rational

DEFAULT_RESOLUTION = {1: 64, 2: (32, 32, 24)}
DEFAULT_RESOLUTION_HIGH_DIM = (12, 10)


def sphere_area(n: int, R: float = 1.0) -> float:
    """Surface area of S^{2n-1}_R, ``2 pi^n R^(2n-1) / (n-1)!``."""
    return 2 * math.pi ** n * R ** (2 * n - 1) / math.factorial(n - 1)


@dataclass(frozen=True)
class SphereQuadrature:
    """Nodes with positive weights and outward unit normals on S^{2n-1}_R."""

    n: int
    R: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    normals: np.ndarray = field(repr=False)
    resolution: object = None
    scheme: str = ""

    def __post_init__(self):
        for name in ("nodes", "weights", "normals"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def real_nodes(self) -> np.ndarray:
        return np.concatenate([self.nodes.real, self.nodes.imag], axis=1)

    @property
    def complex_normals(self) -> np.ndarray:
        """``nu_j + i nu_{n+j}``, which is ``zeta_j / R`` on a centred sphere."""
        return self.normals[:, :self.n] + 1j * self.normals[:, self.n:]


def _normals_from_nodes(nodes: np.ndarray, R: float) -> np.ndarray:
    return np.concatenate([nodes.real, nodes.imag], axis=1) / R


def _gauss_legendre(order: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1), half * w


def normalize_resolution(n: int, resolution=None):
    if resolution is None:
        return DEFAULT_RESOLUTION.get(n, DEFAULT_RESOLUTION_HIGH_DIM)
    if n == 1:
        res = int(resolution[0] if isinstance(resolution, (tuple, list)) else resolution)
        if res < 3:
            raise ValueError("circle rule needs at least 3 nodes")
        return res
    res = tuple(int(r) for r in (resolution if isinstance(resolution, (tuple, list)) else (resolution,)))
    if n == 2:
        if len(res) != 3 or min(res) < 2 or res[0] < 4 or res[1] < 4:
            raise ValueError(f"n=2 resolution must be (phi1 >= 4, phi2 >= 4, eta >= 2), got {res}")
        return res
    if len(res) != 2 or res[0] < 4 or res[1] < 2:
        raise ValueError(f"n>=3 resolution must be (phases >= 4, simplex order >= 2), got {res}")
    return res


def build_sphere(n: int, R: float = 1.0, resolution=None) -> SphereQuadrature:
    """Fixed quadrature rule on S^{2n-1}_R (see module docstring for the schemes)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    R = float(R)
    if not R > 0:
        raise ValueError("radius must be positive")
    res = normalize_resolution(n, resolution)
    if n == 1:
        phi = 2 * np.pi * np.arange(res) / res
        nodes = (R * np.exp(1j * phi))[:, None]
        weights = np.full(res, 2 * np.pi * R / res)
        scheme = "trapezoid"
    elif n == 2:
        n1, n2, ne = res
        phi1 = 2 * np.pi * np.arange(n1) / n1
        phi2 = 2 * np.pi * np.arange(n2) / n2
        eta, weta = _gauss_legendre(ne, 0.0, np.pi / 2)
        E, P1, P2 = np.meshgrid(eta, phi1, phi2, indexing="ij")
        W = np.broadcast_to(weta[:, None, None], E.shape)
        z1 = R * np.cos(E) * np.exp(1j * P1)
        z2 = R * np.sin(E) * np.exp(1j * P2)
        nodes = np.stack([z1.ravel(), z2.ravel()], axis=1)
        dphi = (2 * np.pi / n1) * (2 * np.pi / n2)
        weights = (R ** 3 * np.cos(E) * np.sin(E) * W * dphi).ravel()
        scheme = "hopf-gauss"
    else:
        nodes, weights = _simplex_phase_rule(n, R, *res)
        scheme = "simplex-phase"
    return SphereQuadrature(n, R, nodes, weights, _normals_from_nodes(nodes, R), res, scheme)


def _simplex_phase_rule(n: int, R: float, n_phase: int, order: int):
    # collapsed coordinates t_1 = u_1, t_k = u_k * prod_{i<k} (1 - u_i)
    axes, wts = [], []
    for k in range(1, n):
        alpha = n - 1 - k
        x, w = roots_jacobi(order, alpha, 0)
        axes.append(0.5 * (x + 1))
        wts.append(w / 2 ** (alpha + 1))
    grids = np.meshgrid(*axes, indexing="ij")
    wgrid = np.ones_like(grids[0])
    for k, w in enumerate(wts):
        shape = [1] * (n - 1)
        shape[k] = -1
        wgrid = wgrid * w.reshape(shape)
    u = [g.ravel() for g in grids]
    t = []
    rest = np.ones_like(u[0])
    for uk in u:
        t.append(rest * uk)
        rest = rest * (1 - uk)
    t.append(rest)
    moduli = np.sqrt(np.clip(np.stack(t, axis=1), 0.0, None))
    w_simplex = wgrid.ravel()
    phases = np.meshgrid(*([2 * np.pi * np.arange(n_phase) / n_phase] * n), indexing="ij")
    ph = np.stack([p.ravel() for p in phases], axis=1)
    nodes = R * (moduli[:, None, :] * np.exp(1j * ph)[None, :, :]).reshape(-1, n)
    # ds = R^(2n-1) 2^(1-n) dt dphi over the unit simplex
    wphase = (2 * np.pi / n_phase) ** n
    weights = (R ** (2 * n - 1) * 2.0 ** (1 - n) * wphase * np.repeat(w_simplex, len(ph)))
    return nodes, weights


@lru_cache(maxsize=None)
def _sphere_product_rule(k: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Product rule on the unit sphere S^k in R^{k+1}; weights sum to its area."""
    if k == 0:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if k == 1:
        m = 2 * order
        phi = 2 * np.pi * np.arange(m) / m
        return np.stack([np.cos(phi), np.sin(phi)], axis=1), np.full(m, 2 * np.pi / m)
    a = (k - 2) / 2
    t, wt = roots_jacobi(order, a, a)
    sub_x, sub_w = _sphere_product_rule(k - 1, order)
    s = np.sqrt(1 - t ** 2)
    pts = np.concatenate([
        np.repeat(t, len(sub_w))[:, None],
        (s[:, None, None] * sub_x[None, :, :]).reshape(-1, k),
    ], axis=1)
    return pts, np.outer(wt, sub_w).ravel()


def graded_panels(rel_distance: float, max_width: float = 0.5) -> list[float]:
    """Breakpoints on [0, pi] refined geometrically towards 0 at scale ``rel_distance``."""
    a = min(max(rel_distance, 1e-8), 1.0)
    bps = [0.0]
    h = a / 2
    while h < 1.0:
        bps.append(h)
        h *= 2
    bps.append(1.0)
    m = math.ceil((math.pi - 1.0) / max_width)
    bps.extend(1.0 + (math.pi - 1.0) * np.arange(1, m + 1) / m)
    return bps


def unitary_aligning(z: np.ndarray) -> np.ndarray:
    """Unitary ``U`` with ``U e_1 = z / |z|`` (identity for ``z = 0``)."""
    z = np.asarray(z, dtype=complex)
    n = len(z)
    r = np.linalg.norm(z)
    if r == 0:
        return np.eye(n, dtype=complex)
    A = np.eye(n, dtype=complex)
    A[:, 0] = z / r
    Q, Rm = np.linalg.qr(A)
    # Householder QR keeps Q unitary even when A is rank deficient; only the
    # phase of column 0 needs fixing so that it equals z/|z| exactly
    Q[:, 0] *= Rm[0, 0] / abs(Rm[0, 0])
    return Q


def build_aligned_rule(n: int, R: float, z, panel_order: int = 24,
                       omega_order: int | None = None) -> SphereQuadrature:
    """Rule on S^{2n-1}_R refined around the surface point nearest to ``z``.

    The sphere is parametrized by the angle ``theta`` from the pole
    ``R z/|z|`` and a direction on S^{2n-2}; the theta-axis carries composite
    Gauss-Legendre panels graded at the scale of the distance from ``z`` to
    the sphere.  Accuracy is then essentially independent of that distance.
    """
    R = float(R)
    z = np.asarray(z, dtype=complex).ravel()
    if len(z) != n:
        raise ValueError("target dimension mismatch")
    if omega_order is None:
        omega_order = 16 if n <= 2 else 8
    rho = float(np.linalg.norm(z))
    rel = abs(rho - R) / R
    bps = graded_panels(rel)
    th_list, wth_list = [], []
    for a, b in zip(bps[:-1], bps[1:]):
        x, w = _gauss_legendre(panel_order, a, b)
        th_list.append(x)
        wth_list.append(w)
    theta = np.concatenate(th_list)
    wtheta = np.concatenate(wth_list) * np.sin(theta) ** (2 * n - 2)
    om, wom = _sphere_product_rule(2 * n - 2, omega_order)
    T = np.repeat(theta, len(wom))
    W = np.outer(wtheta, wom).ravel() * R ** (2 * n - 1)
    OM = np.tile(om, (len(theta), 1))
    sinT = np.sin(T)
    local = np.empty((len(T), n), dtype=complex)
    local[:, 0] = R * (np.cos(T) + 1j * sinT * OM[:, 0])
    for k in range(1, n):
        local[:, k] = R * sinT * (OM[:, 2 * k - 1] + 1j * OM[:, 2 * k])
    U = unitary_aligning(z)
    nodes = local @ U.T
    return SphereQuadrature(n, R, nodes, W, _normals_from_nodes(nodes, R),
                            (panel_order, omega_order), "aligned-graded")


def integrate(f, quad: SphereQuadrature) -> complex:
    """``sum_i w_i f(node_i)`` with exactly rounded summation.

    ``f`` is a callable on the (N, n) node array or an array of node values.
    """
    vals = f(quad.nodes) if callable(f) else f
    vals = np.asarray(vals, dtype=complex).ravel()
    if vals.shape != quad.weights.shape:
        raise ValueError(f"expected {quad.size} node values, got {vals.shape[0]}")
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise FloatingPointError(f"non-finite integrand at node {bad}: {quad.nodes[bad]}")
    prod = quad.weights * vals
    return complex(math.fsum(prod.real), math.fsum(prod.imag))


# -- exact oracle -----------------------------------------------------------

def unit_moment_rational(p: Sequence[int], n: int) -> Fraction:
    """``int_{S^{2n-1}} |z^p|^2 ds / pi^n`` for the unit sphere."""
    p = MultiIndex(p)
    return Fraction(2 * p.factorial(), math.factorial(n - 1 + p.order))


def moment_exact(p: Sequence[int], q: Sequence[int], n: int, R=1) -> PiMultiple:
    """Exact ``int_{S_R} z^p conj(z)^q ds`` as a multiple of pi^n (R must be rational)."""
    p, q = MultiIndex(p), MultiIndex(q)
    if len(p) != n or len(q) != n:
        raise ValueError("multi-index dimension must equal n")
    if p != q:
        return PiMultiple(ExactComplex(0), n)
    R = as_rational(R)
    return PiMultiple(ExactComplex(unit_moment_rational(p, n) * R ** (2 * n - 1 + 2 * p.order)), n)


def exact_monomial_moment(p: Sequence[int], q: Sequence[int], n: int, R: float = 1.0) -> complex:
    """Float value of the closed-form moment (R may be any positive real)."""
    p, q = MultiIndex(p), MultiIndex(q)
    if len(p) != n or len(q) != n:
        raise ValueError("multi-index dimension must equal n")
    if p != q:
        return 0j
    return complex(float(unit_moment_rational(p, n)) * math.pi ** n * float(R) ** (2 * n - 1 + 2 * p.order))


def sphere_integral_exact(f, R=1) -> PiMultiple:
    """Exact integral over S_R of a Kelvin function (``|z|^-2m`` is ``R^-2m`` there)."""
    R = as_rational(R)
    n = f.n
    total = ExactComplex(0)
    for (p, q, m), c in f.terms.items():
        if p != q:
            continue
        total = total + c * unit_moment_rational(p, n) * R ** (2 * n - 1 + 2 * sum(p) - 2 * m)
    return PiMultiple(total, n)


class DivergentIntegralError(ArithmeticError):
    """A radial integral over the ball interior or exterior does not converge."""


def volume_integral_exact(f, R=1, side: str = "interior") -> PiMultiple:
    """Exact integral of a Kelvin function over ``|z| < R`` or ``|z| > R``.

    Each term of degree k contributes ``int rho^(k+2n-1) drho`` times a unit
    sphere moment; convergence is required termwise.
    """
    if side not in ("interior", "exterior"):
        raise ValueError("side must be 'interior' or 'exterior'")
    R = as_rational(R)
    n = f.n
    total = ExactComplex(0)
    for (p, q, m), c in f.terms.items():
        power = sum(p) + sum(q) - 2 * m + 2 * n  # exponent after integrating rho^(k + 2n - 1)
        converges = power > 0 if side == "interior" else power < 0
        if not converges:
            raise DivergentIntegralError(
                f"{side} radial integral of term degree {power - 2 * n} diverges in dimension {2 * n}")
        if p != q:
            continue
        radial = R ** power / power if side == "interior" else -(R ** power) / power
        total = total + c * unit_moment_rational(p, n) * radial
    return PiMultiple(total, n)


def monte_carlo_moment(p: Sequence[int], q: Sequence[int], n: int, samples: int = 10 ** 7,
                       seed: int = 0, chunk: int = 10 ** 6) -> tuple[complex, float]:
    """Monte Carlo estimate of the unit-sphere moment and its standard error.

    Uniform points on S^{2n-1} come from normalized complex Gaussians.
    """
    p, q = np.asarray(p), np.asarray(q)
    rng = np.random.default_rng(seed)
    area = sphere_area(n)
    s1 = 0j
    s2 = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        g = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        zeta = g / np.linalg.norm(g, axis=1)[:, None]
        vals = np.prod(zeta ** p * zeta.conj() ** q, axis=1)
        s1 += vals.sum()
        s2 += float(np.sum(np.abs(vals) ** 2))
        done += m
    mean = s1 / samples
    var = max(s2 / samples - abs(mean) ** 2, 0.0)
    return area * mean, area * math.sqrt(var / samples)


def verify_moment_formula(p, q, n: int, samples: int = 10 ** 7, seed: int = 0,
                          sigmas: float = 3.0) -> dict:
    """Check the closed-form moment against Monte Carlo at ``sigmas`` standard errors."""
    est, err = monte_carlo_moment(p, q, n, samples, seed)
    exact = exact_monomial_moment(p, q, n, 1.0)
    dev = abs(est - exact)
    return {"estimate": est, "stderr": err, "exact": exact, "deviation": dev,
            "agrees": dev <= sigmas * err * math.sqrt(2) + 1e-15}


# -- CSV import/export --------------------------------------------------------

def quadrature_to_csv(quad: SphereQuadrature) -> str:
    n = quad.n
    header = [f"x{k + 1}" for k in range(2 * n)] + ["weight"] + [f"nu{k + 1}" for k in range(2 * n)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for x, wt, nu in zip(quad.real_nodes, quad.weights, quad.normals):
        w.writerow([repr(float(v)) for v in x] + [repr(float(wt))] + [repr(float(v)) for v in nu])
    return buf.getvalue()


def quadrature_from_csv(text: str, R: float | None = None) -> SphereQuadrature:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    two_n = sum(1 for h in header if h.startswith("x"))
    n = two_n // 2
    data = np.array([[float(v) for v in r] for r in body])
    x = data[:, :two_n]
    nodes = x[:, :n] + 1j * x[:, n:]
    weights = data[:, two_n]
    normals = data[:, two_n + 1:]
    if R is None:
        R = float(np.median(np.linalg.norm(x, axis=1)))
    return SphereQuadrature(n, R, nodes, weights, normals, None, "imported")
