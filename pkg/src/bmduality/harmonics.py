"""Harmonic polynomial bases in R^{2n}, Dirichlet problems on balls, the
Hermitian form h_D and the holomorphic projection on truncated spaces.

Everything is exact: bases come from the null space of the Laplacian on
homogeneous polynomials, orthogonalized against the closed-form sphere
moments.  Basis polynomials are kept orthogonal with rational coefficients;
their squared norms (in units of pi^n on the unit sphere) are stored so the
orthonormal family is ``h_j / sqrt(pi^n * norms_sq[j])``.

Boundary data on S_R are expanded as ``w0(zeta) = sum c_{r,j} h^{(j)}_r(zeta / R)``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import ExactComplex, PiMultiple, as_rational, multi_indices, multi_indices_upto
from .exact_linalg import nullspace, solve
from .kelvin import KelvinFunction, dbar, is_harmonic
from .quadrature import unit_moment_rational, volume_integral_exact


def dimension_formula(r: int, n: int) -> int:
    """Number of linearly independent spherical harmonics of degree r on S^{2n-1}."""
    if r < 0 or n < 1:
        raise ValueError("need r >= 0 and n >= 1")
    if n == 1:
        return 1 if r == 0 else 2
    num = (2 * n + 2 * r - 2) * math.factorial(r + 2 * n - 3)
    den = math.factorial(r) * math.factorial(2 * n - 2)
    assert num % den == 0
    return num // den


def _bidegree_monomials(n: int, r: int) -> list[tuple[tuple, tuple]]:
    out = []
    for a in range(r, -1, -1):
        for p in multi_indices(n, a):
            for q in multi_indices(n, r - a):
                out.append((tuple(p), tuple(q)))
    return out


def _charge(p, q) -> tuple:
    return tuple(a - b for a, b in zip(p, q))


def _pair_moment(n: int, mono_a, mono_b) -> Fraction:
    """``int_{S^{2n-1}} z^p conj(z)^q * conj(z^p' conj(z)^q') ds / pi^n``."""
    (p, q), (pp, qq) = mono_a, mono_b
    hol = tuple(x + y for x, y in zip(p, qq))
    anti = tuple(x + y for x, y in zip(q, pp))
    if hol != anti:
        return Fraction(0)
    return unit_moment_rational(hol, n)


@dataclass(frozen=True)
class HarmonicBasis:
    """Orthogonal basis of harmonic homogeneous polynomials of one degree."""

    degree: int
    n: int
    polys: tuple
    norms_sq: tuple = field(repr=False)

    def __len__(self):
        return len(self.polys)

    def gram_exact(self) -> list[list[Fraction]]:
        """Exact Gram matrix on the unit sphere, in units of pi^n."""
        return [[sphere_inner_exact(a, b) for b in self.polys] for a in self.polys]

    def orthonormal_gram(self) -> list[list[Fraction]]:
        """Gram matrix of the normalized family; exact identity when the basis is orthogonal.

        Entry (i, j) is ``<h_i, h_j> / sqrt(N_i N_j)``, evaluated as a signed
        rational square so no irrational square root is ever formed.
        """
        G = self.gram_exact()
        out = []
        for i, row in enumerate(G):
            out_row = []
            for j, g in enumerate(row):
                sq = g * g / (self.norms_sq[i] * self.norms_sq[j])
                out_row.append(sq if g >= 0 else -sq)
            out.append(out_row)
        return out

    def orthonormal_scale(self, j: int) -> float:
        """Float factor turning ``polys[j]`` into a unit vector in L^2(S^{2n-1})."""
        return 1.0 / math.sqrt(math.pi ** self.n * float(self.norms_sq[j]))


def sphere_inner_exact(f: KelvinFunction, g: KelvinFunction) -> Fraction | ExactComplex:
    """``int_{S^{2n-1}} f conj(g) ds / pi^n`` for polynomials ``f``, ``g``."""
    total = ExactComplex(0)
    n = f.n
    gt = g.terms
    for (p, q, m), c in f.terms.items():
        if m:
            raise ValueError("sphere inner product expects polynomials")
        for (pp, qq, mm), d in gt.items():
            if mm:
                raise ValueError("sphere inner product expects polynomials")
            mom = _pair_moment(n, (p, q), (pp, qq))
            if mom:
                total = total + c * d.conjugate() * mom
    return total.re if total.im == 0 else total


@lru_cache(maxsize=None)
def build_basis(r: int, n: int) -> HarmonicBasis:
    """Exact orthogonal basis of degree-r harmonic polynomials in C^n = R^{2n}.

    The Laplacian preserves the charge ``p - q`` of a monomial, so its matrix
    splits into charge blocks; each block's null space is computed by exact
    elimination and Gram-Schmidt-orthogonalized with sphere moments.
    """
    if r < 0 or n < 1:
        raise ValueError("need r >= 0 and n >= 1")
    blocks: dict = defaultdict(list)
    for mono in _bidegree_monomials(n, r):
        blocks[_charge(*mono)].append(mono)
    lower: dict = defaultdict(list)
    if r >= 2:
        for mono in _bidegree_monomials(n, r - 2):
            lower[_charge(*mono)].append(mono)
    polys, norms = [], []
    for ch in sorted(blocks, reverse=True):
        cols = blocks[ch]
        rows = lower.get(ch, [])
        row_index = {mono: i for i, mono in enumerate(rows)}
        mat = [[Fraction(0)] * len(cols) for _ in rows]
        for k, (p, q) in enumerate(cols):
            for j in range(n):
                if p[j] and q[j]:
                    tgt = (p[:j] + (p[j] - 1,) + p[j + 1:], q[:j] + (q[j] - 1,) + q[j + 1:])
                    mat[row_index[tgt]][k] += 4 * p[j] * q[j]
        kernel = nullspace(mat, len(cols))
        ortho: list[list[Fraction]] = []
        ortho_norms: list[Fraction] = []
        moments = [[_pair_moment(n, a, b) for b in cols] for a in cols]

        def inner(u, v):
            return sum((u[i] * v[j] * moments[i][j] for i in range(len(cols)) if u[i]
                        for j in range(len(cols)) if v[j]), Fraction(0))

        for vec in kernel:
            v = list(vec)
            for u, nu in zip(ortho, ortho_norms):
                coef = inner(v, u) / nu
                if coef:
                    v = [a - coef * b for a, b in zip(v, u)]
            ortho.append(v)
            ortho_norms.append(inner(v, v))
        for v, nv in zip(ortho, ortho_norms):
            terms = {(p, q, 0): c for (p, q), c in zip(cols, v) if c}
            polys.append(KelvinFunction(n, terms))
            norms.append(nv)
    basis = HarmonicBasis(r, n, tuple(polys), tuple(norms))
    if len(basis) != dimension_formula(r, n):
        raise AssertionError(f"basis size {len(basis)} != J({r},{2 * n})")
    return basis


def kelvin_extend(h: KelvinFunction, n: int | None = None) -> KelvinFunction:
    """``h(x) / |x|^(2n + 2r - 2)`` for a harmonic homogeneous polynomial h of degree r."""
    n = h.n if n is None else n
    if n != h.n:
        raise ValueError("dimension mismatch")
    if h.is_zero():
        return KelvinFunction.zero(n)
    h = h.canonical()
    if h.max_m != 0:
        raise ValueError("Kelvin extension expects a polynomial")
    r = h.homogeneous_degree()
    if r is None:
        raise ValueError("Kelvin extension expects a homogeneous polynomial")
    if not is_harmonic(h):
        raise ValueError("Kelvin extension expects a harmonic polynomial")
    return h.times_norm_pow(-(n + r - 1))


@dataclass(frozen=True)
class BoundaryExpansion:
    """Data on S_R as ``sum c_{r,j} h^{(j)}_r(zeta / R)`` up to degree ``r_max``."""

    n: int
    R: Fraction
    r_max: int
    coefficients: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "R", as_rational(self.R))
        clean = {k: ExactComplex.coerce(v) for k, v in sorted(self.coefficients.items())
                 if ExactComplex.coerce(v)}
        for (r, j) in clean:
            if r > self.r_max or not 0 <= j < dimension_formula(r, self.n):
                raise ValueError(f"coefficient index {(r, j)} out of range")
        object.__setattr__(self, "coefficients", clean)

    def __eq__(self, other):
        if not isinstance(other, BoundaryExpansion):
            return NotImplemented
        return (self.n, self.R, self.coefficients) == (other.n, other.R, other.coefficients)

    def __hash__(self):
        return hash((self.n, self.R, tuple(self.coefficients.items())))

    def evaluate(self, zeta) -> np.ndarray | complex:
        """Float values of the data at points on S_R."""
        from .kelvin import evaluate
        return evaluate(dirichlet_interior(self), zeta)


def trace_expansion(f: KelvinFunction, R=1, r_max: int | None = None) -> BoundaryExpansion:
    """Exact spherical-harmonic expansion of the restriction of ``f`` to S_R.

    On S_R every ``|z|^-2m`` is the constant ``R^-2m``, so the trace of any
    Kelvin function is a polynomial.  Completeness of the truncation is
    verified by Parseval's identity; incomplete truncation raises.
    """
    R = as_rational(R)
    n = f.n
    g_terms: dict = defaultdict(lambda: ExactComplex(0))
    for (p, q, m), c in f.terms.items():
        g_terms[(p, q, 0)] += c * R ** (sum(p) + sum(q) - 2 * m)
    g = KelvinFunction(n, dict(g_terms))
    if r_max is None:
        r_max = g.polynomial_degree()
    coeffs = {}
    parseval = Fraction(0)
    for r in range(r_max + 1):
        basis = build_basis(r, n)
        for j, (h, nrm) in enumerate(zip(basis.polys, basis.norms_sq)):
            c = ExactComplex.coerce(sphere_inner_exact(g, h)) / nrm
            if c:
                coeffs[(r, j)] = c
                parseval += c.abs_sq() * nrm
    total = sphere_inner_exact(g, g)
    total = total.re if isinstance(total, ExactComplex) else total
    if total != parseval:
        raise ValueError(f"trace has spherical-harmonic content above degree r_max={r_max}")
    return BoundaryExpansion(n, R, r_max, coeffs)


def dirichlet_interior(w0: BoundaryExpansion) -> KelvinFunction:
    """Harmonic function in B(0,R) with trace w0: ``sum c h(z) R^-r``."""
    out = KelvinFunction.zero(w0.n)
    for (r, j), c in w0.coefficients.items():
        h = build_basis(r, w0.n).polys[j]
        out = out + h * (c * w0.R ** (-r))
    return out


def dirichlet_exterior(w0: BoundaryExpansion) -> KelvinFunction:
    """Harmonic function outside B(0,R), vanishing at infinity, with trace w0.

    Each ``h_r(zeta / R)`` continues as ``R^(2n + r - 2) h_r(z) / |z|^(2n + 2r - 2)``.
    """
    n = w0.n
    out = KelvinFunction.zero(n)
    for (r, j), c in w0.coefficients.items():
        h = build_basis(r, n).polys[j]
        out = out + h.times_norm_pow(-(n + r - 1)) * (c * w0.R ** (2 * n + r - 2))
    return out


@dataclass(frozen=True)
class HermitianFormValue:
    """Interior and exterior contributions to h_D on a ball, exact in units of pi^n."""

    interior: PiMultiple
    exterior: PiMultiple

    @property
    def total(self) -> PiMultiple:
        return self.interior + self.exterior

    @property
    def interior_part(self) -> complex:
        return complex(self.interior)

    @property
    def exterior_part(self) -> complex:
        return complex(self.exterior)

    @property
    def value(self) -> complex:
        return complex(self.total)


class _FormParts:
    """Cached dbar components of a function and of its exterior Dirichlet continuation."""

    def __init__(self, w: KelvinFunction, R: Fraction, r_max: int | None):
        w = w.canonical()
        if w.max_m != 0:
            raise ValueError("h_D arguments must be polynomials on the ball")
        self.n = w.n
        self.interior = [dbar(w, j) for j in range(1, w.n + 1)]
        ext = dirichlet_exterior(trace_expansion(w, R, r_max))
        self.exterior = [dbar(ext, j) for j in range(1, w.n + 1)]


def _form(a: _FormParts, b: _FormParts, R: Fraction) -> HermitianFormValue:
    inner = PiMultiple(ExactComplex(0), a.n)
    outer = PiMultiple(ExactComplex(0), a.n)
    for da, db in zip(a.interior, b.interior):
        if not da.is_zero() and not db.is_zero():
            inner = inner + volume_integral_exact(da.conjugate() * db, R, "interior")
    for da, db in zip(a.exterior, b.exterior):
        if not da.is_zero() and not db.is_zero():
            outer = outer + volume_integral_exact(da.conjugate() * db, R, "exterior")
    return HermitianFormValue(inner, outer)


def hermitian_form(w: KelvinFunction, w_tilde: KelvinFunction, R=1,
                   r_max: int | None = None) -> HermitianFormValue:
    """``sum_j int_B conj(dbar_j w) dbar_j w~ + sum_j int_{ext} conj(dbar_j P~w) dbar_j P~w~``.

    Conjugate-linear in ``w``, linear in ``w_tilde``; D = B(0, R).
    """
    R = as_rational(R)
    return _form(_FormParts(w, R, r_max), _FormParts(w_tilde, R, r_max), R)


class IllConditionedError(ArithmeticError):
    pass


def holomorphic_gram(n: int, r_max: int, R=1) -> tuple[list, list]:
    """Monomials ``z^s`` (|s| <= r_max) and their exact h_D Gram matrix."""
    R = as_rational(R)
    monos = multi_indices_upto(n, r_max)
    parts = [_FormParts(KelvinFunction.monomial(s), R, r_max) for s in monos]
    G = [[_form(a, b, R).total.coeff for b in parts] for a in parts]
    return monos, G


def project_holomorphic(w: KelvinFunction, r_max: int, R=1, cond_max: float = 1e12) -> KelvinFunction:
    """Orthogonal projection, w.r.t. h_D on B(0,R), onto holomorphic polynomials of degree <= r_max."""
    R = as_rational(R)
    n = w.n
    monos, G = _cached_gram(n, r_max, R)
    Gf = np.array([[complex(v) for v in row] for row in G])
    cond = np.linalg.cond(Gf)
    if not np.isfinite(cond) or cond > cond_max:
        raise IllConditionedError(f"h_D Gram matrix condition number {cond:.3e} exceeds {cond_max:.1e}")
    if w.is_zero():
        return KelvinFunction.zero(n)
    wp = _FormParts(w, R, max(r_max, w.canonical().polynomial_degree()))
    rhs = [_form(_FormParts(KelvinFunction.monomial(s), R, r_max), wp, R).total.coeff for s in monos]
    coeffs = solve(G, rhs)
    out = KelvinFunction.zero(n)
    for s, c in zip(monos, coeffs):
        if c:
            out = out + KelvinFunction.monomial(s, coeff=c)
    return out


@lru_cache(maxsize=32)
def _cached_gram(n: int, r_max: int, R: Fraction):
    return holomorphic_gram(n, r_max, R)


def harmonic_polynomials_upto(n: int, r_max: int) -> list[KelvinFunction]:
    return [h for r in range(r_max + 1) for h in build_basis(r, n).polys]
