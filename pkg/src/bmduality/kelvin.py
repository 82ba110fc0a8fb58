"""Exact algebra of finite sums ``c * z**p * conj(z)**q * |z|**(-2m)``.

The class is closed under both Wirtinger derivative families, so the
Cauchy-Riemann operator, its formal adjoint, the Laplacian and Euler's
homogeneity operator all act symbolically with Gaussian-rational
coefficients.  Only :func:`evaluate` touches floating point.

Component indices ``j`` are 1-based throughout, as in ``z_1, ..., z_n``.

Representation is not unique because ``|z|**2 = sum_j z_j conj(z_j)``.
Operations keep the raw term sums; :meth:`KelvinFunction.canonical`
rewrites a function as ``P / |z|**(2M)`` with ``P`` a polynomial not
divisible by ``|z|**2`` (or ``M == 0``), which is unique and is what equality
and zero tests use.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .core import ExactComplex, MultiIndex, as_points, multi_indices

Key = tuple  # (p, q, m) with p, q plain int tuples


def _add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def _bump(a: tuple, j: int, delta: int) -> tuple:
    return a[:j] + (a[j] + delta,) + a[j + 1:]


class KelvinFunction:
    """Immutable finite sum of Kelvin terms in ``n`` complex variables."""

    __slots__ = ("n", "_terms", "_canon")

    def __init__(self, n: int, terms: Mapping[Key, object] | None = None):
        if n < 1:
            raise ValueError("dimension n must be >= 1")
        self.n = n
        clean: dict[Key, ExactComplex] = {}
        for (p, q, m), c in (terms or {}).items():
            p, q = tuple(int(e) for e in p), tuple(int(e) for e in q)
            if len(p) != n or len(q) != n:
                raise ValueError(f"exponent length mismatch for n={n}: {p}, {q}")
            if min(p + q, default=0) < 0:
                raise ValueError("exponents must be non-negative")
            if m < 0:
                raise ValueError("positive powers of |z|^2 must be expanded (m >= 0)")
            c = ExactComplex.coerce(c)
            key = (p, q, int(m))
            total = clean.get(key, ExactComplex(0)) + c
            if total:
                clean[key] = total
            else:
                clean.pop(key, None)
        self._terms = clean
        self._canon = None

    # -- construction -------------------------------------------------
    @classmethod
    def _raw(cls, n: int, terms: dict) -> "KelvinFunction":
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = {k: c for k, c in terms.items() if c}
        obj._canon = None
        return obj

    @classmethod
    def zero(cls, n: int) -> "KelvinFunction":
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, c=1) -> "KelvinFunction":
        zero = (0,) * n
        return cls(n, {(zero, zero, 0): c})

    @classmethod
    def monomial(cls, p: Sequence[int], q: Sequence[int] | None = None, m: int = 0,
                 coeff=1) -> "KelvinFunction":
        p = tuple(p)
        q = tuple(q) if q is not None else (0,) * len(p)
        return cls(len(p), {(p, q, m): coeff})

    @classmethod
    def z(cls, j: int, n: int) -> "KelvinFunction":
        e = tuple(MultiIndex.unit(j, n))
        return cls(n, {(e, (0,) * n, 0): 1})

    @classmethod
    def zbar(cls, j: int, n: int) -> "KelvinFunction":
        e = tuple(MultiIndex.unit(j, n))
        return cls(n, {((0,) * n, e, 0): 1})

    @classmethod
    def norm_sq(cls, n: int) -> "KelvinFunction":
        """The polynomial ``|z|**2 = sum_j z_j conj(z_j)``."""
        terms = {}
        for j in range(1, n + 1):
            e = tuple(MultiIndex.unit(j, n))
            terms[(e, e, 0)] = 1
        return cls(n, terms)

    @classmethod
    def inv_norm_pow(cls, n: int, m: int) -> "KelvinFunction":
        """``|z|**(-2m)``."""
        zero = (0,) * n
        return cls(n, {(zero, zero, m): 1})

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def iter_terms(self) -> Iterator[tuple[MultiIndex, MultiIndex, int, ExactComplex]]:
        for (p, q, m) in sorted(self._terms):
            yield MultiIndex(p), MultiIndex(q), m, self._terms[(p, q, m)]

    def __len__(self):
        return len(self._terms)

    @property
    def max_m(self) -> int:
        return max((m for (_, _, m) in self._terms), default=0)

    def term_degrees(self) -> set[int]:
        return {sum(p) + sum(q) - 2 * m for (p, q, m) in self._terms}

    def homogeneous_degree(self) -> int | None:
        degs = self.term_degrees()
        if len(degs) == 1:
            return degs.pop()
        if not degs:
            return None
        c = self.canonical()
        degs = c.term_degrees()
        return degs.pop() if len(degs) == 1 else None

    def is_polynomial(self) -> bool:
        return self.canonical().max_m == 0

    def polynomial_degree(self) -> int:
        """Largest ``|p| + |q|`` among the terms (ignores ``m``)."""
        return max((sum(p) + sum(q) for (p, q, _) in self._terms), default=0)

    # -- arithmetic ---------------------------------------------------
    def _check(self, other: "KelvinFunction"):
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, KelvinFunction):
            other = KelvinFunction.constant(self.n, other)
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, ExactComplex(0)) + c
        return KelvinFunction._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return KelvinFunction._raw(self.n, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, KelvinFunction):
            other = KelvinFunction.constant(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, KelvinFunction):
            c = ExactComplex.coerce(other)
            return KelvinFunction._raw(self.n, {k: v * c for k, v in self._terms.items()})
        self._check(other)
        out: dict = defaultdict(lambda: ExactComplex(0))
        for (p1, q1, m1), c1 in self._terms.items():
            for (p2, q2, m2), c2 in other._terms.items():
                out[(_add(p1, p2), _add(q1, q2), m1 + m2)] += c1 * c2
        return KelvinFunction._raw(self.n, out)

    __rmul__ = __mul__

    def conjugate(self) -> "KelvinFunction":
        return KelvinFunction._raw(self.n, {(q, p, m): c.conjugate()
                                            for (p, q, m), c in self._terms.items()})

    def times_norm_pow(self, k: int) -> "KelvinFunction":
        """Multiply by ``|z|**(2k)``; positive powers not absorbed by ``m`` are expanded."""
        if k <= 0:
            return KelvinFunction._raw(self.n, {(p, q, m - k): c for (p, q, m), c in self._terms.items()})
        out: dict = defaultdict(lambda: ExactComplex(0))
        for (p, q, m), c in self._terms.items():
            if m >= k:
                out[(p, q, m - k)] += c
                continue
            for (pe, qe), mult in _norm_power_expansion(self.n, k - m).items():
                out[(_add(p, pe), _add(q, qe), 0)] += c * mult
        return KelvinFunction._raw(self.n, out)

    # -- canonical form -------------------------------------------------
    def _cleared_polynomial(self) -> tuple[dict, int]:
        """``(P, M)`` with ``self == P / |z|**(2M)`` and ``P`` a polynomial dict {(p, q): c}."""
        big_m = self.max_m
        poly: dict = defaultdict(lambda: ExactComplex(0))
        for (p, q, m), c in self._terms.items():
            k = big_m - m
            if k == 0:
                poly[(p, q)] += c
            else:
                for (pe, qe), mult in _norm_power_expansion(self.n, k).items():
                    poly[(_add(p, pe), _add(q, qe))] += c * mult
        return {k: c for k, c in poly.items() if c}, big_m

    def canonical(self) -> "KelvinFunction":
        if self._canon is None:
            poly, big_m = self._cleared_polynomial()
            while big_m > 0 and poly:
                quotient = _divide_by_norm_sq(poly, self.n)
                if quotient is None:
                    break
                poly, big_m = quotient, big_m - 1
            if not poly:
                big_m = 0
            canon = KelvinFunction._raw(self.n, {(p, q, big_m): c for (p, q), c in poly.items()})
            canon._canon = canon
            self._canon = canon
        return self._canon

    def is_zero(self) -> bool:
        if not self._terms:
            return True
        poly, _ = self._cleared_polynomial()
        return not poly

    def __eq__(self, other):
        if isinstance(other, KelvinFunction):
            return self.n == other.n and (self - other).is_zero()
        try:
            return (self - other).is_zero()
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self.canonical()._terms.items())))

    def __repr__(self):
        return f"KelvinFunction(n={self.n}, {self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for p, q, m, c in self.iter_terms():
            factors = [f"z{j + 1}^{e}" if e > 1 else f"z{j + 1}" for j, e in enumerate(p) if e]
            factors += [f"zb{j + 1}^{e}" if e > 1 else f"zb{j + 1}" for j, e in enumerate(q) if e]
            if m:
                factors.append(f"|z|^-{2 * m}")
            parts.append("*".join([str(c)] + factors) if factors else str(c))
        return " + ".join(parts)

    # -- serialization ------------------------------------------------
    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"coeff_re": str(c.re), "coeff_im": str(c.im),
                 "p": list(p), "q": list(q), "m": m}
                for p, q, m, c in self.iter_terms()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "KelvinFunction":
        n = int(data["n"])
        terms = {}
        for t in data["terms"]:
            key = (tuple(t["p"]), tuple(t["q"]), int(t["m"]))
            terms[key] = ExactComplex.parse(t["coeff_re"], t.get("coeff_im", "0"))
        return cls(n, terms)


def _norm_power_expansion(n: int, k: int) -> dict:
    """Multinomial expansion of ``(sum_j z_j conj(z_j))**k`` as {(a, a): coeff}."""
    return _NORM_POW_CACHE.setdefault((n, k), _expand_norm_power(n, k))


def _expand_norm_power(n: int, k: int) -> dict:
    out = {}
    for a in multi_indices(n, k):
        mult = math.factorial(k) // a.factorial()
        out[(tuple(a), tuple(a))] = mult
    return out


_NORM_POW_CACHE: dict = {}


def _divide_by_norm_sq(poly: dict, n: int) -> dict | None:
    """Exact quotient of a polynomial by ``|z|**2`` or ``None`` if it does not divide.

    Division by the single polynomial ``s = sum_j z_j conj(z_j)`` with leading
    monomial ``z_1 conj(z_1)``; a one-element set is a Groebner basis of its
    ideal, so a zero remainder is equivalent to divisibility.
    """
    rem: dict = dict(poly)
    quo: dict = defaultdict(lambda: ExactComplex(0))
    while True:
        lead = next(((p, q) for (p, q) in sorted(rem, reverse=True)
                     if p[0] > 0 and q[0] > 0), None)
        if lead is None:
            break
        c = rem.pop(lead)
        p, q = lead
        qp, qq = _bump(p, 0, -1), _bump(q, 0, -1)
        quo[(qp, qq)] += c
        for j in range(1, n):
            key = (_bump(qp, j, 1), _bump(qq, j, 1))
            val = rem.get(key, ExactComplex(0)) - c
            if val:
                rem[key] = val
            else:
                rem.pop(key, None)
    if rem:
        return None
    return {k: c for k, c in quo.items() if c}


# -- differential operators ---------------------------------------------

def _check_index(f: KelvinFunction, j: int) -> int:
    if not 1 <= j <= f.n:
        raise ValueError(f"component index {j} outside 1..{f.n}")
    return j - 1


def dbar(f: KelvinFunction, j: int) -> KelvinFunction:
    """Cauchy-Riemann component ``(d/dx_j + i d/dx_{n+j}) / 2``, i.e. ``d/d conj(z_j)``."""
    jj = _check_index(f, j)
    out: dict = defaultdict(lambda: ExactComplex(0))
    for (p, q, m), c in f._terms.items():
        if q[jj]:
            out[(p, _bump(q, jj, -1), m)] += c * q[jj]
        if m:
            out[(_bump(p, jj, 1), q, m + 1)] -= c * m
    return KelvinFunction._raw(f.n, out)


def dbar_star(f: KelvinFunction, j: int) -> KelvinFunction:
    """Formal adjoint component ``(d/dy_j - i d/dy_{n+j}) / 2``, i.e. ``d/dz_j``."""
    jj = _check_index(f, j)
    out: dict = defaultdict(lambda: ExactComplex(0))
    for (p, q, m), c in f._terms.items():
        if p[jj]:
            out[(_bump(p, jj, -1), q, m)] += c * p[jj]
        if m:
            out[(p, _bump(q, jj, 1), m + 1)] -= c * m
    return KelvinFunction._raw(f.n, out)


def laplacian(f: KelvinFunction) -> KelvinFunction:
    """Full Laplacian in R^{2n}, ``4 * sum_j dbar_star(dbar(f, j), j)``, canonicalized."""
    total = KelvinFunction.zero(f.n)
    for j in range(1, f.n + 1):
        total = total + dbar_star(dbar(f, j), j)
    return (total * 4).canonical()


def euler_operator(f: KelvinFunction) -> KelvinFunction:
    """``sum_j (z_j d/dz_j + conj(z_j) d/d conj(z_j)) f``."""
    total = KelvinFunction.zero(f.n)
    for j in range(1, f.n + 1):
        total = total + KelvinFunction.z(j, f.n) * dbar_star(f, j)
        total = total + KelvinFunction.zbar(j, f.n) * dbar(f, j)
    return total


def euler_degree(f: KelvinFunction) -> int | str:
    """Homogeneity degree, confirmed by Euler's identity, or ``"inhomogeneous"``."""
    deg = f.homogeneous_degree()
    if deg is None:
        return "inhomogeneous"
    if not (euler_operator(f) - f * deg).is_zero():
        raise ArithmeticError(f"Euler identity fails for degree {deg}: {f}")
    return deg


def is_holomorphic(f: KelvinFunction) -> bool:
    return all(dbar(f, j).is_zero() for j in range(1, f.n + 1))


def is_harmonic(f: KelvinFunction) -> bool:
    return laplacian(f).is_zero()


@dataclass(frozen=True)
class KelvinVector:
    """Row ``(g_1, ..., g_n)`` of Kelvin functions."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("empty vector")
        n = comps[0].n
        if len(comps) != n or any(c.n != n for c in comps):
            raise ValueError("a KelvinVector in C^n must have exactly n components of dimension n")
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return len(self.components)

    def __getitem__(self, j: int) -> KelvinFunction:
        """Component ``g_j`` for ``1 <= j <= n``."""
        if not 1 <= j <= self.n:
            raise IndexError(j)
        return self.components[j - 1]

    def __iter__(self):
        return iter(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def adjoint_divergence(self) -> KelvinFunction:
        """``sum_j dbar_star(g_j, j)``; zero means the row solves the adjoint CR system."""
        total = KelvinFunction.zero(self.n)
        for j, g in enumerate(self.components, start=1):
            total = total + dbar_star(g, j)
        return total

    def scale(self, c) -> "KelvinVector":
        return KelvinVector(tuple(g * c for g in self.components))

    def __add__(self, other: "KelvinVector") -> "KelvinVector":
        return KelvinVector(tuple(a + b for a, b in zip(self.components, other.components)))


def gradient_dbar(f: KelvinFunction) -> KelvinVector:
    return KelvinVector(tuple(dbar(f, j) for j in range(1, f.n + 1)))


def make_annihilator(p: Sequence[int], q: Sequence[int], n: int) -> KelvinVector:
    """``dbar(2 conj(z)**q z**p / |z|**(2n + 2|q| - 2))``."""
    p, q = MultiIndex(p), MultiIndex(q)
    if len(p) != n or len(q) != n:
        raise ValueError("multi-index dimension must equal n")
    m = n + q.order - 1
    potential = KelvinFunction.monomial(p, q, m, coeff=2)
    return gradient_dbar(potential)


def make_contrast(p: Sequence[int], n: int) -> KelvinVector:
    """``dbar(z**p / |z|**(2n + 2|p| - 2))``, the Kelvin extension of ``z**p`` differentiated."""
    p = MultiIndex(p)
    if len(p) != n:
        raise ValueError("multi-index dimension must equal n")
    return gradient_dbar(KelvinFunction.monomial(p, None, n + p.order - 1))


# -- numerics -------------------------------------------------------------

def evaluate(f: KelvinFunction, z) -> np.ndarray | complex:
    """Float value of ``f`` at one point (returns complex) or at an (N, n) array."""
    pts = np.asarray(z, dtype=complex)
    single = pts.ndim == 1
    pts = as_points(pts)
    if pts.shape[1] != f.n:
        raise ValueError(f"point dimension {pts.shape[1]} does not match n={f.n}")
    r2 = np.sum(pts.real ** 2 + pts.imag ** 2, axis=1)
    if f.max_m > 0 and np.any(r2 == 0):
        raise ZeroDivisionError("Kelvin term evaluated at the origin")
    conj = pts.conj()
    total = np.zeros(len(pts), dtype=complex)
    comp = np.zeros(len(pts), dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_r2 = np.where(r2 > 0, 1.0 / np.where(r2 > 0, r2, 1.0), 0.0)
    for (p, q, m), c in sorted(f._terms.items()):
        val = np.full(len(pts), complex(c))
        for j in range(f.n):
            if p[j]:
                val = val * pts[:, j] ** p[j]
            if q[j]:
                val = val * conj[:, j] ** q[j]
        if m:
            val = val * inv_r2 ** m
        # Neumaier compensated accumulation
        t = total + val
        big = np.abs(total) >= np.abs(val)
        comp += np.where(big, (total - t) + val, (val - t) + total)
        total = t
    out = total + comp
    return complex(out[0]) if single else out


def wirtinger_fd(func: Callable[[np.ndarray], complex], z, j: int, step: float = 1e-5,
                 conjugate: bool = True) -> complex:
    """Central-difference Wirtinger derivative of a scalar function at one point.

    ``conjugate=True`` gives ``d/d conj(z_j)``, otherwise ``d/dz_j``.
    """
    z = np.asarray(z, dtype=complex)
    e = np.zeros_like(z)
    e[j - 1] = 1.0
    dx = (func(z + step * e) - func(z - step * e)) / (2 * step)
    dy = (func(z + 1j * step * e) - func(z - 1j * step * e)) / (2 * step)
    return 0.5 * (dx + 1j * dy) if conjugate else 0.5 * (dx - 1j * dy)
