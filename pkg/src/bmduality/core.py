"""Exact scalars and multi-indices shared by every module.

Two arithmetic modes coexist: exact Gaussian rationals (``ExactComplex``)
for the symbolic algebra, and plain Python/numpy complex doubles for
quadrature.  ``fractions.Fraction`` is the exact rational type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

ExactRational = Fraction

Number = Union[int, Fraction, "ExactComplex"]


def as_rational(x) -> Fraction:
    """Exact rational from int, Fraction, decimal string or float.

    Floats go through their shortest decimal repr, so ``0.8`` becomes
    ``4/5`` rather than the nearest binary fraction.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class ExactComplex:
    """Gaussian rational ``re + i*im`` with Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = as_rational(re)
        self.im = as_rational(im)

    @classmethod
    def coerce(cls, value) -> "ExactComplex":
        if isinstance(value, ExactComplex):
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        return cls(value)

    @classmethod
    def parse(cls, re: str, im: str = "0") -> "ExactComplex":
        return cls(Fraction(re), Fraction(im))

    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re * o.re - self.im * o.im,
                            self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by exact zero")
        num = self * o.conjugate()
        return ExactComplex(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return ExactComplex(1) / (self ** (-k))
        result, base = ExactComplex(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    def abs_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"ExactComplex({self.re})"
        return f"ExactComplex({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


def _coerce_or_none(value):
    if isinstance(value, ExactComplex):
        return value
    if isinstance(value, (int, Fraction)):
        return ExactComplex(value)
    if isinstance(value, complex):
        return ExactComplex(value.real, value.imag)
    return None


I = ExactComplex(0, 1)
ZERO = ExactComplex(0)
ONE = ExactComplex(1)


@dataclass(frozen=True)
class PiMultiple:
    """Exact value ``coeff * pi**power``.

    Sphere moments and every exact pairing are of this form
    with ``power == n``.
    """

    coeff: ExactComplex
    power: int

    def __post_init__(self):
        object.__setattr__(self, "coeff", ExactComplex.coerce(self.coeff))

    def __add__(self, other: "PiMultiple") -> "PiMultiple":
        if not isinstance(other, PiMultiple):
            return NotImplemented
        if not other.coeff:
            return self
        if not self.coeff:
            return other
        if other.power != self.power:
            raise ValueError("cannot add different powers of pi exactly")
        return PiMultiple(self.coeff + other.coeff, self.power)

    def __sub__(self, other: "PiMultiple") -> "PiMultiple":
        return self + (-other)

    def __neg__(self):
        return PiMultiple(-self.coeff, self.power)

    def scale(self, factor) -> "PiMultiple":
        return PiMultiple(self.coeff * ExactComplex.coerce(factor), self.power)

    def conjugate(self) -> "PiMultiple":
        return PiMultiple(self.coeff.conjugate(), self.power)

    def __bool__(self):
        return bool(self.coeff)

    def __complex__(self):
        return complex(self.coeff) * math.pi ** self.power

    def __str__(self):
        if not self.coeff:
            return "0"
        return f"{self.coeff}*pi^{self.power}"


class MultiIndex(tuple):
    """Tuple of non-negative exponents with elementwise ``+``/``-``.

    Ordering is the inherited lexicographic tuple order, used only to make
    iteration deterministic.
    """

    def __new__(cls, exps: Iterable[int] = ()):
        exps = tuple(exps)
        for e in exps:
            if not isinstance(e, (int, np.integer)) or e < 0:
                raise ValueError(f"multi-index entries must be non-negative integers, got {exps!r}")
        return super().__new__(cls, (int(e) for e in exps))

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def unit(cls, j: int, n: int) -> "MultiIndex":
        """``e_j`` for a component index ``1 <= j <= n``."""
        if not 1 <= j <= n:
            raise ValueError(f"component index {j} outside 1..{n}")
        return cls(1 if k == j - 1 else 0 for k in range(n))

    @property
    def order(self) -> int:
        return sum(self)

    def __add__(self, other):
        if len(other) != len(self):
            raise ValueError("multi-index dimension mismatch")
        return MultiIndex(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        if len(other) != len(self):
            raise ValueError("multi-index dimension mismatch")
        return MultiIndex(a - b for a, b in zip(self, other))

    def factorial(self) -> int:
        return math.prod(math.factorial(e) for e in self)

    def __repr__(self):
        return f"MultiIndex({tuple(self)!r})"


def multi_indices(n: int, order: int) -> list[MultiIndex]:
    """All multi-indices of dimension ``n`` and exact order, lexicographically descending."""
    if n == 0:
        return [MultiIndex()] if order == 0 else []
    out = []
    for first in range(order, -1, -1):
        for rest in multi_indices(n - 1, order - first):
            out.append(MultiIndex((first,) + tuple(rest)))
    return out


def multi_indices_upto(n: int, max_order: int) -> list[MultiIndex]:
    return [s for k in range(max_order + 1) for s in multi_indices(n, k)]


@dataclass(frozen=True)
class CPoint:
    """Point of C^n, with ``z_j = x_j + i x_{n+j}``."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(complex(c) for c in self.coords)
        if not coords:
            raise ValueError("a point needs n >= 1 coordinates")
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in coords):
            raise ValueError("point coordinates must be finite")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_real(cls, x: Sequence[float]) -> "CPoint":
        x = list(x)
        if len(x) % 2:
            raise ValueError("real view must have even length 2n")
        n = len(x) // 2
        return cls(tuple(complex(x[j], x[n + j]) for j in range(n)))

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def real(self) -> tuple:
        return tuple(c.real for c in self.coords) + tuple(c.imag for c in self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype or complex)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, j):
        return self.coords[j]

    def __iter__(self):
        return iter(self.coords)


def as_points(z) -> np.ndarray:
    """Coerce a CPoint, a sequence of coordinates or an (N, n) array to a 2-D complex array."""
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError("points must be a single point or an (N, n) array")
    return arr


def monomial_eval(p: Sequence[int], q: Sequence[int], z) -> complex:
    """``z**p * conj(z)**q`` at a single point."""
    coords = tuple(complex(c) for c in z)
    if not (len(p) == len(q) == len(coords)):
        raise ValueError(f"dimension mismatch: |p|={len(p)}, |q|={len(q)}, n={len(coords)}")
    out = complex(1.0)
    for zj, pj, qj in zip(coords, p, q):
        if pj:
            out *= zj ** pj
        if qj:
            out *= zj.conjugate() ** qj
    return out


def norm_sq(z) -> float:
    return math.fsum(c.real * c.real + c.imag * c.imag for c in (complex(v) for v in z))
