"""Univariate polynomials over Q: rational roots, squarefree decomposition,
Sturm real-root isolation and Kronecker factorization.

Everything is exact.  Coefficients are stored ascending by degree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

__all__ = [
    "UPoly",
    "DegreeCapExceeded",
    "rational_roots",
    "squarefree_decomposition",
    "sturm_sequence",
    "count_real_roots",
    "isolate_real_roots",
    "RealRoot",
    "factor_over_Q",
    "irreducible_over_Q",
    "Irreducibility",
]


class DegreeCapExceeded(ValueError):
    """Factorization refused because the degree exceeds the configured cap."""


class UPoly:
    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Fraction(x) for x in coeffs]
        while c and not c[-1]:
            c.pop()
        self.c: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def x(cls) -> UPoly:
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots: Iterable) -> UPoly:
        return reduce(lambda p, r: p * cls([-Fraction(r), 1]), roots, cls([1]))

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.c) - 1

    @property
    def lc(self) -> Fraction:
        return self.c[-1] if self.c else Fraction(0)

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, UPoly):
            return self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.c == UPoly([other]).c
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"UPoly({[str(x) for x in self.c]})"

    def __str__(self):
        if not self.c:
            return "0"
        parts = []
        for i in range(len(self.c) - 1, -1, -1):
            a = self.c[i]
            if not a:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(a) == 1:
                coef = "-" if a < 0 else ""
            else:
                coef = str(a) + ("*" if mono else "")
            parts.append(coef + mono)
        return " + ".join(parts).replace("+ -", "- ")

    def __call__(self, x):
        acc = Fraction(0) if not isinstance(x, int) else 0
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.c), len(other.c))
        a = self.c + (Fraction(0),) * (n - len(self.c))
        b = other.c + (Fraction(0),) * (n - len(other.c))
        return UPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return UPoly(-x for x in self.c)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if not self.c or not other.c:
            return UPoly()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    out[i + j] += a * b
        return UPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return reduce(lambda p, _: p * self, range(n), UPoly([1]))

    def __divmod__(self, other):
        other = _as_poly(other)
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        dq = len(r) - len(other.c)
        if dq < 0:
            return UPoly(), UPoly(r)
        q = [Fraction(0)] * (dq + 1)
        lc = other.c[-1]
        for i in range(dq, -1, -1):
            t = r[i + len(other.c) - 1] / lc
            q[i] = t
            if t:
                for j, b in enumerate(other.c):
                    r[i + j] -= t * b
        return UPoly(q), UPoly(r[: len(other.c) - 1])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def derivative(self) -> UPoly:
        return UPoly(i * a for i, a in enumerate(self.c) if i)

    def monic(self) -> UPoly:
        if not self.c:
            return self
        return UPoly(a / self.c[-1] for a in self.c)

    def divides(self, other: UPoly) -> bool:
        return not (other % self)

    def primitive(self) -> tuple[int, ...]:
        """Primitive integer coefficient vector with positive leading coefficient."""
        if not self.c:
            return ()
        den = lcm(*(a.denominator for a in self.c))
        ints = [int(a * den) for a in self.c]
        g = reduce(gcd, ints)
        if ints[-1] < 0:
            g = -g
        return tuple(i // g for i in ints)

    def sign_at(self, x: Fraction) -> int:
        v = self(x)
        return (v > 0) - (v < 0)

    def sign_at_infinity(self, positive: bool) -> int:
        if not self.c:
            return 0
        s = 1 if self.lc > 0 else -1
        if not positive and self.degree % 2:
            s = -s
        return s


def _as_poly(p) -> UPoly:
    return p if isinstance(p, UPoly) else UPoly([p])


def poly_gcd(a: UPoly, b: UPoly) -> UPoly:
    """Monic gcd (zero if both are zero)."""
    while b:
        a, b = b, a % b
    return a.monic()


# -- rational roots ------------------------------------------------------


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(q: UPoly) -> list[Fraction]:
    """Distinct rational roots, ascending, via the rational-root theorem."""
    if not q:
        raise ValueError("zero polynomial has every number as a root")
    ints = list(q.primitive())
    roots = set()
    while ints and ints[0] == 0:
        roots.add(Fraction(0))
        ints.pop(0)
    if len(ints) <= 1:
        return sorted(roots)
    p0 = UPoly(ints)
    for num in _divisors(ints[0]):
        for den in _divisors(ints[-1]):
            for s in (1, -1):
                r = Fraction(s * num, den)
                if r not in roots and not p0(r):
                    roots.add(r)
    return sorted(roots)


def squarefree_decomposition(q: UPoly) -> list[tuple[UPoly, int]]:
    """Yun's algorithm: monic squarefree coprime factors with multiplicities.

    ``q = lc * prod f_i ** i``; constant factors are omitted.
    """
    if not q:
        raise ValueError("zero polynomial")
    out = []
    a = q.monic()
    b = a.derivative()
    c = poly_gcd(a, b)
    w = a // c
    y = b // c if c.degree >= 0 else b
    i = 1
    while w.degree > 0:
        z = y - w.derivative()
        g = poly_gcd(w, z) if z else w.monic()
        if g.degree > 0:
            out.append((g, i))
        w = w // g
        y = z // g
        i += 1
    return out


# -- Sturm sequences -------------------------------------------------------


def sturm_sequence(q: UPoly) -> list[UPoly]:
    seq = [q, q.derivative()]
    while seq[-1].degree > 0:
        r = -(seq[-2] % seq[-1])
        if not r:
            break
        seq.append(r)
    return seq


def _variations(signs: Sequence[int]) -> int:
    s = [x for x in signs if x]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def _var_at(seq: list[UPoly], x) -> int:
    if x == "+inf":
        return _variations([p.sign_at_infinity(True) for p in seq])
    if x == "-inf":
        return _variations([p.sign_at_infinity(False) for p in seq])
    return _variations([p.sign_at(x) for p in seq])


def count_real_roots(q: UPoly, lo=None, hi=None) -> int:
    """Distinct real roots in ``(lo, hi]``; ``None`` bounds mean infinite."""
    if q.degree <= 0:
        return 0
    seq = sturm_sequence(q)
    a = "-inf" if lo is None else Fraction(lo)
    b = "+inf" if hi is None else Fraction(hi)
    return _var_at(seq, a) - _var_at(seq, b)


def cauchy_bound(q: UPoly) -> Fraction:
    """All complex roots satisfy ``|z| < bound``."""
    lc = abs(q.lc)
    return 1 + max((abs(a) / lc for a in q.c[:-1]), default=Fraction(0))


@dataclass(frozen=True)
class RealRoot:
    """A real root isolated in ``(lo, hi]``, or exactly ``lo == hi``."""

    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


def isolate_real_roots(q: UPoly, width=Fraction(1, 2)) -> list[RealRoot]:
    """Isolate the distinct real roots of ``q`` in intervals of width ``<= width``.

    Bisection driven by Sturm counts.  Rational roots hit by a bisection
    point are returned as degenerate intervals.
    """
    if q.degree <= 0:
        return []
    sq = q // poly_gcd(q, q.derivative())
    seq = sturm_sequence(sq)
    width = Fraction(width)
    b = cauchy_bound(sq)

    def count(lo, hi):
        return _var_at(seq, lo) - _var_at(seq, hi)

    out: list[RealRoot] = []
    stack = [(-b, b)]
    while stack:
        lo, hi = stack.pop()
        n = count(lo, hi)
        if n == 0:
            continue
        if n == 1 and hi - lo <= width:
            if not sq(hi):
                out.append(RealRoot(hi, hi))
            else:
                out.append(RealRoot(lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    return sorted(out, key=lambda r: r.lo)


# -- factorization over Q ------------------------------------------------------


def _int_poly(coeffs: Sequence[int]) -> UPoly:
    return UPoly(coeffs)


def _lagrange(xs: Sequence[int], ys: Sequence[int]) -> UPoly:
    result = UPoly()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if not yi:
            continue
        term = UPoly([yi])
        for j, xj in enumerate(xs):
            if j != i:
                term = term * UPoly([Fraction(-xj, xi - xj), Fraction(1, xi - xj)])
        result = result + term
    return result


def _kronecker_factor(f: UPoly, d: int) -> UPoly | None:
    """Find a primitive integer factor of ``f`` of exact degree ``d``, or None.

    ``f`` must be a primitive integer polynomial without rational roots
    when ``d > 1`` (degree-1 factors are found by the rational-root test).
    """
    # evaluation points with small nonzero values keep the divisor search small
    candidates = sorted(
        (x for x in range(-3 * (d + 4), 3 * (d + 4) + 1) if f(x)),
        key=lambda x: (len(_divisors(int(f(x)))), abs(x)),
    )
    if len(candidates) < d + 1:
        return None
    xs = sorted(candidates[: d + 1])
    divs = []
    for x in xs:
        ds = _divisors(int(f(x)))
        divs.append(ds)
    for choice in itertools.product(*divs):
        for signs in itertools.product((1, -1), repeat=d):
            # leading sign normalised: first value keeps its sign
            ys = [choice[0]] + [s * c for s, c in zip(signs, choice[1:])]
            g = _lagrange(xs, ys)
            if g.degree != d:
                continue
            if any(a.denominator != 1 for a in g.c):
                continue
            if g.divides(f):
                return UPoly(g.primitive())
    return None


def factor_over_Q(q: UPoly, degree_cap: int = 8) -> tuple[Fraction, list[tuple[UPoly, int]]]:
    """Complete factorization ``q = content * prod g_i ** e_i`` into
    irreducible primitive integer polynomials ``g_i``.

    Raises :class:`DegreeCapExceeded` when a squarefree part of degree
    above ``degree_cap`` would need a Kronecker search.
    """
    if not q:
        raise ValueError("zero polynomial")
    prim = UPoly(q.primitive())
    content = q.lc / prim.lc
    factors: list[tuple[UPoly, int]] = []
    for part, mult in squarefree_decomposition(prim):
        for g in _factor_squarefree(UPoly(part.primitive()), degree_cap):
            factors.append((g, mult))
    factors.sort(key=lambda t: (t[0].degree, t[0].c))
    return content, factors


def _factor_squarefree(f: UPoly, degree_cap: int) -> list[UPoly]:
    out = []
    for r in rational_roots(f):
        lin = UPoly([-r.numerator, r.denominator])
        out.append(lin)
        f = UPoly((f // lin).primitive())
    pending = [f] if f.degree > 0 else []
    while pending:
        g = pending.pop()
        if g.degree <= 3:
            # no rational roots left, so degree 2 and 3 are irreducible
            out.append(g)
            continue
        if g.degree > degree_cap:
            raise DegreeCapExceeded(f"degree {g.degree} exceeds factorization cap {degree_cap}")
        found = None
        for d in range(2, g.degree // 2 + 1):
            found = _kronecker_factor(g, d)
            if found is not None:
                break
        if found is None:
            out.append(g)
        else:
            pending.append(found)
            pending.append(UPoly((g // found).primitive()))
    return out


@dataclass(frozen=True)
class Irreducibility:
    irreducible: bool | None
    factor: UPoly | None = None
    reason: str = ""

    @property
    def inconclusive(self) -> bool:
        return self.irreducible is None


def irreducible_over_Q(q: UPoly, degree_cap: int = 8) -> Irreducibility:
    """Decide irreducibility over Q; a reducible verdict carries a proper factor."""
    if q.degree < 1:
        raise ValueError("irreducibility needs degree >= 1")
    if q.degree == 1:
        return Irreducibility(True, reason="linear")
    try:
        _, factors = factor_over_Q(q, degree_cap)
    except DegreeCapExceeded as exc:
        return Irreducibility(None, reason=str(exc))
    if len(factors) == 1 and factors[0][1] == 1:
        return Irreducibility(True, reason="no proper factor in the complete search")
    return Irreducibility(False, factor=factors[0][0], reason="proper factor found")
