"""Bivariate symbol polynomials with Gaussian-rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .gaussian import GaussianRational, as_gaussian, parse_rational
from .upoly import UPoly

__all__ = ["SymbolPolynomial", "parse_term_list", "format_term_list"]


class SymbolPolynomial:
    """``sum c_(d1,d2) xi1^d1 xi2^d2``; zero coefficients are never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        store: dict[tuple[int, int], GaussianRational] = {}
        for (d1, d2), c in items:
            if d1 < 0 or d2 < 0:
                raise ValueError("exponents must be nonnegative")
            key = (int(d1), int(d2))
            c = store.get(key, GaussianRational(0)) + as_gaussian(c)
            if c:
                store[key] = c
            else:
                store.pop(key, None)
        self.terms = store

    @classmethod
    def xi1(cls) -> SymbolPolynomial:
        return cls({(1, 0): 1})

    @classmethod
    def xi2(cls) -> SymbolPolynomial:
        return cls({(0, 1): 1})

    @classmethod
    def constant(cls, c) -> SymbolPolynomial:
        return cls({(0, 0): c})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, SymbolPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"SymbolPolynomial({format_term_list(self)!r})"

    @property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(a + b for a, b in self.terms)

    def is_homogeneous(self) -> bool:
        return len({a + b for a, b in self.terms}) <= 1

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    def __call__(self, x1, x2) -> GaussianRational:
        total = GaussianRational(0)
        for (a, b), c in self.terms.items():
            total = total + c * (x1 ** a) * (x2 ** b)
        return total

    def evaluate(self, k) -> GaussianRational:
        return self(k[0], k[1])

    def __add__(self, other: SymbolPolynomial) -> SymbolPolynomial:
        return SymbolPolynomial(list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self):
        return SymbolPolynomial({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SymbolPolynomial):
            c = as_gaussian(other)
            return SymbolPolynomial({k: c * v for k, v in self.terms.items()})
        out = []
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                out.append(((a1 + a2, b1 + b2), c1 * c2))
        return SymbolPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = SymbolPolynomial.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def real_part(self) -> SymbolPolynomial:
        return SymbolPolynomial({k: c.re for k, c in self.terms.items()})

    def imag_part(self) -> SymbolPolynomial:
        return SymbolPolynomial({k: c.im for k, c in self.terms.items()})

    def restrict_x2_one(self) -> UPoly:
        """``P(x, 1)`` for a real polynomial."""
        if not self.is_real():
            raise ValueError("restriction to a univariate rational polynomial needs real coefficients")
        deg = max((a for a, _ in self.terms), default=0)
        coeffs = [Fraction(0)] * (deg + 1)
        for (a, _), c in self.terms.items():
            coeffs[a] += c.re
        return UPoly(coeffs)

    def sorted_terms(self) -> list[tuple[tuple[int, int], GaussianRational]]:
        return sorted(self.terms.items(), key=lambda t: (-(t[0][0] + t[0][1]), -t[0][0], t[0][1]))


def parse_term_list(text: str) -> SymbolPolynomial:
    """Parse ``"c a1 a2, c a1 a2, ..."``; ``c`` is ``p``, ``p/q`` or ``re:im``."""
    terms = []
    col = 1
    for chunk in text.split(","):
        fields = chunk.split()
        if len(fields) != 3:
            raise ValueError(f"column {col}: expected 'c a1 a2', got {chunk.strip()!r}")
        c_text, a1, a2 = fields
        try:
            if ":" in c_text:
                re, im = c_text.split(":")
                c = GaussianRational(parse_rational(re), parse_rational(im))
            else:
                c = GaussianRational(parse_rational(c_text))
            terms.append(((int(a1), int(a2)), c))
        except ValueError as exc:
            raise ValueError(f"column {col}: {exc}") from exc
        col += len(chunk) + 1
    return SymbolPolynomial(terms)


def format_term_list(p: SymbolPolynomial) -> str:
    def fmt(q: Fraction) -> str:
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"

    parts = []
    for (a, b), c in p.sorted_terms():
        cs = fmt(c.re) if c.is_real() else f"{fmt(c.re)}:{fmt(c.im)}"
        parts.append(f"{cs} {a} {b}")
    return ", ".join(parts)
