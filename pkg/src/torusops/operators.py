"""Differential operators with trigonometric-polynomial coefficients.

``L = sum_alpha T_alpha(x) D^alpha`` with ``D = -i d/dx``, so that
``D^alpha exp(i k.x) = k^alpha exp(i k.x)`` and ``d/dx1`` has symbol
``i xi1``.  Collecting by frequency gives
``L = sum_n exp(i n.x) P_n(D)`` with ``P_n(xi) = sum_alpha (T_alpha)_n xi^alpha``
and ``(L u)_k = sum_n P_n(k - n) u_{k-n}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

from .gaussian import GaussianRational, I, as_gaussian
from .hypo import integer_lattice_zeros
from .series import Box, LatticeIndex, TrigSeries, shift
from .symbols import SymbolPolynomial

__all__ = [
    "TorusOperator",
    "to_freq_form",
    "apply",
    "apply_alpha_form",
    "Assumption1",
    "Assumption1Result",
    "check_assumption1",
    "check_weak_assumption",
    "mizohata_operator",
    "laplacian",
    "d1",
    "d2",
]


def _term_key(alpha) -> tuple[int, int]:
    a1, a2 = int(alpha[0]), int(alpha[1])
    if a1 < 0 or a2 < 0:
        raise ValueError("multi-index entries must be nonnegative")
    return (a1, a2)


def to_freq_form(alpha_form: Mapping[tuple[int, int], TrigSeries]) -> dict[LatticeIndex, SymbolPolynomial]:
    """``P_n(xi) = sum_alpha (T_alpha)_n xi^alpha``."""
    collected: dict[LatticeIndex, list] = {}
    for alpha, t in alpha_form.items():
        if not t.is_finite:
            raise ValueError(f"coefficient of D^{alpha} is not a trigonometric polynomial")
        for n, c in t.items():
            collected.setdefault(n, []).append((alpha, c))
    out = {}
    for n, terms in collected.items():
        p = SymbolPolynomial(terms)
        if p:
            out[n] = p
    return out


class TorusOperator:
    """Immutable operator held in both the alpha form and the frequency form."""

    __slots__ = ("alpha_form", "freq_form", "s1", "s2")

    def __init__(self, alpha_form: Mapping | Iterable = ()):
        items = alpha_form.items() if isinstance(alpha_form, Mapping) else alpha_form
        store: dict[tuple[int, int], TrigSeries] = {}
        for alpha, t in items:
            key = _term_key(alpha)
            if not isinstance(t, TrigSeries):
                t = TrigSeries({(0, 0): as_gaussian(t)})
            if not t.is_finite:
                raise ValueError(f"coefficient of D^{key} must be a trigonometric polynomial")
            store[key] = store[key] + t if key in store else t
        self.alpha_form = {k: v for k, v in sorted(store.items()) if v}
        self.freq_form = to_freq_form(self.alpha_form)
        radii = [t.radius() for t in self.alpha_form.values()]
        self.s1 = max((r[0] for r in radii), default=0)
        self.s2 = max((r[1] for r in radii), default=0)

    @classmethod
    def from_freq_form(cls, freq_form: Mapping) -> TorusOperator:
        alpha: dict[tuple[int, int], dict] = {}
        for n, p in freq_form.items():
            for a, c in p.terms.items():
                alpha.setdefault(a, {})[(n[0], n[1])] = c
        return cls({a: TrigSeries(cs) for a, cs in alpha.items()})

    @classmethod
    def constant_coefficient(cls, symbol: SymbolPolynomial) -> TorusOperator:
        return cls.from_freq_form({(0, 0): symbol})

    def __eq__(self, other):
        if not isinstance(other, TorusOperator):
            return NotImplemented
        return self.freq_form == other.freq_form

    def __hash__(self):
        return hash(frozenset(self.freq_form.items()))

    def __repr__(self):
        return f"TorusOperator(terms={len(self.alpha_form)}, s=({self.s1}, {self.s2}))"

    def __add__(self, other: TorusOperator) -> TorusOperator:
        return TorusOperator(list(self.alpha_form.items()) + list(other.alpha_form.items()))

    def __mul__(self, scalar) -> TorusOperator:
        c = as_gaussian(scalar)
        return TorusOperator({a: t * c for a, t in self.alpha_form.items()})

    __rmul__ = __mul__

    def times_exponential(self, n) -> TorusOperator:
        """The operator ``exp(i n.x) * L``."""
        return TorusOperator({a: shift(t, n) for a, t in self.alpha_form.items()})

    @property
    def is_constant_coefficient(self) -> bool:
        return set(self.freq_form) <= {(0, 0)}

    @property
    def order(self) -> int:
        return max((p.degree for p in self.freq_form.values()), default=-1)

    def symbol(self, n=(0, 0)) -> SymbolPolynomial:
        return self.freq_form.get(LatticeIndex(n[0], n[1]), SymbolPolynomial())

    def offsets(self) -> tuple[int, int, int, int]:
        if not self.freq_form:
            return (0, 0, 0, 0)
        n1 = [n[0] for n in self.freq_form]
        n2 = [n[1] for n in self.freq_form]
        return (min(n1), max(n1), min(n2), max(n2))

    def output_box(self, box: Box) -> Box:
        """Largest box on which ``L u`` is complete when ``u`` is complete on ``box``."""
        return box.window(*self.offsets())

    # -- serialisation: the alpha form is the ground truth ------------------

    def to_obj(self) -> dict:
        return {
            "terms": [{"alpha": list(a), "coeff": t.to_obj()} for a, t in self.alpha_form.items()]
        }

    @classmethod
    def from_obj(cls, obj: Mapping) -> TorusOperator:
        terms = []
        for entry in obj["terms"]:
            t = TrigSeries.from_obj(entry["coeff"])
            if not t.is_finite:
                raise ValueError(f"coefficient of D^{entry['alpha']} must have box null (finite)")
            terms.append((tuple(entry["alpha"]), t))
        return cls(terms)

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> TorusOperator:
        return cls.from_obj(json.loads(text))


def apply(L: TorusOperator, u: TrigSeries) -> TrigSeries:
    """``(L u)_k = sum_n P_n(k - n) u_{k-n}``, exact.

    The result is complete on ``u``'s box shrunk by the frequency offsets of
    ``L``; a ValueError is raised when that box is empty.
    """
    box = None if u.box is None else L.output_box(u.box)
    out: dict[LatticeIndex, GaussianRational] = {}
    zero = GaussianRational(0)
    for k, c in u._coeffs.items():
        for n, p in L.freq_form.items():
            key = LatticeIndex(k[0] + n[0], k[1] + n[1])
            if box is not None and key not in box:
                continue
            v = p(k[0], k[1])
            if v:
                out[key] = out.get(key, zero) + v * c
    return TrigSeries._raw({k: v for k, v in out.items() if v}, box)


def apply_alpha_form(L: TorusOperator, u: TrigSeries) -> TrigSeries:
    """Independent route: ``sum_alpha T_alpha * (D^alpha u)`` via convolution."""
    from .series import add, multiply

    box = None if u.box is None else L.output_box(u.box)
    total = TrigSeries({}, box)
    for (a1, a2), t in L.alpha_form.items():
        du = TrigSeries._raw(
            {k: c * (k[0] ** a1) * (k[1] ** a2) for k, c in u._coeffs.items() if (k[0] ** a1) * (k[1] ** a2)},
            u.box,
        )
        total = add(total, multiply(t, du))
    if box is not None:
        total = total.restrict(box)
    return total


# -- nonvanishing of the symbols on the lattice -------------------------------


class Assumption1(str, Enum):
    HOLDS_CERTIFIED = "HOLDS_CERTIFIED"
    HOLDS_ON_BOX = "HOLDS_ON_BOX"
    FAILS = "FAILS"


@dataclass(frozen=True)
class Assumption1Result:
    status: Assumption1
    n: LatticeIndex | None = None
    m: LatticeIndex | None = None
    uncertified: tuple[LatticeIndex, ...] = ()

    def to_obj(self) -> dict:
        return {
            "status": self.status.value,
            "n": None if self.n is None else list(self.n),
            "m": None if self.m is None else list(self.m),
            "uncertified": [list(n) for n in self.uncertified],
        }


def _positive_by_inspection(p: SymbolPolynomial) -> bool:
    """Sufficient test for no real zeros: even monomials, one sign, nonzero constant."""
    if not p.is_real() or (0, 0) not in p.terms:
        return False
    signs = {c.re > 0 for c in p.terms.values()}
    return len(signs) == 1 and all(a % 2 == 0 and b % 2 == 0 for a, b in p.terms)


def _symbol_zero(p: SymbolPolynomial, search_box: Box) -> tuple[bool, LatticeIndex | None]:
    """``(certified, witness)`` for integer zeros of one symbol."""
    if p.degree == 0:
        return True, None
    if p.is_homogeneous():
        # the origin is a trivial zero of every homogeneous symbol and is excluded
        rays = integer_lattice_zeros(p)
        return True, (rays[0] if rays else None)
    if _positive_by_inspection(p):
        return True, None
    for m in search_box:
        if not p(m[0], m[1]):
            return False, m
    return False, None


def check_assumption1(L: TorusOperator, search_box: Box | None = None) -> Assumption1Result:
    """For every ``n`` decide whether ``P_n(m) = 0`` has integer solutions ``m``.

    Homogeneous symbols are decided exactly (nonzero ``m``); positive
    even symbols are certified by inspection; anything else is scanned
    over ``search_box`` and reported ``HOLDS_ON_BOX`` at best.
    """
    search_box = search_box or Box.symmetric(16)
    uncertified = []
    for n, p in sorted(L.freq_form.items()):
        certified, witness = _symbol_zero(p, search_box)
        if witness is not None:
            return Assumption1Result(Assumption1.FAILS, n=n, m=witness)
        if not certified:
            uncertified.append(n)
    if uncertified:
        return Assumption1Result(Assumption1.HOLDS_ON_BOX, uncertified=tuple(uncertified))
    return Assumption1Result(Assumption1.HOLDS_CERTIFIED)


def check_weak_assumption(L: TorusOperator, m) -> bool:
    """True iff ``P_n(m) != 0`` for some ``n``."""
    return any(p(m[0], m[1]) for p in L.freq_form.values())


# -- common operators ------------------------------------------------------------


def d1() -> TorusOperator:
    """``d/dx1 = i D1``."""
    return TorusOperator({(1, 0): I})


def d2() -> TorusOperator:
    return TorusOperator({(0, 1): I})


def laplacian() -> TorusOperator:
    """``d^2/dx1^2 + d^2/dx2^2 = -(D1^2 + D2^2)``."""
    return TorusOperator({(2, 0): -1, (0, 2): -1})


def mizohata_operator() -> TorusOperator:
    """Periodic Mizohata operator ``d/dx1 + i sin(x1) d/dx2``.

    ``i sin x1 = (e^{ix1} - e^{-ix1}) / 2`` and ``d/dx2 = i D2``, so the
    ``D2`` coefficient is ``(i/2) e^{ix1} - (i/2) e^{-ix1}``.
    """
    half_i = GaussianRational(0, Fraction(1, 2))
    return TorusOperator(
        {
            (1, 0): TrigSeries({(0, 0): I}),
            (0, 1): TrigSeries({(1, 0): half_i, (-1, 0): -half_i}),
        }
    )
