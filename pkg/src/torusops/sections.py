"""Linear sections of the space of formal series, via growth envelopes.

A principal section is ``{u : |u_k| <= C w(k)}`` for a positive envelope
``w``.  Envelopes are built from atoms

    w(k) = (1 + k.k)^a * exp(b1 |k1| + b2 |k2|) * (|k1|!)^c1 * (|k2|!)^c2

combined with pointwise ``max`` (sup of sections) and ``min`` (inf of
sections).  All evaluation is done on ``log w``; max/min only select
values, so the lattice identities hold exactly at every probe point.

Textual grammar (see ``docs/envelope_grammar.md``)::

    expr  := atom | "max" "(" expr {"," expr} ")" | "min" "(" expr {"," expr} ")"
    atom  := "atom" "(" rat "," rat "," rat "," rat "," rat ")"
           | "(" rat "," rat "," rat "," rat "," rat ")"
    rat   := ["-"] digits ["/" digits]
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable

from .gaussian import GaussianRational
from .growth import SpaceTag
from .linsolve import InconsistentSystem, SparseSystem
from .operators import (
    Assumption1,
    TorusOperator,
    check_assumption1,
    check_weak_assumption,
    mizohata_operator,
)
from .series import Box, LatticeIndex, TrigSeries

__all__ = [
    "AtomEnvelope",
    "Max",
    "Min",
    "EnvelopeExpr",
    "parse_envelope",
    "atom_leq",
    "expr_leq",
    "probe_leq",
    "simplify",
    "Section",
    "principal",
    "section_sup",
    "section_inf",
    "section_for_tag",
    "RegularityVerdict",
    "more_regular",
    "dual_space",
    "DualMembership",
    "dual_membership",
    "operator_image",
    "solution_section",
    "pointwise_equal",
    "probe_points",
]


def _fmt(q: Fraction) -> str:
    return str(q)


@lru_cache(maxsize=4096)
def _lgamma1(n: int) -> float:
    return math.lgamma(n + 1)


# -- envelope expressions ------------------------------------------------------------


@dataclass(frozen=True)
class AtomEnvelope:
    a: Fraction = Fraction(0)
    b1: Fraction = Fraction(0)
    b2: Fraction = Fraction(0)
    c1: Fraction = Fraction(0)
    c2: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("a", "b1", "b2", "c1", "c2"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    def params(self) -> tuple[Fraction, ...]:
        return (self.a, self.b1, self.b2, self.c1, self.c2)

    def log_eval(self, k) -> float:
        t1, t2 = abs(k[0]), abs(k[1])
        v = 0.0
        if self.a:
            v += float(self.a) * math.log1p(t1 * t1 + t2 * t2)
        if self.b1:
            v += float(self.b1) * t1
        if self.b2:
            v += float(self.b2) * t2
        if self.c1:
            v += float(self.c1) * _lgamma1(t1)
        if self.c2:
            v += float(self.c2) * _lgamma1(t2)
        return v

    def log_grid(self, radius: int) -> np.ndarray:
        """``log w`` on ``[-radius, radius]^2`` (axis 0 is ``k1``)."""
        return _atom_grid(self, radius)

    def __mul__(self, other: AtomEnvelope) -> AtomEnvelope:
        return AtomEnvelope(*(x + y for x, y in zip(self.params(), other.params())))

    def atoms(self) -> list[AtomEnvelope]:
        return [self]

    def map_atoms(self, fn: Callable[[AtomEnvelope], AtomEnvelope]) -> EnvelopeExpr:
        return fn(self)

    def to_text(self) -> str:
        return "atom(" + ", ".join(_fmt(x) for x in self.params()) + ")"

    def __str__(self):
        return self.to_text()


@dataclass(frozen=True)
class _Node:
    children: tuple

    op = ""

    def __post_init__(self):
        if not self.children:
            raise ValueError(f"{self.op}() needs at least one argument")
        object.__setattr__(self, "children", tuple(self.children))

    def atoms(self) -> list[AtomEnvelope]:
        return [a for c in self.children for a in c.atoms()]

    def map_atoms(self, fn) -> EnvelopeExpr:
        return type(self)(tuple(c.map_atoms(fn) for c in self.children))

    def to_text(self) -> str:
        return f"{self.op}(" + ", ".join(c.to_text() for c in self.children) + ")"

    def __str__(self):
        return self.to_text()


@dataclass(frozen=True)
class Max(_Node):
    op = "max"

    def log_eval(self, k) -> float:
        return max(c.log_eval(k) for c in self.children)

    def log_grid(self, radius: int) -> np.ndarray:
        return np.maximum.reduce([c.log_grid(radius) for c in self.children])


@dataclass(frozen=True)
class Min(_Node):
    op = "min"

    def log_eval(self, k) -> float:
        return min(c.log_eval(k) for c in self.children)

    def log_grid(self, radius: int) -> np.ndarray:
        return np.minimum.reduce([c.log_grid(radius) for c in self.children])


@lru_cache(maxsize=8192)
def _atom_grid(atom: AtomEnvelope, radius: int) -> np.ndarray:
    r = np.arange(-radius, radius + 1)
    t1, t2 = np.abs(r)[:, None], np.abs(r)[None, :]
    lg = np.array([_lgamma1(n) for n in range(radius + 1)])
    grid = np.zeros((r.size, r.size))
    if atom.a:
        grid = grid + float(atom.a) * np.log1p(t1 * t1 + t2 * t2)
    if atom.b1:
        grid = grid + float(atom.b1) * t1
    if atom.b2:
        grid = grid + float(atom.b2) * t2
    if atom.c1:
        grid = grid + float(atom.c1) * lg[t1]
    if atom.c2:
        grid = grid + float(atom.c2) * lg[t2]
    grid.setflags(write=False)
    return grid


EnvelopeExpr = AtomEnvelope | Max | Min


def times(e: EnvelopeExpr, factor: AtomEnvelope) -> EnvelopeExpr:
    """Pointwise product with an atom (distributes over max and min)."""
    return e.map_atoms(lambda a: a * factor)


# -- parsing ------------------------------------------------------------------------


class EnvelopeSyntaxError(ValueError):
    def __init__(self, pos: int, message: str):
        super().__init__(f"column {pos + 1}: {message}")
        self.column = pos + 1


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            got = self.peek() or "end of input"
            raise EnvelopeSyntaxError(self.pos, f"expected {ch!r}, got {got!r}")
        self.pos += 1

    def word(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            self.pos += 1
        return self.text[start : self.pos]

    def rational(self) -> Fraction:
        self.skip()
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            raise EnvelopeSyntaxError(start, "expected a rational")
        if self.pos < len(self.text) and self.text[self.pos] == "/":
            self.pos += 1
            d0 = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos == d0:
                raise EnvelopeSyntaxError(d0, "expected a denominator")
        try:
            return Fraction(self.text[start : self.pos])
        except ZeroDivisionError as exc:
            raise EnvelopeSyntaxError(start, "zero denominator") from exc

    def tuple5(self) -> AtomEnvelope:
        self.expect("(")
        vals = [self.rational()]
        for _ in range(4):
            self.expect(",")
            vals.append(self.rational())
        self.expect(")")
        return AtomEnvelope(*vals)

    def expr(self) -> EnvelopeExpr:
        if self.peek() == "(":
            return self.tuple5()
        start = self.pos
        name = self.word()
        if name == "atom":
            return self.tuple5()
        if name in ("max", "min"):
            self.expect("(")
            kids = [self.expr()]
            while self.peek() == ",":
                self.pos += 1
                kids.append(self.expr())
            self.expect(")")
            return (Max if name == "max" else Min)(tuple(kids))
        raise EnvelopeSyntaxError(start, f"expected atom, max or min, got {name or self.peek()!r}")


def parse_envelope(text: str) -> EnvelopeExpr:
    r = _Reader(text)
    e = r.expr()
    r.skip()
    if r.pos != len(text):
        raise EnvelopeSyntaxError(r.pos, "trailing input")
    return e


# -- asymptotic comparison ------------------------------------------------------------


def _axis_class(dc: Fraction, db: Fraction) -> int:
    """-1: decays faster than any polynomial, 0: identically one, +1: super-polynomial growth."""
    if dc or db:
        return 1 if (dc, db) > (0, 0) else -1
    return 0


def atom_leq(e1: AtomEnvelope, e2: AtomEnvelope) -> bool:
    """True iff ``e1 / e2`` is bounded on Z^2.

    Per axis the factorial power dominates, then the exponential rate;
    the polynomial exponent decides only when some axis is neutral.
    """
    d = [x - y for x, y in zip(e1.params(), e2.params())]
    da, db1, db2, dc1, dc2 = d
    ax = (_axis_class(dc1, db1), _axis_class(dc2, db2))
    if 1 in ax:
        return False
    if ax == (-1, -1):
        return True
    return da <= 0


def _dnf(e: EnvelopeExpr) -> list[list[AtomEnvelope]]:
    """``e`` as max over min over atoms."""
    if isinstance(e, AtomEnvelope):
        return [[e]]
    if isinstance(e, Max):
        return [clause for c in e.children for clause in _dnf(c)]
    parts = [_dnf(c) for c in e.children]
    return [sum(combo, []) for combo in itertools.product(*parts)]


def expr_leq(e1: EnvelopeExpr, e2: EnvelopeExpr) -> bool | None:
    """Sound but incomplete: True when ``e1 <= C e2`` is proved, else None.

    ``max_i min_j a_ij <= C max_k min_l b_kl`` follows if every clause ``i``
    has a clause ``k`` such that each ``b_kl`` dominates some ``a_ij``.
    """
    d1, d2 = _dnf(e1), _dnf(e2)
    for clause in d1:
        if not any(all(any(atom_leq(a, b) for a in clause) for b in other) for other in d2):
            return None
    return True


def probe_points(radius: int) -> list[LatticeIndex]:
    return list(Box.symmetric(radius))


def probe_leq(e1, e2, radius: int = 32) -> bool:
    """Heuristic: ``log e1 - log e2`` on the annulus ``radius/2 < |k|_inf <= radius``
    does not exceed its maximum on the inner box ``|k|_inf <= radius/2``."""
    half = radius // 2
    if hasattr(e1, "log_grid") and hasattr(e2, "log_grid"):
        diff = e1.log_grid(radius) - e2.log_grid(radius)
        inner = diff[radius - half : radius + half + 1, radius - half : radius + half + 1]
        return bool(diff.max() <= inner.max() + 1e-9)
    inner = max(e1.log_eval(k) - e2.log_eval(k) for k in Box.symmetric(half))
    outer = max(e1.log_eval(k) - e2.log_eval(k) for k in Box.symmetric(radius))
    return outer <= inner + 1e-9


def pointwise_equal(e1, e2, radius: int = 32) -> bool:
    """Exact equality of ``log`` evaluations on ``[-radius, radius]^2``."""
    return bool(np.array_equal(e1.log_grid(radius), e2.log_grid(radius)))


def simplify(e: EnvelopeExpr) -> EnvelopeExpr:
    """Flatten nested nodes and prune atoms that are asymptotically redundant.

    The result equals ``e`` up to mutual boundedness, not pointwise.
    """
    if isinstance(e, AtomEnvelope):
        return e
    kids: list = []
    for c in e.children:
        c = simplify(c)
        if type(c) is type(e):
            kids.extend(c.children)
        else:
            kids.append(c)
    uniq = list(dict.fromkeys(kids))
    atoms = [c for c in uniq if isinstance(c, AtomEnvelope)]
    keep = []
    for c in uniq:
        if isinstance(c, AtomEnvelope):
            i = atoms.index(c)
            redundant = False
            for j, o in enumerate(atoms):
                if j == i:
                    continue
                if isinstance(e, Max):
                    le, ge = atom_leq(c, o), atom_leq(o, c)
                else:
                    le, ge = atom_leq(o, c), atom_leq(c, o)
                # dominated, or mutually bounded with an earlier atom
                if le and (not ge or j < i):
                    redundant = True
                    break
            if redundant:
                continue
        keep.append(c)
    if len(keep) == 1:
        return keep[0]
    return type(e)(tuple(keep))


# -- derived envelopes (pointwise only, no textual form) ------------------------------------


class ImageEnvelope:
    """``w'(k) = sum_n |P_n(k - n)| w(k - n)``."""

    def __init__(self, L: TorusOperator, base):
        self.L = L
        self.base = base

    def log_eval(self, k) -> float:
        terms = []
        for n, p in self.L.freq_form.items():
            src = (k[0] - n[0], k[1] - n[1])
            m2 = p(src[0], src[1]).abs2()
            if m2:
                terms.append(0.5 * math.log(m2) + self.base.log_eval(src))
        if not terms:
            return -math.inf
        top = max(terms)
        return top + math.log(sum(math.exp(t - top) for t in terms))


class QuotientEnvelope:
    """``w(k) / |P(k)|``; where ``P(k) = 0`` (the zero mode) the value is ``w(k)``."""

    def __init__(self, base, symbol):
        self.base = base
        self.symbol = symbol

    def log_eval(self, k) -> float:
        m2 = self.symbol(k[0], k[1]).abs2()
        v = self.base.log_eval(k)
        return v if not m2 else v - 0.5 * math.log(m2)


class SampledEnvelope:
    """Tabulated ``log w`` on a box; undefined outside it."""

    def __init__(self, table: dict, box: Box):
        self.table = table
        self.box = box

    def log_eval(self, k) -> float:
        if k not in self.box:
            raise KeyError(f"sampled envelope undefined at {tuple(k)}")
        return self.table.get((k[0], k[1]), -math.inf)


# -- sections ------------------------------------------------------------------------


@dataclass(frozen=True)
class Section:
    """A linear section.

    ``kind`` is ``"principal"`` (generated by ``generator``) or one of the
    non-principal classes ``"Hinf"`` / ``"HminusInf"``.  ``atom_form`` is a
    grammar expression bounding the generator from above asymptotically
    (equal to it for sections built from expressions).  ``provenance``
    records how the generator was obtained.
    """

    generator: object = None
    kind: str = "principal"
    atom_form: EnvelopeExpr | None = None
    provenance: str = "exact"
    claimed: SpaceTag | None = None
    notes: tuple[str, ...] = field(default=())

    def log_eval(self, k) -> float:
        if self.generator is None:
            raise ValueError(f"{self.kind} is not a principal section")
        return self.generator.log_eval(k)

    def to_text(self) -> str:
        if self.kind != "principal":
            return self.kind
        if self.atom_form is None:
            raise ValueError("section has no textual generator")
        return self.atom_form.to_text()


def principal(e: EnvelopeExpr | str) -> Section:
    if isinstance(e, str):
        e = parse_envelope(e)
    return Section(e, atom_form=e)


def _lattice(s1: Section, s2: Section, node, simplify_result: bool) -> Section:
    if s1.kind != "principal" or s2.kind != "principal":
        raise ValueError("lattice operations are implemented for principal sections")
    if s1.atom_form is None or s2.atom_form is None:
        raise ValueError("lattice operations need expression generators")
    e = node((s1.atom_form, s2.atom_form))
    if simplify_result:
        e = simplify(e)
    return Section(e, atom_form=e)


def section_sup(s1: Section, s2: Section, simplify_result: bool = True) -> Section:
    """``s1 + s2``: generated by the pointwise max."""
    return _lattice(s1, s2, Max, simplify_result)


def section_inf(s1: Section, s2: Section, simplify_result: bool = True) -> Section:
    """``s1 & s2``: generated by the pointwise min."""
    return _lattice(s1, s2, Min, simplify_result)


def section_leq(s1: Section, s2: Section) -> bool | None:
    return expr_leq(s1.atom_form, s2.atom_form)


def section_for_tag(tag: SpaceTag, rate: Fraction = Fraction(1)) -> Section:
    """Coefficient-envelope section of a named space.

    ``H^m`` maps to ``(1 + k.k)^(-m/2)``; ``E0`` uses the representative
    rate ``exp(-rate (|k1| + |k2|))``.  ``E0*`` is neither principal nor
    tracked and is refused.
    """
    if tag.kind == "Hm":
        return principal(AtomEnvelope(a=-tag.m / 2))
    if tag.kind in ("Hinf", "HminusInf"):
        return Section(kind=tag.kind)
    if tag.kind == "E0":
        return principal(AtomEnvelope(b1=-rate, b2=-rate))
    if tag.kind in ("L1Fact", "L1FactDual"):
        sign = -1 if tag.kind == "L1Fact" else 1
        atom = AtomEnvelope(c1=sign) if tag.axis == 1 else AtomEnvelope(c2=sign)
        return principal(atom)
    raise ValueError(f"{tag} has no envelope representation")


def dual_space(tag: SpaceTag) -> SpaceTag:
    return tag.dual()


# -- order relation on series ------------------------------------------------------------


@dataclass
class RegularityVerdict:
    holds: bool
    constant_sq: Fraction | None = None
    witness: LatticeIndex | None = None
    stabilizing: bool = True
    box_restricted: bool = True

    @property
    def constant(self) -> float | None:
        return None if self.constant_sq is None else math.sqrt(self.constant_sq)


def more_regular(u: TrigSeries, v: TrigSeries, box: Box, margin: Fraction = Fraction(1, 4)) -> RegularityVerdict:
    """Box-restricted test of ``|u_n / v_n| <= C``.

    Returns the least ``C`` (squared, exact) on ``box``, or a witness where
    ``v_n = 0 != u_n``.  ``stabilizing`` is False when the maximal ratio on
    ``box`` exceeds that on the box shrunk by ``margin`` of its half-widths.
    """
    pts = list(box)
    if not pts:
        raise ValueError("empty probe set")
    best = Fraction(0)
    inner_best = Fraction(0)
    m1 = int((box.n1_max - box.n1_min) / 2 * margin)
    m2 = int((box.n2_max - box.n2_min) / 2 * margin)
    inner = box.shrink(m1, m2)
    for k in pts:
        a = u[k]
        if not a:
            continue
        b = v[k]
        if not b:
            return RegularityVerdict(False, None, k)
        r = a.abs2() / b.abs2()
        if r > best:
            best = r
        if k in inner and r > inner_best:
            inner_best = r
    return RegularityVerdict(True, best, None, stabilizing=best == inner_best)


# -- duality ------------------------------------------------------------------------


@dataclass
class DualMembership:
    summable: bool
    log_partial_sums: list[float]
    radii: list[int]
    box_restricted: bool = True

    @property
    def verdict(self) -> str:
        return "SUMMABLE" if self.summable else "NON_SUMMABLE"


def _logsumexp(vals: Iterable[float]) -> float:
    vals = [v for v in vals if v != -math.inf]
    if not vals:
        return -math.inf
    top = max(vals)
    return top + math.log(math.fsum(math.exp(v - top) for v in vals))


def dual_membership(u: TrigSeries, s: Section, box: Box, levels: int = 4, tol: float = 0.01) -> DualMembership:
    """Trend test for ``sum_k |u_k| w(k) < infinity`` (membership in the dual of ``s``).

    Partial sums over nested boxes ``|k|_inf <= R_i``; the trend counts as
    summable when the last increment is below ``tol`` of the total and the
    increments shrink.
    """
    if s.kind != "principal":
        raise ValueError("dual membership is implemented for principal sections")
    R = min(-box.n1_min, box.n1_max, -box.n2_min, box.n2_max)
    radii = sorted({max(1, R * (i + 1) // levels) for i in range(levels)})
    terms = {}
    for k, c in u.items():
        if k in box:
            terms[k] = 0.5 * math.log(float(c.abs2())) + s.log_eval(k)
    sums = [_logsumexp(v for k, v in terms.items() if max(abs(k[0]), abs(k[1])) <= r) for r in radii]
    if sums[-1] == -math.inf:
        return DualMembership(True, sums, radii)
    incs = []
    for a, b in zip(sums, sums[1:]):
        incs.append(1.0 - math.exp(a - b) if b != -math.inf else 0.0)
    summable = bool(incs) and incs[-1] < tol and all(x >= y - 1e-12 for x, y in zip(incs, incs[1:]))
    return DualMembership(summable, sums, radii)


# -- operators acting on sections ------------------------------------------------------


def image_atom(atom: AtomEnvelope, degree: int, s1: int, s2: int) -> AtomEnvelope:
    """Asymptotic upper bound for the image of one atom.

    A symbol of degree ``d`` costs ``(1 + k.k)^(d/2)``; a frequency shift by
    at most ``s_i`` changes ``(|k_i|!)^c_i`` by a factor of order
    ``|k_i|^(|c_i| s_i)``, absorbed into the polynomial exponent.
    """
    extra = Fraction(max(degree, 0), 2) + (abs(atom.c1) * s1 + abs(atom.c2) * s2) / 2
    return AtomEnvelope(atom.a + extra, atom.b1, atom.b2, atom.c1, atom.c2)


def operator_image(L: TorusOperator, s: Section) -> Section:
    """Image section ``L~ s``: pointwise generator plus an over-approximating atom form."""
    if s.kind != "principal":
        return Section(kind=s.kind, provenance="exact")
    d = L.order
    atom_form = None
    if s.atom_form is not None:
        atom_form = s.atom_form.map_atoms(lambda a: image_atom(a, d, L.s1, L.s2))
    return Section(ImageEnvelope(L, s.generator), atom_form=atom_form, provenance="overapprox")


def _assumption_or_weak(L: TorusOperator, search_box: Box) -> str:
    res = check_assumption1(L, search_box)
    if res.status is not Assumption1.FAILS:
        return res.status.value
    bad = [m for m in search_box if (m[0] or m[1]) and not check_weak_assumption(L, m)]
    if bad:
        raise ValueError(
            f"symbol nonvanishing fails (P_{tuple(res.n)} vanishes at {tuple(res.m)}) "
            f"and the weak condition fails at {tuple(bad[0])}"
        )
    return "WEAK_ON_BOX"


# factorial growth of the Mizohata recurrence: (|k1| + 1)! * 2^|k1| <= atom(1/2, 1, 0, 1, 0)
_MIZOHATA_FACTOR = AtomEnvelope(Fraction(1, 2), 1, 0, 1, 0)


def solution_section(
    L: TorusOperator,
    G: Section,
    search_box: Box | None = None,
    sample_box: Box | None = None,
) -> Section:
    """The section of solutions of ``L u = G``.

    Constant coefficients: ``w(k) / |P_0(k)|`` pointwise, with an atom form
    from the certified lattice lower bound when ``P_0`` is homogeneous.
    Mizohata: a factorial-class generator scaled by ``max(w_G, 1)``.
    Other operators: an EMPIRICAL envelope sampled from an exact solve on
    ``sample_box``.
    """
    from .hypo import classify

    search_box = search_box or Box.symmetric(16)
    status = _assumption_or_weak(L, search_box)

    if L.is_constant_coefficient:
        P0 = L.symbol()
        k1 = None
        # a real rational linear form always vanishes on a lattice ray, so only degree >= 2 can certify
        if P0.is_homogeneous() and P0.degree >= 2 and P0.is_real():
            report = classify(P0)
            if report.certified:
                k1 = report.certified_k1
        if G.kind != "principal":
            if k1 is None:
                raise ValueError(f"cannot certify that 1/P_0 preserves {G.kind}")
            return Section(kind=G.kind, provenance="certified", notes=(status,))
        atom_form = None
        if k1 is not None and G.atom_form is not None:
            atom_form = G.atom_form.map_atoms(lambda a: AtomEnvelope(a.a - k1, a.b1, a.b2, a.c1, a.c2))
        return Section(QuotientEnvelope(G.generator, P0), atom_form=atom_form, provenance="exact", notes=(status,))

    if L == mizohata_operator():
        if G.kind != "principal" or G.atom_form is None:
            base: EnvelopeExpr = AtomEnvelope()
        else:
            base = Max((G.atom_form, AtomEnvelope()))
        gen = simplify(times(base, _MIZOHATA_FACTOR))
        return Section(
            gen,
            atom_form=gen,
            provenance="bound",
            claimed=SpaceTag.L1FactDual(1),
            notes=(status, "factorial class c1 = 1 up to the exponential factor 2^|k1|"),
        )

    if G.kind != "principal":
        raise ValueError("sampled solution sections need a principal right-hand side")
    box = sample_box or Box.symmetric(8)
    inner = L.output_box(box)
    system = SparseSystem(sorted(box, key=lambda k: (k[1], k[0])))
    skipped: list = []
    for k in inner:
        row: dict = {}
        for n, p in L.freq_form.items():
            src = LatticeIndex(k[0] - n[0], k[1] - n[1])
            v = p(src[0], src[1])
            if v:
                row[src] = row.get(src, GaussianRational(0)) + v
        row = {v: c for v, c in row.items() if c}
        if not row:
            # no unknown reaches this mode: the data is taken modulo it
            skipped.append(tuple(k))
            continue
        rhs = Fraction(math.exp(G.log_eval(k)))
        system.add_equation(row, rhs, label=tuple(k))
    try:
        sol = system.solve()
    except InconsistentSystem as exc:
        raise ValueError(f"no solution on the sample box: {exc}") from exc
    table = {
        (k[0], k[1]): 0.5 * math.log(float(v.abs2())) for k, v in sol.values.items() if v
    }
    notes = (status,) + ((f"modes without unknowns skipped: {skipped}",) if skipped else ())
    return Section(SampledEnvelope(table, box), provenance="empirical", notes=notes)
