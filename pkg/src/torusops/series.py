"""Sparse formal trigonometric series on the 2-torus.

A :class:`TrigSeries` stores the nonzero coefficients of
``sum_k u_k exp(i k.x)`` together with the :class:`Box` on which the stored
data is complete.  Indices inside the box without a stored coefficient are
zero; indices outside it are unknown.  A series whose box is ``None`` is a
trigonometric polynomial: complete on all of Z^2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple

from .gaussian import GaussianRational, as_gaussian, parse_rational

__all__ = [
    "LatticeIndex",
    "Box",
    "TrigSeries",
    "Interval",
    "delta",
    "monomial",
    "constant",
    "add",
    "sub",
    "scale",
    "shift",
    "multiply",
    "mul_coeffwise",
    "pairing",
    "partial_pairing_x1",
    "partial_pairing_x2",
    "parity_project",
    "sobolev_norm_sq",
    "integer_nth_root",
]


class LatticeIndex(NamedTuple):
    k1: int
    k2: int

    def __add__(self, other):  # type: ignore[override]
        return LatticeIndex(self.k1 + other[0], self.k2 + other[1])

    def __sub__(self, other):
        return LatticeIndex(self.k1 - other[0], self.k2 - other[1])

    def __neg__(self):
        return LatticeIndex(-self.k1, -self.k2)

    def norm2(self) -> int:
        return self.k1 * self.k1 + self.k2 * self.k2


@dataclass(frozen=True)
class Box:
    """Closed integer rectangle ``[n1_min, n1_max] x [n2_min, n2_max]``."""

    n1_min: int
    n1_max: int
    n2_min: int
    n2_max: int

    def __post_init__(self):
        if self.n1_min > self.n1_max or self.n2_min > self.n2_max:
            raise ValueError(f"empty box {self.bounds()}")

    @classmethod
    def symmetric(cls, r1: int, r2: int | None = None) -> Box:
        r2 = r1 if r2 is None else r2
        return cls(-r1, r1, -r2, r2)

    def bounds(self) -> tuple[int, int, int, int]:
        return (self.n1_min, self.n1_max, self.n2_min, self.n2_max)

    def __contains__(self, k) -> bool:
        return self.n1_min <= k[0] <= self.n1_max and self.n2_min <= k[1] <= self.n2_max

    def __iter__(self) -> Iterator[LatticeIndex]:
        for k1 in range(self.n1_min, self.n1_max + 1):
            for k2 in range(self.n2_min, self.n2_max + 1):
                yield LatticeIndex(k1, k2)

    def __len__(self) -> int:
        return (self.n1_max - self.n1_min + 1) * (self.n2_max - self.n2_min + 1)

    def shrink(self, m1: int, m2: int | None = None) -> Box:
        """Shrink by a margin on each side; raises ValueError if nothing is left."""
        m2 = m1 if m2 is None else m2
        return Box(self.n1_min + m1, self.n1_max - m1, self.n2_min + m2, self.n2_max - m2)

    def window(self, lo1: int, hi1: int, lo2: int, hi2: int) -> Box:
        """Indices ``k`` with ``k - n`` in this box for every ``n`` in the given offset ranges."""
        return Box(self.n1_min + hi1, self.n1_max + lo1, self.n2_min + hi2, self.n2_max + lo2)

    def translate(self, n) -> Box:
        return Box(self.n1_min + n[0], self.n1_max + n[0], self.n2_min + n[1], self.n2_max + n[1])

    def intersect(self, other: Box) -> Box:
        return Box(
            max(self.n1_min, other.n1_min),
            min(self.n1_max, other.n1_max),
            max(self.n2_min, other.n2_min),
            min(self.n2_max, other.n2_max),
        )

    def contains_box(self, other: Box) -> bool:
        return (
            self.n1_min <= other.n1_min
            and other.n1_max <= self.n1_max
            and self.n2_min <= other.n2_min
            and other.n2_max <= self.n2_max
        )

    def is_symmetric(self, axis: int) -> bool:
        if axis == 1:
            return self.n1_min == -self.n1_max
        return self.n2_min == -self.n2_max


def _intersect(a: Box | None, b: Box | None) -> Box | None:
    if a is None:
        return b
    if b is None:
        return a
    return a.intersect(b)


class TrigSeries:
    """Immutable sparse map ``LatticeIndex -> GaussianRational`` with a completeness box."""

    __slots__ = ("_coeffs", "_box")

    def __init__(self, coeffs: Mapping | Iterable = (), box: Box | None = None):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        store: dict[LatticeIndex, GaussianRational] = {}
        for k, c in items:
            c = as_gaussian(c)
            if not c:
                continue
            k = LatticeIndex(int(k[0]), int(k[1]))
            if box is not None and k not in box:
                raise ValueError(f"coefficient at {tuple(k)} lies outside box {box.bounds()}")
            store[k] = c
        self._coeffs = store
        self._box = box

    @classmethod
    def _raw(cls, store: dict, box: Box | None) -> TrigSeries:
        obj = cls.__new__(cls)
        obj._coeffs = store
        obj._box = box
        return obj

    @property
    def box(self) -> Box | None:
        return self._box

    @property
    def is_finite(self) -> bool:
        """True for trigonometric polynomials (complete on all of Z^2)."""
        return self._box is None

    def __getitem__(self, k) -> GaussianRational:
        c = self._coeffs.get((k[0], k[1]))
        if c is not None:
            return c
        if self._box is not None and k not in self._box:
            raise KeyError(f"index {tuple(k)} outside completeness box {self._box.bounds()}")
        return GaussianRational(0)

    def get(self, k, default=None):
        return self._coeffs.get((k[0], k[1]), default)

    def items(self) -> list[tuple[LatticeIndex, GaussianRational]]:
        """Nonzero coefficients in lexicographic index order."""
        return sorted(self._coeffs.items())

    def support(self) -> list[LatticeIndex]:
        return sorted(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __iter__(self):
        return iter(self.support())

    def radius(self) -> tuple[int, int]:
        """Frequency radii ``(s1, s2)``: max |n1| and max |n2| over the support."""
        if not self._coeffs:
            return (0, 0)
        return (max(abs(k[0]) for k in self._coeffs), max(abs(k[1]) for k in self._coeffs))

    def offsets(self) -> tuple[int, int, int, int]:
        """``(min n1, max n1, min n2, max n2)`` over the support (zeros if empty)."""
        if not self._coeffs:
            return (0, 0, 0, 0)
        k1s = [k[0] for k in self._coeffs]
        k2s = [k[1] for k in self._coeffs]
        return (min(k1s), max(k1s), min(k2s), max(k2s))

    def restrict(self, box: Box) -> TrigSeries:
        """Keep only coefficients inside ``box``; the result is complete on ``box``."""
        if self._box is not None and not self._box.contains_box(box):
            raise ValueError(f"series is not complete on {box.bounds()}")
        return TrigSeries._raw({k: c for k, c in self._coeffs.items() if k in box}, box)

    def with_box(self, box: Box | None) -> TrigSeries:
        return TrigSeries(self._coeffs, box)

    def equal_on(self, other: TrigSeries, box: Box) -> bool:
        """Exact coefficientwise equality on ``box`` (both must be complete there)."""
        for s in (self, other):
            if s.box is not None and not s.box.contains_box(box):
                raise ValueError(f"series is not complete on {box.bounds()}")
        keys = {k for k in self._coeffs if k in box} | {k for k in other._coeffs if k in box}
        return all(self._coeffs.get(k, 0) == other._coeffs.get(k, 0) for k in keys)

    def __eq__(self, other):
        if not isinstance(other, TrigSeries):
            return NotImplemented
        return self._box == other._box and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self._box, frozenset(self._coeffs.items())))

    def __repr__(self):
        terms = ", ".join(f"{tuple(k)}: {c}" for k, c in self.items()[:6])
        more = ", ..." if len(self._coeffs) > 6 else ""
        box = "Z^2" if self._box is None else self._box.bounds()
        return f"TrigSeries({{{terms}{more}}}, box={box})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return scale(-1, self)

    def __mul__(self, other):
        if isinstance(other, TrigSeries):
            return multiply(self, other)
        return scale(other, self)

    def __rmul__(self, other):
        return scale(other, self)

    # -- text and structured serialisation -------------------------------

    def to_text(self) -> str:
        if self._box is None:
            header = "box finite"
        else:
            header = "box {} {} {} {}".format(*self._box.bounds())
        lines = [header]
        for k, c in self.items():
            re, im = c.to_pair()
            lines.append(f"{k[0]} {k[1]} {re} {im}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> TrigSeries:
        box: Box | None = None
        seen_header = False
        coeffs: dict[LatticeIndex, GaussianRational] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if not seen_header:
                if fields[0] != "box":
                    raise SeriesParseError(lineno, 1, "expected header 'box n1_min n1_max n2_min n2_max'")
                if fields[1:] == ["finite"]:
                    box = None
                elif len(fields) == 5:
                    try:
                        box = Box(*(int(f) for f in fields[1:]))
                    except ValueError as exc:
                        raise SeriesParseError(lineno, 5, str(exc)) from exc
                else:
                    raise SeriesParseError(lineno, 1, "header needs four integers or 'finite'")
                seen_header = True
                continue
            if len(fields) not in (3, 4):
                raise SeriesParseError(lineno, 1, "expected 'k1 k2 re [im]'")
            col = 1
            try:
                k = LatticeIndex(int(fields[0]), int(fields[1]))
                col = raw.find(fields[2]) + 1
                re = parse_rational(fields[2])
                im = parse_rational(fields[3]) if len(fields) == 4 else Fraction(0)
            except ValueError as exc:
                raise SeriesParseError(lineno, col, str(exc)) from exc
            if box is not None and k not in box:
                raise SeriesParseError(lineno, 1, f"index {tuple(k)} outside declared box")
            if k in coeffs:
                raise SeriesParseError(lineno, 1, f"duplicate index {tuple(k)}")
            coeffs[k] = GaussianRational(re, im)
        if not seen_header:
            raise SeriesParseError(1, 1, "missing box header")
        return cls(coeffs, box)

    def to_obj(self) -> dict:
        return {
            "box": None if self._box is None else list(self._box.bounds()),
            "coeffs": [[k[0], k[1], *c.to_pair()] for k, c in self.items()],
        }

    @classmethod
    def from_obj(cls, obj: Mapping) -> TrigSeries:
        box = None if obj.get("box") is None else Box(*obj["box"])
        coeffs = {}
        for entry in obj.get("coeffs", []):
            k1, k2, re, im = entry
            coeffs[(k1, k2)] = GaussianRational.from_pair(str(re), str(im))
        return cls(coeffs, box)

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True)


class SeriesParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


# -- constructors ----------------------------------------------------------


def delta(k1: int, k2: int, coeff=1) -> TrigSeries:
    """The trigonometric monomial ``coeff * exp(i (k1 x1 + k2 x2))``."""
    return TrigSeries({(k1, k2): coeff})


monomial = delta


def constant(c=1) -> TrigSeries:
    return TrigSeries({(0, 0): c})


# -- vector space operations ----------------------------------------------


def add(u: TrigSeries, v: TrigSeries) -> TrigSeries:
    store = dict(u._coeffs)
    for k, c in v._coeffs.items():
        s = store.get(k)
        if s is None:
            store[k] = c
        else:
            s = s + c
            if s:
                store[k] = s
            else:
                del store[k]
    box = _intersect(u.box, v.box)
    if box is not None:
        store = {k: c for k, c in store.items() if k in box}
    return TrigSeries._raw(store, box)


def sub(u: TrigSeries, v: TrigSeries) -> TrigSeries:
    return add(u, scale(-1, v))


def scale(c, u: TrigSeries) -> TrigSeries:
    c = as_gaussian(c)
    if not c:
        return TrigSeries._raw({}, u.box)
    return TrigSeries._raw({k: c * v for k, v in u._coeffs.items()}, u.box)


def shift(u: TrigSeries, n) -> TrigSeries:
    """Multiplication by ``exp(i n.x)``: translate coefficients and box by ``n``."""
    n = LatticeIndex(n[0], n[1])
    box = None if u.box is None else u.box.translate(n)
    return TrigSeries._raw({k + n: c for k, c in u._coeffs.items()}, box)


def multiply(t: TrigSeries, u: TrigSeries) -> TrigSeries:
    """Function product, i.e. convolution of coefficient maps.

    One factor must be a trigonometric polynomial; the completeness box of
    the result is the tightest one implied by the other factor's box.
    """
    if not t.is_finite:
        if not u.is_finite:
            raise ValueError("multiply needs at least one trigonometric polynomial factor")
        t, u = u, t
    store: dict[LatticeIndex, GaussianRational] = {}
    for n, tc in t._coeffs.items():
        for k, uc in u._coeffs.items():
            key = LatticeIndex(k[0] + n[0], k[1] + n[1])
            prev = store.get(key)
            store[key] = tc * uc if prev is None else prev + tc * uc
    box = None
    if u.box is not None:
        lo1, hi1, lo2, hi2 = t.offsets()
        box = u.box.window(lo1, hi1, lo2, hi2)
    return TrigSeries._raw(
        {k: c for k, c in store.items() if c and (box is None or k in box)}, box
    )


def mul_coeffwise(v: TrigSeries, h: TrigSeries) -> TrigSeries:
    """Coefficientwise (Hadamard) product ``(v*h)_k = v_k h_k``."""
    box = _intersect(v.box, h.box)
    store = {}
    for k, c in v._coeffs.items():
        d = h._coeffs.get(k)
        if d is not None and (box is None or k in box):
            store[k] = c * d
    return TrigSeries._raw(store, box)


# -- pairings --------------------------------------------------------------


def pairing(u: TrigSeries, v: TrigSeries) -> GaussianRational:
    """``<u, v> = sum_k u_k conj(v_k)``, exact."""
    if u.is_finite:
        finite, other, conj_other = u, v, True
    elif v.is_finite:
        finite, other, conj_other = v, u, False
    else:
        raise ValueError("pairing needs at least one finitely supported argument")
    total = GaussianRational(0)
    for k, c in finite._coeffs.items():
        d = other[k]
        if not d:
            continue
        total = total + (c * d.conjugate() if conj_other else d * c.conjugate())
    return total


def partial_pairing_x1(u: TrigSeries, t: TrigSeries) -> TrigSeries:
    """Pair along ``x1`` against a trigonometric polynomial ``t(x1)``.

    Returns the series in ``x2`` (stored on the ``k1 = 0`` column) with
    coefficients ``sum_m u_{m,n} conj(t_{-m})``.  With this convention
    ``<u, exp(i x1)>_{x1}`` picks the ``k1 = -1`` row of ``u``.
    """
    if not t.is_finite:
        raise ValueError("partial pairing needs a trigonometric polynomial in x1")
    if any(k[1] for k in t._coeffs):
        raise ValueError("partial_pairing_x1 expects t to depend on x1 only")
    store: dict[LatticeIndex, GaussianRational] = {}
    rows = {-k[0]: c.conjugate() for k, c in t._coeffs.items()}
    for k, c in u._coeffs.items():
        w = rows.get(k[0])
        if w is None:
            continue
        key = LatticeIndex(0, k[1])
        store[key] = store.get(key, GaussianRational(0)) + c * w
    box = None
    if u.box is not None:
        for m in rows:
            if not (u.box.n1_min <= m <= u.box.n1_max):
                raise ValueError(f"series not complete on row k1={m}")
        box = Box(0, 0, u.box.n2_min, u.box.n2_max)
    return TrigSeries._raw({k: c for k, c in store.items() if c}, box)


def partial_pairing_x2(u: TrigSeries, t: TrigSeries) -> TrigSeries:
    """Mirror of :func:`partial_pairing_x1`; the result lives on the ``k2 = 0`` row."""
    if not t.is_finite:
        raise ValueError("partial pairing needs a trigonometric polynomial in x2")
    if any(k[0] for k in t._coeffs):
        raise ValueError("partial_pairing_x2 expects t to depend on x2 only")
    store: dict[LatticeIndex, GaussianRational] = {}
    cols = {-k[1]: c.conjugate() for k, c in t._coeffs.items()}
    for k, c in u._coeffs.items():
        w = cols.get(k[1])
        if w is None:
            continue
        key = LatticeIndex(k[0], 0)
        store[key] = store.get(key, GaussianRational(0)) + c * w
    box = None
    if u.box is not None:
        for m in cols:
            if not (u.box.n2_min <= m <= u.box.n2_max):
                raise ValueError(f"series not complete on column k2={m}")
        box = Box(u.box.n1_min, u.box.n1_max, 0, 0)
    return TrigSeries._raw({k: c for k, c in store.items() if c}, box)


def parity_project(u: TrigSeries, axis: int, parity: str) -> TrigSeries:
    """Even or odd part of ``u`` in ``x1`` (axis 1) or ``x2`` (axis 2)."""
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    if u.box is not None and not u.box.is_symmetric(axis):
        raise ValueError(f"box {u.box.bounds()} is not symmetric in axis {axis}")
    sign = 1 if parity == "even" else -1
    half = Fraction(1, 2)
    keys = set(u._coeffs)
    keys |= {_reflect(k, axis) for k in keys}
    store = {}
    for k in keys:
        c = u._coeffs.get(k, GaussianRational(0)) + sign * u._coeffs.get(_reflect(k, axis), GaussianRational(0))
        if c:
            store[k] = c * half
    return TrigSeries._raw(store, u.box)


def _reflect(k, axis: int) -> LatticeIndex:
    return LatticeIndex(-k[0], k[1]) if axis == 1 else LatticeIndex(k[0], -k[1])


# -- Sobolev norms ---------------------------------------------------------


class Interval(NamedTuple):
    lo: Fraction
    hi: Fraction

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def width(self) -> Fraction:
        return self.hi - self.lo


def integer_nth_root(x: int, n: int) -> int:
    """``floor(x ** (1/n))`` for ``x >= 0``."""
    if x < 0:
        raise ValueError("negative radicand")
    if x < 2:
        return x
    r = 1 << ((x.bit_length() + n - 1) // n)
    while True:
        s = ((n - 1) * r + x // r ** (n - 1)) // n
        if s >= r:
            break
        r = s
    while r ** n > x:
        r -= 1
    while (r + 1) ** n <= x:
        r += 1
    return r


def _power_enclosure(base: int, m: Fraction, bits: int) -> Interval:
    """Rational bounds on ``base ** m`` for an integer ``base >= 1``."""
    p, q = m.numerator, m.denominator
    x = base ** abs(p)
    scale = 1 << bits
    r = integer_nth_root(x * scale ** q, q)
    exact = r ** q == x * scale ** q
    lo, hi = Fraction(r, scale), Fraction(r if exact else r + 1, scale)
    if p < 0:
        lo, hi = 1 / hi, 1 / lo
    return Interval(lo, hi)


def sobolev_norm_sq(u: TrigSeries, m, bits: int = 64) -> Fraction | Interval:
    """``sum_k (1 + k.k)^m |u_k|^2`` over the stored coefficients.

    Exact for integer ``m``; for fractional ``m`` returns an
    :class:`Interval` of rationals enclosing the value.
    """
    m = Fraction(m)
    if m.denominator == 1:
        e = int(m)
        total = Fraction(0)
        for k, c in u._coeffs.items():
            w = Fraction(1 + k[0] * k[0] + k[1] * k[1]) ** e
            total += w * c.abs2()
        return total
    lo = hi = Fraction(0)
    for k, c in u._coeffs.items():
        a2 = c.abs2()
        enc = _power_enclosure(1 + k[0] * k[0] + k[1] * k[1], m, bits)
        lo += enc.lo * a2
        hi += enc.hi * a2
    return Interval(lo, hi)
