"""Hypoellipticity on the torus for homogeneous constant-coefficient operators.

For ``L = P(-i d/dx1, -i d/dx2)`` with ``P`` homogeneous of degree ``p`` the
question reduces to how small ``|P(n)|`` gets on the integer lattice.  Exact
answers come from algebra on ``Q(x) = P(x, 1)``:

* a nonzero lattice zero of ``P`` (a rational root of ``Q`` or an axis zero)
  puts ``sum_j exp(i j nu.x)`` in the kernel, so ``L`` is not hypoelliptic;
* otherwise every real root of ``Q`` is algebraic of degree ``nu >= 2`` and
  Liouville's bound ``|alpha - a/b| > C / b**nu`` gives a polynomial lower
  bound ``|P(n)| >= C (n.n)**k`` with ``k = (p - nu*r) / 2``.

Shell scans of ``min |P(n)|`` over dyadic annuli are reported alongside,
but they never certify anything.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import lcm

import numpy as np

from .series import LatticeIndex, TrigSeries
from .symbols import SymbolPolynomial
from .upoly import (
    RealRoot,
    UPoly,
    DegreeCapExceeded,
    factor_over_Q,
    irreducible_over_Q,
    isolate_real_roots,
    poly_gcd,
    rational_roots,
)

__all__ = [
    "HomogeneousPoly",
    "restrict_to_line",
    "integer_lattice_zeros",
    "RootCertificate",
    "ShellMin",
    "ShellScan",
    "empirical_exponent",
    "Verdict",
    "HypoReport",
    "classify",
    "SobolevGain",
    "sobolev_gain",
    "kernel_witness",
    "irreducible_over_Q",
]


class HomogeneousPoly(SymbolPolynomial):
    """A nonzero homogeneous :class:`SymbolPolynomial` of degree ``p >= 1``."""

    __slots__ = ()

    def __init__(self, terms=(), min_degree: int = 2):
        super().__init__(terms)
        if not self.terms:
            raise ValueError("homogeneous polynomial must be nonzero")
        if not self.is_homogeneous():
            raise ValueError("terms of different total degree")
        if self.degree < min_degree:
            raise ValueError(f"degree {self.degree} < {min_degree}")

    @property
    def p(self) -> int:
        return self.degree


def _as_homogeneous(P, min_degree: int = 2) -> HomogeneousPoly:
    if isinstance(P, HomogeneousPoly):
        return P
    return HomogeneousPoly(P.terms if isinstance(P, SymbolPolynomial) else P, min_degree=min_degree)


def restrict_to_line(P: SymbolPolynomial) -> UPoly:
    """``Q(x) = P(x, 1)`` with exact rational coefficients."""
    return P.restrict_x2_one()


def integer_lattice_zeros(P: SymbolPolynomial) -> list[LatticeIndex]:
    """One primitive integer zero per ray of nonzero lattice zeros of a homogeneous ``P``.

    Rays are normalised so the first nonzero coordinate is positive.  Complex
    coefficients are handled through the common zeros of the real and
    imaginary parts.
    """
    if not P:
        raise ValueError("the zero polynomial vanishes everywhere")
    if not P.is_homogeneous():
        raise ValueError("lattice-zero reduction needs a homogeneous polynomial")
    if P.degree == 0:
        return []
    rays: list[LatticeIndex] = []
    if not P(1, 0):
        rays.append(LatticeIndex(1, 0))
    re, im = P.real_part(), P.imag_part()
    qs = [q.restrict_x2_one() for q in (re, im) if q]
    g = qs[0]
    for q in qs[1:]:
        g = poly_gcd(g, q)
    if g.degree > 0:
        for r in rational_roots(g):
            a, b = r.numerator, r.denominator
            rays.append(LatticeIndex(-a, -b) if a < 0 else LatticeIndex(a, b))
    return sorted(set(rays), key=lambda k: (abs(k[0]) + abs(k[1]), -k[1], k[0]))


@dataclass(frozen=True)
class RootCertificate:
    """Diophantine data for one real root of ``P(x, 1)``."""

    interval: RealRoot
    multiplicity: int
    minimal_degree: int
    minimal_polynomial: UPoly

    @property
    def liouville_exponent(self) -> int:
        return self.minimal_degree

    @property
    def roth(self) -> bool:
        """Thue-Siegel-Roth improves the exponent to ``2 + eps`` (meaningful for degree >= 3)."""
        return self.minimal_degree >= 2

    def to_obj(self) -> dict:
        return {
            "interval": [str(self.interval.lo), str(self.interval.hi)],
            "multiplicity": self.multiplicity,
            "minimal_degree": self.minimal_degree,
            "minimal_polynomial": str(self.minimal_polynomial),
            "liouville_exponent": self.liouville_exponent,
            "roth": self.roth,
        }


# -- shell scans -------------------------------------------------------------


@dataclass(frozen=True)
class ShellMin:
    """Minimum of ``|P(n)|^2`` over ``2**j < n.n <= 2**(j+1)``."""

    j: int
    min_abs2: Fraction
    argmin: LatticeIndex

    @property
    def norm2(self) -> int:
        return self.argmin.norm2()

    def min_abs(self) -> float:
        return math.sqrt(self.min_abs2)


@dataclass
class ShellScan:
    radius: int
    shells: list[ShellMin]
    k1_fit: float | None
    fit_residual: float | None
    aborted: bool = False

    def shell_of(self, n) -> ShellMin | None:
        j = _shell_index(n[0] * n[0] + n[1] * n[1])
        for s in self.shells:
            if s.j == j:
                return s
        return None

    def lower_bound_constant(self, delta: float = 0.25) -> float | None:
        """``min_j m_j / (n_j.n_j)**(k1_fit - delta)`` over the scanned shells."""
        if self.k1_fit is None:
            return None
        return min(s.min_abs() / s.norm2 ** (self.k1_fit - delta) for s in self.shells)

    def to_obj(self) -> dict:
        return {
            "radius": self.radius,
            "k1_fit": self.k1_fit,
            "fit_residual": self.fit_residual,
            "aborted": self.aborted,
            "shells": [
                {"j": s.j, "min_abs2": str(s.min_abs2), "argmin": list(s.argmin)} for s in self.shells
            ],
        }


def _shell_index(norm2: int) -> int:
    return (norm2 - 1).bit_length() - 1


def _integer_form(P: SymbolPolynomial) -> tuple[list, list, int]:
    """Integer real/imaginary term lists and the common denominator ``D``."""
    den = lcm(*(c.re.denominator for c in P.terms.values()), *(c.im.denominator for c in P.terms.values()))
    re = [(a, b, int(c.re * den)) for (a, b), c in P.terms.items() if c.re]
    im = [(a, b, int(c.im * den)) for (a, b), c in P.terms.items() if c.im]
    return re, im, den


def _eval_terms(terms, n1, n2):
    out = np.zeros(np.broadcast(n1, n2).shape, dtype=n1.dtype)
    for a, b, c in terms:
        out = out + c * n1 ** a * n2 ** b
    return out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TORUS_SPEC_THREADS", "1")))
    except ValueError:
        return 1


def empirical_exponent(P: SymbolPolynomial, max_radius: int, block: int = 64) -> ShellScan:
    """Exact per-shell minima of ``|P(n)|`` for ``1 <= n.n <= 2**J``, ``2**J <= max_radius**2``,
    and the least-squares slope ``k1`` of ``log min|P|`` against ``log n.n``.

    Only complete dyadic shells are scanned.  A zero minimum aborts the fit.
    """
    if max_radius < 8:
        raise ValueError("max_radius must be at least 8")
    J = (max_radius * max_radius).bit_length() - 1
    R = math.isqrt(2 ** J)
    re, im, den = _integer_form(P)
    p = max(P.degree, 0)
    bound = sum(abs(c) for _, _, c in re + im) * R ** p
    if im:
        bound = 2 * bound * bound
    dtype = np.int64 if bound < 2 ** 62 else object
    limit = 2 ** J

    def scan_rows(start: int, stop: int) -> dict[int, tuple[int, LatticeIndex]]:
        n1 = np.arange(start, stop, dtype=np.int64).astype(dtype)[:, None]
        n2 = np.arange(-R, R + 1, dtype=np.int64).astype(dtype)[None, :]
        norm = (n1 * n1 + n2 * n2).astype(np.int64)
        ok = (norm >= 1) & (norm <= limit)
        vr = _eval_terms(re, n1, n2) if re else np.zeros(norm.shape, dtype=dtype)
        if im:
            vi = _eval_terms(im, n1, n2)
            val = vr * vr + vi * vi
        else:
            val = np.abs(vr)
        shell = np.frexp(np.maximum(norm - 1, 0).astype(np.float64))[1] - 1
        shell = np.where(norm == 1, -1, shell)
        out: dict[int, tuple[int, LatticeIndex]] = {}
        lo = _shell_index(max(1, start * start))
        for j in range(lo, J):
            mask = ok & (shell == j)
            if not mask.any():
                continue
            idx = np.flatnonzero(mask)
            flat = val.ravel()[idx]
            pos = int(np.argmin(flat)) if dtype is np.int64 else min(range(len(flat)), key=flat.__getitem__)
            r, c = divmod(int(idx[pos]), norm.shape[1])
            out[j] = (int(flat[pos]), LatticeIndex(start + r, c - R))
        return out

    # |P(-n)| = |P(n)| for homogeneous P: the half plane n1 >= 0 suffices
    chunks = [(s, min(s + block, R + 1)) for s in range(0, R + 1, block)]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        parts = list(pool.map(lambda c: scan_rows(*c), chunks))
    best: dict[int, tuple[int, LatticeIndex]] = {}
    for part in parts:
        for j, (v, n) in part.items():
            if j not in best or v < best[j][0] or (v == best[j][0] and n < best[j][1]):
                best[j] = (v, n)
    shells = []
    for j in sorted(best):
        v, n = best[j]
        abs2 = Fraction(v, den * den) if im else Fraction(v * v, den * den)
        shells.append(ShellMin(j, abs2, n))
    if any(not s.min_abs2 for s in shells):
        return ShellScan(max_radius, shells, None, None, aborted=True)
    x = np.array([math.log(s.norm2) for s in shells])
    y = np.array([0.5 * math.log(s.min_abs2) for s in shells])
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.linalg.norm(y - A @ coef)) / math.sqrt(len(x))
    return ShellScan(max_radius, shells, float(coef[0]), resid)


# -- classification --------------------------------------------------------------


class Verdict(str, Enum):
    HYPOELLIPTIC_CERTIFIED = "HYPOELLIPTIC_CERTIFIED"
    NOT_HYPOELLIPTIC = "NOT_HYPOELLIPTIC"
    HYPOELLIPTIC_EMPIRICAL = "HYPOELLIPTIC_EMPIRICAL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class HypoReport:
    verdict: Verdict
    branch: str
    degree: int
    witness: LatticeIndex | None = None
    zero_rays: list[LatticeIndex] = field(default_factory=list)
    kernel: TrigSeries | None = None
    certificates: list[RootCertificate] = field(default_factory=list)
    max_multiplicity: int = 0
    certified_k1: Fraction | None = None
    roth_k1: Fraction | None = None
    roth_epsilon: bool = False
    scan: ShellScan | None = None
    note: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.HYPOELLIPTIC_CERTIFIED

    def to_obj(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "branch": self.branch,
            "degree": self.degree,
            "witness": None if self.witness is None else list(self.witness),
            "zero_rays": [list(r) for r in self.zero_rays],
            "kernel": None if self.kernel is None else self.kernel.to_obj(),
            "certificates": [c.to_obj() for c in self.certificates],
            "max_multiplicity": self.max_multiplicity,
            "certified_k1": None if self.certified_k1 is None else str(self.certified_k1),
            "roth_k1": None if self.roth_k1 is None else str(self.roth_k1),
            "roth_epsilon": self.roth_epsilon,
            "scan": None if self.scan is None else self.scan.to_obj(),
            "note": self.note,
        }


def kernel_witness(nu, terms: int = 4) -> TrigSeries:
    """``sum_{|j| <= terms} exp(i j nu.x)``: truncation of a kernel element."""
    return TrigSeries({(j * nu[0], j * nu[1]): 1 for j in range(-terms, terms + 1)})


def classify(
    P: SymbolPolynomial,
    scan_radius: int | None = None,
    degree_cap: int = 8,
    kernel_terms: int = 4,
) -> HypoReport:
    """Decide hypoellipticity of ``P(D)`` on the torus.

    Branches: ``lattice_zero`` (not hypoelliptic, with witness),
    ``elliptic`` (no real roots of ``P(x, 1)`` and ``P(1, 0) != 0``),
    ``irreducible`` (``P(x, 1)`` irreducible over Q of degree >= 2) and
    ``algebraic_roots`` (every real root lies in an irreducible factor of
    degree >= 2).  Anything else is INCONCLUSIVE, or
    HYPOELLIPTIC_EMPIRICAL when a scan was requested.
    """
    P = _as_homogeneous(P)
    p = P.degree
    scan = empirical_exponent(P, scan_radius) if scan_radius else None

    rays = integer_lattice_zeros(P)
    if rays:
        w = rays[0]
        return HypoReport(
            Verdict.NOT_HYPOELLIPTIC,
            "lattice_zero",
            p,
            witness=w,
            zero_rays=rays,
            kernel=kernel_witness(w, kernel_terms),
            scan=scan,
            note=f"P{tuple(w)} = 0",
        )

    def uncertified(note: str) -> HypoReport:
        verdict = Verdict.HYPOELLIPTIC_EMPIRICAL if scan is not None and not scan.aborted else Verdict.INCONCLUSIVE
        return HypoReport(verdict, "uncertified", p, scan=scan, note=note)

    if not P.is_real():
        return uncertified("complex coefficients: root certificates need a real polynomial")

    Q = restrict_to_line(P)
    if not isolate_real_roots(Q):
        return HypoReport(
            Verdict.HYPOELLIPTIC_CERTIFIED,
            "elliptic",
            p,
            certified_k1=Fraction(p, 2),
            roth_k1=Fraction(p, 2),
            scan=scan,
            note="no real characteristic directions",
        )

    try:
        _, factors = factor_over_Q(Q, degree_cap)
    except DegreeCapExceeded as exc:
        return uncertified(str(exc))

    certs: list[RootCertificate] = []
    for g, mult in factors:
        if g.degree < 2:
            # a linear factor is a rational root, excluded above
            raise AssertionError("rational root survived the lattice-zero test")
        for root in isolate_real_roots(g, width=Fraction(1, 2 ** 20)):
            certs.append(RootCertificate(root, mult, g.degree, g))
    r = max(c.multiplicity for c in certs)
    worst = max(c.minimal_degree * c.multiplicity for c in certs)
    branch = "irreducible" if len(factors) == 1 and factors[0][1] == 1 else "algebraic_roots"
    return HypoReport(
        Verdict.HYPOELLIPTIC_CERTIFIED,
        branch,
        p,
        certificates=certs,
        max_multiplicity=r,
        certified_k1=Fraction(p - worst, 2),
        roth_k1=Fraction(p - 2 * r, 2),
        roth_epsilon=any(c.minimal_degree > 2 for c in certs),
        scan=scan,
        note="Liouville bound for every real root",
    )


@dataclass
class SobolevGain:
    """Regularity gain of ``L^{-1}``: ``H^m -> H^{m + gain}``.

    ``stated_gain`` is ``p/2 - r``, quoted with a symbolic ``- eps``.  ``empirical_gain`` is ``2 * k1_fit`` from a shell scan and
    ``certified_gain`` is ``2 * certified_k1`` from the Liouville bound.
    """

    degree: int
    multiplicity: int
    stated_gain: Fraction
    epsilon: bool
    empirical_gain: float | None
    certified_gain: Fraction
    discrepancy: bool
    tolerance: float

    def stated_index(self) -> str:
        g = self.stated_gain
        out = "m" if not g else (f"m + {g}" if g > 0 else f"m - {-g}")
        return out + (" - eps" if self.epsilon else "")

    def to_obj(self) -> dict:
        return {
            "degree": self.degree,
            "multiplicity": self.multiplicity,
            "stated_gain": str(self.stated_gain),
            "stated_index": self.stated_index(),
            "epsilon": self.epsilon,
            "empirical_gain": self.empirical_gain,
            "certified_gain": str(self.certified_gain),
            "discrepancy": self.discrepancy,
        }


def sobolev_gain(P: SymbolPolynomial, report: HypoReport, tolerance: float = 0.25) -> SobolevGain:
    """Side-by-side regularity gains for a certified-hypoelliptic ``P``.

    The disagreement flag compares the stated gain with ``2 * k1_fit``; it
    is informational and never raises.
    """
    if not report.certified:
        raise ValueError(f"sobolev_gain needs a certified verdict, got {report.verdict.value}")
    P = _as_homogeneous(P)
    p, r = P.degree, report.max_multiplicity
    stated = Fraction(p, 2) - r
    eps = True
    emp = None
    if report.scan is not None and report.scan.k1_fit is not None:
        emp = 2 * report.scan.k1_fit
    disc = emp is not None and abs(float(stated) - emp) > tolerance
    return SobolevGain(p, r, stated, eps, emp, 2 * report.certified_k1, disc, tolerance)
