"""The periodic Mizohata equation ``du/dx1 + i sin(x1) du/dx2 = f``.

In coefficients the equation couples only neighbours in ``k1``:

    P_0(k) u_k + P_+(k1-1, k2) u_{k1-1,k2} + P_-(k1+1, k2) u_{k1+1,k2} = f_k

with ``P_0 = i xi1`` and ``P_(+-1,0) = +-(i/2) xi2``.  The recurrences below
are read off the operator's frequency form rather than transcribed, so the
residual ``L u - f`` vanishes by construction and is re-checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, isqrt

from .gaussian import GaussianRational
from .linsolve import SparseSystem
from .operators import TorusOperator, apply, mizohata_operator
from .series import (
    Box,
    LatticeIndex,
    TrigSeries,
    delta,
    parity_project,
    partial_pairing_x1,
    partial_pairing_x2,
)

__all__ = [
    "MizohataSolution",
    "solve_odd",
    "factorial_growth_constant",
    "reconstruct_homogeneous",
    "TraceData",
    "IncompatibleTraces",
    "extract_traces",
    "check_compatibility",
    "Reconstruction",
    "reconstruct_general",
    "sqrt_upper",
]

_ZERO = GaussianRational(0)


def sqrt_upper(q: Fraction, bits: int = 40) -> Fraction:
    """Smallest multiple of ``2**-bits`` that is ``>= sqrt(q)``."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative argument")
    scaled = q * 4 ** bits
    n = -(-scaled.numerator // scaled.denominator)
    r = isqrt(n)
    if r * r < n:
        r += 1
    return Fraction(r, 2 ** bits)


def factorial_growth_constant(u: TrigSeries, axis: int = 1) -> Fraction:
    """Exact ``max_k |u_k|^2 / ((|k_axis| + 1)!)^2``: the square of the least ``c``
    with ``|u_k| <= c (|k_axis| + 1)!`` on the stored data."""
    best = Fraction(0)
    for k, c in u.items():
        f = factorial(abs(k[axis - 1]) + 1)
        v = c.abs2() / (f * f)
        if v > best:
            best = v
    return best


@dataclass
class MizohataSolution:
    u: TrigSeries
    growth_constant_sq: Fraction
    growth_constant: Fraction
    residual_box: Box

    def to_obj(self) -> dict:
        return {
            "growth_constant": str(self.growth_constant),
            "growth_constant_sq": str(self.growth_constant_sq),
            "residual_box": list(self.residual_box.bounds()),
            "box": list(self.u.box.bounds()),
            "nonzero": len(self.u),
        }


def _column_symbols(L: TorusOperator):
    syms = {(n[0], n[1]): p for n, p in L.freq_form.items()}
    if not set(syms) <= {(0, 0), (1, 0), (-1, 0)}:
        raise ValueError("recurrence needs frequency support in {-1, 0, 1} x {0}")
    zero = lambda *_: _ZERO  # noqa: E731
    return syms.get((0, 0), zero), syms.get((1, 0), zero), syms.get((-1, 0), zero)


def _check_box(box: Box) -> int:
    if not box.is_symmetric(1):
        raise ValueError(f"box {box.bounds()} must be symmetric in k1")
    if box.n1_max < 2:
        raise ValueError("box too small to verify any residual (need |k1| <= N with N >= 2)")
    return box.n1_max


def solve_odd(f: TrigSeries, box: Box | None = None) -> MizohataSolution:
    """The unique solution odd in ``x1`` of the Mizohata equation on ``box``.

    ``f`` must be even in ``x1`` and complete on ``box`` (default: its own
    box), with ``f_(0,0) = 0`` when the ``k2 = 0`` column is present.  The
    identity ``L u = f`` is verified exactly on ``box`` shrunk by one in
    ``k1``.
    """
    box = box or f.box
    if box is None:
        raise ValueError("a finite f needs an explicit box")
    N = _check_box(box)
    fb = f.restrict(box)
    for k, c in fb.items():
        if fb[(-k[0], k[1])] != c:
            raise ValueError(f"f not even in x1 at {tuple(k)}")
    if (0, 0) in box and fb[(0, 0)]:
        raise ValueError("f_(0,0) must vanish for the k2 = 0 column to be solvable")

    L = mizohata_operator()
    p0, pp, pm = _column_symbols(L)
    u: dict[LatticeIndex, GaussianRational] = {}
    for k2 in range(box.n2_min, box.n2_max + 1):
        col = [_ZERO] * (N + 1)
        if not pm(1, k2):
            # the shift symbols vanish on this column: the equation is diagonal
            for k1 in range(1, N + 1):
                col[k1] = fb[(k1, k2)] / p0(k1, k2)
        else:
            # k1 = 0 equation with u_{-1} = -u_1 and u_0 = 0
            col[1] = fb[(0, k2)] / (pm(1, k2) - pp(-1, k2))
            for k1 in range(1, N):
                rest = fb[(k1, k2)] - p0(k1, k2) * col[k1] - pp(k1 - 1, k2) * col[k1 - 1]
                col[k1 + 1] = rest / pm(k1 + 1, k2)
        for k1 in range(1, N + 1):
            if col[k1]:
                u[LatticeIndex(k1, k2)] = col[k1]
                u[LatticeIndex(-k1, k2)] = -col[k1]
    sol = TrigSeries(u, box)
    residual_box = box.shrink(1, 0)
    if not apply(L, sol).equal_on(fb.restrict(residual_box), residual_box):
        raise ArithmeticError("exact residual check failed")
    c2 = factorial_growth_constant(sol)
    return MizohataSolution(sol, c2, sqrt_upper(c2), residual_box)


def reconstruct_homogeneous(u0: TrigSeries, u1: TrigSeries, box: Box) -> TrigSeries:
    """The even-in-``x1`` solution of ``L u = 0`` with ``<u, 1>_{x1} = u0`` and
    ``<u, exp(i x1)>_{x1} = u1``.

    ``u0`` and ``u1`` are series in ``x2`` (stored on the ``k1 = 0``
    column).  Since ``<u, exp(i x1)>_{x1}`` reads the ``k1 = -1`` row and
    ``u`` is even, ``u1`` fixes the rows ``k1 = +-1``.
    """
    N = _check_box(box)
    L = mizohata_operator()
    p0, pp, pm = _column_symbols(L)
    u: dict[LatticeIndex, GaussianRational] = {}
    for k2 in range(box.n2_min, box.n2_max + 1):
        a, b = u0[(0, k2)], u1[(0, k2)]
        col = [_ZERO] * (N + 1)
        col[0] = a
        if not pm(1, k2):
            if b:
                raise ValueError(f"u1 must vanish at k2={k2}: the equation forces u_(k1,{k2}) = 0 for k1 != 0")
        else:
            col[1] = b
            for k1 in range(1, N):
                rest = -p0(k1, k2) * col[k1] - pp(k1 - 1, k2) * col[k1 - 1]
                col[k1 + 1] = rest / pm(k1 + 1, k2)
        if col[0]:
            u[LatticeIndex(0, k2)] = col[0]
        for k1 in range(1, N + 1):
            if col[k1]:
                u[LatticeIndex(k1, k2)] = col[k1]
                u[LatticeIndex(-k1, k2)] = col[k1]
    return TrigSeries(u, box)


# -- general operators: reconstruction from traces ----------------------------------


@dataclass
class TraceData:
    """Traces of a solution along both axes.

    ``row_traces[q]`` is ``<u, exp(i q x2)>_{x2}``, a series in ``x1`` on the
    ``k2 = 0`` row; ``col_traces[p]`` is ``<u, exp(i p x1)>_{x1}``, a series
    in ``x2`` on the ``k1 = 0`` column.
    """

    row_traces: list[TrigSeries]
    col_traces: list[TrigSeries]


class IncompatibleTraces(ValueError):
    def __init__(self, p: int, q: int, left, right):
        super().__init__(f"incompatible traces at (p, q) = ({p}, {q}): {left} != {right}")
        self.p = p
        self.q = q


def extract_traces(u: TrigSeries, s1: int, s2: int) -> TraceData:
    rows = [partial_pairing_x2(u, delta(0, q)) for q in range(s2 + 1)]
    cols = [partial_pairing_x1(u, delta(p, 0)) for p in range(s1 + 1)]
    return TraceData(rows, cols)


def check_compatibility(traces: TraceData) -> None:
    """``<u_q1, e^{ipx1}>_{x1} = <u_p2, e^{iqx2}>_{x2}`` for every ``p``, ``q`` in range.

    Both sides are the single coefficient ``u_{-p,-q}`` seen from the two
    trace families; the first disagreeing pair is reported.
    """
    for p in range(len(traces.col_traces)):
        for q in range(len(traces.row_traces)):
            left = partial_pairing_x1(traces.row_traces[q], delta(p, 0))[(0, 0)]
            right = partial_pairing_x2(traces.col_traces[p], delta(0, q))[(0, 0)]
            if left != right:
                raise IncompatibleTraces(p, q, left, right)


@dataclass
class Reconstruction:
    u: TrigSeries
    unique: bool
    free: list = field(default_factory=list)


def reconstruct_general(
    L: TorusOperator,
    traces: TraceData,
    box: Box,
    rhs: TrigSeries | None = None,
    max_side: int = 65,
) -> Reconstruction:
    """Solve ``(L u)_k = rhs_k`` on the interior of ``box`` together with the
    trace constraints, exactly over Q(i).

    ``rhs`` defaults to zero.  ``unique`` reports whether every coefficient
    in ``box`` was determined; undetermined ones are set to zero.
    """
    if box.n1_max - box.n1_min + 1 > max_side or box.n2_max - box.n2_min + 1 > max_side:
        raise ValueError(f"box {box.bounds()} exceeds the {max_side}x{max_side} cap")
    if len(traces.col_traces) < L.s1 + 1 or len(traces.row_traces) < L.s2 + 1:
        raise ValueError(f"need {L.s1 + 1} x1-pairing traces and {L.s2 + 1} x2-pairing traces")
    check_compatibility(traces)

    variables = sorted(box, key=lambda k: (k[1], k[0]))
    system = SparseSystem(variables)
    inner = L.output_box(box)
    for k in inner:
        row: dict[LatticeIndex, GaussianRational] = {}
        for n, p in L.freq_form.items():
            src = LatticeIndex(k[0] - n[0], k[1] - n[1])
            v = p(src[0], src[1])
            if v:
                row[src] = row.get(src, _ZERO) + v
        system.add_equation(row, _ZERO if rhs is None else rhs[k], label=("L", tuple(k)))
    for p, t in enumerate(traces.col_traces):
        if box.n1_min <= -p <= box.n1_max:
            for k2 in range(box.n2_min, box.n2_max + 1):
                system.fix(LatticeIndex(-p, k2), t[(0, k2)], label=("col", p, k2))
    for q, t in enumerate(traces.row_traces):
        if box.n2_min <= -q <= box.n2_max:
            for k1 in range(box.n1_min, box.n1_max + 1):
                system.fix(LatticeIndex(k1, -q), t[(k1, 0)], label=("row", q, k1))
    sol = system.solve()
    u = TrigSeries({k: v for k, v in sol.values.items() if v}, box)
    return Reconstruction(u, sol.unique, sol.free)


def is_even_x1(u: TrigSeries) -> bool:
    return parity_project(u, 1, "odd").items() == []
