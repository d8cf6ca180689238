from fractions import Fraction

import pytest
from hypothesis import strategies as st

from torusops.gaussian import GaussianRational
from torusops.series import Box, TrigSeries

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion."""

    class _Recorder:
        def __init__(self):
            self.label = None

        def __call__(self, label: str, ok: bool, detail: str = "") -> None:
            ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
            assert ok, f"{label}: {detail}"

    return _Recorder()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# -- shared strategies -------------------------------------------------------------

small_fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gaussians = st.builds(GaussianRational, small_fractions, small_fractions)
nonzero_gaussians = gaussians.filter(bool)


@st.composite
def boxes(draw, max_side: int = 6):
    a = draw(st.integers(-max_side, max_side))
    b = draw(st.integers(a, a + max_side))
    c = draw(st.integers(-max_side, max_side))
    d = draw(st.integers(c, c + max_side))
    return Box(a, b, c, d)


@st.composite
def trig_polys(draw, radius: int = 3, max_terms: int = 6):
    idx = st.tuples(st.integers(-radius, radius), st.integers(-radius, radius))
    coeffs = draw(st.dictionaries(idx, gaussians, max_size=max_terms))
    return TrigSeries(coeffs)


@st.composite
def boxed_series(draw, max_side: int = 5, max_terms: int = 10):
    box = draw(boxes(max_side))
    pts = list(box)
    keys = draw(st.lists(st.sampled_from(pts), max_size=max_terms, unique=True))
    return TrigSeries({k: draw(gaussians) for k in keys}, box)


def frac(s) -> Fraction:
    return Fraction(s)
