from fractions import Fraction
from math import gcd

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from torusops.hypo import (
    HomogeneousPoly,
    Verdict,
    classify,
    empirical_exponent,
    integer_lattice_zeros,
    sobolev_gain,
)
from torusops.operators import TorusOperator, apply
from torusops.symbols import SymbolPolynomial, parse_term_list


def brute_zero_rays(P: SymbolPolynomial, radius: int) -> set:
    rays = set()
    for a in range(-radius, radius + 1):
        for b in range(-radius, radius + 1):
            if (a, b) != (0, 0) and gcd(a, b) == 1 and not P(a, b):
                rays.add((a, b) if (a, b) > (0, 0) and (a > 0 or (a == 0 and b > 0)) else (-a, -b))
    return rays


homogeneous = st.builds(
    lambda p, cs: SymbolPolynomial({(i, p - i): c for i, c in enumerate(cs) if c}),
    st.just(3),
    st.lists(st.integers(-3, 3), min_size=4, max_size=4),
).filter(bool)


@settings(max_examples=80)
@given(homogeneous)
def test_lattice_zero_rays_match_brute_force(P):
    got = {tuple(r) for r in integer_lattice_zeros(P)}
    # a rational root p/q of P(x, 1) has |p|, |q| bounded by the coefficients
    assert got == brute_zero_rays(P, 7)


def test_lattice_zero_order():
    rays = integer_lattice_zeros(parse_term_list("1 3 0, -1 1 2"))
    assert [tuple(r) for r in rays] == [(0, 1), (1, 1), (1, -1)]


def test_complex_coefficients_use_common_zeros():
    # (x1 - x2)(x1 + i x2) vanishes only on the real ray (1, 1)
    P = SymbolPolynomial({(2, 0): 1, (1, 1): sympy_i(-1, 1), (0, 2): sympy_i(0, -1)})
    assert [tuple(r) for r in integer_lattice_zeros(P)] == [(1, 1)]


def sympy_i(re, im):
    from torusops.gaussian import GaussianRational

    return GaussianRational(re, im)


GOLDEN = {
    "1 2 0, 1 0 2": (Verdict.HYPOELLIPTIC_CERTIFIED, "elliptic"),
    "1 2 0, -2 0 2": (Verdict.HYPOELLIPTIC_CERTIFIED, "irreducible"),
    "1 4 0, -4 2 2, 4 0 4": (Verdict.HYPOELLIPTIC_CERTIFIED, "algebraic_roots"),
    "1 2 0, -1 0 2": (Verdict.NOT_HYPOELLIPTIC, "lattice_zero"),
    "1 1 1": (Verdict.NOT_HYPOELLIPTIC, "lattice_zero"),
    "1 3 0, -1 1 2": (Verdict.NOT_HYPOELLIPTIC, "lattice_zero"),
    "1 3 0, -2 0 3": (Verdict.HYPOELLIPTIC_CERTIFIED, "irreducible"),
}


@pytest.mark.parametrize("text", sorted(GOLDEN))
def test_golden_table(text):
    rep = classify(parse_term_list(text))
    assert (rep.verdict, rep.branch) == GOLDEN[text]


def test_kernel_witness_is_annihilated():
    P = parse_term_list("1 2 0, -1 0 2")
    rep = classify(P)
    L = TorusOperator.constant_coefficient(P)
    assert apply(L, rep.kernel).items() == []
    assert len(rep.kernel) == 9


def test_liouville_and_roth_exponents():
    rep = classify(parse_term_list("1 3 0, -2 0 3"))
    (cert,) = rep.certificates
    assert cert.minimal_degree == 3 and cert.liouville_exponent == 3
    lo, hi = cert.interval.lo, cert.interval.hi
    assert lo ** 3 < 2 < hi ** 3
    assert rep.certified_k1 == 0
    assert rep.roth_k1 == Fraction(1, 2) and rep.roth_epsilon


def test_squared_pell_multiplicity():
    rep = classify(parse_term_list("1 4 0, -4 2 2, 4 0 4"))
    assert rep.max_multiplicity == 2
    assert all(c.minimal_degree == 2 for c in rep.certificates)
    assert rep.certified_k1 == 0


def test_certificate_minimal_polynomial_against_sympy():
    x = sympy.Symbol("x")
    rep = classify(parse_term_list("1 4 0, -10 2 2, 1 0 4"))  # x^4 - 10x^2 + 1, minimal poly of sqrt2 + sqrt3
    assert rep.verdict is Verdict.HYPOELLIPTIC_CERTIFIED
    assert sympy.Poly(x ** 4 - 10 * x ** 2 + 1, x).is_irreducible
    assert {c.minimal_degree for c in rep.certificates} == {4}
    assert len(rep.certificates) == 4


def test_degree_cap_gives_inconclusive():
    P = parse_term_list("1 9 0, -2 0 9")
    assert classify(P).verdict is Verdict.INCONCLUSIVE
    assert classify(P, scan_radius=64).verdict is Verdict.HYPOELLIPTIC_EMPIRICAL


def test_complex_coefficients_are_not_certified():
    P = SymbolPolynomial({(2, 0): 1, (0, 2): sympy_i(0, 1)})
    assert classify(P).verdict is Verdict.INCONCLUSIVE


def test_homogeneous_poly_validation():
    with pytest.raises(ValueError):
        HomogeneousPoly({(2, 0): 1, (0, 1): 1})
    with pytest.raises(ValueError):
        HomogeneousPoly({})


def test_shell_scan_matches_brute_force():
    P = parse_term_list("1 2 0, -3 0 2")
    scan = empirical_exponent(P, 40)
    r = np.arange(-40, 41)
    n1, n2 = np.meshgrid(r, r, indexing="ij")
    n = n1 * n1 + n2 * n2
    val = (n1 * n1 - 3 * n2 * n2) ** 2
    for s in scan.shells:
        mask = (n > 2 ** s.j) & (n <= 2 ** (s.j + 1))
        assert s.min_abs2 == val[mask].min()
        assert P(*s.argmin).abs2() == s.min_abs2


def test_shell_scan_of_pell_finds_unit_values():
    scan = empirical_exponent(parse_term_list("1 2 0, -2 0 2"), 512)
    assert scan.shell_of((17, 12)).min_abs2 == 1
    assert abs(scan.k1_fit) < 0.1


def test_thread_count_does_not_change_the_scan(monkeypatch):
    P = parse_term_list("1 3 0, -2 0 3")
    monkeypatch.setenv("TORUS_SPEC_THREADS", "1")
    one = empirical_exponent(P, 256)
    monkeypatch.setenv("TORUS_SPEC_THREADS", "4")
    four = empirical_exponent(P, 256)
    assert one.to_obj() == four.to_obj()


def test_sobolev_gain_side_by_side():
    P = parse_term_list("1 2 0, 1 0 2")
    rep = classify(P, scan_radius=256)
    g = sobolev_gain(P, rep)
    assert g.stated_gain == 1 and g.stated_index() == "m + 1 - eps"
    assert g.certified_gain == 2
    assert abs(g.empirical_gain - 2) < 0.05
    assert g.discrepancy


def test_sobolev_gain_needs_certificate():
    P = parse_term_list("1 1 1")
    with pytest.raises(ValueError):
        sobolev_gain(P, classify(P))
