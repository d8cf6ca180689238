import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusops.gaussian import GaussianRational
from torusops.growth import SpaceTag
from torusops.operators import TorusOperator, laplacian, mizohata_operator
from torusops.sections import (
    AtomEnvelope,
    EnvelopeSyntaxError,
    Max,
    Min,
    Section,
    atom_leq,
    dual_membership,
    dual_space,
    expr_leq,
    more_regular,
    operator_image,
    parse_envelope,
    pointwise_equal,
    principal,
    probe_leq,
    section_for_tag,
    section_inf,
    section_leq,
    section_sup,
    simplify,
    solution_section,
)
from torusops.series import Box, TrigSeries, delta
from torusops.symbols import parse_term_list

small = st.sampled_from([Fraction(n, 2) for n in range(-4, 5)])
unit = st.sampled_from([Fraction(-1), Fraction(0), Fraction(1)])
atoms = st.builds(AtomEnvelope, small, unit, unit, unit, unit)


def exprs(depth=2):
    if depth == 0:
        return atoms
    sub = exprs(depth - 1)
    return st.one_of(
        atoms,
        st.lists(sub, min_size=1, max_size=3).map(lambda xs: Max(tuple(xs))),
        st.lists(sub, min_size=1, max_size=3).map(lambda xs: Min(tuple(xs))),
    )


# -- atoms and grammar ------------------------------------------------------------------


def test_atom_value_by_hand():
    e = AtomEnvelope(Fraction(1, 2), 1, 0, 1, 0)
    k = (3, 4)
    assert math.isclose(e.log_eval(k), 0.5 * math.log(26) + 3 + math.log(6))
    assert math.isclose(e.log_grid(5)[3 + 5, 4 + 5], e.log_eval(k))


@settings(max_examples=60)
@given(exprs())
def test_grammar_round_trip(e):
    assert parse_envelope(e.to_text()) == e


def test_bare_tuple_form():
    assert parse_envelope("max((1/2,0,0,0,0), atom(-1, 0, 0, 0, 0))") == Max(
        (AtomEnvelope(Fraction(1, 2)), AtomEnvelope(-1))
    )


@pytest.mark.parametrize(
    "text,column",
    [("atom(1, 2)", 10), ("max()", 5), ("atom(1, 0, 0, 0, 0) x", 21), ("nope(1)", 1), ("atom(1/0,0,0,0,0)", 6)],
)
def test_parse_errors_report_column(text, column):
    with pytest.raises(EnvelopeSyntaxError) as exc:
        parse_envelope(text)
    assert exc.value.column == column


# -- order on atoms --------------------------------------------------------------------


def test_atom_leq_examples():
    assert atom_leq(AtomEnvelope(0), AtomEnvelope(1))
    e1, e2 = AtomEnvelope(b1=1), AtomEnvelope(b2=1)
    assert not atom_leq(e1, e2) and not atom_leq(e2, e1)
    poly = AtomEnvelope(5)
    expo = AtomEnvelope(b1=Fraction(1, 100), b2=Fraction(1, 100))
    assert atom_leq(poly, expo) and not atom_leq(expo, poly)


def test_polynomial_below_slow_exponential_on_far_shells():
    # (1+k^2)^5 e^{-0.01(|k1|+|k2|)} peaks near |k| = 1000 and decreases after
    poly = AtomEnvelope(5)
    expo = AtomEnvelope(b1=Fraction(1, 100), b2=Fraction(1, 100))
    ratio = [poly.log_eval((s, 0)) - expo.log_eval((s, 0)) for s in (2000, 4000, 8000, 16000)]
    assert ratio == sorted(ratio, reverse=True)


@given(atoms)
def test_atom_leq_reflexive(e):
    assert atom_leq(e, e)


@given(atoms, atoms, atoms)
def test_atom_leq_transitive(a, b, c):
    if atom_leq(a, b) and atom_leq(b, c):
        assert atom_leq(a, c)


@given(atoms, atoms)
def test_mutual_boundedness_means_same_growth(a, b):
    if atom_leq(a, b) and atom_leq(b, a):
        assert a == b


def test_atom_leq_true_means_ratio_does_not_trend_up():
    rng = random.Random(7)
    pick = lambda vals: vals[rng.randrange(len(vals))]  # noqa: E731
    halves = [Fraction(n, 2) for n in range(-4, 5)]
    units = [Fraction(-1), Fraction(0), Fraction(1)]
    disagreements = []
    for _ in range(200):
        e1, e2 = (AtomEnvelope(pick(halves), pick(units), pick(units), pick(units), pick(units)) for _ in range(2))
        if atom_leq(e1, e2) and not probe_leq(e1, e2):
            disagreements.append((e1, e2))
    assert disagreements == []


# -- expression order and simplification ----------------------------------------------


@settings(max_examples=60, deadline=None)
@given(exprs(), exprs())
def test_expr_leq_is_sound_on_probes(e1, e2):
    if expr_leq(e1, e2):
        assert probe_leq(e1, e2)


@settings(max_examples=60, deadline=None)
@given(exprs())
def test_simplify_keeps_mutual_boundedness(e):
    s = simplify(e)
    assert expr_leq(s, e) and expr_leq(e, s)
    assert len(s.atoms()) <= len(e.atoms())


def test_expr_leq_unknown_is_none():
    e1, e2 = AtomEnvelope(b1=1), AtomEnvelope(b2=1)
    assert expr_leq(e1, e2) is None
    assert expr_leq(e1, Max((e1, e2))) is True
    assert expr_leq(Min((e1, e2)), e2) is True


# -- sections and lattice --------------------------------------------------------------


def test_sup_prunes_dominated_atom():
    h1, h2 = principal("atom(1/2, 0, 0, 0, 0)"), principal("atom(1, 0, 0, 0, 0)")
    assert section_sup(h1, h2).atom_form == AtomEnvelope(1)
    assert section_inf(h1, h2).atom_form == AtomEnvelope(Fraction(1, 2))
    assert section_sup(h1, h2, simplify_result=False).atom_form == Max((AtomEnvelope(Fraction(1, 2)), AtomEnvelope(1)))


def test_sup_of_incomparable_atoms_keeps_both():
    s = section_sup(principal("(0,1,0,0,0)"), principal("(0,0,1,0,0)"))
    assert s.to_text() == "max(atom(0, 1, 0, 0, 0), atom(0, 0, 1, 0, 0))"


@settings(max_examples=40, deadline=None)
@given(exprs(1), exprs(1), exprs(1))
def test_section_lattice_laws_pointwise(a, b, c):
    A, B, C = principal(a), principal(b), principal(c)
    sup = lambda x, y: section_sup(x, y, simplify_result=False)  # noqa: E731
    inf = lambda x, y: section_inf(x, y, simplify_result=False)  # noqa: E731
    R = 12
    assert pointwise_equal(sup(A, B).atom_form, sup(B, A).atom_form, R)
    assert pointwise_equal(inf(A, sup(B, C)).atom_form, sup(inf(A, B), inf(A, C)).atom_form, R)
    assert pointwise_equal(sup(A, inf(B, C)).atom_form, inf(sup(A, B), sup(A, C)).atom_form, R)
    assert pointwise_equal(sup(A, inf(A, B)).atom_form, a, R)
    assert section_leq(section_sup(A, A), A) and section_leq(A, section_sup(A, A))


def test_min_grid_is_pointwise_min():
    a, b = AtomEnvelope(1), AtomEnvelope(b1=-1)
    assert np.array_equal(Min((a, b)).log_grid(6), np.minimum(a.log_grid(6), b.log_grid(6)))


def test_sections_for_tags():
    assert section_for_tag(SpaceTag.Hm(3)).atom_form == AtomEnvelope(Fraction(-3, 2))
    assert section_for_tag(SpaceTag("E0")).atom_form == AtomEnvelope(b1=-1, b2=-1)
    assert section_for_tag(SpaceTag.L1FactDual(2)).atom_form == AtomEnvelope(c2=1)
    assert section_for_tag(SpaceTag("Hinf")).kind == "Hinf"
    with pytest.raises(ValueError):
        section_for_tag(SpaceTag("E0dual"))


def test_non_principal_sections_have_no_generator():
    with pytest.raises(ValueError):
        Section(kind="Hinf").log_eval((0, 0))
    with pytest.raises(ValueError):
        section_sup(Section(kind="Hinf"), principal("(0,0,0,0,0)"))


# -- more regular ----------------------------------------------------------------------


def _ones(box, fn=lambda k: 1):
    return TrigSeries({k: fn(k) for k in box}, box)


def test_more_regular_reflexive():
    box = Box.symmetric(4)
    u = _ones(box, lambda k: GaussianRational(k[0] + 5, k[1]))
    res = more_regular(u, u, box)
    assert res.holds and res.constant_sq == 1 and res.stabilizing


def test_more_regular_non_stabilizing():
    box = Box.symmetric(8)
    u = _ones(box)
    v = _ones(box, lambda k: Fraction(1, abs(k[0]) + 1))
    res = more_regular(u, v, box)
    assert res.holds and res.constant_sq == 81
    assert not res.stabilizing


def test_more_regular_witness():
    box = Box.symmetric(2)
    res = more_regular(delta(1, 0).with_box(box), TrigSeries({}, box), box)
    assert not res.holds and tuple(res.witness) == (1, 0)


@settings(max_examples=30)
@given(st.data())
def test_more_regular_transitive(data):
    box = Box.symmetric(2)
    vals = st.integers(1, 9)
    u, v, w = (_ones(box, lambda k: data.draw(vals)) for _ in range(3))
    uv, vw, uw = more_regular(u, v, box), more_regular(v, w, box), more_regular(u, w, box)
    assert uw.constant_sq <= uv.constant_sq * vw.constant_sq


# -- duality ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "tag", [SpaceTag.Hm(3), SpaceTag("E0"), SpaceTag("Hinf"), SpaceTag.L1Fact(1), SpaceTag.L1FactDual(2)]
)
def test_dual_is_an_involution(tag):
    assert dual_space(dual_space(tag)) == tag


def test_dual_of_hm():
    assert dual_space(SpaceTag.Hm(3)) == SpaceTag.Hm(-3)


def test_factorial_series_against_factorial_section_is_not_summable():
    box = Box.symmetric(16, 2)
    u = _ones(box, lambda k: math.factorial(abs(k[0])))
    res = dual_membership(u, section_for_tag(SpaceTag.L1Fact(1)), box)
    assert res.verdict == "NON_SUMMABLE"


def test_geometric_series_against_l2_is_summable():
    box = Box.symmetric(32)
    u = _ones(box, lambda k: Fraction(1, 2 ** (abs(k[0]) + abs(k[1]))))
    res = dual_membership(u, section_for_tag(SpaceTag.Hm(0)), box)
    assert res.verdict == "SUMMABLE"


# -- operators on sections --------------------------------------------------------------


def _log_ratio_shell_max(num, den, s):
    pts = [(s, t) for t in range(-s, s + 1)] + [(t, s) for t in range(-s, s + 1)]
    pts += [(-p[0], -p[1]) for p in pts]
    return max(num.log_eval(p) - den.log_eval(p) for p in pts)


def test_identity_image_is_unchanged():
    s = principal("max((1/2,0,0,0,0),(0,-1,0,1,0))")
    img = operator_image(TorusOperator({(0, 0): 1}), s)
    assert img.atom_form == s.atom_form
    for k in Box.symmetric(5):
        assert math.isclose(img.log_eval(k), s.log_eval(k))


def test_laplacian_raises_polynomial_exponent():
    s = principal("(-3/2,0,0,0,0)")
    img = operator_image(laplacian(), s)
    assert img.atom_form == AtomEnvelope(Fraction(-1, 2))
    for k in Box.symmetric(5):
        if k != (0, 0):
            assert math.isclose(img.log_eval(k), math.log(k[0] ** 2 + k[1] ** 2) + s.log_eval(k))


def test_mizohata_keeps_the_factorial_class():
    s = principal("(0,0,0,1,0)")
    img = operator_image(mizohata_operator(), s)
    assert img.atom_form.c1 == 1
    # the atom form bounds the pointwise image: the log ratio stays bounded on far shells
    ratios = [_log_ratio_shell_max(img, img.atom_form, r) for r in (8, 16, 32, 64)]
    assert max(ratios) <= ratios[0] + 1e-9
    # and the image stays in the same factorial class: the log ratio to |k1|! grows at most logarithmically
    growth = [_log_ratio_shell_max(img, s.atom_form, r) for r in (16, 32, 64)]
    assert growth[-1] - growth[0] < 3 * math.log(4) + 1


@settings(max_examples=40, deadline=None)
@given(atoms, atoms)
def test_operator_image_is_monotone(a, b):
    # w_a <= C w_b on the sources gives w'_a <= C w'_b on the image box
    R = 6
    C = max(a.log_eval(k) - b.log_eval(k) for k in Box.symmetric(R + 1))
    for L in (laplacian(), mizohata_operator()):
        ia, ib = operator_image(L, principal(a)), operator_image(L, principal(b))
        for k in Box.symmetric(R):
            va, vb = ia.log_eval(k), ib.log_eval(k)
            if va != -math.inf:
                assert va <= vb + C + 1e-9


def test_image_atom_form_bounds_the_image():
    s = principal("max((1,0,0,1,0),(0,-1,1,0,0))")
    img = operator_image(mizohata_operator(), s)
    ratios = [_log_ratio_shell_max(img, img.atom_form, r) for r in (8, 16, 32, 64)]
    # an unbounded |k|^(1/2) excess would add about 1 over these shells
    assert max(ratios) - ratios[0] < 0.1


def test_non_principal_image_keeps_kind():
    assert operator_image(laplacian(), Section(kind="Hinf")).kind == "Hinf"


# -- solution sections -----------------------------------------------------------------


def test_laplacian_keeps_smooth_data_smooth():
    sol = solution_section(laplacian(), section_for_tag(SpaceTag("Hinf")))
    assert sol.kind == "Hinf" and sol.provenance == "certified"


def test_elliptic_quotient_lowers_polynomial_exponent():
    L = TorusOperator.constant_coefficient(parse_term_list("1 2 0, 1 0 2"))
    G = principal("(0,0,0,0,0)")
    sol = solution_section(L, G, search_box=Box.symmetric(4))
    assert sol.atom_form == AtomEnvelope(-1)
    for k in Box.symmetric(6):
        if k != (0, 0):
            assert math.isclose(sol.log_eval(k), -math.log(k[0] ** 2 + k[1] ** 2))


def test_mizohata_solution_section_is_factorial():
    sol = solution_section(mizohata_operator(), section_for_tag(SpaceTag.Hm(2)))
    assert sol.claimed == SpaceTag.L1FactDual(1)
    assert all(a.c1 == 1 for a in sol.atom_form.atoms())
    assert sol.provenance == "bound"


def test_general_operator_gives_empirical_envelope():
    # multiplication by 3 + 2 cos x1 never vanishes
    L = TorusOperator({(0, 0): TrigSeries({(0, 0): 3, (1, 0): 1, (-1, 0): 1})})
    sol = solution_section(L, principal("(-1,0,0,0,0)"), sample_box=Box.symmetric(6))
    assert sol.provenance == "empirical"
    assert math.isfinite(sol.log_eval((0, 0)))
    with pytest.raises(KeyError):
        sol.log_eval((9, 0))


def test_solution_section_refuses_when_both_conditions_fail():
    # P_0 = xi1 xi2 vanishes on both axes and there is nothing else to lean on
    L = TorusOperator.constant_coefficient(parse_term_list("1 1 1"))
    with pytest.raises(ValueError):
        solution_section(L, principal("(0,0,0,0,0)"), search_box=Box.symmetric(3))
