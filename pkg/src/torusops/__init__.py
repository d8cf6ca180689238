"""Exact Fourier-side calculus for operators with trigonometric-polynomial
coefficients on the 2-torus."""

from .gaussian import GaussianRational, I, as_gaussian
from .growth import GrowthReport, SpaceTag, classify_growth, dual_space
from .hypo import HypoReport, Verdict, classify, empirical_exponent, sobolev_gain
from .mizohata import (
    check_compatibility,
    extract_traces,
    reconstruct_general,
    reconstruct_homogeneous,
    solve_odd,
)
from .operators import (
    TorusOperator,
    apply,
    check_assumption1,
    laplacian,
    mizohata_operator,
)
from .sections import (
    AtomEnvelope,
    Max,
    Min,
    Section,
    atom_leq,
    more_regular,
    operator_image,
    parse_envelope,
    section_inf,
    section_sup,
    solution_section,
)
from .series import Box, LatticeIndex, TrigSeries, delta, sobolev_norm_sq
from .symbols import SymbolPolynomial, parse_term_list

__version__ = "0.1.0"

__all__ = [
    "GaussianRational",
    "I",
    "as_gaussian",
    "GrowthReport",
    "SpaceTag",
    "classify_growth",
    "dual_space",
    "HypoReport",
    "Verdict",
    "classify",
    "empirical_exponent",
    "sobolev_gain",
    "check_compatibility",
    "extract_traces",
    "reconstruct_general",
    "reconstruct_homogeneous",
    "solve_odd",
    "TorusOperator",
    "apply",
    "check_assumption1",
    "laplacian",
    "mizohata_operator",
    "AtomEnvelope",
    "Max",
    "Min",
    "Section",
    "atom_leq",
    "more_regular",
    "operator_image",
    "parse_envelope",
    "section_inf",
    "section_sup",
    "solution_section",
    "Box",
    "LatticeIndex",
    "TrigSeries",
    "delta",
    "sobolev_norm_sq",
    "SymbolPolynomial",
    "parse_term_list",
]
