"""Space tags for the scale of generalized-function spaces, and a heuristic
growth classifier for truncated coefficient data.

The classifier can only *vote*: a finite box never certifies asymptotics.
Every :class:`GrowthReport` therefore carries ``heuristic=True``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .series import TrigSeries

__all__ = ["SpaceTag", "dual_space", "GrowthReport", "ModelFit", "classify_growth", "shell_maxima"]

_KINDS = ("Hm", "Hinf", "HminusInf", "E0", "E0dual", "L1Fact", "L1FactDual")
_DUAL = {
    "Hinf": "HminusInf",
    "HminusInf": "Hinf",
    "E0": "E0dual",
    "E0dual": "E0",
    "L1Fact": "L1FactDual",
    "L1FactDual": "L1Fact",
}


@dataclass(frozen=True)
class SpaceTag:
    kind: str
    m: Fraction | None = None
    axis: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.kind == "Hm":
            if self.m is None:
                raise ValueError("Hm needs an index m")
            object.__setattr__(self, "m", Fraction(self.m))
        elif self.m is not None:
            raise ValueError(f"{self.kind} takes no index")
        if self.kind in ("L1Fact", "L1FactDual"):
            if self.axis not in (1, 2):
                raise ValueError("factorial spaces need axis 1 or 2")
        elif self.axis is not None:
            raise ValueError(f"{self.kind} takes no axis")

    @classmethod
    def Hm(cls, m) -> SpaceTag:
        return cls("Hm", m=Fraction(m))

    @classmethod
    def L1Fact(cls, axis: int = 1) -> SpaceTag:
        return cls("L1Fact", axis=axis)

    @classmethod
    def L1FactDual(cls, axis: int = 1) -> SpaceTag:
        return cls("L1FactDual", axis=axis)

    def dual(self) -> SpaceTag:
        return dual_space(self)

    def __str__(self):
        if self.kind == "Hm":
            return f"H^{self.m}"
        if self.axis is not None:
            return f"{self.kind}(axis={self.axis})"
        return self.kind

    def to_obj(self) -> dict:
        obj: dict = {"kind": self.kind}
        if self.m is not None:
            obj["m"] = str(self.m)
        if self.axis is not None:
            obj["axis"] = self.axis
        return obj


def dual_space(tag: SpaceTag) -> SpaceTag:
    """Dual in the H^0 pairing: H^m <-> H^-m, E0 <-> E0*, l1(|k_i|!) <-> l1*(|k_i|!)."""
    if tag.kind == "Hm":
        return SpaceTag.Hm(-tag.m)
    return SpaceTag(_DUAL[tag.kind], axis=tag.axis)


@dataclass
class ModelFit:
    name: str
    slope: float
    intercept: float
    rel_residual: float


@dataclass
class GrowthReport:
    tag: SpaceTag | None
    model: str
    exponent: float | None
    fits: dict[str, ModelFit] = field(default_factory=dict)
    shells: int = 0
    heuristic: bool = True

    def to_obj(self) -> dict:
        return {
            "tag": None if self.tag is None else self.tag.to_obj(),
            "model": self.model,
            "exponent": self.exponent,
            "shells": self.shells,
            "heuristic": self.heuristic,
            "fits": {
                k: {"slope": f.slope, "intercept": f.intercept, "rel_residual": f.rel_residual}
                for k, f in sorted(self.fits.items())
            },
        }


def shell_maxima(u: TrigSeries) -> dict[int, float]:
    """Per-shell ``log max |u_k|`` over ``max(|k1|, |k2|) = s`` (``-inf`` for empty shells)."""
    out: dict[int, float] = {}
    for k, c in u.items():
        s = max(abs(k[0]), abs(k[1]))
        v = 0.5 * math.log(float(c.abs2())) if c.abs2() > 0 else -math.inf
        out[s] = max(out.get(s, -math.inf), v)
    return out


def _axis_maxima(u: TrigSeries, axis: int) -> dict[int, float]:
    out: dict[int, float] = {}
    for k, c in u.items():
        t = abs(k[axis - 1])
        v = 0.5 * math.log(float(c.abs2()))
        out[t] = max(out.get(t, -math.inf), v)
    return out


def _fit(name: str, x: np.ndarray, y: np.ndarray) -> ModelFit:
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    spread = float(np.linalg.norm(y - y.mean()))
    rn = float(np.linalg.norm(resid))
    rel = 0.0 if rn < 1e-12 else (math.inf if spread == 0 else rn / spread)
    return ModelFit(name, float(coef[0]), float(coef[1]), rel)


def _complete_radius(u: TrigSeries) -> int:
    b = u.box
    return min(-b.n1_min, b.n1_max, -b.n2_min, b.n2_max)


def classify_growth(
    u: TrigSeries,
    min_shells: int = 8,
    threshold: float = 0.1,
    tie: float = 0.02,
) -> GrowthReport:
    """Vote for the most regular space in the chain
    ``E0 < Hinf < Hm < HminusInf < L1FactDual`` consistent with the data.

    Models fitted to shell maxima ``M(s)``: polynomial
    ``log M ~ log(1 + s^2)``, exponential ``log M ~ s``, and per-axis
    factorial ``log M_i(t) ~ log t!`` on the axis maxima.  A model is
    accepted when its relative residual is below ``threshold``; among
    accepted models those within ``tie`` of the best are resolved toward
    the more regular space.
    """
    if u.box is None:
        return GrowthReport(SpaceTag("Hinf"), "finite", None, shells=0)
    radius = _complete_radius(u)
    if radius < min_shells:
        raise ValueError(f"too few complete shells: {radius} < {min_shells}")

    maxima = shell_maxima(u)
    s_vals = np.arange(1, radius + 1)
    logs = np.array([maxima.get(int(s), -math.inf) for s in s_vals])
    nonzero = np.isfinite(logs)
    if not nonzero.any():
        return GrowthReport(SpaceTag("Hinf"), "finite", None, shells=radius)
    last = int(s_vals[nonzero][-1])
    # trailing empty shells: eventually zero on the box
    if radius - last >= max(2, radius // 4):
        return GrowthReport(SpaceTag("Hinf"), "finite", None, shells=radius)

    s = s_vals[nonzero].astype(float)
    y = logs[nonzero]
    if len(s) < 3:
        raise ValueError("too few nonzero shells to fit")
    fits = {
        "polynomial": _fit("polynomial", np.log1p(s * s), y),
        "exponential": _fit("exponential", s, y),
    }
    for axis in (1, 2):
        am = _axis_maxima(u.restrict(u.box), axis)
        t = np.array([float(t) for t in range(1, radius + 1) if t in am])
        if len(t) >= 3:
            ya = np.array([am[int(v)] for v in t])
            lg = np.array([math.lgamma(v + 1.0) for v in t])
            fits[f"factorial{axis}"] = _fit(f"factorial{axis}", lg, ya)

    # regularity rank of each model's implied space (lower = more regular)
    def rank(name: str) -> tuple[int, SpaceTag | None, float]:
        f = fits[name]
        if name == "exponential":
            if f.slope < -1e-3:
                return 0, SpaceTag("E0"), -f.slope
            return 4, None, -f.slope
        if name == "polynomial":
            alpha = -2.0 * f.slope
            sup_m = alpha - 1.0
            m = Fraction(math.floor(2 * sup_m - 1e-9), 2)
            return 1, SpaceTag.Hm(m), -f.slope
        axis = int(name[-1])
        if f.slope > 0.25:
            return 3, SpaceTag.L1FactDual(axis), f.slope
        return 4, None, f.slope

    accepted = [n for n, f in fits.items() if f.rel_residual < threshold]
    if not accepted:
        return GrowthReport(None, "none", None, fits=fits, shells=radius)
    best = min(fits[n].rel_residual for n in accepted)
    close = [n for n in accepted if fits[n].rel_residual <= best + tie]
    winner = min(close, key=lambda n: (rank(n)[0], fits[n].rel_residual))
    _, tag, exponent = rank(winner)
    if tag is None:
        return GrowthReport(None, winner, exponent, fits=fits, shells=radius)
    return GrowthReport(tag, winner, exponent, fits=fits, shells=radius)
