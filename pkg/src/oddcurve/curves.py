"""Dispersion curves: phase functions and extension weights.

Five curve families are supported, identified by a textual tag used in CLI
configs:

    hom-odd:L      phase xi^L (L odd >= 3),    weight |xi|^((L-2)/6)
    hom-even:L     phase |xi|^L (L >= 2),      weight |xi|^((L-2)/6)
    inhom35        phase xi^3 + xi^5,          weight |xi + xi^3|^(1/6)
    inhom-even35   phase |xi|^3 + |xi|^5,      weight |xi + xi^3|^(1/6)
    schrod:+C      phase +C xi^2 (or -C),      weight 1

The weight's grid value at the xi = 0 bin is 0 for the homogeneous and
inhomogeneous families (the continuum weight is continuous and vanishing
there), which needs no special quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "CurveSpec",
    "hom_odd",
    "hom_even",
    "inhom35",
    "inhom_even35",
    "schrod",
    "parse_curve",
    "curve_phase",
    "curve_weight",
    "curvature_coefficient",
]

_KINDS = ("hom-odd", "hom-even", "inhom35", "inhom-even35", "schrod")


@dataclass(frozen=True)
class CurveSpec:
    """One dispersion curve; construct via the helpers or :func:`parse_curve`."""

    kind: str
    ell: int = 0          # hom-odd / hom-even only
    coeff: float = 1.0    # schrod only
    sign: int = 1         # schrod only

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown curve kind {self.kind!r}")
        if self.kind == "hom-odd" and (self.ell < 3 or self.ell % 2 == 0):
            raise ValidationError(f"hom-odd requires odd ell >= 3, got {self.ell}")
        if self.kind == "hom-even" and self.ell < 2:
            raise ValidationError(f"hom-even requires ell >= 2, got {self.ell}")
        if self.kind == "schrod":
            if self.coeff <= 0:
                raise ValidationError("schrod coefficient must be positive")
            if self.sign not in (1, -1):
                raise ValidationError("schrod sign must be +1 or -1")

    @property
    def phase_is_odd(self) -> bool:
        return self.kind in ("hom-odd", "inhom35")

    def encode(self) -> str:
        if self.kind in ("hom-odd", "hom-even"):
            return f"{self.kind}:{self.ell}"
        if self.kind == "schrod":
            s = "+" if self.sign > 0 else "-"
            c = self.coeff
            return f"schrod:{s}{int(c) if c == int(c) else c}"
        return self.kind

    def __str__(self) -> str:
        return self.encode()


def hom_odd(ell: int) -> CurveSpec:
    return CurveSpec("hom-odd", ell=ell)


def hom_even(ell: int) -> CurveSpec:
    return CurveSpec("hom-even", ell=ell)


def inhom35() -> CurveSpec:
    return CurveSpec("inhom35")


def inhom_even35() -> CurveSpec:
    return CurveSpec("inhom-even35")


def schrod(coeff: float, sign: int = 1) -> CurveSpec:
    return CurveSpec("schrod", coeff=coeff, sign=sign)


def parse_curve(text: str) -> CurveSpec:
    """Parse the textual encoding, e.g. 'hom-odd:3' or 'schrod:+10'."""
    text = text.strip()
    if text in ("inhom35", "inhom-even35"):
        return CurveSpec(text)
    if ":" not in text:
        raise ValidationError(f"cannot parse curve spec {text!r}")
    kind, _, arg = text.partition(":")
    if kind in ("hom-odd", "hom-even"):
        try:
            ell = int(arg)
        except ValueError as exc:
            raise ValidationError(f"bad curve parameter {arg!r}") from exc
        return CurveSpec(kind, ell=ell)
    if kind == "schrod":
        sign = 1
        if arg and arg[0] in "+-":
            sign = 1 if arg[0] == "+" else -1
            arg = arg[1:]
        try:
            coeff = float(arg)
        except ValueError as exc:
            raise ValidationError(f"bad curve parameter {arg!r}") from exc
        return CurveSpec("schrod", coeff=coeff, sign=sign)
    raise ValidationError(f"cannot parse curve spec {text!r}")


def curve_phase(curve: CurveSpec, xi: np.ndarray) -> np.ndarray:
    """phi(xi) on the given frequency samples."""
    xi = np.asarray(xi, dtype=float)
    if curve.kind == "hom-odd":
        return xi ** curve.ell
    if curve.kind == "hom-even":
        return np.abs(xi) ** curve.ell
    if curve.kind == "inhom35":
        return xi ** 3 + xi ** 5
    if curve.kind == "inhom-even35":
        a = np.abs(xi)
        return a ** 3 + a ** 5
    return curve.sign * curve.coeff * xi ** 2


def curve_weight(curve: CurveSpec, xi: np.ndarray) -> np.ndarray:
    """m(xi) on the given frequency samples; m(-xi) = m(xi) for all kinds."""
    xi = np.asarray(xi, dtype=float)
    if curve.kind in ("hom-odd", "hom-even"):
        return np.abs(xi) ** ((curve.ell - 2) / 6.0)
    if curve.kind in ("inhom35", "inhom-even35"):
        return np.abs(xi + xi ** 3) ** (1.0 / 6.0)
    return np.ones_like(xi)


def curvature_coefficient(curve: CurveSpec) -> float:
    """Half the second derivative of the phase at the recentering point.

    This is the coefficient of the limiting free-Schrodinger phase obtained
    by recentering the curve at a large carrier: ell(ell-1)/2 for xi^ell and
    10 for xi^3 + xi^5.
    """
    if curve.kind in ("hom-odd", "hom-even"):
        return curve.ell * (curve.ell - 1) / 2.0
    if curve.kind in ("inhom35", "inhom-even35"):
        return 10.0
    raise ValidationError(f"no recentering coefficient for curve {curve}")
