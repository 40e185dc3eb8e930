"""Closed-form Gaussian evolution oracles.

For f(x) = a exp(-x^2 / (2 w^2)) and the free propagator with phase
c t xi^2 (either sign), the evolved field is

    u(t, x) = a w (w^2 - 2 i c t)^(-1/2) exp(-x^2 / (2 (w^2 - 2 i c t))),

so |u(t, x)| = a w (w^4 + 4 c^2 t^2)^(-1/4) exp(-x^2 w^2 / (2 (w^4 + 4 c^2 t^2)))
and the sixth-power space-time integral has the exact value

    ||u||_6^6 = a^6 w^3 (pi/3)^(1/2) arctan(2 c T / w^2) / c

over t in [-T, T] (pi/(2c) times the prefactor for the full line). These are
used as independent oracles for quadrature and extremizer tests.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import Grid1D, SampledFunction, make_sampled

__all__ = [
    "gaussian",
    "gaussian_freq_exact",
    "schrodinger_gaussian_modulus",
    "schrodinger_gaussian_l6",
    "gaussian_schrodinger_quotient",
]


def gaussian(grid: Grid1D, width: float = 1.0, amplitude: float = 1.0) -> SampledFunction:
    """a exp(-x^2/(2 w^2)) sampled on the grid."""
    x = grid.x
    return make_sampled(grid, amplitude * np.exp(-(x ** 2) / (2.0 * width ** 2)))


def gaussian_freq_exact(xi: np.ndarray, width: float = 1.0, amplitude: float = 1.0) -> np.ndarray:
    """Continuum transform a w sqrt(2 pi) exp(-w^2 xi^2 / 2)."""
    return amplitude * width * math.sqrt(2.0 * math.pi) * np.exp(
        -(width ** 2) * np.asarray(xi) ** 2 / 2.0
    )


def schrodinger_gaussian_modulus(
    t: np.ndarray, x: np.ndarray, c: float, width: float = 1.0, amplitude: float = 1.0
) -> np.ndarray:
    """|u(t, x)| for the evolved Gaussian; t and x broadcast."""
    w = width
    spread = w ** 4 + 4.0 * c ** 2 * np.asarray(t) ** 2
    return (
        amplitude
        * w
        * spread ** (-0.25)
        * np.exp(-np.asarray(x) ** 2 * w ** 2 / (2.0 * spread))
    )


def schrodinger_gaussian_l6(
    c: float, width: float = 1.0, amplitude: float = 1.0, t_extent: float | None = None
) -> float:
    """||u||_{L^6_{t,x}} over t in [-T, T] (full line if t_extent is None)."""
    w = width
    if t_extent is None:
        time_factor = math.pi / (2.0 * c)
    else:
        time_factor = math.atan(2.0 * c * t_extent / w ** 2) / c
    sixth = amplitude ** 6 * w ** 3 * math.sqrt(math.pi / 3.0) * time_factor
    return sixth ** (1.0 / 6.0)


def gaussian_schrodinger_quotient() -> float:
    """||e^{it Delta} f||_6 / ||f||_2 for a Gaussian and unit coefficient.

    Equals 12^(-1/12); Gaussians maximize this quotient.
    """
    return 12.0 ** (-1.0 / 12.0)
