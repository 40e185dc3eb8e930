"""Discretized function and field representations with their norm functionals.

A function of one real variable is carried on a uniform grid over [-L, L)
with a power-of-two point count, together with its discrete spectrum in the
continuum normalization

    f_hat(xi) = integral f(x) exp(-i x xi) dx.

With x_0 = -L and dual spacing dxi = pi/L, the boundary phase exp(i L xi_k)
equals (-1)^k exactly, so the space and frequency representations are linked
by an exact unitary reindexing of numpy's FFT and the discrete Plancherel
identity holds to machine precision.

Space-time fields live on a tensor grid [-T, T] x [-L, L) with midpoint time
samples; all quadrature weights are uniform (dt * dx) and sum to 4*L*T
exactly. Norm reductions use numpy's fixed pairwise summation order, so
repeated runs are bit-reproducible.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ValidationError

__all__ = [
    "Grid1D",
    "SampledFunction",
    "SpaceTimeGrid",
    "SpaceTimeField",
    "make_sampled",
    "make_sampled_from_freq",
    "l2_norm",
    "l2_inner",
    "lp_spacetime_norm",
    "bilinear_l3_norm",
    "windowed_l2",
    "save_sampled_csv",
    "load_sampled_csv",
    "save_field_binary",
    "load_field_binary",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Uniform spatial grid on [-L, L) with its dual frequency grid.

    Attributes:
        x_extent: half-width L of the spatial domain.
        n_points: number of grid points (power of two, >= 16).
        dx: spatial spacing 2L/n.
        dxi: frequency spacing pi/L.
        xi_max: Nyquist frequency pi/dx.
    """

    x_extent: float
    n_points: int
    dx: float = field(init=False)
    dxi: float = field(init=False)
    xi_max: float = field(init=False)

    def __post_init__(self):
        if self.x_extent <= 0:
            raise ValidationError(f"x_extent must be positive, got {self.x_extent}")
        if self.n_points < 16 or not _is_power_of_two(self.n_points):
            raise ValidationError(
                f"n_points must be a power of two >= 16, got {self.n_points}"
            )
        object.__setattr__(self, "dx", 2.0 * self.x_extent / self.n_points)
        object.__setattr__(self, "dxi", np.pi / self.x_extent)
        object.__setattr__(self, "xi_max", np.pi / self.dx)

    @property
    def x(self) -> np.ndarray:
        """Spatial sample points -L, -L+dx, ..., L-dx."""
        return -self.x_extent + self.dx * np.arange(self.n_points)

    @property
    def xi(self) -> np.ndarray:
        """Frequency samples in FFT order (0, dxi, ..., -dxi)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    @property
    def boundary_sign(self) -> np.ndarray:
        """exp(i L xi_k) = (-1)^k, exact."""
        s = np.ones(self.n_points)
        s[1::2] = -1.0
        return s

    def to_freq(self, space_values: np.ndarray) -> np.ndarray:
        """Discrete spectrum of sampled values (continuum normalization)."""
        return self.dx * self.boundary_sign * np.fft.fft(space_values)

    def to_space(self, freq_values: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`to_freq` (exact round trip)."""
        return np.fft.ifft(freq_values * self.boundary_sign) / self.dx


@dataclass(frozen=True)
class SampledFunction:
    """A complex L^2(R) proxy with linked space/frequency representations."""

    grid: Grid1D
    space_values: np.ndarray
    freq_values: np.ndarray

    def __post_init__(self):
        n = self.grid.n_points
        if self.space_values.shape != (n,) or self.freq_values.shape != (n,):
            raise DimensionError(
                f"values must have shape ({n},), got {self.space_values.shape} "
                f"and {self.freq_values.shape}"
            )

    def with_freq(self, new_freq: np.ndarray) -> "SampledFunction":
        """New function with the given spectrum (space side resynthesized)."""
        return make_sampled_from_freq(self.grid, new_freq)

    def conj(self) -> "SampledFunction":
        return make_sampled(self.grid, np.conj(self.space_values))

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        if other.grid != self.grid:
            raise DimensionError("grids differ")
        return SampledFunction(
            self.grid,
            self.space_values + other.space_values,
            self.freq_values + other.freq_values,
        )

    def __sub__(self, other: "SampledFunction") -> "SampledFunction":
        if other.grid != self.grid:
            raise DimensionError("grids differ")
        return SampledFunction(
            self.grid,
            self.space_values - other.space_values,
            self.freq_values - other.freq_values,
        )

    def __mul__(self, scalar: complex) -> "SampledFunction":
        return SampledFunction(
            self.grid, self.space_values * scalar, self.freq_values * scalar
        )

    __rmul__ = __mul__


def make_sampled(grid: Grid1D, space_samples: np.ndarray) -> SampledFunction:
    """Build a SampledFunction from spatial samples.

    Raises:
        DimensionError: if the sample array length differs from the grid.
    """
    space = np.asarray(space_samples, dtype=complex)
    if space.shape != (grid.n_points,):
        raise DimensionError(
            f"expected {grid.n_points} samples, got shape {space.shape}"
        )
    return SampledFunction(grid, space, grid.to_freq(space))


def make_sampled_from_freq(grid: Grid1D, freq_samples: np.ndarray) -> SampledFunction:
    """Build a SampledFunction from its discrete spectrum."""
    freq = np.asarray(freq_samples, dtype=complex)
    if freq.shape != (grid.n_points,):
        raise DimensionError(
            f"expected {grid.n_points} samples, got shape {freq.shape}"
        )
    return SampledFunction(grid, grid.to_space(freq), freq)


def l2_norm(f: SampledFunction) -> float:
    """sqrt(sum |f(x_i)|^2 dx); equals the frequency-side value by Plancherel."""
    return float(np.sqrt(np.sum(np.abs(f.space_values) ** 2) * f.grid.dx))


def l2_inner(f: SampledFunction, g: SampledFunction) -> complex:
    """<f, g> = sum conj(f) g dx."""
    if f.grid != g.grid:
        raise DimensionError("grids differ")
    return complex(np.sum(np.conj(f.space_values) * g.space_values) * f.grid.dx)


def l2_norm_freq(f: SampledFunction) -> float:
    """Frequency-side L^2 norm, sqrt(sum |f_hat|^2 dxi / 2 pi)."""
    return float(
        np.sqrt(np.sum(np.abs(f.freq_values) ** 2) * f.grid.dxi / (2.0 * np.pi))
    )


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Tensor quadrature grid [-T, T] x [-L, L).

    Time samples are symmetric midpoints t_i = -T + (i + 1/2) dt with
    dt = 2T/n_times, so every weight is dt*dx and the weights sum to 4LT
    exactly. n_times = 1 gives the single slice t = 0.
    """

    t_extent: float
    n_times: int
    spatial: Grid1D

    def __post_init__(self):
        if self.t_extent <= 0:
            raise ValidationError(f"t_extent must be positive, got {self.t_extent}")
        if self.n_times < 1:
            raise ValidationError(f"n_times must be >= 1, got {self.n_times}")

    @property
    def dt(self) -> float:
        return 2.0 * self.t_extent / self.n_times

    @property
    def t(self) -> np.ndarray:
        return -self.t_extent + self.dt * (np.arange(self.n_times) + 0.5)

    @property
    def cell_weight(self) -> float:
        return self.dt * self.spatial.dx


@dataclass(frozen=True)
class SpaceTimeField:
    """Complex values of an evolved/extended function on a space-time grid."""

    stgrid: SpaceTimeGrid
    values: np.ndarray  # shape (n_times, n_points)

    def __post_init__(self):
        shape = (self.stgrid.n_times, self.stgrid.spatial.n_points)
        if self.values.shape != shape:
            raise DimensionError(f"expected shape {shape}, got {self.values.shape}")
        if not np.all(np.isfinite(self.values.view(float))):
            raise ValidationError("field contains NaN or Inf")


def lp_spacetime_norm(F: SpaceTimeField, p: float) -> float:
    """(sum |F|^p dx dt)^(1/p); the max modulus for p = inf."""
    if p == np.inf:
        return float(np.max(np.abs(F.values)))
    if p < 1:
        raise ValidationError(f"p must be >= 1, got {p}")
    acc = np.sum(np.abs(F.values) ** p)
    return float((acc * F.stgrid.cell_weight) ** (1.0 / p))


def bilinear_l3_norm(F: SpaceTimeField, G: SpaceTimeField) -> float:
    """||F G||_{L^3} by quadrature on the shared grid."""
    if F.stgrid != G.stgrid:
        raise DimensionError("space-time grids differ")
    acc = np.sum(np.abs(F.values * G.values) ** 3)
    return float((acc * F.stgrid.cell_weight) ** (1.0 / 3.0))


def windowed_l2(F: SpaceTimeField, window: SampledFunction) -> float:
    """(sum window(x) |F(t,x)|^2 dx dt)^(1/2) for a nonnegative window."""
    if window.grid != F.stgrid.spatial:
        raise DimensionError("window grid differs from the field's spatial grid")
    w = window.space_values.real
    if np.max(np.abs(window.space_values.imag)) > 1e-12 or np.min(w) < -1e-12:
        raise ValidationError("window must be nonnegative real-valued")
    acc = np.sum(np.clip(w, 0.0, None)[None, :] * np.abs(F.values) ** 2)
    return float(np.sqrt(acc * F.stgrid.cell_weight))


# ---------------------------------------------------------------------------
# serialization


def save_sampled_csv(f: SampledFunction, path) -> None:
    """CSV with columns x, re, im."""
    rows = np.column_stack(
        [f.grid.x, f.space_values.real, f.space_values.imag]
    )
    header = "x,re,im"
    np.savetxt(path, rows, delimiter=",", header=header, comments="")


def load_sampled_csv(path, grid: Grid1D | None = None) -> SampledFunction:
    """Load a function saved by :func:`save_sampled_csv`.

    The grid is reconstructed from the x column unless given explicitly.
    """
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if grid is None:
        n = rows.shape[0]
        extent = -rows[0, 0]
        grid = Grid1D(x_extent=extent, n_points=n)
    if rows.shape[0] != grid.n_points:
        raise DimensionError("row count does not match the grid")
    return make_sampled(grid, rows[:, 1] + 1j * rows[:, 2])


_FIELD_HEADER = struct.Struct("<qqdd")  # n_times, n_points, T, L


def save_field_binary(F: SpaceTimeField, path) -> None:
    """Binary layout: int64 n_times, int64 n_points, float64 T, float64 L,
    then row-major complex128 pairs."""
    st = F.stgrid
    with open(path, "wb") as fh:
        fh.write(
            _FIELD_HEADER.pack(
                st.n_times, st.spatial.n_points, st.t_extent, st.spatial.x_extent
            )
        )
        fh.write(np.ascontiguousarray(F.values, dtype=np.complex128).tobytes())


def load_field_binary(path) -> SpaceTimeField:
    with open(path, "rb") as fh:
        n_times, n_points, T, L = _FIELD_HEADER.unpack(fh.read(_FIELD_HEADER.size))
        raw = np.frombuffer(fh.read(), dtype=np.complex128)
    if raw.size != n_times * n_points:
        raise DimensionError("payload size does not match the header")
    grid = Grid1D(x_extent=L, n_points=int(n_points))
    stgrid = SpaceTimeGrid(t_extent=T, n_times=int(n_times), spatial=grid)
    return SpaceTimeField(stgrid, raw.reshape(n_times, n_points).copy())
