r"""
Periodic grids, spectral fields and free propagators.

The ambient space R^D (D = 2 or 3) is truncated to a torus [0, L)^D with
M grid points per axis (M a power of two).  Dual frequencies are

    xi_k = 2*pi*k/L ,   k in {-M/2, ..., M/2 - 1}^D ,

so the frequency lattice is symmetric about 0 up to the single Nyquist
index per axis.  The forward transform carries the 1/M^D normalisation
(numpy's ``norm="forward"``), which makes a plane wave exp(i x.xi_k) a
unit mass at mode k, and continuum-consistent norms carry the quadrature
weight (L/M)^(D/2):

    ||f||_{L^2}  = L^(D/2) ||fhat||_{l2} ,
    ||f||_{H^s}  = L^(D/2) ||<xi>^s fhat||_{l2} ,   <xi> = (1+|xi|^2)^(1/2).

Free flows are exact Fourier multipliers:

    exp(it*Lap)      ->  exp(-i t |xi|^2)
    exp(-+ it A^1/2) ->  exp(-+ i t <xi>) ,     A = 1 - Lap.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

PHYSICAL = "physical"
SPECTRAL = "spectral"

#: round-trip / Parseval / multiplier tolerance at double precision
EPS_SPECTRAL = 1e-12


class ContractViolation(ValueError):
    """An operation was called outside its stated contract."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, length)^dimension.

    Parameters
    ----------
    dimension : int
        Spatial dimension, 2 or 3.
    points_per_axis : int
        Grid points per axis; power of two, at least 8.
    length : float
        Torus side length L.  The default 16*pi keeps wrap-around error
        of unit-scale localized data at spectral accuracy while leaving
        integer-spaced frequency room (spacing 1/8).
    """

    dimension: int
    points_per_axis: int
    length: float = 16.0 * np.pi

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise ContractViolation(f"dimension must be 2 or 3, got {self.dimension}")
        m = self.points_per_axis
        if m < 8 or (m & (m - 1)) != 0:
            raise ContractViolation(f"points_per_axis must be a power of two >= 8, got {m}")
        if self.length <= 0:
            raise ContractViolation("length must be positive")

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.dimension

    @property
    def spacing(self) -> float:
        return self.length / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dimension

    def axis_coordinates(self) -> np.ndarray:
        return np.arange(self.points_per_axis) * self.spacing

    def coordinates(self) -> list:
        """Physical coordinate arrays, meshgrid 'ij' indexed."""
        x = self.axis_coordinates()
        return list(np.meshgrid(*([x] * self.dimension), indexing="ij"))

    def axis_frequencies(self) -> np.ndarray:
        m = self.points_per_axis
        return 2.0 * np.pi / self.length * (np.fft.fftfreq(m) * m)

    def frequencies(self) -> list:
        """Dual frequency arrays xi_k, meshgrid 'ij' indexed, fft layout."""
        return list(_frequency_mesh(self.dimension, self.points_per_axis, self.length))

    def frequency_radius_sq(self) -> np.ndarray:
        """|xi|^2 on the frequency lattice."""
        return _frequency_radius_sq(self.dimension, self.points_per_axis, self.length)

    def bessel_weight(self, s: float) -> np.ndarray:
        """<xi>^s = (1 + |xi|^2)^(s/2) on the frequency lattice."""
        return _bessel_weight(self.dimension, self.points_per_axis, self.length, float(s))


@lru_cache(maxsize=32)
def _frequency_mesh(dimension, points_per_axis, length):
    k = 2.0 * np.pi / length * (np.fft.fftfreq(points_per_axis) * points_per_axis)
    return tuple(np.meshgrid(*([k] * dimension), indexing="ij"))

@lru_cache(maxsize=32)
def _frequency_radius_sq(dimension, points_per_axis, length):
    mesh = _frequency_mesh(dimension, points_per_axis, length)
    out = np.zeros((points_per_axis,) * dimension)
    for ax in mesh:
        out = out + ax ** 2
    return out

@lru_cache(maxsize=256)
def _bessel_weight(dimension, points_per_axis, length, s):
    rsq = _frequency_radius_sq(dimension, points_per_axis, length)
    return (1.0 + rsq) ** (0.5 * s)


@dataclass(frozen=True)
class SpectralField:
    """Complex field on a Grid, in physical or spectral representation.

    Treated as an immutable value: all operations return new fields.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)
    representation: str = PHYSICAL

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ContractViolation(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if self.representation not in (PHYSICAL, SPECTRAL):
            raise ContractViolation(f"unknown representation {self.representation!r}")

    def with_values(self, values: np.ndarray, representation: str | None = None) -> "SpectralField":
        return replace(
            self,
            values=values,
            representation=self.representation if representation is None else representation,
        )

    def copy(self) -> "SpectralField":
        return self.with_values(self.values.copy())


def field_from_function(grid: Grid, fn) -> SpectralField:
    """Sample fn(*coords) on the grid as a physical-space field."""
    vals = np.asarray(fn(*grid.coordinates()), dtype=complex)
    return SpectralField(grid, vals, PHYSICAL)


def zero_field(grid: Grid, representation: str = PHYSICAL) -> SpectralField:
    return SpectralField(grid, np.zeros(grid.shape, dtype=complex), representation)


def random_field(grid: Grid, rng: np.random.Generator, real: bool = False) -> SpectralField:
    """Unit-scale Gaussian noise field in physical space."""
    vals = rng.standard_normal(grid.shape)
    if not real:
        vals = vals + 1j * rng.standard_normal(grid.shape)
    return SpectralField(grid, vals.astype(complex), PHYSICAL)


def transform(f: SpectralField, direction: str) -> SpectralField:
    """Toggle representation; direction is the target ('spectral'/'physical').

    Forward (physical -> spectral) carries 1/M^D so Parseval reads
    ||f||_{L^2,phys} = L^(D/2) ||fhat||_{l2}.
    """
    if direction == SPECTRAL:
        if f.representation != PHYSICAL:
            raise ContractViolation("transform to spectral requires a physical-space field")
        return f.with_values(np.fft.fftn(f.values, norm="forward"), SPECTRAL)
    if direction == PHYSICAL:
        if f.representation != SPECTRAL:
            raise ContractViolation("transform to physical requires a spectral-space field")
        return f.with_values(np.fft.ifftn(f.values, norm="forward"), PHYSICAL)
    raise ContractViolation(f"unknown transform direction {direction!r}")


def to_spectral(f: SpectralField) -> SpectralField:
    return f if f.representation == SPECTRAL else transform(f, SPECTRAL)


def to_physical(f: SpectralField) -> SpectralField:
    return f if f.representation == PHYSICAL else transform(f, PHYSICAL)


def apply_multiplier(f: SpectralField, symbol: np.ndarray) -> SpectralField:
    """Multiply the spectral values by a symbol array; keeps representation."""
    g = to_spectral(f)
    out = g.with_values(g.values * symbol, SPECTRAL)
    return out if f.representation == SPECTRAL else to_physical(out)


def bessel_multiplier(f: SpectralField, s: float) -> SpectralField:
    """Apply <xi>^s = (1+|xi|^2)^(s/2); the H^s smoothing/roughening operator."""
    return apply_multiplier(f, f.grid.bessel_weight(s))


def half_wave_power(f: SpectralField, p: float) -> SpectralField:
    """Apply A^p = (1 - Lap)^p, i.e. the multiplier <xi>^(2p)."""
    return apply_multiplier(f, f.grid.bessel_weight(2.0 * p))


def free_schrodinger(f: SpectralField, t: float) -> SpectralField:
    """exp(it*Lap): multiply spectrum by exp(-i t |xi|^2).  Unitary group."""
    return apply_multiplier(f, np.exp(-1j * t * f.grid.frequency_radius_sq()))


def free_half_wave(f: SpectralField, t: float, sign: int) -> SpectralField:
    """exp(-+ i t A^(1/2)) for sign = +1 / -1: multiply by exp(-+ i t <xi>).

    sign = +1 propagates the '+' wave component (phase exp(-i t <xi>)),
    sign = -1 the '-' component (phase exp(+i t <xi>)).
    """
    if sign not in (+1, -1):
        raise ContractViolation(f"sign must be +1 or -1, got {sign}")
    w = f.grid.bessel_weight(1.0)
    return apply_multiplier(f, np.exp(-1j * sign * t * w))


def l2_norm(f: SpectralField) -> float:
    """Continuum-consistent L^2 norm (quadrature in physical, Parseval in spectral)."""
    if f.representation == PHYSICAL:
        return float(np.linalg.norm(f.values) * f.grid.cell_volume ** 0.5)
    return float(np.linalg.norm(f.values) * f.grid.length ** (0.5 * f.grid.dimension))


def sobolev_norm(f: SpectralField, s: float) -> float:
    """Discrete H^s norm  L^(D/2) ||<xi>^s fhat||_{l2}."""
    g = to_spectral(f)
    w = f.grid.bessel_weight(s)
    return float(np.linalg.norm(w * g.values) * f.grid.length ** (0.5 * f.grid.dimension))


def hermitian_symmetry_defect(f: SpectralField) -> float:
    """Relative departure of a field from being real-valued.

    In physical space: imaginary residue over norm.  Equivalent to the
    Hermitian-symmetry defect of the spectrum.
    """
    g = to_physical(f)
    n = np.linalg.norm(g.values)
    if n == 0.0:
        return 0.0
    return float(np.linalg.norm(g.values.imag) / n)


def require_real(f: SpectralField, tol: float = 1e-8, what: str = "field") -> None:
    d = hermitian_symmetry_defect(f)
    if d > tol:
        raise ContractViolation(f"{what} has imaginary residue {d:.3e} > {tol:.1e}")
