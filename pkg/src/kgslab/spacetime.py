r"""
Space-time fields on grid x uniform time window.

A SpaceTimeField samples a field on the spatial torus times the window
[0, T_w) with M_t uniform samples (time is the last axis).  Because the
Bourgain machinery needs a time-frequency variable tau on R, a field of
time samples is first multiplied by a smooth plateau window (a cutoff of
the same exp(-1/x) family as every other cutoff here), extended by zero
and periodized; the time transform then yields

    tau_m = 2*pi*m / T_w ,   m in {-M_t/2, ..., M_t/2 - 1} .

Space-time Parseval with the forward-normalised transform reads

    ||F||_{L^2(x,t)} = (L^D T_w)^(1/2) ||Fhat||_{l2} .

Modulation symbols on the lattice:

    schrodinger :  tau + |xi|^2
    wave +-     :  tau +- |xi| .
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .bumps import bump
from .grids import PHYSICAL, SPECTRAL, ContractViolation, Grid, SpectralField

SCHRODINGER = "schrodinger"
WAVE_PLUS = "wave_plus"
WAVE_MINUS = "wave_minus"
MODULATION_KINDS = (SCHRODINGER, WAVE_PLUS, WAVE_MINUS)


@dataclass(frozen=True)
class SpaceTimeField:
    """Field on grid x [0, t_window) with time as the last axis."""

    grid: Grid
    t_window: float
    values: np.ndarray = field(repr=False)
    representation: str = PHYSICAL

    def __post_init__(self):
        if self.values.ndim != self.grid.dimension + 1:
            raise ContractViolation("values must have one trailing time axis")
        if self.values.shape[: self.grid.dimension] != self.grid.shape:
            raise ContractViolation("spatial shape does not match grid")
        if self.t_window <= 0:
            raise ContractViolation("t_window must be positive")

    @property
    def time_samples(self) -> int:
        return self.values.shape[-1]

    @property
    def dt(self) -> float:
        return self.t_window / self.time_samples

    def times(self) -> np.ndarray:
        return np.arange(self.time_samples) * self.dt

    def tau_frequencies(self) -> np.ndarray:
        m = self.time_samples
        return 2.0 * np.pi / self.t_window * (np.fft.fftfreq(m) * m)

    def with_values(self, values, representation=None) -> "SpaceTimeField":
        return replace(
            self,
            values=values,
            representation=self.representation if representation is None else representation,
        )


def time_window_profile(t: np.ndarray, t_window: float) -> np.ndarray:
    """Smooth plateau on [0, T_w]: 1 on the middle half, vanishing at the ends."""
    return bump(4.0 * np.asarray(t, dtype=float) / t_window - 2.0)


def interval_cutoff(t: np.ndarray, t_len: float) -> np.ndarray:
    """psi_T(t) = psi(t/T): 1 on [0, T], supported in [0, 2T) for t >= 0."""
    return bump(np.asarray(t, dtype=float) / t_len)


def from_time_samples(
    grid: Grid,
    t_window: float,
    samples: np.ndarray,
    window: bool = True,
) -> SpaceTimeField:
    """Assemble a SpaceTimeField from physical time samples.

    With ``window=True`` (the convention every norm in this package
    assumes) the samples are multiplied by the smooth plateau profile
    before any time transform, which is the discrete surrogate for
    'extend smoothly to R and transform'.
    """
    samples = np.asarray(samples, dtype=complex)
    stf = SpaceTimeField(grid, t_window, samples, PHYSICAL)
    if window:
        w = time_window_profile(stf.times(), t_window)
        stf = stf.with_values(samples * w)
    return stf


def from_state_sequence(states, t_window: float, window: bool = True) -> SpaceTimeField:
    """Stack a list of physical SpectralFields sampled uniformly on [0, T_w)."""
    from .grids import to_physical

    phys = [to_physical(s) for s in states]
    grid = phys[0].grid
    vals = np.stack([s.values for s in phys], axis=-1)
    return from_time_samples(grid, t_window, vals, window=window)


def st_transform(f: SpaceTimeField, direction: str) -> SpaceTimeField:
    if direction == SPECTRAL:
        if f.representation != PHYSICAL:
            raise ContractViolation("already spectral")
        return f.with_values(np.fft.fftn(f.values, norm="forward"), SPECTRAL)
    if direction == PHYSICAL:
        if f.representation != SPECTRAL:
            raise ContractViolation("already physical")
        return f.with_values(np.fft.ifftn(f.values, norm="forward"), PHYSICAL)
    raise ContractViolation(f"unknown direction {direction!r}")


def st_to_spectral(f: SpaceTimeField) -> SpaceTimeField:
    return f if f.representation == SPECTRAL else st_transform(f, SPECTRAL)


def st_to_physical(f: SpaceTimeField) -> SpaceTimeField:
    return f if f.representation == PHYSICAL else st_transform(f, PHYSICAL)


def st_l2_norm(f: SpaceTimeField) -> float:
    scale = (f.grid.length ** f.grid.dimension * f.t_window) ** 0.5
    if f.representation == SPECTRAL:
        return float(np.linalg.norm(f.values) * scale)
    m_total = f.values.size
    return float(np.linalg.norm(f.values) * scale / m_total ** 0.5)


@lru_cache(maxsize=64)
def _modulation_symbol(dimension, points_per_axis, length, t_window, time_samples, kind):
    g = Grid(dimension, points_per_axis, length)
    tau = 2.0 * np.pi / t_window * (np.fft.fftfreq(time_samples) * time_samples)
    shape = (1,) * dimension + (time_samples,)
    tau = tau.reshape(shape)
    if kind == SCHRODINGER:
        return tau + g.frequency_radius_sq()[..., None]
    radius = np.sqrt(g.frequency_radius_sq())[..., None]
    if kind == WAVE_PLUS:
        return tau + radius
    if kind == WAVE_MINUS:
        return tau - radius
    raise ContractViolation(f"unknown modulation kind {kind!r}")


def modulation_symbol(f: SpaceTimeField, kind: str) -> np.ndarray:
    """tau + |xi|^2 (schrodinger) or tau +- |xi| (wave) on the (k, m) lattice."""
    g = f.grid
    return _modulation_symbol(
        g.dimension, g.points_per_axis, g.length, f.t_window, f.time_samples, kind
    )


def wave_kind_for_sign(sign: int) -> str:
    """Modulation kind whose symbol vanishes on the free flow exp(-+ i t <xi>).

    The '+' component evolves with phase exp(-i t <xi>), i.e. tau = -<xi>,
    matched (up to the +1 in <xi> vs |xi|) by the tau + |xi| symbol.
    """
    return WAVE_PLUS if sign == +1 else WAVE_MINUS


def _free_flow_spacetime(f0: SpectralField, t_window: float, time_samples: int,
                         phase_rate: np.ndarray, window: bool) -> SpaceTimeField:
    """Windowed free flow, built diagonally in xi (no spatial FFT loop).

    The phase is applied per mode, the smooth window per sample, and the
    single time transform yields the space-time spectrum directly.
    """
    from .grids import to_spectral

    f0_hat = to_spectral(f0).values
    times = np.arange(time_samples) * (t_window / time_samples)
    phases = np.exp(-1j * np.multiply.outer(phase_rate, times))
    vals = f0_hat[..., None] * phases
    if window:
        vals = vals * time_window_profile(times, t_window)
    spec = np.fft.fft(vals, axis=-1, norm="forward")
    return SpaceTimeField(f0.grid, t_window, spec, SPECTRAL)


def free_schrodinger_spacetime(u0: SpectralField, t_window: float, time_samples: int,
                               window: bool = True) -> SpaceTimeField:
    """Sampled free flow exp(it*Lap) u0 on the window."""
    return _free_flow_spacetime(u0, t_window, time_samples,
                                u0.grid.frequency_radius_sq(), window)


def free_wave_spacetime(n0: SpectralField, t_window: float, time_samples: int, sign: int,
                        window: bool = True) -> SpaceTimeField:
    """Sampled free flow exp(-+ i t A^(1/2)) n0 on the window."""
    return _free_flow_spacetime(n0, t_window, time_samples,
                                sign * n0.grid.bessel_weight(1.0), window)
