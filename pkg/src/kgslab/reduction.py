r"""
First-order reduction of the Klein-Gordon-Schrodinger system.

The second-order unknowns (u, n, dt n), with n real, are mapped onto the
first-order triple (u, n+, n-) through

    n_pm = n +- i A^(-1/2) dt n ,      A = 1 - Lap ,

and back through

    n = (n_+ + n_-)/2 ,      dt n = A^(1/2) (n_+ - n_-) / (2i) .

Both maps are exact Fourier-multiplier arithmetic on the grid, so the
round trip is an identity to rounding.  For real (n, dt n) the components
satisfy n_- = conj(n_+).
"""

from __future__ import annotations

from dataclasses import dataclass

from .grids import (
    ContractViolation,
    SpectralField,
    half_wave_power,
    hermitian_symmetry_defect,
    require_real,
    to_spectral,
)


@dataclass(frozen=True)
class SecondOrderState:
    """Wave-form state (u, n, dt n) with regularity tags (s, sigma)."""

    u: SpectralField
    n: SpectralField
    dt_n: SpectralField
    s: float = 0.0
    sigma: float = 0.0

    def check_reality(self, tol: float = 1e-8) -> None:
        require_real(self.n, tol, "n")
        require_real(self.dt_n, tol, "dt_n")


@dataclass(frozen=True)
class FirstOrderState:
    """Reduced state (u, n+, n-) with regularity tags (s, sigma)."""

    u: SpectralField
    n_plus: SpectralField
    n_minus: SpectralField
    s: float = 0.0
    sigma: float = 0.0

    @property
    def grid(self):
        return self.u.grid


def to_first_order(state: SecondOrderState) -> FirstOrderState:
    """(u, n, dt n) -> (u, n + iA^(-1/2) dt n, n - iA^(-1/2) dt n)."""
    n = to_spectral(state.n)
    w = to_spectral(half_wave_power(state.dt_n, -0.5))
    n_plus = n.with_values(n.values + 1j * w.values)
    n_minus = n.with_values(n.values - 1j * w.values)
    return FirstOrderState(state.u, n_plus, n_minus, state.s, state.sigma)


def to_second_order(state: FirstOrderState, reality_tol: float = 1e-8) -> SecondOrderState:
    """(u, n+, n-) -> (u, (n+ + n-)/2, A^(1/2)(n+ - n-)/(2i)).

    Raises a consistency error when the reconstructed n or dt n carries an
    imaginary residue above ``reality_tol`` (the first-order state did not
    come from a real wave field).
    """
    p = to_spectral(state.n_plus)
    m = to_spectral(state.n_minus)
    n = p.with_values(0.5 * (p.values + m.values))
    dt_n = half_wave_power(p.with_values((p.values - m.values) / 2j), 0.5)
    for name, f in (("reconstructed n", n), ("reconstructed dt_n", dt_n)):
        if hermitian_symmetry_defect(f) > reality_tol:
            raise ContractViolation(
                f"{name} is not real: first-order state inconsistent with a real wave field"
            )
    return SecondOrderState(state.u, n, dt_n, state.s, state.sigma)
