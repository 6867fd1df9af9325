r"""
Discrete Bourgain and Strichartz norms.

Bourgain norm of a windowed space-time field:

    ||f||_{X^{m,b}}      = (L^D T_w)^(1/2) || <xi>^m <tau + |xi|^2>^b fhat ||_{l2}
    ||f||_{X^{m,b}_{+-}} = (L^D T_w)^(1/2) || <xi>^m <tau +- |xi|>^b  fhat ||_{l2}

with the lattice tau of the periodized window.  Every 'a+' / 'a-'
exponent decoration becomes a +- epsilon shift with a configurable
epsilon (default 0.01).

Interval-restricted norms X^{m,b}[0,T] are approximated by one fixed
smooth extension (multiply by the cutoff psi(t/T), zero-extend,
periodize) rather than the infimum over extensions; the surrogate
over-estimates the true norm, and ratio/slope experiments use it on both
sides.

Mixed norms L^q_t L^r_x use trapezoidal time quadrature and (L/M)^D
spatial weights; q or r = infinity map to maxima over samples.
Admissibility calculators implement

    schrodinger : 2/q + D/r = D/2  (r < infinity when D = 2)
    wave        : 2/q + (D-1)/r = (D-1)/2 ,
                  mu = D(1/2 - 1/r) - 1/q = 1 + rho - D(1/2 - 1/rtilde) + 1/qtilde .
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import ContractViolation, Grid
from .spacetime import (
    MODULATION_KINDS,
    SCHRODINGER,
    SpaceTimeField,
    from_time_samples,
    interval_cutoff,
    modulation_symbol,
    st_to_physical,
    st_to_spectral,
)

DEFAULT_EPSILON = 0.01


@dataclass(frozen=True)
class BourgainSpec:
    """Parameters of one Bourgain-norm evaluation.

    ``regularity`` is the spatial exponent (s or sigma), ``b`` the
    modulation exponent, ``kind`` selects the dispersion surface, and
    ``epsilon`` realizes the '+'/'-' decorations: build specs through
    :meth:`shifted` to keep the policy explicit.
    """

    regularity: float
    b: float
    kind: str = SCHRODINGER
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.kind not in MODULATION_KINDS:
            raise ContractViolation(f"unknown kind {self.kind!r}")
        if not 0.0 < self.epsilon <= 0.1:
            raise ContractViolation("epsilon must lie in (0, 0.1]")
        if not -1.0 < self.b < 1.5:
            raise ContractViolation("b out of the supported range (-1, 1.5)")

    def shifted(self, b_decoration: int = 0, reg_decoration: int = 0) -> "BourgainSpec":
        """Apply +-epsilon decorations: +1 for 'a+', -1 for 'a-'."""
        return BourgainSpec(
            self.regularity + reg_decoration * self.epsilon,
            self.b + b_decoration * self.epsilon,
            self.kind,
            self.epsilon,
        )


def bourgain_weight(stf: SpaceTimeField, spec: BourgainSpec) -> np.ndarray:
    xi_weight = stf.grid.bessel_weight(spec.regularity)[..., None]
    mu = modulation_symbol(stf, spec.kind)
    return xi_weight * (1.0 + mu ** 2) ** (0.5 * spec.b)


def bourgain_norm(stf: SpaceTimeField, spec: BourgainSpec) -> float:
    """Weighted space-time l2 norm with quadrature scaling."""
    g = st_to_spectral(stf)
    w = bourgain_weight(stf, spec)
    scale = (stf.grid.length ** stf.grid.dimension * stf.t_window) ** 0.5
    return float(np.linalg.norm(w * g.values) * scale)


def restricted_norm(stf: SpaceTimeField, t_len: float, spec: BourgainSpec) -> float:
    """Upper-bound surrogate for the interval norm X^{m,b}[0,T].

    Applies the canonical smooth extension (multiply the time samples by
    psi(t/T), extend by zero, periodize) and evaluates the Bourgain norm.
    """
    if t_len <= 0 or 2.0 * t_len > stf.t_window:
        raise ContractViolation("need 0 < T <= t_window / 2 for the cutoff to fit")
    phys = st_to_physical(stf)
    cut = interval_cutoff(phys.times(), t_len)
    windowed = from_time_samples(stf.grid, stf.t_window, phys.values * cut, window=False)
    return bourgain_norm(windowed, spec)


def spatial_lp_norm(grid: Grid, values: np.ndarray, r: float) -> np.ndarray:
    """L^r_x norms along the trailing time axis; r = inf is the grid max."""
    axes = tuple(range(grid.dimension))
    flat = np.abs(values)
    if math.isinf(r):
        return flat.max(axis=axes)
    return (np.sum(flat ** r, axis=axes) * grid.cell_volume) ** (1.0 / r)


def strichartz_norm(stf: SpaceTimeField, q: float, r: float,
                    interval: tuple | None = None) -> float:
    """Mixed L^q_t((a,b), L^r_x) norm by composite trapezoidal quadrature."""
    if q < 1 or r < 1:
        raise ContractViolation("exponents must be >= 1")
    phys = st_to_physical(stf)
    times = phys.times()
    space_norms = spatial_lp_norm(stf.grid, phys.values, r)
    if interval is not None:
        a, b = interval
        mask = (times >= a - 1e-12) & (times <= b + 1e-12)
        times = times[mask]
        space_norms = space_norms[mask]
    if math.isinf(q):
        return float(space_norms.max())
    return float(np.trapezoid(space_norms ** q, times) ** (1.0 / q))


def schrodinger_admissible(q: float, r: float, dimension: int, tol: float = 1e-12) -> bool:
    """2/q + D/r = D/2 with q, r >= 2; r = infinity excluded when D = 2."""
    if q < 2 or r < 2:
        return False
    if dimension == 2 and math.isinf(r):
        return False
    lhs = (0.0 if math.isinf(q) else 2.0 / q) + (0.0 if math.isinf(r) else dimension / r)
    return abs(lhs - dimension / 2.0) <= tol


def wave_admissible(q: float, r: float, q_t: float, r_t: float, rho: float,
                    dimension: int, tol: float = 1e-9) -> tuple:
    """Klein-Gordon Strichartz bookkeeping.

    Checks 2/q + (D-1)/r = (D-1)/2 for both pairs (with 2 <= q <= inf,
    2 <= r < inf) and that the two expressions for the derivative gain

        mu = D(1/2 - 1/r) - 1/q
        mu = 1 + rho - D(1/2 - 1/rtilde) + 1/qtilde

    agree.  Returns (ok, mu).
    """
    def inv(x):
        return 0.0 if math.isinf(x) else 1.0 / x

    def pair_ok(qq, rr):
        if qq < 2 or rr < 2 or math.isinf(rr):
            return False
        return abs(2.0 * inv(qq) + (dimension - 1) * inv(rr) - (dimension - 1) / 2.0) <= tol

    mu = dimension * (0.5 - inv(r)) - inv(q)
    mu_dual = 1.0 + rho - dimension * (0.5 - inv(r_t)) + inv(q_t)
    ok = pair_ok(q, r) and pair_ok(q_t, r_t) and abs(mu - mu_dual) <= tol
    return ok, mu


def time_localization_slope(stf: SpaceTimeField, s: float, b: float, b_prime: float,
                            t_ladder=None, kind: str = SCHRODINGER,
                            epsilon: float = DEFAULT_EPSILON) -> float:
    """Fitted exponent of ||u||_{X^{s,b'}[0,T]} / ||u||_{X^{s,b}[0,T]} vs T.

    For 0 <= b' < b < 1/2 the interval norms scale like T^(b-b'); the
    returned log-log slope of the surrogate ratio should match b - b'.
    """
    if not (0.0 <= b_prime <= b < 0.5):
        raise ContractViolation("slope check supports 0 <= b' <= b < 1/2 only")
    if t_ladder is None:
        t_ladder = [1.0 / 2 ** k for k in range(6)]
    lo = BourgainSpec(s, b_prime, kind, epsilon)
    hi = BourgainSpec(s, b, kind, epsilon)
    ratios = []
    for t_len in t_ladder:
        denom = restricted_norm(stf, t_len, hi)
        if denom == 0.0:
            raise ContractViolation("degenerate (zero) input: slope undefined")
        ratios.append(restricted_norm(stf, t_len, lo) / denom)
    slope, _ = np.polyfit(np.log(np.asarray(t_ladder)), np.log(np.asarray(ratios)), 1)
    return float(slope)
