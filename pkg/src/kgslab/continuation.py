r"""
Global-continuation bookkeeping: exponent tables, step selection,
doubling plans, and an orchestrator that drives the integrator through
the schedule while checking the norm-growth envelope.

Three regimes are supported (sigma is the wave regularity):

  bourgain2d    exponent table
                    sigma in [-1/2, 0]:  k = 1/2 + sigma/2 - ,  l = 1 -
                    sigma in [0, 1]:     k = 1/2 + sigma/2 - ,  l = 1 - sigma/2 -
                    sigma in [1, 3/2):   k = 1 - ,              l = 1 - sigma/2 -
                step  T ~ min( W^(-1/l), U^(-1/k), 1 ),  W the wave norm
                sum, U the charge; cycle length m ~ W / (T^k U^2); total
                time per cycle bounded below by ~ min(U^(-3-), 1).

  strichartz2d  T^(1/2) ~ 1/W with envelope exponent 1/2;
  strichartz3d  T^(1/4 + sigma/2) ~ 1/W with envelope exponent
                3/4 - sigma/2;  both give cycle time m*T ~ U^(-2),
                independent of W.

Every '~' / '<~' carries a named calibration constant (default 1) from
:class:`CalibrationConstants`; the strict-inequality decorations follow
the package epsilon policy.  The standing assumption W >> U^p + 1
(p = 2 in 2D, 3 in the 3D Strichartz argument) is realized as
W >= gg_factor * (U^p + 1) with a configurable factor.

After each leg the orchestrator compares the measured wave norms with
the a-priori envelope

    ||n_pm(T)||_{H^sigma}  <=  ||n_pm(0)||_{H^sigma} + c T^k ||u_0||_{L^2}^2

(no implicit constant on the right beyond the calibrated c).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .evolution import TimeGrid, Trajectory, default_dt, measure, simulate
from .grids import ContractViolation, sobolev_norm
from .norms import DEFAULT_EPSILON
from .reduction import FirstOrderState

BOURGAIN_2D = "bourgain2d"
STRICHARTZ_2D = "strichartz2d"
STRICHARTZ_3D = "strichartz3d"
REGIMES = (BOURGAIN_2D, STRICHARTZ_2D, STRICHARTZ_3D)


class StandingAssumptionError(RuntimeError):
    """wave_norm >> u_norm^p + 1 fails; continue with a plain LWP step."""


class DegeneratePlanError(RuntimeError):
    """Doubling count m < 1: calibration constants need adjustment."""


@dataclass(frozen=True)
class ExponentPair:
    """Source exponent k and selection exponent l with epsilon applied."""

    k: float
    l: float
    epsilon: float = DEFAULT_EPSILON

    def check_bourgain_2d(self) -> None:
        eps = self.epsilon
        ok = (1.0 > self.k >= 0.25 - eps - 1e-12
              and 1.0 > self.l >= 0.25 - eps - 1e-12
              and self.k + self.l >= 1.25 - 2 * eps - 1e-12)
        if not ok:
            raise ContractViolation(f"(k, l) = ({self.k}, {self.l}) outside the 2D range")


def exponents_for(sigma: float, regime: str, epsilon: float = DEFAULT_EPSILON) -> ExponentPair:
    """Regime exponent table; piecewise cases agree at the seams."""
    if regime == BOURGAIN_2D:
        if not -0.5 <= sigma < 1.5:
            raise ContractViolation(f"sigma = {sigma} outside [-1/2, 3/2)")
        if sigma <= 0.0:
            pair = ExponentPair(0.5 + 0.5 * sigma - epsilon, 1.0 - epsilon, epsilon)
        elif sigma <= 1.0:
            pair = ExponentPair(0.5 + 0.5 * sigma - epsilon,
                                1.0 - 0.5 * sigma - epsilon, epsilon)
        else:
            pair = ExponentPair(1.0 - epsilon, 1.0 - 0.5 * sigma - epsilon, epsilon)
        pair.check_bourgain_2d()
        return pair
    if regime == STRICHARTZ_2D:
        if not 0.0 <= sigma <= 1.0:
            raise ContractViolation(f"sigma = {sigma} outside [0, 1]")
        return ExponentPair(0.5, 0.5, epsilon)
    if regime == STRICHARTZ_3D:
        if not 0.0 <= sigma <= 1.0:
            raise ContractViolation(f"sigma = {sigma} outside [0, 1]")
        return ExponentPair(0.75 - 0.5 * sigma, 0.25 + 0.5 * sigma, epsilon)
    raise ContractViolation(f"unknown regime {regime!r}")


@dataclass(frozen=True)
class CalibrationConstants:
    """Named realizations of the implicit constants, all defaulting to 1."""

    selection: float = 1.0      # T = selection * min(...)
    cycle: float = 1.0          # m = floor(cycle * W / (T^k U^2))
    envelope: float = 1.0       # c in the wave-norm envelope
    total_time_bound: float = 0.25  # lower-bound constant for m*T
    gg_factor: float = 10.0     # '>>' as '>= gg_factor *'
    epsilon_prime: float = 0.1  # the '+' in the U^-(3+) total-time bound


@dataclass(frozen=True)
class ContinuationParams:
    u_norm: float
    wave_norm: float
    sigma: float
    regime: str
    constants: CalibrationConstants = field(default_factory=CalibrationConstants)
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ContractViolation(f"unknown regime {self.regime!r}")
        if not (self.u_norm > 0 and math.isfinite(self.u_norm)):
            raise ContractViolation("u_norm must be positive and finite")
        if not (self.wave_norm > 0 and math.isfinite(self.wave_norm)):
            raise ContractViolation("wave_norm must be positive and finite")

    @property
    def standing_power(self) -> int:
        return 3 if self.regime == STRICHARTZ_3D else 2

    def standing_assumption_holds(self) -> bool:
        thr = self.constants.gg_factor * (self.u_norm ** self.standing_power + 1.0)
        return self.wave_norm >= thr


def select_T(params: ContinuationParams) -> float:
    """Step length satisfying the regime's constraint list.

    bourgain2d:    T ~ min(W^(-1/l), U^(-1/k), 1)
    strichartz2d:  T^(1/2) ~ 1/W
    strichartz3d:  T^(1/4 + sigma/2) ~ 1/W
    """
    if not params.standing_assumption_holds():
        raise StandingAssumptionError(
            f"wave_norm = {params.wave_norm:.3g} is not >> "
            f"u_norm^{params.standing_power} + 1 "
            f"(factor {params.constants.gg_factor})")
    c = params.constants.selection
    pair = exponents_for(params.sigma, params.regime, params.epsilon)
    if params.regime == BOURGAIN_2D:
        t_len = c * min(params.wave_norm ** (-1.0 / pair.l),
                        params.u_norm ** (-1.0 / pair.k), 1.0)
    else:
        t_len = c * min(params.wave_norm ** (-1.0 / pair.l), 1.0)
    t_len = min(t_len, 1.0)
    verify_selection(params, t_len)
    return t_len


def selection_constraints(params: ContinuationParams, t_len: float) -> dict:
    """All regime constraints evaluated by direct substitution.

    Products that the argument requires to be <~ 1 (or <~ W) are returned
    as named values; ``verify_selection`` checks them against the
    calibrated slack.
    """
    u, w = params.u_norm, params.wave_norm
    pair = exponents_for(params.sigma, params.regime, params.epsilon)
    k, l = pair.k, pair.l
    if params.regime == BOURGAIN_2D:
        return {
            "T<=1": t_len,
            "T^l*W": t_len ** l * w,
            "T^l*U": t_len ** l * u,
            "T^k*U": t_len ** k * u,
            "T^k*U^2/W": t_len ** k * u ** 2 / w,
        }
    if params.regime == STRICHARTZ_2D:
        return {
            "T<=1": t_len,
            "T^(1/2)*W": t_len ** 0.5 * w,
            "T^(1/2)*U": t_len ** 0.5 * u,
            "T^(1/2)*U^2/W": t_len ** 0.5 * u ** 2 / w,
        }
    a = 0.25 + 0.5 * params.sigma
    b = 0.75 - 0.5 * params.sigma
    return {
        "T<=1": t_len,
        "T^a*W": t_len ** a * w,
        "T^a*U": t_len ** a * u,
        "T^b*U": t_len ** b * u,
        "T^(a+1/2)*U^2/W": t_len ** (a + 0.5) * u ** 2 / w,
    }


def verify_selection(params: ContinuationParams, t_len: float, slack: float = 4.0) -> None:
    c = params.constants.selection
    for name, value in selection_constraints(params, t_len).items():
        if value > slack * max(c, 1.0) + 1e-9:
            raise ContractViolation(
                f"selected T = {t_len:.4g} violates {name} = {value:.4g}")


@dataclass(frozen=True)
class SchedulePlan:
    """One doubling cycle: m steps of length T."""

    t_len: float
    m: int
    total_time: float
    envelope_gain: float  # predicted per-leg wave-norm increment c T^k U^2
    regime: str
    sigma: float

    def as_dict(self) -> dict:
        return {
            "T": self.t_len,
            "m": self.m,
            "total_time": self.total_time,
            "envelope_gain": self.envelope_gain,
            "regime": self.regime,
            "sigma": self.sigma,
        }


def doubling_plan(params: ContinuationParams) -> SchedulePlan:
    """Cycle length from the at-most-doubling argument, with bound checks.

    m ~ W / (T^k U^2) legs of length T keep the wave-norm sum below twice
    its starting value; the resulting total time obeys the regime's lower
    bound (min(U^(-3-), 1) for bourgain2d, ~U^(-2) for the Strichartz
    regimes, independent of W).
    """
    t_len = select_T(params)
    cc = params.constants
    pair = exponents_for(params.sigma, params.regime, params.epsilon)
    per_leg = cc.envelope * t_len ** pair.k * params.u_norm ** 2
    m = int(math.floor(cc.cycle * params.wave_norm / per_leg))
    if m < 1:
        raise DegeneratePlanError(
            "cycle count m < 1: recalibrate (wave norm too small for the regime)")
    total = m * t_len
    if params.regime == BOURGAIN_2D:
        bound = cc.total_time_bound * min(
            params.u_norm ** -(3.0 + cc.epsilon_prime), 1.0)
    else:
        bound = cc.total_time_bound * params.u_norm ** -2.0
    if total < bound:
        raise DegeneratePlanError(
            f"total cycle time {total:.4g} under the lower bound {bound:.4g}")
    return SchedulePlan(t_len, m, total, per_leg, params.regime, params.sigma)


@dataclass(frozen=True)
class Leg:
    t_start: float
    t_len: float
    charge: float
    wave_start: float
    wave_end: float
    envelope_bound: float
    envelope_margin: float
    flagged: bool
    standing_ok: bool

    def as_dict(self) -> dict:
        return {
            "t_start": self.t_start,
            "T": self.t_len,
            "charge": self.charge,
            "wave_start": self.wave_start,
            "wave_end": self.wave_end,
            "envelope_bound": self.envelope_bound,
            "envelope_margin": self.envelope_margin,
            "flagged": self.flagged,
            "standing_ok": self.standing_ok,
        }


@dataclass(frozen=True)
class ContinuationReport:
    regime: str
    sigma: float
    horizon: float
    legs: list
    cycles_completed: int
    charge_drift: float
    flags: int

    def as_dict(self) -> dict:
        return {
            "regime": self.regime,
            "sigma": self.sigma,
            "horizon": self.horizon,
            "legs": [leg.as_dict() for leg in self.legs],
            "cycles_completed": self.cycles_completed,
            "charge_drift": self.charge_drift,
            "flags": self.flags,
        }


def wave_norm_sum(state: FirstOrderState) -> float:
    return (sobolev_norm(state.n_plus, state.sigma)
            + sobolev_norm(state.n_minus, state.sigma))


def run_continuation(initial: FirstOrderState, horizon: float, regime: str,
                     constants: CalibrationConstants | None = None,
                     dt: float | None = None, fallback_T: float = 0.25,
                     epsilon: float = DEFAULT_EPSILON) -> ContinuationReport:
    """Drive the integrator through the doubling schedule up to ``horizon``.

    Norms are measured on the grid at every cycle start; each leg is
    checked against the wave-norm envelope with the calibrated constant.
    Envelope violations flag the leg (under-resolution or calibration
    failure) and the run continues.  When the standing assumption fails,
    legs of ``fallback_T`` stand in for the schedule (plain local steps).
    """
    constants = constants or CalibrationConstants()
    dt = dt or default_dt(initial.grid)
    state = initial
    t_now = 0.0
    legs: list = []
    charge0 = measure(state).charge
    worst_charge = charge0
    cycles = 0
    while t_now < horizon - 1e-12:
        diag = measure(state)
        wave_now = wave_norm_sum(state)
        params = ContinuationParams(diag.charge, max(wave_now, 1e-12),
                                    state.sigma, regime, constants, epsilon)
        standing = params.standing_assumption_holds()
        if standing:
            plan = doubling_plan(params)
            t_leg, m = plan.t_len, plan.m
        else:
            t_leg, m = fallback_T, 1
        pair = exponents_for(state.sigma, regime, epsilon)
        for _ in range(m):
            if t_now >= horizon - 1e-12:
                break
            t_leg_eff = min(t_leg, horizon - t_now)
            steps = max(1, int(math.ceil(t_leg_eff / dt)))
            traj = simulate(state, TimeGrid(t_leg_eff / steps, steps), keep_states=False)
            new_state = traj.states[-1]
            wave_start = wave_norm_sum(state)
            wave_end = wave_norm_sum(new_state)
            bound = wave_start + constants.envelope * t_leg_eff ** pair.k * diag.charge ** 2
            margin = bound - wave_end
            legs.append(Leg(
                t_start=t_now, t_len=t_leg_eff, charge=measure(new_state).charge,
                wave_start=wave_start, wave_end=wave_end, envelope_bound=bound,
                envelope_margin=margin, flagged=margin < 0.0, standing_ok=standing,
            ))
            worst_charge = max(worst_charge, abs(legs[-1].charge))
            state = new_state
            t_now += t_leg_eff
        if standing:
            cycles += 1
    drift = abs(worst_charge / charge0 - 1.0) if charge0 > 0 else 0.0
    final_drift = max(drift, abs(legs[-1].charge / charge0 - 1.0)) if legs else 0.0
    return ContinuationReport(
        regime=regime, sigma=initial.sigma, horizon=horizon, legs=legs,
        cycles_completed=cycles, charge_drift=final_drift,
        flags=sum(1 for leg in legs if leg.flagged),
    )


@dataclass(frozen=True)
class WaveBoundReport:
    sigma: float
    t_ladder: tuple
    lhs: tuple            # sup_{t<=T} wave norm
    source: tuple         # sup_{t<=T} || n_pm - free ||_{H^sigma}
    rhs: tuple            # data part + calibrated c * T^(1/2+) * charge^2
    margins: tuple
    fitted_exponent: float

    def as_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "t_ladder": list(self.t_ladder),
            "lhs": list(self.lhs),
            "source": list(self.source),
            "rhs": list(self.rhs),
            "margins": list(self.margins),
            "fitted_exponent": self.fitted_exponent,
        }


def wave_norm_bound_3d(initial: FirstOrderState, sigma: float, t_ladder,
                       dt: float | None = None, envelope_c: float = 1.0,
                       epsilon: float = DEFAULT_EPSILON) -> WaveBoundReport:
    """A-priori 3D wave bound on simulated trajectories.

    For each T in the ladder, compares sup_{t<=T} ||n_pm(t)||_{H^sigma}
    with  ||n_pm(0)||_{H^sigma} + c T^(1/2+eps) ||u_0||^2 , and fits the
    T-exponent of the Duhamel (source) contribution, expected near 1/2.
    """
    from .grids import free_half_wave, to_spectral

    if initial.grid.dimension != 3:
        raise ContractViolation("the wave-norm bound experiment is for D = 3")
    if not -0.5 < sigma < 0.0:
        raise ContractViolation("sigma must lie in (-1/2, 0)")
    t_ladder = sorted(float(t) for t in t_ladder)
    dt = dt or default_dt(initial.grid)
    t_max = t_ladder[-1]
    steps = max(1, int(math.ceil(t_max / dt)))
    tg = TimeGrid(t_max / steps, steps)
    traj = simulate(initial, tg)
    charge = measure(initial).charge
    data_part = 0.5 * (sobolev_norm(initial.n_plus, sigma)
                       + sobolev_norm(initial.n_minus, sigma))
    times = tg.times()
    wave_sup, src_sup = [], []
    running_wave, running_src = 0.0, 0.0
    ladder_iter = iter(t_ladder)
    next_t = next(ladder_iter)
    for idx, t in enumerate(times):
        st = traj.states[idx]
        w = 0.5 * (sobolev_norm(st.n_plus, sigma) + sobolev_norm(st.n_minus, sigma))
        fp = free_half_wave(initial.n_plus, float(t), +1)
        fm = free_half_wave(initial.n_minus, float(t), -1)
        dp = to_spectral(st.n_plus).values - to_spectral(fp).values
        dm = to_spectral(st.n_minus).values - to_spectral(fm).values
        grid = initial.grid
        wgt = grid.bessel_weight(sigma)
        scale = grid.length ** (0.5 * grid.dimension)
        s_now = 0.5 * (float(np.linalg.norm(wgt * dp)) + float(np.linalg.norm(wgt * dm))) * scale
        running_wave = max(running_wave, w)
        running_src = max(running_src, s_now)
        while next_t is not None and t >= next_t - 1e-9:
            wave_sup.append(running_wave)
            src_sup.append(running_src)
            next_t = next(ladder_iter, None)
    rhs = [data_part + envelope_c * t ** (0.5 + epsilon) * charge ** 2 for t in t_ladder]
    margins = [r - l for r, l in zip(rhs, wave_sup)]
    slope, _ = np.polyfit(np.log(t_ladder), np.log(src_sup), 1)
    return WaveBoundReport(
        sigma=sigma, t_ladder=tuple(t_ladder), lhs=tuple(wave_sup),
        source=tuple(src_sup), rhs=tuple(rhs), margins=tuple(margins),
        fitted_exponent=float(slope),
    )
