r"""
Empirical probes of the bilinear estimates and ill-posedness thresholds.

``trilinear_form`` evaluates the convolution-constrained integral

    I(f, g1, g2) = L^D T_w  sum_{K1+K2+K3 = 0}  f(K3) g1(K1) g2(K2)

over the space-time lattice (indices mod the lattice, matching the torus
convolution); it must agree with the physical-space product integral of
the three inverse transforms, which is the module's correctness oracle.

Bilinear ratio probes measure discrete analogues of

    ||u n||_{X^{s, -1/2+}}            vs  ||u||_{X^{s, 1/2-}} ||n||_{X^{sigma, 1/2-}_{+-}}
    ||u1 conj(u2)||_{X^{sigma-1, -1/2+}_{+-}}  vs  ||u1||_{X^{s,1/2-}} ||u2||_{X^{s,1/2-}}

on reproducible random ensembles shaped onto the binding interaction
geometry: Schrodinger factors are frequency shells riding the parabola
(windowed free flows, modulation ~ 1), wave factors ride the cone, and a
share of samples concentrates near the resonance set where the output
modulation weight degenerates.  Sup ratios are reported per refinement
level and their growth across levels is the numerical signature of
estimate failure; absolute values are calibration data, never asserted.

``picard_c2_probe`` reproduces the flow-map C^2-failure experiment: data
families concentrated at dyadic frequency lambda, built so the quadratic
Picard correction is time-resonant, are fed through the second Picard
iterate; the fitted lambda-power of the correction's size separates the
well-posed from the ill-posed exponent regions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import ContractViolation, Grid, SpectralField, sobolev_norm, to_spectral
from .norms import BourgainSpec, bourgain_norm
from .reduction import FirstOrderState, SecondOrderState, to_first_order
from .spacetime import (
    SCHRODINGER,
    WAVE_MINUS,
    WAVE_PLUS,
    SpaceTimeField,
    st_to_physical,
    st_to_spectral,
)

DEFAULT_EPSILON = 0.01


# ---------------------------------------------------------------------------
# trilinear form

def trilinear_form(f: SpaceTimeField, g1: SpaceTimeField, g2: SpaceTimeField) -> complex:
    """Convolution-constrained trilinear integral of three spectra.

    Computed on the spectral side through the lattice convolution theorem
    (periodic convolution of g1hat, g2hat paired against fhat(-K)).
    """
    for g in (g1, g2):
        if g.grid != f.grid or g.time_samples != f.time_samples \
                or g.t_window != f.t_window:
            raise ContractViolation("trilinear factors must share the space-time grid")
    a = st_to_spectral(g1).values
    b = st_to_spectral(g2).values
    c = st_to_spectral(f).values
    conv = np.fft.fftn(np.fft.ifftn(a) * np.fft.ifftn(b)) * a.size
    # pair against fhat(-K): index reversal with wrap
    c_rev = np.flip(c)
    c_rev = np.roll(c_rev, 1, axis=tuple(range(c.ndim)))
    scale = f.grid.length ** f.grid.dimension * f.t_window
    return complex(scale * np.sum(conv * c_rev))


def trilinear_form_physical(f: SpaceTimeField, g1: SpaceTimeField,
                            g2: SpaceTimeField) -> complex:
    """Physical-space oracle: quadrature of the product of inverse transforms."""
    pf = st_to_physical(f).values
    p1 = st_to_physical(g1).values
    p2 = st_to_physical(g2).values
    cell = f.grid.cell_volume * (f.t_window / f.time_samples)
    return complex(np.sum(pf * p1 * p2) * cell)


def st_product(a: SpaceTimeField, b: SpaceTimeField, conjugate_second=False) -> SpaceTimeField:
    """Pointwise space-time product (optionally a * conj(b))."""
    pa, pb = st_to_physical(a), st_to_physical(b)
    vb = np.conj(pb.values) if conjugate_second else pb.values
    return pa.with_values(pa.values * vb)


# ---------------------------------------------------------------------------
# bilinear ratios

def bilinear_ratio_schrodinger(u: SpaceTimeField, n: SpaceTimeField, s: float,
                               sigma: float, b_out: float, b_in: float,
                               wave_kind: str = WAVE_PLUS,
                               epsilon: float = DEFAULT_EPSILON) -> float:
    """||u n||_{X^{s, b_out}} / (||u||_{X^{s, b_in}} ||n||_{X^{sigma, b_in}_{+-}}).

    Exponents are passed already decorated (the caller owns the epsilon
    policy); homogeneous of degree zero in each input.
    """
    denom = (bourgain_norm(u, BourgainSpec(s, b_in, SCHRODINGER, epsilon))
             * bourgain_norm(n, BourgainSpec(sigma, b_in, wave_kind, epsilon)))
    if denom == 0.0:
        raise ContractViolation("degenerate input: zero denominator")
    num = bourgain_norm(st_product(u, n), BourgainSpec(s, b_out, SCHRODINGER, epsilon))
    return num / denom


def bilinear_ratio_wave_output(u1: SpaceTimeField, u2: SpaceTimeField, s: float,
                               sigma: float, wave_kind: str = WAVE_PLUS,
                               b_out: float | None = None,
                               b_in: float | None = None,
                               epsilon: float = DEFAULT_EPSILON) -> float:
    """||u1 conj(u2)||_{X^{sigma-1, -1/2+}_{+-}} / prod ||u_i||_{X^{s, 1/2-}}."""
    if b_out is None:
        b_out = -0.5 + epsilon
    if b_in is None:
        b_in = 0.5 - epsilon
    spec_in = BourgainSpec(s, b_in, SCHRODINGER, epsilon)
    denom = bourgain_norm(u1, spec_in) * bourgain_norm(u2, spec_in)
    if denom == 0.0:
        raise ContractViolation("degenerate input: zero denominator")
    num = bourgain_norm(st_product(u1, u2, conjugate_second=True),
                        BourgainSpec(sigma - 1.0, b_out, wave_kind, epsilon))
    return num / denom


# ---------------------------------------------------------------------------
# ensembles

@dataclass(frozen=True)
class EnsembleSpec:
    """Reproducible worst-case ensemble parameters.

    Fields are shell-localized around N = points_per_axis/4, with the
    wave factor alternating between cone shells at 2N and N and a
    radially thin near-resonant annulus (``slab_width`` cells thick).
    """

    samples: int = 200
    seed: int = 2024
    dimension: int = 2
    t_window: float = 2.0
    time_samples: int = 256
    length: float = 8.0 * np.pi
    shell_fraction: float = 0.25  # shell at index M/4, physical N = M/4 * (2*pi/L)
    slab_width: float = 1.5

    def sub_seed(self, level: int, index: int) -> int:
        return (self.seed * 1_000_003 + level * 10_007 + index) % 2**31


def ring_data(grid: Grid, rng: np.random.Generator, radius: float,
              rel_width: float = 0.25, radial_cells: float | None = None) -> SpectralField:
    """Gaussian random coefficients on a frequency ring around ``radius``."""
    r = np.sqrt(grid.frequency_radius_sq())
    if radial_cells is None:
        mask = np.abs(r - radius) <= rel_width * radius
    else:
        spacing = 2.0 * np.pi / grid.length
        mask = np.abs(r - radius) <= radial_cells * spacing
    coeffs = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return SpectralField(grid, coeffs * mask, "spectral")


def _windowed_free(u0: SpectralField, t_window: float, time_samples: int,
                   kind: str) -> SpaceTimeField:
    from .spacetime import free_schrodinger_spacetime, free_wave_spacetime

    if kind == SCHRODINGER:
        return free_schrodinger_spacetime(u0, t_window, time_samples)
    return free_wave_spacetime(u0, t_window, time_samples,
                               +1 if kind == WAVE_PLUS else -1)


def ensemble_sample(spec: EnsembleSpec, grid: Grid, level: int, index: int) -> dict:
    """One (u1, u2, n) triple shaped onto the binding interaction geometry."""
    rng = np.random.default_rng(spec.sub_seed(level, index))
    n_shell = spec.shell_fraction * grid.points_per_axis * (2.0 * np.pi / grid.length)
    r_max = 0.95 * float(np.sqrt(grid.frequency_radius_sq()).max())
    u1_0 = ring_data(grid, rng, n_shell)
    variant = index % 4
    if variant == 0:
        u2_0 = ring_data(grid, rng, n_shell)
    else:
        # ring offset tuned so |xi1|^2 - |xi2|^2 ~ <xi1 - xi2> near antipodal pairs
        u2_0 = ring_data(grid, rng, min(n_shell + 0.5, r_max), radial_cells=spec.slab_width)
    if variant in (0, 1):
        n_0 = ring_data(grid, rng, min(2.0 * n_shell, r_max))
    elif variant == 2:
        n_0 = ring_data(grid, rng, n_shell)
    else:
        # radially thin near-resonant annulus at twice the shell radius
        n_0 = ring_data(grid, rng, min(2.0 * n_shell + 1.0, r_max),
                        radial_cells=spec.slab_width)
    wave_kind = WAVE_PLUS if (index // 4) % 2 == 0 else WAVE_MINUS
    return {
        "u1": _windowed_free(u1_0, spec.t_window, spec.time_samples, SCHRODINGER),
        "u2": _windowed_free(u2_0, spec.t_window, spec.time_samples, SCHRODINGER),
        "n": _windowed_free(n_0, spec.t_window, spec.time_samples, wave_kind),
        "wave_kind": wave_kind,
        "variant": variant,
    }


# ---------------------------------------------------------------------------
# threshold scan

@dataclass(frozen=True)
class RatioReport:
    """Sup-ratio scan outcome for one exponent pair."""

    s: float
    sigma: float
    b_out: float
    b_in: float
    refinements: tuple
    sup_ratios: tuple
    growth_exponent: float
    growth_factor: float
    samples: int
    seed: int

    def as_dict(self) -> dict:
        return {
            "s": self.s,
            "sigma": self.sigma,
            "b_out": self.b_out,
            "b_in": self.b_in,
            "refinements": list(self.refinements),
            "sup_ratios": list(self.sup_ratios),
            "growth_exponent": self.growth_exponent,
            "growth_factor": self.growth_factor,
            "samples": self.samples,
            "seed": self.seed,
        }


def threshold_scan(exponent_pairs, refinements, ensemble: EnsembleSpec,
                   epsilon: float = DEFAULT_EPSILON) -> list:
    """Sup bilinear ratios over a refinement ladder for each (s, sigma).

    For every level M the same seeded ensemble is evaluated; each sample
    contributes the larger of the Schrodinger-output and wave-output
    ratios at the given exponents.  A least-squares log-log fit of the
    sup ratio against the localization frequency N = M/4 gives the growth
    exponent; positive growth across refinements is the numerical
    signature of estimate failure.
    """
    refinements = list(refinements)
    if len(refinements) < 3 or any(b <= a for a, b in zip(refinements, refinements[1:])):
        raise ContractViolation("need at least 3 strictly increasing refinement levels")
    b_out = -0.5 + epsilon
    b_in = 0.5 - epsilon
    sups = {pair: [] for pair in exponent_pairs}
    for level, m in enumerate(refinements):
        grid = Grid(ensemble.dimension, m, ensemble.length)
        best = {pair: 0.0 for pair in exponent_pairs}
        for index in range(ensemble.samples):
            sample = ensemble_sample(ensemble, grid, level, index)
            for pair in exponent_pairs:
                s, sigma = pair
                r1 = bilinear_ratio_schrodinger(
                    sample["u1"], sample["n"], s, sigma, b_out, b_in,
                    sample["wave_kind"], epsilon)
                r2 = bilinear_ratio_wave_output(
                    sample["u1"], sample["u2"], s, sigma, sample["wave_kind"],
                    epsilon=epsilon)
                best[pair] = max(best[pair], r1, r2)
        for pair in exponent_pairs:
            sups[pair].append(best[pair])
    reports = []
    shells = np.array([m * ensemble.shell_fraction for m in refinements], dtype=float)
    for pair in exponent_pairs:
        vals = np.array(sups[pair])
        slope, _ = np.polyfit(np.log(shells), np.log(vals), 1)
        reports.append(RatioReport(
            s=pair[0], sigma=pair[1], b_out=b_out, b_in=b_in,
            refinements=tuple(refinements), sup_ratios=tuple(float(v) for v in vals),
            growth_exponent=float(slope), growth_factor=float(vals[-1] / vals[0]),
            samples=ensemble.samples, seed=ensemble.seed,
        ))
    return reports


# ---------------------------------------------------------------------------
# second-Picard-iterate C^2 probe

def _gaussian_envelope(grid: Grid, width: float) -> np.ndarray:
    out = np.zeros(grid.shape)
    half = grid.length / 2.0
    for x in grid.coordinates():
        out = out + ((x - half) ** 2)
    return np.exp(-out / (2.0 * width ** 2))


def concentrated_family(grid: Grid, lam: float, s: float, sigma: float) -> SecondOrderState:
    """Unit-normalized data concentrated at dyadic frequency lambda.

    u0 carries bumps at lambda*e1 and -(lambda+1)*e1, so the pair
    radiates a time-resonant wave correction at (2*lambda+1)*e1; the real
    n-data is modulated at (2*lambda-1)*e1, the frequency at which the
    Schrodinger correction at -(lambda-1)*e1 is time-resonant.
    """
    x = grid.coordinates()
    env = _gaussian_envelope(grid, 1.2)
    u_vals = env * (np.exp(1j * lam * x[0]) + np.exp(-1j * (lam + 1.0) * x[0]))
    n_vals = env * np.cos((2.0 * lam - 1.0) * x[0])
    u0 = SpectralField(grid, u_vals.astype(complex))
    n0 = SpectralField(grid, n_vals.astype(complex))
    u0 = u0.with_values(u0.values / sobolev_norm(u0, s))
    n0 = n0.with_values(n0.values / sobolev_norm(n0, sigma))
    zero = SpectralField(grid, np.zeros(grid.shape, dtype=complex))
    return SecondOrderState(u0, n0, zero, s, sigma)


def second_picard_term(initial: FirstOrderState, dt: float, steps: int,
                       sign: int = +1) -> FirstOrderState:
    """Quadratic Picard correction: (second iterate - free flow)(t_end).

    Streaming composite-trapezoid Duhamel of the free-flow couplings,
    with exact propagator transport; memory O(one state).
    """
    from .evolution import _free, _nonlinearity
    from .grids import free_half_wave, free_schrodinger

    state = initial
    acc = None
    prev = None
    for k in range(steps + 1):
        t = k * dt
        free_state = _free(initial, t)
        du, dp, dm = _nonlinearity(free_state, sign)
        w = (
            to_spectral(free_schrodinger(du, -t)).values,
            to_spectral(free_half_wave(dp, -t, +1)).values,
            to_spectral(free_half_wave(dm, -t, -1)).values,
        )
        if acc is None:
            acc = [np.zeros_like(v) for v in w]
        else:
            acc = [a + 0.5 * dt * (p + c) for a, p, c in zip(acc, prev, w)]
        prev = w
    t_end = steps * dt
    u = free_schrodinger(SpectralField(initial.grid, acc[0], "spectral"), t_end)
    p = free_half_wave(SpectralField(initial.grid, acc[1], "spectral"), t_end, +1)
    m = free_half_wave(SpectralField(initial.grid, acc[2], "spectral"), t_end, -1)
    return FirstOrderState(u, p, m, initial.s, initial.sigma)


@dataclass(frozen=True)
class C2ProbeReport:
    lambdas: tuple
    u_norms: tuple
    wave_norms: tuple
    total: tuple
    fitted_power: float

    def as_dict(self) -> dict:
        return {
            "lambdas": list(self.lambdas),
            "u_norms": list(self.u_norms),
            "wave_norms": list(self.wave_norms),
            "total": list(self.total),
            "fitted_power": self.fitted_power,
        }


def picard_c2_probe(lambdas, s: float, sigma: float, dimension: int = 2,
                    points_per_axis: int | None = None, t_star: float = 0.5,
                    steps: int = 256) -> C2ProbeReport:
    """Second-iterate growth of concentrated families against lambda.

    Data normalized in H^s x H^sigma; the returned power is the log-log
    slope of the quadratic correction's size at time t_star.  A C^2 flow
    map keeps it bounded; failure regions show positive power.
    """
    if dimension != 2:
        raise ContractViolation("the concentrated-family probe is built for D = 2")
    lambdas = [float(l) for l in lambdas]
    u_norms, wave_norms, totals = [], [], []
    for lam in lambdas:
        m = points_per_axis or _probe_grid_size(lam)
        grid = Grid(2, m, 2.0 * np.pi)
        data = concentrated_family(grid, lam, s, sigma)
        first_order = to_first_order(data)
        term = second_picard_term(first_order, t_star / steps, steps)
        nu = sobolev_norm(term.u, s)
        nw = 0.5 * (sobolev_norm(term.n_plus, sigma) + sobolev_norm(term.n_minus, sigma))
        u_norms.append(nu)
        wave_norms.append(nw)
        totals.append(nu + nw)
    slope, _ = np.polyfit(np.log(lambdas), np.log(totals), 1)
    return C2ProbeReport(tuple(lambdas), tuple(u_norms), tuple(wave_norms),
                         tuple(totals), float(slope))


def _probe_grid_size(lam: float) -> int:
    m = 64
    while m / 2 < 2 * lam + 8:
        m *= 2
    return m
