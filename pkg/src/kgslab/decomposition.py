r"""
Frequency, modulation and angular localization operators.

All operators are Fourier multipliers built from the cutoff family in
:mod:`kgslab.bumps`:

  * ``frequency_project``  P_N :  psi_N(|xi|) , dyadic N >= 1;
  * ``modulation_project`` S_L / W_L^{+-} :  psi_L(tau + |xi|^2) resp.
    psi_L(tau +- |xi|) on space-time spectra;
  * ``angular_project``    Q_j^A :  beta^A_j(theta(xi)) on 2D spectra,
    theta the polar angle of xi (directions identified mod pi).

Each family is an exact partition of unity, so summing the pieces over
the finite range that covers the lattice reconstructs the field to
rounding.

High-high angular bookkeeping ("HHL"): for two factors localized at
comparable high dyadic frequencies N1 ~ N2, products are organised into
nearly-parallel pairs (sector distance <= 16 at the finest scale
M = 2^-4 N1) plus transversal pairs (distance in [16, 32] at some dyadic
scale 64 <= A <= M).  For an exact cover of mode pairs this uses sharp
floor-sectors, which nest exactly under dyadic coarsening; the smooth
Q_j^A remain the operators used inside norms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bumps import (
    angular_beta,
    angular_sector_index,
    dyadic_cutoff,
    dyadic_range,
    is_dyadic,
    sector_circular_distance,
)
from .grids import ContractViolation, Grid, SpectralField, apply_multiplier
from .spacetime import SpaceTimeField, modulation_symbol, st_to_spectral


@dataclass(frozen=True)
class LocalizedPiece:
    """A projected field together with its localization labels."""

    piece: object  # SpectralField or SpaceTimeField
    labels: dict


# ---------------------------------------------------------------------------
# dyadic frequency projections P_N

def frequency_symbol(grid: Grid, n: int) -> np.ndarray:
    return dyadic_cutoff(np.sqrt(grid.frequency_radius_sq()), n)


def frequency_project(f, n: int) -> LocalizedPiece:
    """P_N f: spectral multiplication by psi_N(|xi|)."""
    if not is_dyadic(n):
        raise ContractViolation(f"N must be dyadic >= 1, got {n}")
    if isinstance(f, SpectralField):
        piece = apply_multiplier(f, frequency_symbol(f.grid, n))
    elif isinstance(f, SpaceTimeField):
        g = st_to_spectral(f)
        piece = g.with_values(g.values * frequency_symbol(f.grid, n)[..., None])
    else:
        raise ContractViolation("frequency_project expects a SpectralField or SpaceTimeField")
    return LocalizedPiece(piece, {"N": n})


def frequency_range(grid: Grid) -> list:
    """Dyadic N covering the lattice: psi_N = 0 on the grid beyond this list."""
    return dyadic_range(float(np.sqrt(grid.frequency_radius_sq().max())))


# ---------------------------------------------------------------------------
# modulation projections S_L, W_L^{+-}

def modulation_project(stf: SpaceTimeField, l: int, kind: str) -> LocalizedPiece:
    """S_L (schrodinger) or W_L^{+-} (wave_plus/wave_minus) piece of stf."""
    if not is_dyadic(l):
        raise ContractViolation(f"L must be dyadic >= 1, got {l}")
    g = st_to_spectral(stf)
    sym = dyadic_cutoff(modulation_symbol(stf, kind), l)
    return LocalizedPiece(g.with_values(g.values * sym), {"L": l, "kind": kind})


def modulation_range(stf: SpaceTimeField, kind: str) -> list:
    return dyadic_range(float(np.abs(modulation_symbol(stf, kind)).max()))


def modulation_mass_profile(stf: SpaceTimeField, kind: str) -> dict:
    """Squared-norm fraction per dyadic modulation shell L.

    Shells overlap (the psi_L are a smooth partition), so these fractions
    need not sum to 1; use :func:`modulation_cumulative_mass` for the
    fraction captured below a given scale.
    """
    g = st_to_spectral(stf)
    total = float(np.sum(np.abs(g.values) ** 2))
    out = {}
    for l in modulation_range(stf, kind):
        sym = dyadic_cutoff(modulation_symbol(stf, kind), l)
        out[l] = float(np.sum(np.abs(sym * g.values) ** 2)) / total if total > 0 else 0.0
    return out


def modulation_cumulative_mass(stf: SpaceTimeField, kind: str, l_max: int) -> float:
    """Squared-norm fraction under the cumulative multiplier sum_{L<=l_max} psi_L."""
    g = st_to_spectral(stf)
    total = float(np.sum(np.abs(g.values) ** 2))
    if total == 0.0:
        return 0.0
    mu = modulation_symbol(stf, kind)
    sym = np.zeros_like(mu)
    for l in dyadic_range(float(np.abs(mu).max())):
        if l > l_max:
            break
        sym = sym + dyadic_cutoff(mu, l)
    return float(np.sum(np.abs(sym * g.values) ** 2)) / total


# ---------------------------------------------------------------------------
# angular projections Q_j^A (D = 2 only)

def _check_2d(grid: Grid):
    if grid.dimension != 2:
        raise ContractViolation("angular decomposition is defined for D = 2 only")


def angle_mesh(grid: Grid) -> np.ndarray:
    _check_2d(grid)
    kx, ky = grid.frequencies()
    return np.arctan2(ky, kx)


def angular_symbol(grid: Grid, a: int, j: int) -> np.ndarray:
    return angular_beta(angle_mesh(grid), a, j)


def angular_project(f, a: int, j: int) -> LocalizedPiece:
    """Q_j^A f: spectral multiplication by beta^A_j(theta(xi))."""
    if isinstance(f, SpectralField):
        _check_2d(f.grid)
        piece = apply_multiplier(f, angular_symbol(f.grid, a, j))
    elif isinstance(f, SpaceTimeField):
        _check_2d(f.grid)
        g = st_to_spectral(f)
        piece = g.with_values(g.values * angular_symbol(f.grid, a, j)[..., None])
    else:
        raise ContractViolation("angular_project expects a SpectralField or SpaceTimeField")
    return LocalizedPiece(piece, {"A": a, "j": j})


# ---------------------------------------------------------------------------
# HHL index bookkeeping

def hhl_finest_scale(n1: int) -> int:
    """M = 2^-4 N1, floored at 1."""
    return max(1, int(n1) // 16)


def hhl_index_blocks(n1: int) -> set:
    """Literal enumeration of the (scale, j1, j2) blocks for factors at N1.

    Nearly-parallel blocks ('diag', M, j1, j2) with |j1 - j2| <= 16 on the
    M-cycle, plus transversal blocks ('trans', A, j1, j2) with sector
    distance in [16, 32] for dyadic 64 <= A <= M.
    """
    m = hhl_finest_scale(n1)
    blocks = set()
    for j1 in range(m):
        for j2 in range(m):
            if sector_circular_distance(j1, j2, m) <= 16:
                blocks.add(("diag", m, j1, j2))
    a = 64
    while a <= m:
        for j1 in range(a):
            for j2 in range(a):
                if 16 <= sector_circular_distance(j1, j2, a) <= 32:
                    blocks.add(("trans", a, j1, j2))
        a *= 2
    return blocks


def hhl_assign_pair(j1: int, j2: int, m: int) -> tuple:
    """Unique block label for a finest-scale sector pair.

    Pairs closer than 17 sectors at scale M are nearly parallel; any other
    pair is transversal at the coarsest dyadic A in [64, M] where its
    distance falls in [16, 32].  Floor-sector nesting (index at A = index
    at 2A >> 1) guarantees such an A exists, so the labels partition all
    M^2 pairs.
    """
    if sector_circular_distance(j1, j2, m) <= 16:
        return ("diag", m, j1, j2)
    a = 64
    while a <= m:
        shift = (m // a).bit_length() - 1
        c1, c2 = j1 >> shift, j2 >> shift
        if 16 <= sector_circular_distance(c1, c2, a) <= 32:
            return ("trans", a, c1, c2)
        a *= 2
    raise AssertionError(f"unlabelled pair ({j1}, {j2}) at M={m}")


@dataclass(frozen=True)
class HHLDecomposition:
    """Exact pairing of two high-frequency factors into HHL blocks.

    ``pairs[label]`` lists the finest-scale sector pairs (j1, j2) assigned
    to that block; every (j1, j2) appears exactly once across labels, so
    block-summed trilinear contributions recompose the undecomposed form
    exactly.
    """

    n1: int
    n2: int
    finest_scale: int
    pairs: dict

    def labels(self) -> set:
        return set(self.pairs)


def hhl_decompose_indices(n1: int, n2: int) -> HHLDecomposition:
    if not (is_dyadic(n1) and is_dyadic(n2)):
        raise ContractViolation("N1, N2 must be dyadic")
    if max(n1, n2) > 2 * min(n1, n2):
        raise ContractViolation(f"N1={n1} and N2={n2} are not comparable (ratio > 2)")
    m = hhl_finest_scale(n1)
    pairs: dict = {}
    for j1 in range(m):
        for j2 in range(m):
            label = hhl_assign_pair(j1, j2, m)
            pairs.setdefault(label, []).append((j1, j2))
    return HHLDecomposition(n1, n2, m, pairs)


def sharp_sector_masks(grid: Grid, a: int) -> np.ndarray:
    """Integer array of floor-sector indices of every lattice mode."""
    return angular_sector_index(angle_mesh(grid), a)


def decompose(u1: SpaceTimeField, u2: SpaceTimeField, n1: int, n2: int) -> list:
    """HHL decomposition of two comparable high-frequency factors.

    Returns a list of (label, pairs) entries, where ``pairs`` holds
    (piece1, piece2) LocalizedPiece couples at the finest sector scale.
    Every finest sector pair appears under exactly one label, so summing
    trilinear contributions over all entries recomposes the undecomposed
    form exactly.
    """
    _check_2d(u1.grid)
    if u1.grid != u2.grid or u1.time_samples != u2.time_samples:
        raise ContractViolation("factors must share the space-time grid")
    idx = hhl_decompose_indices(n1, n2)
    m = idx.finest_scale
    pieces1 = sector_pieces(u1, m)
    pieces2 = sector_pieces(u2, m)
    out = []
    for label, pair_list in sorted(idx.pairs.items()):
        couples = [
            (
                LocalizedPiece(pieces1[j1], {"label": label, "j": j1, "factor": 1}),
                LocalizedPiece(pieces2[j2], {"label": label, "j": j2, "factor": 2}),
            )
            for j1, j2 in pair_list
        ]
        out.append((label, couples))
    return out


def sector_pieces(f: SpaceTimeField, a: int) -> list:
    """All A sharp-sector pieces of a space-time field (spectral)."""
    g = st_to_spectral(f)
    sectors = sharp_sector_masks(f.grid, a)
    return [g.with_values(g.values * (sectors == j)[..., None]) for j in range(a)]
