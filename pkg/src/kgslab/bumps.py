r"""
Smooth cutoffs and partitions of unity.

The base bump is the standard exp(-1/x) glue,

    phi(x) = exp(-1/x)  (x > 0),  0 otherwise,
    psi(r) = phi(2 - |r|) / (phi(2 - |r|) + phi(|r| - 1)) ,

which is smooth, even, supported in (-2, 2) and identically 1 on [-1, 1].
From it:

  * dyadic family   psi_1 = psi,  psi_N(r) = psi(r/N) - psi(2r/N)  (N = 2^n >= 2),
    telescoping to  sum_{N >= 1} psi_N = 1 with
    supp psi_N in [-2N, -N/2] u [N/2, 2N];

  * equidistant partition on R,  beta_j(x) = psi(x - j) / sum_k psi(x - k);

  * equidistant partition of the unit circle into A sectors (directions
    identified mod pi),  beta^A_j(theta) = beta_j(A theta / pi) +
    beta_{j-A}(A theta / pi), summed over the 2A-periodic images of the
    argument so that sum_{j=0}^{A-1} beta^A_j = 1 exactly on (-pi, pi].
"""

from __future__ import annotations

import numpy as np


def glue(x: np.ndarray) -> np.ndarray:
    """exp(-1/x) for x > 0, else 0; smooth on R."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def bump(r) -> np.ndarray:
    """Even smooth bump: 1 on [-1, 1], supported in (-2, 2), values in [0, 1]."""
    r = np.abs(np.asarray(r, dtype=float))
    a = glue(2.0 - r)
    b = glue(r - 1.0)
    with np.errstate(invalid="ignore"):
        out = np.where(a + b > 0.0, a / np.where(a + b > 0.0, a + b, 1.0), 0.0)
    return out


def is_dyadic(n: float) -> bool:
    n = float(n)
    if n < 1 or n != int(n):
        return False
    m = int(n)
    return (m & (m - 1)) == 0


def dyadic_range(max_value: float) -> list:
    """Dyadic N = 1, 2, 4, ... up to the first N with N/2 > max_value.

    psi_N vanishes identically on [0, max_value] once N/2 > max_value, so
    this finite list already sums to 1 there.
    """
    out = [1]
    n = 2
    while n / 2 <= max_value:
        out.append(n)
        n *= 2
    return out


def dyadic_cutoff(r, n: int) -> np.ndarray:
    """psi_N(r): the dyadic ring cutoff at scale N (N dyadic >= 1)."""
    if not is_dyadic(n):
        raise ValueError(f"N must be dyadic >= 1, got {n}")
    r = np.asarray(r, dtype=float)
    if n == 1:
        return bump(r)
    return bump(r / n) - bump(2.0 * r / n)


def dyadic_partition_defect(r, max_value: float | None = None) -> np.ndarray:
    """|1 - sum_N psi_N(r)| over the finite dyadic range covering r."""
    r = np.asarray(r, dtype=float)
    top = float(np.max(np.abs(r))) if max_value is None else max_value
    total = np.zeros_like(r)
    for n in dyadic_range(top):
        total += dyadic_cutoff(r, n)
    return np.abs(1.0 - total)


def _beta_normalizer(x: np.ndarray) -> np.ndarray:
    """sum_k psi(x - k) over all integers k (only |x-k| < 2 contribute)."""
    x = np.asarray(x, dtype=float)
    base = np.floor(x)
    z = np.zeros_like(x)
    for off in (-2.0, -1.0, 0.0, 1.0, 2.0):
        z += bump(x - (base + off))
    return z


def equidistant_beta(x, j: int) -> np.ndarray:
    """beta_j(x) = psi(x - j) / sum_k psi(x - k)."""
    x = np.asarray(x, dtype=float)
    return bump(x - j) / _beta_normalizer(x)


def angular_beta(theta, a: int, j: int) -> np.ndarray:
    """Sector weight beta^A_j(theta) on directions mod pi.

    Includes the 2A-periodic images of s = A*theta/pi, so the family
    {beta^A_j}_{j=0..A-1} is an exact partition of unity on the circle.
    """
    if a < 1 or not 0 <= j < a:
        raise ValueError(f"need A >= 1 and 0 <= j < A, got A={a}, j={j}")
    s = np.asarray(theta, dtype=float) * a / np.pi
    num = np.zeros_like(s)
    for center in (j, j - a):
        for p in (-2 * a, 0, 2 * a):
            num += bump(s - (center + p))
    return num / _beta_normalizer(s)


def angular_sector_index(theta, a: int) -> np.ndarray:
    """Sharp (floor) sector index in {0..A-1} of a direction mod pi.

    Floor sectors nest exactly under dyadic coarsening: the index at A is
    the index at 2A shifted right by one bit, which is what makes the
    angular Whitney bookkeeping an exact partition of mode pairs.
    """
    d = np.mod(np.asarray(theta, dtype=float) / np.pi, 1.0)
    idx = np.floor(d * a).astype(int)
    return np.clip(idx, 0, a - 1)


def sector_circular_distance(j1: int, j2: int, a: int) -> int:
    """Distance between sector indices on the A-cycle."""
    d = abs(int(j1) - int(j2)) % a
    return min(d, a - d)
