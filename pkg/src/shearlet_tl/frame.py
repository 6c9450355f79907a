"""Sampled frequency windows, cone classification and frame diagnostics.

Frequencies are integer pairs on an N x N grid laid out in numpy FFT order:
``grid.xi1[a, b]`` is the frequency along axis 0 and ``grid.xi2[a, b]`` the
one along axis 1. Windows exclude the translation phase and the amplitude
``Band.amplitude``; both are applied by :mod:`shearlet_tl.transform`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

import numpy as np

from . import generators as g
from .lattice import Band, ConeTag, System, enumerate_indices, coarse_band


@dataclass(frozen=True)
class FrequencyGrid:
    """N x N integer frequency lattice of 1-periodic band-limited signals."""

    N: int

    def __post_init__(self):
        n = self.N
        if not isinstance(n, (int, np.integer)) or n < 2 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 2, got {n!r}")

    @property
    def j_max(self) -> int:
        """floor(log4 N): largest scale whose frequency band starts inside the grid."""
        j = 0
        while 4 ** (j + 1) <= self.N:
            j += 1
        return j

    @property
    def j_cover(self) -> int:
        """Smallest J such that scales 0..J resolve every grid frequency.

        The truncated partition with top scale J equals one exactly on
        max|xi| <= 4^(J-1); this is j_max + 1 for every power of two N >= 4.
        """
        j = 1
        while 4 ** (j - 1) < self.N // 2:
            j += 1
        return j

    @cached_property
    def freqs(self) -> np.ndarray:
        return np.fft.fftfreq(self.N, 1.0 / self.N).astype(np.int64)

    @cached_property
    def xi1(self) -> np.ndarray:
        return np.broadcast_to(self.freqs[:, None], (self.N, self.N))

    @cached_property
    def xi2(self) -> np.ndarray:
        return np.broadcast_to(self.freqs[None, :], (self.N, self.N))

    def resolved_mask(self, j_max: int) -> np.ndarray:
        """Frequencies where scales 0..j_max sum to one: max|xi| <= 4^(j_max-1)."""
        lim = Fraction(4) ** (j_max - 1)
        m = np.maximum(np.abs(self.xi1), np.abs(self.xi2))
        return m * lim.denominator <= lim.numerator

    def seam_mask(self) -> np.ndarray:
        """Diagonal seams |xi1| = |xi2| outside the low-frequency box."""
        a, b = np.abs(self.xi1), np.abs(self.xi2)
        return (a == b) & (8 * a > 1)


# ---------------------------------------------------------------------------
# cone classification


_CONE_TAGS = (ConeTag.LOW_FREQUENCY, ConeTag.HORIZONTAL, ConeTag.VERTICAL)


def cone_of(xi1, xi2) -> ConeTag | np.ndarray:
    """Cone containing a frequency; the diagonal seam belongs to the horizontal cone.

    Returns a :class:`ConeTag` for scalars and an object array for arrays.
    """
    a = np.abs(np.asarray(xi1, dtype=float))
    b = np.abs(np.asarray(xi2, dtype=float))
    low = (a <= 0.125) & (b <= 0.125)
    horiz = ~low & (b <= a)
    code = np.where(low, 0, np.where(horiz, 1, 2))
    if code.ndim == 0:
        return _CONE_TAGS[int(code)]
    out = np.empty(code.shape, dtype=object)
    for i, tag in enumerate(_CONE_TAGS):
        out[code == i] = tag
    return out


def _cone_masks(xi1, xi2):
    a = np.abs(xi1)
    b = np.abs(xi2)
    low = (a <= 0.125) & (b <= 0.125)
    horiz = ~low & (b <= a)
    vert = ~low & ~horiz
    return low, horiz, vert


def _ratio(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    out = np.zeros(np.broadcast(num, den).shape)
    with np.errstate(over="ignore"):
        np.divide(num, den, out=out, where=den != 0)
    return out, den != 0


def _directional(j, l, num, den):
    # v(2^j num/den - l), zero where den == 0
    r, ok = _ratio(num, den)
    with np.errstate(over="ignore", invalid="ignore"):
        return np.where(ok, g.psi2_hat(2.0**j * r - l), 0.0)


# ---------------------------------------------------------------------------
# support boxes


@dataclass(frozen=True)
class SupportBox:
    """Closed set {lo <= |xi_a| <= hi, |2^j xi_o - l xi_a| <= |xi_a|}.

    ``axis`` is 0 when xi_a = xi1 (horizontal orientation) and 1 otherwise.
    The ratio condition is the trapezoid |xi_o/xi_a - l 2^-j| <= 2^-j.
    """

    axis: int
    lo: Fraction
    hi: Fraction
    j: int
    l: int

    def contains(self, xi1, xi2) -> np.ndarray:
        """Exact membership test for integer or Fraction frequencies."""
        xa, xo = (xi1, xi2) if self.axis == 0 else (xi2, xi1)
        xa = np.asarray(xa, dtype=object)
        xo = np.asarray(xo, dtype=object)
        absa = np.abs(xa)
        ok_r = np.abs(2**self.j * xo - self.l * xa) <= absa
        ok_a = (absa >= self.lo) & (absa <= self.hi)
        return np.asarray(ok_r & ok_a, dtype=bool)

    def ratio_interval(self) -> tuple[Fraction, Fraction]:
        s = Fraction(1, 2**self.j)
        return (self.l - 1) * s, (self.l + 1) * s


def support_boxes(band: Band) -> tuple[SupportBox, ...]:
    """Analytic frequency support of a band window (coarse bands return ())."""
    if band.is_coarse or band.system is System.DYADIC:
        return ()
    lo = Fraction(4**band.j, 16)
    hi = Fraction(4**band.j, 2)
    if band.system is System.SMOOTH_PARSEVAL and band.boundary:
        # the vertical half has |xi1| <= |xi2|; its dominant coordinate is bounded
        # by the W support in the same way
        return (SupportBox(0, lo, hi, band.j, band.shear), SupportBox(1, lo, hi, band.j, band.shear))
    axis = 0 if band.cone is ConeTag.HORIZONTAL else 1
    return (SupportBox(axis, lo, hi, band.j, band.shear),)


# ---------------------------------------------------------------------------
# windows


def window_values(band: Band, xi1, xi2, project: bool = True) -> np.ndarray:
    """Unnormalised window |w_band(xi)| at arbitrary real frequencies.

    ``project`` applies the cone characteristic functions of the
    cone-projected system; it is ignored for the other systems.
    """
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    j, l = band.j, band.shear
    if band.system is System.DYADIC:
        if band.is_coarse:
            return g.dyadic_coarse_hat(xi1, xi2) + 0 * xi1
        return g.dyadic_band_hat(xi1 / 2**j, xi2 / 2**j) + 0 * xi1
    if band.system is System.CONE_PROJECTED:
        low, horiz, vert = _cone_masks(xi1, xi2)
        if band.is_coarse:
            w = g.phi_coarse_hat(xi1, xi2) + 0 * xi1
            return np.where(low, w, 0.0) if project else w
        if band.cone is ConeTag.HORIZONTAL:
            w = g.psi1_hat(xi1 / 4**j) * _directional(j, l, xi2, xi1)
            mask = horiz
        else:
            w = g.psi1_hat(xi2 / 4**j) * _directional(j, l, xi1, xi2)
            mask = vert
        return np.where(mask, w, 0.0) if project else w
    # smooth Parseval
    if band.is_coarse:
        return g.Phi_hat(xi1, xi2) + 0 * xi1
    radial = g.W_hat(xi1 / 4**j, xi2 / 4**j)
    if band.boundary:
        h_side = np.abs(xi2) <= np.abs(xi1)
        d = np.where(h_side, _directional(j, l, xi2, xi1), _directional(j, l, xi1, xi2))
        return radial * d
    if band.cone is ConeTag.HORIZONTAL:
        return radial * _directional(j, l, xi2, xi1)
    return radial * _directional(j, l, xi1, xi2)


@dataclass(frozen=True)
class SpectralWindow:
    """Window samples of one band on a grid."""

    band: Band
    grid: FrequencyGrid
    values: np.ndarray = field(repr=False)
    support: tuple[SupportBox, ...] = ()

    @cached_property
    def nonzero(self) -> tuple[np.ndarray, np.ndarray]:
        return np.nonzero(self.values)

    def is_empty(self) -> bool:
        return not np.any(self.values)


def window(band: Band, grid: FrequencyGrid) -> SpectralWindow:
    """Sample a band window on the grid."""
    if band.system is not System.DYADIC and band.j > grid.j_cover:
        raise ValueError(f"band scale {band.j} exceeds grid capacity {grid.j_cover} for N={grid.N}")
    vals = window_values(band, grid.xi1, grid.xi2)
    vals = np.ascontiguousarray(vals, dtype=float)
    vals.setflags(write=False)
    return SpectralWindow(band, grid, vals, support_boxes(band))


def system_bands(system: System | str, j_max: int) -> list[Band]:
    """Coarse band followed by all bands up to ``j_max`` in enumeration order."""
    return enumerate_indices(system, j_max, include_coarse=True)


def system_windows(system: System | str, grid: FrequencyGrid, j_max: int | None = None) -> list[SpectralWindow]:
    j_max = grid.j_max if j_max is None else j_max
    return [window(b, grid) for b in system_bands(system, j_max)]


# ---------------------------------------------------------------------------
# partition of unity


@dataclass
class PartitionReport:
    system: str
    N: int
    j_max: int
    residual: np.ndarray = field(repr=False)
    max_deviation: float
    max_deviation_resolved: float
    max_deviation_off_seam: float
    max_deviation_on_seam: float
    n_seam: int
    n_unresolved: int
    origin_value: float

    def summary(self) -> dict:
        return {
            "system": self.system,
            "N": self.N,
            "j_max": self.j_max,
            "max_deviation": self.max_deviation,
            "max_deviation_resolved": self.max_deviation_resolved,
            "max_deviation_off_seam": self.max_deviation_off_seam,
            "max_deviation_on_seam": self.max_deviation_on_seam,
            "n_seam": self.n_seam,
            "n_unresolved": self.n_unresolved,
            "origin_value": self.origin_value,
        }


def partition_sum(system: System | str, grid: FrequencyGrid, j_max: int | None = None) -> np.ndarray:
    """Sum of squared windows over all bands up to ``j_max`` (coarse included)."""
    total = np.zeros((grid.N, grid.N))
    for w in system_windows(system, grid, j_max):
        total += w.values**2
    return total


def _safe_max(a) -> float:
    return float(np.max(a)) if np.size(a) else 0.0


def partition_of_unity(system: System | str, grid: FrequencyGrid, j_max: int | None = None) -> PartitionReport:
    """Deviation of the squared-window sum from one.

    ``max_deviation`` is taken over the full grid; ``max_deviation_resolved``
    over max|xi| <= 4^(j_max-1), the region the truncated family can reach;
    seam frequencies are reported separately in ``*_on_seam``/``*_off_seam``.
    """
    system = System(system)
    j_max = grid.j_max if j_max is None else j_max
    s = partition_sum(system, grid, j_max)
    res = s - 1.0
    dev = np.abs(res)
    seam = grid.seam_mask()
    resolved = grid.resolved_mask(j_max)
    return PartitionReport(
        system=system.value,
        N=grid.N,
        j_max=j_max,
        residual=res,
        max_deviation=_safe_max(dev),
        max_deviation_resolved=_safe_max(dev[resolved]),
        max_deviation_off_seam=_safe_max(dev[~seam]),
        max_deviation_on_seam=_safe_max(dev[seam]),
        n_seam=int(seam.sum()),
        n_unresolved=int((~resolved).sum()),
        origin_value=float(s[0, 0]),
    )


# ---------------------------------------------------------------------------
# overlap audit


def _open_overlap(a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def bands_overlap(b1: Band, b2: Band) -> bool:
    """Whether two horizontal cone-projected supports share an open region."""
    s1 = support_boxes(b1)[0]
    s2 = support_boxes(b2)[0]
    return _open_overlap((s1.lo, s1.hi), (s2.lo, s2.hi)) and _open_overlap(s1.ratio_interval(), s2.ratio_interval())


@dataclass
class OverlapReport:
    j_max: int
    counts: dict = field(repr=False)
    interactions: dict = field(repr=False)
    max_count: int
    max_interaction: int
    scales_touched: dict = field(repr=False)
    bound: int = 11

    @property
    def passed(self) -> bool:
        return self.max_count <= self.bound and self.max_interaction <= self.bound + 1


def overlap_count(grid: FrequencyGrid | None, j_max: int) -> OverlapReport:
    """Count horizontal bands whose supports meet each horizontal band.

    Supports are the analytic boxes of the cone-projected windows, compared
    as open sets. ``interactions[(j, l)]`` lists (i, m) including (j, l)
    itself, i.e. the index set m(l, i) of the expansion of a band
    convolution.
    """
    if grid is not None and j_max > grid.j_cover:
        raise ValueError("j_max exceeds grid capacity")
    bands = enumerate_indices(System.CONE_PROJECTED, j_max, cones=[ConeTag.HORIZONTAL])
    counts, inter, scales = {}, {}, {}
    for b in bands:
        hits = [(o.j, o.shear) for o in bands if bands_overlap(b, o)]
        key = (b.j, b.shear)
        inter[key] = sorted(hits)
        counts[key] = len([h for h in hits if h != key])
        scales[key] = sorted({i for i, _ in hits})
    return OverlapReport(
        j_max=j_max,
        counts=counts,
        interactions=inter,
        max_count=max(counts.values()),
        max_interaction=max(len(v) for v in inter.values()),
        scales_touched=scales,
    )


__all__ = [
    "FrequencyGrid",
    "SupportBox",
    "SpectralWindow",
    "PartitionReport",
    "OverlapReport",
    "cone_of",
    "window",
    "window_values",
    "support_boxes",
    "system_bands",
    "system_windows",
    "partition_sum",
    "partition_of_unity",
    "bands_overlap",
    "overlap_count",
    "coarse_band",
]
