"""Triebel-Lizorkin function and sequence norms, maximal functions and s*.

Two families are supported: the shear-anisotropic (``"ab"``) one built on
the cone-adapted bands, and the classical isotropic dyadic one.  Every
norm is evaluated on the periodic unit cell with the rectangle rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .frame import FrequencyGrid, support_boxes, window_values
from .lattice import Band, ConeTag, System, coset_offsets, enumerate_indices
from .transform import CoefficientMap, PeriodicSignal

AB = "ab"
DYADIC = "dyadic"


@dataclass(frozen=True)
class SpaceParams:
    """Smoothness ``alpha``, integrability ``p`` and summability ``q`` (``inf`` allowed)."""

    alpha: float
    p: float
    q: float
    family: str = AB

    def __post_init__(self):
        if not (self.p > 0 and math.isfinite(self.p)):
            raise ValueError(f"p must be positive and finite, got {self.p}")
        if not self.q > 0:
            raise ValueError(f"q must be positive or inf, got {self.q}")
        if self.family not in (AB, DYADIC):
            raise ValueError(f"unknown family {self.family!r}")


@dataclass(frozen=True)
class SStarParams:
    """Exponent ``r`` and decay ``N`` (``lambda`` for the dyadic family)."""

    r: float
    N: float
    family: str = AB

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("r must be positive")
        if not self.N > 0:
            raise ValueError("decay exponent must be positive")

    def equivalence_holds(self, p: float, q: float) -> bool:
        """Decay hypothesis of the s* equivalence for the chosen family."""
        c = 3.0 if self.family == AB else 2.0
        return self.N > c * max(1.0, self.r / q, self.r / p)


# ---------------------------------------------------------------------------
# helpers


def _lp(values: np.ndarray, p: float) -> float:
    a = np.abs(values)
    m = float(a.max()) if a.size else 0.0
    if m == 0.0 or not math.isfinite(m):
        return m
    return m * float(np.mean((a / m) ** p) ** (1.0 / p))


def _lq_accumulate(acc, term, q):
    # acc starts as a zero array; finite q keeps (running max, sum of (t/max)^q)
    term = np.abs(term)
    if math.isinf(q):
        return np.maximum(acc, term)
    if not isinstance(acc, tuple):
        acc = (np.zeros(np.shape(term)), np.zeros(np.shape(term)))
    m, s = acc
    top = np.maximum(m, term)
    safe = np.where(top > 0, top, 1.0)
    s = s * (m / safe) ** q + (term / safe) ** q
    return top, s


def _lq_finish(acc, q):
    if math.isinf(q):
        return acc
    if not isinstance(acc, tuple):
        return np.zeros(np.shape(acc))
    m, s = acc
    return m * s ** (1.0 / q)


def _freq_grid(n: int):
    f = np.fft.fftfreq(n, 1.0 / n)
    return f[:, None], f[None, :]


def upsample_spectrum(spec: np.ndarray, factor: int) -> np.ndarray:
    """Zero-pad a spectrum so the inverse transform samples a factor-times finer grid."""
    if factor == 1:
        return spec
    n = spec.shape[0]
    m = n * factor
    out = np.zeros((m, m), dtype=complex)
    f = np.fft.fftfreq(n, 1.0 / n).astype(int)
    out[np.ix_(f % m, f % m)] = spec
    return out


def _samples_from_spectrum(spec: np.ndarray) -> np.ndarray:
    n = spec.shape[0]
    return np.fft.ifft2(spec) * n * n


def dyadic_top(N: int) -> int:
    """Largest dyadic scale whose band (2^(nu-1) < |xi| < 2^(nu+1)) meets the N-grid."""
    nu = 0
    while 2 ** nu < N:  # 2^(nu-1) < N/sqrt(2) always holds below this
        nu += 1
    return nu


def norm_bands(family: str, system: System | str, N: int, j_max: int | None) -> list[Band]:
    """Bands entering a function norm (coarse band first)."""
    if family == DYADIC:
        top = dyadic_top(N) if j_max is None else j_max
        return enumerate_indices(System.DYADIC, top, include_coarse=True)
    grid = FrequencyGrid(N)
    top = grid.j_cover if j_max is None else j_max
    return enumerate_indices(system, top, include_coarse=True)


def band_multiplier(band: Band, n: int) -> np.ndarray:
    """Analysing window for the norms on an n-grid.

    The cone-projected family enters the norm without the cone
    characteristic functions, as in the definition of the function space.
    """
    x1, x2 = _freq_grid(n)
    x1 = np.broadcast_to(x1, (n, n))
    x2 = np.broadcast_to(x2, (n, n))
    return window_values(band, x1, x2, project=False)


# ---------------------------------------------------------------------------
# maximal functions


def hl_max(f: PeriodicSignal | np.ndarray, half_widths: Sequence[int] | None = None) -> np.ndarray:
    """Discrete Hardy-Littlewood maximal function of |f| with square averages.

    Averages over (2h+1)^2 boxes for h in a dyadic ladder ``0, 1, 2, 4, ...``
    up to N/2, plus the whole-cell mean, with periodic wrap.
    """
    a = np.abs(f.samples if isinstance(f, PeriodicSignal) else np.asarray(f))
    n = a.shape[0]
    if half_widths is None:
        half_widths = [0] + [2**m for m in range(int(math.log2(max(n, 2))))]
        half_widths = [h for h in half_widths if 2 * h + 1 <= n]
    out = a.copy()
    for h in half_widths:
        if h == 0:
            continue
        out = np.maximum(out, box_average(a, h))
    return np.maximum(out, a.mean())


def box_average(a: np.ndarray, h: int) -> np.ndarray:
    """Periodic mean over the (2h+1) x (2h+1) box centred at every pixel."""
    w = 2 * h + 1
    p = np.pad(a, ((h + 1, h), (h + 1, h)), mode="wrap")
    c = p.cumsum(0).cumsum(1)
    s = c[w:, w:] - c[:-w, w:] - c[w:, :-w] + c[:-w, :-w]
    return s / (w * w)


def _min_image(n: int) -> np.ndarray:
    m = np.arange(n)
    return ((m + n // 2) % n - n // 2) / n


def peetre_weight(band: Band | None, n: int, lam: float) -> np.ndarray:
    """(1 + |D y|)^(2 lam) over minimal-image offsets y, D = B^l A^j (or 2^nu, or I)."""
    y1 = _min_image(n)[:, None]
    y2 = _min_image(n)[None, :]
    if band is None or band.is_coarse:
        d1, d2 = y1 + 0 * y2, y2 + 0 * y1
    elif band.system is System.DYADIC:
        d1, d2 = 2**band.j * y1 + 0 * y2, 2**band.j * y2 + 0 * y1
    else:
        m = band.integer_inverse().astype(float) * float(band.lattice_scale)
        d1 = m[0, 0] * y1 + m[0, 1] * y2
        d2 = m[1, 0] * y1 + m[1, 1] * y2
    return (1.0 + np.hypot(d1, d2)) ** (2.0 * lam)


def peetre_sup(g: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """out(x) = max_y |g(x - y)| / weight(y) over all periodic grid offsets y.

    Offsets are visited by increasing weight and the scan stops once no
    remaining offset can raise any value.
    """
    a = np.abs(g)
    n = a.shape[0]
    gmax = a.max()
    out = a / weight[0, 0]
    order = np.argsort(weight, axis=None, kind="stable")
    wflat = weight.ravel()
    for idx in order:
        w = wflat[idx]
        if gmax / w <= out.min():
            break
        s1, s2 = divmod(int(idx), n)
        np.maximum(out, np.roll(a, (s1, s2), axis=(0, 1)) / w, out=out)
    return out


def peetre_max(f: PeriodicSignal, band: Band, lam: float, conjugate: bool = True) -> np.ndarray:
    """Shear-anisotropic Peetre maximal function of the band convolution psi * f."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    n = f.N
    g = _samples_from_spectrum(f.spectrum * _conj(band_multiplier(band, n), conjugate))
    return peetre_sup(g, peetre_weight(band, n, lam))


def isotropic_peetre(g: PeriodicSignal | np.ndarray, lam: float) -> np.ndarray:
    """g*_lambda(x) = sup_y |g(x-y)| / (1+|y|)^(2 lam) on the torus."""
    a = g.samples if isinstance(g, PeriodicSignal) else np.asarray(g)
    return peetre_sup(a, peetre_weight(None, a.shape[0], lam))


def _conj(w, conjugate):
    return np.conj(w) if conjugate else w


def band_convolution_samples(f: PeriodicSignal, band: Band, oversample: int = 1) -> np.ndarray:
    n = f.N * oversample
    spec = upsample_spectrum(f.spectrum, oversample)
    return _samples_from_spectrum(spec * np.conj(band_multiplier(band, n)))


# ---------------------------------------------------------------------------
# norms


def band_radius_range(band: Band) -> tuple[float, float]:
    """Conservative (lo, hi) bounds on max(|xi1|, |xi2|) over the unprojected window support."""
    if band.is_coarse:
        return 0.0, 2.0
    if band.system is System.DYADIC:
        return 2.0 ** (band.j - 1) / math.sqrt(2.0), 2.0 ** (band.j + 1)
    return 4.0**band.j / 16.0, 4.0**band.j / 2.0 * (1.0 + 2.0**-band.j)


SPECTRAL_FLOOR = 1e-14


def _support(spec: np.ndarray):
    # spectral positions above round-off (relative floor) and their max-norm range
    n = spec.shape[0]
    mag = np.abs(spec)
    top = mag.max() if mag.size else 0.0
    nz = np.nonzero(mag > SPECTRAL_FLOOR * top)
    x1, x2 = _freq_grid(n)
    x1 = np.broadcast_to(x1, (n, n))[nz]
    x2 = np.broadcast_to(x2, (n, n))[nz]
    r = np.maximum(np.abs(x1), np.abs(x2))
    lo, hi = (float(r.min()), float(r.max())) if r.size else (np.inf, -np.inf)
    return nz, x1, x2, lo, hi


def _candidates(band: Band, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """Boolean superset of the window support among the points (x1, x2)."""
    if band.is_coarse:
        return np.ones(x1.shape, dtype=bool)
    if band.system is System.DYADIC:
        r = np.hypot(x1, x2)
        return (r >= 2.0 ** (band.j - 1)) & (r <= 2.0 ** (band.j + 1))
    out = np.zeros(x1.shape, dtype=bool)
    for box in support_boxes(band):
        xa, xo = (x1, x2) if box.axis == 0 else (x2, x1)
        absa = np.abs(xa)
        slack = 1e-9 * (1.0 + absa)
        ok = np.abs(2.0**box.j * xo - box.l * xa) <= absa + slack
        ok &= (absa >= float(box.lo) - slack) & (absa <= float(box.hi) + slack)
        out |= ok
    return out


def _band_terms(spec: np.ndarray, bands: Sequence[Band]):
    """Yield (band, |psi~ * f| samples) for bands meeting the spectral support of f.

    Bands whose window vanishes on the support are skipped; their terms are
    identically zero.
    """
    n = spec.shape[0]
    nz, x1, x2, lo, hi = _support(spec)
    vals = spec[nz]
    for b in bands:
        blo, bhi = band_radius_range(b)
        if bhi < lo or blo > hi:
            continue
        sel = np.nonzero(_candidates(b, x1, x2))[0]
        if sel.size == 0:
            continue
        w = window_values(b, x1[sel], x2[sel], project=False)
        if not np.any(w):
            continue
        prod = np.zeros((n, n), dtype=complex)
        prod[nz[0][sel], nz[1][sel]] = vals[sel] * w
        yield b, np.abs(_samples_from_spectrum(prod))


def function_norm(
    f: PeriodicSignal,
    params: SpaceParams,
    system: System | str = System.SMOOTH_PARSEVAL,
    j_max: int | None = None,
    oversample: int = 1,
) -> float:
    """Inhomogeneous Triebel-Lizorkin norm of a band-limited periodic signal.

    ``||f * phi||_p + ||(sum_bands (2^(s alpha) |psi~ * f|)^q)^(1/q)||_p`` with
    ``s = 3j`` for the shear family and ``s = nu`` for the dyadic family.
    ``oversample`` evaluates the L^p quadrature on a finer grid (exact
    trigonometric interpolation of each band convolution).
    """
    bands = norm_bands(params.family, system, f.N, j_max)
    n = f.N * oversample
    spec = upsample_spectrum(f.spectrum, oversample)
    low = np.zeros((n, n))
    acc = np.zeros((n, n))
    for b, mag in _band_terms(spec, bands):
        if b.is_coarse:
            low = mag
            continue
        acc = _lq_accumulate(acc, 2.0 ** (b.alpha_scale * params.alpha) * mag, params.q)
    return _lp(low, params.p) + _lp(_lq_finish(acc, params.q), params.p)


def cube_classes(band: Band, n_eval: int) -> tuple[np.ndarray, np.ndarray]:
    """Lattice coordinates (k1, k2) mod P of the cube containing each point n / n_eval.

    Exact integer arithmetic: k = floor(M^-1 x) = (M^-1 n) // n_eval.
    """
    minv = band.integer_inverse()
    i1, i2 = np.meshgrid(np.arange(n_eval), np.arange(n_eval), indexing="ij")
    k1 = (minv[0, 0] * i1 + minv[0, 1] * i2) // n_eval
    k2 = (minv[1, 0] * i1 + minv[1, 1] * i2) // n_eval
    p = band.period
    return k1 % p, k2 % p


def sequence_weight(band: Band, params: SpaceParams) -> float:
    """|Q|^-alpha (shear family) or 2^(nu alpha) (dyadic) for the cubes of a band."""
    meas = float(band.cube_measure)
    if band.system is System.DYADIC:
        return 2.0 ** (band.j * params.alpha)
    return meas ** (-params.alpha)


def default_eval_size(c: CoefficientMap) -> int:
    """Smallest grid (>= c.N) aligned with every cube lattice in the map."""
    n = c.N
    for b in c.data:
        n = max(n, _aligned(b))
    return n


def _aligned(band: Band) -> int:
    # smallest n with n * M integer (denominators are powers of two)
    m = band.translation_matrix()
    den = max(x.denominator for row in m for x in row)
    return int(den)


def sequence_function(s: CoefficientMap, params: SpaceParams, n_eval: int | None = None) -> np.ndarray:
    """Pointwise (sum_Q (w_Q |s_Q| chi~_Q)^q)^(1/q) on an n_eval grid."""
    n_eval = default_eval_size(s) if n_eval is None else n_eval
    acc = np.zeros((n_eval, n_eval))
    for band in s.bands():
        avg = np.abs(s.cube_average(band))
        if not np.any(avg):
            continue
        k1, k2 = cube_classes(band, n_eval)
        meas = float(band.cube_measure)
        term = sequence_weight(band, params) * meas ** -0.5 * avg[k1, k2]
        acc = _lq_accumulate(acc, term, params.q)
    return _lq_finish(acc, params.q)


def sequence_norm(s: CoefficientMap, params: SpaceParams, n_eval: int | None = None) -> float:
    """Triebel-Lizorkin sequence norm with exact cube membership.

    Lattice points that describe the same periodic element are averaged
    first, so each cube of the unit cell is counted once.
    """
    if not s.data:
        return 0.0
    return _lp(sequence_function(s, params, n_eval), params.p)


# ---------------------------------------------------------------------------
# s* majorants


def _lattice_distance(band: Band) -> np.ndarray:
    """|M d|_per for d over the P x P lattice (minimal periodic image)."""
    p = band.period
    m = np.array(band.translation_matrix(), dtype=float)
    d1, d2 = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    x1 = m[0, 0] * d1 + m[0, 1] * d2
    x2 = m[1, 0] * d1 + m[1, 1] * d2
    x1 = x1 - np.round(x1)
    x2 = x2 - np.round(x2)
    return np.hypot(x1, x2)


def _scale_factor(band: Band) -> float:
    return 1.0 if band.is_coarse else float(2**band.j)


def s_star(s: CoefficientMap, params: SStarParams) -> CoefficientMap:
    """Majorant (s*_Q)^r = sum_{P same band} |s_P|^r / (1 + 2^j |x_Q - x_P|)^N.

    The sum runs over the distinct cubes of the unit cell with periodic
    distances; for the dyadic family 2^j is 2^nu and N is lambda.
    """
    out = CoefficientMap(s.system, s.N, s.j_max)
    for band in s.bands():
        avg = np.abs(s.cube_average(band)) ** params.r
        kern = (1.0 + _scale_factor(band) * _lattice_distance(band)) ** (-params.N)
        conv = np.real(np.fft.ifft2(np.fft.fft2(avg) * np.fft.fft2(kern)))
        # circular correlation with a symmetric kernel equals convolution
        conv = np.maximum(conv, 0.0) / band.multiplicity
        out.data[band] = conv ** (1.0 / params.r) + 0j
    return out


def s_star_direct(s: CoefficientMap, params: SStarParams, band: Band, k: tuple[int, int]) -> float:
    """Reference evaluation of one s* entry by explicit summation over cubes."""
    avg = np.abs(s.cube_average(band))
    p = band.period
    m = np.array(band.translation_matrix(), dtype=float)
    seen = set()
    tot = 0.0
    offs = coset_offsets(band)
    xq = m @ np.array(k, dtype=float)
    for a in range(p):
        for b in range(p):
            key = min(((a + d[0]) % p, (b + d[1]) % p) for d in offs)
            if key in seen:
                continue
            seen.add(key)
            dx = m @ np.array([a, b], dtype=float) - xq
            dx -= np.round(dx)
            tot += avg[a, b] ** params.r / (1.0 + _scale_factor(band) * np.hypot(*dx)) ** params.N
    return tot ** (1.0 / params.r)


# ---------------------------------------------------------------------------
# auxiliary inequalities


def cube_indicator_sum(s: CoefficientMap, band: Band, a: float, n_eval: int, normalized: bool = False) -> np.ndarray:
    """sum_P |s_P|^a chi_P (or (|s_P| chi~_P)^a) on an n_eval grid."""
    avg = np.abs(s.cube_average(band))
    k1, k2 = cube_classes(band, n_eval)
    vals = avg[k1, k2]
    if normalized:
        vals = vals * float(band.cube_measure) ** -0.5
    return vals**a


def s_star_pointwise_ratio(s: CoefficientMap, params: SStarParams, band: Band, a: float, n_eval: int | None = None) -> float:
    """max over x of (s*)_{Q(x)} / [M(sum |s_P|^a chi_P)(x)]^(1/a)."""
    n_eval = max(s.N, _aligned(band)) if n_eval is None else n_eval
    star = np.abs(s_star(_restrict(s, band), params).data[band])
    k1, k2 = cube_classes(band, n_eval)
    lhs = star[k1, k2]
    rhs = hl_max(cube_indicator_sum(s, band, a, n_eval)) ** (1.0 / a)
    mask = rhs > 0
    return float(np.max(lhs[mask] / rhs[mask])) if np.any(mask) else 0.0


def _restrict(s: CoefficientMap, band: Band) -> CoefficientMap:
    return CoefficientMap(s.system, s.N, s.j_max, {band: s.data[band]})


def fefferman_stein_ratio(fs: Iterable[np.ndarray], p: float, q: float) -> float:
    """||(sum (M f_i)^q)^(1/q)||_p / ||(sum |f_i|^q)^(1/q)||_p."""
    fs = [np.abs(np.asarray(f)) for f in fs]
    num = np.zeros_like(fs[0])
    den = np.zeros_like(fs[0])
    for f in fs:
        num = _lq_accumulate(num, hl_max(f), q)
        den = _lq_accumulate(den, f, q)
    return _lp(_lq_finish(num, q), p) / _lp(_lq_finish(den, q), p)


def peetre_hl_ratio(f: PeriodicSignal, band: Band, lam: float) -> float:
    """max_x peetre_max / (M(|psi*f|^(1/lam)))^lam."""
    g = _samples_from_spectrum(f.spectrum * np.conj(band_multiplier(band, f.N)))
    lhs = peetre_sup(g, peetre_weight(band, f.N, lam))
    rhs = hl_max(np.abs(g) ** (1.0 / lam)) ** lam
    mask = rhs > 1e-300
    return float(np.max(lhs[mask] / rhs[mask]))


def isotropic_peetre_hl_ratio(g: PeriodicSignal, lam: float) -> float:
    """max_x g*_lam / (M(|g|^(1/lam)))^lam."""
    lhs = isotropic_peetre(g, lam)
    rhs = hl_max(np.abs(g.samples) ** (1.0 / lam)) ** lam
    mask = rhs > 1e-300
    return float(np.max(lhs[mask] / rhs[mask]))


def derivative_peetre_ratio(g: PeriodicSignal, lam: float, radius: float, axis: int = 0) -> float:
    """max_x (d g / 2 pi R)*_lam / g*_lam for g band-limited to |xi| <= R.

    The derivative is spectral; dividing by 2 pi R makes the ratio
    dimensionless so it can be compared across grids.
    """
    grid = g.grid
    xi = grid.xi1 if axis == 0 else grid.xi2
    dg = PeriodicSignal.from_spectrum(g.spectrum * 2j * np.pi * xi / (2 * np.pi * radius))
    lhs = isotropic_peetre(dg, lam)
    rhs = isotropic_peetre(g, lam)
    return float(np.max(lhs / rhs))


def random_radial_signal(grid: FrequencyGrid, rng: np.random.Generator, radius: float) -> PeriodicSignal:
    spec = rng.standard_normal((grid.N, grid.N)) + 1j * rng.standard_normal((grid.N, grid.N))
    spec = np.where(np.hypot(grid.xi1, grid.xi2) <= radius, spec, 0.0)
    return PeriodicSignal.from_spectrum(spec)


__all__ = [
    "AB",
    "DYADIC",
    "SpaceParams",
    "SStarParams",
    "hl_max",
    "box_average",
    "peetre_max",
    "peetre_sup",
    "peetre_weight",
    "isotropic_peetre",
    "function_norm",
    "sequence_norm",
    "sequence_function",
    "cube_classes",
    "s_star",
    "s_star_direct",
    "s_star_pointwise_ratio",
    "fefferman_stein_ratio",
    "peetre_hl_ratio",
    "isotropic_peetre_hl_ratio",
    "derivative_peetre_ratio",
    "random_radial_signal",
    "upsample_spectrum",
    "norm_bands",
    "band_multiplier",
    "band_radius_range",
]
