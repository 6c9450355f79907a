"""Analysis and synthesis operators on 1-periodic band-limited signals.

Digital model
-------------
A signal is sampled at x_n = n / N, n in {0..N-1}^2, and its spectrum holds
the Fourier-series coefficients ``fft2(samples) / N^2`` at integer
frequencies.  With this convention ``mean(|f|^2) = sum(|f_hat|^2)``.

For a band with translation matrix M (x_k = M k) the phase
``exp(-2 pi i xi . M k)`` is periodic in k with period P in each coordinate,
so the coefficients of a band form a dense P x P array.  Writing
``xi . M k = u . k / P`` with integer ``u = xi^T (P M)``, analysis scatters
``f_hat * w`` onto u mod P and applies one inverse FFT; synthesis gathers
back from one forward FFT.  The map xi -> u mod P is injective on every
band support, so both steps are exact.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from .frame import FrequencyGrid, SpectralWindow, system_bands, window
from .lattice import Band, ConeTag, ShearletIndex, System, coarse_band, coset_offsets

SPARSE_TOL = 1e-14


@dataclass(frozen=True)
class PeriodicSignal:
    """N x N complex samples of a 1-periodic function on [0,1)^2."""

    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError("samples must be a square 2-D array")
        FrequencyGrid(s.shape[0])
        s = np.array(s, dtype=complex)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_spectrum(cls, spectrum: np.ndarray) -> "PeriodicSignal":
        spectrum = np.asarray(spectrum, dtype=complex)
        n = spectrum.shape[0]
        return cls(np.fft.ifft2(spectrum) * n * n)

    @property
    def N(self) -> int:
        return self.samples.shape[0]

    @property
    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(self.N)

    @property
    def spectrum(self) -> np.ndarray:
        return np.fft.fft2(self.samples) / self.N**2

    def norm2(self) -> float:
        """L^2 norm over the unit cell (rectangle rule, exact for trigonometric polynomials)."""
        return float(np.sqrt(np.mean(np.abs(self.samples) ** 2)))

    def evaluate(self, x) -> complex:
        """Exact trigonometric-polynomial value at an arbitrary point."""
        g = self.grid
        spec = self.spectrum
        ph = np.exp(2j * np.pi * (g.xi1 * float(x[0]) + g.xi2 * float(x[1])))
        return complex(np.sum(spec * ph))

    def translate(self, shift) -> "PeriodicSignal":
        """f(. - shift) computed exactly in the frequency domain."""
        g = self.grid
        ph = np.exp(-2j * np.pi * (g.xi1 * float(shift[0]) + g.xi2 * float(shift[1])))
        return PeriodicSignal.from_spectrum(self.spectrum * ph)

    def __add__(self, other):
        return PeriodicSignal(self.samples + other.samples)

    def __sub__(self, other):
        return PeriodicSignal(self.samples - other.samples)

    def __mul__(self, c):
        return PeriodicSignal(self.samples * c)

    __rmul__ = __mul__


def random_signal(grid: FrequencyGrid, rng: np.random.Generator, band_limit: float | None = None) -> PeriodicSignal:
    """Complex Gaussian spectrum, optionally restricted to max|xi| <= band_limit."""
    spec = rng.standard_normal((grid.N, grid.N)) + 1j * rng.standard_normal((grid.N, grid.N))
    if band_limit is not None:
        m = np.maximum(np.abs(grid.xi1), np.abs(grid.xi2))
        spec = np.where(m <= band_limit, spec, 0.0)
    return PeriodicSignal.from_spectrum(spec / np.sqrt(grid.N**2))


def resolved_limit(j_max: int) -> float:
    """Largest max|xi| on which the truncated family with top scale j_max is exact."""
    return 4.0 ** (j_max - 1)


# ---------------------------------------------------------------------------
# band plumbing


@lru_cache(maxsize=8192)
def band_window(band: Band, N: int) -> SpectralWindow:
    """Cached window of a band on the N x N grid."""
    return window(band, FrequencyGrid(N))


@lru_cache(maxsize=4096)
def _scatter_index(band: Band, N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(flat grid positions, flat lattice positions, window values) of a band's support."""
    grid = FrequencyGrid(N)
    vals = band_window(band, N).values
    a, b = np.nonzero(vals)
    p = band.period
    k = band.frequency_map()
    x1 = grid.xi1[a, b]
    x2 = grid.xi2[a, b]
    u1 = (x1 * k[0, 0] + x2 * k[1, 0]) % p
    u2 = (x1 * k[0, 1] + x2 * k[1, 1]) % p
    flat_grid = a * N + b
    flat_lat = u1 * p + u2
    out = (flat_grid, flat_lat, vals[a, b])
    for arr in out:
        arr.setflags(write=False)
    return out


def band_windows(system: System | str, grid: FrequencyGrid, j_max: int) -> tuple[SpectralWindow, ...]:
    return tuple(band_window(b, grid.N) for b in system_bands(System(system), j_max))


# ---------------------------------------------------------------------------
# coefficients


@dataclass
class CoefficientMap:
    """Coefficients of every band on its P x P phase-period lattice.

    ``data[band][k1 % P, k2 % P]`` is the coefficient of (band, k).  Entries
    below ``SPARSE_TOL`` in magnitude count as absent when iterating.
    """

    system: System
    N: int
    j_max: int
    data: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.system = System(self.system)

    # mapping interface -------------------------------------------------
    def __getitem__(self, idx: ShearletIndex) -> complex:
        arr = self.data.get(idx.band)
        if arr is None:
            return 0j
        p = idx.band.period
        return complex(arr[idx.k[0] % p, idx.k[1] % p])

    def __setitem__(self, idx: ShearletIndex, value: complex) -> None:
        arr = self.array(idx.band)
        p = idx.band.period
        arr[idx.k[0] % p, idx.k[1] % p] = value

    def array(self, band: Band) -> np.ndarray:
        """Dense coefficient array of a band, created as zeros when missing."""
        if band not in self.data:
            self.data[band] = np.zeros((band.period, band.period), dtype=complex)
        return self.data[band]

    def items(self) -> Iterator[tuple[ShearletIndex, complex]]:
        for band in sorted(self.data):
            arr = self.data[band]
            for k1, k2 in zip(*np.nonzero(np.abs(arr) >= SPARSE_TOL)):
                yield ShearletIndex(band, (int(k1), int(k2))), complex(arr[k1, k2])

    def __len__(self) -> int:
        return sum(int(np.count_nonzero(np.abs(a) >= SPARSE_TOL)) for a in self.data.values())

    def bands(self) -> list[Band]:
        return sorted(self.data)

    # algebra ----------------------------------------------------------
    def copy(self) -> "CoefficientMap":
        return CoefficientMap(self.system, self.N, self.j_max, {b: a.copy() for b, a in self.data.items()})

    def scaled(self, c: complex) -> "CoefficientMap":
        return CoefficientMap(self.system, self.N, self.j_max, {b: a * c for b, a in self.data.items()})

    def combine(self, other: "CoefficientMap", alpha=1.0, beta=1.0) -> "CoefficientMap":
        out = self.scaled(alpha)
        for b, a in other.data.items():
            out.data[b] = out.data.get(b, 0) + beta * a
        return out

    def weight(self, band: Band) -> float:
        return band.redundancy_weight

    def energy(self) -> float:
        """Weighted energy sum_bands weight * sum_k |c|^2."""
        return float(sum(self.weight(b) * np.sum(np.abs(a) ** 2) for b, a in self.data.items()))

    def inner(self, other: "CoefficientMap") -> complex:
        """Weighted inner product sum weight * c * conj(d)."""
        tot = 0j
        for b, a in self.data.items():
            if b in other.data:
                tot += self.weight(b) * np.sum(a * np.conj(other.data[b]))
        return complex(tot)

    # cube semantics ---------------------------------------------------
    def cube_average(self, band: Band) -> np.ndarray:
        """Average over lattice points describing the same periodic element."""
        arr = self.data[band]
        offs = coset_offsets(band)
        acc = np.zeros_like(arr)
        for d in offs:
            acc += np.roll(arr, (-int(d[0]), -int(d[1])), axis=(0, 1))
        return acc / len(offs)

    def set_cube(self, idx: ShearletIndex, value: complex) -> None:
        """Set every lattice duplicate of the element idx to ``value``."""
        arr = self.array(idx.band)
        p = idx.band.period
        for d in coset_offsets(idx.band):
            arr[(idx.k[0] + d[0]) % p, (idx.k[1] + d[1]) % p] = value

    # serialisation ----------------------------------------------------
    def to_records(self) -> list[dict]:
        out = []
        for idx, c in self.items():
            out.append(
                {
                    "system": self.system.value,
                    "cone": "boundary" if idx.boundary else idx.cone.value,
                    "j": idx.j,
                    "l": idx.shear,
                    "k": [idx.k[0], idx.k[1]],
                    "re": c.real,
                    "im": c.imag,
                }
            )
        return out

    @classmethod
    def from_records(cls, records: list[dict], N: int, j_max: int | None = None) -> "CoefficientMap":
        if not records:
            return cls(System.SMOOTH_PARSEVAL, N, 0 if j_max is None else j_max)
        system = System(records[0]["system"])
        jm = max(int(r["j"]) for r in records) if j_max is None else j_max
        cm = cls(system, N, jm)
        for r in records:
            if System(r["system"]) is not system:
                raise ValueError("mixed systems in coefficient records")
            cone = r["cone"]
            boundary = cone == "boundary"
            tag = ConeTag.HORIZONTAL if boundary else ConeTag(cone)
            band = Band(system, tag, int(r["j"]), int(r["l"]), boundary)
            cm[ShearletIndex(band, (int(r["k"][0]), int(r["k"][1])))] = complex(r["re"], r["im"])
        return cm


# ---------------------------------------------------------------------------
# operators


def _check_jmax(grid: FrequencyGrid, j_max: int) -> None:
    if j_max < 0 or j_max > grid.j_cover:
        raise ValueError(f"j_max={j_max} outside the grid capacity 0..{grid.j_cover} for N={grid.N}")


def analyze_band(f: PeriodicSignal, band: Band, spectrum: np.ndarray | None = None) -> np.ndarray:
    """Coefficients <f, psi_{band,k}> for all k mod P."""
    n = f.N
    spec = f.spectrum if spectrum is None else spectrum
    gpos, lpos, vals = _scatter_index(band, n)
    p = band.period
    prod = spec.ravel()[gpos] * vals
    h = np.bincount(lpos, weights=prod.real, minlength=p * p) + 1j * np.bincount(
        lpos, weights=prod.imag, minlength=p * p
    )
    return band.amplitude * p * p * np.fft.ifft2(h.reshape(p, p))


def analyze(f: PeriodicSignal, system: System | str = System.SMOOTH_PARSEVAL, j_max: int | None = None) -> CoefficientMap:
    """Analysis operator: all inner products <f, psi_Q> up to scale j_max."""
    system = System(system)
    grid = f.grid
    j_max = grid.j_max if j_max is None else j_max
    _check_jmax(grid, j_max)
    spec = f.spectrum
    cm = CoefficientMap(system, grid.N, j_max)
    for b in system_bands(system, j_max):
        cm.data[b] = analyze_band(f, b, spec)
    return cm


def synthesize_band_spectrum(coeffs: np.ndarray, band: Band, N: int, weight: float | None = None) -> np.ndarray:
    """Spectrum of weight * sum_k c_k psi_{band,k}."""
    gpos, lpos, vals = _scatter_index(band, N)
    p = band.period
    if coeffs.shape != (p, p):
        raise ValueError(f"coefficient array for {band.label()} must be {p}x{p}")
    weight = band.redundancy_weight if weight is None else weight
    ck = np.fft.fft2(coeffs).ravel()
    out = np.zeros(N * N, dtype=complex)
    out[gpos] = weight * band.amplitude * vals * ck[lpos]
    return out.reshape(N, N)


def synthesize(c: CoefficientMap, system: System | str | None = None, grid: FrequencyGrid | None = None) -> PeriodicSignal:
    """Synthesis operator: sum over bands of weight * sum_k c_Q psi_Q."""
    system = c.system if system is None else System(system)
    if system is not c.system:
        raise ValueError("coefficient map belongs to a different system")
    grid = FrequencyGrid(c.N) if grid is None else grid
    for b in c.data:
        if b.system is not System.DYADIC and not b.is_coarse and b.j > grid.j_cover:
            raise ValueError(f"band {b.label()} exceeds grid capacity")
    spec = np.zeros((grid.N, grid.N), dtype=complex)
    for b, arr in c.data.items():
        spec += synthesize_band_spectrum(arr, b, grid.N)
    return PeriodicSignal.from_spectrum(spec)


def band_convolve(f: PeriodicSignal, band: Band, conjugate: bool = True) -> PeriodicSignal:
    """f * psi~_band (spectrum times conj(w)); ``conjugate=False`` gives f * psi_band."""
    w = band_window(band, f.N).values
    mult = np.conj(w) if conjugate else w
    return PeriodicSignal.from_spectrum(f.spectrum * mult)


def band_convolve_at(f: PeriodicSignal, band: Band, x) -> complex:
    """Exact value of (f * psi~_band)(x) at an arbitrary point."""
    g = f.grid
    w = band_window(band, f.N).values
    ph = np.exp(2j * np.pi * (g.xi1 * float(x[0]) + g.xi2 * float(x[1])))
    return complex(np.sum(f.spectrum * w * ph))


def roundtrip_error(f: PeriodicSignal, system: System | str = System.SMOOTH_PARSEVAL, j_max: int | None = None) -> float:
    """||T S f - f|| / ||f||."""
    rec = synthesize(analyze(f, system, j_max))
    nf = f.norm2()
    return (rec - f).norm2() / nf if nf else 0.0


def littlewood_paley_check(f: PeriodicSignal, system: System | str = System.SMOOTH_PARSEVAL, j_max: int | None = None) -> float:
    """Relative L^2 deviation of sum_bands f * psi~ * psi from f."""
    system = System(system)
    grid = f.grid
    j_max = grid.j_max if j_max is None else j_max
    _check_jmax(grid, j_max)
    acc = np.zeros((grid.N, grid.N), dtype=complex)
    spec = f.spectrum
    for w in band_windows(system, grid, j_max):
        acc += spec * np.conj(w.values) * w.values
    diff = PeriodicSignal.from_spectrum(acc - spec)
    nf = f.norm2()
    return diff.norm2() / nf if nf else diff.norm2()


# ---------------------------------------------------------------------------
# explicit (dense) oracles


def lattice_points(band: Band) -> np.ndarray:
    p = band.period
    k1, k2 = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    return np.stack([k1.ravel(), k2.ravel()], axis=1)


def translations(band: Band) -> np.ndarray:
    """Translation points x_k = M k (float) for every k mod P; shape (P^2, 2)."""
    m = np.array(band.translation_matrix(), dtype=float)
    return lattice_points(band) @ m.T


def frame_elements(band: Band, grid: FrequencyGrid) -> np.ndarray:
    """Spatial samples of every psi_{band,k}; shape (N^2, P^2).

    Built from explicit exponential sums, independent of the FFT scatter.
    """
    w = band_window(band, grid.N).values
    a, b = np.nonzero(w)
    xi = np.stack([grid.xi1[a, b], grid.xi2[a, b]], axis=1).astype(float)
    xk = translations(band)
    n = grid.N
    xs = np.stack(np.meshgrid(np.arange(n), np.arange(n), indexing="ij"), -1).reshape(-1, 2) / n
    coef = band.amplitude * w[a, b][None, :] * np.exp(-2j * np.pi * (xk @ xi.T))  # (P^2, S)
    basis = np.exp(2j * np.pi * (xs @ xi.T))  # (N^2, S)
    return basis @ coef.T


def frame_operator_dense(band: Band, grid: FrequencyGrid, weight: float | None = None) -> np.ndarray:
    """Dense matrix of f -> weight * sum_k <f, psi_k> psi_k acting on sample vectors."""
    psi = frame_elements(band, grid)
    weight = band.redundancy_weight if weight is None else weight
    return weight * (psi @ psi.conj().T) / grid.N**2


def multiplier_dense(mult: np.ndarray) -> np.ndarray:
    """Dense matrix of the Fourier multiplier ``mult`` acting on sample vectors."""
    n = mult.shape[0]
    xs = np.stack(np.meshgrid(np.arange(n), np.arange(n), indexing="ij"), -1).reshape(-1, 2) / n
    g = FrequencyGrid(n)
    xi = np.stack([g.xi1.ravel(), g.xi2.ravel()], axis=1).astype(float)
    e = np.exp(2j * np.pi * (xs @ xi.T))
    return (e * mult.ravel()[None, :]) @ e.conj().T / n**2


def sampling_identity_check(band: Band, grid: FrequencyGrid, rng: np.random.Generator | None = None,
                            g_spec: np.ndarray | None = None, h_spec: np.ndarray | None = None) -> float:
    """Max pointwise residual of g*h = c sum_k g(x_k) h(. - x_k) on the torus.

    g and h are random (or given) signals with spectra in the band support.
    The constant is c = |det M| / multiplicity, the periodic counterpart of
    |det A|^-j: each element appears ``multiplicity`` times among k mod P.
    The right-hand side is assembled from explicit point evaluations.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    w = band_window(band, grid.N).values
    supp = w != 0
    if g_spec is None:
        g_spec = np.where(supp, rng.standard_normal(w.shape) + 1j * rng.standard_normal(w.shape), 0)
    if h_spec is None:
        h_spec = np.where(supp, rng.standard_normal(w.shape) + 1j * rng.standard_normal(w.shape), 0)
    lhs = PeriodicSignal.from_spectrum(g_spec * h_spec).samples
    a, b = np.nonzero(supp | (g_spec != 0))
    xi = np.stack([grid.xi1[a, b], grid.xi2[a, b]], axis=1).astype(float)
    xk = translations(band)
    e = np.exp(2j * np.pi * (xk @ xi.T))  # (P^2, S)
    g_at = e @ g_spec[a, b]  # g(x_k)
    c = float(band.cube_measure) / band.multiplicity
    rhs_spec = np.zeros_like(g_spec, dtype=complex)
    rhs_spec[a, b] = c * h_spec[a, b] * (e.conj().T @ g_at)
    rhs = PeriodicSignal.from_spectrum(rhs_spec).samples
    return float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0


# ---------------------------------------------------------------------------
# file formats

MAGIC = b"SHGRID01"


def save_signal(signal: PeriodicSignal, path: str | os.PathLike) -> None:
    n = signal.N
    buf = np.empty((n, n, 2), dtype="<f8")
    buf[..., 0] = signal.samples.real
    buf[..., 1] = signal.samples.imag
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", n))
        fh.write(buf.tobytes(order="C"))


def load_signal(path: str | os.PathLike) -> PeriodicSignal:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 12 or raw[:8] != MAGIC:
        raise ValueError("bad magic: not an SHGRID01 file")
    (n,) = struct.unpack("<I", raw[8:12])
    if n < 2 or n & (n - 1):
        raise ValueError(f"grid size {n} is not a power of two")
    want = 12 + 16 * n * n
    if len(raw) != want:
        raise ValueError(f"truncated or oversized payload: {len(raw)} bytes, expected {want}")
    arr = np.frombuffer(raw, dtype="<f8", offset=12).reshape(n, n, 2)
    return PeriodicSignal(arr[..., 0] + 1j * arr[..., 1])


def save_coefficients(c: CoefficientMap, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(c.to_records(), fh, sort_keys=True)


def load_coefficients(path: str | os.PathLike, N: int, j_max: int | None = None) -> CoefficientMap:
    with open(path) as fh:
        recs = json.load(fh)
    if not isinstance(recs, list):
        raise ValueError("coefficient file must hold a JSON array")
    return CoefficientMap.from_records(recs, N, j_max)


__all__ = [
    "PeriodicSignal",
    "CoefficientMap",
    "random_signal",
    "band_window",
    "band_windows",
    "resolved_limit",
    "analyze",
    "analyze_band",
    "synthesize",
    "synthesize_band_spectrum",
    "band_convolve",
    "band_convolve_at",
    "roundtrip_error",
    "littlewood_paley_check",
    "frame_elements",
    "frame_operator_dense",
    "multiplier_dense",
    "sampling_identity_check",
    "translations",
    "save_signal",
    "load_signal",
    "save_coefficients",
    "load_coefficients",
    "coarse_band",
]
