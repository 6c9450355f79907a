"""Exact geometry of the anisotropic shear lattice.

Matrices act on column vectors in space and on row vectors in frequency.
All matrix entries are kept as :class:`fractions.Fraction` so corners,
determinants and inverses are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Matrix = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


class ConeTag(str, Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    LOW_FREQUENCY = "low"
    # isotropic dyadic bands (classical Triebel-Lizorkin family)
    ISOTROPIC = "isotropic"


class System(str, Enum):
    CONE_PROJECTED = "cone"
    SMOOTH_PARSEVAL = "smooth"
    DYADIC = "dyadic"


def _mat(a, b, c, d) -> Matrix:
    return ((Fraction(a), Fraction(b)), (Fraction(c), Fraction(d)))


def matmul(x: Matrix, y: Matrix) -> Matrix:
    return tuple(
        tuple(sum((x[r][t] * y[t][c] for t in range(2)), Fraction(0)) for c in range(2))
        for r in range(2)
    )  # type: ignore[return-value]


def det(m: Matrix) -> Fraction:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def inverse(m: Matrix) -> Matrix:
    d = det(m)
    if d == 0:
        raise ZeroDivisionError("singular matrix")
    return _mat(m[1][1] / d, -m[0][1] / d, -m[1][0] / d, m[0][0] / d)


def apply(m: Matrix, v: Sequence) -> tuple[Fraction, Fraction]:
    v0, v1 = Fraction(v[0]), Fraction(v[1])
    return (m[0][0] * v0 + m[0][1] * v1, m[1][0] * v0 + m[1][1] * v1)


IDENTITY = _mat(1, 0, 0, 1)
A_H = _mat(4, 0, 0, 2)
B_H = _mat(1, 1, 0, 1)
A_V = _mat(2, 0, 0, 4)
B_V = _mat(1, 0, 1, 1)


def dilation(cone: ConeTag) -> Matrix:
    if cone is ConeTag.VERTICAL:
        return A_V
    if cone is ConeTag.HORIZONTAL:
        return A_H
    raise ValueError(f"no anisotropic dilation for cone {cone.value!r}")


def shear(cone: ConeTag) -> Matrix:
    if cone is ConeTag.VERTICAL:
        return B_V
    if cone is ConeTag.HORIZONTAL:
        return B_H
    raise ValueError(f"no shear for cone {cone.value!r}")


def _check_shear(j: int, l: int) -> None:
    if j < 0:
        raise ValueError(f"scale must be nonnegative, got {j}")
    if abs(l) > 2**j:
        raise ValueError(f"shear {l} out of range for scale {j} (|l| <= {2**j})")


def mat_BA(j: int, l: int, cone: ConeTag = ConeTag.HORIZONTAL) -> Matrix:
    """Exact ``B^l A^j`` for the given cone (integer entries)."""
    _check_shear(j, l)
    a, b = dilation(cone), shear(cone)
    aj = _mat(a[0][0] ** j, 0, 0, a[1][1] ** j)
    bl = _mat(1, b[0][1] * l, b[1][0] * l, 1)
    return matmul(bl, aj)


def mat_BA_inv(j: int, l: int, cone: ConeTag = ConeTag.HORIZONTAL) -> Matrix:
    """Exact ``A^-j B^-l`` (entries in 4^-j Z)."""
    return inverse(mat_BA(j, l, cone))


def min_stretch(j: int, l: int, cone: ConeTag = ConeTag.HORIZONTAL) -> float:
    """Smallest singular value of ``B^l A^j``, i.e. min over unit x of |B^l A^j x|.

    Computed from the Gram matrix ``G = M^T M``: the smaller eigenvalue is
    ``(tr G - sqrt(tr G^2 - 4 det G)) / 2``, rewritten as
    ``2 det G / (tr G + sqrt(...))`` to avoid cancellation.
    """
    m = mat_BA(j, l, cone)
    fro2 = sum(x * x for row in m for x in row)        # tr G, exact
    d2 = det(m) ** 2                                   # det G, exact
    disc = fro2 * fro2 - 4 * d2
    lam = 2.0 * float(d2) / (float(fro2) + math.sqrt(float(disc)))
    return math.sqrt(lam)


def stretch(j: int, l: int, x: Sequence[float], cone: ConeTag = ConeTag.HORIZONTAL) -> float:
    """|B^l A^j x| in floating point."""
    m = np.array(mat_BA(j, l, cone), dtype=float)
    return float(np.linalg.norm(m @ np.asarray(x, dtype=float)))


# ---------------------------------------------------------------------------
# bands and indices


@dataclass(frozen=True, order=True)
class Band:
    """One (system, cone, j, shear) family; translations are not part of a band.

    For the dyadic family ``j`` is the isotropic scale nu and ``shear`` is 0.
    Coarse elements carry ``cone = LOW_FREQUENCY``.
    """

    system: System
    cone: ConeTag
    j: int
    shear: int = 0
    boundary: bool = False

    def __post_init__(self):
        if self.j < 0:
            raise ValueError("scale must be nonnegative")
        if self.cone in (ConeTag.HORIZONTAL, ConeTag.VERTICAL):
            _check_shear(self.j, self.shear)
            want = self.system is System.SMOOTH_PARSEVAL and abs(self.shear) == 2**self.j
            if self.boundary != want:
                raise ValueError("boundary flag must be set exactly for |l| = 2^j under smooth Parseval")
            if self.boundary and self.cone is not ConeTag.HORIZONTAL:
                raise ValueError("boundary bands are shared and tagged horizontal")
        elif self.shear != 0 or self.boundary:
            raise ValueError("coarse and isotropic bands carry no shear")

    @property
    def is_coarse(self) -> bool:
        return self.cone is ConeTag.LOW_FREQUENCY

    @property
    def lattice_scale(self) -> Fraction:
        """Extra factor on the translation lattice (1/2 for boundary bands with j >= 1)."""
        return Fraction(1, 2) if self.boundary and self.j >= 1 else Fraction(1)

    @property
    def amplitude(self) -> float:
        """Normalisation of the frame element's Fourier transform."""
        if self.is_coarse:
            return 1.0
        if self.system is System.DYADIC:
            return 2.0 ** (-self.j)
        if self.boundary:
            return 1.0 if self.j == 0 else 2.0 ** (-1.5 * self.j - 0.5)
        return 8.0 ** (-self.j / 2)

    def translation_matrix(self) -> Matrix:
        """Exact M with translations x_k = M k."""
        if self.is_coarse:
            return IDENTITY
        if self.system is System.DYADIC:
            return _mat(Fraction(1, 2**self.j), 0, 0, Fraction(1, 2**self.j))
        m = mat_BA_inv(self.j, self.shear, self.cone)
        s = self.lattice_scale
        return _mat(s * m[0][0], s * m[0][1], s * m[1][0], s * m[1][1])

    def integer_inverse(self) -> np.ndarray:
        """M^-1 as an integer array (maps space to lattice coordinates)."""
        inv = inverse(self.translation_matrix())
        out = np.array([[int(x) for x in row] for row in inv], dtype=np.int64)
        assert all(x.denominator == 1 for row in inv for x in row)
        return out

    @property
    def period(self) -> int:
        """Phase period P: x_k depends on k only modulo P in each coordinate."""
        if self.is_coarse:
            return 1
        if self.system is System.DYADIC:
            return 2**self.j
        return (2 if self.lattice_scale != 1 else 1) * 4**self.j

    def frequency_map(self) -> np.ndarray:
        """Integer matrix K with xi . x_k = (xi^T K) . k / P."""
        m = self.translation_matrix()
        p = self.period
        k = np.array([[int(x * p) for x in row] for row in m], dtype=np.int64)
        return k

    @property
    def cube_measure(self) -> Fraction:
        return abs(det(self.translation_matrix()))

    @property
    def multiplicity(self) -> int:
        """Number of lattice points mod P describing the same periodic element."""
        n = self.cube_measure * self.period**2
        assert n.denominator == 1
        return int(n)

    @property
    def redundancy_weight(self) -> float:
        """Synthesis weight making the band frame operator equal to |w|^2."""
        return 1.0 / (self.amplitude**2 * self.period**2)

    @property
    def alpha_scale(self) -> float:
        """log2 of |Q_j|^-1 for the function-space weight (3j for shears, nu for dyadic)."""
        if self.system is System.DYADIC:
            return float(self.j)
        return 3.0 * self.j if not self.is_coarse else 0.0

    def label(self) -> str:
        tag = "b" if self.boundary else self.cone.value[0]
        return f"{self.system.value}:{tag}:j{self.j}:l{self.shear}"


@dataclass(frozen=True, order=True)
class ShearletIndex:
    """Address of one frame element."""

    band: Band
    k: tuple[int, int] = (0, 0)

    @property
    def system(self) -> System:
        return self.band.system

    @property
    def cone(self) -> ConeTag:
        return self.band.cone

    @property
    def j(self) -> int:
        return self.band.j

    @property
    def shear(self) -> int:
        return self.band.shear

    @property
    def boundary(self) -> bool:
        return self.band.boundary


@dataclass(frozen=True)
class AnisoCube:
    index: ShearletIndex
    corner: tuple[Fraction, Fraction]
    measure: Fraction
    lattice_scale: Fraction = field(default=Fraction(1))

    def contains(self, x: Sequence) -> bool:
        """Half-open membership x in M([0,1)^2 + k)."""
        inv = inverse(self.index.band.translation_matrix())
        y = apply(inv, (Fraction(x[0]) - self.corner[0], Fraction(x[1]) - self.corner[1]))
        return all(0 <= c < 1 for c in y)


def cube_of(index: ShearletIndex) -> AnisoCube:
    band = index.band
    m = band.translation_matrix()
    return AnisoCube(index, apply(m, index.k), band.cube_measure, band.lattice_scale)


def coarse_band(system: System) -> Band:
    return Band(system, ConeTag.LOW_FREQUENCY, 0)


def enumerate_indices(
    system: System | str,
    j_max: int,
    cones: Iterable[ConeTag] = (ConeTag.HORIZONTAL, ConeTag.VERTICAL),
    include_coarse: bool = False,
) -> list[Band]:
    """Bands ordered by cone, then scale, then shear.

    Under the smooth Parseval system the boundary bands (|l| = 2^j) are shared
    by both cones; they are emitted once, after the horizontal interior bands
    of the same scale, and only when the horizontal cone is requested.
    For the dyadic family ``j_max`` is the largest isotropic scale.
    """
    system = System(system)
    if j_max < 0:
        raise ValueError("j_max must be nonnegative")
    out: list[Band] = []
    if include_coarse:
        out.append(coarse_band(system))
    if system is System.DYADIC:
        out.extend(Band(system, ConeTag.ISOTROPIC, nu) for nu in range(1, j_max + 1))
        return out
    cones = [ConeTag(c) for c in cones]
    for cone in sorted(set(cones), key=lambda c: [ConeTag.HORIZONTAL, ConeTag.VERTICAL].index(c)):
        for j in range(j_max + 1):
            top = 2**j
            for l in range(-top, top + 1):
                if system is System.SMOOTH_PARSEVAL and abs(l) == top:
                    if cone is ConeTag.HORIZONTAL:
                        out.append(Band(system, cone, j, l, boundary=True))
                    continue
                out.append(Band(system, cone, j, l))
    return out


def coset_offsets(band: Band) -> np.ndarray:
    """Lattice offsets d (mod P) with x_{k+d} = x_k mod Z^2; shape (mult, 2)."""
    p = band.period
    minv = band.integer_inverse() % p
    seen = {(0, 0)}
    frontier = [(0, 0)]
    gens = [tuple(minv[:, 0]), tuple(minv[:, 1])]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = ((v[0] + g[0]) % p, (v[1] + g[1]) % p)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    out = np.array(sorted(seen), dtype=np.int64)
    assert len(out) == band.multiplicity, (band, len(out))
    return out
