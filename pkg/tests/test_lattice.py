from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shearlet_tl.lattice import (
    A_H,
    A_V,
    Band,
    ConeTag,
    ShearletIndex,
    System,
    coarse_band,
    coset_offsets,
    cube_of,
    det,
    enumerate_indices,
    inverse,
    mat_BA,
    mat_BA_inv,
    matmul,
    min_stretch,
    stretch,
)

SP, CP, DY = System.SMOOTH_PARSEVAL, System.CONE_PROJECTED, System.DYADIC
H, V = ConeTag.HORIZONTAL, ConeTag.VERTICAL


@st.composite
def scale_shear(draw, j_max=6):
    j = draw(st.integers(0, j_max))
    l = draw(st.integers(-(2**j), 2**j))
    return j, l


def test_dilations_frozen():
    assert A_H == ((4, 0), (0, 2))
    assert A_V == ((2, 0), (0, 4))


@pytest.mark.parametrize("j, l, expected", [(0, 0, ((1, 0), (0, 1))), (1, 1, ((4, 2), (0, 2))), (2, -3, ((16, -12), (0, 4)))])
def test_mat_BA_frozen(j, l, expected):
    assert mat_BA(j, l) == expected


@given(scale_shear())
def test_inverse_exact(jl):
    j, l = jl
    for cone in (H, V):
        prod = matmul(mat_BA(j, l, cone), mat_BA_inv(j, l, cone))
        assert prod == ((1, 0), (0, 1))
        assert abs(det(mat_BA(j, l, cone))) == 8**j


@given(scale_shear())
def test_min_stretch_matches_svd(jl):
    j, l = jl
    m = np.array(mat_BA(j, l), dtype=float)
    sv = np.linalg.svd(m, compute_uv=False).min()
    assert min_stretch(j, l) == pytest.approx(sv, rel=1e-12)


@given(scale_shear(), st.floats(0, 2 * math.pi))
def test_min_stretch_is_a_lower_bound(jl, th):
    j, l = jl
    x = (math.cos(th), math.sin(th))
    assert stretch(j, l, x) >= min_stretch(j, l) * (1 - 1e-12)


def test_min_stretch_golden_ratio():
    assert min_stretch(0, -1) == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-15)


def test_vertical_is_transpose_conjugate():
    for j, l in [(1, 1), (2, -3), (3, 5)]:
        h, v = mat_BA(j, l, H), mat_BA(j, l, V)
        assert v == ((h[1][1], h[1][0]), (h[0][1], h[0][0]))


@pytest.mark.parametrize("j, l", [(-1, 0), (1, 3), (0, 2)])
def test_bad_shear_rejected(j, l):
    with pytest.raises(ValueError):
        mat_BA(j, l)


@pytest.mark.parametrize("system, j_max, count", [(SP, 0, 4), (SP, 1, 4 + 8), (CP, 0, 6), (CP, 2, 6 + 10 + 18), (DY, 3, 3)])
def test_enumeration_counts(system, j_max, count):
    assert len(enumerate_indices(system, j_max)) == count


def test_boundary_emitted_once():
    bands = enumerate_indices(SP, 3)
    assert len(set(bands)) == len(bands)
    for j in range(4):
        tops = [b for b in bands if b.j == j and abs(b.shear) == 2**j]
        assert len(tops) == 2 and all(b.boundary and b.cone is H for b in tops)


def test_boundary_flag_enforced():
    with pytest.raises(ValueError):
        Band(SP, H, 1, 2)
    with pytest.raises(ValueError):
        Band(CP, H, 1, 2, boundary=True)
    with pytest.raises(ValueError):
        Band(SP, V, 1, 2, boundary=True)


@pytest.mark.parametrize("band, amp, period", [
    (Band(SP, H, 2, 1), 8.0**-1, 16),
    (Band(SP, H, 2, 4, boundary=True), 2.0**-3.5, 32),
    (Band(SP, H, 0, 1, boundary=True), 1.0, 1),
    (Band(DY, ConeTag.ISOTROPIC, 3), 1 / 8, 8),
    (coarse_band(CP), 1.0, 1),
])
def test_band_frozen(band, amp, period):
    assert band.amplitude == amp
    assert band.period == period


@given(scale_shear(4), st.sampled_from([SP, CP]), st.sampled_from([H, V]))
def test_lattice_period_and_multiplicity(jl, system, cone):
    j, l = jl
    boundary = system is SP and abs(l) == 2**j
    if boundary and cone is V:
        cone = H
    band = Band(system, cone, j, l, boundary)
    p = band.period
    k = band.frequency_map()
    # x_{k + P e_i} - x_k is an integer vector
    m = band.translation_matrix()
    for col in range(2):
        assert all((p * m[r][col]).denominator == 1 for r in range(2))
    assert k.shape == (2, 2)
    offs = coset_offsets(band)
    assert len(offs) == band.multiplicity == band.cube_measure * p * p
    for d in offs:
        x = [sum(m[r][c] * int(d[c]) for c in range(2)) for r in range(2)]
        assert all(v.denominator == 1 for v in x)


@given(scale_shear(3))
def test_redundancy_weight(jl):
    j, l = jl
    band = Band(CP, H, j, l)
    assert band.redundancy_weight == pytest.approx(1 / (band.amplitude**2 * band.period**2))


def test_cube_contains_its_corner():
    idx = ShearletIndex(Band(CP, H, 1, 1), (1, 2))
    cube = cube_of(idx)
    assert cube.contains(cube.corner)
    assert cube.measure == Fraction(1, 8)
    inv = inverse(idx.band.translation_matrix())
    far = (cube.corner[0] + 10, cube.corner[1])
    assert not cube.contains(far) or inv is None
