from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shearlet_tl.frame import FrequencyGrid
from shearlet_tl.lattice import Band, ConeTag, ShearletIndex, System, enumerate_indices
from shearlet_tl.transform import (
    CoefficientMap,
    PeriodicSignal,
    analyze,
    analyze_band,
    band_window,
    frame_elements,
    frame_operator_dense,
    littlewood_paley_check,
    load_coefficients,
    load_signal,
    multiplier_dense,
    random_signal,
    resolved_limit,
    roundtrip_error,
    sampling_identity_check,
    save_coefficients,
    save_signal,
    synthesize,
    translations,
)

SP, CP = System.SMOOTH_PARSEVAL, System.CONE_PROJECTED
H, V = ConeTag.HORIZONTAL, ConeTag.VERTICAL
SYSTEMS = [SP, CP]


def _signal(n, seed, limit=None):
    return random_signal(FrequencyGrid(n), np.random.default_rng(seed), limit)


@pytest.mark.parametrize("system", SYSTEMS)
@pytest.mark.parametrize("n", [16, 32, 64])
def test_roundtrip_on_resolved_signals(system, n):
    j = FrequencyGrid(n).j_cover
    f = _signal(n, 3)
    assert roundtrip_error(f, system, j) <= 1e-12
    assert littlewood_paley_check(f, system, j) <= 1e-12


@pytest.mark.parametrize("system", SYSTEMS)
def test_energy_is_preserved(system):
    f = _signal(32, 5, resolved_limit(2))
    c = analyze(f, system, 2)
    assert c.energy() == pytest.approx(f.norm2() ** 2, rel=1e-12)


@pytest.mark.parametrize("band", [Band(SP, H, 0, 0), Band(SP, V, 1, -1), Band(SP, H, 1, 2, True), Band(CP, H, 1, 1), Band(CP, ConeTag.LOW_FREQUENCY, 0)])
def test_analysis_matches_explicit_inner_products(band):
    grid = FrequencyGrid(16)
    f = _signal(16, 11)
    psi = frame_elements(band, grid)
    dense = psi.conj().T @ f.samples.ravel() / grid.N**2
    fast = analyze_band(f, band).ravel()
    assert np.max(np.abs(dense - fast)) <= 1e-12


@pytest.mark.parametrize("system", SYSTEMS)
def test_dense_frame_operator_is_the_window_multiplier(system):
    grid = FrequencyGrid(16)
    for band in enumerate_indices(system, 1, include_coarse=True):
        w = band_window(band, 16).values
        s = frame_operator_dense(band, grid)
        assert np.max(np.abs(s - multiplier_dense(w**2))) <= 1e-10


@pytest.mark.parametrize("band", [Band(CP, H, 1, 0), Band(SP, H, 1, 2, True), Band(CP, V, 2, 3)])
def test_sampling_identity(band):
    assert sampling_identity_check(band, FrequencyGrid(2 * 4**band.j)) <= 1e-10


@given(st.integers(0, 5), st.integers(-5, 5), st.integers(-5, 5))
@settings(max_examples=20, deadline=None)
def test_translation_covariance(bi, d1, d2):
    bands = enumerate_indices(CP, 2) + enumerate_indices(SP, 2)
    band = bands[bi * 7 % len(bands)]
    f = _signal(64, 1)
    m = np.array(band.translation_matrix(), dtype=float)
    t = m @ np.array([d1, d2], dtype=float)
    a = analyze_band(f, band)
    b = analyze_band(f.translate(t), band)
    assert np.max(np.abs(np.roll(a, (d1, d2), axis=(0, 1)) - b)) <= 1e-10


def test_translation_points_on_lattice():
    band = Band(CP, H, 1, 1)
    xs = translations(band)
    assert xs.shape == (band.period**2, 2)
    assert np.allclose(xs[1], np.array(band.translation_matrix(), dtype=float)[:, 1])


@given(st.integers(0, 2**31))
@settings(max_examples=10, deadline=None)
def test_synthesis_is_adjoint_of_analysis(seed):
    rng = np.random.default_rng(seed)
    f = _signal(32, seed)
    c = analyze(_signal(32, seed + 1), CP, 2)
    for b in c.data:
        c.data[b] = rng.standard_normal(c.data[b].shape) + 1j * rng.standard_normal(c.data[b].shape)
    lhs = c.inner(analyze(f, CP, 2))
    rhs = np.vdot(f.samples, synthesize(c).samples) / 32**2
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_cube_semantics():
    band = Band(SP, H, 1, 2, True)
    c = CoefficientMap(SP, 64, 1)
    c.set_cube(ShearletIndex(band, (0, 0)), 2.0)
    assert len(c) == band.multiplicity
    assert np.allclose(c.cube_average(band), c.data[band])


def test_records_roundtrip():
    f = _signal(16, 2)
    c = analyze(f, SP, 2)
    back = CoefficientMap.from_records(json.loads(json.dumps(c.to_records())), 16, 2)
    assert synthesize(back).samples == pytest.approx(synthesize(c).samples, abs=1e-12)


def test_mixed_records_rejected():
    recs = [{"system": "smooth", "cone": "horizontal", "j": 0, "l": 0, "k": [0, 0], "re": 1, "im": 0},
            {"system": "cone", "cone": "horizontal", "j": 0, "l": 0, "k": [0, 0], "re": 1, "im": 0}]
    with pytest.raises(ValueError):
        CoefficientMap.from_records(recs, 16)


def test_signal_file_roundtrip(tmp_path):
    f = _signal(16, 4)
    p = tmp_path / "f.grid"
    save_signal(f, p)
    raw = p.read_bytes()
    assert raw[:8] == b"SHGRID01" and len(raw) == 12 + 16 * 16 * 16
    assert np.array_equal(load_signal(p).samples, f.samples)


@pytest.mark.parametrize("mutate, msg", [
    (lambda r: r[:-1], "truncated"),
    (lambda r: b"XXGRID01" + r[8:], "magic"),
    (lambda r: r[:8] + (12).to_bytes(4, "little") + r[12:], "power of two"),
    (lambda r: r[:5], "magic"),
])
def test_signal_file_errors(tmp_path, mutate, msg):
    p = tmp_path / "f.grid"
    save_signal(_signal(8, 0), p)
    p.write_bytes(mutate(p.read_bytes()))
    with pytest.raises(ValueError, match=msg):
        load_signal(p)


def test_coefficient_file_roundtrip(tmp_path):
    c = analyze(_signal(16, 6), CP, 1)
    p = tmp_path / "c.json"
    save_coefficients(c, p)
    back = load_coefficients(p, 16, 1)
    assert set(back.data) <= set(c.data)
    for b in back.data:
        assert np.allclose(back.data[b], c.data[b], atol=1e-14)


def test_jmax_beyond_capacity_rejected():
    with pytest.raises(ValueError):
        analyze(_signal(16, 0), SP, 4)


def test_signal_validation():
    with pytest.raises(ValueError):
        PeriodicSignal(np.zeros((4, 8)))
    with pytest.raises(ValueError):
        PeriodicSignal(np.zeros((6, 6)))
