"""The twelve acceptance criteria at their stated tolerances.

Each test records one pass/fail line (printed in the terminal summary) and
then asserts the criterion exactly as stated.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

from shearlet_tl import experiments as ex
from shearlet_tl.frame import FrequencyGrid, overlap_count, partition_of_unity, window_values
from shearlet_tl.lattice import Band, ConeTag, System, enumerate_indices
from shearlet_tl.transform import (
    analyze,
    analyze_band,
    band_window,
    frame_operator_dense,
    multiplier_dense,
    random_signal,
    roundtrip_error,
)

SP, CP = System.SMOOTH_PARSEVAL, System.CONE_PROJECTED
H, V = ConeTag.HORIZONTAL, ConeTag.VERTICAL


def test_c01_smooth_partition_of_unity(criterion):
    t0 = time.perf_counter()
    rep = partition_of_unity(SP, FrequencyGrid(256), 4)
    elapsed = time.perf_counter() - t0
    ok = rep.max_deviation <= 1e-8 and elapsed < 10.0
    criterion(1, "smooth partition of unity, N=256, j<=4", ok,
              f"max deviation {rep.max_deviation:.3g} (resolved region {rep.max_deviation_resolved:.3g}), {elapsed:.2f} s")
    assert ok


def test_c02_cone_projected_cover(criterion):
    grid = FrequencyGrid(256)
    rep = partition_of_unity(CP, grid, grid.j_cover)
    ok = rep.max_deviation_off_seam <= 1e-8
    criterion(2, "cone-projected cover off the seams, N=256", ok,
              f"off-seam deviation {rep.max_deviation_off_seam:.3g} at j<={grid.j_cover}")
    assert ok


def test_c03_reproducing_identity(criterion):
    grid = FrequencyGrid(64)
    errs, energies = [], []
    for seed in range(10):
        f = random_signal(grid, np.random.default_rng(seed))
        errs.append(roundtrip_error(f, SP, grid.j_cover))
        energies.append(analyze(f, SP, grid.j_cover).energy() / f.norm2() ** 2)
    worst_energy = max(abs(e - 1.0) for e in energies)
    ok = max(errs) <= 1e-8 and worst_energy <= 1e-8
    criterion(3, "reproducing identity, 10 seeds, N=64", ok,
              f"max relative error {max(errs):.3g}, max |energy ratio - 1| {worst_energy:.3g}")
    assert ok


def test_c04_dense_frame_operator(criterion):
    grid = FrequencyGrid(16)
    worst = 0.0
    for system in (SP, CP):
        for band in enumerate_indices(system, 1, include_coarse=True):
            w = band_window(band, 16).values
            s = frame_operator_dense(band, grid)
            worst = max(worst, float(np.max(np.abs(s - multiplier_dense(w**2)))))
    ok = worst <= 1e-10
    criterion(4, "dense frame operator, N=16, j<=1", ok, f"max entry deviation {worst:.3g}")
    assert ok


def test_c05_min_stretch_sharp_bound(criterion):
    rep = ex.audit_lemma71(6)
    m = rep.measured
    ok = rep.passed
    criterion(5, "sharp lower bound on min stretch, j<=6", ok,
              f"min ratio {m['min_ratio']:.6f} at (j={m['argmin_j']}, l={m['argmin_l']}); "
              f"weak bound ratio {m['min_weak_ratio']:.4f}")
    assert ok, rep.failed_checks()


def test_c06_overlap_bound(criterion):
    rep = overlap_count(None, 5)
    ok = rep.max_count <= 11
    criterion(6, "overlap count, j<=5", ok, f"max count {rep.max_count}")
    assert ok


@pytest.mark.slow
def test_c07_almost_orthogonality(criterion):
    orth = ex.audit_almost_orthogonality(j_list=(1, 2, 3, 4), N_list=(3, 5), spread=4.0)
    decay = ex.audit_shearlet_wavelet_decay(j_list=(1, 2, 3, 4), N_list=(3, 5), slope_tol=0.3)
    slope = decay.measured["height_slope"]
    slope_ok = abs(slope + 3.0) <= 0.3
    ok = orth.passed and slope_ok
    spreads = ", ".join(f"{k} {v:.3f}" for k, v in orth.measured.items())
    criterion(7, "almost-orthogonality envelopes", ok, f"{spreads}; height slope {slope:.3f} (target -3 +- 0.3)")
    assert orth.passed, orth.failed_checks()
    assert slope_ok, f"height slope {slope}"


@pytest.mark.slow
def test_c08_sstar_equivalence(criterion):
    rep = ex.audit_sstar(grids=(64, 128), n_seeds=20, spread=2.0)
    norms = [c["measured"] for c in rep.cases if c.get("group") == "norm"]
    ok = rep.passed
    criterion(8, "s* equivalence, 20 seeds, N in {64,128}", ok,
              f"ratio range [{min(norms):.4f}, {max(norms):.4f}], spread {max(norms) / min(norms):.3f}")
    assert ok, rep.failed_checks()


@pytest.mark.slow
def test_c09_operator_boundedness(criterion):
    rep = ex.audit_operator_bounds(grids=(64, 128), params_list=((0.3, 2.0, 2.0), (0.1, 1.5, 4.0)))
    drift = [c["measured"] for c in rep.cases if c.get("group") == "drift"]
    ok = rep.passed
    criterion(9, "analysis/synthesis bounds under N -> 2N", ok, f"max drift factor {max(drift):.3f} (< 2)")
    assert ok, rep.failed_checks()


@pytest.mark.slow
def test_c10_fading_rates(criterion):
    dy = ex.audit_fading(ex.FADE_DYADIC, alpha1=0.0, alpha2=1.0, j_list=(1, 2, 3, 4), slope_tol=0.3, source_tol=0.2)
    ab = ex.audit_fading(ex.FADE_AB, alpha1=2.0, alpha2=0.0, j_list=(1, 2, 3, 4), slope_tol=0.3, source_tol=0.2)
    ok = dy.passed and ab.passed
    detail = "; ".join(
        f"{r.params['direction']}: slope {r.measured['fitted_slope']:.3f} vs claimed {r.measured['claimed_rate']:.3f}"
        for r in (dy, ab)
    )
    criterion(10, "fading rates over j=1..4", ok, detail)
    assert dy.passed, dy.failed_checks()
    assert ab.passed, ab.failed_checks()


def test_c11_covariance(criterion):
    f = random_signal(FrequencyGrid(64), np.random.default_rng(0))
    worst = 0.0
    for band in enumerate_indices(CP, 2) + enumerate_indices(SP, 2):
        m = np.array(band.translation_matrix(), dtype=float)
        for d in [(1, 0), (0, 1), (2, -3)]:
            a = analyze_band(f, band)
            b = analyze_band(f.translate(m @ np.array(d, dtype=float)), band)
            worst = max(worst, float(np.max(np.abs(np.roll(a, d, axis=(0, 1)) - b))))
    grid = FrequencyGrid(64)
    exact = True
    for system in (SP, CP):
        for j in range(3):
            for l in range(-(2**j) + 1, 2**j):
                h = window_values(Band(system, H, j, l), grid.xi1, grid.xi2)
                v = window_values(Band(system, V, j, l), grid.xi2, grid.xi1)
                exact &= bool(np.array_equal(h, v))
    ok = worst <= 1e-10 and exact
    criterion(11, "translation covariance and cone symmetry", ok,
              f"max covariance residual {worst:.3g}; symmetry {'exact' if exact else 'broken'}")
    assert ok


@pytest.mark.slow
def test_c12_maximal_function_chain(criterion):
    peetre = ex.audit_peetre(grids=(64, 128))
    fs = ex.audit_fs(grids=(64, 128))
    ok = peetre.passed and fs.passed
    def spreads(rep):
        groups = {}
        for c in rep.cases:
            if c.get("group"):
                groups.setdefault(c["group"], []).append(c["measured"])
        return {g: max(v) / min(v) for g, v in groups.items() if min(v) > 0}

    detail = ", ".join(f"{g} spread {v:.3f}" for g, v in spreads(peetre).items())
    detail += f", Fefferman-Stein max spread {max(spreads(fs).values()):.3f}"
    criterion(12, "maximal-function chain constants", ok, detail)
    assert peetre.passed, peetre.failed_checks()
    assert fs.passed, fs.failed_checks()
