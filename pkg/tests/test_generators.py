from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shearlet_tl import generators as g

unit = st.floats(min_value=-2.0, max_value=3.0, allow_nan=False)
freq = st.floats(min_value=-4.0, max_value=4.0, allow_nan=False)


@given(unit)
def test_transition_symmetry(t):
    assert g.transition(t) + g.transition(1.0 - t) == pytest.approx(1.0, abs=1e-15)


@given(unit, unit)
def test_transition_monotone(a, b):
    lo, hi = sorted((a, b))
    assert g.transition(lo) <= g.transition(hi) + 1e-15


@pytest.mark.parametrize("t, expected", [(-1.0, 0.0), (0.0, 0.0), (1.0, 1.0), (5.0, 1.0), (0.5, 0.5)])
def test_transition_frozen(t, expected):
    assert g.transition(t) == expected


def test_transition_is_flat_at_the_ends():
    t = np.array([1e-3, 2e-3])
    assert np.all(g.transition(t) < 1e-100)
    assert np.all(g.transition(1.0 - t) == 1.0)


@given(st.floats(min_value=-0.5, max_value=0.5))
def test_directional_partition(w):
    total = sum(g.psi2_hat(w - l) ** 2 for l in range(-2, 3))
    assert total == pytest.approx(1.0, abs=1e-14)


@given(st.floats(min_value=1e-3, max_value=1e3))
def test_radial_wavelet_telescopes(w):
    # phi(w)^2 + sum_j psi1(4^-j w)^2 = 1 once 4^-J w is inside the flat part
    total = g.phi_meyer_1d(w) ** 2 + sum(g.psi1_hat_sq(w / 4.0**j) for j in range(0, 12))
    assert total == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("w", [0.0, 0.03, 0.0625])
def test_meyer_flat(w):
    assert g.phi_meyer_1d(w) == 1.0


@pytest.mark.parametrize("w", [0.125, 0.2, 1.0])
def test_meyer_vanishes(w):
    assert g.phi_meyer_1d(w) == 0.0


@given(freq, freq)
def test_two_dimensional_telescoping(a, b):
    total = g.Phi_hat_sq(a, b) + sum(g.W_hat_sq(a / 4.0**j, b / 4.0**j) for j in range(0, 10))
    assert total == pytest.approx(1.0, abs=1e-14)


@given(freq, freq)
def test_windows_even_and_bounded(a, b):
    for fn in (g.Phi_hat, g.W_hat, g.phi_coarse_hat, g.dyadic_coarse_hat, g.dyadic_band_hat):
        v = fn(a, b)
        assert 0.0 <= v <= 1.0
        assert fn(-a, -b) == v


@given(st.floats(min_value=1e-3, max_value=50.0), st.floats(min_value=0, max_value=2 * np.pi))
@settings(max_examples=50)
def test_dyadic_partition(r, th):
    x, y = r * np.cos(th), r * np.sin(th)
    total = g.dyadic_coarse_hat(x, y) ** 2 + sum(g.dyadic_band_hat(x / 2.0**n, y / 2.0**n) ** 2 for n in range(1, 10))
    assert total == pytest.approx(1.0, abs=1e-14)


def test_arrays_and_scalars_agree():
    w = np.linspace(-1, 1, 17)
    arr = g.psi1_hat(w)
    assert np.allclose(arr, [g.psi1_hat(x) for x in w])
    assert isinstance(g.psi1_hat(0.2), float)
