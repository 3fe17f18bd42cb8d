import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wavemult.grid import GridSpec
from wavemult.maximal import (RadiusLadder, ball_average, ball_averages, ball_offsets, hardy_littlewood,
                              probe_sup, select_radii, sharp_maximal, sharp_maximal_table, u_ell_linearization)

from conftest import random_field

G = GridSpec(2, 32, 8.0)


def test_ladder_invariants():
    lad = RadiusLadder.for_level(G, 4)
    assert lad.radii == tuple(sorted(lad.radii)) and len(lad) > 0
    assert min(lad.radii) >= 1 / 4 - 1e-12 and max(lad.radii) <= min(4, G.L / 4) + 1e-12
    assert set(lad.radii) <= set(RadiusLadder.for_level(G, 5).radii)
    with pytest.raises(ValueError):
        RadiusLadder(G, 1.0, ())


def test_ball_average_constant_linear_and_bruteforce(rng):
    c = G.field(np.full(G.shape, 2 - 1j))
    assert abs(ball_average(c, (5, 7), 1.3) - (2 - 1j)) < 1e-14
    x, y = G.coords()
    lin = G.field(3 * x - y)
    idx = (G.N // 2, G.N // 2 + 1)
    assert abs(ball_average(lin, idx, 1.0) - (3 * G.axis[idx[0]] - G.axis[idx[1]])) < 1e-10
    f = random_field(G, rng)
    pts = [(i, j) for i in range(G.N) for j in range(G.N)
           if ((i - 3 + G.N // 2) % G.N - G.N // 2) ** 2 + ((j - 4 + G.N // 2) % G.N - G.N // 2) ** 2 <= 1]
    brute = np.mean([f.values[p] for p in pts])
    assert abs(ball_average(f, (3, 4), G.h) - brute) < 1e-14
    assert np.isclose(ball_averages(f, G.h)[3, 4], brute)


def test_ball_radius_guards():
    with pytest.raises(ValueError):
        ball_offsets(G, G.h / 2)
    with pytest.raises(ValueError):
        ball_offsets(G, G.L)


def test_sharp_maximal_basic_properties(rng):
    lad = RadiusLadder.for_level(G, 4)
    assert np.all(sharp_maximal(G.field(np.full(G.shape, 3.0)), lad).values == 0)
    f = random_field(G, rng)
    a = sharp_maximal(f * (-2.5j), lad).values
    assert np.allclose(a, 2.5 * sharp_maximal(f, lad).values, atol=1e-13)


def test_half_space_indicator():
    x, _ = G.coords()
    f = G.field((x >= 0).astype(float) * np.ones(G.shape))
    lad = RadiusLadder.for_level(G, G.L / 4)
    M = sharp_maximal(f, lad).values.real
    assert M[G.N // 2, G.N // 2] >= 0.25 * 0.9


@given(st.integers(0, 10**6), st.sampled_from([2, 3, 8]))
def test_domination_and_selection_gap(seed, ell):
    g = GridSpec(2, 16, 4.0)
    r = np.random.default_rng(seed)
    f = random_field(g, r)
    other = random_field(g, r)
    lad = RadiusLadder.for_level(g, ell)
    full = RadiusLadder.full(g)
    Ml = sharp_maximal(f, lad).values.real
    M = sharp_maximal(f, full).values.real
    U = u_ell_linearization(f, f, ell, lad).values
    tol = 1e-12 * M.max()
    assert np.all(np.abs(U) <= Ml + tol) and np.all(Ml <= M + tol)
    assert np.all(U.real >= (1 - 1 / ell) * Ml - tol)
    assert np.max(Ml - U.real) <= Ml.max() / ell + tol
    Uo = u_ell_linearization(f, other, ell, lad).values
    assert np.all(np.abs(Uo) <= sharp_maximal(other, lad).values.real + tol)


def test_saturation_and_monotonicity(rng):
    f = random_field(G, rng)
    M = sharp_maximal(f, RadiusLadder.full(G)).values.real
    prev = None
    for ell in (2, 4, 16, 1000):
        Ml = sharp_maximal(f, RadiusLadder.for_level(G, ell)).values.real
        if prev is not None:
            assert np.all(Ml >= prev - 1e-14)
        prev = Ml
    assert np.abs(prev - M).max() == 0


def test_hardy_littlewood_bound(rng):
    f = random_field(G, rng)
    lad = RadiusLadder.full(G)
    assert np.all(sharp_maximal(f, lad).values.real <= 2 * hardy_littlewood(f, lad).values.real + 1e-12)


def test_constant_g_and_ell_guard(rng):
    c = G.field(np.ones(G.shape))
    lad = RadiusLadder.for_level(G, 4)
    assert np.all(select_radii(sharp_maximal_table(c, lad), 4) == 0)
    assert np.all(u_ell_linearization(c, c, 4).values == 0)
    with pytest.raises(ValueError):
        u_ell_linearization(c, c, 1.5)


def test_probe_is_a_lower_bound(rng):
    f = random_field(G, rng)
    lad = RadiusLadder.geometric(G)
    exact = sharp_maximal(f, lad).values.real.max()
    assert 0 < probe_sup(f, lad) <= exact + 1e-14
    assert probe_sup(G.zeros()) == 0.0
