import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wavemult.atoms import make_dipole_atom, radial_dipole
from wavemult.grid import GridSpec, SpectralField, idft, lp_norm
from wavemult.wave import (CauchyData, CauchySymbol, ConeWarning, cauchy_decay_scan, dilated_multiplier_scan,
                           dual_exponent_ratio, kirchhoff_radial, leakage_fraction, propagate, radial_bump,
                           wave_energy, wave_solution)

G2 = GridSpec(2, 128, 16.0)


def _smooth_data(g):
    x, y = g.coords()
    return CauchyData(g.field(np.exp(-4 * ((x - 1) ** 2 + y**2))), g.field(x * np.exp(-3 * (x**2 + (y + 1) ** 2))))


def test_t_zero_returns_f():
    d = _smooth_data(G2)
    assert np.array_equal(wave_solution(d, 0.0).values, d.f.values)


def test_tone_eigenmode():
    g = GridSpec(2, 32, 8.0)
    F = np.zeros(g.shape, dtype=complex)
    m = (g.N // 2 + 3, g.N // 2)
    F[m] = g.L**2
    tone = idft(SpectralField(g, F))
    k = abs(g.freq_axis[m[0]])
    t = 0.7
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConeWarning)
        u = wave_solution(CauchyData(g.zeros(), tone), t)
    ref = math.sin(2 * math.pi * t * k) / (2 * math.pi * k) * tone.values
    assert np.abs(u.values - ref).max() < 1e-12


def test_energy_conservation_and_quadratic():
    d = _smooth_data(G2)
    E = [wave_energy(d, t) for t in np.linspace(0, 4, 9)]
    assert (max(E) - min(E)) / E[0] < 1e-10
    assert wave_energy(CauchyData.zero(G2), 1.0) == 0
    d2 = CauchyData(G2.zeros(), d.g * 2.0)
    assert math.isclose(wave_energy(d2), 4 * wave_energy(CauchyData(G2.zeros(), d.g)), rel_tol=1e-12)


@given(st.floats(0.0, 2.0), st.floats(0.0, 2.0))
def test_group_law(s, t):
    d = _smooth_data(G2)
    a = propagate(propagate(d, s), t)
    b = propagate(d, s + t)
    assert lp_norm(a.f - b.f, 2) <= 1e-10 * lp_norm(b.f, 2)
    assert lp_norm(a.g - b.g, 2) <= 1e-10 * (lp_norm(b.g, 2) + 1e-300)


def test_kirchhoff_oracle_and_leakage():
    g = GridSpec(3, 96, 20.0)
    eps = 3.0
    bump = radial_bump(eps)
    d = CauchyData(g.zeros(), g.field(bump(g.radius)))
    radii = np.unique(np.round(g.radius.ravel(), 12))
    for t in (1.0, 5.0):
        u = wave_solution(d, t)
        ref = np.interp(g.radius.ravel(), radii, kirchhoff_radial(bump, radii, t)).reshape(g.shape)
        err = math.sqrt(np.sum(np.abs(u.values - ref) ** 2) / np.sum(ref**2))
        assert err < 1e-3
        assert leakage_fraction(u, eps + t + 4 * g.h) < 1e-4


def test_cone_warning_when_box_too_small():
    g = GridSpec(2, 64, 4.0)
    d = CauchyData(g.zeros(), g.field(radial_bump(0.5)(g.radius)))
    with pytest.warns(ConeWarning):
        wave_solution(d, 1.9)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        wave_solution(_smooth_data(G2), -1.0)


def test_dual_exponent_ratio():
    assert dual_exponent_ratio(3, 1) == 0
    assert dual_exponent_ratio(2, 2) == 1
    assert dual_exponent_ratio(3, math.inf) == 3


def test_cauchy_symbol_at_zero_time_limit():
    s = CauchySymbol(1e-9, cf=1.0, cg=0.0)
    assert np.allclose(s.radial_values(np.linspace(0, 5, 11), 2), 1.0, atol=1e-6)


def test_dilated_scan_targets_and_abort():
    atom = radial_dipole(2, 0.25)
    r = dilated_multiplier_scan(atom, 1.0, 2, (1, 2, 4, 8))
    assert r.target == -1 and abs(r.slope + 1) <= 0.15
    grid_atom = make_dipole_atom(GridSpec(2, 64, 4.0), 0.5, 2.0)
    rg = dilated_multiplier_scan(grid_atom, 1.0, 2, (1, 2, 4, 8))
    assert rg.extra["aborted"] and not rg.valid


def test_cauchy_growth_and_band():
    grow = cauchy_decay_scan(3, 1, data="g", prepared=False)
    assert abs(grow.slope - 1) <= 0.15 and grow.target == 1
    band = cauchy_decay_scan(2, 2)
    assert band.band_ratio <= 4
    with pytest.raises(ValueError):
        cauchy_decay_scan(2, 2, data="h")
