import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wavemult.grid import (Field, GridSpec, SpectralField, dft, idft, lp_norm, lp_norm_region,
                           read_binary, write_binary, write_csv)

from conftest import random_field


def test_gridspec_rejects_bad_parameters():
    with pytest.raises(ValueError):
        GridSpec(4, 16, 1.0)
    with pytest.raises(ValueError):
        GridSpec(2, 15, 1.0)
    with pytest.raises(ValueError):
        GridSpec(2, 16, 0.0)


def test_lattices_are_centered():
    g = GridSpec(2, 16, 4.0)
    assert g.h == 0.25
    assert g.axis[g.N // 2] == 0.0
    assert g.freq_axis[g.N // 2] == 0.0
    assert np.isclose(g.freq_axis[1] - g.freq_axis[0], 1 / g.L)


def test_spike_transforms_to_ones():
    g = GridSpec(2, 32, 4.0)
    spike = g.zeros().values
    spike[g.origin_index] = 1 / g.cell_volume
    F = dft(Field(g, spike)).coefficients
    assert np.allclose(F, 1.0, atol=1e-12)
    back = idft(SpectralField(g, np.ones(g.shape)))
    assert np.allclose(back.values, spike, atol=1e-9)


def test_gaussian_self_duality():
    g = GridSpec(2, 256, 16.0)
    f = g.field(np.exp(-math.pi * g.radius**2))
    err = np.abs(dft(f).coefficients - np.exp(-math.pi * g.freq_radius**2)).max()
    assert err < 1e-10


def test_pure_tone():
    g = GridSpec(2, 32, 4.0)
    F = np.zeros(g.shape, dtype=complex)
    m = (g.N // 2 + 3, g.N // 2 - 2)
    F[m] = g.L**g.n
    x, y = g.coords()
    xi = (g.freq_axis[m[0]], g.freq_axis[m[1]])
    tone = np.exp(2j * math.pi * (xi[0] * x + xi[1] * y))
    assert np.allclose(idft(SpectralField(g, F)).values, tone, atol=1e-12)


@given(st.integers(0, 2**31 - 1), st.sampled_from([(2, 16, 3.0), (2, 32, 7.5), (3, 8, 2.0)]))
def test_inversion_and_plancherel(seed, params):
    g = GridSpec(*params)
    f = random_field(g, np.random.default_rng(seed))
    F = dft(f)
    assert np.abs(idft(F).values - f.values).max() < 1e-12 * np.abs(f.values).max()
    space = lp_norm(f, 2) ** 2
    freq = np.sum(np.abs(F.coefficients) ** 2) / g.L**g.n
    assert abs(space - freq) < 1e-10 * space


def test_lp_norm_examples():
    g = GridSpec(2, 256, 4.0)
    x, y = g.coords()
    cube = g.field(((np.abs(x) <= 0.5) & (np.abs(y) <= 0.5)).astype(float))
    assert abs(lp_norm(cube, 1) - 1.0) <= g.h * 4
    gauss = g.field(np.exp(-math.pi * g.radius**2))
    assert abs(lp_norm(gauss, 2) ** 2 - 0.5) < 1e-8
    with pytest.raises(ValueError):
        lp_norm(gauss, 0.5)


@given(st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3), st.sampled_from([1, 1.5, 2, 3, math.inf]))
def test_lp_norm_homogeneous(c, p):
    g = GridSpec(2, 16, 2.0)
    f = random_field(g, np.random.default_rng(1))
    assert math.isclose(lp_norm(f * c, p), abs(c) * lp_norm(f, p), rel_tol=1e-12)


def test_region_norm_disk_area_and_additivity(rng):
    g = GridSpec(2, 256, 4.0)
    one = g.field(np.ones(g.shape))
    disk = lp_norm_region(one, 1, 0.0, 1.0)
    assert abs(disk.value - math.pi) < 10 * g.h
    f = random_field(g, rng)
    edges = [0.0, 0.5, 1.1, 1.7, 10.0]
    parts = []
    for lo, hi in zip(edges, edges[1:]):
        # nudge the lower edge so shared boundary points count once
        parts.append(lp_norm_region(f, 3, lo if lo == 0 else np.nextafter(lo, np.inf), hi).value ** 3)
    assert math.isclose(sum(parts), lp_norm(f, 3) ** 3, rel_tol=1e-12)
    empty = lp_norm_region(f, 2, 100.0, 200.0)
    assert empty.empty and empty.value == 0.0


def test_binary_round_trip(tmp_path, rng):
    g = GridSpec(3, 8, 2.0)
    f = random_field(g, rng)
    write_binary(f, tmp_path / "f.bin")
    back = read_binary(tmp_path / "f.bin")
    assert back.grid == g and np.array_equal(back.values, f.values)
    write_csv(f, tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "x1,x2,x3,re,im" and len(lines) == 1 + g.size


def test_field_rejects_mismatch():
    a = GridSpec(2, 16, 1.0).zeros()
    b = GridSpec(2, 16, 2.0).zeros()
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(ValueError):
        Field(a.grid, np.full(a.grid.shape, np.nan))
