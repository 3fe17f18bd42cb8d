import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wavemult.atoms import (AtomSpec, default_t_samples, heat_extension, heat_norm_scan, make_dipole_atom,
                            make_shell_atom, max_admissible_beta, mollify, radial_dipole, validate_atom)
from wavemult.grid import Field, GridSpec, lp_norm

from conftest import random_field

G2 = GridSpec(2, 256, 4.0)


@pytest.fixture(scope="module")
def dipole():
    return make_dipole_atom(G2, 1.0, 2.0)


def test_heat_semigroup_and_mass(rng):
    f = random_field(G2, rng)
    a = heat_extension(heat_extension(f, 0.01), 0.02).values
    b = heat_extension(f, 0.03).values
    assert np.abs(a - b).max() < 1e-12 * np.abs(b).max()
    assert abs(heat_extension(f, 0.05).integral() - f.integral()) < 1e-12 * abs(f.integral()) + 1e-12
    with pytest.raises(ValueError):
        heat_extension(f, 0.0)


def test_heat_of_spike_peak():
    g = GridSpec(2, 256, 16.0)
    spike = g.zeros().values
    spike[g.origin_index] = 1 / g.cell_volume
    u = heat_extension(Field(g, spike), 0.1)
    assert abs(np.abs(u.values).max() - 1 / (4 * math.pi * 0.1)) < 1e-8


@given(st.integers(0, 10**6), st.floats(1e-3, 0.5))
def test_heat_contracts_l1_and_keeps_positivity(seed, t):
    g = GridSpec(2, 32, 4.0)
    vals = np.random.default_rng(seed).random(g.shape)
    f = g.field(vals)
    u = heat_extension(f, t)
    assert lp_norm(u, 1) <= lp_norm(f, 1) * (1 + 1e-12)
    assert u.values.real.min() >= -1e-12 * vals.max()


def test_zero_atom_passes_vacuously():
    v = validate_atom(AtomSpec(G2.zeros(), (0.0, 0.0), 1.0, 2.0))
    assert v.passed and v.heat_sup == 0


def test_unbalanced_density_fails_cancellation():
    dens = np.exp(-20 * G2.radius**2)
    dens /= dens.sum() * G2.cell_volume
    v = validate_atom(AtomSpec(G2.field(dens * 0.5), (0.0, 0.0), 1.0, 2.0))
    assert v.cancel_residual > 0 and "cancellation" in v.violated()


def test_dipole_atom_properties(dipole):
    v = validate_atom(dipole)
    assert v.passed
    assert abs(dipole.field.integral()) < 1e-12
    assert lp_norm(dipole.field, 1) <= 1 + 1e-6
    assert 0.5 <= v.heat_sup * dipole.ell**dipole.beta <= 1 + 1e-6
    assert dipole.binding in ("heat", "total_variation")
    assert json.loads(dipole.to_json())["family"] == "dipole"


def test_dipole_preconditions():
    with pytest.raises(ValueError):
        make_dipole_atom(G2, 1.0, 2.0, eps=0.3)
    with pytest.raises(ValueError):
        make_dipole_atom(G2, 2.0, 2.0)


def test_dipole_rescaling_law():
    g1 = GridSpec(2, 128, 4.0)
    g2 = GridSpec(2, 128, 2.0)
    a1 = make_dipole_atom(g1, 1.0, 2.0)
    a2 = make_dipole_atom(g2, 0.5, 2.0)
    # same samples on the rescaled grid; beta = n keeps the density scaling at ell^-n
    err = np.abs(a2.field.values - 4.0 * a1.field.values).max()
    assert err <= 1e-10 * np.abs(a2.field.values).max()


def test_shell_atom():
    g = GridSpec(2, 256, 4.0)
    a = make_shell_atom(g, 1.0, 1.5)
    assert abs(a.field.integral()) < 1e-10
    assert lp_norm(a.field, 1) <= 1 + 1e-6
    assert validate_atom(a).passed


def test_shell_admissible_beta_trend():
    g = GridSpec(2, 256, 4.0)
    ts = default_t_samples(1.0, 24)
    betas = [max_admissible_beta(g, 1.0, eps, t_samples=ts, rel=1e-3) for eps in (1 / 8, 1 / 16, 1 / 32)]
    # recorded trend; only sanity is asserted
    assert all(0 <= b <= 2 for b in betas)


def test_mollify_properties(dipole):
    ts = default_t_samples(dipole.ell)
    m = mollify(dipole, dipole.ell / 8)
    assert abs(m.field.integral()) < 1e-12
    assert lp_norm(m.field, 1) <= lp_norm(dipole.field, 1) * (1 + 1e-6)
    assert validate_atom(m, ts).heat_sup <= validate_atom(dipole, ts).heat_sup * (1 + 1e-6)
    assert m.ell == 2 * dipole.ell and m.bound_scale == 2.0**dipole.beta
    with pytest.raises(ValueError):
        mollify(dipole, 2.0)


def test_heat_norm_scan_large_t_l1():
    g = GridSpec(2, 512, 32.0)
    atom = make_dipole_atom(g, 1.0, 2.0)
    scan = heat_norm_scan(atom, np.geomspace(1e-2, 10, 31))
    assert abs(scan.one_large.slope + 0.5) <= 0.1
    assert scan.inf_large.target == -1.0 and scan.one_large.target == -0.5


def test_radial_dipole_matches_grid_constant():
    g = GridSpec(2, 512, 4.0)
    grid_atom = make_dipole_atom(g, 1.0, 2.0)
    rad = radial_dipole(2, 1.0)
    assert rad.passed
    assert math.isclose(rad.c, grid_atom.c, rel_tol=2e-3)
