import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wavemult.grid import GridSpec, lp_norm
from wavemult.symbols import (RING_RADIUS, SymbolSpec, apply_symbol, compose, critical_b, eval_analytic_family,
                              eval_dilated_symbol, eval_full_symbol, eval_nu_symbol, eval_psi,
                              eval_remainder_symbol, eval_tilde_symbol, tabulate_kernel)

from conftest import random_field

BS = (0.5, 1.0, 1.5, 2.0)


def test_psi_support_and_radiality():
    assert eval_psi(np.array([0.5, 0.0])) == 0
    assert eval_psi(np.array([0.0, 3.0])) == 1
    v = [eval_psi(1.5 * np.array([math.cos(a), math.sin(a)])) for a in np.linspace(0, 3, 7)]
    assert 0 < v[0] < 1 and np.allclose(v, v[0], atol=1e-15)


def test_full_symbol_examples():
    assert eval_full_symbol(np.zeros(2), 1.3) == 1
    xi = np.random.default_rng(0).standard_normal((50, 3))
    assert np.allclose(np.abs(eval_full_symbol(xi, 0.0)), 1.0)
    val = eval_full_symbol(np.array([1 / (2 * math.pi), 0.0]), 2.0)
    assert abs(val - 0.5 * np.exp(1j / (2 * math.pi))) < 1e-15


def test_tilde_and_remainder_supports():
    xi_in, xi_out = np.array([0.7, 0.0]), np.array([0.0, 2.5])
    assert eval_tilde_symbol(xi_in, 1.0) == 0
    k = 2.5
    assert eval_tilde_symbol(xi_out, 1.0) == (2 * math.pi * k) ** -1.0 * np.exp(1j * k)
    assert eval_remainder_symbol(xi_out, 1.0) == 0
    assert eval_remainder_symbol(np.zeros(2), 1.0) == 1


def test_nu_examples():
    xi = np.random.default_rng(1).standard_normal((20, 2))
    assert np.all(eval_nu_symbol(xi, 0.0) == 1)
    assert math.isclose(eval_nu_symbol(np.array([1 / (2 * math.pi), 0.0]), 1.0), 1 / math.sqrt(2))
    ks = np.geomspace(0.1, 1e4, 50)
    v = eval_nu_symbol(np.stack([ks, 0 * ks], axis=-1), 1.5)
    assert np.all(np.diff(v) > 0) and v[-1] > 1 - 1e-7
    with pytest.raises(ValueError):
        SymbolSpec("nu_b", b=-1)


def test_dilated_and_analytic_families():
    xi = np.random.default_rng(2).standard_normal((30, 2))
    assert np.allclose(eval_dilated_symbol(xi, 1.2, 1.0), eval_full_symbol(xi, 1.2))
    assert eval_dilated_symbol(np.zeros(2), 1.0, 3.0) == 1
    with pytest.raises(ValueError):
        eval_dilated_symbol(xi, 1.0, 0.0)
    k2 = np.sum(xi * xi, axis=-1)
    z0 = (1 + k2) ** (-2 / 4) * np.exp(1j * np.sqrt(k2))
    assert np.allclose(eval_analytic_family(xi, 0), z0)
    assert np.allclose(np.abs(eval_analytic_family(xi, 0.7j)), np.abs(z0))
    assert eval_analytic_family(np.zeros(2), 1) == 1
    with pytest.raises(ValueError):
        eval_analytic_family(xi, 1.5)


@pytest.mark.parametrize("b", BS)
def test_decomposition_identity(b):
    g = GridSpec(2, 256, 8.0)
    full = SymbolSpec("full_T_b", b=b).on_grid(g)
    rem = SymbolSpec("remainder_bar", b=b).on_grid(g)
    prod = SymbolSpec("nu_b", b=b).on_grid(g) * SymbolSpec("tilde_T_b", b=b).on_grid(g)
    assert np.abs(full - rem - prod).max() < 1e-12
    literal = SymbolSpec("remainder_bar", b=b, paper_literal=True).on_grid(g)
    assert np.abs(full - literal - prod).max() > 1e-3


def test_critical_b_exact():
    assert critical_b(3, 1) == 1
    assert critical_b(3, 2) == Fraction(3, 2)
    assert critical_b(2, 2) == 1
    assert critical_b(2, math.inf) == Fraction(3, 2)
    assert critical_b(2, Fraction(3, 2)) == Fraction(5, 6)
    with pytest.raises(ValueError):
        critical_b(2, 0.5)


def test_identity_and_composition(rng):
    g = GridSpec(2, 32, 4.0)
    f = random_field(g, rng)
    assert np.abs(apply_symbol(f, SymbolSpec("identity")).values - f.values).max() < 1e-12
    prod = compose(SymbolSpec("full_T_b", b=1.0), SymbolSpec("full_T_b", b=-1.0)).on_grid(g)
    assert np.allclose(prod, np.exp(2j * g.freq_radius), atol=1e-13)


def _dense_dft_matrix(g):
    x = g.axis
    xi = g.freq_axis
    E = np.exp(-2j * math.pi * np.outer(xi, x))
    return np.kron(E, E) * g.cell_volume


def test_apply_matches_dense_dft_oracle():
    g = GridSpec(2, 32, 4.0)
    x, y = g.coords()
    rho = lambda cx: np.exp(-40 * ((x - cx) ** 2 + y**2))
    f = g.field(rho(0.3) - rho(-0.3))
    s = SymbolSpec("tilde_T_b", b=1.0).on_grid(g).ravel()
    D = _dense_dft_matrix(g)
    Dinv = np.conj(D.T) / (g.cell_volume * g.L**g.n)
    oracle = Dinv @ (s * (D @ f.values.ravel()))
    got = apply_symbol(f, SymbolSpec("tilde_T_b", b=1.0)).values.ravel()
    assert np.abs(got - oracle).max() < 1e-10 * np.abs(oracle).max()


def test_nonfinite_symbol_is_a_hard_error():
    g = GridSpec(2, 16, 2.0)
    bad = np.ones(g.shape)
    bad[3, 4] = np.inf
    with pytest.raises(FloatingPointError, match="xi"):
        apply_symbol(g.zeros(), bad)


@given(st.integers(0, 10**6), st.floats(0.1, 2.0))
def test_linearity_and_contraction(seed, b):
    g = GridSpec(2, 16, 3.0)
    r = np.random.default_rng(seed)
    f1, f2 = random_field(g, r), random_field(g, r)
    s = SymbolSpec("full_T_b", b=b)
    lhs = apply_symbol(f1 * 2.0 + f2, s).values
    rhs = 2.0 * apply_symbol(f1, s).values + apply_symbol(f2, s).values
    assert np.abs(lhs - rhs).max() < 1e-10 * (1 + np.abs(rhs).max())
    smax = np.abs(s.on_grid(g)).max()
    assert lp_norm(apply_symbol(f1, s), 2) <= smax * lp_norm(f1, 2) * (1 + 1e-10)


def test_zero_mode_irrelevant_for_mean_zero(rng):
    g = GridSpec(2, 16, 3.0)
    f = random_field(g, rng, mean_zero=True)
    s = SymbolSpec("riesz_I_alpha", alpha=1.0).on_grid(g)
    s2 = s.copy()
    s2[g.origin_index] = 17.0
    assert np.abs(apply_symbol(f, s).values - apply_symbol(f, s2).values).max() < 1e-12


def test_heat_kernel_closed_form():
    g = GridSpec(2, 256, 16.0)
    t = 0.1
    K = tabulate_kernel(SymbolSpec("heat_p_t", t=t), g).values
    ref = (4 * math.pi * t) ** -1 * np.exp(-g.radius**2 / (4 * t))
    assert np.abs(K - ref).max() < 1e-8


def test_identity_kernel_is_unit_spike():
    g = GridSpec(2, 16, 2.0)
    K = tabulate_kernel(SymbolSpec("identity"), g)
    assert abs(K.integral() - 1) < 1e-12
    assert abs(K.at_origin() - 1 / g.cell_volume) < 1e-9


def test_kernel_focusing_on_ring():
    g = GridSpec(2, 512, 16 * RING_RADIUS * 2)
    K = np.abs(tabulate_kernel(SymbolSpec("tilde_T_b", b=1.0), g).values)
    r = g.radius / RING_RADIUS
    assert K[(r >= 0.5) & (r <= 1.5)].max() >= 10 * K[(r >= 2) & (r <= 4)].max()
