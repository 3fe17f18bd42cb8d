import math

import numpy as np
import pytest

from wavemult.grid import Field, GridSpec, lp_norm
from wavemult.radial import DipoleField, RadialTransform, bump_profile, graded_rule
from wavemult.symbols import SymbolSpec, apply_symbol


def _grid_dipole(g, eps, d):
    X = g.coords()
    r1 = np.sqrt((X[0] - d) ** 2 + sum(x**2 for x in X[1:]))
    r2 = np.sqrt((X[0] + d) ** 2 + sum(x**2 for x in X[1:]))
    return Field(g, bump_profile(r1, eps, g.n) - bump_profile(r2, eps, g.n))


def test_bump_has_unit_mass():
    for n in (2, 3):
        g = GridSpec(n, 128 if n == 2 else 64, 2.0)
        assert abs(Field(g, bump_profile(g.radius, 0.5, n)).integral() - 1) < 1e-6


@pytest.mark.parametrize("n,N,L", [(2, 512, 12.0), (3, 128, 8.0)])
def test_engine_matches_grid_heat(n, N, L):
    eps, d = 0.5, 0.6
    g = GridSpec(n, N, L)
    a = _grid_dipole(g, eps, d)
    sym = SymbolSpec("heat_p_t", t=0.05)
    u = apply_symbol(a, sym)
    D = DipoleField(RadialTransform(n, eps).profile(sym, reach=L / 2 - 2), 1.0, d)
    line = u.values[(slice(None),) + (N // 2,) * (n - 1)]
    assert np.abs(D.on_axis(g.axis) - line).max() < 1e-5 * np.abs(line).max()
    assert math.isclose(D.lp_norm(2), lp_norm(u, 2), rel_tol=1e-5)


def test_engine_matches_grid_oscillatory():
    # the grid resolves the singular ring only coarsely, so tolerances are loose
    eps, d = 0.5, 0.6
    g = GridSpec(2, 1024, 32.0)
    a = _grid_dipole(g, eps, d)
    sym = SymbolSpec("tilde_T_b", b=1.0)
    u = apply_symbol(a, sym)
    D = DipoleField(RadialTransform(2, eps).profile(sym), 1.0, d)
    assert math.isclose(D.lp_norm(2), lp_norm(u, 2), rel_tol=1e-4)
    assert math.isclose(D.lp_norm(1), lp_norm(u, 1), rel_tol=1e-3)


@pytest.mark.parametrize("n", [2, 3])
def test_engine_plancherel_oracle(n):
    eps, d, b = 0.3, 0.4, 1.0
    T = RadialTransform(n, eps)
    sym = SymbolSpec("full_T_b", b=b)
    D = DipoleField(T.profile(sym), 1.0, d)
    k = np.linspace(1e-7, 11 / eps, 40001)
    dk = k[1] - k[0]
    rho = T.projection_spectrum(k)
    m2 = np.abs(sym.radial_values(k, n)) ** 2
    if n == 2:
        th = np.linspace(0, 2 * math.pi, 2001)[:-1]
        ang = np.mean(4 * np.sin(2 * math.pi * np.outer(k, np.cos(th)) * d) ** 2, axis=1) * 2 * math.pi * k
    else:
        x, w = np.polynomial.legendre.leggauss(200)
        ang = np.sum(w * 4 * np.sin(2 * math.pi * np.outer(k, x) * d) ** 2, axis=1) * 2 * math.pi * k**2
    oracle = math.sqrt(np.sum(rho**2 * m2 * ang) * dk)
    assert math.isclose(D.lp_norm(2), oracle, rel_tol=1e-5)


def test_region_powers_are_additive():
    T = RadialTransform(3, 0.05)
    D = DipoleField(T.profile(SymbolSpec("tilde_T_b", b=1.0)), 1.0, 0.05)
    edges = [0.0, 0.1, 0.2, 0.5, math.inf]
    parts, total = D.region_powers(1, edges)
    assert abs(sum(parts) - total) <= 1e-12 * total
    # independent rule without the region breakpoints
    assert math.isclose(total, D.lp_power(1), rel_tol=2e-3)


def test_graded_rule_integrates_singularity():
    x, w = graded_rule(0.0, 2.0, [1.0], 1e-4)
    approx = np.sum(w * np.abs(x - 1.0) ** -0.5)
    assert math.isclose(approx, 4.0, rel_tol=1e-3)
