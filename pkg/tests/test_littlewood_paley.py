import math

import numpy as np
import pytest

from wavemult.grid import GridSpec, dft, idft, SpectralField, lp_norm
from wavemult.littlewood_paley import (eval_phi_j, kernel_norm_scan, kernel_norm_target, lp_kernel,
                                       lp_piece_symbol, max_resolvable_j, phi_j_radial, resolvable,
                                       tilde_projector)
from wavemult.symbols import SymbolSpec, apply_symbol, eval_tilde_symbol

from conftest import random_field


def test_phi_j_examples():
    for j in (-3, 0, 4):
        assert math.isclose(eval_phi_j(np.array([2.0**j, 0.0]), j), 1.0)
        assert eval_phi_j(np.array([0.0, 2.0 ** (j + 2)]), j) == 0


def test_partition_of_unity_wide_range():
    k = np.geomspace(2.0**-29, 2.0**29, 4001)
    total = sum(phi_j_radial(k, j) for j in range(-30, 31))
    assert np.abs(total - 1).max() < 1e-12


def test_annulus_support_exact():
    k = np.geomspace(1e-3, 1e3, 5000)
    for j in (-2, 0, 3):
        v = phi_j_radial(k, j)
        out = (k < 2.0 ** (j - 1)) | (k > 2.0 ** (j + 1))
        assert np.all(v[out] == 0) and np.all((v >= 0) & (v <= 1))


def test_pieces_sum_to_tilde():
    g = GridSpec(2, 128, 4.0)
    xi = np.stack(np.meshgrid(g.freq_axis, g.freq_axis, indexing="ij"), axis=-1)
    total = sum(lp_piece_symbol(xi, j, 1.0) for j in range(-2, 8))
    assert np.abs(total - eval_tilde_symbol(xi, 1.0)).max() < 1e-13
    assert np.all(lp_piece_symbol(xi, -2, 1.0) == 0)


def test_low_piece_kernel_is_zero_and_aliased_piece_rejected():
    g = GridSpec(2, 64, 4.0)
    assert np.all(lp_kernel(-3, 1.0, g).values == 0)
    assert not resolvable(max_resolvable_j(g) + 1, g)
    with pytest.raises(ValueError):
        lp_kernel(max_resolvable_j(g) + 1, 1.0, g)


def test_kernel_plancherel():
    g = GridSpec(2, 256, 4.0)
    K = lp_kernel(3, 1.0, g)
    sym = SymbolSpec("lp_piece", b=1.0, j=3).on_grid(g)
    assert math.isclose(lp_norm(K, 2) ** 2, np.sum(np.abs(sym) ** 2) / g.L**2, rel_tol=1e-10)


def test_sup_norm_growth_prediction():
    g = GridSpec(2, 512, 1.6)
    sup = {j: lp_norm(lp_kernel(j, 1.0, g), math.inf) for j in (3, 4, 5)}
    c = np.mean([sup[j] / 2.0 ** (0.5 * j) for j in (3, 4)])
    ratio = sup[5] / (c * 2.0**2.5)
    assert 0.5 <= ratio <= 2


def test_targets():
    assert kernel_norm_target(2, 2, 0) == 1.0
    assert kernel_norm_target(2, math.inf, 1) == 0.5
    assert kernel_norm_target(2, 2, 0, (1, 0)) == 2.0


def test_scan_needs_three_points_and_grid():
    g = GridSpec(2, 256, 1.6)
    assert not kernel_norm_scan(range(2, 4), 2, 0.0, (), g).valid
    with pytest.raises(ValueError):
        kernel_norm_scan(range(2, 5), 2, 0.0)


def test_tilde_projector_reproduces_and_kills(rng):
    g = GridSpec(2, 128, 8.0)
    j = 2
    F = dft(random_field(g, rng)).coefficients
    k = g.freq_radius
    inside = idft(SpectralField(g, F * ((k >= 2.0 ** (j - 1)) & (k <= 2.0 ** (j + 1)))))
    assert np.abs(tilde_projector(inside, j).values - inside.values).max() < 1e-12 * np.abs(inside.values).max()
    outside = idft(SpectralField(g, F * ((k < 2.0 ** (j - 2)) | (k > 2.0 ** (j + 2)))))
    assert np.abs(tilde_projector(outside, j).values).max() < 1e-12 * np.abs(outside.values).max()
    f = random_field(g, rng)
    piece = SymbolSpec("lp_piece", b=1.0, j=j)
    a = apply_symbol(f, piece).values
    b = apply_symbol(tilde_projector(f, j), piece).values
    assert np.abs(a - b).max() < 1e-12 * np.abs(a).max()
