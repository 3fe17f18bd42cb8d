"""Dyadic frequency decomposition and the Littlewood-Paley pieces of the kernel."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .grid import Field, GridSpec, lp_norm
from .slopes import SlopeReport, fit_slope
from .symbols import DEFAULT_CUTOFF, SymbolSpec, _tilde, apply_symbol, compose, tabulate_kernel

__all__ = [
    "eval_Phi",
    "eval_phi_j",
    "phi_j_radial",
    "tilde_projector_radial",
    "lp_piece_symbol",
    "resolvable",
    "max_resolvable_j",
    "lp_kernel",
    "kernel_norm_scan",
    "kernel_norm_target",
    "tilde_projector",
]

_bump = DEFAULT_CUTOFF.bump


def _scaled(k, j):
    # exact for power-of-two scalings
    return np.ldexp(np.asarray(k, dtype=float), -int(j))


def phi_j_radial(k, j: int):
    """``phi(2^-j k) = Phi(2^-j k) - Phi(2^(1-j) k)``."""
    return _bump(_scaled(k, j)) - _bump(_scaled(k, j - 1))


def tilde_projector_radial(k, j: int):
    """``phi_{j-1} + phi_j + phi_{j+1}``, telescoped."""
    return _bump(_scaled(k, j + 1)) - _bump(_scaled(k, j - 2))


def _norm(xi):
    xi = np.asarray(xi, dtype=float)
    return np.abs(xi) if xi.ndim == 0 else np.sqrt(np.sum(xi * xi, axis=-1))


def eval_Phi(xi):
    return _bump(_norm(xi))


def eval_phi_j(xi, j: int):
    return phi_j_radial(_norm(xi), j)


def lp_piece_symbol(xi, j: int, b: float):
    k = _norm(xi)
    return phi_j_radial(k, j) * _tilde(k, b)


def resolvable(j: int, grid: GridSpec, margin: float = 0.9) -> bool:
    """Outer edge ``2^(j+1)`` of the annulus sits inside ``margin`` x Nyquist."""
    return 2.0 ** (j + 1) <= margin * grid.nyquist


def max_resolvable_j(grid: GridSpec, margin: float = 0.9) -> int:
    return int(math.floor(math.log2(margin * grid.nyquist))) - 1


def lp_kernel(j: int, b: float, grid: GridSpec) -> Field:
    if not resolvable(j, grid):
        raise ValueError(
            f"annulus of j={j} reaches |xi|={2.0 ** (j + 1)}, beyond 0.9 x Nyquist "
            f"({0.9 * grid.nyquist:.3g}) of {grid}"
        )
    return tabulate_kernel(SymbolSpec("lp_piece", b=b, j=j), grid)


def kernel_norm_target(n: int, q, b, alpha=()) -> float:
    """Growth exponent ``(n+1)/2 - 1/q - b + |alpha|`` (base 2, per unit j)."""
    inv_q = 0.0 if math.isinf(float(q)) else 1.0 / float(q)
    return (n + 1) / 2 - inv_q - float(b) + sum(alpha)


def kernel_norm_scan(j_range, q, b: float, alpha=(), grid: GridSpec | None = None) -> SlopeReport:
    """``||d^alpha K_b^j||_q`` over ``j``; slope of log2-norm against ``j``."""
    if grid is None:
        raise ValueError("kernel_norm_scan needs a grid")
    alpha = tuple(alpha) if alpha else (0,) * grid.n
    rows = []
    for j in j_range:
        if not resolvable(j, grid):
            raise ValueError(f"j={j} not resolvable on {grid}")
        sym = SymbolSpec("lp_piece", b=b, j=j)
        if any(alpha):
            sym = compose(sym, SymbolSpec("derivative_monomial_alpha", alpha=alpha))
        K = tabulate_kernel(sym, grid)
        rows.append((2.0**j, lp_norm(K, q)))
    target = kernel_norm_target(grid.n, q, b, alpha)
    rep = fit_slope(rows, target=target)
    rep.extra = {"q": str(q), "b": float(b), "alpha": list(alpha),
                 "j": [int(j) for j in j_range], "n": grid.n, "N": grid.N, "L": grid.L}
    return rep


def tilde_projector(f: Field, j: int) -> Field:
    return apply_symbol(f, SymbolSpec("lp_tilde_projector", j=j))
