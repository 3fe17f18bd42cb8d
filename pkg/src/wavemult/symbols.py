"""Multiplier symbols and their spectral application.

All radial symbols are functions of ``k = |xi|``.  The oscillatory factor is
``exp(i |xi|)`` as written against the ``exp(2 pi i xi.x)`` inversion, which
puts the singular sphere of the associated kernels at ``|x| = RING_RADIUS``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .grid import Field, GridSpec, dft, idft, SpectralField

__all__ = [
    "RING_RADIUS",
    "CutoffSpec",
    "SymbolSpec",
    "FAMILIES",
    "smooth_step",
    "critical_b",
    "eval_psi",
    "eval_full_symbol",
    "eval_tilde_symbol",
    "eval_remainder_symbol",
    "eval_nu_symbol",
    "eval_dilated_symbol",
    "eval_analytic_family",
    "apply_symbol",
    "tabulate_kernel",
    "compose",
]

#: Radius of the sphere on which the kernel of ``exp(i|xi|)`` concentrates.
RING_RADIUS = 1.0 / (2.0 * math.pi)

TWO_PI = 2.0 * math.pi


def smooth_step(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1, ``B(s)/(B(s)+B(1-s))``."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
        out = a / (a + b)
    return out


@dataclass(frozen=True)
class CutoffSpec:
    """Radial cutoff: 0 on ``B(0, inner)``, 1 outside ``B(0, outer)``."""

    inner: float = 1.0
    outer: float = 2.0

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise ValueError("need 0 < inner < outer")

    def psi(self, k):
        return smooth_step((np.asarray(k, dtype=float) - self.inner) / (self.outer - self.inner))

    def bump(self, k):
        """``Phi = 1 - psi``: 1 on the inner ball, supported in the outer one."""
        return 1.0 - self.psi(k)


DEFAULT_CUTOFF = CutoffSpec()


def critical_b(n: int, p) -> Fraction | float:
    """``b_p = (n+1)/2 - 1/p``; exact for rational ``p``, ``(n+1)/2`` at p = inf."""
    if isinstance(p, float) and math.isinf(p):
        return Fraction(n + 1, 2)
    if isinstance(p, str) and p.strip().lower() in ("inf", "infinity"):
        return Fraction(n + 1, 2)
    pf = Fraction(p).limit_denominator(10**6) if isinstance(p, float) else Fraction(p)
    if pf < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return Fraction(n + 1, 2) - 1 / pf


def _norm(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 0:
        return np.abs(xi)
    return np.sqrt(np.sum(xi * xi, axis=-1))


# -- radial primitives --------------------------------------------------------

def _full(k, b):
    return (1.0 + (TWO_PI * k) ** 2) ** (-b / 2.0) * np.exp(1j * k)


def _power(k, b):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(k > 0, (TWO_PI * np.where(k > 0, k, 1.0)) ** (-b), 0.0)


def _tilde(k, b, cutoff=DEFAULT_CUTOFF):
    psi = cutoff.psi(k)
    return np.where(psi > 0, psi * _power(k, b) * np.exp(1j * k), 0.0 + 0.0j)


def _remainder(k, b, cutoff=DEFAULT_CUTOFF, paper_literal=False):
    keep = 1.0 - cutoff.psi(k)
    if paper_literal:
        return keep * _power(k, b) * np.exp(1j * k)
    return keep * _full(k, b)


def _nu(k, b):
    if b < 0:
        raise ValueError("nu_b is only defined here for b >= 0")
    if b == 0:
        return np.ones_like(np.asarray(k, dtype=float))
    x = TWO_PI * np.asarray(k, dtype=float)
    # (x^2 / (1 + x^2))^(b/2), written to stay accurate for small x
    return (x * x / (1.0 + x * x)) ** (b / 2.0)


def _dilated(k, b, t):
    return (1.0 + (TWO_PI * t * k) ** 2) ** (-b / 2.0) * np.exp(1j * t * k)


def _analytic(k, z, n):
    return (1.0 + k * k) ** (-(n + z) / 4.0) * np.exp(1j * k)


def _sinc(k, t):
    w = TWO_PI * k
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(w > 0, np.sin(w * t) / np.where(w > 0, w, 1.0), t)


# -- public point evaluations -------------------------------------------------

def eval_psi(xi, cutoff: CutoffSpec = DEFAULT_CUTOFF):
    return cutoff.psi(_norm(xi))


def eval_full_symbol(xi, b: float):
    return _full(_norm(xi), b)


def eval_tilde_symbol(xi, b: float):
    return _tilde(_norm(xi), b)


def eval_remainder_symbol(xi, b: float, paper_literal: bool = False):
    return _remainder(_norm(xi), b, paper_literal=paper_literal)


def eval_nu_symbol(xi, b: float):
    return _nu(_norm(xi), b)


def eval_dilated_symbol(xi, b: float, t: float):
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    return _dilated(_norm(xi), b, t)


def eval_analytic_family(xi, z: complex):
    if not 0 <= complex(z).real <= 1:
        raise ValueError(f"Re z must lie in [0, 1], got {z}")
    xi = np.asarray(xi, dtype=float)
    return _analytic(_norm(xi), z, xi.shape[-1])


# -- symbol specifications ----------------------------------------------------

FAMILIES = (
    "identity",
    "full_T_b",
    "tilde_T_b",
    "remainder_bar",
    "nu_b",
    "dilated_T_b_t",
    "analytic_family_z",
    "heat_p_t",
    "wave_cos",
    "wave_sinc",
    "riesz_I_alpha",
    "bessel_t",
    "lp_phi_j",
    "lp_piece",
    "lp_tilde_projector",
    "derivative_monomial_alpha",
)

_ALIASES = {
    "full": "full_T_b",
    "tilde": "tilde_T_b",
    "remainder": "remainder_bar",
    "nu": "nu_b",
    "dilated": "dilated_T_b_t",
    "analytic": "analytic_family_z",
    "heat": "heat_p_t",
    "riesz": "riesz_I_alpha",
    "bessel": "bessel_t",
    "phi_j": "lp_phi_j",
    "piece": "lp_piece",
    "derivative": "derivative_monomial_alpha",
}


@dataclass(frozen=True)
class SymbolSpec:
    """A named multiplier family plus its parameters.

    ``alpha`` is a fractional order for ``riesz_I_alpha`` / ``bessel_t`` and a
    multi-index for ``derivative_monomial_alpha``.
    """

    family: str
    b: float = 0.0
    t: float = 1.0
    z: complex = 0.0
    alpha: float | tuple[int, ...] = 0.0
    j: int = 0
    paper_literal: bool = False
    cutoff: CutoffSpec = field(default=DEFAULT_CUTOFF)

    def __post_init__(self):
        fam = _ALIASES.get(self.family, self.family)
        if fam not in FAMILIES:
            raise ValueError(f"unknown symbol family {self.family!r}")
        object.__setattr__(self, "family", fam)
        if fam in ("dilated_T_b_t", "heat_p_t", "bessel_t") and not self.t > 0:
            raise ValueError(f"{fam} needs t > 0, got {self.t}")
        if fam == "analytic_family_z" and not 0 <= complex(self.z).real <= 1:
            raise ValueError(f"Re z must lie in [0, 1], got {self.z}")
        if fam == "nu_b" and self.b < 0:
            raise ValueError("nu_b needs b >= 0")
        if fam == "derivative_monomial_alpha":
            object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))

    @property
    def radial(self) -> bool:
        return self.family != "derivative_monomial_alpha"

    def radial_values(self, k, n: int):
        """Symbol as a function of ``|xi|`` (radial families only)."""
        from . import littlewood_paley as lp

        k = np.asarray(k, dtype=float)
        f = self.family
        if f == "identity":
            return np.ones_like(k, dtype=complex)
        if f == "full_T_b":
            return _full(k, self.b)
        if f == "tilde_T_b":
            return _tilde(k, self.b, self.cutoff)
        if f == "remainder_bar":
            return _remainder(k, self.b, self.cutoff, self.paper_literal)
        if f == "nu_b":
            return _nu(k, self.b).astype(complex)
        if f == "dilated_T_b_t":
            return _dilated(k, self.b, self.t)
        if f == "analytic_family_z":
            return _analytic(k, self.z, n)
        if f == "heat_p_t":
            return np.exp(-4.0 * math.pi**2 * self.t * k * k).astype(complex)
        if f == "wave_cos":
            return np.cos(TWO_PI * self.t * k).astype(complex)
        if f == "wave_sinc":
            return _sinc(k, self.t).astype(complex)
        if f == "riesz_I_alpha":
            return _power(k, float(self.alpha)).astype(complex)
        if f == "bessel_t":
            return ((1.0 + (TWO_PI * self.t * k) ** 2) ** (-float(self.alpha) / 2.0)).astype(complex)
        if f == "lp_phi_j":
            return lp.phi_j_radial(k, self.j).astype(complex)
        if f == "lp_piece":
            return lp.phi_j_radial(k, self.j) * _tilde(k, self.b, self.cutoff)
        if f == "lp_tilde_projector":
            return lp.tilde_projector_radial(k, self.j).astype(complex)
        raise ValueError(f"{f} is not radial")

    def evaluate(self, xi):
        """Symbol at frequency vectors ``xi`` of shape ``(..., n)``."""
        xi = np.asarray(xi, dtype=float)
        if self.family == "derivative_monomial_alpha":
            return _monomial([xi[..., d] for d in range(xi.shape[-1])], self.alpha)
        return self.radial_values(_norm(xi), xi.shape[-1])

    def on_grid(self, grid: GridSpec) -> np.ndarray:
        if self.family == "derivative_monomial_alpha":
            return _monomial(grid.freqs(), self.alpha) * np.ones(grid.shape)
        return self.radial_values(grid.freq_radius, grid.n)


def _monomial(components: Sequence[np.ndarray], alpha: Sequence[int]):
    if len(alpha) != len(components):
        raise ValueError(f"multi-index {alpha} does not match dimension {len(components)}")
    out = np.array(1.0 + 0.0j)
    for comp, a in zip(components, alpha):
        if a:
            out = out * (2j * math.pi * comp) ** a
    return out


@dataclass(frozen=True)
class ProductSymbol:
    """Pointwise product of symbols."""

    factors: tuple

    def on_grid(self, grid: GridSpec) -> np.ndarray:
        out = np.ones(grid.shape, dtype=complex)
        for s in self.factors:
            out = out * s.on_grid(grid)
        return out

    def evaluate(self, xi):
        out = 1.0
        for s in self.factors:
            out = out * s.evaluate(xi)
        return out


def compose(*symbols) -> ProductSymbol:
    return ProductSymbol(tuple(symbols))


def _symbol_array(s, grid: GridSpec) -> np.ndarray:
    if isinstance(s, np.ndarray):
        arr = s
    else:
        arr = s.on_grid(grid)
    arr = np.broadcast_to(arr, grid.shape)
    bad = ~np.isfinite(arr)
    if bad.any():
        idx = tuple(int(i[0]) for i in np.nonzero(bad))
        xi = tuple(float(grid.freq_axis[i]) for i in idx)
        raise FloatingPointError(f"symbol {s!r} is not finite at xi = {xi}")
    return arr


def apply_symbol(f: Field, s) -> Field:
    """``idft(s * dft(f))``; ``s`` is a symbol object or a precomputed lattice array."""
    arr = _symbol_array(s, f.grid)
    F = dft(f)
    return idft(SpectralField(f.grid, F.coefficients * arr))


def tabulate_kernel(s, grid: GridSpec) -> Field:
    """Discrete kernel: the inverse transform of the symbol itself."""
    arr = _symbol_array(s, grid)
    return idft(SpectralField(grid, np.array(arr, dtype=complex)))
