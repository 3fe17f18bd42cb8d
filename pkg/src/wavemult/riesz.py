"""Riesz potentials by symbol and by heat quadrature, and the atom L^2 sweep."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .atoms import AtomSpec, heat_extension, make_dipole_atom
from .grid import Field, GridSpec, SpectralField, dft, idft, lp_norm
from .slopes import SlopeReport, fit_slope
from .symbols import critical_b

__all__ = [
    "NonMeanZeroWarning",
    "QuadratureError",
    "riesz_spectral",
    "HeatQuadrature",
    "RieszHeatResult",
    "riesz_heat",
    "riesz_hypothesis_ok",
    "atom_riesz_scan",
]


class NonMeanZeroWarning(UserWarning):
    pass


class QuadratureError(RuntimeError):
    pass


def _riesz_multiplier(grid: GridSpec, alpha: float) -> np.ndarray:
    k = grid.freq_radius
    with np.errstate(divide="ignore"):
        m = np.where(k > 0, (2 * math.pi * np.where(k > 0, k, 1.0)) ** (-alpha), 0.0)
    return m


def _check_mean(f: Field) -> None:
    mass = abs(f.integral())
    scale = lp_norm(f, 1)
    if scale > 0 and mass > 1e-10 * scale:
        warnings.warn(f"input is not mean-zero (|int f| = {mass:.3e}); the DC mode is dropped",
                      NonMeanZeroWarning, stacklevel=3)


def riesz_spectral(f: Field, alpha: float) -> Field:
    """``I_alpha f`` with symbol ``(2 pi |xi|)^-alpha`` and the zero mode removed."""
    if not 0 < alpha < f.grid.n:
        raise ValueError(f"need 0 < alpha < n, got {alpha}")
    _check_mean(f)
    F = dft(f).coefficients * _riesz_multiplier(f.grid, alpha)
    return idft(SpectralField(f.grid, F))


@dataclass(frozen=True)
class HeatQuadrature:
    """Log-trapezoid rule for ``int_0^inf t^(s-1) p_t * a dt`` with ``s = alpha/2``."""

    t_min: float
    t_max: float
    nodes: int = 96
    exponent: float = 0.5

    def __post_init__(self):
        if not 0 < self.t_min < self.t_max:
            raise ValueError("need 0 < t_min < t_max")
        if self.nodes < 48:
            raise ValueError(f"at least 48 nodes are required, got {self.nodes}")
        if not self.exponent > 0:
            raise ValueError("exponent must be positive")

    @classmethod
    def for_atom(cls, ell: float, grid: GridSpec, alpha: float, nodes: int = 96) -> "HeatQuadrature":
        """Interval tied to ``ell``: six decades below ``ell^2`` and past the slowest lattice mode."""
        t_min = 1e-6 * ell**2
        slowest = 4 * math.pi**2 / grid.L**2
        t_max = max(1e3 * ell**2, 60.0 / slowest)
        return cls(t_min, t_max, nodes, alpha / 2)

    def covers(self, ell: float) -> bool:
        return self.t_min < ell**2 / 100 and self.t_max > 100 * ell**2

    def rule(self):
        u = np.linspace(math.log(self.t_min), math.log(self.t_max), self.nodes)
        du = u[1] - u[0]
        w = np.full(self.nodes, du)
        w[0] = w[-1] = du / 2
        t = np.exp(u)
        return t, w * t**self.exponent

    def scalar(self, lam) -> np.ndarray:
        """The rule applied to ``exp(-lam t)``, with the small-t correction."""
        lam = np.asarray(lam, dtype=float)
        t, w = self.rule()
        s = self.exponent
        acc = np.zeros_like(lam)
        for ti, wi in zip(t, w):
            acc = acc + wi * np.exp(-lam * ti)
        return acc + self.t_min**s / s


@dataclass
class RieszHeatResult:
    field: Field
    normalization: float
    gamma_mismatch: float
    truncation_error: float


def riesz_heat(a: Field, alpha: float, quad: HeatQuadrature | None = None,
               max_truncation: float = 1e-3) -> RieszHeatResult:
    """``I_alpha a`` as ``gamma * int t^(s-1) p_t * a dt``, ``s = alpha / 2``.

    ``gamma`` is calibrated so the rule reproduces ``(2 pi |xi0|)^-alpha`` on
    the lowest lattice tone ``xi0``; its distance from ``1/Gamma(s)`` is
    reported.
    """
    g = a.grid
    if quad is None:
        quad = HeatQuadrature(1e-6 * g.h**2, 60.0 * g.L**2 / (4 * math.pi**2), 96, alpha / 2)
    s = quad.exponent
    if not math.isclose(2 * s, alpha):
        raise ValueError(f"quadrature exponent {s} does not match alpha/2 = {alpha / 2}")
    _check_mean(a)
    k0 = 1.0 / g.L
    lam0 = 4 * math.pi**2 * k0**2
    gamma = (2 * math.pi * k0) ** (-alpha) / float(quad.scalar(lam0))
    mismatch = abs(gamma * math.gamma(s) - 1.0)

    t, w = quad.rule()
    acc = np.zeros(g.shape, dtype=complex)
    tail_terms = []
    for ti, wi in zip(t, w):
        u = heat_extension(a, float(ti)).values
        acc += wi * u
        tail_terms.append(wi * math.sqrt(np.sum(np.abs(u) ** 2)))
    acc += a.values * quad.t_min**s / s
    # the lower correction assumes p_t * a = a below t_min
    low_err = quad.t_min**s / s * math.sqrt(np.sum(np.abs(heat_extension(a, quad.t_min).values - a.values) ** 2))
    q = tail_terms[-1] / tail_terms[-2] if tail_terms[-2] > 0 else 0.0
    high_err = tail_terms[-1] * q / (1 - q) if q < 1 else math.inf
    total = math.sqrt(np.sum(np.abs(acc) ** 2))
    trunc = (low_err + high_err) / total if total > 0 else 0.0
    if trunc > max_truncation:
        raise QuadratureError(f"estimated truncation error {trunc:.2e} exceeds {max_truncation:.0e}")
    # drop the zero mode the same way the spectral route does
    F = dft(Field(g, acc * gamma)).coefficients
    F[g.origin_index] = 0.0
    return RieszHeatResult(idft(SpectralField(g, F)), gamma, mismatch, trunc)


def riesz_hypothesis_ok(n: int, p, beta: float) -> bool:
    inv_p = 1.0 / float(p)
    if n >= 3:
        return beta > (n - 1) / 2 + inv_p
    return beta > 2 * inv_p


def _scaled_grid(n: int, ell: float, N: int, box: float) -> GridSpec:
    return GridSpec(n, N, box * ell)


def atom_riesz_scan(family: str, ell_values, p, beta: float, n: int, N: int | None = None,
                    box: float = 8.0, heat_check: bool = False, doubling_check: bool = False,
                    quad_nodes: int = 96) -> SlopeReport:
    """``||I_{b_p} a_ell||_2`` across ``ell``; target slope ``1/2 - 1/p``.

    Each ``ell`` gets its own grid of side ``box * ell`` so the atom is resolved
    identically at every scale.
    """
    if family != "dipole":
        raise ValueError(f"unsupported atom family {family!r}")
    if not riesz_hypothesis_ok(n, p, beta):
        raise ValueError(f"(n, p, beta) = ({n}, {p}, {beta}) is outside the lemma's hypothesis")
    ells = sorted(float(e) for e in ell_values)
    if len(ells) < 4:
        raise ValueError("need at least 4 ell values")
    N = N or (96 if n == 3 else 512)
    alpha = float(critical_b(n, p))
    rows, extra_rows = [], []
    for ell in ells:
        grid = _scaled_grid(n, ell, N, box)
        atom = make_dipole_atom(grid, ell, beta)
        I = riesz_spectral(atom.field, alpha)
        norm = lp_norm(I, 2)
        row = {"ell": ell, "norm_l2": norm, "c": atom.c}
        if heat_check:
            quad = HeatQuadrature.for_atom(ell, grid, alpha, quad_nodes)
            res = riesz_heat(atom.field, alpha, quad)
            diff = lp_norm(res.field - I, 2) / norm
            row.update(two_route=diff, gamma_mismatch=res.gamma_mismatch,
                       truncation=res.truncation_error)
        rows.append((ell, norm))
        extra_rows.append(row)
    target = 0.5 - 1.0 / float(p)
    rep = fit_slope(rows, target=target)
    extra = {"n": n, "p": str(p), "beta": beta, "alpha": alpha, "N": N, "box": box,
             "rows": extra_rows}
    if doubling_check:
        ell = ells[0]
        g1 = _scaled_grid(n, ell, N, box)
        g2 = _scaled_grid(n, ell, 2 * N, 2 * box)
        n1 = lp_norm(riesz_spectral(make_dipole_atom(g1, ell, beta).field, alpha), 2)
        n2 = lp_norm(riesz_spectral(make_dipole_atom(g2, ell, beta).field, alpha), 2)
        extra["doubling_change"] = abs(n2 - n1) / n2
    rep.extra = extra
    return rep
