"""Heat extensions, beta-atoms and the atom families used in the sweeps.

An atom is stored as a grid density together with its cube ``Q`` (center and
side ``ell``).  Validation measures the four defining conditions directly;
the supremum over ``t > 0`` in the heat condition is taken over a log grid.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .grid import Field, GridSpec, SpectralField, dft, idft, lp_norm
from .radial import DipoleField, RadialTransform, bump_profile
from .slopes import SlopeReport, fit_slope
from .symbols import SymbolSpec, apply_symbol

__all__ = [
    "heat_extension",
    "AtomSpec",
    "AtomValidation",
    "default_t_samples",
    "validate_atom",
    "make_dipole_atom",
    "make_shell_atom",
    "mollify",
    "HeatNormScan",
    "heat_norm_scan",
    "RadialDipole",
    "radial_dipole",
    "max_admissible_beta",
    "TOL",
]

TOL = 1e-6
SUPPORT_TOL = 1e-8
CANCEL_TOL = 1e-10
EPS_RATIO = 0.24


def _heat_multiplier(grid: GridSpec, t: float) -> np.ndarray:
    return np.exp(-4.0 * math.pi**2 * t * grid.freq_radius**2)


def heat_extension(f: Field, t: float) -> Field:
    """``p_t * f`` through the symbol ``exp(-4 pi^2 t |xi|^2)``."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    return apply_symbol(f, _heat_multiplier(f.grid, t))


@dataclass(frozen=True, eq=False)
class AtomSpec:
    """Candidate beta-atom: density on a grid plus its cube.

    ``bound_scale`` multiplies the heat bound ``ell^-beta``; it is 1 for
    atoms and ``2^beta`` for mollified ones.
    """

    field: Field
    center: tuple[float, ...]
    ell: float
    beta: float
    family: str = "custom"
    eps: float | None = None
    c: float | None = None
    bound_scale: float = 1.0
    binding: str = ""

    def __post_init__(self):
        n = self.field.grid.n
        if len(self.center) != n:
            raise ValueError(f"center must have {n} coordinates")
        if not self.ell > 0:
            raise ValueError("cube side must be positive")
        if not 0 < self.beta <= n:
            raise ValueError(f"beta must lie in (0, {n}], got {self.beta}")

    @property
    def grid(self) -> GridSpec:
        return self.field.grid

    @property
    def n(self) -> int:
        return self.grid.n

    def cube_mask(self) -> np.ndarray:
        half = 0.5 * self.ell + 1e-12 * self.ell
        mask = np.ones(self.grid.shape, dtype=bool)
        for x, c0 in zip(self.grid.coords(), self.center):
            mask = mask & (np.abs(x - c0) <= half)
        return mask

    def scaled(self, factor: float) -> "AtomSpec":
        return AtomSpec(self.field * factor, self.center, self.ell, self.beta, self.family,
                        self.eps, None if self.c is None else self.c * factor,
                        self.bound_scale, self.binding)

    def to_json(self) -> str:
        return json.dumps({"family": self.family, "center": list(self.center), "ell": self.ell,
                           "beta": self.beta, "eps": self.eps, "c": self.c,
                           "bound_scale": self.bound_scale, "grid": asdict(self.grid)},
                          sort_keys=True)


@dataclass
class AtomValidation:
    supp_ok: bool
    leakage: float
    cancel_residual: float
    heat_sup: float
    heat_bound: float
    heat_argmax_t: float
    tv_mass: float
    tol: float = TOL

    @property
    def cancel_ok(self) -> bool:
        return self.cancel_residual < CANCEL_TOL

    @property
    def heat_ok(self) -> bool:
        return self.heat_sup <= (1 + self.tol) * self.heat_bound

    @property
    def tv_ok(self) -> bool:
        return self.tv_mass <= 1 + self.tol

    @property
    def passed(self) -> bool:
        return self.supp_ok and self.cancel_ok and self.heat_ok and self.tv_ok

    def violated(self) -> list[str]:
        names = {"support": self.supp_ok, "cancellation": self.cancel_ok,
                 "heat": self.heat_ok, "total_variation": self.tv_ok}
        return [k for k, ok in names.items() if not ok]

    def to_json(self) -> str:
        d = asdict(self)
        d["passed"] = self.passed
        d["violated"] = self.violated()
        return json.dumps(d, sort_keys=True)


def default_t_samples(ell: float, count: int = 64) -> np.ndarray:
    return np.geomspace(ell**2 / 100.0, 100.0 * max(ell, 1.0) ** 2, count)


@dataclass
class _Measurements:
    leakage: float
    cancel: float
    heat_sup: float
    argmax_t: float
    tv: float


def _measure(atom: AtomSpec, t_samples) -> _Measurements:
    g = atom.grid
    vals = atom.field.values
    absval = np.abs(vals)
    leakage = float(np.sum(absval[~atom.cube_mask()]) * g.cell_volume)
    cancel = abs(atom.field.integral())
    tv = float(np.sum(absval) * g.cell_volume)
    F = dft(atom.field).coefficients
    k2 = g.freq_radius**2
    expo = 0.5 * (atom.n - atom.beta)
    best, best_t = 0.0, float(t_samples[0])
    for t in t_samples:
        u = idft(SpectralField(g, F * np.exp(-4.0 * math.pi**2 * t * k2)))
        val = t**expo * float(np.abs(u.values).max())
        if val > best:
            best, best_t = val, float(t)
    return _Measurements(leakage, cancel, best, best_t, tv)


def _validation(atom: AtomSpec, m: _Measurements, scale: float = 1.0) -> AtomValidation:
    bound = atom.bound_scale / atom.ell**atom.beta
    return AtomValidation(m.leakage * scale < SUPPORT_TOL, m.leakage * scale, m.cancel * scale,
                          m.heat_sup * scale, bound, m.argmax_t, m.tv * scale)


def validate_atom(atom: AtomSpec, t_samples=None) -> AtomValidation:
    """Measure the four atom conditions; pass/fail is part of the report."""
    ts = default_t_samples(atom.ell) if t_samples is None else np.asarray(t_samples, dtype=float)
    if ts.size == 0 or np.any(ts <= 0):
        raise ValueError("t_samples must be nonempty and positive")
    return _validation(atom, _measure(atom, ts))


def _bisect_constant(heat_unit: float, tv_unit: float, bound: float, rel: float = 1e-4):
    """Largest ``c`` with ``c*heat <= (1+TOL) bound`` and ``c*tv <= 1+TOL``.

    Both measured quantities are linear in ``c``, so the predicate is checked
    on scaled unit measurements.
    """
    def ok(c):
        return c * heat_unit <= (1 + TOL) * bound and c * tv_unit <= 1 + TOL

    caps = [v for v in (bound / heat_unit if heat_unit > 0 else math.inf,
                        1.0 / tv_unit if tv_unit > 0 else math.inf)]
    hi = 2.0 * min(caps)
    if not math.isfinite(hi):
        raise ValueError("zero density: no normalization constant to fix")
    lo = 0.0
    while hi - lo > rel * hi:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    binding = "heat" if (bound / heat_unit if heat_unit > 0 else math.inf) <= 1.0 / tv_unit else "total_variation"
    return lo, binding


def _check_cube(grid: GridSpec, ell: float, eps: float):
    if not eps < ell / 4:
        raise ValueError(f"need eps < ell/4, got eps={eps}, ell={ell}")
    if not ell <= grid.L / 4:
        raise ValueError(f"need ell <= L/4, got ell={ell}, L={grid.L}")


def _unit_bump(grid: GridSpec, center, eps: float) -> np.ndarray:
    X = grid.coords()
    r = np.sqrt(sum((x - c0) ** 2 for x, c0 in zip(X, center)))
    vals = bump_profile(r, eps, grid.n)
    return vals / (np.sum(vals) * grid.cell_volume)


def _normalized(grid, density, center, ell, beta, family, eps, t_samples) -> AtomSpec:
    unit = AtomSpec(Field(grid, density), tuple(center), ell, beta, family, eps, 1.0)
    ts = default_t_samples(ell) if t_samples is None else t_samples
    m = _measure(unit, ts)
    bound = 1.0 / ell**beta
    c, binding = _bisect_constant(m.heat_sup, m.tv, bound)
    if c <= 0:
        raise ValueError(f"no positive constant passes for {family} atom")
    return AtomSpec(Field(grid, density * c), tuple(center), ell, beta, family, eps, c,
                    1.0, binding)


def make_dipole_atom(grid: GridSpec, ell: float, beta: float, eps: float | None = None,
                     center=None, t_samples=None) -> AtomSpec:
    """``c (rho_eps(x - x1) - rho_eps(x - x2))`` with ``x1 - x2 = (ell/2) e1``."""
    eps = EPS_RATIO * ell if eps is None else eps
    _check_cube(grid, ell, eps)
    center = (0.0,) * grid.n if center is None else tuple(float(c) for c in center)
    x1 = (center[0] + ell / 4,) + center[1:]
    x2 = (center[0] - ell / 4,) + center[1:]
    dens = _unit_bump(grid, x1, eps) - _unit_bump(grid, x2, eps)
    return _normalized(grid, dens, center, ell, beta, "dipole", eps, t_samples)


def _shell_density(grid, center, ell, eps):
    X = grid.coords()
    r = np.sqrt(sum((x - c0) ** 2 for x, c0 in zip(X, center)))
    rad = ell / 4
    from .symbols import smooth_step

    shell = smooth_step(1.0 - np.abs(r - rad) / eps)
    ball = smooth_step((rad - r) / eps + 0.5)
    shell = shell / (np.sum(shell) * grid.cell_volume)
    ball = ball / (np.sum(ball) * grid.cell_volume)
    return shell - ball


def make_shell_atom(grid: GridSpec, ell: float, beta: float, eps: float | None = None,
                    center=None, t_samples=None) -> AtomSpec:
    """Mollified sphere of radius ``ell/4`` minus a ball density of equal mass."""
    eps = ell / 8 if eps is None else eps
    _check_cube(grid, ell, eps)
    center = (0.0,) * grid.n if center is None else tuple(float(c) for c in center)
    dens = _shell_density(grid, center, ell, eps)
    return _normalized(grid, dens, center, ell, beta, "shell", eps, t_samples)


def max_admissible_beta(grid: GridSpec, ell: float, eps: float, family: str = "shell",
                        t_samples=None, rel: float = 1e-4) -> float:
    """Largest beta for which the mass-normalized atom passes validation (0 if none)."""
    center = (0.0,) * grid.n
    if family == "shell":
        dens = _shell_density(grid, center, ell, eps)
    else:
        x1 = (ell / 4,) + center[1:]
        x2 = (-ell / 4,) + center[1:]
        dens = _unit_bump(grid, x1, eps) - _unit_bump(grid, x2, eps)
    dens = dens / (np.sum(np.abs(dens)) * grid.cell_volume)
    ts = default_t_samples(ell) if t_samples is None else t_samples

    def passes(beta):
        atom = AtomSpec(Field(grid, dens), center, ell, beta, family, eps, None)
        return validate_atom(atom, ts).passed

    lo, hi = 0.0, float(grid.n)
    if passes(hi):
        return hi
    while hi - lo > rel:
        mid = 0.5 * (lo + hi)
        if mid > 0 and passes(mid):
            lo = mid
        else:
            hi = mid
    return lo


def mollify(atom: AtomSpec, eps: float) -> AtomSpec:
    """``a * rho_eps`` on the doubled cube with the heat bound relaxed by ``2^beta``."""
    if not eps < atom.ell:
        raise ValueError(f"need eps < ell, got eps={eps}, ell={atom.ell}")
    g = atom.grid
    kernel = _unit_bump(g, (0.0,) * g.n, eps)
    khat = dft(Field(g, kernel)).coefficients
    out = idft(SpectralField(g, dft(atom.field).coefficients * khat))
    vals = out.values
    if np.all(np.isreal(atom.field.values)):
        vals = vals.real.astype(complex)
    return AtomSpec(Field(g, vals), atom.center, 2 * atom.ell, atom.beta, atom.family + "+mollified",
                    eps, atom.c, atom.bound_scale * 2.0**atom.beta, atom.binding)


@dataclass
class HeatNormScan:
    t: list[float]
    sup_norm: list[float]
    l1_norm: list[float]
    inf_small: SlopeReport
    inf_large: SlopeReport
    one_small: SlopeReport
    one_large: SlopeReport

    def rows(self):
        return list(zip(self.t, self.sup_norm, self.l1_norm))


def heat_norm_scan(atom: AtomSpec, t_values) -> HeatNormScan:
    """``||p_t * a||_inf`` and ``||p_t * a||_1`` across ``t``, fitted on both sides of ``ell^2``."""
    ts = np.asarray(sorted(t_values), dtype=float)
    F = dft(atom.field).coefficients
    k2 = atom.grid.freq_radius**2
    sup, one = [], []
    for t in ts:
        u = idft(SpectralField(atom.grid, F * np.exp(-4.0 * math.pi**2 * t * k2)))
        sup.append(lp_norm(u, math.inf))
        one.append(lp_norm(u, 1))
    n, beta, ell2 = atom.n, atom.beta, atom.ell**2
    small = ts < ell2
    large = ts > ell2

    def seg(mask, ys, target):
        pts = [(float(t), float(y)) for t, y, m in zip(ts, ys, mask) if m]
        return fit_slope(pts, target=target) if len(pts) >= 3 else fit_slope(pts, target=target)

    return HeatNormScan(
        ts.tolist(), sup, one,
        seg(small, sup, -(n - beta) / 2),
        seg(large, sup, -n / 2),
        seg(small, one, -(n - beta) / 2 if beta < n else 0.0),
        seg(large, one, -0.5),
    )


# -- radially represented dipoles -------------------------------------------

@dataclass
class RadialDipole:
    """Dipole atom centred at the origin, held as a radial bump plus geometry.

    Used where the sweep reaches scales that no Cartesian grid resolves.
    """

    n: int
    ell: float
    beta: float
    eps: float
    c: float
    heat_sup: float
    tv_mass: float
    binding: str
    transform: RadialTransform = field(repr=False)

    @property
    def d(self) -> float:
        return self.ell / 4

    @property
    def heat_bound(self) -> float:
        return 1.0 / self.ell**self.beta

    @property
    def passed(self) -> bool:
        return self.heat_sup <= (1 + TOL) * self.heat_bound and self.tv_mass <= 1 + TOL

    def apply(self, sym: SymbolSpec, reach: float | None = None) -> DipoleField:
        return DipoleField(self.transform.profile(sym, reach), self.c, self.d)


def radial_dipole(n: int, ell: float, beta: float | None = None, eps_ratio: float = EPS_RATIO,
                  t_samples=None, oversample: int = 24) -> RadialDipole:
    """Radial twin of :func:`make_dipole_atom` with ``c`` fixed the same way."""
    beta = float(n) if beta is None else float(beta)
    eps = eps_ratio * ell
    T = RadialTransform(n, eps, oversample)
    ts = default_t_samples(ell) if t_samples is None else t_samples
    expo = 0.5 * (n - beta)
    best = 0.0
    for t in ts:
        val = t**expo * DipoleField(T.profile(SymbolSpec("heat_p_t", t=float(t))), 1.0, ell / 4).lp_norm(math.inf)
        best = max(best, val)
    tv = 2.0  # two disjoint unit-mass bumps
    c, binding = _bisect_constant(best, tv, 1.0 / ell**beta)
    return RadialDipole(n, ell, beta, eps, c, c * best, c * tv, binding, T)
