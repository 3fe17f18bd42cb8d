"""Sharp maximal function on the periodic grid, its linearization, and a BMO probe.

Balls are discrete point sets under the minimal-image distance, ties on the
boundary included, and averages are plain point means.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .atoms import make_dipole_atom
from .grid import Field, GridSpec
from .slopes import band_ratio
from .symbols import RING_RADIUS, SymbolSpec, apply_symbol

__all__ = [
    "RadiusLadder",
    "ball_offsets",
    "ball_average",
    "ball_averages",
    "mean_deviation",
    "sharp_maximal",
    "sharp_maximal_table",
    "select_radii",
    "u_ell_linearization",
    "hardy_littlewood",
    "probe_sup",
    "BmoProbe",
    "bmo_probe",
]

_TIE = 1e-9


@dataclass(frozen=True)
class RadiusLadder:
    """Grid radii (multiples of ``h``) in ``[1/ell, ell]``, capped at ``L/4``."""

    grid: GridSpec
    ell: float
    radii: tuple[float, ...]

    def __post_init__(self):
        if not self.radii:
            raise ValueError(f"no grid radius lies in [1/{self.ell}, {self.ell}] below L/4")
        if list(self.radii) != sorted(self.radii):
            raise ValueError("radii must be sorted ascending")

    @classmethod
    def for_level(cls, grid: GridSpec, ell: float) -> "RadiusLadder":
        h = grid.h
        cap = min(ell, grid.L / 4)
        lo = max(1, math.ceil(1.0 / (ell * h) - _TIE))
        hi = math.floor(cap / h + _TIE)
        return cls(grid, float(ell), tuple(k * h for k in range(lo, hi + 1)))

    @classmethod
    def full(cls, grid: GridSpec) -> "RadiusLadder":
        """Every grid radius from ``h`` to ``L/4``: the artifact's ``M^#``."""
        return cls.for_level(grid, saturation_level(grid))

    @classmethod
    def geometric(cls, grid: GridSpec, ratio: float = 1.25, r_min: float | None = None,
                  r_max: float | None = None) -> "RadiusLadder":
        """Sparse ladder of grid radii growing by ``ratio``; used by the probe."""
        h = grid.h
        lo = max(1, round((r_min or h) / h))
        hi = math.floor(min(r_max or grid.L / 4, grid.L / 4) / h + _TIE)
        ks, k = [], float(lo)
        while round(k) <= hi:
            if not ks or round(k) > ks[-1]:
                ks.append(round(k))
            k *= ratio
        return cls(grid, math.inf, tuple(k * h for k in ks))

    def __len__(self) -> int:
        return len(self.radii)


def saturation_level(grid: GridSpec) -> float:
    """Smallest ``ell`` whose ladder holds every radius in ``[h, L/4]``."""
    return max(grid.L / 4, 1.0 / grid.h)


@lru_cache(maxsize=64)
def _offsets(n: int, steps: float) -> np.ndarray:
    m = int(math.floor(steps + _TIE))
    axes = np.arange(-m, m + 1)
    mesh = np.stack(np.meshgrid(*([axes] * n), indexing="ij"), axis=-1).reshape(-1, n)
    d2 = np.sum(mesh * mesh, axis=1)
    keep = d2 <= steps * steps * (1 + _TIE)
    out = mesh[keep]
    return out[np.argsort(d2[keep], kind="stable")]


def ball_offsets(grid: GridSpec, r: float) -> np.ndarray:
    """Integer offsets ``m`` with ``|m| h <= r`` (boundary ties included)."""
    if r < grid.h * (1 - _TIE):
        raise ValueError(f"radius {r} is below the grid spacing {grid.h}")
    if r > grid.L / 2:
        raise ValueError(f"radius {r} exceeds L/2 = {grid.L / 2}; balls would wrap")
    return _offsets(grid.n, r / grid.h)


def ball_average(f: Field, x, r: float) -> complex:
    """Mean of ``f`` over grid points within ``r`` of the grid point with index ``x``."""
    off = ball_offsets(f.grid, r)
    x = np.asarray(x, dtype=np.int64)
    idx = (x[None, :] + off) % f.grid.N
    center = f.values[tuple(x % f.grid.N)]
    return complex(center + np.mean(f.values[tuple(idx.T)] - center))


def _padded(values: np.ndarray, pad: int) -> np.ndarray:
    return np.pad(values, pad, mode="wrap")


def _shifted(padded: np.ndarray, pad: int, N: int, m) -> np.ndarray:
    sl = tuple(slice(pad + int(k), pad + int(k) + N) for k in m)
    return padded[sl]


def ball_averages(f: Field, r: float) -> np.ndarray:
    """Ball means at every grid point (direct sums over the offsets).

    Sums are taken relative to the centre value so constants come out exact.
    """
    off = ball_offsets(f.grid, r)
    pad = int(np.abs(off).max()) if off.size else 0
    P = _padded(f.values, pad)
    acc = np.zeros(f.grid.shape, dtype=complex)
    for m in off:
        acc += _shifted(P, pad, f.grid.N, m) - f.values
    return f.values + acc / len(off)


def mean_deviation(f: Field, r: float, center: np.ndarray | None = None) -> np.ndarray:
    """``mean_{B(x,r)} |f - A(x)|`` at every ``x``; ``A`` defaults to the ball mean."""
    off = ball_offsets(f.grid, r)
    A = ball_averages(f, r) if center is None else np.broadcast_to(center, f.grid.shape)
    pad = int(np.abs(off).max())
    P = _padded(f.values, pad)
    acc = np.zeros(f.grid.shape)
    for m in off:
        acc += np.abs(_shifted(P, pad, f.grid.N, m) - A)
    return acc / len(off)


def sharp_maximal_table(f: Field, ladder: RadiusLadder) -> np.ndarray:
    """Mean deviations stacked along a leading radius axis."""
    return np.stack([mean_deviation(f, r) for r in ladder.radii])


def sharp_maximal(f: Field, ladder: RadiusLadder) -> Field:
    """Discrete ``M^#_ell f``: the ladder maximum of the ball mean deviation."""
    return Field(f.grid, sharp_maximal_table(f, ladder).max(axis=0).astype(complex))


def select_radii(table: np.ndarray, ell: float) -> np.ndarray:
    """Index of the first radius whose deviation exceeds ``(1 - 1/ell) max``.

    Where the maximum vanishes no radius qualifies and the first is used.
    """
    M = table.max(axis=0)
    hit = table > (1.0 - 1.0 / ell) * M[None]
    first = np.argmax(hit, axis=0)
    return np.where(hit.any(axis=0), first, 0)


def u_ell_linearization(g: Field, f: Field, ell: float, ladder: RadiusLadder | None = None) -> Field:
    """``U_ell(f)(x) = mean_{B(x, r_ell(x))} (f - f_B) conj(eta_ell(x, .))``.

    ``r_ell`` and ``eta_ell`` are fixed by ``g``; ``eta`` is the unimodular
    direction of ``g - g_B`` (zero where that vanishes). The conjugate makes
    ``U_ell(g)`` the mean deviation of ``g`` for complex fields too.
    """
    if ell < 2:
        raise ValueError(f"ell must be >= 2, got {ell}")
    if f.grid != g.grid:
        raise ValueError("f and g live on different grids")
    ladder = RadiusLadder.for_level(g.grid, ell) if ladder is None else ladder
    sel = select_radii(sharp_maximal_table(g, ladder), ell)
    N = g.grid.N
    out = np.zeros(g.grid.shape, dtype=complex)
    for i, r in enumerate(ladder.radii):
        mask = sel == i
        if not mask.any():
            continue
        off = ball_offsets(g.grid, r)
        pad = int(np.abs(off).max())
        Pg, Pf = _padded(g.values, pad), _padded(f.values, pad)
        Ag, Af = ball_averages(g, r), ball_averages(f, r)
        acc = np.zeros(g.grid.shape, dtype=complex)
        for m in off:
            dg = _shifted(Pg, pad, N, m) - Ag
            mag = np.abs(dg)
            eta = np.where(mag > 0, dg / np.where(mag > 0, mag, 1.0), 0.0)
            acc += (_shifted(Pf, pad, N, m) - Af) * np.conj(eta)
        out[mask] = acc[mask] / len(off)
    return Field(g.grid, out)


def hardy_littlewood(f: Field, ladder: RadiusLadder, center: complex | None = None) -> Field:
    """Centred maximal function of ``|f - c|`` over the ladder; ``c`` defaults to the mean of ``f``."""
    c = np.mean(f.values) if center is None else center
    vals = np.stack([mean_deviation(f, r, np.asarray(c)) for r in ladder.radii]).max(axis=0)
    return Field(f.grid, vals.astype(complex))


def _point_deviation(values: np.ndarray, x: np.ndarray, off: np.ndarray) -> float:
    N = values.shape[0]
    pts = values[tuple(((x[None, :] + off) % N).T)]
    return float(np.mean(np.abs(pts - pts.mean())))


def _candidates(f: Field, count: int) -> np.ndarray:
    """Points where the field is largest, plus a stride along the first axis."""
    mag = np.abs(f.values).ravel()
    top = np.argpartition(mag, -count)[-count:]
    pts = [np.unravel_index(i, f.grid.shape) for i in top]
    mid = f.grid.N // 2
    for k in range(0, f.grid.N // 2, max(1, f.grid.N // (2 * count))):
        pts.append((mid + k,) + (mid,) * (f.grid.n - 1))
    return np.unique(np.asarray(pts, dtype=np.int64), axis=0)


def probe_sup(f: Field, ladder: RadiusLadder | None = None, count: int = 48) -> float:
    """Lower bound for ``sup_x M^# f`` from candidate points and a sparse ladder."""
    if not np.any(f.values):
        return 0.0
    ladder = RadiusLadder.geometric(f.grid) if ladder is None else ladder
    pts = _candidates(f, count)
    best = 0.0
    for r in ladder.radii:
        off = ball_offsets(f.grid, r)
        for x in pts:
            best = max(best, _point_deviation(f.values, x, off))
    return best


@dataclass
class BmoProbe:
    n: int
    b: float
    ell_ring: list[float]
    ell: list[float]
    values: list[float]
    grid: GridSpec
    extra: dict = field(default_factory=dict)

    @property
    def band_ratio(self) -> float:
        return band_ratio(self.ell, self.values) if min(self.values) > 0 else math.inf

    @property
    def max_value(self) -> float:
        return max(self.values)

    def rows(self):
        return [{"ell_ring": lr, "ell_Q": l, "probe_value": v}
                for lr, l, v in zip(self.ell_ring, self.ell, self.values)]


def bmo_probe(n: int = 2, ell_ring=(0.25, 0.5, 1.0, 2.0, 4.0), b: float | None = None,
              N: int = 2048, L: float = 3.0, beta: float | None = None,
              r_max: float = 0.3) -> BmoProbe:
    """``sup_x M^#(T~_b a)`` across dipole atoms, cube sides given in ring units.

    The default ``b = (n+1)/2`` is the endpoint order for ``L^1 -> BMO``.
    Balls stop at ``r_max``: larger ones only average the field further.
    """
    b = (n + 1) / 2 if b is None else float(b)
    beta = float(n) if beta is None else float(beta)
    grid = GridSpec(n, N, L)
    ladder = RadiusLadder.geometric(grid, r_max=r_max)
    sym = SymbolSpec("tilde_T_b", b=b)
    ells, vals = [], []
    for lr in ell_ring:
        ell = float(lr) * RING_RADIUS
        atom = make_dipole_atom(grid, ell, beta)
        vals.append(probe_sup(apply_symbol(atom.field, sym), ladder))
        ells.append(ell)
    return BmoProbe(n, b, [float(x) for x in ell_ring], ells, vals, grid,
                    {"radii": len(ladder), "beta": beta})
