"""Periodic sampling grids, the discrete Fourier transform and L^p quadrature.

The continuum transform ``f^(xi) = int f(x) exp(-2 pi i xi.x) dx`` is modelled on
a torus of side ``L`` sampled at ``N`` points per axis.  Both lattices are
stored *centered*:

* space:      ``x_k  = k * h``  for ``k in [-N/2, N/2)``, ``h = L / N``
* frequency:  ``xi_m = m / L``  for ``m in [-N/2, N/2)``

Array index ``i`` along an axis corresponds to ``k = i - N/2`` (likewise for
``m``), so the origin and the DC mode both live at index ``N/2``.  This is the
only place the shift convention is spelled out; everything else goes through
:func:`dft` / :func:`idft`.
"""
from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.fft as sfft

__all__ = [
    "GridSpec",
    "Field",
    "SpectralField",
    "RegionNorm",
    "dft",
    "idft",
    "lp_norm",
    "lp_norm_region",
    "write_binary",
    "read_binary",
    "write_csv",
]


@dataclass(frozen=True)
class GridSpec:
    """Origin-centered periodic grid in dimension ``n`` (2 or 3)."""

    n: int
    N: int
    L: float

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.n}")
        if self.N < 8 or self.N % 2:
            raise ValueError(f"N must be even and >= 8, got {self.N}")
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    @property
    def nyquist(self) -> float:
        """Radius of the largest ball inscribed in the frequency box."""
        return self.N / (2 * self.L)

    @cached_property
    def axis(self) -> np.ndarray:
        return (np.arange(self.N) - self.N // 2) * self.h

    @cached_property
    def freq_axis(self) -> np.ndarray:
        return (np.arange(self.N) - self.N // 2) / self.L

    def coords(self) -> list[np.ndarray]:
        """Open-mesh spatial coordinates, one broadcastable array per axis."""
        return _open_mesh(self.axis, self.n)

    def freqs(self) -> list[np.ndarray]:
        return _open_mesh(self.freq_axis, self.n)

    @cached_property
    def radius(self) -> np.ndarray:
        return _radius(self.axis, self.n)

    @cached_property
    def freq_radius(self) -> np.ndarray:
        return _radius(self.freq_axis, self.n)

    @property
    def origin_index(self) -> tuple[int, ...]:
        return (self.N // 2,) * self.n

    def boundary_mask(self, width: int = 1) -> np.ndarray:
        """Points within ``width`` cells of the box faces."""
        idx = np.arange(self.N)
        edge = (idx < width) | (idx >= self.N - width)
        mask = np.zeros(self.shape, dtype=bool)
        for ax, e in enumerate(_open_mesh(edge, self.n)):
            mask |= e
        return mask

    def zeros(self) -> "Field":
        return Field(self, np.zeros(self.shape, dtype=complex))

    def field(self, values) -> "Field":
        return Field(self, np.asarray(values, dtype=complex))


def _open_mesh(axis: np.ndarray, n: int) -> list[np.ndarray]:
    out = []
    for d in range(n):
        shape = [1] * n
        shape[d] = axis.size
        out.append(axis.reshape(shape))
    return out


def _radius(axis: np.ndarray, n: int) -> np.ndarray:
    sq = axis**2
    r2 = sum(_open_mesh(sq, n))
    return np.sqrt(r2)


@dataclass(frozen=True, eq=False)
class Field:
    """Complex samples of a function on a :class:`GridSpec`."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != self.grid.shape:
            raise ValueError(f"expected shape {self.grid.shape}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite samples")
        if v.dtype != complex:
            object.__setattr__(self, "values", v.astype(complex))

    def __add__(self, other: "Field") -> "Field":
        _same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, c) -> "Field":
        return Field(self.grid, self.values * c)

    __rmul__ = __mul__

    def integral(self) -> complex:
        return complex(np.sum(self.values) * self.grid.cell_volume)

    def at_origin(self) -> complex:
        return complex(self.values[self.grid.origin_index])


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Coefficients on the centered frequency lattice of ``grid``."""

    grid: GridSpec
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients)
        if c.shape != self.grid.shape:
            raise ValueError(f"expected shape {self.grid.shape}, got {c.shape}")


def _same_grid(a: Field, b: Field) -> None:
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")


def dft(f: Field) -> SpectralField:
    """Riemann-sum transform ``h^n sum_k f(x_k) exp(-2 pi i xi_m . x_k)``."""
    g = f.grid
    axes = tuple(range(g.n))
    coeffs = sfft.fftshift(sfft.fftn(sfft.ifftshift(f.values, axes=axes), axes=axes), axes=axes)
    coeffs *= g.cell_volume
    return SpectralField(g, coeffs)


def idft(F: SpectralField) -> Field:
    """Inverse of :func:`dft`: lattice Riemann sum with cell volume ``L^-n``."""
    g = F.grid
    axes = tuple(range(g.n))
    vals = sfft.fftshift(sfft.ifftn(sfft.ifftshift(F.coefficients, axes=axes), axes=axes), axes=axes)
    # ifftn carries 1/N^n; the Riemann sum wants L^-n, and (N/L)^n = h^-n.
    vals /= g.cell_volume
    return Field(g, vals)


def _check_p(p) -> float:
    p = float(p)
    if not p >= 1:
        raise ValueError(f"exponent p must be >= 1 (or inf), got {p}")
    return p


def _lp(values: np.ndarray, p: float, cell: float) -> float:
    a = np.abs(values)
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    if p == 1:
        return float(np.sum(a) * cell)
    if p == 2:
        return float(math.sqrt(np.sum(a * a) * cell))
    m = a.max()
    if m == 0:
        return 0.0
    # scale by the max so large p does not overflow
    return float(m * (np.sum((a / m) ** p) * cell) ** (1.0 / p))


def lp_norm(f: Field, p) -> float:
    """Midpoint-rule ``||f||_{L^p}`` over the periodic box."""
    return _lp(f.values.ravel(), _check_p(p), f.grid.cell_volume)


class RegionNorm(NamedTuple):
    value: float
    npoints: int

    @property
    def empty(self) -> bool:
        return self.npoints == 0


def lp_norm_region(f: Field, p, r_lo: float, r_hi: float) -> RegionNorm:
    """L^p quadrature restricted to the annulus ``r_lo <= |x| <= r_hi``."""
    if not 0 <= r_lo <= r_hi:
        raise ValueError(f"need 0 <= r_lo <= r_hi, got {r_lo}, {r_hi}")
    r = f.grid.radius
    mask = (r >= r_lo) & (r <= r_hi)
    vals = f.values[mask]
    return RegionNorm(_lp(vals, _check_p(p), f.grid.cell_volume), int(vals.size))


# -- serialization -----------------------------------------------------------

_HEADER = struct.Struct("<qqd")


def write_binary(f: Field, path) -> None:
    """Flat little-endian layout: header (n, N, L) then N^n (re, im) pairs."""
    g = f.grid
    pairs = np.empty(f.values.shape + (2,), dtype="<f8")
    pairs[..., 0] = f.values.real
    pairs[..., 1] = f.values.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(g.n, g.N, g.L))
        fh.write(np.ascontiguousarray(pairs).tobytes(order="C"))


def read_binary(path) -> Field:
    raw = Path(path).read_bytes()
    n, N, L = _HEADER.unpack_from(raw, 0)
    g = GridSpec(int(n), int(N), float(L))
    pairs = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if pairs.size != 2 * g.size:
        raise ValueError(f"payload has {pairs.size // 2} samples, header implies {g.size}")
    pairs = pairs.reshape(g.shape + (2,))
    return Field(g, pairs[..., 0] + 1j * pairs[..., 1])


def write_csv(f: Field, path, max_points: int = 1 << 16) -> None:
    """Columns ``x1..xn, re, im``; refuses large grids."""
    g = f.grid
    if g.size > max_points:
        raise ValueError(f"grid has {g.size} points; CSV export is capped at {max_points}")
    mesh = np.meshgrid(*([g.axis] * g.n), indexing="ij")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{d + 1}" for d in range(g.n)] + ["re", "im"])
        for idx in np.ndindex(*g.shape):
            v = f.values[idx]
            w.writerow([repr(float(m[idx])) for m in mesh] + [repr(float(v.real)), repr(float(v.imag))])
