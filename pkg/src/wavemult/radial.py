"""Radial multiplier engine for sweeps that a Cartesian grid cannot resolve.

A radial multiplier maps a radial bump to a radial profile ``G = m(D) rho``.
By the projection-slice theorem the projection of ``G`` onto a line has the
1-D transform ``m(|k|) rho^(k)``, so ``G`` is recovered from 1-D FFT data:

* ``n = 3``:  ``G(r) = -P'(r) / (2 pi r)``
* ``n = 2``:  ``G(r) = -(1/pi) int_0^inf P'(sqrt(r^2+u^2)) / sqrt(r^2+u^2) du``

Dipole fields ``c (G(|x-x1|) - G(|x-x2|))`` are then integrated with an
axisymmetric product rule graded towards the singular radii.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft
from scipy.interpolate import CubicSpline

from .symbols import RING_RADIUS, SymbolSpec, smooth_step

__all__ = [
    "bump_profile",
    "bump_mass_constant",
    "RadialTransform",
    "RadialProfile",
    "DipoleField",
    "graded_rule",
    "symbol_ring",
    "symbol_reach",
]

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _unit_sphere_area(n: int) -> float:
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


_MASS: dict[int, float] = {}


def bump_mass_constant(n: int) -> float:
    """``int_{R^n} S(1 - |x|) dx`` for the shared smooth-step profile."""
    if n not in _MASS:
        x, w = _gl(200)
        r = 0.5 * (x + 1.0)
        _MASS[n] = float(_unit_sphere_area(n) * np.sum(0.5 * w * smooth_step(1.0 - r) * r ** (n - 1)))
    return _MASS[n]


def bump_profile(r, eps: float, n: int):
    """Unit-mass radial bump of radius ``eps``: ``S(1 - r/eps) / (C eps^n)``."""
    r = np.asarray(r, dtype=float)
    return smooth_step(1.0 - r / eps) / (bump_mass_constant(n) * eps**n)


def graded_rule(a: float, b: float, points, h0: float, growth: float = 1.3, order: int = 8):
    """Composite Gauss-Legendre rule on ``[a, b]``.

    Panels start at width ``h0`` next to each of ``points`` and grow
    geometrically by ``growth`` towards the middle of each gap.
    """
    pts = sorted({float(a), float(b)} | {float(p) for p in points if a < p < b})
    edges = [pts[0]]
    for lo, hi in zip(pts[:-1], pts[1:]):
        left, right = [lo], [hi]
        w = h0
        while right[-1] - left[-1] > 2 * w:
            left.append(left[-1] + w)
            right.append(right[-1] - w)
            w *= growth
        edges.extend(left[1:])
        edges.extend(reversed(right))
    edges = np.asarray(edges)
    x, wt = _gl(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * wt[None, :]).ravel()
    return nodes, weights


def symbol_ring(sym) -> float | None:
    """Radius on which the kernel of ``sym`` is singular, if any."""
    if hasattr(sym, "ring_radius"):
        return sym.ring_radius
    f = sym.family
    if f in ("full_T_b", "tilde_T_b", "remainder_bar", "analytic_family_z", "lp_piece"):
        return RING_RADIUS
    if f == "dilated_T_b_t":
        return sym.t * RING_RADIUS
    if f in ("wave_cos", "wave_sinc"):
        return sym.t
    return None


def symbol_reach(sym, tail: float = 24.0) -> float:
    """Radius beyond which the kernel is negligible (exponential tails)."""
    if hasattr(sym, "reach_radius"):
        return sym.reach_radius
    f = sym.family
    ring = symbol_ring(sym) or 0.0
    if f == "heat_p_t":
        return 12.0 * math.sqrt(sym.t)
    if f in ("wave_cos", "wave_sinc"):
        return sym.t
    if f in ("dilated_T_b_t", "bessel_t"):
        return ring + tail * sym.t
    return ring + tail


# -- projections of the bump -------------------------------------------------

def _bump_projection(s, eps: float, n: int):
    """Line projection of :func:`bump_profile` at offsets ``s``."""
    s = np.abs(np.asarray(s, dtype=float))
    out = np.zeros_like(s)
    inside = s < eps
    if not inside.any():
        return out
    x, w = _gl(64)
    sv = s[inside] / eps
    if n == 3:
        # 2 pi int_s^1 rho(r) r dr, in units of eps
        lo = sv[:, None]
        r = lo + (1.0 - lo) * 0.5 * (x[None, :] + 1.0)
        vals = smooth_step(1.0 - r) * r
        integ = 0.5 * (1.0 - sv) * np.sum(w[None, :] * vals, axis=1)
        out[inside] = 2 * math.pi * integ / (bump_mass_constant(3) * eps)
    elif n == 2:
        # 2 int_0^sqrt(1-s^2) rho(sqrt(s^2+u^2)) du
        top = np.sqrt(1.0 - sv * sv)[:, None]
        u = top * 0.5 * (x[None, :] + 1.0)
        vals = smooth_step(1.0 - np.sqrt(sv[:, None] ** 2 + u * u))
        integ = 0.5 * top[:, 0] * np.sum(w[None, :] * vals, axis=1)
        out[inside] = 2 * integ / (bump_mass_constant(2) * eps)
    else:
        raise ValueError(f"dimension must be 2 or 3, got {n}")
    return out


def _lagrange6(table: np.ndarray, step: float, x: np.ndarray, deriv_parity: int):
    """Six-point Lagrange interpolation on ``table[i] = f(i * step)``, ``x >= 0``.

    ``deriv_parity`` = +1 (even) or -1 (odd) extends the table to negative
    indices by symmetry.
    """
    x = np.asarray(x, dtype=float)
    u = x / step
    i0 = np.floor(u).astype(np.int64) - 2
    frac = u - (i0 + 2)
    out = np.zeros_like(u)
    nodes = np.arange(6)
    M = table.size
    for k in range(6):
        idx = i0 + k
        neg = idx < 0
        vals = np.where(idx >= M, 0.0, table[np.clip(np.abs(idx), 0, M - 1)])
        vals = np.where(neg, deriv_parity * vals, vals)
        # Lagrange basis at frac relative to node offsets -2..3
        basis = np.ones_like(u)
        for m in range(6):
            if m != k:
                basis *= (frac - (nodes[m] - 2)) / (k - m)
        out += basis * vals
    return out


@dataclass(frozen=True)
class RadialProfile:
    """``G = m(D) rho_eps`` sampled through its projection derivative."""

    n: int
    eps: float
    symbol: SymbolSpec
    ds: float
    dproj: np.ndarray  # P'(i ds), complex, i = 0..M-1
    reach: float
    ring: float | None
    scale: float = 0.0
    _spline: object = field(default=None, repr=False, compare=False)

    def _dP(self, s):
        re = _lagrange6(self.dproj.real, self.ds, s, -1)
        im = _lagrange6(self.dproj.imag, self.ds, s, -1)
        return re + 1j * im

    def __call__(self, r):
        r = np.abs(np.asarray(r, dtype=float))
        if self.n == 3:
            small = r < 0.5 * self.ds
            safe = np.where(small, 1.0, r)
            val = -self._dP(safe) / (2 * math.pi * safe)
            if small.any():
                d2 = (self._dP(np.array([self.ds])) / self.ds)[0]
                val = np.where(small, -d2 / (2 * math.pi), val)
            return np.where(r <= self.reach, val, 0.0)
        spl = self._spline
        return np.where(r <= self.reach, spl(r), 0.0)

    def special_radii(self) -> list[float]:
        w = self.scale or self.eps
        pts = [0.0, w]
        if self.ring:
            pts += [self.ring - w, self.ring, self.ring + w]
        return [p for p in pts if p >= 0]


class RadialTransform:
    """Builds :class:`RadialProfile` objects for a fixed bump ``rho_eps``."""

    def __init__(self, n: int, eps: float, oversample: int = 24):
        if n not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {n}")
        if not eps > 0:
            raise ValueError("eps must be positive")
        self.n = n
        self.eps = float(eps)
        self.ds = self.eps / oversample

    def feature_scale(self, sym: SymbolSpec) -> float:
        """Smallest length on which ``m(D) rho_eps`` varies."""
        if getattr(sym, "family", None) == "heat_p_t":
            return max(self.eps, math.sqrt(sym.t))
        return self.eps

    def profile(self, sym, reach: float | None = None) -> RadialProfile:
        """``sym`` is a :class:`SymbolSpec` or any object with ``radial_values``."""
        reach = symbol_reach(sym) if reach is None else reach
        # the bump widens the kernel support by eps
        reach = max(reach, 4 * self.eps) + self.eps
        scale = self.feature_scale(sym)
        ds = scale * (self.ds / self.eps)
        R = reach + 8 * scale
        M = int(sfft.next_fast_len(int(math.ceil(2 * R / ds)), real=False))
        M += M % 2
        k = np.fft.fftfreq(M, ds)
        if ds == self.ds:
            idx = np.fft.fftfreq(M, 1.0 / M)
            Phat = sfft.fft(_bump_projection(idx * ds, self.eps, self.n)) * ds
        else:
            Phat = self.projection_spectrum(np.abs(k))
        m = np.asarray(sym.radial_values(np.abs(k), self.n), dtype=complex)
        dP = sfft.ifft(Phat * m * (2j * math.pi * k)) / ds
        half = np.ascontiguousarray(dP[: M // 2])
        prof = RadialProfile(self.n, self.eps, sym, ds, half, reach, symbol_ring(sym), scale)
        if self.n == 2:
            object.__setattr__(prof, "_spline", self._abel_spline(prof))
        return prof

    def projection_spectrum(self, k):
        """``rho^(|k|)`` by a direct cosine sum over the fine projection samples."""
        nfine = int(math.ceil(self.eps / self.ds))
        s = np.arange(-nfine, nfine + 1) * self.ds
        P = _bump_projection(s, self.eps, self.n)
        k = np.asarray(k, dtype=float)
        out = np.empty(k.shape)
        flat, res = k.ravel(), out.ravel()
        for start in range(0, flat.size, 1 << 16):
            kk = flat[start:start + (1 << 16)]
            res[start:start + kk.size] = np.cos(2 * math.pi * np.outer(kk, s)) @ P * self.ds
        return out

    def _abel_spline(self, prof: RadialProfile):
        eps = prof.scale or self.eps
        sp = prof.special_radii()
        rnodes, _ = graded_rule(0.0, prof.reach, sp, eps / 16, growth=1.1, order=2)
        rnodes = np.concatenate([[0.0], rnodes, [prof.reach]])
        G = np.empty(rnodes.size, dtype=complex)
        U = prof.reach + 8 * eps
        for i, r in enumerate(rnodes):
            brk = [math.sqrt(max(s * s - r * r, 0.0)) for s in sp if s > r]
            if r > 0:
                brk.append(0.0)
            umax = math.sqrt(max(U * U - r * r, 0.0))
            u, w = graded_rule(0.0, umax, brk, eps / 8, growth=1.3, order=8)
            sv = np.sqrt(r * r + u * u)
            dP = prof._dP(sv)
            with np.errstate(invalid="ignore", divide="ignore"):
                q = np.where(sv > 0, dP / np.where(sv > 0, sv, 1.0), 0.0)
            if r == 0:
                # P'(s)/s -> P''(0) as s -> 0
                q = np.where(sv > 0, q, prof._dP(np.array([prof.ds]))[0] / prof.ds)
            G[i] = -np.sum(w * q) / math.pi
        return CubicSpline(rnodes, G)


@dataclass
class DipoleField:
    """``c (G(|x - d e1|) - G(|x + d e1|))`` for a radial profile ``G``."""

    profile: RadialProfile
    c: float
    d: float
    angular_order: int = 96

    @property
    def n(self) -> int:
        return self.profile.n

    def values(self, R, cos_theta):
        R = np.asarray(R, dtype=float)
        ct = np.asarray(cos_theta, dtype=float)
        base = R * R + self.d * self.d
        r1 = np.sqrt(np.maximum(base - 2 * R * self.d * ct, 0.0))
        r2 = np.sqrt(np.maximum(base + 2 * R * self.d * ct, 0.0))
        return self.c * (self.profile(r1) - self.profile(r2))

    def on_axis(self, x):
        x = np.asarray(x, dtype=float)
        return self.c * (self.profile(np.abs(x - self.d)) - self.profile(np.abs(x + self.d)))

    def _rules(self, r_lo, r_hi, extra=()):
        prof = self.profile
        eps = prof.scale or prof.eps
        pts = {0.0, self.d, eps, self.d + eps, *extra}
        if prof.ring:
            for s in (prof.ring - self.d - eps, prof.ring - self.d, prof.ring,
                      prof.ring + self.d, prof.ring + self.d + eps):
                pts.add(max(s, 0.0))
        top = prof.reach + self.d + eps
        hi = min(r_hi, top)
        if hi <= r_lo:
            return None
        R, wR = graded_rule(r_lo, hi, pts, eps / 4, growth=1.25, order=8)
        x, wx = _gl(self.angular_order)
        if self.n == 3:
            # cos(theta) in [0, 1]; the other half mirrors by antisymmetry
            ct = 0.5 * (x + 1.0)
            wa = 0.5 * wx * 2.0 * 2 * math.pi
            wr = wR * R * R
        else:
            th = 0.25 * math.pi * (x + 1.0)
            ct = np.cos(th)
            wa = 0.25 * math.pi * wx * 4.0
            wr = wR * R
        return R, wr, ct, wa

    def lp_norm(self, p, r_lo: float = 0.0, r_hi: float = math.inf) -> float:
        p = float(p)
        rules = self._rules(r_lo, r_hi)
        if rules is None:
            return 0.0
        R, wr, ct, wa = rules
        total = 0.0
        peak = 0.0
        for start in range(0, R.size, 512):
            sl = slice(start, start + 512)
            v = np.abs(self.values(R[sl, None], ct[None, :]))
            if math.isinf(p):
                peak = max(peak, float(v.max()))
            else:
                total += float(np.einsum("i,ij,j->", wr[sl], v**p, wa))
        if math.isinf(p):
            return peak
        return total ** (1.0 / p)

    def lp_power(self, p, r_lo: float = 0.0, r_hi: float = math.inf) -> float:
        return self.lp_norm(p, r_lo, r_hi) ** float(p)

    def region_powers(self, p, edges) -> tuple[list[float], float]:
        """``int |u|^p`` over the shells ``edges[i] <= |x| < edges[i+1]``, and their sum.

        One rule with every edge as a breakpoint serves all shells, so the
        shell values add up to the returned total.
        """
        p = float(p)
        edges = [float(e) for e in edges]
        inner = [e for e in edges[1:-1] if math.isfinite(e)]
        rules = self._rules(edges[0], edges[-1], inner)
        if rules is None:
            return [0.0] * (len(edges) - 1), 0.0
        R, wr, ct, wa = rules
        dens = np.empty(R.size)
        for start in range(0, R.size, 512):
            sl = slice(start, start + 512)
            v = np.abs(self.values(R[sl, None], ct[None, :]))
            dens[sl] = wr[sl] * (v**p @ wa)
        which = np.searchsorted(np.asarray(inner), R, side="right")
        parts = [float(np.sum(dens[which == i])) for i in range(len(edges) - 1)]
        return parts, float(np.sum(dens))
