"""Named experiments, their configuration, and report emission.

Each experiment maps an :class:`ExperimentConfig` to an
:class:`ExperimentReport`.  Reports carry a list of checks; gating checks
decide ``passed``, informational ones are recorded alongside.  Lengths in the
geometry experiments are quoted in ring units (multiples of ``RING_RADIUS``,
the radius of the kernels' singular sphere).
"""
from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
import tempfile
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .atoms import (default_t_samples, heat_norm_scan, make_dipole_atom, mollify, radial_dipole,
                    validate_atom)
from .grid import Field, GridSpec, SpectralField, dft, idft, lp_norm
from .littlewood_paley import kernel_norm_scan, kernel_norm_target, phi_j_radial
from .maximal import (RadiusLadder, bmo_probe, hardy_littlewood, probe_sup, sharp_maximal,
                      u_ell_linearization)
from .radial import RadialTransform
from .riesz import atom_riesz_scan
from .slopes import band_ratio, fit_slope
from .symbols import RING_RADIUS, SymbolSpec, apply_symbol, critical_b, tabulate_kernel
from .wave import (CauchyData, cauchy_decay_scan, dilated_multiplier_scan, dual_exponent_ratio,
                   kirchhoff_radial, leakage_fraction, propagate, radial_bump, wave_energy,
                   wave_solution)

__all__ = [
    "ExperimentConfig",
    "Check",
    "ExperimentReport",
    "EXPERIMENTS",
    "ANCHORS",
    "parse_p",
    "load_configs",
    "run_experiment",
    "run_all",
    "large_cube_exponent",
]


# -- configuration ------------------------------------------------------------

def parse_p(value) -> Fraction | float:
    """``"3/2"`` -> ``Fraction(3, 2)``, ``"inf"`` -> ``math.inf``."""
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, float):
        return value if math.isinf(value) else Fraction(value).limit_denominator(10**6)
    text = str(value).strip().lower()
    if text in ("inf", "infinity", "oo"):
        return math.inf
    return Fraction(text)


def _parse_list(value) -> tuple[float, ...] | None:
    if value is None:
        return None
    if isinstance(value, str):
        items = [v for v in value.replace(";", ",").split(",") if v.strip()]
        return tuple(float(Fraction(v.strip())) for v in items)
    return tuple(float(v) for v in value)


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters for one experiment run.

    ``b`` is derived as ``b_p`` unless given explicitly; ``ells`` and ``ts``
    are sweeps (``ells`` in ring units for the geometry experiments).
    Unset fields fall back to the experiment's defaults.
    """

    experiment: str
    n: int | None = None
    N: int | None = None
    L: float | None = None
    p: Fraction | float | None = None
    b: float | None = None
    beta: float | None = None
    family: str = "dipole"
    ells: tuple[float, ...] | None = None
    ts: tuple[float, ...] | None = None
    out: Path | None = None
    seed: int = 0
    band_max: float = 10.0

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.p is not None:
            object.__setattr__(self, "p", parse_p(self.p))
        for name in ("ells", "ts"):
            val = getattr(self, name)
            if val is not None:
                val = _parse_list(val)
                if not val:
                    raise ValueError(f"{name} sweep is empty")
                object.__setattr__(self, name, val)

    def b_value(self, n: int | None = None, p=None) -> float:
        """The explicit ``b`` if set, else ``b_p``."""
        if self.b is not None:
            return float(self.b)
        n = self.n if n is None else n
        p = self.p if p is None else p
        if n is None or p is None:
            raise ValueError("b is free: set p (b defaults to b_p) or b")
        return float(critical_b(n, p))

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def load_configs(path) -> list[ExperimentConfig]:
    """Read an INI file: one section per run.

    The section name is the experiment unless an ``experiment`` key is
    present, so one file can hold several runs of the same experiment.
    """
    parser = configparser.ConfigParser()
    parser.optionxform = str
    with open(path) as fh:
        parser.read_file(fh)
    out = []
    for section in parser.sections():
        s = parser[section]
        kw = {"experiment": s.get("experiment", section)}
        for key, conv in (("n", int), ("N", int), ("L", float), ("b", float), ("beta", float),
                          ("seed", int), ("band_max", float)):
            if key in s:
                kw[key] = conv(s[key])
        for key in ("p", "family", "ells", "ts"):
            if key in s:
                kw[key] = s[key]
        if "out" in s:
            kw["out"] = Path(s["out"])
        out.append(ExperimentConfig(**kw))
    return out


# -- reports -------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    value: float | None = None
    threshold: str = ""
    gating: bool = True
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        if not self.gating:
            tag = "info-" + tag.lower()
        val = "" if self.value is None else f" value={self.value:.6g}"
        thr = f" ({self.threshold})" if self.threshold else ""
        return f"[{tag}] {self.name}{val}{thr}"


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (np.floating, np.integer)):
        return repr(v.item())
    return str(v)


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        obj = obj.item()
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


@dataclass
class ExperimentReport:
    experiment: str
    paper_anchor: str
    checks: list[Check] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    columns: list[str] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.gating)

    @property
    def schema(self) -> str:
        return f"wavemult.{self.experiment}/1 columns={','.join(self.columns)}"

    def add(self, name, passed, value=None, threshold="", gating=True, detail="") -> Check:
        c = Check(name, bool(passed), None if value is None else float(value), threshold, gating, detail)
        self.checks.append(c)
        return c

    def summary(self) -> dict:
        return _json_safe({
            "experiment": self.experiment,
            "paper_anchor": self.paper_anchor,
            "pass": self.passed,
            "metrics": self.metrics,
            "checks": [c.__dict__ for c in self.checks],
            "version": __version__,
        })

    def csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema: {self.schema}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(row.get(c, "")) for c in self.columns])
        return buf.getvalue()

    def write(self, out_dir) -> tuple[Path, Path]:
        out_dir = Path(out_dir)
        csv_path = out_dir / f"{self.experiment}.csv"
        json_path = out_dir / f"{self.experiment}.json"
        _atomic_write(csv_path, self.csv_text())
        _atomic_write(json_path, json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")
        return csv_path, json_path

    def lines(self) -> list[str]:
        head = f"{self.experiment}: {'PASS' if self.passed else 'FAIL'} [{self.paper_anchor}]"
        return [head] + ["  " + c.line() for c in self.checks]


ANCHORS = {
    "transform-check": "Fourier transform convention (notation)",
    "partition-check": "partition of unity",
    "decomposition-check": "Decomposition-operator",
    "lp-kernel-scan": "Lemma kerne--esti-1",
    "kernel-profile": "Prop. wave-ker-esti",
    "atom-validate": "Definition beta-atom; Prop. smooth_atoms",
    "heat-norm-scan": "Lemma Riesz-potential-esti (recalled heat estimates)",
    "riesz-scan": "Lemma Riesz-potential-esti; Lemma Riesz-potential-esti-n=2",
    "wave-decay": "Section 1.2 Cauchy problem estimate",
    "dilated-scan": "Section 1.2 scaling of T_b^t",
    "region-norms": "Lemma lemma-small-cubes",
    "dyadic-split": "Lemma LP-arguments",
    "uniform-bound": "Thm-p-bigger-2; Thm-p-less-2; Thm-p-less-2-2",
    "bmo-probe": "Prop. prop-BMO-gamma-1",
    "sharp-maximal-convergence": "Lemma pointwise_approximation",
}


def _ring(x) -> float:
    return float(x) * RING_RADIUS


def _slope_check(rep: ExperimentReport, name: str, slope_report, tol: float, gating=True):
    ok = slope_report.valid and slope_report.error <= tol
    return rep.add(name, ok, slope_report.slope, f"target {slope_report.target:+.4g} +/- {tol}", gating)


# -- transform layer ------------------------------------------------------------

def run_transform_check(cfg: ExperimentConfig) -> ExperimentReport:
    n, N, L = cfg.n or 2, cfg.N or 256, cfg.L or 16.0
    grid = GridSpec(n, N, L)
    rng = np.random.default_rng(cfg.seed)
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment],
                           columns=["field", "plancherel", "inversion", "translation"])
    worst = {"plancherel": 0.0, "inversion": 0.0, "translation": 0.0}
    xi = grid.freqs()
    for i in range(20):
        vals = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        f = Field(grid, vals)
        F = dft(f).coefficients
        space = grid.cell_volume * np.sum(np.abs(vals) ** 2)
        freq = np.sum(np.abs(F) ** 2) / L**n
        pl = abs(space - freq) / space
        inv = float(np.max(np.abs(idft(SpectralField(grid, F)).values - vals)) / np.max(np.abs(vals)))
        shift = rng.integers(-N // 4, N // 4, size=n)
        moved = np.roll(vals, tuple(int(s) for s in shift), axis=tuple(range(n)))
        phase = np.exp(-2j * math.pi * sum(x * (int(s) * grid.h) for x, s in zip(xi, shift)))
        tr = float(np.max(np.abs(dft(Field(grid, moved)).coefficients - phase * F)) / np.max(np.abs(F)))
        rep.rows.append({"field": i, "plancherel": pl, "inversion": inv, "translation": tr})
        worst["plancherel"] = max(worst["plancherel"], pl)
        worst["inversion"] = max(worst["inversion"], inv)
        worst["translation"] = max(worst["translation"], tr)
    gauss = Field(grid, np.exp(-math.pi * grid.radius**2).astype(complex))
    gerr = float(np.max(np.abs(dft(gauss).coefficients - np.exp(-math.pi * grid.freq_radius**2))))
    for key, val in worst.items():
        rep.add(key, val < 1e-10, val, "< 1e-10 relative")
    rep.add("gaussian self-duality", gerr < 1e-10, gerr, "< 1e-10")
    rep.metrics = {**worst, "gaussian": gerr, "n": n, "N": N, "L": L, "seed": cfg.seed}
    return rep


def run_partition_check(cfg: ExperimentConfig) -> ExperimentReport:
    n, N, L = cfg.n or 2, cfg.N or 512, cfg.L or 16.0
    grid = GridSpec(n, N, L)
    k = grid.freq_radius
    nz = k > 0
    j_lo = math.floor(math.log2(k[nz].min())) - 2
    j_hi = math.ceil(math.log2(k.max())) + 2
    total = np.zeros(grid.shape)
    for j in range(j_lo, j_hi + 1):
        total += phi_j_radial(k, j)
    dev = float(np.max(np.abs(total[nz] - 1.0)))
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment], columns=["j_lo", "j_hi", "max_deviation"])
    rep.rows.append({"j_lo": j_lo, "j_hi": j_hi, "max_deviation": dev})
    rep.add("sum_j phi_j = 1 off the origin", dev < 1e-10, dev, "< 1e-10")
    rep.metrics = {"max_deviation": dev, "j_range": [j_lo, j_hi], "n": n, "N": N, "L": L}
    return rep


def run_decomposition_check(cfg: ExperimentConfig) -> ExperimentReport:
    n, N, L = cfg.n or 2, cfg.N or 512, cfg.L or 16.0
    grid = GridSpec(n, N, L)
    bs = (cfg.b,) if cfg.b is not None else (0.5, 1.0, 1.5, 2.0)
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment],
                           columns=["b", "residual", "paper_literal_residual"])
    for b in bs:
        full = SymbolSpec("full_T_b", b=b).on_grid(grid)
        nu_tilde = SymbolSpec("nu_b", b=b).on_grid(grid) * SymbolSpec("tilde_T_b", b=b).on_grid(grid)
        rem = SymbolSpec("remainder_bar", b=b).on_grid(grid)
        lit = SymbolSpec("remainder_bar", b=b, paper_literal=True).on_grid(grid)
        res = float(np.max(np.abs(full - rem - nu_tilde)))
        res_lit = float(np.max(np.abs(full - lit - nu_tilde)))
        rep.rows.append({"b": b, "residual": res, "paper_literal_residual": res_lit})
        rep.add(f"b={b}: T_b = Tbar_b + nu_b T~_b", res < 1e-12, res, "< 1e-12")
        rep.add(f"b={b}: literal remainder residual (expected nonzero)", res_lit > 1e-6, res_lit,
                "reported", gating=False)
    rep.metrics = {"rows": rep.rows}
    return rep


# -- kernels ---------------------------------------------------------------------

LP_CASES = ((1, 0.0, ()), (2, 0.0, ()), (math.inf, 1.0, ()), (2, 0.0, (1, 0)))


def run_lp_kernel_scan(cfg: ExperimentConfig) -> ExperimentReport:
    N, L = cfg.N or 1024, cfg.L or 1.6
    grid = GridSpec(2, N, L)
    js = range(2, 8)
    cases = LP_CASES
    if cfg.p is not None:
        cases = ((cfg.p, cfg.b or 0.0, ()),)
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment],
                           columns=["q", "b", "alpha", "j", "norm", "log2_norm"])
    fits = {}
    for q, b, alpha in cases:
        r = kernel_norm_scan(js, q, b, alpha, grid)
        label = f"q={q}, b={b}, alpha={list(alpha) or 0}"
        for j, y in zip(js, r.ordinates):
            rep.rows.append({"q": q, "b": b, "alpha": "".join(map(str, alpha)) or "0", "j": j,
                             "norm": y, "log2_norm": math.log2(y)})
        rep.add(f"slope {label}", r.valid and r.error <= 0.15, r.slope,
                f"target {r.target:+.4g} +/- 0.15")
        fits[label] = r.summary()
    rep.metrics = {"fits": fits, "N": N, "L": L}
    return rep


def run_kernel_profile(cfg: ExperimentConfig) -> ExperimentReport:
    """Axis profile of the kernel of ``T~_b`` against ``|1 - |x||^(b - (n+1)/2)``."""
    n, N = cfg.n or 2, cfg.N or 1024
    L = cfg.L or 16 * RING_RADIUS
    b = cfg.b if cfg.b is not None else 1.0
    grid = GridSpec(n, N, L)
    K = np.abs(tabulate_kernel(SymbolSpec("tilde_T_b", b=b), grid).values)
    mid = N // 2
    prof = K[(slice(mid, None),) + (mid,) * (n - 1)]
    rr = grid.axis[mid:] / RING_RADIUS
    h = grid.h / RING_RADIUS
    d = np.abs(1.0 - rr)
    window = (d > 4 * h) & (d < 0.3)
    target = b - (n + 1) / 2
    inner = fit_slope(zip(d[window & (rr < 1)], prof[window & (rr < 1)]), target=target)
    outer = fit_slope(zip(d[window & (rr > 1)], prof[window & (rr > 1)]), target=target)
    pooled = fit_slope(zip(d[window], prof[window]), target=target)
    far_mask = (rr >= 3) & (rr <= 6)
    far = fit_slope(zip(rr[far_mask], prof[far_mask]))
    radius = grid.radius / RING_RADIUS
    focus = float(K[(radius >= 0.5) & (radius <= 1.5)].max() / K[(radius >= 2) & (radius <= 4)].max())
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment],
                           columns=["r_ring", "dist_to_ring", "abs_kernel", "in_window"])
    for r, dd, v, w in zip(rr, d, prof, window):
        rep.rows.append({"r_ring": float(r), "dist_to_ring": float(dd), "abs_kernel": float(v),
                         "in_window": int(w)})
    rep.add("pooled profile slope", pooled.error <= 0.2, pooled.slope, f"target {target:+.3g} +/- 0.2")
    rep.add("inner side slope", inner.error <= 0.2, inner.slope, f"target {target:+.3g} +/- 0.2", gating=False)
    rep.add("outer side slope", outer.error <= 0.2, outer.slope, f"target {target:+.3g} +/- 0.2", gating=False)
    rep.add("far-field decay slope on [3, 6]", far.slope <= -4, far.slope, "<= -4")
    rep.add("focusing ratio near ring / [2, 4]", focus > 1, focus, "> 1", gating=False)
    rep.metrics = {"pooled": pooled.summary(), "inner": inner.summary(), "outer": outer.summary(),
                   "far": far.summary(), "focusing": focus, "b": b, "n": n, "N": N, "L": L}
    return rep


# -- atoms -----------------------------------------------------------------------

ATOM_CASES = ((2, 512, 4.0, (0.25, 0.5, 1.0)), (3, 96, 4.0, (0.5, 1.0)))


def run_atom_validate(cfg: ExperimentConfig) -> ExperimentReport:
    cases = ATOM_CASES
    if cfg.n is not None:
        cases = tuple(c for c in ATOM_CASES if c[0] == cfg.n) or ((cfg.n, cfg.N or 256, cfg.L or 4.0, (1.0,)),)
    if cfg.ells is not None or cfg.N is not None or cfg.L is not None:
        cases = tuple((n, cfg.N or N, cfg.L or L, cfg.ells or ells) for n, N, L, ells in cases)
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment],
                           columns=["n", "ell", "beta", "c", "binding", "heat_sup_scaled", "tv_mass",
                                    "cancel_residual", "leakage", "passed", "moll_tv", "moll_heat_sup",
                                    "moll_cancel"])
    for n, N, L, ells in cases:
        grid = GridSpec(n, N, L)
        beta = cfg.beta if cfg.beta is not None else float(n)
        for ell in ells:
            atom = make_dipole_atom(grid, ell, beta)
            ts = default_t_samples(ell)
            v = validate_atom(atom, ts)
            m = mollify(atom, ell / 8)
            vm = validate_atom(m, ts)
            rep.rows.append({"n": n, "ell": ell, "beta": beta, "c": atom.c, "binding": atom.binding,
                             "heat_sup_scaled": v.heat_sup * ell**beta, "tv_mass": v.tv_mass,
                             "cancel_residual": v.cancel_residual, "leakage": v.leakage,
                             "passed": int(v.passed), "moll_tv": vm.tv_mass,
                             "moll_heat_sup": vm.heat_sup, "moll_cancel": vm.cancel_residual})
            tag = f"n={n}, ell={ell}"
            rep.add(f"{tag}: validate_atom passes", v.passed, v.heat_sup * ell**beta,
                    "all four conditions", detail=",".join(v.violated()))
            rep.add(f"{tag}: mollified mean zero", vm.cancel_residual < 1e-12, vm.cancel_residual, "< 1e-12")
            rep.add(f"{tag}: mollified ||.||_1 <= ||a||_1", vm.tv_mass <= v.tv_mass * (1 + 1e-6),
                    vm.tv_mass / v.tv_mass, "ratio <= 1 + 1e-6")
            rep.add(f"{tag}: mollified heat sup <= heat sup", vm.heat_sup <= v.heat_sup * (1 + 1e-6),
                    vm.heat_sup / v.heat_sup, "ratio <= 1 + 1e-6")
    rep.metrics = {"atoms": len(rep.rows)}
    return rep


def run_heat_norm_scan(cfg: ExperimentConfig) -> ExperimentReport:
    n, N, L = cfg.n or 2, cfg.N or 512, cfg.L or 32.0
    ell = cfg.ells[0] if cfg.ells else 1.0
    beta = cfg.beta if cfg.beta is not None else float(n)
    ts = cfg.ts or tuple(np.geomspace(1e-2 * ell**2, 10 * ell**2, 31))
    atom = make_dipole_atom(GridSpec(n, N, L), ell, beta)
    scan = heat_norm_scan(atom, ts)
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment], columns=["t", "sup_norm", "l1_norm"])
    for row in scan.rows():
        rep.rows.append(dict(zip(("t", "sup_norm", "l1_norm"), row)))
    _slope_check(rep, "large-t L1 slope", scan.one_large, 0.1)
    _slope_check(rep, "large-t sup slope", scan.inf_large, 0.1, gating=False)
    _slope_check(rep, "small-t sup slope", scan.inf_small, 0.1, gating=False)
    _slope_check(rep, "small-t L1 slope", scan.one_small, 0.1, gating=False)
    rep.metrics = {"one_large": scan.one_large.summary(), "inf_large": scan.inf_large.summary(),
                   "inf_small": scan.inf_small.summary(), "one_small": scan.one_small.summary(),
                   "ell": ell, "beta": beta, "n": n, "N": N, "L": L}
    return rep


# -- Riesz -----------------------------------------------------------------------

RIESZ_CASES = ((3, Fraction(1), 3.0, 96), (3, Fraction(2), 3.0, 96), (2, Fraction(3, 2), 2.0, 512))


def run_riesz_scan(cfg: ExperimentConfig) -> ExperimentReport:
    cases = RIESZ_CASES
    if cfg.n is not None or cfg.p is not None:
        n = cfg.n or 3
        p = cfg.p if cfg.p is not None else Fraction(1)
        cases = ((n, p, cfg.beta if cfg.beta is not None else float(n), cfg.N or (96 if n == 3 else 512)),)
    ells = cfg.ells or tuple(2.0**-k for k in range(2, 6))
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment],
                           columns=["n", "p", "beta", "ell", "norm_l2", "two_route", "gamma_mismatch",
                                    "truncation"])
    fits = {}
    for n, p, beta, N in cases:
        r = atom_riesz_scan("dipole", ells, p, beta, n, N=N, heat_check=True, doubling_check=True)
        for row in r.extra["rows"]:
            rep.rows.append({"n": n, "p": p, "beta": beta, **row})
        two = max(row["two_route"] for row in r.extra["rows"])
        tag = f"n={n}, p={p}, beta={beta}"
        _slope_check(rep, f"{tag}: slope of ||I_b a||_2", r, 0.15)
        rep.add(f"{tag}: spectral vs heat quadrature", two <= 1e-3, two, "<= 1e-3")
        rep.add(f"{tag}: box doubling change", True, r.extra["doubling_change"], "reported", gating=False)
        fits[tag] = {**r.summary(), "two_route": two, "doubling_change": r.extra["doubling_change"],
                     "gamma_mismatch": max(row["gamma_mismatch"] for row in r.extra["rows"])}
    rep.metrics = {"fits": fits, "ells": list(ells)}
    return rep


# -- wave --------------------------------------------------------------------------

def run_wave_decay(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment],
                           columns=["case", "t", "norm_p", "scaled"])
    # energy and group law on a smooth random-phase datum
    g2 = GridSpec(2, 256, 16.0)
    x, y = g2.coords()
    data = CauchyData(g2.field(np.exp(-4 * ((x - 1) ** 2 + y**2))),
                      g2.field(x * np.exp(-3 * (x**2 + (y + 1) ** 2))))
    E = [wave_energy(data, t) for t in np.linspace(0, 4, 9)]
    spread = (max(E) - min(E)) / E[0]
    rep.add("energy conservation on t in [0, 4]", spread < 1e-10, spread, "< 1e-10 relative")
    a = propagate(propagate(data, 1.3), 0.9)
    b = propagate(data, 2.2)
    group = max(lp_norm(a.f - b.f, 2) / lp_norm(b.f, 2), lp_norm(a.g - b.g, 2) / lp_norm(b.g, 2))
    rep.add("group law s + t", group < 1e-10, group, "< 1e-10")
    # Kirchhoff oracle in three dimensions
    g3 = GridSpec(3, cfg.N or 128, cfg.L or 24.0)
    eps = 3.0
    bump = radial_bump(eps)
    d3 = CauchyData(g3.zeros(), g3.field(bump(g3.radius)))
    radii = np.unique(np.round(g3.radius.ravel(), 12))
    worst_k, worst_leak = 0.0, 0.0
    for t in (1.0, 4.0, 7.0):
        u = wave_solution(d3, t)
        ref = np.interp(g3.radius.ravel(), radii, kirchhoff_radial(bump, radii, t)).reshape(g3.shape)
        err = math.sqrt(np.sum(np.abs(u.values - ref) ** 2) / np.sum(ref**2))
        worst_k = max(worst_k, err)
        worst_leak = max(worst_leak, leakage_fraction(u, eps + t + 4 * g3.h))
    rep.add("n=3 radial oracle agreement", worst_k < 1e-3, worst_k, "< 1e-3 relative L2")
    rep.add("finite speed leakage", worst_leak < 1e-4, worst_leak, "< 1e-4")
    ts = cfg.ts or (1.0, 2.0, 4.0, 8.0)
    growth = cauchy_decay_scan(3, 1, t_values=ts, data="g", prepared=False)
    for row in growth.extra["rows"]:
        rep.rows.append({"case": "n3_p1_f0_raw", **row})
    _slope_check(rep, "n=3, f=0, p=1: slope of ||u||_1", growth, 0.15)
    bands = {}
    for n, p in ((2, 2), (3, 2), (3, 1)):
        s = cauchy_decay_scan(n, p, t_values=ts, data="both", prepared=True)
        for row in s.extra["rows"]:
            rep.rows.append({"case": f"n{n}_p{p}_prepared", **row})
        bands[f"n={n}, p={p}"] = s.band_ratio
        gate = (n, p) == (2, 2)
        rep.add(f"n={n}, p={p}: band of t^(n/p') ||u||_p", s.band_ratio <= 4, s.band_ratio, "<= 4",
                gating=gate)
    rep.metrics = {"energy_spread": spread, "group_law": group, "kirchhoff": worst_k,
                   "leakage": worst_leak, "growth": growth.summary(), "bands": bands}
    return rep


DILATED_CASES = ((2, Fraction(2), 1.0, True), (3, Fraction(2), 1.5, True), (3, Fraction(1), 1.0, False))


def run_dilated_scan(cfg: ExperimentConfig) -> ExperimentReport:
    cases = DILATED_CASES
    if cfg.n is not None or cfg.p is not None:
        n = cfg.n or 2
        p = cfg.p if cfg.p is not None else Fraction(2)
        cases = ((n, p, cfg.b_value(n, p), True),)
    ts = cfg.ts or (1.0, 2.0, 4.0, 8.0)
    ell = cfg.ells[0] if cfg.ells else 0.25
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment], columns=["n", "p", "b", "t", "norm_p"])
    fits = {}
    for n, p, b, gate in cases:
        atom = radial_dipole(n, ell, cfg.beta if cfg.beta is not None else float(n))
        r = dilated_multiplier_scan(atom, b, p, ts)
        for row in r.extra["rows"]:
            rep.rows.append({"n": n, "p": p, "b": b, **row})
        _slope_check(rep, f"n={n}, p={p}, b={b}: slope of ||T_b^t a||_p", r, 0.15, gating=gate)
        fits[f"n={n}, p={p}"] = r.summary()
    rep.metrics = {"fits": fits, "ell": ell}
    return rep


# -- uniform bounds and their structure --------------------------------------------

UNIFORM_CASES = ((3, Fraction(1), 3.0), (3, Fraction(2), 3.0), (2, Fraction(3, 2), 2.0), (2, Fraction(2), 2.0))
EXPLORATORY_CASES = ((3, Fraction(1), 3.0), (2, Fraction(3, 2), 2.0))
EXPLORATORY_SHIFT = 0.3


def _hypothesis_ok(n: int, p, beta: float) -> bool:
    p = float(p)
    if p >= 2:
        return 0 < beta <= n
    if n >= 3:
        return n - 1 < beta <= n
    return 2.0 / p < beta <= 2


def _uniform_sweep(n, p, beta, b, ells_ring, reach=None):
    vals, tilde = [], []
    for lr in ells_ring:
        atom = radial_dipole(n, _ring(lr), beta)
        vals.append(atom.apply(SymbolSpec("full_T_b", b=b), reach).lp_norm(p))
        tilde.append(atom.apply(SymbolSpec("tilde_T_b", b=b), reach).lp_norm(p))
    return vals, tilde


def run_uniform_bound(cfg: ExperimentConfig) -> ExperimentReport:
    cases = UNIFORM_CASES
    explore = EXPLORATORY_CASES
    if cfg.n is not None or cfg.p is not None:
        n = cfg.n or 3
        p = cfg.p if cfg.p is not None else Fraction(1)
        cases = ((n, p, cfg.beta if cfg.beta is not None else float(n)),)
        explore = ()
    ells = cfg.ells or tuple(np.round(np.logspace(-2, 0.5, 11), 12))
    ells_x = tuple(np.round(np.logspace(-3, 0.5, 15), 12))
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment],
                           columns=["n", "p", "beta", "b", "run", "ell_ring", "ell", "norm_full", "norm_tilde"])
    out = {}
    for n, p, beta in cases:
        b = cfg.b_value(n, p)
        vals, tilde = _uniform_sweep(n, p, beta, b, ells)
        for lr, v, vt in zip(ells, vals, tilde):
            rep.rows.append({"n": n, "p": p, "beta": beta, "b": b, "run": "gated", "ell_ring": lr,
                             "ell": _ring(lr), "norm_full": v, "norm_tilde": vt})
        br = band_ratio(ells, vals)
        inside = _hypothesis_ok(n, p, beta)
        label = f"n={n}, p={p}, beta={beta}" + ("" if inside else " (out of hypothesis, exploratory)")
        rep.add(f"{label}: band ratio of ||T_b a||_p", br <= cfg.band_max, br, f"<= {cfg.band_max}",
                gating=inside)
        out[label] = {"sup": max(vals), "band_ratio": br, "b": b,
                      "decades": math.log10(max(ells) / min(ells))}
    for n, p, beta in explore:
        b = float(critical_b(n, p)) - EXPLORATORY_SHIFT
        # the tail of the full kernel past ring + 8 is below e^-8 of its bulk
        vals, tilde = _uniform_sweep(n, p, beta, b, ells_x, reach=RING_RADIUS + 8.0)
        for lr, v, vt in zip(ells_x, vals, tilde):
            rep.rows.append({"n": n, "p": p, "beta": beta, "b": b, "run": "exploratory", "ell_ring": lr,
                             "ell": _ring(lr), "norm_full": v, "norm_tilde": vt})
        br = band_ratio(ells_x, vals)
        fit = fit_slope(zip(ells_x, vals))
        grows = vals[0] > vals[-1]
        rep.add(f"exploratory b = b_p - {EXPLORATORY_SHIFT}, n={n}, p={p}: band ratio", br > 10 and grows,
                br, "> 10, growing as ell -> 0", gating=False)
        out[f"exploratory n={n}, p={p}"] = {"band_ratio": br, "slope": fit.slope, "b": b,
                                            "decades": math.log10(max(ells_x) / min(ells_x))}
    rep.metrics = out
    return rep


def run_region_norms(cfg: ExperimentConfig) -> ExperimentReport:
    n = cfg.n or 3
    p = cfg.p if cfg.p is not None else Fraction(1)
    beta = cfg.beta if cfg.beta is not None else float(n)
    b = cfg.b_value(n, p)
    ells = cfg.ells or tuple(2.0**-k for k in range(7, 3, -1))
    s = 2 * math.sqrt(n)
    for lr in ells:
        if not lr < 1 / (3 * math.sqrt(n)):
            raise ValueError(f"ell = {lr} ring units violates ell < 1/(3 sqrt(n))")
    pf = float(p)
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment],
                           columns=["ell_ring", "J1", "J2", "J3", "J4", "total", "additivity_gap"])
    J = [[], [], [], []]
    gaps = []
    profile = {}
    for lr in sorted(ells):
        atom = radial_dipole(n, _ring(lr), beta)
        F = atom.apply(SymbolSpec("tilde_T_b", b=b))
        edges = [0.0, _ring(1 - s * lr), _ring(1 + s * lr), _ring(s), math.inf]
        parts, total = F.region_powers(pf, edges)
        gap = abs(sum(parts) - total) / total
        gaps.append(gap)
        for i in range(4):
            J[i].append(parts[i])
        rep.rows.append({"ell_ring": lr, "J1": parts[0], "J2": parts[1], "J3": parts[2], "J4": parts[3],
                         "total": total, "additivity_gap": gap})
        d = np.geomspace(s * lr, 0.3, 25)
        vin = np.abs(F.on_axis(_ring(1) * (1 - d)))
        vout = np.abs(F.on_axis(_ring(1) * (1 + d)))
        profile[lr] = (fit_slope(zip(d, vin), target=-(1 / pf + 1)),
                       fit_slope(zip(d, vout), target=-(1 / pf + 1)))
    for i in range(4):
        br = band_ratio(ells, J[i]) if min(J[i]) > 0 else math.inf
        rep.add(f"J{i + 1} band ratio", br <= cfg.band_max, br, f"<= {cfg.band_max}")
    rep.add("A-region additivity", max(gaps) <= 1e-12, max(gaps), "<= 1e-12 relative")
    smallest = min(ells)
    a1, a3 = profile[smallest]
    rep.add(f"A1 profile slope at ell={smallest}", a1.error <= 0.3, a1.slope,
            f"target {a1.target:+.3g} +/- 0.3")
    rep.add(f"A3 profile slope at ell={smallest}", a3.error <= 0.3, a3.slope,
            f"target {a3.target:+.3g} +/- 0.3", gating=False)
    rep.metrics = {"J_band": [band_ratio(ells, j) for j in J], "additivity": max(gaps),
                   "profile_A1": {str(k): v[0].slope for k, v in profile.items()},
                   "profile_A3": {str(k): v[1].slope for k, v in profile.items()},
                   "n": n, "p": p, "beta": beta, "b": b}
    return rep


def large_cube_exponent(n: int, p, beta: float) -> float:
    """``(1 - n) / (p' - (n - beta))``; ``p = 1`` means ``p' = inf`` and the exponent 0."""
    p = parse_p(p)
    if p == 1:
        return 0.0
    if p == math.inf:
        p_dual = 1.0
    else:
        p_dual = float(p / (p - 1))
    return (1 - n) / (p_dual - (n - beta))


def _lp_piece_range(atom, b):
    """Pieces whose annulus lies inside what the radial engine resolves."""
    j_hi = int(math.floor(math.log2(0.9 * 12.0 / atom.eps))) - 1
    return 0, j_hi


def run_dyadic_split(cfg: ExperimentConfig) -> ExperimentReport:
    n = cfg.n or 3
    beta = cfg.beta if cfg.beta is not None else float(n)
    ps = (cfg.p,) if cfg.p is not None else (Fraction(2), Fraction(1))
    ells = cfg.ells or tuple(2.0**k for k in range(-2, 5))
    if not n - 1 < beta <= n:
        raise ValueError(f"beta = {beta} outside (n-1, n]")
    for lr in ells:
        if not lr > 1 / (3 * math.sqrt(n)):
            raise ValueError(f"ell = {lr} ring units is not a large cube (> 1/(3 sqrt(n)))")
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment],
                           columns=["p", "ell_ring", "k", "I", "II", "total", "pieces"])
    out = {}
    for p in ps:
        b = cfg.b_value(n, p)
        expo = large_cube_exponent(n, p, beta)
        rows, tri = [], []
        for lr in sorted(ells):
            atom = radial_dipole(n, _ring(lr), beta)
            total = atom.apply(SymbolSpec("tilde_T_b", b=b)).lp_norm(p)
            j_lo, j_hi = _lp_piece_range(atom, b)
            pieces = {j: atom.apply(SymbolSpec("lp_piece", b=b, j=j)).lp_norm(p) for j in range(j_lo, j_hi + 1)}
            k_raw = (expo - 1) * math.log2(lr)
            k = int(round(k_raw))
            if not j_lo <= k <= j_hi:
                warnings.warn(f"k = {k} outside the resolvable range [{j_lo}, {j_hi}]; clamped",
                              RuntimeWarning, stacklevel=2)
                k = min(max(k, j_lo), j_hi)
            I = sum(v for j, v in pieces.items() if j <= k)
            II = sum(v for j, v in pieces.items() if j > k)
            tri.append(total <= (I + II) * (1 + 1e-6))
            rows.append((lr, total))
            rep.rows.append({"p": p, "ell_ring": lr, "k": k, "I": I, "II": II, "total": total,
                             "pieces": " ".join(f"{j}:{v:.6e}" for j, v in pieces.items())})
        tag = f"n={n}, p={p}, beta={beta}"
        rep.add(f"{tag}: triangle ||T~a|| <= I + II", all(tri), sum(tri), f"{len(tri)} of {len(tri)}")
        fit = fit_slope(rows, target=expo)
        if expo == 0.0:
            rep.add(f"{tag}: band ratio (p' = inf, exponent 0)", fit.band_ratio <= cfg.band_max,
                    fit.band_ratio, f"<= {cfg.band_max}")
        else:
            rep.add(f"{tag}: large-cube slope", fit.error <= 0.3, fit.slope, f"target {expo:+.3g} +/- 0.3")
        local = [math.log(y2 / y1) / math.log(x2 / x1) for (x1, y1), (x2, y2) in zip(rows, rows[1:])]
        bound = max(y / x**expo for x, y in rows)
        out[tag] = {**fit.summary(), "local_slopes": local, "sup_norm_over_bound": bound}
    rep.metrics = out
    return rep


# -- maximal -----------------------------------------------------------------------

def run_bmo_probe(cfg: ExperimentConfig) -> ExperimentReport:
    n = cfg.n or 2
    ells = cfg.ells or (0.25, 0.5, 1.0, 2.0, 4.0)
    N, L = cfg.N or 2048, cfg.L or 3.0
    b = cfg.b if cfg.b is not None else (n + 1) / 2
    base = bmo_probe(n, ells, b=b, N=N, L=L)
    smoother = bmo_probe(n, ells, b=b + 1, N=N, L=L)
    zero = probe_sup(base.grid.zeros())
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment],
                           columns=["ell_ring", "ell_Q", "probe_value", "probe_value_b_plus_1"])
    for row, v1 in zip(base.rows(), smoother.values):
        rep.rows.append({**row, "probe_value_b_plus_1": v1})
    rep.add("probe band ratio over the sweep", base.band_ratio <= cfg.band_max, base.band_ratio,
            f"<= {cfg.band_max}")
    mono = all(v1 < v0 for v0, v1 in zip(base.values, smoother.values))
    rep.add("b + 1 lowers the probe for every atom", mono, None, "monotone")
    rep.add("zero atom gives 0", zero == 0.0, zero, "== 0")
    rep.metrics = {"band_ratio": base.band_ratio, "max": base.max_value, "b": b, "N": N, "L": L}
    return rep


def run_sharp_maximal_convergence(cfg: ExperimentConfig) -> ExperimentReport:
    n, N, L = cfg.n or 2, cfg.N or 64, cfg.L or 16.0
    grid = GridSpec(n, N, L)
    rng = np.random.default_rng(cfg.seed)
    f = Field(grid, rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
    other = Field(grid, rng.standard_normal(grid.shape).astype(complex))
    full = RadiusLadder.full(grid)
    M = sharp_maximal(f, full).values.real
    scale = float(M.max())
    tol = 1e-12 * scale
    rep = ExperimentReport(cfg.experiment, ANCHORS[cfg.experiment],
                           columns=["ell", "radii", "max_U_minus_Ml", "max_Ml_minus_M", "gap", "gap_bound",
                                    "other_domination"])
    prev = None
    dom_ok = gap_ok = mono_ok = True
    worst_dom = worst_gap_ratio = 0.0
    for ell in (2, 4, 8, 16, 64):
        lad = RadiusLadder.for_level(grid, ell)
        Ml = sharp_maximal(f, lad).values.real
        U = u_ell_linearization(f, f, ell, lad).values
        Uo = u_ell_linearization(f, other, ell, lad).values
        Mo = sharp_maximal(other, lad).values.real
        d1 = float(np.max(np.abs(U) - Ml))
        d2 = float(np.max(Ml - M))
        d3 = float(np.max(np.abs(Uo) - Mo))
        gap = float(np.max(Ml - U.real))
        bound = float(Ml.max()) / ell
        dom_ok &= d1 <= tol and d2 <= tol and d3 <= tol
        gap_ok &= gap <= bound + tol
        if prev is not None:
            mono_ok &= bool(np.all(Ml >= prev - tol))
        prev = Ml
        worst_dom = max(worst_dom, d1, d2, d3)
        worst_gap_ratio = max(worst_gap_ratio, gap / bound if bound > 0 else 0.0)
        rep.rows.append({"ell": ell, "radii": len(lad), "max_U_minus_Ml": d1, "max_Ml_minus_M": d2,
                         "gap": gap, "gap_bound": bound, "other_domination": d3})
    sat = RadiusLadder.for_level(grid, 2 * max(grid.L / 4, 1 / grid.h))
    sat_err = float(np.max(np.abs(sharp_maximal(f, sat).values.real - M)))
    hl = hardy_littlewood(f, full).values.real
    hl_gap = float(np.max(M - 2 * hl))
    const = Field(grid, np.full(grid.shape, 2.5 + 0j))
    const_max = float(np.max(sharp_maximal(const, full).values.real))
    rep.add("domination |U_l| <= M#_l <= M#", dom_ok, worst_dom, "<= 1e-12 relative")
    rep.add("selection-rule gap <= max M#_l / l", gap_ok, worst_gap_ratio, "ratio <= 1")
    rep.add("ladder saturation reproduces M#", sat_err <= tol, sat_err, "machine precision")
    rep.add("M#_l nondecreasing in l", mono_ok, None, "pointwise")
    rep.add("M# <= 2 M(|f - mean|)", hl_gap <= tol, hl_gap, "<= 0")
    rep.add("constant field has M# = 0", const_max <= 1e-14, const_max, "== 0")
    rep.metrics = {"domination": worst_dom, "gap_ratio": worst_gap_ratio, "saturation": sat_err,
                   "hl_gap": hl_gap, "n": n, "N": N, "L": L, "seed": cfg.seed}
    return rep


# -- registry ------------------------------------------------------------------------

EXPERIMENTS: dict[str, Callable[[ExperimentConfig], ExperimentReport]] = {
    "transform-check": run_transform_check,
    "partition-check": run_partition_check,
    "decomposition-check": run_decomposition_check,
    "lp-kernel-scan": run_lp_kernel_scan,
    "kernel-profile": run_kernel_profile,
    "atom-validate": run_atom_validate,
    "heat-norm-scan": run_heat_norm_scan,
    "riesz-scan": run_riesz_scan,
    "wave-decay": run_wave_decay,
    "dilated-scan": run_dilated_scan,
    "uniform-bound": run_uniform_bound,
    "region-norms": run_region_norms,
    "dyadic-split": run_dyadic_split,
    "bmo-probe": run_bmo_probe,
    "sharp-maximal-convergence": run_sharp_maximal_convergence,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    rep = EXPERIMENTS[cfg.experiment](cfg)
    if cfg.out is not None:
        rep.write(cfg.out)
    return rep


def run_all(configs=None, out=None, progress: Callable[[ExperimentReport], None] | None = None):
    """Run ``configs`` (every experiment with defaults when ``None``); returns ``(ok, reports)``.

    An empty list is a successful no-op.
    """
    if configs is None:
        configs = [ExperimentConfig(name) for name in EXPERIMENTS]
    reports = []
    for cfg in configs:
        if out is not None and cfg.out is None:
            cfg = replace(cfg, out=Path(out))
        rep = run_experiment(cfg)
        reports.append(rep)
        if progress is not None:
            progress(rep)
    return all(r.passed for r in reports), reports
