"""Log-log slope fits: the unit of evidence for every scaling sweep."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = ["SlopeReport", "fit_slope", "band_ratio"]


@dataclass
class SlopeReport:
    """Least-squares line through ``(log x, log y)``.

    ``residual`` is the largest deviation of the data from the fit in natural
    log units.  ``band_ratio`` is ``max/min`` of ``y / x**target`` (of ``y``
    itself when no target is given).
    """

    abscissae: list[float]
    ordinates: list[float]
    slope: float
    intercept: float
    target: float | None = None
    residual: float = 0.0
    band_ratio: float = 1.0
    valid: bool = True
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def error(self) -> float:
        if self.target is None:
            return math.nan
        return abs(self.slope - self.target)

    def within(self, tol: float) -> bool:
        return self.valid and self.target is not None and self.error <= tol

    def summary(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "target": self.target,
            "residual": self.residual,
            "band_ratio": self.band_ratio,
            "valid": self.valid,
            "note": self.note,
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(asdict(self)), indent=2, sort_keys=True)

    def write_csv(self, path, xname="x", yname="y") -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([xname, yname, f"log_{xname}", f"log_{yname}"])
            for x, y in zip(self.abscissae, self.ordinates):
                w.writerow([repr(x), repr(y), repr(math.log(x)), repr(math.log(y))])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def band_ratio(xs: Sequence[float], ys: Sequence[float], exponent: float = 0.0) -> float:
    scaled = np.asarray(ys, dtype=float) / np.asarray(xs, dtype=float) ** exponent
    return float(scaled.max() / scaled.min())


def fit_slope(points: Iterable[tuple[float, float]], target: float | None = None,
              note: str = "") -> SlopeReport:
    pts = [(float(x), float(y)) for x, y in points]
    if any(not (x > 0 and y > 0) for x, y in pts):
        raise ValueError("fit_slope needs strictly positive (x, y) pairs")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    if len(pts) < 3:
        return SlopeReport(xs, ys, math.nan, math.nan, target, math.nan, math.nan,
                           valid=False, note=note or "fewer than 3 points")
    lx = np.log(xs)
    ly = np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.max(np.abs(ly - (slope * lx + intercept))))
    br = band_ratio(xs, ys, target if target is not None else 0.0)
    return SlopeReport(xs, ys, float(slope), float(intercept), target, resid, br, True, note)
