"""Least-squares line fits with the diagnostics the experiment tables report."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Fit:
    slope: float
    intercept: float
    r2: float
    stderr: float  # standard error of the slope
    n_points: int

    def slope_ci(self, z: float = 1.96) -> tuple[float, float]:
        return self.slope - z * self.stderr, self.slope + z * self.stderr

    def slope_indistinguishable_from_zero(self, z: float = 1.96) -> bool:
        lo, hi = self.slope_ci(z)
        return lo <= 0.0 <= hi


EMPTY_FIT = Fit(math.nan, math.nan, math.nan, math.nan, 0)


def fit_line(xs: Sequence[float], ys: Sequence[float]) -> Fit:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    n = len(x)
    if n < 2:
        return Fit(math.nan, math.nan, math.nan, math.nan, n)
    xm = x.mean()
    sxx = float(((x - xm) ** 2).sum())
    if sxx == 0.0:
        return Fit(math.nan, math.nan, math.nan, math.nan, n)
    slope = float(((x - xm) * (y - y.mean())).sum() / sxx)
    intercept = float(y.mean() - slope * xm)
    resid = y - (slope * x + intercept)
    ss_res = float((resid**2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    stderr = 0.0 if n == 2 else math.sqrt(max(ss_res, 0.0) / (n - 2) / sxx)
    return Fit(slope, intercept, r2, stderr, n)


def fit_log_vs_x(xs: Sequence[float], ys: Sequence[float]) -> Fit:
    """Fit log(y) = slope*x + b over the points with y > 0."""
    pairs = [(x, y) for x, y in zip(xs, ys) if y > 0]
    if not pairs:
        return EMPTY_FIT
    return fit_line([p[0] for p in pairs], [math.log(p[1]) for p in pairs])


def fit_log_vs_log(xs: Sequence[float], ys: Sequence[float]) -> Fit:
    """Fit log(y) = slope*log(x) + b over the points with x, y > 0."""
    pairs = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if not pairs:
        return EMPTY_FIT
    return fit_line(
        [math.log(p[0]) for p in pairs], [math.log(p[1]) for p in pairs]
    )
