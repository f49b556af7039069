"""Closed-form ordinary least squares for the labelled (x, y) dataset.

The fit minimizes the sum of squared residuals and is computed from
centered sums (Sxy / Sxx), which is numerically stable for large word
counts. Residuals follow the prediction-minus-observation convention:
``residual_i = (slope * x_i + intercept) - y_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import Dataset

__all__ = ["DegenerateDesignError", "InsufficientDataError", "OlsFit", "lse", "ols_fit"]


class InsufficientDataError(ValueError):
    """Fewer than two observations."""


class DegenerateDesignError(ValueError):
    """All x values identical; the slope is undefined."""


@dataclass(frozen=True)
class OlsFit:
    slope: float
    intercept: float
    lse: float  # sum of squared residuals at the optimum
    residuals: tuple[float, ...]

    def predict(self, x: float) -> float:
        return self.slope * x + self.intercept


def lse(data: Dataset, a: float, b: float) -> float:
    """Sum of squared residuals of the line y = a*x + b over the dataset."""
    if data.size < 1:
        raise ValueError("least-squares error requires at least one observation")
    return math.fsum((p.y - (a * p.x + b)) ** 2 for p in data.points)


def ols_fit(data: Dataset) -> OlsFit:
    """Least-squares slope and intercept via the normal equations."""
    if data.size < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {data.size}")
    x = data.x
    y = data.y
    x_mean = float(x.mean())
    y_mean = float(y.mean())
    sxx = float(((x - x_mean) ** 2).sum())
    if sxx == 0.0:
        raise DegenerateDesignError("all x values are identical; slope is undefined")
    sxy = float(((x - x_mean) * (y - y_mean)).sum())
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    residuals = tuple((slope * p.x + intercept) - p.y for p in data.points)
    return OlsFit(
        slope=slope,
        intercept=intercept,
        lse=math.fsum(r * r for r in residuals),
        residuals=residuals,
    )
