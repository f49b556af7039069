"""Log densities, constraint transforms and gradients for the regression model.

The target model is

    Y_i ~ Normal(a * X_i + b, sigma),   i = 1..M

with independent priors on the slope ``a``, the intercept ``b >= 0`` and the
noise scale ``sigma > 0``. Samplers work in unconstrained coordinates

    z = (a, log b, log sigma)

so the unconstrained log posterior carries the change-of-variables terms
``z_b + z_sigma``. Everything is computed in natural logs; impossible states
(outside a prior's support, or an overflowed transform) evaluate to ``-inf``
rather than raising, so samplers can treat them as automatic rejections.

Summation order is pinned down so tests can assert exact decompositions:
``log_likelihood`` is a left fold over the data points in order, and
``log_posterior_unconstrained`` is literally
``log_prior + log_likelihood + jacobian``. Appending a data point therefore
changes the likelihood by exactly that point's term.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .corpus import Dataset
from .modelspec import DistributionSpec, ModelSpec

__all__ = [
    "ParamVector",
    "grad_log_posterior_unconstrained",
    "inverse_transform",
    "log_density_half_normal",
    "log_density_normal",
    "log_likelihood",
    "log_posterior_unconstrained",
    "log_prior",
    "transform",
]

LOG_TWO_PI = math.log(2.0 * math.pi)
LOG_TWO = math.log(2.0)

# exp() overflows float64 just above this; map overflow to +inf instead of
# raising so the density layer stays total.
_EXP_MAX = 709.0


class ParamVector(NamedTuple):
    """Model parameters on the constrained scale."""

    a: float
    b: float
    sigma: float


def _safe_exp(v: float) -> float:
    return math.inf if v > _EXP_MAX else math.exp(v)


def log_density_normal(x: float, mu: float, sigma: float) -> float:
    """log N(x | mu, sigma) with sigma the standard deviation."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    d = x - mu
    return -0.5 * LOG_TWO_PI - math.log(sigma) - d * d / (2.0 * sigma * sigma)


def log_density_half_normal(x: float, scale: float) -> float:
    """log density of a normal folded at 0; -inf for x < 0."""
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    if x < 0:
        return -math.inf
    return LOG_TWO + log_density_normal(x, 0.0, scale)


def transform(p: ParamVector) -> np.ndarray:
    """Map constrained parameters to z = (a, log b, log sigma)."""
    if not p.b > 0:
        raise ValueError(f"b must be positive to transform, got {p.b}")
    if not p.sigma > 0:
        raise ValueError(f"sigma must be positive to transform, got {p.sigma}")
    return np.array([p.a, math.log(p.b), math.log(p.sigma)], dtype=float)


def inverse_transform(z: np.ndarray) -> ParamVector:
    """Map unconstrained z back to (a, exp(z_b), exp(z_sigma))."""
    return ParamVector(float(z[0]), _safe_exp(float(z[1])), _safe_exp(float(z[2])))


def _dist_logpdf(dist: DistributionSpec, x: float) -> float:
    if dist.kind == "Normal":
        return log_density_normal(x, dist.location, dist.scale)
    return log_density_half_normal(x, dist.scale)


def _dist_score(dist: DistributionSpec, x: float) -> float:
    """d/dx of the log prior density; 0 outside the support (density is -inf there)."""
    if dist.kind == "Normal":
        return -(x - dist.location) / (dist.scale * dist.scale)
    if x < 0:
        return 0.0
    return -x / (dist.scale * dist.scale)


def log_prior(p: ParamVector, spec: ModelSpec) -> float:
    """Sum of the prior log densities of a, b and sigma, in that order."""
    total = _dist_logpdf(spec.slope_prior, p.a)
    total += _dist_logpdf(spec.intercept_prior, p.b)
    total += _dist_logpdf(spec.noise_prior, p.sigma)
    return total


def log_likelihood(p: ParamVector, data: Dataset) -> float:
    """Sum over observations of log N(y_i | a*x_i + b, sigma).

    Accumulated left to right over the data points, so extending the dataset
    by one point changes the result by exactly that point's term.
    """
    if data.size < 1:
        raise ValueError("likelihood requires at least one observation")
    if not p.sigma > 0:
        raise ValueError(f"sigma must be positive, got {p.sigma}")
    a, b, sigma = p
    const = -0.5 * LOG_TWO_PI - math.log(sigma)
    inv_two_var = 1.0 / (2.0 * sigma * sigma)
    total = 0.0
    for point in data.points:
        r = point.y - (a * point.x + b)
        total += const - r * r * inv_two_var
    return total


def log_posterior_unconstrained(z: np.ndarray, spec: ModelSpec, data: Dataset) -> float:
    """Unnormalized log posterior in z, including the log-Jacobian z_b + z_sigma.

    The marginal data density is a constant in z and is omitted. Returns
    -inf wherever the state is impossible.
    """
    if data.size < 1:
        raise ValueError("posterior requires at least one observation")
    p = inverse_transform(z)
    if not (math.isfinite(p.b) and math.isfinite(p.sigma)) or p.sigma == 0.0 or p.b == 0.0:
        return -math.inf
    lp = log_prior(p, spec)
    if lp == -math.inf:
        return -math.inf
    return lp + log_likelihood(p, data) + (float(z[1]) + float(z[2]))


def grad_log_posterior_unconstrained(
    z: np.ndarray, spec: ModelSpec, data: Dataset
) -> np.ndarray:
    """Analytic gradient of log_posterior_unconstrained w.r.t. (z_a, z_b, z_sigma).

    Derivatives on the constrained scale are chained through b = exp(z_b)
    and sigma = exp(z_sigma); each log transform contributes +1 from its
    Jacobian term.
    """
    if data.size < 1:
        raise ValueError("posterior requires at least one observation")
    a, b, sigma = inverse_transform(z)
    s2 = sigma * sigma
    # extreme states (overflowed/underflowed transforms) yield non-finite
    # entries rather than raising; integrators treat those as rejections
    if not (math.isfinite(b) and math.isfinite(s2)) or s2 == 0.0:
        return np.full(3, math.nan)
    sx, sy, sxx, sxy, syy = data.moments
    m = data.size
    r_sum = sy - a * sx - b * m  # Σ r_i with r_i = y_i - (a x_i + b)
    rx_sum = sxy - a * sxx - b * sx
    rr_sum = syy + a * (a * sxx - 2.0 * sxy) + b * (b * m - 2.0 * sy) + 2.0 * a * b * sx
    inv_var = 1.0 / s2
    d_a = inv_var * rx_sum + _dist_score(spec.slope_prior, a)
    d_b = inv_var * r_sum + _dist_score(spec.intercept_prior, b)
    d_sigma = rr_sum * inv_var / sigma - m / sigma + _dist_score(spec.noise_prior, sigma)
    return np.array([d_a, d_b * b + 1.0, d_sigma * sigma + 1.0])
