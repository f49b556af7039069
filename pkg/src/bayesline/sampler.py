"""Random-walk Metropolis and Hamiltonian Monte Carlo posterior samplers.

Chains are fully independent: chain ``k`` owns a numpy generator seeded with
``seed XOR k``, so every draw is determined by (seed, config, data, model)
alone and is identical whether chains run serially or in a thread pool.
A corollary: seeds that differ only in bits below ``n_chains`` permute the
same chain streams, so independent replications should use seeds spaced at
least ``n_chains`` apart.

``sample_rwm`` and ``sample_hmc`` target the regression posterior in the
unconstrained coordinates z = (a, log b, log sigma) and store draws on the
constrained scale. The underlying kernels ``rwm_chains`` and ``hmc_chains``
accept an arbitrary log density (plus gradient, for HMC) so that low
dimensional targets with known answers, such as the conjugate Normal-mean
posterior, can exercise the exact same machinery.

HMC uses a leapfrog integrator with a fixed step count; the step size is
adapted during warmup by the dual-averaging scheme of Hoffman & Gelman
(2014) toward a target acceptance rate, then frozen. A proposal whose
Hamiltonian error exceeds ``DIVERGENCE_DELTA`` in magnitude is rejected and
tallied as a divergence.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import density
from .corpus import Dataset
from .modelspec import DistributionSpec, ModelSpec

__all__ = [
    "Chains",
    "InitializationError",
    "SamplerConfig",
    "hmc_chains",
    "rwm_chains",
    "sample_hmc",
    "sample_rwm",
]

MAX_INIT_RETRIES = 100
DIVERGENCE_DELTA = 1000.0
DIVERGENCE_WARN_FRACTION = 0.10

LogProb = Callable[[np.ndarray], float]
GradLogProb = Callable[[np.ndarray], np.ndarray]


class InitializationError(RuntimeError):
    """No finite-density starting point was found within the retry budget."""


@dataclass(frozen=True)
class SamplerConfig:
    """Run configuration; defaults give 4 chains x 4000 retained draws."""

    n_chains: int = 4
    n_draws: int = 4000
    n_warmup: int = 1000
    seed: int = 0
    algorithm: str = "hmc"  # "hmc" or "rwm"
    rwm_step: float = 0.1  # proposal sd on the unconstrained scale
    hmc_step: float = 0.1  # initial leapfrog step size, adapted in warmup
    hmc_leapfrog: int = 20
    target_accept: float = 0.8

    def __post_init__(self):
        if self.n_chains < 1:
            raise ValueError("n_chains must be >= 1")
        if self.n_draws < 1:
            raise ValueError("n_draws must be >= 1")
        if self.n_warmup < 0:
            raise ValueError("n_warmup must be >= 0")
        if self.algorithm not in ("hmc", "rwm"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if not self.rwm_step > 0 or not self.hmc_step > 0:
            raise ValueError("step sizes must be positive")
        if self.hmc_leapfrog < 1:
            raise ValueError("hmc_leapfrog must be >= 1")
        if not 0.0 < self.target_accept < 1.0:
            raise ValueError("target_accept must lie in (0, 1)")


@dataclass(frozen=True)
class Chains:
    """Retained draws, shaped (n_chains, n_draws, n_params)."""

    draws: np.ndarray
    param_names: tuple[str, ...]
    accept_rates: tuple[float, ...] | None = None
    config: SamplerConfig | None = None
    stream_ids: tuple[int, ...] | None = None
    divergences: tuple[int, ...] | None = None
    divergence_warning: bool = False

    @property
    def n_chains(self) -> int:
        return self.draws.shape[0]

    @property
    def n_draws(self) -> int:
        return self.draws.shape[1]

    @property
    def total_draws(self) -> int:
        return self.n_chains * self.n_draws

    def index_of(self, param: str) -> int:
        try:
            return self.param_names.index(param)
        except ValueError:
            raise KeyError(f"no parameter {param!r} in {self.param_names}") from None

    def pooled(self, param: str) -> np.ndarray:
        """Chain-concatenated draws of one parameter, ordered (chain, draw)."""
        return self.draws[:, :, self.index_of(param)].reshape(-1)

    def per_chain(self, param: str) -> np.ndarray:
        return self.draws[:, :, self.index_of(param)]


def _stream_id(seed: int, chain: int) -> int:
    return (seed ^ chain) & 0xFFFFFFFFFFFFFFFF


def _find_start(log_prob: LogProb, init: Callable, rng) -> tuple[np.ndarray, float]:
    for _ in range(MAX_INIT_RETRIES):
        z = np.asarray(init(rng), dtype=float)
        lp = log_prob(z)
        if math.isfinite(lp):
            return z, lp
    raise InitializationError(
        f"no finite log density found in {MAX_INIT_RETRIES} initialization draws"
    )


def _finite(lp: float) -> float:
    return lp if math.isfinite(lp) else -math.inf


def _rwm_chain(log_prob, cfg: SamplerConfig, dim, init, constrain, stream):
    rng = np.random.default_rng(stream)
    z, lp = _find_start(log_prob, init, rng)
    out = np.empty((cfg.n_draws, dim))
    accepted = 0
    total = cfg.n_warmup + cfg.n_draws
    for it in range(total):
        prop = z + cfg.rwm_step * rng.standard_normal(dim)
        lp_prop = _finite(log_prob(prop))
        took = False
        if lp_prop > -math.inf:
            u = rng.random()
            log_u = math.log(u) if u > 0.0 else -math.inf
            if log_u < lp_prop - lp:
                z, lp = prop, lp_prop
                took = True
        if it >= cfg.n_warmup:
            out[it - cfg.n_warmup] = constrain(z)
            accepted += took
    return out, accepted / cfg.n_draws, 0


class _DualAveraging:
    """Step-size adaptation toward a target acceptance rate.

    Hoffman & Gelman (2014), Algorithm 5 with the published constants; the
    sampler restarts it halfway through warmup so the frozen average is not
    biased by the initial transient.
    """

    _GAMMA = 0.05
    _T0 = 10.0
    _KAPPA = 0.75

    def __init__(self, eps: float, target: float):
        self.mu = math.log(10.0 * eps)
        self.target = target
        self.log_eps_bar = math.log(eps)
        self.h_bar = 0.0
        self.t = 0

    def update(self, alpha: float) -> float:
        """Fold in one acceptance statistic; returns the next step size."""
        self.t += 1
        w = 1.0 / (self.t + self._T0)
        self.h_bar = (1.0 - w) * self.h_bar + w * (self.target - alpha)
        log_eps = self.mu - math.sqrt(self.t) / self._GAMMA * self.h_bar
        eta = self.t ** -self._KAPPA
        self.log_eps_bar = eta * log_eps + (1.0 - eta) * self.log_eps_bar
        return math.exp(log_eps)

    def frozen(self) -> float:
        return math.exp(self.log_eps_bar)


def _all_finite(v) -> bool:
    for x in v:
        if not math.isfinite(x):
            return False
    return True


def _leapfrog(z, p, eps, n_steps, grad):
    g = grad(z)
    if not _all_finite(g):
        return None
    p = p + 0.5 * eps * g
    for step in range(n_steps):
        z = z + eps * p
        g = grad(z)
        if not _all_finite(g):
            return None
        # full momentum step between position updates, half step at the end
        p = p + (eps if step < n_steps - 1 else 0.5 * eps) * g
    return z, p


def _kinetic(p) -> float:
    # plain-float accumulation: overflow becomes inf instead of a warning
    total = 0.0
    for v in p:
        fv = float(v)
        total += fv * fv
    return 0.5 * total


def _hmc_chain(log_prob, grad, cfg: SamplerConfig, dim, init, constrain, stream):
    rng = np.random.default_rng(stream)
    z, lp = _find_start(log_prob, init, rng)
    eps = cfg.hmc_step
    adapt = _DualAveraging(eps, cfg.target_accept)
    restart_at = cfg.n_warmup // 2
    out = np.empty((cfg.n_draws, dim))
    accepted = 0
    divergences = 0
    total = cfg.n_warmup + cfg.n_draws
    for it in range(total):
        p0 = rng.standard_normal(dim)
        # +-10% step jitter breaks the phase resonance a fixed trajectory
        # length has on near-Gaussian targets
        eps_it = eps * (0.9 + 0.2 * rng.random())
        h0 = -lp + _kinetic(p0)
        result = _leapfrog(z, p0, eps_it, cfg.hmc_leapfrog, grad)
        if result is None:
            delta = math.inf
        else:
            z_new, p_new = result
            lp_new = _finite(log_prob(z_new))
            delta = (-lp_new + _kinetic(p_new)) - h0
        diverged = not math.isfinite(delta) or abs(delta) > DIVERGENCE_DELTA
        alpha = 0.0 if diverged else min(1.0, math.exp(min(-delta, 0.0)))
        took = False
        if not diverged:
            u = rng.random()
            log_u = math.log(u) if u > 0.0 else -math.inf
            if log_u < -delta:
                z, lp = z_new, lp_new
                took = True
        if it < cfg.n_warmup:
            if it == restart_at and it > 0:
                adapt = _DualAveraging(eps, cfg.target_accept)
            eps = adapt.update(alpha)
            if it == cfg.n_warmup - 1:
                eps = adapt.frozen()
        else:
            out[it - cfg.n_warmup] = constrain(z)
            accepted += took
            divergences += diverged
    return out, accepted / cfg.n_draws, divergences


def _run(chain_fn, cfg: SamplerConfig, dim, param_names, workers) -> Chains:
    streams = [_stream_id(cfg.seed, k) for k in range(cfg.n_chains)]

    def one_chain(stream):
        # errstate is thread-local: silence per chain, not around the pool.
        # Array overflow inside a trajectory is a rejection, not worth a warning.
        with np.errstate(over="ignore", invalid="ignore"):
            return chain_fn(stream)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one_chain, streams))
    else:
        results = [one_chain(s) for s in streams]
    draws = np.stack([r[0] for r in results])
    draws.setflags(write=False)  # Chains is an immutable result
    rates = tuple(r[1] for r in results)
    divergences = tuple(r[2] for r in results)
    warn = any(d > DIVERGENCE_WARN_FRACTION * cfg.n_draws for d in divergences)
    return Chains(
        draws=draws,
        param_names=tuple(param_names),
        accept_rates=rates,
        config=cfg,
        stream_ids=tuple(streams),
        divergences=divergences,
        divergence_warning=warn,
    )


def rwm_chains(
    log_prob: LogProb,
    cfg: SamplerConfig,
    *,
    dim: int,
    init: Callable,
    param_names: Sequence[str],
    constrain: Callable[[np.ndarray], np.ndarray] | None = None,
    workers: int = 1,
) -> Chains:
    """Random-walk Metropolis on an arbitrary log density.

    ``init(rng)`` proposes a starting point (retried while the density is
    not finite); ``constrain`` maps an unconstrained state to the stored
    coordinates (identity by default).
    """
    constrain = constrain if constrain is not None else lambda z: z
    cfg = replace(cfg, algorithm="rwm")
    return _run(
        lambda s: _rwm_chain(log_prob, cfg, dim, init, constrain, s),
        cfg,
        dim,
        param_names,
        workers,
    )


def hmc_chains(
    log_prob: LogProb,
    grad_log_prob: GradLogProb,
    cfg: SamplerConfig,
    *,
    dim: int,
    init: Callable,
    param_names: Sequence[str],
    constrain: Callable[[np.ndarray], np.ndarray] | None = None,
    workers: int = 1,
) -> Chains:
    """Hamiltonian Monte Carlo on an arbitrary differentiable log density."""
    constrain = constrain if constrain is not None else lambda z: z
    cfg = replace(cfg, algorithm="hmc")
    return _run(
        lambda s: _hmc_chain(log_prob, grad_log_prob, cfg, dim, init, constrain, s),
        cfg,
        dim,
        param_names,
        workers,
    )


def _sample_prior_value(dist: DistributionSpec, rng, positive: bool) -> float:
    """One prior draw; priors on positive parameters are truncated at 0."""
    for _ in range(10_000):
        if dist.kind == "HalfNormal":
            v = abs(rng.normal(0.0, dist.scale))
        else:
            v = rng.normal(dist.location, dist.scale)
        if not positive or v > 0.0:
            return v
    raise InitializationError(f"prior {dist} has essentially no mass above 0")


def _prior_init(spec: ModelSpec):
    def init(rng):
        a = _sample_prior_value(spec.slope_prior, rng, positive=False)
        b = _sample_prior_value(spec.intercept_prior, rng, positive=True)
        sigma = _sample_prior_value(spec.noise_prior, rng, positive=True)
        return density.transform(density.ParamVector(a, b, sigma))

    return init


_PARAM_NAMES = ("a", "b", "sigma")


def _constrain(z: np.ndarray) -> np.ndarray:
    return np.asarray(density.inverse_transform(z), dtype=float)


def sample_rwm(
    spec: ModelSpec, data: Dataset, cfg: SamplerConfig, workers: int = 1
) -> Chains:
    """Sample the regression posterior by random-walk Metropolis."""
    return rwm_chains(
        lambda z: density.log_posterior_unconstrained(z, spec, data),
        cfg,
        dim=3,
        init=_prior_init(spec),
        param_names=_PARAM_NAMES,
        constrain=_constrain,
        workers=workers,
    )


def sample_hmc(
    spec: ModelSpec, data: Dataset, cfg: SamplerConfig, workers: int = 1
) -> Chains:
    """Sample the regression posterior by Hamiltonian Monte Carlo."""
    return hmc_chains(
        lambda z: density.log_posterior_unconstrained(z, spec, data),
        lambda z: density.grad_log_posterior_unconstrained(z, spec, data),
        cfg,
        dim=3,
        init=_prior_init(spec),
        param_names=_PARAM_NAMES,
        constrain=_constrain,
        workers=workers,
    )
