"""Closed-form performance analysis on the fully-connected model.

Prior and reconstruction model both live on the complete graph with the
pair coupling divided by ``n``::

    prior:  exp( sum h_i x_i - xi/2 sum x_i^2 - J/(2n) sum_{i<j} (x_i - x_j)^2 )
    model:  same with (beta = h + eps, xi0, J0)

Because the precision is ``(xi + J) I - (J/n) 1 1^T``, the finite-n moments
below are exact. ``analytic_mse`` is the n -> infinity reconstruction error
averaged over observations and bias draws; ``mc_mse`` estimates the same
quantity at finite ``n`` with the generic conditional-mean solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import InputError, ParameterError
from .evaluation import SweepResult, mse
from .ggm import Factor, GaussianMoments, GgmParams, Observation, precision_matrix, sample
from .graph import Graph, make_complete
from .inference import reconstruct_exact
from .parallel import parallel_map


@dataclass(frozen=True)
class AnalysisSetup:
    j: float
    xi: float
    j0: float
    xi0: float
    mu_h: float
    sigma_h: float
    mu_eps: float = 0.0
    sigma_eps: float = 0.0
    p: float = 0.5

    def __post_init__(self):
        if not (self.xi > 0 and self.xi0 > 0):
            raise ParameterError("xi and xi0 must be > 0")
        if self.j < 0 or self.j0 < 0:
            raise ParameterError("j and j0 must be >= 0")
        if self.sigma_h < 0 or self.sigma_eps < 0:
            raise ParameterError("standard deviations must be >= 0")
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError("missing rate p must lie in [0, 1]")

    @classmethod
    def matched(cls, j: float, xi: float, mu_h: float, sigma_h: float, p: float = 0.5):
        return cls(j=j, xi=xi, j0=j, xi0=xi, mu_h=mu_h, sigma_h=sigma_h, p=p)

    def with_(self, **changes) -> "AnalysisSetup":
        return replace(self, **changes)


@dataclass(frozen=True)
class McConfig:
    """Finite-size Monte Carlo settings; biases are drawn Gaussian."""

    n: int = 4000
    trials: int = 400
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or self.trials < 1:
            raise InputError("Monte Carlo needs n >= 2 and trials >= 1")


def analytic_mse(s: AnalysisSetup) -> float:
    a = s.xi + s.j
    a0 = s.xi0 + s.j0
    bias_num = (s.xi - s.xi0) * s.mu_h + s.xi * s.mu_eps
    bias_den = s.xi * (s.xi0 + (1.0 - s.p) * s.j0)
    return (1.0 / a
            + (s.sigma_h / a - s.sigma_h / a0) ** 2
            + s.sigma_eps ** 2 / a0 ** 2
            + (bias_num / bias_den) ** 2)


def analytic_mse_min(s: AnalysisSetup) -> float:
    return 1.0 / (s.xi + s.j)


def _check_prior(n: int, j: float, xi: float, h: np.ndarray) -> np.ndarray:
    if n < 1:
        raise InputError("n must be >= 1")
    if xi <= 0 or j < 0:
        raise ParameterError("need xi > 0 and j >= 0")
    h = np.asarray(h, dtype=float).reshape(-1)
    if len(h) != n:
        raise InputError(f"expected {n} biases, got {len(h)}")
    return h


def prior_free_energy(n: int, j: float, xi: float, h) -> float:
    """Free energy per variable, ``-(1/n) ln Z``, of the fully-connected prior."""
    h = _check_prior(n, j, xi, h)
    a = xi + j
    sh = float(np.sum(h))
    return (-math.log(a / xi) / (2 * n)
            - 0.5 * math.log(2 * math.pi / a)
            - float(h @ h) / (2 * n * a)
            - j * sh * sh / (2 * n * n * a * xi))


def prior_moments_fc(n: int, j: float, xi: float, h) -> tuple[np.ndarray, np.ndarray]:
    """Means and covariance matrix of the fully-connected prior at size ``n``."""
    h = _check_prior(n, j, xi, h)
    a = xi + j
    shared = j / (n * a * xi)
    means = h / a + shared * np.sum(h)
    cov = np.eye(n) / a + shared
    return means, cov


def observed_field(n: int, j0: float, x_obs) -> float:
    """The field ``(J0/n) * sum of observed values`` felt by every missing vertex."""
    return j0 / n * float(np.sum(x_obs))


def conditional_moments_fc(n: int, t: int, j0: float, xi0: float, beta, f_obs: float) -> np.ndarray:
    """Conditional means of the ``t`` missing vertices of the reconstruction model."""
    if not 1 <= t <= n - 1:
        raise InputError(f"need 1 <= t <= n-1, got t={t}, n={n}")
    if xi0 <= 0 or j0 < 0:
        raise ParameterError("need xi0 > 0 and j0 >= 0")
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if len(beta) != t:
        raise InputError(f"expected {t} biases, got {len(beta)}")
    p = t / n
    a0 = xi0 + j0
    field = beta + f_obs
    return field / a0 + p * j0 / (t * a0 * (xi0 + (1 - p) * j0)) * np.sum(field)


def thermo_reconstruction(s: AnalysisSetup, beta_i, f_obs: float):
    """Large-n reconstruction of one missing vertex from its bias and the observed field."""
    a0 = s.xi0 + s.j0
    return ((np.asarray(beta_i, dtype=float) + f_obs) / a0
            + s.p * s.j0 * (s.mu_h + s.mu_eps + f_obs) / (a0 * (s.xi0 + (1 - s.p) * s.j0)))


def missing_count(p: float, n: int) -> int:
    # guard against p*n landing a hair above an integer
    return int(math.ceil(p * n - 1e-9))


@lru_cache(maxsize=2)
def _complete(n: int) -> Graph:
    return make_complete(n)


@lru_cache(maxsize=4)
def _dense_precision(n: int, coupling: float, xi: float) -> np.ndarray:
    q = precision_matrix(_complete(n), GgmParams(np.zeros(n), xi, coupling)).toarray()
    q.setflags(write=False)
    return q


@lru_cache(maxsize=2)
def _dense_covariance(n: int, coupling: float, xi: float) -> np.ndarray:
    s = Factor(_dense_precision(n, coupling, xi)).inverse()
    s.setflags(write=False)
    return s


def mc_mse(s: AnalysisSetup, cfg: McConfig) -> tuple[float, float]:
    """Monte Carlo estimate of the averaged MSE at finite ``n``.

    Each trial draws fresh biases, one prior sample, and a uniformly random
    missing set of size ``ceil(p n)``, then reconstructs with the exact
    conditional-mean solver. Returns ``(mean, standard error)``.
    """
    n = cfg.n
    t = missing_count(s.p, n)
    if not 1 <= t <= n - 1:
        raise InputError(f"ceil(p*n) = {t} leaves no missing or no observed vertex at n={n}")
    g = _complete(n)
    q_prior = _dense_precision(n, s.j / n, s.xi)
    q_model = _dense_precision(n, s.j0 / n, s.xi0)
    prior_factor = Factor(q_prior)
    # with more missing than observed vertices, conditioning on the observed block is cheaper
    s_model = _dense_covariance(n, s.j0 / n, s.xi0) if 2 * t > n else None

    def trial(seed_seq):
        rng = np.random.default_rng(seed_seq)
        h = rng.normal(s.mu_h, s.sigma_h, n)
        eps = rng.normal(s.mu_eps, s.sigma_eps, n)
        prior = GgmParams(h, s.xi, s.j / n)
        moments = GaussianMoments(mean=prior_factor.solve(h), factor=prior_factor)
        x = sample(g, prior, 1, seed=rng, moments=moments)[0]
        missing = rng.choice(n, size=t, replace=False)
        obs = Observation(x, missing)
        model = GgmParams(h + eps, s.xi0, s.j0 / n)
        recon = reconstruct_exact(g, model, obs, precision=q_model, covariance=s_model)
        return mse(x, recon, obs.missing)

    scores = np.asarray(parallel_map(trial, np.random.SeedSequence(cfg.seed).spawn(cfg.trials)))
    err = scores.std(ddof=1) / math.sqrt(cfg.trials) if cfg.trials > 1 else 0.0
    return float(scores.mean()), float(err)


def curve(s: AnalysisSetup, vary: str, grid: Sequence[float], mc: McConfig | None = None) -> SweepResult:
    """Analytic error along a grid of coupling errors (``vary="r"``, J0 = J + r)
    or missing rates (``vary="p"``); optionally with a Monte Carlo column."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise InputError("grid is empty")
    if vary == "r":
        setups = [s.with_(j0=s.j + r) for r in grid]
    elif vary == "p":
        setups = [s.with_(p=p) for p in grid]
    else:
        raise InputError(f"vary must be 'r' or 'p', got {vary!r}")
    result = SweepResult(
        x=grid,
        analytic=np.array([analytic_mse(u) for u in setups]),
        metadata={"vary": vary, "setup": s},
    )
    if mc is not None:
        est = [mc_mse(u, replace(mc, seed=mc.seed + k)) for k, u in enumerate(setups)]
        result.mean = np.array([e[0] for e in est])
        result.stderr = np.array([e[1] for e in est])
        result.trials = np.full(len(grid), mc.trials)
        result.metadata["mc"] = mc
    return result
