"""Maximum-likelihood fitting of (h, xi, J) from complete observations.

The model is an exponential family whose sufficient statistics are the
per-vertex means, the summed squares and the summed squared edge differences,
so the data enter only through :class:`EmpiricalMoments`. The regularized
objective is

    -1/N sum_mu ln P(x_mu) + lambda_h |h|^2 + lambda_xi xi^2 + lambda_j J^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ParameterError
from .ggm import GgmParams, exact_moments
from .graph import Graph

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True, eq=False)
class EmpiricalMoments:
    n_samples: int
    mean: np.ndarray
    second: np.ndarray
    edge_sq_diff: np.ndarray

    @property
    def sum_second(self) -> float:
        return float(np.sum(self.second))

    @property
    def sum_edge_sq_diff(self) -> float:
        return float(np.sum(self.edge_sq_diff))


@dataclass(frozen=True)
class LearnConfig:
    lambda_h: float = 1e-3
    lambda_xi: float = 1e-3
    lambda_j: float = 1e-3
    step: float = 1.0
    tol: float = 1e-6
    max_iter: int = 20000
    xi_floor: float = 1e-6
    j_floor: float = 0.0
    armijo_shrink: float = 0.5
    max_backtracks: int = 60

    def __post_init__(self):
        if min(self.lambda_h, self.lambda_xi, self.lambda_j) < 0:
            raise InputError("regularization weights must be >= 0")
        if self.xi_floor <= 0 or self.j_floor < 0:
            raise InputError("xi floor must be > 0 and J floor >= 0")
        if self.tol <= 0 or self.max_iter < 0 or self.step <= 0:
            raise InputError("tol and step must be > 0, max_iter >= 0")


@dataclass(frozen=True, eq=False)
class ParamGradient:
    h: np.ndarray
    xi: float
    j: float

    def as_vector(self) -> np.ndarray:
        return np.concatenate((self.h, [self.xi, self.j]))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.as_vector())))


@dataclass(frozen=True, eq=False)
class FitResult:
    params: GgmParams
    converged: bool
    iterations: int
    grad_max: float
    nll: float
    nll_history: np.ndarray = field(repr=False)

    def report(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "projected_gradient_max_abs": self.grad_max,
            "objective": self.nll,
            "xi": self.params.xi,
            "j": self.params.j,
        }


def empirical_moments(data: np.ndarray, g: Graph) -> EmpiricalMoments:
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data[None, :]
    if data.ndim != 2 or data.shape[0] < 1:
        raise InputError("data must be a nonempty (N, n) matrix")
    if data.shape[1] != g.n:
        raise InputError(f"data has {data.shape[1]} columns but graph has {g.n} vertices")
    diff = data[:, g.edges[:, 0]] - data[:, g.edges[:, 1]]
    return EmpiricalMoments(
        n_samples=data.shape[0],
        mean=data.mean(axis=0),
        second=(data ** 2).mean(axis=0),
        edge_sq_diff=(diff ** 2).mean(axis=0),
    )


def _edge_second_moment(g: Graph, mean: np.ndarray, cov: np.ndarray) -> float:
    i, k = g.edges[:, 0], g.edges[:, 1]
    var_part = cov[i, i] + cov[k, k] - 2.0 * cov[i, k]
    return float(np.sum(var_part + (mean[i] - mean[k]) ** 2))


def nll_and_gradient(g: Graph, p: GgmParams, em: EmpiricalMoments,
                     cfg: LearnConfig | None = None) -> tuple[float, ParamGradient]:
    """Regularized average negative log-likelihood and its exact gradient."""
    cfg = cfg or LearnConfig()
    if not isinstance(p, GgmParams):
        raise ParameterError("expected GgmParams")
    p.check_graph(g)
    mom = exact_moments(g, p)
    mu = mom.mean
    cov = mom.covariance()
    log_z = 0.5 * g.n * LOG_2PI - 0.5 * mom.factor.logdet() + 0.5 * float(p.h @ mu)
    nll = (-float(p.h @ em.mean) + 0.5 * p.xi * em.sum_second
           + 0.5 * p.j * em.sum_edge_sq_diff + log_z)
    nll += (cfg.lambda_h * float(p.h @ p.h) + cfg.lambda_xi * p.xi ** 2
            + cfg.lambda_j * p.j ** 2)

    model_second = float(np.trace(cov) + mu @ mu)
    model_edge = _edge_second_moment(g, mu, cov)
    grad = ParamGradient(
        h=mu - em.mean + 2.0 * cfg.lambda_h * p.h,
        xi=0.5 * (em.sum_second - model_second) + 2.0 * cfg.lambda_xi * p.xi,
        j=0.5 * (em.sum_edge_sq_diff - model_edge) + 2.0 * cfg.lambda_j * p.j,
    )
    return nll, grad


def default_init(em: EmpiricalMoments) -> GgmParams:
    """Isolated-vertex moment match: xi0 = 1 / mean variance, h = xi0 * mean, J = 0."""
    var = float(np.mean(em.second - em.mean ** 2))
    xi0 = 1.0 / var if var > 1e-12 else 1.0
    return GgmParams(h=xi0 * em.mean, xi=xi0, j=0.0)


def _project(theta: np.ndarray, cfg: LearnConfig) -> np.ndarray:
    out = theta.copy()
    out[-2] = max(out[-2], cfg.xi_floor)
    out[-1] = max(out[-1], cfg.j_floor)
    return out


def _unpack(theta: np.ndarray) -> GgmParams:
    return GgmParams(h=theta[:-2], xi=theta[-2], j=theta[-1])


def fit_moments(g: Graph, em: EmpiricalMoments, cfg: LearnConfig | None = None,
                init: GgmParams | None = None) -> FitResult:
    """Projected gradient descent with backtracking on the sufficient statistics.

    Trial steps follow the Barzilai-Borwein rule and are shrunk until the
    projected sufficient-decrease test passes, so every accepted step lowers
    the objective.

    Convergence is declared when the projected gradient step
    ``theta - proj(theta - grad)`` has max-abs entry <= ``cfg.tol``; this
    equals the plain gradient away from the floors.
    """
    cfg = cfg or LearnConfig()
    init = init if init is not None else default_init(em)
    init.check_graph(g)
    theta = _project(np.concatenate((init.h, [init.xi, init.j])), cfg)
    f, grad = nll_and_gradient(g, _unpack(theta), em, cfg)
    gvec = grad.as_vector()
    step = cfg.step
    history = [f]
    it = 0
    converged = False
    pg = np.inf
    while True:
        pg = float(np.max(np.abs(theta - _project(theta - gvec, cfg))))
        if pg <= cfg.tol:
            converged = True
            break
        if it >= cfg.max_iter:
            break
        accepted = False
        for _ in range(cfg.max_backtracks):
            cand = _project(theta - step * gvec, cfg)
            delta = cand - theta
            f_new, grad_new = nll_and_gradient(g, _unpack(cand), em, cfg)
            if f_new <= f + gvec @ delta + (delta @ delta) / (2.0 * step):
                accepted = True
                break
            step *= cfg.armijo_shrink
        if not accepted or f_new >= f:
            # no representable decrease left: the objective is at its roundoff floor
            break
        g_new = grad_new.as_vector()
        # Barzilai-Borwein guess for the next trial step; backtracking still
        # enforces descent, so this only changes how many trials are needed.
        dg = g_new - gvec
        curv = float(delta @ dg)
        step = float(delta @ delta) / curv if curv > 0 else step / cfg.armijo_shrink
        theta, f, gvec = cand, f_new, g_new
        history.append(f)
        it += 1
    return FitResult(
        params=_unpack(theta),
        converged=converged,
        iterations=it,
        grad_max=pg,
        nll=f,
        nll_history=np.asarray(history),
    )


def fit(g: Graph, data: np.ndarray, cfg: LearnConfig | None = None,
        init: GgmParams | None = None) -> FitResult:
    return fit_moments(g, empirical_moments(data, g), cfg, init)
