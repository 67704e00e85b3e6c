"""Reconstruction of missing vertices as conditional means.

``reconstruct_mfe`` iterates the mean-field fixed point

    x_i = (h_i + J * sum_{j in nbr(i)} z_j) / (xi + deg(i) * J),   i in M

in place, ascending vertex order (Gauss-Seidel). ``reconstruct_exact`` solves
the same linear system with a direct factorization. For a Gaussian model the
two agree at convergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import DegenerateInputError, InputError
from .ggm import Factor, GgmParams, Matrix, Observation, conditional_params
from .graph import Graph

INIT_RULES = ("decoupled", "zeros", "observed-mean")


@dataclass(frozen=True)
class MfeConfig:
    tolerance: float = 1e-10
    max_sweeps: int = 10000
    init: str = "decoupled"

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InputError("tolerance must be > 0")
        if self.max_sweeps < 1:
            raise InputError("max_sweeps must be >= 1")
        if self.init not in INIT_RULES:
            raise InputError(f"init must be one of {INIT_RULES}, got {self.init!r}")


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    values: np.ndarray
    sweeps_used: int
    converged: bool
    residual: float
    residual_history: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)


@njit(cache=True)
def _gauss_seidel(indptr, indices, z, order, h, xi, j, deg, tol, max_sweeps, history):
    residual = np.inf
    for sweep in range(max_sweeps):
        residual = 0.0
        for k in range(order.shape[0]):
            i = order[k]
            s = 0.0
            for ptr in range(indptr[i], indptr[i + 1]):
                s += z[indices[ptr]]
            new = (h[i] + j * s) / (xi + deg[i] * j)
            delta = abs(new - z[i])
            if delta > residual:
                residual = delta
            z[i] = new
        history[sweep] = residual
        if residual <= tol:
            return sweep + 1, residual
    return max_sweeps, residual


def _initial_guess(p: GgmParams, obs: Observation, rule: str) -> np.ndarray:
    m = obs.missing
    if rule == "decoupled":
        return p.h[m] / p.xi
    if rule == "zeros":
        return np.zeros(m.size)
    y = obs.y
    return np.full(m.size, y.mean() if y.size else 0.0)


def reconstruct_mfe(g: Graph, p: GgmParams, obs: Observation,
                    cfg: MfeConfig | None = None) -> ReconstructionResult:
    cfg = cfg or MfeConfig()
    p.check_graph(g)
    if obs.n != g.n:
        raise InputError(f"observation has {obs.n} entries but graph has {g.n} vertices")
    if obs.missing.size == 0:
        raise DegenerateInputError("no missing vertices: nothing to reconstruct")
    adj = g.adjacency
    z = np.array(obs.values, dtype=float)
    z[obs.missing] = _initial_guess(p, obs, cfg.init)
    history = np.empty(cfg.max_sweeps)
    sweeps, residual = _gauss_seidel(
        adj.indptr.astype(np.int64), adj.indices.astype(np.int64), z,
        obs.missing.astype(np.int64), p.h, p.xi, p.j, g.degree.astype(float),
        cfg.tolerance, cfg.max_sweeps, history,
    )
    return ReconstructionResult(
        values=z,
        sweeps_used=int(sweeps),
        converged=bool(residual <= cfg.tolerance),
        residual=float(residual),
        residual_history=history[:sweeps].copy(),
    )


def reconstruct_exact(g: Graph, p: GgmParams, obs: Observation,
                      precision: Matrix | None = None,
                      covariance: np.ndarray | None = None) -> ReconstructionResult:
    """Conditional mean by a direct solve of ``Q_MM x_M = h_M - Q_MO y``.

    ``precision`` may be a precomputed (dense or sparse) full precision matrix,
    which lets repeated reconstructions on one model skip the assembly.

    ``covariance`` may be the precomputed dense ``Q^{-1}``. When it is given
    and fewer vertices are observed than missing, the same mean is obtained
    as ``mu_M + S_MO S_OO^{-1} (y - mu_O)``, which factorizes the smaller
    observed block instead of ``Q_MM``.
    """
    m, o = obs.missing, obs.observed
    values = np.array(obs.values, dtype=float)
    if covariance is not None and 0 < o.size < m.size:
        p.check_graph(g)
        if obs.n != g.n or covariance.shape != (g.n, g.n):
            raise InputError("observation or covariance does not match the graph")
        mu = covariance @ p.h
        rows = np.take(covariance, o, axis=0)
        s_oo = np.take(rows, o, axis=1)
        gain = Factor(s_oo, overwrite=True).solve(obs.y - mu[o])
        values[m] = mu[m] + (rows.T @ gain)[m]
    else:
        q_mm, bias = conditional_params(g, p, obs, precision=precision)
        values[m] = Factor(q_mm, overwrite=True).solve(bias)
    return ReconstructionResult(values=values, sweeps_used=0, converged=True, residual=0.0)
