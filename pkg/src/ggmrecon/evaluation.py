"""Masking, error metrics and the reconstruction-error-vs-missing-rate sweep."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateInputError, InputError
from .ggm import GgmParams, Observation, precision_matrix
from .graph import Graph
from .inference import ReconstructionResult, reconstruct_exact
from .learning import LearnConfig, fit
from .parallel import parallel_map

MAX_REDRAWS = 1000


@dataclass(frozen=True)
class MaskSpec:
    """Either a missing probability ``p`` or an explicit set of missing indices."""

    p: float | None = None
    indices: tuple[int, ...] | None = None
    seed: int = 0

    def __post_init__(self):
        if (self.p is None) == (self.indices is None):
            raise InputError("give exactly one of p or indices")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise InputError(f"missing probability must lie in [0, 1], got {self.p}")


@dataclass(frozen=True, eq=False)
class MaskDraw:
    observation: Observation
    seed_used: int
    redraws: int


@dataclass(eq=False)
class SweepResult:
    """Tabulated curve. ``mean``/``stderr``/``trials`` hold the empirical
    column and may be None for purely analytic curves."""

    x: np.ndarray
    mean: np.ndarray | None = None
    stderr: np.ndarray | None = None
    trials: np.ndarray | None = None
    analytic: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def rows(self):
        for k, x in enumerate(self.x):
            yield (
                float(x),
                None if self.analytic is None else float(self.analytic[k]),
                None if self.mean is None else float(self.mean[k]),
                None if self.stderr is None else float(self.stderr[k]),
                None if self.trials is None else int(self.trials[k]),
            )


def apply_mask(x: np.ndarray, spec: MaskSpec) -> MaskDraw:
    """Hide vertices of ``x``.

    With a probability, each vertex is missing independently. A draw leaving
    no missing or no observed vertex is repeated with ``seed + 1``; after
    ``MAX_REDRAWS`` attempts (always the case for p = 0 or p = 1) a
    :class:`DegenerateInputError` is raised.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if spec.indices is not None:
        idx = np.asarray(spec.indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise InputError(f"mask index outside 0..{n - 1}")
        if np.unique(idx).size == 0:
            raise InputError("explicit mask is empty")
        return MaskDraw(Observation(x, idx), spec.seed, 0)
    for redraw in range(MAX_REDRAWS):
        seed = spec.seed + redraw
        hidden = np.random.default_rng(seed).random(n) < spec.p
        k = int(hidden.sum())
        if 0 < k < n:
            return MaskDraw(Observation(x, np.flatnonzero(hidden)), seed, redraw)
    raise DegenerateInputError(
        f"p={spec.p}: no draw with both missing and observed vertices after {MAX_REDRAWS} tries")


def _missing_values(v, m: np.ndarray) -> np.ndarray:
    if isinstance(v, ReconstructionResult):
        v = v.values
    return np.asarray(v, dtype=float)[m]


def mse(truth: np.ndarray, recon, missing) -> float:
    """Mean squared error over the missing vertices only."""
    m = np.asarray(missing, dtype=np.int64)
    if m.size == 0:
        raise DegenerateInputError("MSE over an empty missing set")
    t = np.asarray(truth, dtype=float)
    r = recon.values if isinstance(recon, ReconstructionResult) else np.asarray(recon, dtype=float)
    if t.shape != r.shape:
        raise InputError("truth and reconstruction lengths differ")
    d = t[m] - r[m]
    return float(np.mean(d * d))


def correlation(truth: np.ndarray, recon, missing) -> float:
    """Pearson correlation between truth and reconstruction on the missing vertices."""
    m = np.asarray(missing, dtype=np.int64)
    if m.size < 2:
        raise DegenerateInputError("correlation needs at least two missing vertices")
    a = _missing_values(truth, m)
    b = _missing_values(recon, m)
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt((a @ a) * (b @ b))
    if denom == 0.0:
        raise DegenerateInputError("correlation undefined: zero variance")
    return float((a @ b) / denom)


def quantize(values: np.ndarray, width: float = 0.03, levels: int = 5) -> np.ndarray:
    """Bin ``k`` covers ``(k*width, (k+1)*width]``; out-of-range values go to the end bins."""
    v = np.asarray(values, dtype=float)
    bins = np.ceil(v / width).astype(np.int64) - 1
    return np.clip(bins, 0, levels - 1)


Reconstructor = Callable[[Graph, GgmParams, Observation], ReconstructionResult]


def sweep_p(g: Graph, p_model: GgmParams, data: np.ndarray, p_grid: Sequence[float],
            trials: int, seed: int = 0, refit: str = "none",
            learn_cfg: LearnConfig | None = None,
            reconstructor: Reconstructor | None = None) -> SweepResult:
    """MSE against missing probability with cycled leave-one-out hold-outs.

    Trial ``k`` holds out row ``k mod N`` as ground truth. With ``refit="loo"``
    parameters are refitted on the remaining rows (starting from ``p_model``);
    with ``"none"`` ``p_model`` is used as is.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise InputError("sweep needs a data matrix with at least two rows")
    if data.shape[1] != g.n:
        raise InputError("data column count does not match the graph")
    if trials < 1:
        raise InputError("trials must be >= 1")
    if refit not in ("none", "loo"):
        raise InputError("refit must be 'none' or 'loo'")
    n_rows = data.shape[0]

    loo_params: dict[int, GgmParams] = {}
    if refit == "loo":
        for row in sorted({k % n_rows for k in range(trials)}):
            rest = np.delete(data, row, axis=0)
            loo_params[row] = fit(g, rest, learn_cfg, init=p_model).params

    q_shared = precision_matrix(g, p_model) if refit == "none" and reconstructor is None else None

    def recon(params, obs):
        if reconstructor is not None:
            return reconstructor(g, params, obs)
        return reconstruct_exact(g, params, obs, precision=q_shared if refit == "none" else None)

    seqs = np.random.SeedSequence(seed).spawn(len(p_grid))
    means, errs = [], []
    for p, ss in zip(p_grid, seqs):
        trial_seeds = [int(s.generate_state(1)[0]) for s in ss.spawn(trials)]

        def one(k, p=p, trial_seeds=trial_seeds):
            row = k % n_rows
            truth = data[row]
            draw = apply_mask(truth, MaskSpec(p=p, seed=trial_seeds[k]))
            params = loo_params.get(row, p_model)
            return mse(truth, recon(params, draw.observation), draw.observation.missing)

        scores = np.asarray(parallel_map(one, range(trials)))
        means.append(scores.mean())
        errs.append(scores.std(ddof=1) / np.sqrt(trials) if trials > 1 else 0.0)
    return SweepResult(
        x=np.asarray(p_grid, dtype=float),
        mean=np.asarray(means),
        stderr=np.asarray(errs),
        trials=np.full(len(p_grid), trials),
        metadata={"seed": seed, "refit": refit, "n": g.n, "rows": n_rows},
    )
