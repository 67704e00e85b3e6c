"""Averaged reconstruction error against the missing rate when the model is biased.

Prior J = 1, xi = 0.2, mu_h = 1, sigma_h = 0.5; model xi0 = 0.4, mu_eps = 0.1,
J0 = J. Under these errors the reconstruction gets worse as more is hidden.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from ggmrecon.meanfield import AnalysisSetup, McConfig, curve

from _common import write_csv


@dataclass(frozen=True)
class CurveConfig:
    step: float = 0.05
    mc_n: int = 0
    mc_trials: int = 100
    seed: int = 0


def run(cfg: CurveConfig):
    setup = AnalysisSetup(j=1.0, xi=0.2, j0=1.0, xi0=0.4, mu_h=1.0, sigma_h=0.5, mu_eps=0.1)
    grid = np.round(np.arange(0.0, 1.0 + cfg.step / 2, cfg.step), 12)
    if cfg.mc_n:
        # Monte Carlo needs at least one missing and one observed vertex
        grid = grid[(grid > 0) & (grid < 1)]
    mc = McConfig(n=cfg.mc_n, trials=cfg.mc_trials, seed=cfg.seed) if cfg.mc_n else None
    return curve(setup, "p", grid, mc)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--mc-n", type=int, default=0)
    ap.add_argument("--mc-trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    a = ap.parse_args()
    res = run(CurveConfig(step=a.step, mc_n=a.mc_n, mc_trials=a.mc_trials, seed=a.seed))
    if res.mean is None:
        write_csv(a.out, ["p", "analytic_E"], zip(res.x, res.analytic))
    else:
        write_csv(a.out, ["p", "analytic_E", "mc_E", "mc_stderr"],
                  zip(res.x, res.analytic, res.mean, res.stderr))


if __name__ == "__main__":
    main()
