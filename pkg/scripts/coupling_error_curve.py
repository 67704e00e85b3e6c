"""Averaged reconstruction error against the coupling error r = J0 - J.

The fully-connected setup uses J = 1, xi = xi0 = 0.2, mu_h = 1, sigma_h = 0.5,
no bias error and missing rate 0.5. With ``--mc-n`` a Monte Carlo column is
added next to the closed form.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from ggmrecon.meanfield import AnalysisSetup, McConfig, curve

from _common import write_csv


@dataclass(frozen=True)
class CurveConfig:
    r_min: float = -1.0
    r_max: float = 1.0
    step: float = 0.05
    mc_n: int = 0
    mc_trials: int = 100
    seed: int = 0


def run(cfg: CurveConfig):
    setup = AnalysisSetup.matched(j=1.0, xi=0.2, mu_h=1.0, sigma_h=0.5, p=0.5)
    grid = np.round(np.arange(cfg.r_min, cfg.r_max + cfg.step / 2, cfg.step), 12)
    mc = McConfig(n=cfg.mc_n, trials=cfg.mc_trials, seed=cfg.seed) if cfg.mc_n else None
    return curve(setup, "r", grid, mc)


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
        write_csv(a.out, ["r", "analytic_E"], zip(res.x, res.analytic))
    else:
        write_csv(a.out, ["r", "analytic_E", "mc_E", "mc_stderr"],
                  zip(res.x, res.analytic, res.mean, res.stderr))


if __name__ == "__main__":
    main()
