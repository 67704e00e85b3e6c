"""Check the closed-form averaged error against finite-size Monte Carlo.

Prints one row per setup (coupling error r or missing rate p) with the z-score (MC - analytic) / stderr.
Defaults match the acceptance run (n = 4000, 400 trials); pass smaller
values for a quick look.
"""

import argparse
from dataclasses import dataclass

from ggmrecon.meanfield import AnalysisSetup, McConfig, analytic_mse, mc_mse

from _common import write_csv

COUPLING = AnalysisSetup.matched(j=1.0, xi=0.2, mu_h=1.0, sigma_h=0.5, p=0.5)
BIAS = AnalysisSetup(j=1.0, xi=0.2, j0=1.0, xi0=0.4, mu_h=1.0, sigma_h=0.5, mu_eps=0.1)


@dataclass(frozen=True)
class ValidationConfig:
    n: int = 4000
    trials: int = 400
    seed: int = 0


def cases():
    for r in (-0.5, 0.0, 1.0):
        yield "r", r, COUPLING.with_(j0=COUPLING.j + r)
    for p in (0.2, 0.5, 0.8):
        yield "p", p, BIAS.with_(p=p)


def run(cfg: ValidationConfig):
    rows = []
    for k, (vary, value, s) in enumerate(cases()):
        est, se = mc_mse(s, McConfig(n=cfg.n, trials=cfg.trials, seed=cfg.seed + k))
        exact = analytic_mse(s)
        rows.append((vary, value, exact, est, se, (est - exact) / se))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--trials", type=int, default=400)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    a = ap.parse_args()
    rows = run(ValidationConfig(n=a.n, trials=a.trials, seed=a.seed))
    write_csv(a.out, ["vary", "value", "analytic_E", "mc_E", "mc_stderr", "z"], rows)


if __name__ == "__main__":
    main()
