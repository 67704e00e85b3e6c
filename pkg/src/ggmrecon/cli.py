"""Command-line entry point: ``ggmrecon <subcommand> ...``.

Exit status: 0 success, 1 usage error, 2 data or convergence error.
"""

from __future__ import annotations

import argparse
import difflib
import json
import sys

import numpy as np

from . import io as gio
from .errors import GgmError
from .evaluation import MaskSpec, apply_mask, correlation, mse, quantize, sweep_p
from .ggm import Observation, sample
from .graph import build_road_graph
from .inference import MfeConfig, reconstruct_exact, reconstruct_mfe
from .learning import LearnConfig, fit
from .meanfield import AnalysisSetup, McConfig, curve

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
P_CAP = 0.999
SUBCOMMANDS = ("sample", "learn", "reconstruct", "evaluate", "sweep-p", "analyze", "road-graph")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_grid(text: str) -> np.ndarray:
    """``a:b:step`` (inclusive of ``b``) or a comma-separated list."""
    try:
        if ":" in text:
            a, b, step = (float(v) for v in text.split(":"))
            if step <= 0 or b < a:
                raise ValueError
            count = int(round((b - a) / step)) + 1
            return a + step * np.arange(count)
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; use a:b:step or v1,v2,...") from None


def _add_out(p):
    p.add_argument("--out", "-o", default=None, help="output file (default: standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ggmrecon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="SUBCOMMAND")
    sub.required = True

    p = sub.add_parser("sample", help="draw exact samples from a model")
    p.add_argument("--graph", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_out(p)

    p = sub.add_parser("learn", help="fit model parameters to complete samples")
    p.add_argument("--graph", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--lambda-h", type=float, default=1e-3)
    p.add_argument("--lambda-xi", type=float, default=1e-3)
    p.add_argument("--lambda-j", type=float, default=1e-3)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0, help="recorded; the default init is deterministic")
    p.add_argument("--report", default=None, help="write a JSON fit report here")
    _add_out(p)

    p = sub.add_parser("reconstruct", help="fill in missing entries of one observation")
    p.add_argument("--graph", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--obs", required=True, help="samples CSV holding the observation")
    p.add_argument("--row", type=int, default=0)
    p.add_argument("--mask", required=True, help="missing vertex indices, one per line")
    p.add_argument("--method", choices=("mfe", "exact"), default="mfe")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-sweeps", type=int, default=10000)
    _add_out(p)

    p = sub.add_parser("evaluate", help="mask, reconstruct and score one observation")
    p.add_argument("--graph", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--data", required=True, help="samples CSV holding the ground truth")
    p.add_argument("--row", type=int, default=0)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--p", type=float)
    grp.add_argument("--mask")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("mfe", "exact"), default="exact")
    p.add_argument("--quantize", default=None, help="write vertex,value,bin CSV of the reconstruction")
    _add_out(p)

    p = sub.add_parser("sweep-p", help="MSE against missing probability")
    p.add_argument("--graph", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--grid", type=parse_grid, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--refit", choices=("none", "loo"), default="none")
    _add_out(p)

    p = sub.add_parser("analyze", help="averaged-MSE curve of the fully-connected model")
    p.add_argument("--j", type=float, required=True)
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--j0", type=float, default=None, help="default: equal to --j (ignored for --sweep r)")
    p.add_argument("--xi0", type=float, default=None, help="default: equal to --xi")
    p.add_argument("--mu-h", type=float, required=True)
    p.add_argument("--sigma-h", type=float, required=True)
    p.add_argument("--mu-eps", type=float, default=0.0)
    p.add_argument("--sigma-eps", type=float, default=0.0)
    p.add_argument("--p", type=float, default=0.5, help="missing rate for --sweep r")
    p.add_argument("--sweep", choices=("r", "p"), required=True)
    p.add_argument("--grid", type=parse_grid, required=True)
    p.add_argument("--mc-n", type=int, default=None)
    p.add_argument("--mc-trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    _add_out(p)

    p = sub.add_parser("road-graph", help="convert a road description into a graph file")
    p.add_argument("--roads", required=True)
    _add_out(p)
    return parser


def _flags(args) -> dict:
    return {k: (v.tolist() if isinstance(v, np.ndarray) else v)
            for k, v in vars(args).items() if k != "command"}


def _finish(args, out: gio.Output, inputs, seed=None):
    out.write_manifest(gio.RunManifest.build(args.command, _flags(args), inputs, seed))


def _row(data: np.ndarray, row: int, path) -> np.ndarray:
    if not 0 <= row < data.shape[0]:
        raise GgmError(f"{path}: row {row} out of range (file has {data.shape[0]} rows)")
    return data[row]


def cmd_sample(args) -> int:
    g = gio.parse_graph_file(args.graph)
    params = gio.read_params(args.params)
    draws = sample(g, params, args.count, seed=args.seed)
    out = gio.Output(args.out)
    with out as fh:
        gio.write_matrix_csv(fh, draws)
    _finish(args, out, [args.graph, args.params], args.seed)
    return EXIT_OK


def cmd_learn(args) -> int:
    g = gio.parse_graph_file(args.graph)
    data = gio.read_matrix_csv(args.data)
    if np.isnan(data).any():
        raise GgmError("training data must be complete (no empty cells)")
    cfg = LearnConfig(lambda_h=args.lambda_h, lambda_xi=args.lambda_xi, lambda_j=args.lambda_j,
                      tol=args.tol, max_iter=args.max_iter)
    res = fit(g, data, cfg)
    out = gio.Output(args.out)
    with out as fh:
        fh.write(json.dumps(gio.params_to_dict(res.params), indent=2) + "\n")
    _finish(args, out, [args.graph, args.data], args.seed)
    if args.report:
        rep = gio.Output(args.report)
        with rep as fh:
            fh.write(json.dumps(res.report(), indent=2) + "\n")
        _finish(args, rep, [args.graph, args.data], args.seed)
    print(f"learn: iterations={res.iterations} gradient={res.grad_max:.3e} "
          f"converged={res.converged}", file=sys.stderr)
    return EXIT_OK if res.converged else EXIT_DATA


def _reconstruct(g, params, obs, method, tol=1e-10, max_sweeps=10000):
    if method == "mfe":
        return reconstruct_mfe(g, params, obs, MfeConfig(tolerance=tol, max_sweeps=max_sweeps))
    return reconstruct_exact(g, params, obs)


def cmd_reconstruct(args) -> int:
    g = gio.parse_graph_file(args.graph)
    params = gio.read_params(args.params)
    values = _row(gio.read_matrix_csv(args.obs), args.row, args.obs)
    obs = Observation(values, gio.read_mask_file(args.mask))
    res = _reconstruct(g, params, obs, args.method, args.tol, args.max_sweeps)
    out = gio.Output(args.out)
    with out as fh:
        gio.write_matrix_csv(fh, res.values[None, :])
    _finish(args, out, [args.graph, args.params, args.obs, args.mask])
    print(f"reconstruct: method={args.method} sweeps={res.sweeps_used} "
          f"residual={res.residual:.3e} converged={res.converged}", file=sys.stderr)
    return EXIT_OK if res.converged else EXIT_DATA


def cmd_evaluate(args) -> int:
    g = gio.parse_graph_file(args.graph)
    params = gio.read_params(args.params)
    truth = _row(gio.read_matrix_csv(args.data), args.row, args.data)
    if args.mask is not None:
        spec = MaskSpec(indices=tuple(gio.read_mask_file(args.mask).tolist()), seed=args.seed)
    else:
        spec = MaskSpec(p=min(args.p, P_CAP), seed=args.seed)
    draw = apply_mask(truth, spec)
    obs = draw.observation
    res = _reconstruct(g, params, obs, args.method)
    err = mse(truth, res, obs.missing)
    try:
        corr = correlation(truth, res, obs.missing)
    except GgmError:
        corr = None
    out = gio.Output(args.out)
    with out as fh:
        gio.write_table(fh, ["mse", "correlation", "n_missing", "redraws"],
                        [[err, corr, obs.missing.size, draw.redraws]])
    inputs = [args.graph, args.params, args.data, args.mask]
    _finish(args, out, inputs, args.seed)
    if args.quantize:
        qout = gio.Output(args.quantize)
        with qout as fh:
            bins = quantize(res.values)
            gio.write_table(fh, ["vertex", "value", "bin"],
                            ([i, v, b] for i, (v, b) in enumerate(zip(res.values, bins))))
        _finish(args, qout, inputs, args.seed)
    if draw.redraws:
        print(f"evaluate: mask redrawn {draw.redraws} time(s)", file=sys.stderr)
    return EXIT_OK if res.converged else EXIT_DATA


def cmd_sweep(args) -> int:
    g = gio.parse_graph_file(args.graph)
    params = gio.read_params(args.params)
    data = gio.read_matrix_csv(args.data)
    grid = np.minimum(args.grid, P_CAP)
    res = sweep_p(g, params, data, grid, args.trials, seed=args.seed, refit=args.refit)
    out = gio.Output(args.out)
    with out as fh:
        gio.write_table(fh, ["p", "mse_mean", "mse_stderr", "trials"],
                        zip(res.x, res.mean, res.stderr, res.trials))
    _finish(args, out, [args.graph, args.params, args.data], args.seed)
    return EXIT_OK


def cmd_analyze(args) -> int:
    setup = AnalysisSetup(
        j=args.j, xi=args.xi,
        j0=args.j if args.j0 is None else args.j0,
        xi0=args.xi if args.xi0 is None else args.xi0,
        mu_h=args.mu_h, sigma_h=args.sigma_h,
        mu_eps=args.mu_eps, sigma_eps=args.sigma_eps, p=args.p,
    )
    mc = McConfig(n=args.mc_n, trials=args.mc_trials, seed=args.seed) if args.mc_n else None
    res = curve(setup, args.sweep, args.grid, mc)
    out = gio.Output(args.out)
    with out as fh:
        if mc is None:
            gio.write_table(fh, ["x", "analytic_E"], zip(res.x, res.analytic))
        else:
            gio.write_table(fh, ["x", "analytic_E", "mc_E", "mc_stderr"],
                            zip(res.x, res.analytic, res.mean, res.stderr))
    _finish(args, out, [], args.seed)
    return EXIT_OK


def cmd_road_graph(args) -> int:
    g = build_road_graph(gio.parse_road_description_file(args.roads))
    out = gio.Output(args.out)
    with out as fh:
        fh.write(gio.format_graph(g))
    _finish(args, out, [args.roads])
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "learn": cmd_learn,
    "reconstruct": cmd_reconstruct,
    "evaluate": cmd_evaluate,
    "sweep-p": cmd_sweep,
    "analyze": cmd_analyze,
    "road-graph": cmd_road_graph,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
        close = difflib.get_close_matches(argv[0], SUBCOMMANDS, n=1)
        hint = f"; did you mean {close[0]!r}?" if close else ""
        print(f"ggmrecon: unknown subcommand {argv[0]!r}{hint}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except GgmError as exc:
        print(f"ggmrecon {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
