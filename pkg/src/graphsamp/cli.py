"""Command-line interface.

Exit codes: 0 on success, 2 for configuration or parameter problems,
3 when a numeric failure hits at least one sweep cell.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import analysis, graphs, harness, recovery, sampling, signals
from .errors import GraphSampError, NumericError


def _cmd_gen(args) -> int:
    params = {"n": args.n}
    for name in ("k", "p", "radius", "rewire", "attach"):
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    g = graphs.generate_graph(args.kind, params, args.seed)
    graphs.save_graph(g, args.out)
    print(f"wrote {args.out} ({g.kind}, n={g.n}, components={g.components})")
    return 0


def _load_basis(path):
    g = graphs.load_graph(path)
    return g, graphs.spectral_decompose(graphs.normalize_shift(g))


def _cmd_synth(args) -> int:
    _, basis = _load_basis(args.graph)
    x = signals.synthesize_signal(basis, args.K, args.beta, args.seed)
    signals.save_signal(x, args.out)
    print(f"wrote {args.out} (n={basis.n}, K={args.K}, beta={args.beta:g})")
    return 0


def _cmd_scores(args) -> int:
    g, basis = _load_basis(args.graph)
    x = signals.load_signal(args.signal) if args.signal else None
    scores = sampling.make_scores(
        args.strategy,
        basis=basis,
        kappa=args.kappa,
        graph=g,
        x=x,
        sigma2=args.sigma2,
        floor=args.floor,
    )
    with open(args.out, "w") as fh:
        json.dump(scores.pi.tolist(), fh)
    print(f"wrote {args.out} ({args.strategy}, kappa={args.kappa})")
    return 0


_ESTIMATOR_ALIASES = {
    "sample_proj": "sample_proj",
    "ls": "least_squares",
    "st": "sampling_theory",
}


def _cmd_recover(args) -> int:
    g, basis = _load_basis(args.graph)
    x = signals.load_signal(args.signal)
    with open(args.scores) as fh:
        pi = np.asarray(json.load(fh), dtype=float)
    scores = sampling.SamplingScores(pi=pi, strategy="file")
    estimator = _ESTIMATOR_ALIASES[args.estimator]
    draw = sampling.draw_samples(x, scores, args.m, args.sigma2, args.seed)
    if estimator == "sample_proj":
        est = recovery.sample_proj(basis, args.kappa, draw, scores)
    elif estimator == "least_squares":
        est = recovery.least_squares_proj(basis, args.kappa, draw, scores)
    else:
        uniq, first = np.unique(draw.indices, return_index=True)
        est = recovery.sampling_theory_recover(
            basis, args.kappa, uniq, draw.observations[first]
        )
    err = float(np.linalg.norm(est.values - x.values))
    doc = {
        "estimator": est.estimator,
        "kappa": est.kappa,
        "rank_deficient": est.rank_deficient,
        "error_l2": err,
        "values": est.values.tolist(),
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh)
        print(f"wrote {args.out} (|x* - x| = {err:.6g})")
    else:
        json.dump(doc, sys.stdout)
        print()
    return 0


def _cmd_bounds(args) -> int:
    _, basis = _load_basis(args.graph)
    if args.kappa0_grid:
        grid = tuple(int(v) for v in args.kappa0_grid.split(","))
    else:
        grid = tuple(range(args.K, basis.n // 2 + 1))
    params = analysis.BoundParams(c1=args.c1, c=args.c, kappa0_grid=grid)
    result = analysis.minimax_lower_bound(
        basis, args.K, args.beta, args.mu, args.sigma2, args.m,
        args.norm_x, params, args.regime,
    )
    json.dump(
        {
            "regime": result.regime,
            "best_kappa0": result.best_kappa0,
            "bound_value": result.bound_value,
            "note": result.note,
        },
        sys.stdout,
    )
    print()
    return 0


def _cmd_classify(args) -> int:
    _, basis = _load_basis(args.graph)
    diag = analysis.type_diagnostics(basis, args.kappa0, args.threshold)
    json.dump(
        {
            "max_abs_entry_scaled": diag.max_abs_entry_scaled,
            "frobenius_sq": diag.frobenius_sq,
            "max_row_sq": diag.max_row_sq,
            "concentration_ratio": diag.concentration_ratio,
            "verdict": diag.verdict,
        },
        sys.stdout,
    )
    print()
    return 0


def _finish_run(rows, out_dir, config) -> int:
    paths = harness.emit_results(rows, out_dir, config=config)
    bad = sum(1 for r in rows if not math.isfinite(r.mse_mean))
    print(f"wrote {paths['csv']} ({len(rows)} rows, {bad} failed cells)")
    return 3 if bad else 0


def _cmd_run(args) -> int:
    config = harness.load_config(args.config)
    out = args.out or config.out_dir
    if out is None:
        raise GraphSampError("no output directory: pass --out or set run.out_dir")
    rows = harness.run_experiment(config, out_dir=out)
    return _finish_run(rows, out, config)


def _cmd_figure(args) -> int:
    config = harness.figure_config(args.tag, args.n, out_dir=args.out,
                                   trials=args.trials, master_seed=args.seed)
    rows = harness.run_experiment(config, out_dir=args.out)
    return _finish_run(rows, args.out, config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphsamp",
        description="Sampling-score design and bandlimited recovery of graph signals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph and save it as JSON")
    p.add_argument("--kind", required=True, choices=graphs.GENERATORS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, help="ring/ws neighbor count (even)")
    p.add_argument("--p", type=float, help="er edge probability")
    p.add_argument("--radius", type=float, help="rgg connection radius")
    p.add_argument("--rewire", type=float, help="ws per-edge rewiring probability")
    p.add_argument("--attach", type=int, help="ba edges per new node")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("synth", help="synthesize a decaying-tail signal on a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("scores", help="build a sampling distribution")
    p.add_argument("--strategy", required=True, choices=sampling.STRATEGIES)
    p.add_argument("--kappa", type=int)
    p.add_argument("--graph", required=True)
    p.add_argument("--signal", help="needed for the oracle design")
    p.add_argument("--sigma2", type=float)
    p.add_argument("--floor", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_scores)

    p = sub.add_parser("recover", help="draw noisy samples and recover the signal")
    p.add_argument("--estimator", required=True, choices=sorted(_ESTIMATOR_ALIASES))
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--scores", required=True, help="JSON probability vector")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--sigma2", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("bounds", help="evaluate the minimax lower bound")
    p.add_argument("--graph", required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--sigma2", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--norm-x", type=float, default=1.0, dest="norm_x")
    p.add_argument("--regime", required=True, choices=("uniform", "designed"))
    p.add_argument("--kappa0-grid", dest="kappa0_grid",
                   help="comma-separated candidate bandwidths")
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c", type=float, default=0.5)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("classify", help="flat vs row-concentrated basis diagnostics")
    p.add_argument("--graph", required=True)
    p.add_argument("--kappa0", type=int, required=True)
    p.add_argument("--threshold", type=float, default=10.0)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("run", help="run a TOML-configured experiment sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("figure", help="run one of the five reference-family sweeps")
    p.add_argument("--tag", required=True, choices=sorted(harness.FIGURE_FAMILIES))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=2023)
    p.set_defaults(func=_cmd_figure)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (GraphSampError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
