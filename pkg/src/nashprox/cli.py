"""Command line front end.

Subcommands: pgr, dist-pgr, pbr (replicated solver runs), bounds (rate and
complexity calculators only), validate (check a config document and its
game/graph assumptions without running). Exit codes: 0 success, 2 config or
schema rejection, 3 assumption or parameter validation failure, 4 runtime
failure of an iterative procedure.
"""

from __future__ import annotations

import argparse
import sys

from .best_response import contraction_certificate
from .errors import (ConfigError, Divergence, InnerSolveFailure, InvalidStep,
                     NoGeometricMixing, NonConvergence, NotStronglyMonotone)
from .experiments import ExperimentSpec, run_experiment
from .games import QuadraticGame, monotonicity_constants
from .graphs import mixing_params
from .serialize import build_game, build_graph, load_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_RUNTIME = 4

_RUN_SCHEMES = ("pgr", "dist-pgr", "pbr", "bounds")


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", required=True, metavar="<path>",
                     help="JSON experiment configuration")
    sub.add_argument("--quiet", action="store_true",
                     help="suppress the stdout summary")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nashprox",
        description="Variable sample-size solvers for stochastic Nash games")
    subs = parser.add_subparsers(dest="command", required=True)
    for scheme in _RUN_SCHEMES:
        sub = subs.add_parser(
            scheme, help=f"run the {scheme} scheme from a config document")
        _add_common(sub)
        sub.add_argument("--out", metavar="<dir>", default=None,
                         help="directory for trace.csv and report.json")
        sub.add_argument("--seed", type=int, default=None, metavar="<u64>",
                         help="override the config seed")
        sub.add_argument("--replications", type=int, default=None,
                         metavar="<n>", help="override the config replications")
    sub = subs.add_parser("validate",
                          help="validate a config document and its assumptions")
    _add_common(sub)
    return parser


def _print_run_summary(report, out_dir) -> None:
    d = report.as_dict()
    print(f"scheme {d['scheme']}: seed {d['seed']}, "
          f"{d['replications']} replication(s)")
    if d["scheme"] == "bounds":
        t = d["theory"]
        print(f"  q = {t['q']:.12g}, envelope constant = "
              f"{t['envelope_constant']:.12g}, rate = {t['envelope_rate']:.12g}")
        print(f"  K(eps) = {t['k_eps']:.12g}, M(eps) = {t['m_eps']:.12g}")
    else:
        print(f"  iterations {d['iterations']}, mean final error "
              f"{d['mean_final_error']:.6e}")
        env = d["theory"]["envelope"]
        print(f"  envelope rate {env['rate']:.6f} "
              f"({'holds' if env['ok'] else 'VIOLATED'}, max ratio "
              f"{env['max_ratio']:.3f}); fitted log-slope "
              f"{d['fit']['slope']:.6f} (r^2 {d['fit']['r_squared']:.4f})")
        c = d["counters"]
        print(f"  samples {c['total_samples']}, prox {c['prox_evals']}, "
              f"comm {c['comm_rounds']}, inner {c['inner_solves']}")
    if out_dir:
        print(f"  wrote {out_dir}/trace.csv and {out_dir}/report.json"
              if d["scheme"] != "bounds" else f"  wrote {out_dir}/report.json")


def _run(args) -> int:
    doc = load_config(args.config, scheme=args.command)
    doc = dict(doc)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.replications is not None:
        doc["replications"] = args.replications
    spec = ExperimentSpec.from_config(doc, scheme=args.command)
    report = run_experiment(spec, out_dir=args.out)
    if not args.quiet:
        _print_run_summary(report, args.out)
    return EXIT_OK


def _validate(args) -> int:
    doc = load_config(args.config)
    scheme = doc["scheme"] if "scheme" in doc else None
    if scheme is None:
        raise ConfigError("validate needs a 'scheme' key in the config")
    lines = [f"config: valid for scheme '{scheme}'"]
    seed = int(doc.get("seed", 0))
    if "game" in doc:
        game = build_game(doc["game"], seed)
        consts = monotonicity_constants(game)
        lines.append(
            f"game: eta = {consts.eta:.6g}, lip = {consts.lip:.6g}, "
            f"kappa = {consts.kappa:.6g}, nu = {consts.nu:.6g}"
            + (f", m_compact = {consts.m_compact:.6g}"
               if consts.m_compact is not None else ""))
        if scheme == "pbr" and isinstance(game, QuadraticGame):
            cert = contraction_certificate(game, float(doc["solver"]["mu"]))
            lines.append(
                f"best response: a = {cert.a:.6g} "
                f"({'contractive' if cert.a < 1.0 else 'NOT contractive'})")
    if "graph" in doc:
        graph = build_graph(doc["graph"])
        mp = mixing_params(graph)
        lines.append(
            f"graph: {graph.n_nodes} nodes, {len(graph.edges)} edges, "
            f"beta = {mp.beta:.6g}, theta = {mp.theta:.6g}")
    if not args.quiet:
        for line in lines:
            print(line)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return _validate(args)
        return _run(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (NotStronglyMonotone, NoGeometricMixing, InvalidStep) as err:
        print(f"assumption violated: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as err:
        print(f"invalid parameters: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NonConvergence, Divergence, InnerSolveFailure) as err:
        print(f"runtime failure: {err}", file=sys.stderr)
        return EXIT_RUNTIME


def main_exit() -> None:
    sys.exit(main())
