"""Command line entry point: ``cfprop {propagate,bench,quadrature}``."""
from __future__ import annotations

import argparse
import configparser
import logging
import sys
from dataclasses import replace

import numpy as np

from .bench import PRESETS, compute_reference, emit_csv, emit_table, format_csv, load_config, preset, run_benchmark
from .errors import CapabilityError, ConfigurationError, DomainError, ReferenceMismatch
from .model import morse_ground_state, walker_preston
from .quadrature import RULES, alpha_weights_for, make_rule, named_rule
from .schemes import SCHEME_NAMES, StepStats, builtin_scheme, propagate
from .spectral import apply_kinetic

log = logging.getLogger("cfprop")


def _names(text: str) -> tuple:
    return tuple(s for s in text.replace(",", " ").split() if s)


def _ints(text: str) -> tuple:
    return tuple(int(s) for s in _names(text))


def _config(args):
    cfg = preset(args.preset)
    if args.config:
        cfg = load_config(args.config, cfg)
    updates = {}
    if getattr(args, "schemes", None):
        updates["schemes"] = args.schemes
    if getattr(args, "steps", None):
        updates["steps"] = args.steps
    if getattr(args, "tol", None) is not None:
        updates["krylov_policy"] = "fixed"
        updates["krylov_tol"] = args.tol
    if getattr(args, "out", None):
        updates["output"] = args.out
    return replace(cfg, **updates) if updates else cfg


def cmd_propagate(args) -> int:
    cfg = _config(args)
    grid = cfg.grid
    model = walker_preston(cfg.morse, grid)
    u0 = morse_ground_state(cfg.morse, grid)
    ref = None
    if args.reference:
        ref = compute_reference(cfg)
    print(f"grid: [{cfg.x0:g}, {cfg.xN:g}) N={cfg.n_points}  t_final={cfg.t_final:.6f}")
    print(f"{'scheme':<12} {'n_steps':>8} {'fft_pairs':>10} {'norm-1':>11} {'energy':>14} {'max_m':>6} {'capped':>7}"
          + (f" {'error_l2':>11}" if ref is not None else ""))
    for name in cfg.schemes:
        for n in cfg.steps:
            stats = StepStats()
            u, pairs = propagate(builtin_scheme(name), u0, 0.0, cfg.t_final, n, model, cfg.krylov_for(n), stats)
            hu = apply_kinetic(u, grid, model.mu) + model.potential_at(cfg.t_final) * u
            energy = float(np.vdot(u, hu).real)
            line = (f"{name:<12} {n:>8d} {pairs:>10g} {np.linalg.norm(u) - 1:>11.3e} {energy:>14.10f} "
                    f"{max(stats.krylov_dims, default=0):>6d} {stats.capped:>7d}")
            if ref is not None:
                line += f" {np.linalg.norm(u - ref):>11.4e}"
            print(line)
    return 0


def cmd_bench(args) -> int:
    cfg = _config(args)
    records = run_benchmark(cfg, jobs=args.jobs)
    if cfg.output:
        emit_csv(records, cfg.output)
        print(emit_table(records))
        print(f"wrote {len(records)} records to {cfg.output}", file=sys.stderr)
    else:
        sys.stdout.write(format_csv(records))
    return 0


def _rule_from_config(path):
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    if not parser.has_section("quadrature"):
        raise ConfigurationError(f"{path}: missing [quadrature] section with nodes and weights")
    sec = parser["quadrature"]
    try:
        nodes = [float(v) for v in sec["nodes"].replace(",", " ").split()]
        weights = [float(v) for v in sec["weights"].replace(",", " ").split()]
    except KeyError as exc:
        raise ConfigurationError(f"{path}: [quadrature] needs {exc.args[0]!r}") from None
    return make_rule(nodes, weights, sec.get("name", "custom"))


def cmd_quadrature(args) -> int:
    rule = _rule_from_config(args.config) if args.config else named_rule(args.rule)
    W = alpha_weights_for(rule)
    np.set_printoptions(precision=17, linewidth=120)
    print(f"rule {rule.name}: {len(rule)} nodes, order {rule.order}")
    print("nodes:  ", " ".join(f"{c:.17g}" for c in rule.nodes))
    print("weights:", " ".join(f"{b:.17g}" for b in rule.weights))
    print("W (rows alpha_1..alpha_3, columns samples):")
    for row in W:
        print("  " + " ".join(f"{w:>24.17g}" for w in row))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfprop", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def run_options(p, steps_help):
        p.add_argument("--preset", default="walker-preston-64", choices=sorted(PRESETS))
        p.add_argument("--config", help="INI file with [grid], [model] and [run] sections")
        p.add_argument("--schemes", type=_names, help=f"comma separated, from {', '.join(SCHEME_NAMES)}")
        p.add_argument("--steps", type=_ints, help=steps_help)
        p.add_argument("--tol", type=float, help="fixed Krylov tolerance for every exponential")

    p = sub.add_parser("propagate", help="single runs with final-state diagnostics")
    run_options(p, "step counts to run")
    p.add_argument("--reference", action="store_true", help="also report the error against the reference")
    p.add_argument("--out", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("bench", help="error-versus-cost sweep written as CSV")
    run_options(p, "strictly increasing step counts")
    p.add_argument("--out", help="CSV path (default: CSV on stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent cells")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("quadrature", help="print the sample-to-alpha matrix W of a rule")
    p.add_argument("--rule", default="gl6", choices=sorted(RULES))
    p.add_argument("--config", help="INI file with [quadrature] nodes = ... and weights = ...")
    p.set_defaults(func=cmd_quadrature)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ReferenceMismatch as exc:
        print(f"cfprop: reference validation failed: {exc}", file=sys.stderr)
        return 3
    except (ConfigurationError, DomainError, CapabilityError) as exc:
        print(f"cfprop: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cfprop: {exc}", file=sys.stderr)
        return 2
