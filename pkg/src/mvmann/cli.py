"""Command-line entry point: ``mvmann {run,verify,axioms,constants}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .harness import ConfigError, format_table, parse_config, run_experiment, verify_suite
from .mappings import MAPPINGS, DomainError, estimate_min_constants, grid_reports, make_mapping
from .spaces import make_space, verify_axioms


def _cmd_run(args) -> int:
    cfg = parse_config(args.config)
    result = run_experiment(cfg)
    print(f"wrote {len(result['files'])} files to {result['output_dir']}")
    for row in result["rows"]:
        its = "not reached" if row.iterations_to_tol is None else row.iterations_to_tol
        print(f"  {row.scheme:<9} iterations_to_tol={its!s:<12} final_residual={row.final_residual:.3e}"
              f"  ({row.stop_reason}, {row.wall_time:.3f}s)")
    return 0


def _cmd_verify(args) -> int:
    spaces = args.space or None
    results = verify_suite(args.seed, spaces, include_negative_control=args.negative_control)
    print(format_table(results))
    return 0 if all(r.passed for r in results) else 1


def _cmd_axioms(args) -> int:
    space = make_space(args.space, args.dim)
    report = verify_axioms(space, args.samples, args.seed)
    print(json.dumps(report.to_dict(), indent=2))
    return 0 if report.all_passed else 1


def _cmd_constants(args) -> int:
    m = make_mapping(args.mapping)
    best = estimate_min_constants(m, args.grid, args.samples, args.seed)
    out = {"mapping": m.name, "grid_step": args.grid, "n_samples": args.samples, "seed": args.seed,
           "min_constants": None if best is None else {"a": best.a, "b": best.b}}
    if best is None:
        # the least-violated grid point, for a witness
        worst = max(grid_reports(m, args.grid, args.samples, args.seed), key=lambda r: r.worst_margin)
        out["closest"] = worst.to_dict()
    print(json.dumps(out, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mvmann", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a configured experiment")
    r.add_argument("--config", required=True)
    r.set_defaults(func=_cmd_run)

    v = sub.add_parser("verify", help="run the invariant suite")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--space", action="append", choices=["euclidean", "poincare", "tripod"],
                   help="restrict to a space (repeatable)")
    v.add_argument("--negative-control", action="store_true",
                   help="put the doubling map in the mean nonexpansive roster")
    v.set_defaults(func=_cmd_verify)

    a = sub.add_parser("axioms", help="sample the hyperbolic-space axioms")
    a.add_argument("--space", required=True, choices=["euclidean", "poincare", "tripod"])
    a.add_argument("--dim", type=int, default=None)
    a.add_argument("--samples", type=int, default=1000)
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=_cmd_axioms)

    c = sub.add_parser("constants", help="estimate minimal mean nonexpansive constants")
    c.add_argument("--mapping", required=True, choices=sorted(MAPPINGS))
    c.add_argument("--grid", type=float, default=0.05)
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=_cmd_constants)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
