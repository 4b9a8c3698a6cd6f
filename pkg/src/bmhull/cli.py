"""Command line front end: `simulate --experiment <name> [options]`.

Precedence is defaults < config file < flags.  Writes <out>.csv and
<out>.json; the exit code is 0 exactly when every tolerance gate passes.
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from .errors import ConfigError, DegenerateSampleError
from .experiments import (
    EXPERIMENTS,
    parse_config,
    run_experiment,
    write_csv,
    write_summary,
)

_OVERRIDE_KEYS = (
    "experiment",
    "samples",
    "dt",
    "grid_h",
    "seed",
    "workers",
    "output_path",
    "loop_eps",
    "t_max",
    "inject_constant",
    "inject_fault",
)


def build_parser():
    p = argparse.ArgumentParser(
        prog="simulate",
        description="Monte Carlo experiments on planar Brownian hulls, "
        "loop functionals, and analytic kernel identities.",
    )
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="path to a JSON config document")
    p.add_argument("--samples", type=int)
    p.add_argument("--dt", type=float, help="path time step (also walker step cap)")
    p.add_argument("--grid-h", type=float, dest="grid_h", help="raster cell pitch")
    p.add_argument("--eps", help="comma separated decreasing band widths")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, help="overrides SIMULATE_WORKERS")
    p.add_argument("--out", dest="output_path", help="output basename (.csv/.json)")
    p.add_argument(
        "--no-rotate",
        action="store_true",
        help="disable the per-sample random rotation (debugging aid)",
    )
    p.add_argument("--loop-eps", type=float, dest="loop_eps",
                   help="loop diameter cutoff")
    p.add_argument("--t-max", type=float, dest="t_max",
                   help="loop duration ceiling")
    p.add_argument("--inject-constant", type=float, dest="inject_constant",
                   help="replace occupation by a constant density (harness test)")
    p.add_argument("--inject-fault", type=float, dest="inject_fault",
                   help="perturb Green values inside covariance checks")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    text = ""
    if args.config:
        try:
            text = pathlib.Path(args.config).read_text()
        except OSError as e:
            print(f"config error: cannot read {args.config}: {e}", file=sys.stderr)
            return 2
    overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS}
    if args.eps is not None:
        try:
            overrides["eps_list"] = tuple(float(tok) for tok in args.eps.split(","))
        except ValueError:
            print(f"config error: malformed --eps list {args.eps!r}", file=sys.stderr)
            return 2
    if args.no_rotate:
        overrides["rotate"] = False

    try:
        cfg = parse_config(text, overrides)
    except ConfigError as e:
        for v in e.violations:
            print(f"config error: {v}", file=sys.stderr)
        return 2

    try:
        result, rows, gates, runtime = run_experiment(cfg)
    except DegenerateSampleError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3

    base = pathlib.Path(cfg.output_path)
    if base.parent != pathlib.Path("."):
        base.parent.mkdir(parents=True, exist_ok=True)
    csv_path = base.with_suffix(".csv")
    json_path = base.with_suffix(".json")
    with open(csv_path, "w") as f:
        write_csv(rows, f)
    with open(json_path, "w") as f:
        write_summary(cfg, result, gates, runtime, f)

    for name, ok in gates.items():
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
    print(f"wrote {csv_path} and {json_path} ({runtime:.1f}s)")
    return 0 if all(gates.values()) else 1


if __name__ == "__main__":
    raise SystemExit(main())
