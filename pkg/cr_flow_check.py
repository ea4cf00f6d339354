#!/usr/bin/env python3
"""
CR Flow Checker
Command-line entry point: run verification suites against a model hypersurface,
sample points on it, or trace a flow trajectory.

Exit codes: 0 all checks passed, 1 a check failed (or a trace was truncated),
2 configuration or usage error.
"""

import argparse
import logging
import os
import sys

import mpmath as mp

# Add current directory to path for imports
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from errors import CRFlowError, ConfigError, DomainError
from flow_dynamics import FlowMap, flow_trace
from suite_runner import SuiteConfig, SuiteRunner, load_model_file
from surface_models import ModelSurface, sample_surface
from utils import (
    format_residual, parse_complex, parse_pair, parse_times, points_frame, trace_frame,
    write_frame_csv,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def cmd_check(args):
    """Run the suites of a suite config and write the JSON report."""
    suites = tuple(s.strip() for s in args.suite.split(',') if s.strip()) if args.suite else None
    config = SuiteConfig.from_file(
        args.config, suites=suites, precision_bits=args.precision_bits, seed=args.seed,
        out=args.out, csv=True if args.csv else None,
    )

    print("🚀 CR Flow Checker - check")
    print("=" * 70)
    print(f"Model: {config.model}")
    print(f"Suites: {', '.join(config.suites)}")
    print(f"Grid: n={config.n} annulus={list(config.annulus)} t={list(config.t_range)} seed={config.seed}")
    print("=" * 70)

    runner = SuiteRunner.from_config(config)
    runner.run_suites()
    written = runner.write_reports()
    runner.display_summary()
    for path in written:
        print(f"✅ Written {path}")

    if runner.passed:
        print("\n✅ All checks passed")
        return EXIT_OK
    failed = [r.check_name for r in runner.reports if not r.passed]
    print(f"\n❌ Failed: {', '.join(failed)}")
    return EXIT_FAILED


def cmd_sample(args):
    """Write a CSV of points sampled on a model."""
    model = load_model_file(args.config, args.precision_bits)
    with model.precision.workprec():
        annulus = parse_pair(args.annulus, 'annulus')
        t_range = parse_pair(args.t_range, 't range')
        points = sample_surface(model, args.n, annulus, t_range, args.seed)
    write_frame_csv(points_frame(points), args.out)
    print(f"✅ {len(points)} points written to {args.out}")
    return EXIT_OK


def cmd_trace(args):
    """Write the trajectory of a start point under the flow; exit 1 if it is cut short."""
    model = load_model_file(args.config, args.precision_bits)
    if not isinstance(model, ModelSurface):
        raise ConfigError("trace needs a model surface, not a radial one")
    with model.precision.workprec():
        z2 = parse_complex(args.z2, 'z2')
        if args.z1 is not None:
            z1 = parse_complex(args.z1, 'z1')
            residual = abs(model.eval_rho(z1, z2))
            if residual > model.point_tol:
                raise DomainError(f"start point is off the surface (|rho|={format_residual(residual)})")
        else:
            z1 = model.on_surface_z1(z2, mp.mpf(args.t0))
        times = parse_times(args.times)
        flow = FlowMap(model.a, model.alpha, model.precision)
        rows, error = flow_trace(flow, model, z1, z2, times)
    write_frame_csv(trace_frame(rows), args.out)

    if error is not None:
        last = format_residual(rows[-1]['t']) if rows else 'none'
        print(f"❌ Trace stopped ({error}); last good time: {last}", file=sys.stderr)
        print(f"⚠️  Partial trace ({len(rows)} rows) written to {args.out}")
        return EXIT_FAILED
    worst = max((row['rho_residual'] for row in rows), default=mp.mpf(0))
    print(f"✅ {len(rows)} rows written to {args.out} (max |rho| {format_residual(worst)})")
    return EXIT_OK


def parse_arguments(argv=None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description="Multiprecision checks for flows on infinite-type model hypersurfaces",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python cr_flow_check.py check --config configs/suite_default.json
  python cr_flow_check.py check --config configs/suite_default.json --suite invariance,group_law --precision-bits 128
  python cr_flow_check.py sample --config configs/default_alpha1.json --n 10 --out samples.csv
  python cr_flow_check.py trace --config configs/default_alpha1.json --z2 0.05+0.02i --times 0:1:0.1
        """
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="Run verification suites")
    check.add_argument("--config", required=True, help="Suite config JSON")
    check.add_argument("--suite", help="Comma-separated suite names (default: from config)")
    check.add_argument("--precision-bits", type=int, help="Mantissa bits (default: from model)")
    check.add_argument("--seed", type=int, help="Sampling seed (default: from config)")
    check.add_argument("--out", help="JSON report path (default: from config)")
    check.add_argument("--csv", action="store_true", help="Also write per-point CSV files")

    sample = sub.add_parser("sample", help="Sample points on a model")
    sample.add_argument("--config", required=True, help="Model JSON")
    sample.add_argument("--n", type=int, default=10, help="Number of points (default: 10)")
    sample.add_argument("--annulus", default="0.02,0.1", help="r_min,r_max (default: 0.02,0.1)")
    sample.add_argument("--t-range", default="-0.2,0.2", help="t_min,t_max (default: -0.2,0.2)")
    sample.add_argument("--seed", type=int, default=12345, help="Sampling seed (default: 12345)")
    sample.add_argument("--precision-bits", type=int, help="Mantissa bits (default: from model)")
    sample.add_argument("--out", default="samples.csv", help="CSV path (default: samples.csv)")

    trace = sub.add_parser("trace", help="Trace a flow trajectory")
    trace.add_argument("--config", required=True, help="Model JSON")
    trace.add_argument("--z2", required=True, help="Start z2, e.g. 0.05+0.02i")
    start = trace.add_mutually_exclusive_group()
    start.add_argument("--z1", help="Start z1 (must lie on the surface)")
    start.add_argument("--t0", default="0", help="Im z1 of the start point; Re z1 is solved (default: 0)")
    trace.add_argument("--times", default="0:1:0.1", help="start:stop:step or a comma list (default: 0:1:0.1)")
    trace.add_argument("--precision-bits", type=int, help="Mantissa bits (default: from model)")
    trace.add_argument("--out", default="trace.csv", help="CSV path (default: trace.csv)")

    return parser.parse_args(argv)


COMMANDS = {'check': cmd_check, 'sample': cmd_sample, 'trace': cmd_trace}


def main(argv=None):
    """Main execution function."""
    args = parse_arguments(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )
    try:
        return COMMANDS[args.command](args)
    except (CRFlowError, ValueError) as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"❌ Cannot write output: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
