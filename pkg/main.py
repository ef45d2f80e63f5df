#!/usr/bin/env python3
"""Main entry point for two-step mixture estimation."""

import argparse
import logging
import sys

from src.harness.config import build_config, load_config, parse_grid
from src.harness.constants import (DEFAULT_REPLICATIONS, DEFAULT_SEED, EXIT_DATA, EXIT_NUMERIC, EXIT_OK,
                                   EXIT_USAGE, TABLE_IDS, TOY_REPLICATIONS)
from src.harness.experiment import run_experiment
from src.harness.pipelines import erdf_pipeline, estimate_from_csv, write_synthetic_curves
from src.harness.selfcheck import run_selfcheck
from src.harness.tables import interval_study, reproduce_table
from src.kde.bandwidth import BandwidthPolicy
from src.model.exceptions import DataError, NumericError, ValidationError
from src.scenarios.constants import V54_CONVENTIONS, V54_LITERAL
from src.utils.logging import setup_logging

# Options whose value may start with a minus sign
VALUE_OPTIONS = ("--grid",)


class UsageErrorParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bandwidth(args) -> BandwidthPolicy:
    return BandwidthPolicy.parse(args.bandwidth or "silverman")


def _seed(args) -> int:
    return DEFAULT_SEED if args.seed is None else args.seed


def handle_simulate(args):
    """Run one Monte Carlo experiment and write its report."""
    values = load_config(args.config) if args.config else {}
    overrides = {
        "scenario": args.scenario,
        "n": args.n,
        "clusterers": args.clusterers,
        "include_em": "true" if args.include_em else None,
        "bandwidth": args.bandwidth,
        "grid": args.grid,
        "replications": args.reps,
        "seed": args.seed,
        "output": args.out,
        "workers": args.workers,
    }
    config = build_config(values, overrides)
    report = run_experiment(config)
    report.write(config.output_path or "output/simulation.csv")


def handle_table(args):
    """Reproduce one of the simulation tables."""
    seed = _seed(args)
    output = args.out or f"output/table_{args.id}.csv"
    if args.id == "toy":
        interval_study(replications=args.reps or TOY_REPLICATIONS, seed=seed, output_path=output)
        logging.info(f"Toy-model study written to {output}")
        return
    reproduce_table(args.id, replications=args.reps or DEFAULT_REPLICATIONS, master_seed=seed,
                    bandwidth=_bandwidth(args), workers=args.workers or 1, output_path=output,
                    grid=parse_grid(args.grid or "auto"))


def handle_estimate(args):
    """Two-step component densities from a y, x1..xd CSV file."""
    estimate_from_csv(args.input, args.m, args.clusterer, _bandwidth(args), parse_grid(args.grid or "auto"),
                      args.out or "output/densities.csv", seed=_seed(args))


def handle_erdf(args):
    """Consumption-curve features, clusters and component densities."""
    curves = args.input or "output/synthetic_curves.csv"
    if args.synthetic:
        write_synthetic_curves(curves, args.synthetic, seed=_seed(args))
    erdf_pipeline(curves, args.out or "output/erdf_densities.csv", convention=args.v54_convention,
                  bandwidth=_bandwidth(args), seed=_seed(args))


def handle_selfcheck(args):
    """Exact property checks against brute-force oracles."""
    results = run_selfcheck(seed=_seed(args))
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise NumericError(f"Self-check failed: {', '.join(failed)}")
    logging.info("All self-checks passed")


def create_parser():
    """Create argument parser."""
    parser = UsageErrorParser(description='Two-step nonparametric mixture estimation')
    subparsers = parser.add_subparsers(dest='command')

    # Arguments shared by every command
    common_args = argparse.ArgumentParser(add_help=False)
    common_args.add_argument('--seed', type=int,
                             help=f'Master seed (default: {DEFAULT_SEED})')
    common_args.add_argument('--verbose', '-v', action='store_true',
                             help='Show debug messages on the console')
    common_args.add_argument('--log-dir', default='output',
                             help='Directory for operations.log (default: output)')

    output_args = argparse.ArgumentParser(add_help=False)
    output_args.add_argument('--out', '-o',
                             help='Output CSV path')

    replication_args = argparse.ArgumentParser(add_help=False)
    replication_args.add_argument('--reps', type=int,
                                  help=f'Monte Carlo replications (default: {DEFAULT_REPLICATIONS})')
    replication_args.add_argument('--workers', type=int,
                                  help='Worker processes for replications (default: 1)')

    bandwidth_args = argparse.ArgumentParser(add_help=False)
    bandwidth_args.add_argument('--bandwidth', '-b',
                                help='Bandwidth policy: silverman, lscv or fixed:H (default: silverman)')

    grid_args = argparse.ArgumentParser(add_help=False)
    grid_args.add_argument('--grid',
                           help='Density grid LO:HI:G or auto (default: auto); LO may be negative')

    simulate_parser = subparsers.add_parser(
        'simulate', parents=[common_args, output_args, replication_args, bandwidth_args, grid_args],
        help='Run a Monte Carlo experiment')
    simulate_parser.add_argument('--config', '-c',
                                 help='Experiment configuration file (key = value lines)')
    simulate_parser.add_argument('--scenario',
                                 help='uniform, laplace, toy_uniform, circle_square or concentric')
    simulate_parser.add_argument('--n', type=int,
                                 help='Sample size')
    simulate_parser.add_argument('--clusterers',
                                 help='Comma-separated clusterers, e.g. radius_graph,kmeans,spectral:search')
    simulate_parser.add_argument('--include-em', action='store_true',
                                 help='Also score the EM benchmark')

    table_parser = subparsers.add_parser(
        'table', parents=[common_args, output_args, replication_args, bandwidth_args, grid_args],
        help='Reproduce a simulation table')
    table_parser.add_argument('--id', required=True, choices=TABLE_IDS,
                              help='Table to reproduce')

    estimate_parser = subparsers.add_parser('estimate', parents=[common_args, output_args, bandwidth_args, grid_args],
                                            help='Estimate component densities from a CSV file')
    estimate_parser.add_argument('--input', '-i', required=True,
                                 help='CSV with columns y, x1..xd')
    estimate_parser.add_argument('--m', '-m', type=int, default=2,
                                 help='Number of components (default: 2)')
    estimate_parser.add_argument('--clusterer', default='radius_graph',
                                 help='radius_graph, kmeans, spectral[:auto|search|SIGMA] or interval')

    erdf_parser = subparsers.add_parser('erdf', parents=[common_args, output_args, bandwidth_args],
                                        help='Cluster consumption curves and estimate component densities')
    erdf_parser.add_argument('--input', '-i',
                             help='CSV with 9 consumption columns')
    erdf_parser.add_argument('--synthetic', type=int, metavar='N',
                             help='Write N synthetic curves to the input path first')
    erdf_parser.add_argument('--v54-convention', choices=V54_CONVENTIONS, default=V54_LITERAL,
                             help=f'Reading of the variations around the disruption (default: {V54_LITERAL})')

    subparsers.add_parser('selfcheck', parents=[common_args], help='Run the oracle-equivalence checks')

    return parser


def join_option_values(argv):
    """Rewrite ``--grid -5:5:64`` as ``--grid=-5:5:64``.

    argparse reads a value that starts with '-' and is not a plain number
    as the next option.
    """
    joined = []
    values = iter(argv)
    for arg in values:
        if arg in VALUE_OPTIONS:
            value = next(values, None)
            if value is not None and value.startswith('-') and not value.startswith('--'):
                joined.append(f"{arg}={value}")
                continue
            joined.append(arg)
            if value is not None:
                joined.append(value)
            continue
        joined.append(arg)
    return joined


def validate_args(args):
    """Validate command line arguments."""
    if not args.command:
        return False, "No command specified"

    reps = getattr(args, 'reps', None)
    workers = getattr(args, 'workers', None)
    if reps is not None and reps < 1:
        return False, "--reps must be at least 1"
    if workers is not None and workers < 1:
        return False, "--workers must be at least 1"
    if args.seed is not None and args.seed < 0:
        return False, "--seed must be nonnegative"

    if args.command == 'table':
        if args.id == 'toy' and (args.bandwidth or args.grid or workers):
            return False, "--id toy takes only --reps, --seed and --out"

    elif args.command == 'estimate':
        if args.m < 2:
            return False, "--m must be at least 2"

    elif args.command == 'erdf':
        if args.synthetic is not None and (args.synthetic < 2 or args.synthetic % 2):
            return False, "--synthetic needs an even number of curves"
        if not args.synthetic and not args.input:
            return False, "--input is required unless --synthetic is given"

    return True, ""


def main(argv=None) -> int:
    parser = create_parser()
    args = parser.parse_args(join_option_values(sys.argv[1:] if argv is None else list(argv)))

    # Validate arguments before setting up logging
    valid, error = validate_args(args)
    if not valid:
        if error:
            print(f"Error: {error}")
        parser.print_help()
        return EXIT_USAGE

    setup_logging(args.log_dir, args.verbose, args.command)

    handlers = {
        'simulate': handle_simulate,
        'table': handle_table,
        'estimate': handle_estimate,
        'erdf': handle_erdf,
        'selfcheck': handle_selfcheck,
    }
    try:
        handlers[args.command](args)

    except ValidationError as e:
        logging.error(f"Invalid input: {e}")
        return EXIT_USAGE
    except DataError as e:
        logging.error(f"Data error: {e}")
        return EXIT_DATA
    except FileNotFoundError as e:
        logging.error(f"File not found: {e}")
        return EXIT_DATA
    except PermissionError as e:
        logging.error(f"Permission denied: {e}")
        return EXIT_DATA
    except NumericError as e:
        logging.error(f"Numerical failure: {e}")
        return EXIT_NUMERIC
    except KeyboardInterrupt:
        logging.info("Operation stopped by user")
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
