#!/usr/bin/env python3
"""
Two-sided optimal stopping solver
Main entry point: solve | verify | angle | simulate | curve
"""

import argparse
import sys
import os
import logging

# Add src directory to Python path for imports
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

# Import configuration and setup
from config import StoppingConfig

logger = logging.getLogger(__name__)

# Import solver modules
from stopping.commands import StoppingCommands
from stopping.error_handlers import EXIT_INPUT, ErrorHandlers
from stopping.run_config import build_run_config


class StoppingArgumentParser(argparse.ArgumentParser):
    """Usage errors are input errors: exit 1 instead of argparse's 2"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_model_flags(parser):
    group = parser.add_argument_group('model parameters')
    group.add_argument('--alpha1', type=float, help='rate of the downward jump sizes')
    group.add_argument('--lambda1', type=float, help='intensity of downward jumps')
    group.add_argument('--alpha2', type=float, help='rate of the upward jump sizes')
    group.add_argument('--lambda2', type=float, help='intensity of upward jumps')
    group.add_argument('--r', type=float, help='discount rate')


def _add_common_flags(parser):
    parser.add_argument('--config', help='JSON run configuration; flags override its keys')
    parser.add_argument('--format', choices=('table', 'json'), help='output format (default table)')
    parser.add_argument('--output', help='write the output to this path instead of standard output')
    parser.add_argument('--solution', help='JSON solution document (as written by solve --format json)')


def build_parser():
    parser = StoppingArgumentParser(prog='main.py', description=StoppingConfig.DESCRIPTION)
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    solve = subparsers.add_parser('solve', help='roots, constants, thresholds and coefficients')
    verify = subparsers.add_parser('verify', help='verification hypotheses and angle identities')
    angle = subparsers.add_parser('angle', help='angles at both thresholds and interior smoothness')
    simulate = subparsers.add_parser('simulate', help='Monte Carlo estimates of the value function')
    curve = subparsers.add_parser('curve', help='CSV of x, V(x), |x| over a grid')

    for sub in (solve, verify, angle, simulate, curve):
        _add_model_flags(sub)
        _add_common_flags(sub)

    # hidden test hook: shift x2 to obtain a wrong solution
    verify.add_argument('--corrupt-x2', dest='corrupt_x2', type=float, help=argparse.SUPPRESS)

    simulate.add_argument('--n', type=int, help='paths per estimate')
    simulate.add_argument('--seed', type=int, help='seed of the random streams')
    simulate.add_argument('--workers', type=int, help='worker threads (results do not depend on it)')
    simulate.add_argument('--starts', type=float, nargs='+', help='starting points (default -x1 -x1/2 0 x2/2 x2)')
    simulate.add_argument('--perturb', type=float, help='also estimate rules with thresholds shifted by this amount')
    simulate.add_argument('--extrema', action='store_true', default=None,
                          help='also check the laws of the extrema and the overshoots')

    curve.add_argument('--grid-min', dest='grid_min', type=float)
    curve.add_argument('--grid-max', dest='grid_max', type=float)
    curve.add_argument('--grid-points', dest='grid_points', type=int)

    return parser


def run(argv=None, stream=None):
    """Parse arguments, run one command and return its exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = vars(args)
    try:
        run_config = build_run_config(args.command, flags, flags.get('config'))
        return StoppingCommands().run(run_config, stream)
    except Exception as error:
        return ErrorHandlers.handle(error, args.command)


def main():
    """Configure logging, validate the environment and run"""
    StoppingConfig.setup_logging()

    # Validate configuration
    config_errors = StoppingConfig.validate_config()
    if config_errors:
        logger.error("Configuration errors found:")
        for error in config_errors:
            logger.error(f"  - {error}")
        return EXIT_INPUT

    return run()


if __name__ == "__main__":
    sys.exit(main())
