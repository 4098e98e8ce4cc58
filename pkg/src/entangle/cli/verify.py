"""
entangle verify: run the randomized property suites
"""

import argparse

from ..core.config import Settings
from ..core.exceptions import InputError
from ..models.reports import VerificationSummary
from ..processors.verification import SUITES, run_seeds, run_verification, suite_names
from .output import emit


def add_parser(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "verify",
        parents=parents,
        help="Run property suites; exit 1 when any trial fails",
    )
    parser.add_argument("suite", nargs="?", default="all",
                        help=f"Suite name, comma-separated names or 'all' ({', '.join(SUITES)})")
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--acceptance", action="store_true",
                        help="Use the acceptance trial count of each suite instead of --trials")
    parser.add_argument("--trial-seed", type=int, default=None,
                        help="Re-run a single trial of one suite from its reported seed")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    names = suite_names(args.suite)
    tol = settings.tolerances
    if args.trial_seed is not None:
        if len(names) != 1:
            raise InputError("--trial-seed needs exactly one suite", suites=names)
        result = run_seeds(names[0], [args.trial_seed], tol)
        summary = VerificationSummary(seed=args.trial_seed, trials=1, suites=[result], all_passed=result.ok)
    else:
        if args.trials < 1:
            raise InputError("--trials must be positive", trials=args.trials)
        trials = None if args.acceptance else args.trials
        summary = run_verification(args.suite, trials, settings.seed, tol, names)
    emit(summary, args.format)
    return 0 if summary.all_passed else 1
