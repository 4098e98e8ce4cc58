"""
entangle command line

Exit codes: 0 completed, 1 verification failed, 2 invalid input or no
construction for the input, 3 internal invariant violated or any other
unexpected error.
"""

import argparse
import sys
from typing import Callable, List, Optional

import structlog

from .. import __version__
from ..core.config import Settings, get_settings
from ..core.exceptions import ComputationError, EntangleError, InputError, InvariantViolation
from ..core.logging_config import setup_logging
from . import analyze, chain, replay, verify
from .output import FORMATS

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_INVARIANT = 3

Handler = Callable[[argparse.Namespace, Settings], int]


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--format", choices=FORMATS, default="json", help="Report format on stdout")
    parent.add_argument("--seed", type=int, default=None, help="Root seed (default ENTANGLE_SEED or 0)")
    parent.add_argument("--restarts", type=int, default=None, help="Restarts for the local searches")
    parent.add_argument("--log-level", default=None, help="Override ENTANGLE_LOG_LEVEL")
    tolerances = parent.add_argument_group("tolerances")
    for name in ("hermitian", "eig", "psd", "rank"):
        tolerances.add_argument(f"--tol-{name}", type=float, default=None, dest=f"tol_{name}")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entangle",
        description="Entanglement criteria for bipartite systems of commuting operator algebras",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [_common_options()]
    for module in (analyze, chain, verify, replay):
        module.add_parser(subparsers, parents)
    return parser


def _settings(args: argparse.Namespace) -> Settings:
    if args.seed is not None and args.seed < 0:
        raise ValueError(f"--seed must be non-negative, got {args.seed}")
    if args.restarts is not None and args.restarts < 1:
        raise ValueError(f"--restarts must be positive, got {args.restarts}")
    return get_settings().with_overrides(
        seed=args.seed,
        log_level=args.log_level,
        hermitian=args.tol_hermitian,
        eig=args.tol_eig,
        psd=args.tol_psd,
        rank=args.tol_rank,
    )


def _report_error(error: EntangleError) -> None:
    details = ", ".join(f"{key}={value}" for key, value in error.to_dict()["context"].items()
                        if value is not None)
    message = f"error: {type(error).__name__}: {error.message}"
    sys.stderr.write(message + (f" ({details})" if details else "") + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = _settings(args)
    except ValueError as error:
        sys.stderr.write(f"error: invalid option: {error}\n")
        return EXIT_INPUT
    setup_logging(settings)
    handler: Handler = args.handler

    try:
        return handler(args, settings)
    except InvariantViolation as error:
        logger.error("invariant_violated", command=args.command, message=error.message, **error.context)
        _report_error(error)
        return EXIT_INVARIANT
    except (InputError, ComputationError) as error:
        logger.error("command_failed", command=args.command, error=type(error).__name__,
                     message=error.message)
        _report_error(error)
        return EXIT_INPUT
    except Exception as error:
        logger.exception("unexpected_error", command=args.command, error=type(error).__name__)
        sys.stderr.write(f"error: internal error: {type(error).__name__}: {error}\n")
        return EXIT_INVARIANT


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
