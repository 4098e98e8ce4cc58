"""
entangle replay: re-verify a serialized distillation plan
"""

import argparse
from pathlib import Path

import structlog

from ..core.config import Settings
from ..models.documents import load_plan
from ..processors.distill import rate_estimate, replay_plan
from .output import emit

logger = structlog.get_logger(__name__)


def add_parser(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "replay",
        parents=parents,
        help="Check a distillation plan written by 'analyze --plan'",
    )
    parser.add_argument("plan", type=Path)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    plan = load_plan(args.plan)
    result = replay_plan(plan, settings.tolerances)
    logger.info("plan_replayed", passed=result.passed, rate=rate_estimate(plan),
                failures=result.failures)
    emit(result, args.format)
    return 0 if result.passed else 1
