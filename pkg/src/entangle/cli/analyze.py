"""
entangle analyze: classify the state in a bipartite document
"""

import argparse
from pathlib import Path

import structlog

from ..core.config import Settings
from ..models.documents import dump_document, load_document
from ..processors.bipartite import state_vector, system_from_document
from ..processors.classification import classify_state, parse_criteria
from ..processors.distill import distill_from_cyclic
from .output import emit

logger = structlog.get_logger(__name__)


def add_parser(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "analyze",
        parents=parents,
        help="Run ppt, CHSH and 1-distillability on a bipartite document",
    )
    parser.add_argument("input", type=Path, help="Bipartite document (JSON or YAML)")
    parser.add_argument("--criteria", default=None, help="Comma-separated subset of ppt,chsh,distill")
    parser.add_argument("--full", action="store_true", help="Include the ppt kernel matrix")
    parser.add_argument("--timings", action="store_true", help="Add wall-clock time per stage")
    parser.add_argument("--doubles", action="store_true", help="Also evaluate the doubles conditions")
    parser.add_argument("--plan", type=Path, default=None,
                        help="Write a cyclic-vector distillation plan for a pure state to this path")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    tol = settings.tolerances
    criteria = parse_criteria(args.criteria)
    system, state = system_from_document(load_document(args.input), tol)
    logger.info("document_loaded", path=str(args.input), ambient_dim=system.ambient_dim,
                alice_dim=system.alg_a.dim, bob_dim=system.alg_b.dim)

    report = classify_state(
        system, state,
        criteria=criteria,
        seed=settings.seed,
        restarts=args.restarts,
        tol=tol,
        timings=args.timings,
        full=args.full,
        doubles=args.doubles,
    )
    if args.plan is not None:
        plan = distill_from_cyclic(system, state_vector(state, tol), settings.seed, tol)
        dump_document(plan, args.plan)
        logger.info("plan_written", path=str(args.plan), fidelity=plan.singlet_fidelity)
    emit(report, args.format)
    return 0
