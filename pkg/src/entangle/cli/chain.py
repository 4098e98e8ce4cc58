"""
entangle chain: sweep spin-chain cells and stream one row per cell
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, List

import pandas as pd
import structlog

from ..core.config import Settings
from ..core.exceptions import InputError
from ..models.documents import SweepConfig, load_sweep, parse_model
from ..models.reports import SweepRow
from ..processors.classification import parse_criteria
from ..processors.lattice import check_sweep, run_cell, sweep_cells

logger = structlog.get_logger(__name__)

TEXT_COLUMNS = ("cell", "sites", "transverse_field", "sites_a", "sites_b", "gap", "state", "beta",
                "ppt_verdict", "ppt_margin", "chsh_beta", "distillable", "chain_consistent", "error")


def add_parser(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "chain",
        parents=parents,
        help="Classify region pairs of transverse-field Ising chains",
    )
    parser.add_argument("--config", type=Path, default=None, help="Sweep configuration (YAML or JSON)")
    parser.add_argument("--sites", type=int, default=6)
    parser.add_argument("--coupling", type=float, default=1.0)
    parser.add_argument("--field", type=float, action="append", default=None,
                        help="Transverse field; repeat to sweep")
    parser.add_argument("--boundary", choices=("open", "periodic"), default="open")
    parser.add_argument("--region", action="append", default=None,
                        help="Region pair as A:B with comma-separated sites, e.g. 2:3 or 0,1:4,5")
    parser.add_argument("--beta", type=float, action="append", default=None,
                        help="Gibbs inverse temperature; repeat to sweep")
    parser.add_argument("--no-ground", action="store_true", help="Skip the ground-state cells")
    parser.add_argument("--criteria", default=None, help="Comma-separated subset of ppt,chsh,distill")
    parser.add_argument("--csv", type=Path, default=None, help="Also write the table as CSV")
    parser.set_defaults(handler=run)


def parse_region(text: str) -> Dict[str, List[int]]:
    try:
        left, right = text.split(":")
        return {
            "sites_a": [int(site) for site in left.split(",") if site.strip()],
            "sites_b": [int(site) for site in right.split(",") if site.strip()],
        }
    except ValueError:
        raise InputError(f"cannot read region pair {text!r}; expected A:B like 0,1:4,5") from None


def config_from_flags(args: argparse.Namespace) -> SweepConfig:
    fields = args.field or [1.0]
    data = {
        "chain": {
            "sites": args.sites,
            "coupling": args.coupling,
            "transverse_field": fields[0],
            "boundary": args.boundary,
        },
        "regions": [parse_region(text) for text in (args.region or ["0:1"])],
        "ground": not args.no_ground,
        "betas": args.beta or [],
        "fields": fields[1:],
    }
    return parse_model(SweepConfig, data, "command line")


def _text_row(row: SweepRow) -> str:
    values = row.model_dump(mode="json")
    cells = []
    for column in TEXT_COLUMNS:
        value = values[column]
        if isinstance(value, float):
            value = f"{value:.6g}"
        elif isinstance(value, list):
            value = ",".join(str(site) for site in value)
        cells.append("-" if value is None else str(value))
    return "\t".join(cells)


def run(args: argparse.Namespace, settings: Settings) -> int:
    config = load_sweep(args.config) if args.config is not None else config_from_flags(args)
    criteria = parse_criteria(args.criteria)
    check_sweep(config)

    if args.format == "text":
        sys.stdout.write("\t".join(TEXT_COLUMNS) + "\n")
    rows: List[SweepRow] = []
    for cell in sweep_cells(config):
        row = run_cell(cell, criteria, settings.seed, args.restarts, settings.tolerances)
        rows.append(row)
        if args.format == "json":
            sys.stdout.write(row.model_dump_json() + "\n")
        else:
            sys.stdout.write(_text_row(row) + "\n")
        sys.stdout.flush()

    if args.csv is not None:
        frame = pd.DataFrame([row.model_dump(mode="json") for row in rows])
        frame.to_csv(args.csv, index=False)
        logger.info("sweep_table_written", path=str(args.csv), rows=len(frame))
    logger.info("sweep_finished", cells=len(rows), failed=sum(row.error is not None for row in rows))
    return 0
