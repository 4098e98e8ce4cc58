"""
Full classification of a bipartite state and the implication-chain check
"""

import hashlib
import time
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional, Sequence

import numpy as np
import structlog

from ..core.config import DEFAULT_TOLERANCES, Tolerances
from ..core.exceptions import InputError
from ..models.reports import ChshResult, ClassificationReport, DistillabilityReport, PptReport
from .bipartite import BipartiteSystem, State
from .chsh import beta_seesaw
from .distill import doubles_condition_check, is_one_distillable
from .ppt import is_ppt

logger = structlog.get_logger(__name__)

CRITERIA = ("ppt", "chsh", "distill")
CLASSICAL_BOUND = 2.0
BELL_SLACK = 1e-7


def parse_criteria(value: Optional[str]) -> List[str]:
    if not value:
        return list(CRITERIA)
    selected = [item.strip() for item in value.split(",") if item.strip()]
    unknown = sorted(set(selected) - set(CRITERIA))
    if unknown:
        raise InputError("unknown criteria", unknown=unknown, known=list(CRITERIA))
    return [name for name in CRITERIA if name in selected]


def chain_violations(certified_separable: bool, ppt: Optional[PptReport],
                     chsh: Optional[ChshResult],
                     distillable: Optional[DistillabilityReport]) -> List[str]:
    """Recorded verdicts that contradict separable => ppt => (Bell-CHSH holds, not 1-distillable)"""
    violations = []
    if ppt is None:
        return violations
    if certified_separable and not ppt.is_ppt:
        violations.append("certified separable state is npt")
    if ppt.is_ppt and distillable is not None and distillable.certified:
        violations.append("ppt state certified 1-distillable")
    if ppt.is_ppt and chsh is not None and chsh.beta > CLASSICAL_BOUND + BELL_SLACK:
        violations.append("ppt state violates the Bell-CHSH inequality")
    return violations


def state_digest(system: BipartiteSystem, state: State) -> str:
    """sha256 over the algebra bases and the density"""
    digest = hashlib.sha256()
    for array in (system.alg_a.basis, system.alg_b.basis, state.density):
        digest.update(np.ascontiguousarray(np.round(array, 12)).tobytes())
    return digest.hexdigest()


@contextmanager
def _stage(timings: Dict[str, float], name: str) -> Iterator[None]:
    start = time.perf_counter()
    yield
    timings[name] = round(time.perf_counter() - start, 6)


def classify_state(system: BipartiteSystem, state: State, digest: Optional[str] = None,
                   criteria: Sequence[str] = CRITERIA, seed: int = 0,
                   restarts: Optional[int] = None, tol: Tolerances = DEFAULT_TOLERANCES,
                   timings: bool = False, full: bool = False,
                   doubles: bool = False) -> ClassificationReport:
    """Run the selected criteria and cross-check their verdicts"""
    stage_times: Dict[str, float] = {}
    ppt = chsh = distillable = doubles_check = None

    if "ppt" in criteria:
        with _stage(stage_times, "ppt"):
            ppt = is_ppt(system, state, tol, keep_kernel=full)
    if "chsh" in criteria:
        with _stage(stage_times, "chsh"):
            chsh = beta_seesaw(system, state, restarts=restarts, seed=seed, tol=tol)
    if "distill" in criteria:
        with _stage(stage_times, "distill"):
            distillable = is_one_distillable(system, state, restarts=restarts, seed=seed, tol=tol)
    if doubles:
        with _stage(stage_times, "doubles"):
            doubles_check = doubles_condition_check(system, state, tol)

    violations = chain_violations(state.certified_separable, ppt, chsh, distillable)
    if violations:
        logger.warning("implication_chain_violated", violations=violations)
    return ClassificationReport(
        digest=digest or state_digest(system, state),
        ppt=ppt,
        chsh=chsh,
        one_distillable=distillable,
        doubles=doubles_check,
        separable_certificate=state.certified_separable,
        chain_consistent=not violations,
        chain_violations=violations,
        tolerances=tol,
        seed=seed,
        timings=stage_times if timings else None,
    )
