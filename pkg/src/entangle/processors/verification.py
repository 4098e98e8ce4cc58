"""
Randomized property suites for the entanglement criteria

Each suite draws one seed per trial from a stream keyed by (root seed, suite
position), so any failing trial can be reproduced from its seed alone with
`run_trial`.
"""

from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..core.config import DEFAULT_TOLERANCES, Tolerances
from ..core.exceptions import EntangleError, InvariantViolation, NotCyclic, UnknownSuite
from ..models.reports import SuiteResult, VerificationSummary
from .bipartite import (
    compose,
    random_density,
    random_separable,
    schmidt_rank_vector,
    singlet_vector,
    tensor_system,
)
from .chsh import beta_seesaw
from .distill import (
    apply_superoperator,
    distill_from_cyclic,
    is_one_distillable,
    random_separable_superoperator,
)
from .matrix import frobenius_norm, psd_margin
from .ppt import (
    check_partial_transpose_agreement,
    correlation_bound_check,
    is_ppt,
    polarized_matrix,
    polarized_partial_transpose,
    random_npt_state,
    random_ppt_state,
)

logger = structlog.get_logger(__name__)

SEESAW_RESTARTS = 4
BELL_SLACK = 1e-7
SHAPES = ((2, 2), (2, 3), (3, 3))


class TrialOutcome(NamedTuple):
    passed: bool
    margin: float
    excluded: bool = False


Trial = Callable[[int, Tolerances], TrialOutcome]


def _relative(min_eig: float, scale: float) -> float:
    return min_eig / max(scale, 1e-300)


def _random_family(alg, size: int, rng: np.random.Generator) -> List[np.ndarray]:
    return [alg.element(rng.normal(size=alg.dim) + 1j * rng.normal(size=alg.dim)) for _ in range(size)]


def separable_is_ppt(seed: int, tol: Tolerances) -> TrialOutcome:
    rng = np.random.default_rng(seed)
    system = tensor_system(*SHAPES[seed % len(SHAPES)], tol=tol)
    state = random_separable(system, int(rng.integers(1, 5)), seed, tol)
    report = is_ppt(system, state, tol, keep_kernel=False)
    return TrialOutcome(report.is_ppt, _relative(report.min_eig, report.scale))


def correlation_bound(seed: int, tol: Tolerances) -> TrialOutcome:
    rng = np.random.default_rng(seed)
    system = tensor_system(2, 2, tol=tol)
    state = random_ppt_state(system, seed, tol)
    size = int(rng.integers(1, 4))
    check = correlation_bound_check(system, state, _random_family(system.alg_a, size, rng),
                                    _random_family(system.alg_b, size, rng), tol)
    scale = max(1.0, abs(check.lhs), abs(check.rhs))
    return TrialOutcome(check.holds and check.state_is_ppt, (check.rhs - check.lhs) / scale)


def polarized_form(seed: int, tol: Tolerances) -> TrialOutcome:
    system = tensor_system(2, 2, tol=tol)
    state = random_ppt_state(system, seed, tol) if seed % 2 == 0 else random_npt_state(system, seed, tol)
    alice, bob = list(system.alg_a.basis), list(system.alg_b.basis)
    matrix = polarized_matrix(system, state, alice, bob, tol)
    positive = psd_margin(matrix, tol)
    transposed = psd_margin(polarized_partial_transpose(matrix, len(alice), len(bob)), tol)
    ppt = is_ppt(system, state, tol, keep_kernel=False).is_ppt
    passed = positive.positive and transposed.positive == ppt
    return TrialOutcome(passed, _relative(positive.min_eig, positive.scale))


def tensor_closure(seed: int, tol: Tolerances) -> TrialOutcome:
    system = tensor_system(2, 2, tol=tol)
    first = random_ppt_state(system, 2 * seed, tol)
    second = random_ppt_state(system, 2 * seed + 1, tol)
    composite, state = compose([(system, first), (system, second)], tol)
    report = is_ppt(composite, state, tol, keep_kernel=False)
    return TrialOutcome(report.is_ppt, _relative(report.min_eig, report.scale))


def ppt_bell(seed: int, tol: Tolerances) -> TrialOutcome:
    rng = np.random.default_rng(seed)
    system = tensor_system(2, 2, tol=tol)
    state = random_separable(system, int(rng.integers(1, 5)), seed, tol)
    result = beta_seesaw(system, state, restarts=SEESAW_RESTARTS, seed=seed, tol=tol)
    return TrialOutcome(result.beta <= 2.0 + BELL_SLACK, 2.0 - result.beta)


def ppt_preservation(seed: int, tol: Tolerances) -> TrialOutcome:
    system = tensor_system(2, 2, tol=tol)
    state = random_ppt_state(system, seed, tol)
    operation = random_separable_superoperator(system, (2, 2), seed, tol=tol)
    output_system, output = apply_superoperator(operation, state, tol)
    report = is_ppt(output_system, output, tol, keep_kernel=False)
    return TrialOutcome(report.is_ppt, _relative(report.min_eig, report.scale))


def witness_distill(seed: int, tol: Tolerances) -> TrialOutcome:
    system = tensor_system(2, 2, tol=tol)
    report = is_one_distillable(system, random_npt_state(system, seed, tol), seed=seed, tol=tol)
    if report.witness is None:
        return TrialOutcome(True, 0.0, excluded=True)
    return TrialOutcome(report.certified and report.transposition_gap <= 1e-9, -report.pt_min_eig)


def cyclic_distill(seed: int, tol: Tolerances) -> TrialOutcome:
    dim = 2 if seed % 2 == 0 else 3
    system = tensor_system(dim, dim, tol=tol)
    psi = schmidt_rank_vector(dim, dim, dim, seed)
    plan = distill_from_cyclic(system, psi, seed, tol)
    singlet = singlet_vector()
    normalized = plan.omega2 / plan.success_probability
    distance = frobenius_norm(normalized - np.outer(singlet, singlet.conj()))
    return TrialOutcome(plan.selection_residual <= 1e-9 and distance <= 1e-8, 1e-8 - distance)


def cyclic_deficient(seed: int, tol: Tolerances) -> TrialOutcome:
    """A Schmidt-deficient vector is not cyclic, so the pipeline must refuse it"""
    rng = np.random.default_rng(seed)
    dim = 2 if seed % 2 == 0 else 3
    system = tensor_system(dim, dim, tol=tol)
    psi = schmidt_rank_vector(dim, dim, int(rng.integers(1, dim)), seed)
    try:
        distill_from_cyclic(system, psi, seed, tol)
    except NotCyclic:
        return TrialOutcome(True, 0.0)
    return TrialOutcome(False, -1.0)


def pt_agreement(seed: int, tol: Tolerances) -> TrialOutcome:
    return pt_agreement_on(SHAPES[seed % len(SHAPES)], seed, tol)


def pt_agreement_on(dims: Tuple[int, int], seed: int, tol: Tolerances = DEFAULT_TOLERANCES) -> TrialOutcome:
    system = tensor_system(*dims, tol=tol)
    state = random_density(dims[0] * dims[1], seed)
    agreement = check_partial_transpose_agreement(system, state, tol)
    scale = max(frobenius_norm(state.density), 1e-300)
    borderline = abs(agreement.margin_pt) <= tol.psd * scale
    if borderline and not agreement.agrees:
        return TrialOutcome(True, agreement.margin_pt, excluded=True)
    return TrialOutcome(agreement.agrees, abs(agreement.margin_pt))


SUITES: Dict[str, Trial] = {
    "separable-ppt": separable_is_ppt,
    "correlation-bound": correlation_bound,
    "polarized": polarized_form,
    "tensor-closure": tensor_closure,
    "ppt-bell": ppt_bell,
    "ppt-preservation": ppt_preservation,
    "witness-distill": witness_distill,
    "cyclic-distill": cyclic_distill,
    "cyclic-deficient": cyclic_deficient,
    "pt-agreement": pt_agreement,
}

# Trials per suite for an acceptance run; pt-agreement covers 200 states per shape
ACCEPTANCE_TRIALS: Dict[str, int] = {
    "separable-ppt": 100,
    "correlation-bound": 100,
    "polarized": 50,
    "tensor-closure": 50,
    "ppt-bell": 100,
    "ppt-preservation": 50,
    "witness-distill": 100,
    "cyclic-distill": 50,
    "cyclic-deficient": 20,
    "pt-agreement": 200 * len(SHAPES),
}


def suite_names(selection: str) -> List[str]:
    if selection == "all":
        return list(SUITES)
    names = [name.strip() for name in selection.split(",") if name.strip()]
    unknown = [name for name in names if name not in SUITES]
    if unknown or not names:
        raise UnknownSuite(f"unknown suite {', '.join(unknown) or selection!r}", known=list(SUITES))
    return names


def trial_seeds(suite: str, seed: int, trials: int) -> List[int]:
    position = list(SUITES).index(suite)
    rng = np.random.default_rng([seed, position])
    return [int(s) for s in rng.integers(0, 2 ** 31, size=trials)]


def run_trial(suite: str, trial_seed: int, tol: Tolerances = DEFAULT_TOLERANCES) -> TrialOutcome:
    if suite not in SUITES:
        raise UnknownSuite(f"unknown suite {suite!r}", known=list(SUITES))
    return SUITES[suite](trial_seed, tol)


def run_seeds(suite: str, seeds: Sequence[int], tol: Tolerances = DEFAULT_TOLERANCES) -> SuiteResult:
    """Run one trial per seed; trials that raise an input or computation error count as failures"""
    passed = failed = excluded = 0
    worst = float("inf")
    failing: List[int] = []
    for trial_seed in seeds:
        try:
            outcome = run_trial(suite, trial_seed, tol)
        except InvariantViolation:
            raise
        except EntangleError as error:
            logger.warning("trial_error", suite=suite, seed=trial_seed, error=type(error).__name__,
                           **error.context)
            outcome = TrialOutcome(False, float("nan"))
        if outcome.excluded:
            excluded += 1
        if outcome.passed:
            passed += 1
        else:
            failed += 1
            failing.append(trial_seed)
        if np.isfinite(outcome.margin):
            worst = min(worst, outcome.margin)
    logger.info("suite_finished", suite=suite, passed=passed, failed=failed, excluded=excluded)
    return SuiteResult(
        suite=suite,
        trials=len(seeds),
        passed=passed,
        failed=failed,
        excluded=excluded,
        worst_margin=worst if np.isfinite(worst) else 0.0,
        failing_seeds=failing,
    )


def run_suite(suite: str, trials: int, seed: int = 0,
              tol: Tolerances = DEFAULT_TOLERANCES) -> SuiteResult:
    return run_seeds(suite, trial_seeds(suite, seed, trials), tol)


def run_verification(selection: str, trials: Optional[int], seed: int = 0,
                     tol: Tolerances = DEFAULT_TOLERANCES,
                     names: Optional[Sequence[str]] = None) -> VerificationSummary:
    """Run the selected suites; `trials=None` uses the acceptance size of each suite"""
    results = [
        run_suite(name, ACCEPTANCE_TRIALS[name] if trials is None else trials, seed, tol)
        for name in (names or suite_names(selection))
    ]
    return VerificationSummary(
        seed=seed,
        trials=sum(result.trials for result in results) if trials is None else trials,
        suites=results,
        all_passed=all(result.ok for result in results),
    )
