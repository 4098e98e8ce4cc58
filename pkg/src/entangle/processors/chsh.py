"""
Bell-CHSH evaluation and see-saw maximization over the local algebras
"""

from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..core.config import DEFAULT_TOLERANCES, Tolerances, get_settings
from ..core.exceptions import DimensionMismatch, InvariantViolation, NormExceeded, NotInAlgebra
from ..models.reports import ChshResult
from .bipartite import BipartiteSystem, State
from .matrix import adjoint, as_matrix, hermitian_part, operator_norm, sign_function
from .restarts import best_by, restart_rng, run_restarts
from .star_algebra import StarAlgebra, conditional_expectation

logger = structlog.get_logger(__name__)

CIRELSON_BOUND = 2.0 * np.sqrt(2.0)
RELATIVE_STOP = 1e-11


class ChshSquareIdentity(NamedTuple):
    lhs: float       # |omega(C)|^2
    square: float    # omega(C^2)
    identity: float  # 4 + omega([A, A'][B, B'])

    @property
    def gap(self) -> float:
        return abs(self.square - self.identity)


def _bell_operator(a, a2, b, b2) -> np.ndarray:
    return a @ (b2 + b) + a2 @ (b2 - b)


def _admissible(alg: StarAlgebra, observable, name: str, tol: Tolerances) -> np.ndarray:
    observable = hermitian_part(as_matrix(observable, name), tol, name)
    if observable.shape != (alg.ambient_dim, alg.ambient_dim):
        raise DimensionMismatch(f"{name} has the wrong size", shape=observable.shape,
                                ambient=alg.ambient_dim)
    norm = operator_norm(observable)
    if norm > 1.0 + tol.eig:
        raise NormExceeded(f"{name} has operator norm above one", name=name, norm=norm)
    if not alg.contains(observable, tol):
        raise NotInAlgebra(f"{name} is not in its local algebra", name=name,
                           residual=alg.membership_residual(observable))
    return observable


def chsh_value(system: BipartiteSystem, state: State, a, a2, b, b2,
               tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Signed omega(A(B'+B) + A'(B'-B))"""
    a = _admissible(system.alg_a, a, "A", tol)
    a2 = _admissible(system.alg_a, a2, "A'", tol)
    b = _admissible(system.alg_b, b, "B", tol)
    b2 = _admissible(system.alg_b, b2, "B'", tol)
    return float(np.real(state.expectation(_bell_operator(a, a2, b, b2))))


def optimal_dichotomic(alg: StarAlgebra, effective, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Hermitian A in the algebra with ||A|| <= 1 maximizing Re Tr(W A)"""
    effective = as_matrix(effective, "W")
    if effective.shape != (alg.ambient_dim, alg.ambient_dim):
        raise DimensionMismatch("effective operator has the wrong size",
                                shape=effective.shape, ambient=alg.ambient_dim)
    restricted = adjoint(conditional_expectation(alg, adjoint(effective)))
    return sign_function((restricted + adjoint(restricted)) / 2, tol)


def random_dichotomic(alg: StarAlgebra, rng: np.random.Generator,
                      tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    return sign_function(alg.random_hermitian(rng), tol)


class _Run(NamedTuple):
    value: float
    observables: Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    iterations: int


def _monotone(current: float, previous: float, step: str) -> float:
    if current < previous - 1e-9 * max(1.0, abs(previous)):
        raise InvariantViolation("see-saw objective decreased", step=step,
                                 before=previous, after=current)
    return current


def _seesaw(system: BipartiteSystem, rho: np.ndarray, start, max_iter: int,
            tol: Tolerances) -> _Run:
    a, a2, b, b2 = start

    def objective() -> float:
        return float(np.real(np.trace(rho @ _bell_operator(a, a2, b, b2))))

    value = objective()
    iterations = 0
    for iterations in range(1, max_iter + 1):
        before = value
        a = optimal_dichotomic(system.alg_a, (b2 + b) @ rho, tol)
        value = _monotone(objective(), value, "A")
        a2 = optimal_dichotomic(system.alg_a, (b2 - b) @ rho, tol)
        value = _monotone(objective(), value, "A'")
        b = optimal_dichotomic(system.alg_b, rho @ (a - a2), tol)
        value = _monotone(objective(), value, "B")
        b2 = optimal_dichotomic(system.alg_b, rho @ (a + a2), tol)
        value = _monotone(objective(), value, "B'")
        if abs(value - before) < RELATIVE_STOP * max(1.0, abs(value)):
            break
    return _Run(value=value, observables=(a, a2, b, b2), iterations=iterations)


def beta_seesaw(system: BipartiteSystem, state: State, restarts: Optional[int] = None,
                max_iter: Optional[int] = None, seed: int = 0,
                tol: Tolerances = DEFAULT_TOLERANCES, threads: Optional[int] = None) -> ChshResult:
    """Lower bound on the CHSH supremum by alternating dichotomic updates

    Every restart starts from seeded random dichotomic observables in the
    local algebras; the best restart wins, lowest index on ties.
    """
    settings = get_settings()
    restarts = restarts or settings.chsh_restarts
    max_iter = max_iter or settings.chsh_max_iter
    rho = state.density

    def attempt(index: int) -> _Run:
        rng = restart_rng(seed, index)
        start = (
            random_dichotomic(system.alg_a, rng, tol),
            random_dichotomic(system.alg_a, rng, tol),
            random_dichotomic(system.alg_b, rng, tol),
            random_dichotomic(system.alg_b, rng, tol),
        )
        return _seesaw(system, rho, start, max_iter, tol)

    results = run_restarts(attempt, restarts, threads)
    best_index, best = best_by(results, key=lambda run: run.value, maximize=True)

    value = chsh_value(system, state, *best.observables, tol=tol)
    if abs(value - best.value) > 1e-10 * max(1.0, abs(value)):
        raise InvariantViolation("CHSH value does not re-evaluate", search=best.value, direct=value)
    if value > CIRELSON_BOUND + 1e-8:
        raise InvariantViolation("CHSH value above the Cirel'son bound", value=value)

    algebras = (system.alg_a, system.alg_a, system.alg_b, system.alg_b)
    logger.debug("chsh_seesaw", beta=value, restart=best_index, iterations=best.iterations)
    return ChshResult(
        beta=value,
        value=value,
        observables=list(best.observables),
        membership_residuals=[alg.membership_residual(o) for alg, o in zip(algebras, best.observables)],
        norms=[operator_norm(o) for o in best.observables],
        iterations=best.iterations,
        restarts_used=restarts,
        best_restart=best_index,
    )


def chsh_square_identity(state: State, observables: Sequence[np.ndarray]) -> ChshSquareIdentity:
    """|omega(C)|^2, omega(C^2) and 4 + omega([A,A'][B,B']) for dichotomic observables"""
    a, a2, b, b2 = (np.asarray(o, dtype=complex) for o in observables)
    bell = _bell_operator(a, a2, b, b2)
    commutators = (a @ a2 - a2 @ a) @ (b @ b2 - b2 @ b)
    return ChshSquareIdentity(
        lhs=abs(state.expectation(bell)) ** 2,
        square=float(np.real(state.expectation(bell @ bell))),
        identity=4.0 + float(np.real(state.expectation(commutators))),
    )
