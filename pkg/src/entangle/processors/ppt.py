"""
Generalized positive-partial-transpose test for bipartite systems

For orthonormal bases {E_i} of Alice's algebra and {F_u} of Bob's, the ppt sum
of any paired family A_a = sum_i c_ai E_i, B_a = sum_u d_au F_u equals z† K z
with z_iu = sum_a c_ai d_au and the kernel

    K[(i,u),(j,v)] = omega(E_j E_i† F_u† F_v).

Vectors of this paired form span everything once the family length is free, so
the state is ppt exactly when K is positive semidefinite. A negative
eigenvector factors by SVD into an explicit violating family.
"""

from typing import List, NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg
import structlog

from ..core.config import DEFAULT_TOLERANCES, Tolerances, get_settings
from ..core.exceptions import DimensionMismatch, FamilyNotInAlgebra, InvariantViolation
from ..models.reports import CorrelationBound, PairedFamily, PartialTransposeAgreement, PptReport, Verdict
from .bipartite import BipartiteSystem, State, make_state, random_density, schmidt_rank_vector
from .matrix import adjoint, as_matrix, frobenius_norm, hermitian_eig, psd_margin
from .restarts import best_by, restart_rng, run_restarts
from .star_algebra import StarAlgebra

logger = structlog.get_logger(__name__)

KERNEL_HERMITICITY = 1e-9
CONVERGENCE = 1e-12


def _check_state(system: BipartiteSystem, state: State) -> None:
    if state.dim != system.ambient_dim:
        raise DimensionMismatch("state and system dimensions differ",
                                state=state.dim, ambient=system.ambient_dim)


def ppt_kernel(system: BipartiteSystem, state: State) -> np.ndarray:
    """Gram form of the ppt sums over the full algebra bases"""
    _check_state(system, state)
    e, f = system.alg_a.basis, system.alg_b.basis
    alice = np.einsum("jab,icb->jiac", e, np.conjugate(e), optimize=True)
    bob = np.einsum("uab,vac->uvbc", np.conjugate(f), f, optimize=True)
    weighted = np.matmul(state.density, alice)
    kernel = np.einsum("jiab,uvba->iujv", weighted, bob, optimize=True)
    size = system.alg_a.dim * system.alg_b.dim
    kernel = kernel.reshape(size, size)

    asymmetry = frobenius_norm(kernel - adjoint(kernel))
    if asymmetry > KERNEL_HERMITICITY * max(frobenius_norm(kernel), 1.0):
        raise InvariantViolation("ppt kernel is not hermitian", asymmetry=asymmetry)
    return (kernel + adjoint(kernel)) / 2


def ppt_sum(state: State, family_a: Sequence[np.ndarray], family_b: Sequence[np.ndarray]) -> complex:
    """sum_ab omega(A_b A_a† B_a† B_b), evaluated directly from the matrices"""
    if len(family_a) != len(family_b):
        raise DimensionMismatch("families must pair up", alice=len(family_a), bob=len(family_b))
    total = 0j
    for a_alpha, b_alpha in zip(family_a, family_b):
        for a_beta, b_beta in zip(family_a, family_b):
            total += state.expectation(a_beta @ adjoint(a_alpha) @ adjoint(b_alpha) @ b_beta)
    return total


def family_from_vector(system: BipartiteSystem, z: np.ndarray,
                       tol: Tolerances = DEFAULT_TOLERANCES, limit: Optional[int] = None):
    """Factor z_iu into sum_a c_a ⊗ d_a and map the factors into the algebras"""
    matrix = np.asarray(z, dtype=complex).reshape(system.alg_a.dim, system.alg_b.dim)
    left, singular_values, right = np.linalg.svd(matrix, full_matrices=False)
    keep = int(np.sum(singular_values > tol.rank * max(frobenius_norm(matrix), 1e-300)))
    if limit is not None:
        keep = min(keep, limit)
    roots = np.sqrt(singular_values[:keep])
    alice = [system.alg_a.element(roots[k] * left[:, k]) for k in range(keep)]
    bob = [system.alg_b.element(roots[k] * right[k, :]) for k in range(keep)]
    return alice, bob


def is_ppt(system: BipartiteSystem, state: State, tol: Tolerances = DEFAULT_TOLERANCES,
           keep_kernel: bool = True) -> PptReport:
    kernel = ppt_kernel(system, state)
    margin = psd_margin(kernel, tol)
    witness = None
    if not margin.positive:
        values, vectors = hermitian_eig(kernel, tol)
        alice, bob = family_from_vector(system, vectors[:, 0], tol)
        value = ppt_sum(state, alice, bob)
        witness = PairedFamily(alice=alice, bob=bob, value=float(np.real(value)), k=len(alice))
        if witness.value >= 0:
            raise InvariantViolation("npt witness does not re-evaluate negative",
                                     min_eig=margin.min_eig, value=witness.value)
    verdict = Verdict.PPT if margin.positive else Verdict.NPT
    logger.debug("ppt_checked", verdict=verdict.value, min_eig=margin.min_eig,
                 scale=margin.scale, kernel_size=kernel.shape[0])
    return PptReport(
        verdict=verdict,
        min_eig=margin.min_eig,
        scale=margin.scale,
        witness=witness,
        kernel=kernel if keep_kernel else None,
    )


def partial_transpose(rho, dim_a: int, dim_b: int) -> np.ndarray:
    """Transpose the first tensor factor in the computational basis"""
    rho = as_matrix(rho, "rho")
    if rho.shape != (dim_a * dim_b, dim_a * dim_b):
        raise DimensionMismatch("rho does not match the factor dimensions",
                                shape=rho.shape, dim_a=dim_a, dim_b=dim_b)
    tensor = rho.reshape(dim_a, dim_b, dim_a, dim_b)
    return tensor.transpose(2, 1, 0, 3).reshape(dim_a * dim_b, dim_a * dim_b)


def check_partial_transpose_agreement(system: BipartiteSystem, state: State,
                                      tol: Tolerances = DEFAULT_TOLERANCES) -> PartialTransposeAgreement:
    """Kernel verdict against the textbook partial-transpose verdict on a tensor system"""
    dim_a, dim_b = system.require_tensor()
    report = is_ppt(system, state, tol, keep_kernel=False)
    pt = psd_margin(partial_transpose(state.density, dim_a, dim_b), tol)
    pt_verdict = Verdict.PPT if pt.positive else Verdict.NPT
    return PartialTransposeAgreement(
        agrees=report.verdict == pt_verdict,
        kernel_verdict=report.verdict,
        pt_verdict=pt_verdict,
        margin_kernel=report.min_eig,
        margin_pt=pt.min_eig,
    )


def _require_members(alg: StarAlgebra, family: Sequence[np.ndarray], side: str,
                     tol: Tolerances) -> List[np.ndarray]:
    members = []
    for index, element in enumerate(family):
        element = as_matrix(element, f"{side}[{index}]")
        if not alg.contains(element, tol):
            raise FamilyNotInAlgebra(
                f"{side} family element {index} is not in the algebra",
                index=index, residual=alg.membership_residual(element),
            )
        members.append(element)
    return members


def polarized_matrix(system: BipartiteSystem, state: State,
                     family_a: Sequence[np.ndarray], family_b: Sequence[np.ndarray],
                     tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """X[(i,a),(j,b)] = omega(A_i B_a B_b† A_j†), positive for every state"""
    _check_state(system, state)
    family_a = _require_members(system.alg_a, family_a, "alice", tol)
    family_b = _require_members(system.alg_b, family_b, "bob", tol)
    products = np.array([a @ b for a in family_a for b in family_b])
    weighted = np.matmul(state.density, products)
    matrix = np.einsum("pab,qab->pq", weighted, np.conjugate(products), optimize=True)
    return (matrix + adjoint(matrix)) / 2


def polarized_partial_transpose(matrix: np.ndarray, n: int, m: int) -> np.ndarray:
    """Swap the Bob indices a <-> b of a polarized matrix"""
    return matrix.reshape(n, m, n, m).transpose(0, 3, 2, 1).reshape(n * m, n * m)


def correlation_bound_check(system: BipartiteSystem, state: State,
                            family_a: Sequence[np.ndarray], family_b: Sequence[np.ndarray],
                            tol: Tolerances = DEFAULT_TOLERANCES) -> CorrelationBound:
    """|omega(T)|^2 <= sum_ab omega(A_b A_a† B_a† B_b) for T = sum_a A_a B_a on ppt states"""
    family_a = _require_members(system.alg_a, family_a, "alice", tol)
    family_b = _require_members(system.alg_b, family_b, "bob", tol)
    t = sum(a @ b for a, b in zip(family_a, family_b))
    lhs = abs(state.expectation(t)) ** 2
    rhs = float(np.real(ppt_sum(state, family_a, family_b)))
    scale = max(1.0, abs(lhs), abs(rhs))
    state_is_ppt = is_ppt(system, state, tol, keep_kernel=False).is_ppt
    return CorrelationBound(lhs=lhs, rhs=rhs, holds=lhs <= rhs + tol.psd * scale,
                            state_is_ppt=state_is_ppt)


# k=2 witness search

class _Candidate(NamedTuple):
    value: float
    alice: np.ndarray  # (2, dimA) coefficients
    bob: np.ndarray    # (2, dimB) coefficients
    iterations: int


def _lowest(quadratic: np.ndarray) -> tuple:
    quadratic = (quadratic + adjoint(quadratic)) / 2
    norm = np.eye(quadratic.shape[0])
    values, vectors = scipy.linalg.eigh(quadratic, norm)
    return float(values[0]), vectors[:, 0] / np.linalg.norm(vectors[:, 0])


def _alternate(kernel: np.ndarray, dim_a: int, dim_b: int, bob: np.ndarray,
               max_iter: int) -> _Candidate:
    eye_a, eye_b = np.eye(dim_a), np.eye(dim_b)
    bob = bob / np.linalg.norm(bob)
    previous = np.inf
    alice = np.zeros((2, dim_a), dtype=complex)
    value = 0.0
    iterations = 0
    for iterations in range(1, max_iter + 1):
        lift_a = np.hstack([np.kron(eye_a, bob[k].reshape(dim_b, 1)) for k in range(2)])
        value, stacked = _lowest(adjoint(lift_a) @ kernel @ lift_a)
        alice = stacked.reshape(2, dim_a)

        lift_b = np.hstack([np.kron(alice[k].reshape(dim_a, 1), eye_b) for k in range(2)])
        value, stacked = _lowest(adjoint(lift_b) @ kernel @ lift_b)
        bob = stacked.reshape(2, dim_b)

        if abs(previous - value) < CONVERGENCE:
            break
        previous = value
    return _Candidate(value=value, alice=alice, bob=bob, iterations=iterations)


def npt_witness_search_k2(system: BipartiteSystem, state: State,
                          restarts: Optional[int] = None, max_iter: Optional[int] = None,
                          seed: int = 0, tol: Tolerances = DEFAULT_TOLERANCES,
                          threads: Optional[int] = None) -> Optional[PairedFamily]:
    """Search for two-element families with a negative ppt sum

    Alternates between the two sides; with one side fixed the sum is a
    hermitian form in the other side's stacked coefficients, normalized by
    sum_a ||A_a||_HS^2 = 1. Restart 0 starts from the two leading SVD terms
    of the kernel's lowest eigenvector, the others from seeded random Bob
    coefficients. Finding nothing is not a proof of ppt at k = 2.
    """
    settings = get_settings()
    restarts = restarts or settings.witness_restarts
    max_iter = max_iter or settings.witness_max_iter
    kernel = ppt_kernel(system, state)
    dim_a, dim_b = system.alg_a.dim, system.alg_b.dim
    _, vectors = hermitian_eig(kernel, tol)
    lowest = vectors[:, 0].reshape(dim_a, dim_b)
    _, _, right = np.linalg.svd(lowest)
    warm = np.zeros((2, dim_b), dtype=complex)
    warm[: min(2, right.shape[0])] = right[:2]

    def attempt(index: int) -> _Candidate:
        if index == 0:
            start = warm
        else:
            rng = restart_rng(seed, index)
            start = rng.normal(size=(2, dim_b)) + 1j * rng.normal(size=(2, dim_b))
        return _alternate(kernel, dim_a, dim_b, start, max_iter)

    results = run_restarts(attempt, restarts, threads)
    best_index, best = best_by(results, key=lambda c: c.value)
    scale = frobenius_norm(kernel)
    logger.debug("k2_witness_search", best_value=best.value, restart=best_index,
                 iterations=best.iterations, restarts=restarts)
    if best.value >= -tol.psd * max(scale, 1.0):
        return None

    alice = [system.alg_a.element(best.alice[k]) for k in range(2)]
    bob = [system.alg_b.element(best.bob[k]) for k in range(2)]
    value = float(np.real(ppt_sum(state, alice, bob)))
    if abs(value - best.value) > 1e-9 * max(1.0, abs(best.value)) + 1e-9:
        raise InvariantViolation("k=2 witness does not re-evaluate to the search value",
                                 search=best.value, direct=value)
    return PairedFamily(alice=alice, bob=bob, value=value, k=2, restart=best_index)


# Seeded test states on either side of the ppt boundary

def random_ppt_state(system: BipartiteSystem, seed: int, tol: Tolerances = DEFAULT_TOLERANCES,
                     steps: int = 40) -> State:
    """Random density pulled toward the maximally mixed state until it is ppt"""
    rho = random_density(system.ambient_dim, seed).density
    mixed = np.eye(system.ambient_dim) / system.ambient_dim

    def ppt_at(t: float) -> bool:
        return is_ppt(system, make_state((1 - t) * rho + t * mixed, tol=tol), tol,
                      keep_kernel=False).is_ppt

    if ppt_at(0.0):
        return make_state(rho, tol=tol)
    low, high = 0.0, 1.0
    for _ in range(steps):
        middle = (low + high) / 2
        if ppt_at(middle):
            high = middle
        else:
            low = middle
    # step past the boundary so the verdict is not decided by the tolerance band
    t = min(1.0, high + 1e-3)
    return make_state((1 - t) * rho + t * mixed, tol=tol)


def random_npt_state(system: BipartiteSystem, seed: int, tol: Tolerances = DEFAULT_TOLERANCES) -> State:
    """Entangled pure state with a seeded admixture of white noise, kept npt"""
    dim_a, dim_b = system.require_tensor()
    rng = np.random.default_rng(seed)
    psi = schmidt_rank_vector(dim_a, dim_b, min(dim_a, dim_b), int(rng.integers(2 ** 31)))
    noise = float(rng.uniform(0.0, 0.3))
    mixed = np.eye(system.ambient_dim) / system.ambient_dim
    while True:
        state = make_state((1 - noise) * np.outer(psi, psi.conj()) + noise * mixed, tol=tol)
        if not is_ppt(system, state, tol, keep_kernel=False).is_ppt or noise < 1e-6:
            return state
        noise /= 2
