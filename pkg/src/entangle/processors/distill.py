"""
Completely positive maps, separable operations and distillation protocols

CP maps go from the k x k matrices into an algebra on the ambient space and
are stored by their Choi matrix

    choi = sum_ab T(|a><b|) ⊗ |a><b|      (ambient factor first)

so block (a, b) is choi.reshape(d, k, d, k)[:, a, :, b]. Positivity of the
map is one eigenvalue check on the Choi matrix.
"""

from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..core.config import DEFAULT_TOLERANCES, Tolerances
from ..core.exceptions import (
    AbelianAlgebra,
    AbelianCorner,
    DimensionMismatch,
    InvalidOperation,
    InvariantViolation,
    NotCyclic,
    NotNormalized,
    NullSelection,
    WrongAlgebra,
)
from ..models.reports import (
    DistillabilityReport,
    DistillationPlan,
    DistillVerdict,
    DoublesCheck,
    ReplayResult,
)
from .bipartite import BipartiteSystem, State, make_state, singlet_vector, tensor_system, vector_state
from .matrix import (
    adjoint,
    as_matrix,
    frobenius_norm,
    hermitian_eig,
    least_squares,
    operator_norm,
    psd_margin,
    psd_sqrt,
)
from .ppt import npt_witness_search_k2, partial_transpose, ppt_sum
from .star_algebra import (
    QubitEmbedding,
    StarAlgebra,
    compress,
    is_cyclic,
    qubit_embedding,
    rs_select,
    span_is_abelian,
)

logger = structlog.get_logger(__name__)

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


@dataclass(frozen=True, eq=False)
class CPMap:
    """Completely positive map from the k x k matrices into a target algebra"""

    choi: np.ndarray
    k: int
    target: Optional[StarAlgebra] = None

    @property
    def ambient_dim(self) -> int:
        return self.choi.shape[0] // self.k

    @property
    def blocks(self) -> np.ndarray:
        """blocks[a, b] = T(|a><b|), shape (k, k, d, d)"""
        d = self.ambient_dim
        return self.choi.reshape(d, self.k, d, self.k).transpose(1, 3, 0, 2)

    def unit(self) -> np.ndarray:
        """T(1)"""
        return np.einsum("aaxy->xy", self.blocks)

    @classmethod
    def from_blocks(cls, blocks, target: Optional[StarAlgebra] = None,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> "CPMap":
        blocks = np.asarray(blocks, dtype=complex)
        k, _, d, _ = blocks.shape
        choi = blocks.transpose(2, 0, 3, 1).reshape(d * k, d * k)
        cp_map = cls(choi=choi, k=k, target=target)
        cp_map.validate(tol)
        return cp_map

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray], target: Optional[StarAlgebra] = None,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> "CPMap":
        """T(X) = sum_n V_n X V_n† for d x k operators V_n"""
        kraus = [as_matrix(v, "kraus") for v in kraus]
        blocks = np.einsum("nxa,nyb->abxy", np.array(kraus), np.conjugate(np.array(kraus)))
        return cls.from_blocks(blocks, target, tol)

    def kraus_operators(self, tol: Tolerances = DEFAULT_TOLERANCES) -> List[np.ndarray]:
        """Kraus operators from the spectral decomposition of the Choi matrix"""
        values, vectors = np.linalg.eigh((self.choi + adjoint(self.choi)) / 2)
        cutoff = tol.psd * max(frobenius_norm(self.choi), 1e-300)
        return [
            np.sqrt(value) * vectors[:, n].reshape(self.ambient_dim, self.k)
            for n, value in enumerate(values) if value > cutoff
        ]

    def validate(self, tol: Tolerances = DEFAULT_TOLERANCES) -> None:
        margin = psd_margin(self.choi, tol)
        if not margin.positive:
            raise InvalidOperation("Choi matrix is not positive semidefinite", min_eig=margin.min_eig)
        if self.target is not None:
            require_in_algebra(self, self.target, "target", tol)


def require_in_algebra(cp_map: CPMap, alg: StarAlgebra, side: str,
                       tol: Tolerances = DEFAULT_TOLERANCES) -> None:
    if cp_map.ambient_dim != alg.ambient_dim:
        raise WrongAlgebra(f"{side} map acts on another ambient space",
                           map_dim=cp_map.ambient_dim, ambient=alg.ambient_dim)
    for a in range(cp_map.k):
        for b in range(cp_map.k):
            block = cp_map.blocks[a, b]
            if not alg.contains(block, tol):
                raise WrongAlgebra(f"{side} map leaves its algebra", block=(a, b),
                                   residual=alg.membership_residual(block))


def cp_apply(cp_map: CPMap, matrix) -> np.ndarray:
    """sum_ab X[a, b] T(|a><b|)"""
    matrix = as_matrix(matrix, "X")
    if matrix.shape != (cp_map.k, cp_map.k):
        raise DimensionMismatch("argument does not match the map's input size",
                                shape=matrix.shape, k=cp_map.k)
    return np.einsum("ab,abxy->xy", matrix, cp_map.blocks)


def embedding_map(images: np.ndarray, target: Optional[StarAlgebra] = None,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> CPMap:
    """CP map of a *-homomorphism given by its matrix-unit images"""
    return CPMap.from_blocks(images, target, tol)


# Two-party reductions

def product_functional(state: State, alice_map: CPMap, bob_map: CPMap) -> np.ndarray:
    """Matrix W with Tr(W (X ⊗ Y)) = omega(T(X) S(Y))"""
    k, m = alice_map.k, bob_map.k
    weighted = np.matmul(state.density, alice_map.blocks)
    functional = np.einsum("bapq,ecqp->acbe", weighted, bob_map.blocks, optimize=True)
    matrix = functional.reshape(k * m, k * m)
    return (matrix + adjoint(matrix)) / 2


def two_qubit_reduction(system: BipartiteSystem, state: State, alice_map: CPMap, bob_map: CPMap,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Unnormalized two-qubit functional omega2(X ⊗ Y) = omega(T(X) S(Y))"""
    for cp_map, side in ((alice_map, "alice"), (bob_map, "bob")):
        if cp_map.k != 2:
            raise WrongAlgebra(f"{side} map must start from the 2 x 2 matrices", k=cp_map.k)
    require_in_algebra(alice_map, system.alg_a, "alice", tol)
    require_in_algebra(bob_map, system.alg_b, "bob", tol)
    return product_functional(state, alice_map, bob_map)


def witness_to_choi(system: BipartiteSystem, family_a: Sequence[np.ndarray], family_b: Sequence[np.ndarray],
                    tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[CPMap, CPMap]:
    """T(|c><e|) = A_c A_e† and S(|c><e|) = B_c† B_e for a two-element family"""
    if len(family_a) != 2 or len(family_b) != 2:
        raise WrongAlgebra("witness families must have two elements each",
                           alice=len(family_a), bob=len(family_b))
    for family, alg, side in ((family_a, system.alg_a, "alice"), (family_b, system.alg_b, "bob")):
        for index, element in enumerate(family):
            if not alg.contains(element, tol):
                raise WrongAlgebra(f"{side} family element {index} is not in its algebra",
                                   residual=alg.membership_residual(element))
    a = np.array(family_a, dtype=complex)
    b = np.array(family_b, dtype=complex)
    alice_blocks = np.einsum("cxz,eyz->cexy", a, np.conjugate(a))
    bob_blocks = np.einsum("czx,ezy->cexy", np.conjugate(b), b)
    return (CPMap.from_blocks(alice_blocks, system.alg_a, tol),
            CPMap.from_blocks(bob_blocks, system.alg_b, tol))


def is_one_distillable(system: BipartiteSystem, state: State, restarts: Optional[int] = None,
                       max_iter: Optional[int] = None, seed: int = 0,
                       tol: Tolerances = DEFAULT_TOLERANCES) -> DistillabilityReport:
    """Certify 1-distillability through a k=2 ppt violation, or report inconclusive"""
    witness = npt_witness_search_k2(system, state, restarts, max_iter, seed, tol)
    if witness is None:
        return DistillabilityReport(verdict=DistillVerdict.INCONCLUSIVE)

    alice_map, bob_map = witness_to_choi(system, witness.alice, witness.bob, tol)
    omega2 = two_qubit_reduction(system, state, alice_map, bob_map, tol)
    pt = psd_margin(partial_transpose(omega2, 2, 2), tol)
    swap_value = float(np.real(np.trace(omega2 @ SWAP)))
    gap = abs(swap_value - float(np.real(ppt_sum(state, witness.alice, witness.bob))))
    verdict = DistillVerdict.INCONCLUSIVE if pt.positive else DistillVerdict.CERTIFIED
    logger.debug("one_distillable", verdict=verdict.value, pt_min_eig=pt.min_eig,
                 witness_value=witness.value, transposition_gap=gap)
    return DistillabilityReport(
        verdict=verdict,
        witness=witness,
        alice_choi=alice_map.choi,
        bob_choi=bob_map.choi,
        omega2=omega2,
        pt_min_eig=pt.min_eig,
        transposition_gap=gap,
    )


# Separable superoperators

@dataclass(frozen=True, eq=False)
class SeparableSuperoperator:
    """Heisenberg-picture operation M(X ⊗ Y) = sum_x T_x(X) S_x(Y)"""

    terms: Tuple[Tuple[CPMap, CPMap], ...]

    @property
    def output_dims(self) -> Tuple[int, int]:
        alice_map, bob_map = self.terms[0]
        return alice_map.k, bob_map.k

    def normalization_defect(self) -> float:
        total = sum(t.unit() @ s.unit() for t, s in self.terms)
        return frobenius_norm(total - np.eye(total.shape[0]))

    def check_normalized(self, tol: Tolerances = DEFAULT_TOLERANCES) -> None:
        defect = self.normalization_defect()
        if defect > tol.eig * 10:
            raise NotNormalized("sum_x T_x(1) S_x(1) differs from the identity", defect=defect)


def apply_superoperator(operation: SeparableSuperoperator, state: State,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[BipartiteSystem, State]:
    """Output state omega1(R) = omega2(M(R)) on the tensor output system"""
    if not operation.terms:
        raise NotNormalized("an operation needs at least one term")
    operation.check_normalized(tol)
    dims = operation.output_dims
    if any((t.k, s.k) != dims for t, s in operation.terms):
        raise DimensionMismatch("terms disagree on the output dimensions")
    rho = sum(product_functional(state, t, s) for t, s in operation.terms)
    return tensor_system(*dims, tol=tol), make_state(rho, tol=tol)


def _random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    ginibre = rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))
    q, r = np.linalg.qr(ginibre)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_separable_superoperator(system: BipartiteSystem, output_dims: Tuple[int, int], seed: int,
                                   outcomes: int = 2, kraus_rank: int = 2,
                                   tol: Tolerances = DEFAULT_TOLERANCES) -> SeparableSuperoperator:
    """One round of one-way LOCC on a tensor system

    Alice measures a random instrument with `outcomes` results; Bob applies a
    random channel chosen by the outcome.
    """
    dim_a, dim_b = system.require_tensor()
    k_a, k_b = output_dims
    if outcomes * k_a < dim_a or kraus_rank * k_b < dim_b:
        raise DimensionMismatch("not enough room for an isometric dilation",
                                outcomes=outcomes, output_dims=output_dims)
    rng = np.random.default_rng(seed)
    eye_a, eye_b = np.eye(dim_a), np.eye(dim_b)
    instrument = _random_isometry(outcomes * k_a, dim_a, rng).reshape(outcomes, k_a, dim_a)

    terms = []
    for x in range(outcomes):
        k = instrument[x]
        alice_blocks = np.array([[np.kron(adjoint(k) @ _unit(k_a, a, b) @ k, eye_b)
                                  for b in range(k_a)] for a in range(k_a)])
        channel = _random_isometry(kraus_rank * k_b, dim_b, rng).reshape(kraus_rank, k_b, dim_b)
        bob_blocks = np.array([[np.kron(eye_a, sum(adjoint(l) @ _unit(k_b, a, b) @ l for l in channel))
                                for b in range(k_b)] for a in range(k_b)])
        terms.append((CPMap.from_blocks(alice_blocks, system.alg_a, tol),
                      CPMap.from_blocks(bob_blocks, system.alg_b, tol)))
    return SeparableSuperoperator(terms=tuple(terms))


def _unit(dim: int, row: int, col: int) -> np.ndarray:
    unit = np.zeros((dim, dim), dtype=complex)
    unit[row, col] = 1.0
    return unit


# Selection

def renormalize_selected(state: State, cp_map: CPMap,
                         tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[State, float]:
    """omega_T(X) = omega(T(X)) / omega(T(1)) and the success probability omega(T(1))"""
    if cp_map.ambient_dim != state.dim:
        raise DimensionMismatch("map and state live on different spaces",
                                map_dim=cp_map.ambient_dim, state=state.dim)
    unit = cp_map.unit()
    headroom = psd_margin(np.eye(unit.shape[0]) - unit, tol)
    if not headroom.positive:
        raise InvalidOperation("T(1) exceeds the identity", min_eig=headroom.min_eig)
    probability = float(np.real(state.expectation(unit)))
    if probability <= tol.psd:
        raise NullSelection("selection succeeds with zero probability", probability=probability)
    expectations = np.einsum("pq,baqp->ab", state.density, cp_map.blocks)
    return make_state(expectations / probability, tol=tol), probability


class Instrument(NamedTuple):
    """Two-outcome instrument A_1 = A/||A||, A_0 = (1 - A_1† A_1)^(1/2)"""
    selected: np.ndarray
    rejected: np.ndarray

    def unselected(self, matrix: np.ndarray) -> np.ndarray:
        """T_1(R) + T_0(R) with T_i(R) = A_i† R A_i"""
        return (adjoint(self.selected) @ matrix @ self.selected
                + adjoint(self.rejected) @ matrix @ self.rejected)


def reeh_schlieder_instrument(alg: StarAlgebra, selector,
                              tol: Tolerances = DEFAULT_TOLERANCES) -> Instrument:
    selector = as_matrix(selector, "selector")
    if not alg.contains(selector, tol):
        raise WrongAlgebra("selector is not in the algebra", residual=alg.membership_residual(selector))
    norm = operator_norm(selector)
    if norm <= tol.rank:
        raise NullSelection("selector vanishes")
    selected = selector / norm
    rejected = psd_sqrt(np.eye(alg.ambient_dim) - adjoint(selected) @ selected, tol)
    return Instrument(selected=selected, rejected=rejected)


# Distillation from a cyclic vector

def _units_list(embedding: QubitEmbedding) -> List[np.ndarray]:
    return [embedding.images[i, j] for i in range(2) for j in range(2)]


def _product_representation(tau: np.ndarray, sigma: np.ndarray, vector: np.ndarray) -> np.ndarray:
    """pi(|v><v|) for pi(X ⊗ Y) = tau(X) sigma(Y) and a two-qubit vector v"""
    coefficients = np.outer(vector, np.conjugate(vector)).reshape(2, 2, 2, 2)
    # coefficients[i, k, j, l] multiplies |i><j| ⊗ |k><l|
    return np.einsum("ikjl,ijxz,klzy->xy", coefficients, tau, sigma, optimize=True)


def _reduction(psi: np.ndarray, selector: np.ndarray, tau: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """omega2[(a,c),(b,e)] = <psi| A† tau(|b><a|) A sigma(|e><c|) |psi>"""
    density = np.outer(psi, np.conjugate(psi))
    alice = np.einsum("xp,abpq,qy->abxy", adjoint(selector), tau, selector, optimize=True)
    weighted = np.matmul(density, alice)
    functional = np.einsum("bapq,ecqp->acbe", weighted, sigma, optimize=True)
    matrix = functional.reshape(4, 4)
    return (matrix + adjoint(matrix)) / 2


def distill_from_cyclic(system: BipartiteSystem, psi, seed: int = 0,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> DistillationPlan:
    """Explicit 1-distillation protocol for a vector cyclic for Alice's algebra

    Bob's largest block gives sigma; p = sigma(1). Alice's embedding tau is
    taken from a block whose central support survives p, so that
    pi(X ⊗ Y) = tau(X) sigma(Y) is a faithful representation of the two-qubit
    matrices. chi is the first unit eigenvector of Q = pi(|singlet><singlet|),
    A is the Alice element with A psi closest to chi, and T(X) = A† tau(X) A.
    """
    state = vector_state(psi, tol)
    psi = np.asarray(psi, dtype=complex)
    cyclicity = is_cyclic(system.alg_a, psi, tol)
    if not cyclicity.cyclic:
        raise NotCyclic("vector is not cyclic for the alice algebra",
                        rank=cyclicity.rank, ambient=system.ambient_dim)
    for side, alg in (("alice", system.alg_a), ("bob", system.alg_b)):
        if alg.is_abelian(tol):
            raise AbelianAlgebra(f"{side} algebra is abelian", side=side, dim=alg.dim)

    sigma = qubit_embedding(system.alg_b, seed, tol=tol)
    p = sigma.support
    corner = compress(system.alg_a, p, tol)
    if span_is_abelian(corner, tol):
        raise AbelianCorner("compressed alice algebra is abelian", corner_dim=corner.shape[0])
    try:
        tau = qubit_embedding(system.alg_a, seed, survives=p, tol=tol)
    except AbelianAlgebra as error:
        raise AbelianCorner("no non-abelian alice block survives the compression",
                            **error.context) from error

    singlet = singlet_vector()
    q = _product_representation(tau.images, sigma.images, singlet)
    values, vectors = hermitian_eig(q, tol)
    ones = np.flatnonzero(np.abs(values - 1.0) <= 1e-6)
    if ones.size == 0:
        raise InvariantViolation("singlet projection has no unit eigenvalue",
                                 largest=float(values[-1]))
    chi = vectors[:, ones[0]]

    selection = rs_select(system.alg_a, psi, chi, tol)
    raw_norm = operator_norm(selection.operator)
    if raw_norm <= tol.rank:
        raise NullSelection("selected alice element vanishes")
    selector = selection.operator / raw_norm

    omega2 = _reduction(psi, selector, tau.images, sigma.images)
    probability = float(np.real(np.trace(omega2)))
    if probability <= tol.psd:
        raise NullSelection("distillation succeeds with zero probability", probability=probability)
    pt_min_eig = psd_margin(partial_transpose(omega2, 2, 2), tol).min_eig
    fidelity = float(np.real(np.vdot(singlet, omega2 @ singlet))) / probability

    if not pt_min_eig < 0:
        raise InvariantViolation("distilled two-qubit functional is ppt", pt_min_eig=pt_min_eig)
    if fidelity < 1 - 10 * selection.residual - 1e-8:
        raise InvariantViolation("singlet fidelity below the selection bound",
                                 fidelity=fidelity, residual=selection.residual)

    logger.info("distillation_plan", residual=selection.residual, fidelity=fidelity,
                probability=probability, sigma_block=sigma.block_index, tau_block=tau.block_index)
    return DistillationPlan(
        ambient_dim=system.ambient_dim,
        psi=psi,
        sigma_images=_units_list(sigma),
        sigma_block=sigma.block_index,
        tau_images=_units_list(tau),
        tau_block=tau.block_index,
        p=p,
        q=q,
        chi=chi,
        selector=selector,
        selector_norm=raw_norm,
        selection_residual=selection.residual,
        omega2=omega2,
        pt_min_eig=pt_min_eig,
        singlet_fidelity=fidelity,
        success_probability=probability,
    )


def _stack_units(images: Sequence[np.ndarray]) -> np.ndarray:
    return np.array(images, dtype=complex).reshape((2, 2) + np.asarray(images[0]).shape)


def _homomorphism_defect(units: np.ndarray) -> float:
    worst = 0.0
    for i in range(2):
        for j in range(2):
            worst = max(worst, frobenius_norm(adjoint(units[i, j]) - units[j, i]))
            for k in range(2):
                for l in range(2):
                    expected = units[i, l] if j == k else 0.0
                    worst = max(worst, frobenius_norm(units[i, j] @ units[k, l] - expected))
    return worst


def replay_plan(plan: DistillationPlan, tol: Tolerances = DEFAULT_TOLERANCES) -> ReplayResult:
    """Re-verify a serialized plan from its own matrices"""
    tau = _stack_units(plan.tau_images)
    sigma = _stack_units(plan.sigma_images)
    psi = np.asarray(plan.psi, dtype=complex)
    singlet = singlet_vector()
    raw = plan.selector * plan.selector_norm
    omega2 = _reduction(psi, plan.selector, tau, sigma)
    probability = float(np.real(np.trace(omega2)))

    checks: Dict[str, float] = {
        "tau_homomorphism": _homomorphism_defect(tau),
        "sigma_homomorphism": _homomorphism_defect(sigma),
        "commutation": max(frobenius_norm(t @ s - s @ t)
                           for t in plan.tau_images for s in plan.sigma_images),
        "support": frobenius_norm(plan.p - sigma[0, 0] - sigma[1, 1]),
        "singlet_projection": frobenius_norm(plan.q - _product_representation(tau, sigma, singlet)),
        "chi_in_range": float(np.linalg.norm(plan.q @ plan.chi - plan.chi)),
        "selection_residual": abs(float(np.linalg.norm(raw @ psi - plan.chi)) - plan.selection_residual),
        "omega2": frobenius_norm(omega2 - plan.omega2),
        "success_probability": abs(probability - plan.success_probability),
        "pt_min_eig": abs(psd_margin(partial_transpose(omega2, 2, 2), tol).min_eig - plan.pt_min_eig),
        "singlet_fidelity": abs(float(np.real(np.vdot(singlet, omega2 @ singlet))) / probability
                                - plan.singlet_fidelity),
    }
    failures = [name for name, defect in checks.items() if defect > 1e-9]
    if not plan.pt_min_eig < 0:
        failures.append("pt_negative")
    if plan.singlet_fidelity < 1 - 10 * plan.selection_residual - 1e-8:
        failures.append("fidelity_bound")
    return ReplayResult(passed=not failures, checks=checks, failures=failures)


def rate_estimate(plan: DistillationPlan) -> float:
    """Success probability omega2(1) of one protocol round, with ||T(1)|| = ||S(1)|| = 1"""
    return float(np.real(np.trace(plan.omega2)))


# Doubles

def _largest_double_product(state: State, alice: StarAlgebra, bob: StarAlgebra):
    f = bob.basis
    commutators = np.einsum("pab,qbc->pqac", f, f) - np.einsum("qab,pbc->pqac", f, f)
    best_value, best_indices = 0.0, None
    for a, e in enumerate(alice.basis):
        for b1, f1 in enumerate(f):
            left = state.density @ e @ f1
            values = np.einsum("xy,pqyz,rzx->pqr", left, commutators, f, optimize=True)
            flat = int(np.argmax(np.abs(values)))
            value = float(np.abs(values.reshape(-1)[flat]))
            if value > best_value:
                b2, b3, b4 = np.unravel_index(flat, values.shape)
                best_value, best_indices = value, [a, b1, int(b2), int(b3), int(b4)]
    return best_value, best_indices


def doubles_condition_check(system: BipartiteSystem, state: State,
                            tol: Tolerances = DEFAULT_TOLERANCES,
                            epsilon: Optional[float] = None) -> DoublesCheck:
    """Non-vanishing omega(A B1 [B2, B3] B4) and how well Alice's algebra doubles Bob's

    The second number is the largest, over Bob's basis, of
    min_A omega((A - B)†(A - B)), a least-squares problem in the GNS norm
    ||X rho^(1/2)||_HS. The first condition holds when the product exceeds
    `epsilon`, which defaults to `tol.eig`.
    """
    forward = _largest_double_product(state, system.alg_a, system.alg_b)
    backward = _largest_double_product(state, system.alg_b, system.alg_a)
    if forward[0] >= backward[0]:
        (value, indices), orientation = forward, "alice-bob"
    else:
        (value, indices), orientation = backward, "bob-alice"
    holds = value > (tol.eig if epsilon is None else epsilon)

    root = psd_sqrt(state.density, tol)
    columns = [(e @ root).reshape(-1) for e in system.alg_a.basis]
    residuals = []
    for f in system.alg_b.basis:
        _, residual = least_squares(columns, (f @ root).reshape(-1), tol)
        residuals.append(residual ** 2)
    worst = int(np.argmax(residuals))
    return DoublesCheck(
        cond1=holds,
        cond1_value=value,
        cond1_indices=indices if holds else None,
        cond1_orientation=orientation if holds else None,
        cond2_residual=float(residuals[worst]),
        cond2_worst_index=worst,
    )
