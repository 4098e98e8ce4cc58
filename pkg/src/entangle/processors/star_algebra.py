"""
Finite-dimensional *-algebras of d x d matrices

An algebra is stored as a Hilbert-Schmidt orthonormal basis of its linear
span. In finite dimension the norm closure and the weak closure of a
*-algebra coincide with the algebra itself, so every algebra here equals its
bicommutant, and the Reeh-Schlieder property of a vector reduces to an exact
rank condition: the vectors E_k psi must span the whole space.
"""

from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..core.config import DEFAULT_TOLERANCES, Tolerances
from ..core.exceptions import (
    AbelianAlgebra,
    DegenerateRandomization,
    DimensionMismatch,
    InvariantViolation,
    NotNormalized,
)
from .matrix import (
    adjoint,
    as_matrix,
    as_vector,
    frobenius_norm,
    least_squares,
    matrix_units,
    null_space,
    orthonormal_span,
    project_onto_span,
    require_square,
    span_residual,
    svd_rank,
)

logger = structlog.get_logger(__name__)

MAX_RANDOM_RETRIES = 10
EIGENVALUE_GAP = 1e-6
CLUSTER_WIDTH = 1e-8


@dataclass(frozen=True, eq=False)
class StarAlgebra:
    """Unital, *-closed, product-closed subspace of the d x d matrices"""

    ambient_dim: int
    basis: np.ndarray
    generators: Tuple[np.ndarray, ...] = field(default=())

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.ambient_dim, dtype=complex)

    def project(self, matrix: np.ndarray) -> np.ndarray:
        return project_onto_span(self.basis, matrix)

    def membership_residual(self, matrix: np.ndarray) -> float:
        return span_residual(self.basis, np.asarray(matrix, dtype=complex))

    def contains(self, matrix: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        matrix = np.asarray(matrix, dtype=complex)
        return self.membership_residual(matrix) <= tol.rank * max(1.0, frobenius_norm(matrix))

    def element(self, coefficients: np.ndarray) -> np.ndarray:
        return np.einsum("k,kij->ij", np.asarray(coefficients, dtype=complex), self.basis)

    def coefficients(self, matrix: np.ndarray) -> np.ndarray:
        return np.einsum("kij,ij->k", np.conjugate(self.basis), matrix)

    def random_hermitian(self, rng: np.random.Generator) -> np.ndarray:
        coefficients = rng.normal(size=self.dim) + 1j * rng.normal(size=self.dim)
        element = self.element(coefficients)
        return (element + adjoint(element)) / 2

    def is_abelian(self, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        products = np.einsum("iab,jbc->ijac", self.basis, self.basis)
        commutators = products - products.transpose(1, 0, 2, 3)
        return float(np.max(np.abs(commutators), initial=0.0)) <= tol.eig


class BlockUnits(NamedTuple):
    """One Wedderburn block: M_n tensored with the identity of size `multiplicity`"""
    multiplicity: int
    size: int
    units: np.ndarray  # shape (n, n, d, d), units[i, j] = e_ij
    central_projection: np.ndarray


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    blocks: Tuple[BlockUnits, ...]

    @property
    def linear_dim(self) -> int:
        return sum(block.size ** 2 for block in self.blocks)


@dataclass(frozen=True, eq=False)
class QubitEmbedding:
    """*-homomorphism tau from the 2 x 2 matrices, possibly non-unital"""

    images: np.ndarray  # shape (2, 2, d, d), images[i, j] = tau(|i><j|)
    block_index: int

    @property
    def support(self) -> np.ndarray:
        return self.images[0, 0] + self.images[1, 1]

    def apply(self, matrix: np.ndarray) -> np.ndarray:
        return np.einsum("ij,ijab->ab", np.asarray(matrix, dtype=complex), self.images)


class Cyclicity(NamedTuple):
    cyclic: bool
    rank: int


class Selection(NamedTuple):
    operator: np.ndarray
    residual: float
    coefficients: np.ndarray


# Construction

def _from_span(ambient_dim: int, matrices: Sequence[np.ndarray], generators, tol: Tolerances) -> StarAlgebra:
    return StarAlgebra(
        ambient_dim=ambient_dim,
        basis=orthonormal_span(matrices, tol),
        generators=tuple(generators),
    )


def generate(
    ambient_dim: int,
    generators: Sequence[np.ndarray],
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> StarAlgebra:
    """Smallest unital *-algebra containing the generators

    Starts from {1} with the generators and their adjoints and appends
    pairwise products of the current basis until the rank stops growing.
    """
    checked = []
    for index, generator in enumerate(generators):
        matrix = as_matrix(generator, f"generator[{index}]")
        require_square(matrix, ambient_dim, f"generator[{index}]")
        checked.append(matrix)

    seed = [np.eye(ambient_dim, dtype=complex)]
    seed += checked + [adjoint(m) for m in checked]
    basis = orthonormal_span(seed, tol)
    full_dim = ambient_dim ** 2

    for _ in range(full_dim + 1):
        if basis.shape[0] == full_dim:
            break
        products = np.einsum("iab,jbc->ijac", basis, basis).reshape(-1, ambient_dim, ambient_dim)
        grown = orthonormal_span(list(basis) + list(products), tol)
        if grown.shape[0] == basis.shape[0]:
            break
        basis = grown
    logger.debug("algebra_generated", ambient_dim=ambient_dim, dim=basis.shape[0],
                 generators=len(checked))
    return StarAlgebra(ambient_dim=ambient_dim, basis=basis, generators=tuple(checked))


def full_algebra(ambient_dim: int) -> StarAlgebra:
    units = matrix_units(ambient_dim)
    return StarAlgebra(ambient_dim=ambient_dim, basis=np.array(units), generators=tuple(units))


def scalars(ambient_dim: int, tol: Tolerances = DEFAULT_TOLERANCES) -> StarAlgebra:
    return generate(ambient_dim, [], tol)


def same_span(first: StarAlgebra, second: StarAlgebra, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Mutual projection residuals vanish"""
    if first.ambient_dim != second.ambient_dim or first.dim != second.dim:
        return False
    worst = max(
        max(second.membership_residual(e) for e in first.basis),
        max(first.membership_residual(e) for e in second.basis),
    )
    return worst <= tol.rank * 10


def commutant(alg: StarAlgebra, tol: Tolerances = DEFAULT_TOLERANCES) -> StarAlgebra:
    """All R with [R, E] = 0 for every basis element E

    Row-major vectorization: vec(R E) = (1 ⊗ E^T) vec(R), vec(E R) = (E ⊗ 1) vec(R).
    """
    d = alg.ambient_dim
    identity = np.eye(d, dtype=complex)
    system = np.vstack([np.kron(identity, e.T) - np.kron(e, identity) for e in alg.basis])
    kernel = null_space(system, tol)
    matrices = [kernel[:, k].reshape(d, d) for k in range(kernel.shape[1])]
    return _from_span(d, matrices, matrices, tol)


def center(alg: StarAlgebra, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Orthonormal basis of alg ∩ commutant(alg), solved in the algebra's own coordinates"""
    products = np.einsum("iab,kbc->ikac", alg.basis, alg.basis)
    commutators = products - products.transpose(1, 0, 2, 3)
    system = commutators.transpose(1, 2, 3, 0).reshape(-1, alg.dim)
    kernel = null_space(system, tol)
    matrices = [alg.element(kernel[:, k]) for k in range(kernel.shape[1])]
    return orthonormal_span(matrices, tol)


def conditional_expectation(alg: StarAlgebra, matrix: np.ndarray) -> np.ndarray:
    """Hilbert-Schmidt orthogonal projection onto the algebra"""
    matrix = as_matrix(matrix)
    require_square(matrix, alg.ambient_dim)
    return alg.project(matrix)


# Wedderburn structure

def _clusters(values: np.ndarray, expected: Optional[int]) -> Optional[List[Tuple[int, int]]]:
    """Split sorted eigenvalues into clusters; None if gaps are too small to trust"""
    spread = max(float(np.max(np.abs(values))), 1.0)
    groups: List[Tuple[int, int]] = []
    start = 0
    for index in range(1, len(values) + 1):
        if index == len(values) or values[index] - values[index - 1] > CLUSTER_WIDTH * spread:
            groups.append((start, index))
            start = index
    if expected is not None and len(groups) != expected:
        return None
    for (_, left_stop), (right_start, _) in zip(groups, groups[1:]):
        if values[right_start] - values[left_stop - 1] < EIGENVALUE_GAP * spread:
            return None
    return groups


def _first_diagonal_support(projection: np.ndarray) -> int:
    diagonal = np.real(np.diag(projection))
    return int(np.argmax(diagonal > 1e-8))


def _candidate_elements(span_basis: np.ndarray, ambient_dim: int, rng: np.random.Generator):
    """The projected diagonal ramp first, then seeded random hermitian elements of the span"""
    ramp = np.diag(np.arange(1, ambient_dim + 1, dtype=float)).astype(complex) / ambient_dim
    element = project_onto_span(span_basis, ramp)
    yield (element + adjoint(element)) / 2
    for _ in range(MAX_RANDOM_RETRIES):
        coefficients = rng.normal(size=span_basis.shape[0]) + 1j * rng.normal(size=span_basis.shape[0])
        element = np.einsum("k,kij->ij", coefficients, span_basis)
        yield (element + adjoint(element)) / 2


def _central_projections(alg: StarAlgebra, rng: np.random.Generator, tol: Tolerances):
    central_basis = center(alg, tol)
    count = central_basis.shape[0]
    for attempt, element in enumerate(_candidate_elements(central_basis, alg.ambient_dim, rng)):
        values, vectors = np.linalg.eigh(element)
        groups = _clusters(values, count)
        if groups is None:
            logger.debug("central_element_degenerate", attempt=attempt)
            continue
        ranges = [vectors[:, start:stop] for start, stop in groups]
        ranges.sort(key=lambda v: _first_diagonal_support(v @ adjoint(v)))
        return ranges
    raise DegenerateRandomization(
        "could not separate the minimal central projections",
        retries=MAX_RANDOM_RETRIES, center_dim=count,
    )


def _canonical_unit_phase(unit: np.ndarray) -> np.ndarray:
    flat = unit.reshape(-1)
    magnitudes = np.abs(flat)
    index = int(np.argmax(magnitudes >= magnitudes.max() * (1 - 1e-9)))
    return unit * (abs(flat[index]) / flat[index])


def _block_units(alg: StarAlgebra, range_vectors: np.ndarray, rng: np.random.Generator,
                 tol: Tolerances) -> BlockUnits:
    d = alg.ambient_dim
    projection = range_vectors @ adjoint(range_vectors)
    rank = range_vectors.shape[1]
    block_basis = orthonormal_span([projection @ e for e in alg.basis], tol)
    size = int(round(np.sqrt(block_basis.shape[0])))
    if size * size != block_basis.shape[0] or rank % size:
        raise InvariantViolation(
            "block is not a full matrix algebra with multiplicity",
            block_dim=block_basis.shape[0], rank=rank,
        )
    multiplicity = rank // size
    if size == 1:
        return BlockUnits(multiplicity, 1, projection[None, None], projection)

    minimal: Optional[List[np.ndarray]] = None
    for attempt, element in enumerate(_candidate_elements(block_basis, d, rng)):
        compressed = adjoint(range_vectors) @ element @ range_vectors
        values, vectors = np.linalg.eigh((compressed + adjoint(compressed)) / 2)
        groups = _clusters(values, size)
        if groups is None or any(stop - start != multiplicity for start, stop in groups):
            logger.debug("block_element_degenerate", attempt=attempt, size=size)
            continue
        minimal = []
        for start, stop in groups:
            lifted = range_vectors @ vectors[:, start:stop]
            minimal.append(lifted @ adjoint(lifted))
        minimal.sort(key=_first_diagonal_support)
        break
    if minimal is None:
        raise DegenerateRandomization(
            "could not split a block into minimal projections",
            retries=MAX_RANDOM_RETRIES, size=size,
        )

    units = np.zeros((size, size, d, d), dtype=complex)
    units[0, 0] = minimal[0]
    for i in range(1, size):
        candidates = [minimal[i] @ e @ minimal[0] for e in block_basis]
        best = max(candidates, key=frobenius_norm)
        unit = best * np.sqrt(multiplicity) / frobenius_norm(best)
        units[i, 0] = _canonical_unit_phase(unit)
        units[0, i] = adjoint(units[i, 0])
    for i in range(1, size):
        for j in range(1, size):
            units[i, j] = units[i, 0] @ units[0, j]
    return BlockUnits(multiplicity, size, units, projection)


def _check_units(block: BlockUnits, tol: Tolerances) -> float:
    units = block.units
    n = block.size
    worst = 0.0
    for i in range(n):
        for j in range(n):
            worst = max(worst, float(np.max(np.abs(units[i, j] - adjoint(units[j, i])))))
            for k in range(n):
                for l in range(n):
                    expected = units[i, l] if j == k else 0.0
                    worst = max(worst, float(np.max(np.abs(units[i, j] @ units[k, l] - expected))))
    return worst


def wedderburn_blocks(alg: StarAlgebra, seed: int = 0,
                      tol: Tolerances = DEFAULT_TOLERANCES) -> BlockDecomposition:
    """Block structure alg ≅ ⊕_k M_{n_k} ⊗ 1_{m_k} with explicit matrix units

    Blocks are ordered by the first basis index their central projection
    touches; inside a block, minimal projections follow the same rule.
    """
    rng = np.random.default_rng(seed)
    blocks = tuple(
        _block_units(alg, range_vectors, rng, tol)
        for range_vectors in _central_projections(alg, rng, tol)
    )
    decomposition = BlockDecomposition(blocks=blocks)

    if decomposition.linear_dim != alg.dim:
        raise InvariantViolation(
            "block dimensions do not add up to the algebra dimension",
            block_dim=decomposition.linear_dim, algebra_dim=alg.dim,
        )
    unit_sum = sum(np.einsum("iiab->ab", block.units) for block in blocks)
    if float(np.max(np.abs(unit_sum - alg.identity))) > 10 * tol.eig * alg.ambient_dim:
        raise InvariantViolation("diagonal matrix units do not sum to the identity")
    for index, block in enumerate(blocks):
        defect = _check_units(block, tol)
        if defect > 10 * tol.eig * max(1, block.multiplicity):
            raise InvariantViolation("matrix-unit relations fail", block=index, defect=defect)
    logger.debug("wedderburn_blocks", sizes=[b.size for b in blocks],
                 multiplicities=[b.multiplicity for b in blocks])
    return decomposition


def qubit_embedding(alg: StarAlgebra, seed: int = 0, survives: Optional[np.ndarray] = None,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> QubitEmbedding:
    """Embedding of the 2 x 2 matrices into the largest non-abelian block

    With `survives` set to a projection p commuting with the algebra, only
    blocks whose central projection is not annihilated by p are eligible.
    Ties in block size go to the lowest block index.
    """
    decomposition = wedderburn_blocks(alg, seed, tol)
    eligible = []
    for index, block in enumerate(decomposition.blocks):
        if block.size < 2:
            continue
        if survives is not None and frobenius_norm(survives @ block.central_projection) <= tol.rank:
            continue
        eligible.append((-block.size, index))
    if not eligible:
        raise AbelianAlgebra(
            "no block of size two or more is available",
            sizes=[b.size for b in decomposition.blocks],
            compressed=survives is not None,
        )
    _, index = min(eligible)
    units = decomposition.blocks[index].units
    return QubitEmbedding(images=units[:2, :2].copy(), block_index=index)


def compress(alg: StarAlgebra, projection: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Basis of p alg p for a projection p (unit p, so not a unital subalgebra of the ambient)"""
    products = [projection @ e @ projection for e in alg.basis]
    if all(frobenius_norm(m) <= tol.rank for m in products):
        return np.zeros((0, alg.ambient_dim, alg.ambient_dim), dtype=complex)
    return orthonormal_span(products, tol)


def span_is_abelian(basis: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    if basis.shape[0] == 0:
        return True
    products = np.einsum("iab,jbc->ijac", basis, basis)
    return float(np.max(np.abs(products - products.transpose(1, 0, 2, 3)))) <= tol.eig


# Cyclic and separating vectors

def _orbit(alg: StarAlgebra, psi) -> np.ndarray:
    psi = as_vector(psi, "psi")
    if psi.shape[0] != alg.ambient_dim:
        raise DimensionMismatch("vector and algebra dimensions differ",
                                vector=psi.shape[0], ambient=alg.ambient_dim)
    return np.einsum("kij,j->ik", alg.basis, psi)


def _require_unit(vector: np.ndarray, name: str, tol: Tolerances) -> None:
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > tol.hermitian:
        raise NotNormalized(f"{name} must be a unit vector", vector=name, norm=norm)


def is_cyclic(alg: StarAlgebra, psi, tol: Tolerances = DEFAULT_TOLERANCES) -> Cyclicity:
    """Cyclic iff the vectors E_k psi span the whole space"""
    orbit = _orbit(alg, psi)
    _require_unit(as_vector(psi, "psi"), "psi", tol)
    rank = svd_rank(orbit, tol)
    return Cyclicity(cyclic=rank == alg.ambient_dim, rank=rank)


def is_separating(alg: StarAlgebra, psi, tol: Tolerances = DEFAULT_TOLERANCES) -> Cyclicity:
    """Separating iff E_k psi are linearly independent (A psi = 0 forces A = 0)"""
    rank = svd_rank(_orbit(alg, psi), tol)
    return Cyclicity(cyclic=rank == alg.dim, rank=rank)


def rs_select(alg: StarAlgebra, psi, chi, tol: Tolerances = DEFAULT_TOLERANCES) -> Selection:
    """Element A of the algebra with A psi as close as possible to chi"""
    orbit = _orbit(alg, psi)
    chi = as_vector(chi, "chi")
    _require_unit(as_vector(psi, "psi"), "psi", tol)
    _require_unit(chi, "chi", tol)
    coefficients, residual = least_squares(list(orbit.T), chi, tol)
    return Selection(operator=alg.element(coefficients), residual=residual,
                     coefficients=coefficients)
