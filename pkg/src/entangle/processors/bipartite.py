"""
Bipartite systems, states and their standard constructors

A bipartite system is a pair of elementwise-commuting *-algebras (Alice,
Bob) inside the full d x d matrix algebra. Tensor-product systems remember
their factor dimensions so that partial transposes and product constructions
can use them. Separability is never decided; it is carried as a certificate
by the constructors that know a product decomposition.
"""

from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..core.config import DEFAULT_TOLERANCES, Tolerances, get_settings
from ..core.exceptions import (
    DimensionMismatch,
    InvalidDensity,
    NonCommuting,
    NotTensorSystem,
    SizeLimit,
)
from ..models.documents import BipartiteDocument
from .matrix import (
    adjoint,
    as_matrix,
    as_vector,
    frobenius_norm,
    hermitian_eig,
    kron,
    matrix_units,
    min_eigenvalue,
    permutation_matrix,
    svd_rank,
)
from .star_algebra import StarAlgebra, generate

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class SeparableCertificate:
    """Convex decomposition sum_i p_i rhoA_i ⊗ rhoB_i in tensor order"""

    weights: np.ndarray
    factors: Tuple[Tuple[np.ndarray, np.ndarray], ...]

    def reconstruct(self) -> np.ndarray:
        return sum(w * np.kron(a, b) for w, (a, b) in zip(self.weights, self.factors))


@dataclass(frozen=True, eq=False)
class BipartiteSystem:
    ambient_dim: int
    alg_a: StarAlgebra
    alg_b: StarAlgebra
    factor_dims: Optional[Tuple[int, int]] = None

    @property
    def is_tensor(self) -> bool:
        return self.factor_dims is not None

    def swapped(self) -> "BipartiteSystem":
        """Same system with the roles of Alice and Bob exchanged"""
        return BipartiteSystem(self.ambient_dim, self.alg_b, self.alg_a, None)

    def require_tensor(self) -> Tuple[int, int]:
        if self.factor_dims is None:
            raise NotTensorSystem("operation needs a tensor-product system",
                                  ambient_dim=self.ambient_dim)
        return self.factor_dims


@dataclass(frozen=True, eq=False)
class State:
    """Normal state omega(R) = Tr(rho R)"""

    density: np.ndarray
    certificate: Optional[SeparableCertificate] = None

    @property
    def dim(self) -> int:
        return int(self.density.shape[0])

    @property
    def certified_separable(self) -> bool:
        return self.certificate is not None

    def expectation(self, operator: np.ndarray) -> complex:
        return complex(np.trace(self.density @ operator))


# Validation

def validate_density(rho, tol: Tolerances = DEFAULT_TOLERANCES, name: str = "density") -> np.ndarray:
    """Check hermiticity, positivity and unit trace; names the violated invariant"""
    rho = as_matrix(rho, name)
    if rho.shape[0] != rho.shape[1]:
        raise InvalidDensity(f"{name} must be square", shape=rho.shape)
    scale = max(frobenius_norm(rho), 1e-300)
    asymmetry = float(np.max(np.abs(rho - adjoint(rho))))
    if asymmetry > tol.hermitian * scale:
        raise InvalidDensity(f"{name} is not hermitian", invariant="hermitian",
                             asymmetry=asymmetry)
    rho = (rho + adjoint(rho)) / 2
    trace = float(np.real(np.trace(rho)))
    if abs(trace - 1.0) > tol.hermitian:
        raise InvalidDensity(f"{name} does not have unit trace", invariant="trace",
                             trace=trace)
    lowest = min_eigenvalue(rho, tol)
    if lowest < -tol.psd:
        raise InvalidDensity(f"{name} is not positive semidefinite", invariant="positive",
                             min_eig=lowest)
    return rho


def make_state(rho, certificate: Optional[SeparableCertificate] = None,
               tol: Tolerances = DEFAULT_TOLERANCES) -> State:
    return State(density=validate_density(rho, tol), certificate=certificate)


def vector_state(psi, tol: Tolerances = DEFAULT_TOLERANCES) -> State:
    """omega_psi(R) = <psi|R|psi> for a unit vector"""
    psi = as_vector(psi, "psi")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > tol.hermitian * 10:
        raise InvalidDensity("vector state needs a unit vector", invariant="norm", norm=norm)
    return make_state(np.outer(psi, np.conjugate(psi)), tol=tol)


def new_system(ambient_dim: int, alg_a: StarAlgebra, alg_b: StarAlgebra,
               factor_dims: Optional[Tuple[int, int]] = None,
               tol: Tolerances = DEFAULT_TOLERANCES) -> BipartiteSystem:
    """Validated bipartite system; rejects algebras that fail to commute"""
    for side, alg in (("alice", alg_a), ("bob", alg_b)):
        if alg.ambient_dim != ambient_dim:
            raise DimensionMismatch(f"{side} algebra lives in another dimension",
                                    expected=ambient_dim, found=alg.ambient_dim)
    if factor_dims is not None and factor_dims[0] * factor_dims[1] != ambient_dim:
        raise DimensionMismatch("factor dimensions do not multiply to the ambient dimension",
                                factor_dims=factor_dims, ambient_dim=ambient_dim)

    norms = np.zeros((alg_a.dim, alg_b.dim))
    for i, e in enumerate(alg_a.basis):
        for u, f in enumerate(alg_b.basis):
            norms[i, u] = frobenius_norm(e @ f - f @ e)
    worst = np.unravel_index(int(np.argmax(norms)), norms.shape)
    if norms[worst] > tol.hermitian * 100:
        raise NonCommuting(
            "alice and bob algebras do not commute",
            alice_index=int(worst[0]), bob_index=int(worst[1]),
            commutator_norm=float(norms[worst]),
        )
    return BipartiteSystem(ambient_dim, alg_a, alg_b, factor_dims)


def tensor_system(dim_a: int, dim_b: int, tol: Tolerances = DEFAULT_TOLERANCES) -> BipartiteSystem:
    """The standard example: B(C^dA) ⊗ 1 and 1 ⊗ B(C^dB)"""
    if dim_a < 2 or dim_b < 2:
        raise DimensionMismatch("factor dimensions must be at least 2", dim_a=dim_a, dim_b=dim_b)
    eye_a, eye_b = np.eye(dim_a), np.eye(dim_b)
    alg_a = generate(dim_a * dim_b, [np.kron(u, eye_b) for u in matrix_units(dim_a)], tol)
    alg_b = generate(dim_a * dim_b, [np.kron(eye_a, u) for u in matrix_units(dim_b)], tol)
    return new_system(dim_a * dim_b, alg_a, alg_b, (dim_a, dim_b), tol)


# Standard states

def singlet_vector() -> np.ndarray:
    """(|01> - |10>)/sqrt(2), the |+-> / |-+> antisymmetric combination in the computational basis"""
    return np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2)


def maximally_mixed(dim_a: int, dim_b: int) -> State:
    """1/(dA dB), certified by its own product decomposition"""
    rho_a = np.eye(dim_a, dtype=complex) / dim_a
    rho_b = np.eye(dim_b, dtype=complex) / dim_b
    certificate = SeparableCertificate(weights=np.array([1.0]), factors=((rho_a, rho_b),))
    return State(density=np.kron(rho_a, rho_b), certificate=certificate)


def werner_state(p: float, tol: Tolerances = DEFAULT_TOLERANCES) -> State:
    """p |singlet><singlet| + (1 - p) 1/4 on two qubits"""
    omega = singlet_vector()
    rho = p * np.outer(omega, omega.conj()) + (1 - p) * np.eye(4) / 4
    return make_state(rho, tol=tol)


def random_pure_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector"""
    vector = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return vector / np.linalg.norm(vector)


def random_density(dim: int, seed: int, rank: Optional[int] = None) -> State:
    """Induced-measure random density G G† / Tr(G G†) with G of shape dim x rank"""
    rng = np.random.default_rng(seed)
    rank = rank or dim
    ginibre = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = ginibre @ adjoint(ginibre)
    return make_state(rho / np.real(np.trace(rho)))


def product_state(system: BipartiteSystem, rho_a, rho_b,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> State:
    dim_a, dim_b = system.require_tensor()
    rho_a = validate_density(rho_a, tol, "rho_a")
    rho_b = validate_density(rho_b, tol, "rho_b")
    if rho_a.shape[0] != dim_a or rho_b.shape[0] != dim_b:
        raise InvalidDensity("factor densities do not match the system",
                             expected=(dim_a, dim_b), found=(rho_a.shape[0], rho_b.shape[0]))
    certificate = SeparableCertificate(weights=np.array([1.0]), factors=((rho_a, rho_b),))
    return make_state(np.kron(rho_a, rho_b), certificate, tol)


def random_separable(system: BipartiteSystem, n_terms: int, seed: int,
                     tol: Tolerances = DEFAULT_TOLERANCES) -> State:
    """Dirichlet-weighted mixture of Haar-random pure product states"""
    dim_a, dim_b = system.require_tensor()
    if n_terms < 1:
        raise InvalidDensity("a separable mixture needs at least one term", n_terms=n_terms)
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(n_terms))
    factors = []
    for _ in range(n_terms):
        a = random_pure_vector(dim_a, rng)
        b = random_pure_vector(dim_b, rng)
        factors.append((np.outer(a, a.conj()), np.outer(b, b.conj())))
    certificate = SeparableCertificate(weights=weights, factors=tuple(factors))
    return make_state(certificate.reconstruct(), certificate, tol)


# Composition of tensor factors

def interleave_permutation(factor_dims: Sequence[Tuple[int, int]]) -> np.ndarray:
    """Permutation taking A1 B1 A2 B2 ... to A1 A2 ... B1 B2 ..."""
    dims: List[int] = []
    for dim_a, dim_b in factor_dims:
        dims += [dim_a, dim_b]
    count = len(factor_dims)
    order = [2 * k for k in range(count)] + [2 * k + 1 for k in range(count)]
    return permutation_matrix(dims, order)


def _embed(local: np.ndarray, position: int, dims: Sequence[int]) -> np.ndarray:
    return kron(*[local if k == position else np.eye(d) for k, d in enumerate(dims)])


def compose(pairs: Sequence[Tuple[BipartiteSystem, State]],
            tol: Tolerances = DEFAULT_TOLERANCES,
            ambient_cap: Optional[int] = None) -> Tuple[BipartiteSystem, State]:
    """Tensor product of bipartite systems and their states

    Alice's composite algebra is generated by every Alice factor (identity on
    the rest), Bob's likewise. When every input is a tensor system the legs
    are reordered as (A1 A2 ... | B1 B2 ...) by `interleave_permutation`, and
    the composite is again a tensor system with factor dims (prod dA, prod dB).
    Otherwise the natural order of the ambient factors is kept.
    """
    if not pairs:
        raise DimensionMismatch("nothing to compose")
    if len(pairs) == 1:
        return pairs[0]
    cap = ambient_cap or get_settings().ambient_cap
    dims = [system.ambient_dim for system, _ in pairs]
    total = int(np.prod(dims))
    if total > cap:
        raise SizeLimit("composite ambient dimension exceeds the cap", dim=total, cap=cap)

    tensor = all(system.is_tensor for system, _ in pairs)
    permutation = (interleave_permutation([s.factor_dims for s, _ in pairs])
                   if tensor else np.eye(total, dtype=complex))

    def conjugate(matrix: np.ndarray) -> np.ndarray:
        return permutation @ matrix @ permutation.T

    gens_a, gens_b = [], []
    for position, (system, _) in enumerate(pairs):
        gens_a += [conjugate(_embed(e, position, dims)) for e in system.alg_a.basis]
        gens_b += [conjugate(_embed(f, position, dims)) for f in system.alg_b.basis]
    alg_a = generate(total, gens_a, tol)
    alg_b = generate(total, gens_b, tol)

    factor_dims = None
    if tensor:
        factor_dims = (int(np.prod([s.factor_dims[0] for s, _ in pairs])),
                       int(np.prod([s.factor_dims[1] for s, _ in pairs])))
    composite = new_system(total, alg_a, alg_b, factor_dims, tol)

    rho = conjugate(kron(*[state.density for _, state in pairs]))
    certificate = None
    if tensor and all(state.certificate is not None for _, state in pairs):
        certificate = _compose_certificates([state.certificate for _, state in pairs])
    logger.debug("systems_composed", factors=len(pairs), ambient_dim=total,
                 alice_dim=alg_a.dim, bob_dim=alg_b.dim)
    return composite, make_state(rho, certificate, tol)


def _compose_certificates(certificates: Sequence[SeparableCertificate]) -> SeparableCertificate:
    weights = [1.0]
    factors: List[Tuple[np.ndarray, np.ndarray]] = [(np.ones((1, 1)), np.ones((1, 1)))]
    for certificate in certificates:
        weights = [w * v for w in weights for v in certificate.weights]
        factors = [(np.kron(a, c), np.kron(b, d))
                   for a, b in factors for c, d in certificate.factors]
    return SeparableCertificate(weights=np.array(weights), factors=tuple(factors))


def with_certificate(state: State, certificate: Optional[SeparableCertificate]) -> State:
    return replace(state, certificate=certificate)


def random_pure_state(dim: int, seed: int) -> State:
    return vector_state(random_pure_vector(dim, np.random.default_rng(seed)))


def schmidt_rank_vector(dim_a: int, dim_b: int, rank: int, seed: int) -> np.ndarray:
    """Random unit vector on C^dA ⊗ C^dB with exactly `rank` Schmidt coefficients"""
    if not 1 <= rank <= min(dim_a, dim_b):
        raise DimensionMismatch("Schmidt rank out of range", rank=rank, dim_a=dim_a, dim_b=dim_b)
    rng = np.random.default_rng(seed)
    left = np.linalg.qr(rng.normal(size=(dim_a, dim_a)) + 1j * rng.normal(size=(dim_a, dim_a)))[0]
    right = np.linalg.qr(rng.normal(size=(dim_b, dim_b)) + 1j * rng.normal(size=(dim_b, dim_b)))[0]
    weights = rng.uniform(0.2, 1.0, size=rank)
    weights /= np.linalg.norm(weights)
    vector = sum(w * np.kron(left[:, k], right[:, k]) for k, w in enumerate(weights))
    return vector / np.linalg.norm(vector)


# Documents

def system_from_document(document: BipartiteDocument,
                         tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[BipartiteSystem, State]:
    """Rebuild and validate the system and state a document describes"""
    d = document.ambient_dim
    cap = get_settings().ambient_cap
    if d > cap:
        raise SizeLimit("ambient dimension exceeds the cap", dim=d, cap=cap)
    factor_dims = tuple(document.factor_dims) if document.factor_dims else None

    if not document.alice_generators and not document.bob_generators:
        if factor_dims is None:
            raise DimensionMismatch("a document without generators needs factor_dims")
        system = tensor_system(*factor_dims, tol=tol)
        if system.ambient_dim != d:
            raise DimensionMismatch("factor dimensions do not multiply to the ambient dimension",
                                    factor_dims=factor_dims, ambient_dim=d)
    else:
        for side, generators in (("alice", document.alice_generators), ("bob", document.bob_generators)):
            for index, generator in enumerate(generators):
                if generator.shape != (d, d):
                    raise DimensionMismatch(f"{side} generator {index} is not {d}x{d}",
                                            shape=generator.shape)
        system = new_system(d, generate(d, document.alice_generators, tol),
                            generate(d, document.bob_generators, tol), factor_dims, tol)

    if document.density.shape != (d, d):
        raise DimensionMismatch(f"density is not {d}x{d}", shape=document.density.shape)

    certificate = None
    if document.separable_certificate is not None:
        raw = document.separable_certificate
        weights = np.asarray(raw.weights, dtype=float)
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > tol.hermitian * 10:
            raise InvalidDensity("certificate weights must form a probability vector",
                                 invariant="certificate")
        factors = tuple((validate_density(a, tol, "rho_a"), validate_density(b, tol, "rho_b"))
                        for a, b in raw.factors)
        certificate = SeparableCertificate(weights=weights, factors=factors)
        mismatch = frobenius_norm(certificate.reconstruct() - document.density)
        if mismatch > tol.eig * 10:
            raise InvalidDensity("certificate does not reproduce the density",
                                 invariant="certificate", mismatch=mismatch)
    return system, make_state(document.density, certificate, tol)


def state_vector(state: State, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Unit vector of a pure state, canonical phase"""
    rank = svd_rank(state.density, tol)
    if rank != 1:
        raise InvalidDensity("state is not pure", invariant="rank", rank=rank)
    _, vectors = hermitian_eig(state.density, tol)
    return vectors[:, -1]
