"""
Dense complex-matrix kernels shared by every other processor

All operators are complex128 numpy arrays; vectors are one-dimensional arrays.
Every tolerance is relative to the Frobenius norm of the input and comes from
a `Tolerances` record passed in by the caller.
"""

from typing import List, NamedTuple, Sequence, Tuple

import numpy as np
import scipy.linalg
import structlog

from ..core.config import DEFAULT_TOLERANCES, Tolerances
from ..core.exceptions import DimensionMismatch, NonFinite, NonHermitian

logger = structlog.get_logger(__name__)


# Degenerate clusters larger than this keep the LAPACK basis
CANONICAL_CLUSTER_LIMIT = 64


class EigenSystem(NamedTuple):
    """Eigenvalues in ascending order with orthonormal eigenvector columns"""
    values: np.ndarray
    vectors: np.ndarray


class PsdMargin(NamedTuple):
    min_eig: float
    scale: float
    positive: bool


def as_matrix(value, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite complex matrix"""
    matrix = np.asarray(value, dtype=complex)
    if matrix.ndim != 2:
        raise DimensionMismatch(f"{name} must be two-dimensional", shape=matrix.shape)
    if not np.all(np.isfinite(matrix)):
        raise NonFinite(f"{name} has non-finite entries")
    return matrix


def as_vector(value, name: str = "vector") -> np.ndarray:
    vector = np.asarray(value, dtype=complex)
    if vector.ndim != 1:
        raise DimensionMismatch(f"{name} must be one-dimensional", shape=vector.shape)
    if not np.all(np.isfinite(vector)):
        raise NonFinite(f"{name} has non-finite entries")
    return vector


def require_square(matrix: np.ndarray, dim: int, name: str = "matrix") -> None:
    if matrix.shape != (dim, dim):
        raise DimensionMismatch(
            f"{name} must be {dim}x{dim}", expected=dim, shape=matrix.shape
        )


# Foundation operations

def adjoint(matrix: np.ndarray) -> np.ndarray:
    return np.conjugate(np.asarray(matrix)).T


def matmul(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    left, right = np.asarray(left), np.asarray(right)
    if left.shape[-1] != right.shape[0]:
        raise DimensionMismatch(
            "inner dimensions differ", left=left.shape, right=right.shape
        )
    return left @ right


def kron(*factors: np.ndarray) -> np.ndarray:
    result = np.ones((1, 1), dtype=complex)
    for factor in factors:
        result = np.kron(result, factor)
    return result


def trace(matrix: np.ndarray) -> complex:
    return complex(np.trace(matrix))


def hilbert_schmidt_inner(left: np.ndarray, right: np.ndarray) -> complex:
    """<left, right> = Tr(left† right)"""
    left, right = np.asarray(left), np.asarray(right)
    if left.shape != right.shape:
        raise DimensionMismatch("shapes differ", left=left.shape, right=right.shape)
    return complex(np.vdot(left, right))


def frobenius_norm(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix))


def operator_norm(matrix: np.ndarray) -> float:
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0.0
    return float(np.linalg.norm(matrix, 2))


def svd_rank(matrix: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Number of singular values above tol.rank times the Frobenius norm"""
    matrix = np.asarray(matrix)
    norm = frobenius_norm(matrix)
    if norm == 0.0:
        return 0
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    return int(np.sum(singular_values > tol.rank * norm))


# Hermitian spectral calculus

def hermitian_part(matrix, tol: Tolerances = DEFAULT_TOLERANCES, name: str = "matrix") -> np.ndarray:
    """Symmetrize, refusing inputs whose asymmetry exceeds the hermiticity tolerance"""
    matrix = as_matrix(matrix, name)
    if matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatch(f"{name} must be square", shape=matrix.shape)
    asymmetry = float(np.max(np.abs(matrix - adjoint(matrix)))) if matrix.size else 0.0
    scale = frobenius_norm(matrix)
    if asymmetry > tol.hermitian * max(scale, 1e-300):
        raise NonHermitian(
            f"{name} is not hermitian", asymmetry=asymmetry, norm=scale
        )
    return (matrix + adjoint(matrix)) / 2


def canonical_phase(vector: np.ndarray, cutoff: float = 1e-12) -> np.ndarray:
    """Rotate so that the first non-negligible component is real and positive"""
    vector = np.asarray(vector, dtype=complex)
    magnitudes = np.abs(vector)
    if magnitudes.size == 0 or magnitudes.max() == 0.0:
        return vector
    index = int(np.argmax(magnitudes > cutoff * magnitudes.max()))
    return vector * (abs(vector[index]) / vector[index])


def _first_support(vector: np.ndarray, cutoff: float = 1e-8) -> int:
    magnitudes = np.abs(vector)
    return int(np.argmax(magnitudes > cutoff * magnitudes.max()))


def _canonical_cluster_basis(vectors: np.ndarray) -> np.ndarray:
    """Basis of span(vectors) obtained by Gram-Schmidt on the projector's columns in index order"""
    count = vectors.shape[1]
    projector = vectors @ adjoint(vectors)
    basis: List[np.ndarray] = []
    for column in range(projector.shape[0]):
        candidate = projector[:, column].copy()
        if basis:
            current = np.column_stack(basis)
            candidate -= current @ (adjoint(current) @ candidate)
        norm = np.linalg.norm(candidate)
        if norm > 1e-6:
            basis.append(candidate / norm)
        if len(basis) == count:
            break
    if len(basis) < count:
        return vectors
    return np.column_stack(basis)


def hermitian_eig(matrix, tol: Tolerances = DEFAULT_TOLERANCES) -> EigenSystem:
    """Eigen-decomposition of a hermitian matrix with a deterministic eigenvector convention

    Eigenvalues ascend. Inside a degenerate cluster the basis is rebuilt from
    the cluster projector in index order, so the result does not depend on the
    LAPACK driver; every vector then gets its first nonzero component real
    positive, and cluster members are ordered by that component's index.
    """
    hermitian = hermitian_part(matrix, tol)
    values, vectors = np.linalg.eigh(hermitian)
    scale = frobenius_norm(hermitian)
    threshold = tol.eig * max(scale, 1e-300)

    ordered = np.empty_like(vectors)
    start = 0
    while start < len(values):
        stop = start + 1
        while stop < len(values) and values[stop] - values[stop - 1] <= threshold:
            stop += 1
        cluster = vectors[:, start:stop]
        if 1 < stop - start <= CANONICAL_CLUSTER_LIMIT:
            cluster = _canonical_cluster_basis(cluster)
        cluster = np.column_stack([canonical_phase(cluster[:, k]) for k in range(cluster.shape[1])])
        order = sorted(range(cluster.shape[1]), key=lambda k: _first_support(cluster[:, k]))
        ordered[:, start:stop] = cluster[:, order]
        start = stop
    return EigenSystem(values=values, vectors=ordered)


def eigenvalues(matrix, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    return np.linalg.eigvalsh(hermitian_part(matrix, tol))


def min_eigenvalue(matrix, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Smallest eigenvalue of a hermitian matrix"""
    values = eigenvalues(matrix, tol)
    return float(values[0]) if values.size else 0.0


def psd_margin(matrix, tol: Tolerances = DEFAULT_TOLERANCES) -> PsdMargin:
    """Raw minimum eigenvalue and the PSD verdict lambda_min >= -psd * ||M||"""
    hermitian = hermitian_part(matrix, tol)
    scale = frobenius_norm(hermitian)
    lowest = min_eigenvalue(hermitian, tol)
    return PsdMargin(min_eig=lowest, scale=scale, positive=lowest >= -tol.psd * scale)


def is_psd(matrix, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    return psd_margin(matrix, tol).positive


def sign_function(matrix, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Spectral sign of a hermitian matrix; eigenvalues within tolerance of 0 map to +1"""
    values, vectors = hermitian_eig(matrix, tol)
    scale = max(float(np.max(np.abs(values))) if values.size else 0.0, 1e-300)
    signs = np.where(values >= -tol.eig * scale, 1.0, -1.0)
    signs = np.where(np.abs(values) <= tol.eig * scale, 1.0, signs)
    return (vectors * signs) @ adjoint(vectors)


def psd_sqrt(matrix, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Square root of a positive semidefinite matrix (small negative noise clipped)"""
    values, vectors = np.linalg.eigh(hermitian_part(matrix, tol))
    roots = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * roots) @ adjoint(vectors)


def expm_hermitian(matrix, factor: float, tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[np.ndarray, float]:
    """exp(factor * (H - lambda_min)) together with lambda_min, for stable Gibbs weights"""
    values, vectors = np.linalg.eigh(hermitian_part(matrix, tol))
    shift = float(values[0])
    weights = np.exp(factor * (values - shift))
    return (vectors * weights) @ adjoint(vectors), shift


# Least squares and spans

def least_squares(
    columns: Sequence[np.ndarray],
    target: np.ndarray,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Tuple[np.ndarray, float]:
    """Minimum-norm minimizer of ||sum_k c_k col_k - target|| and the residual norm"""
    target = as_vector(target, "target")
    if len(columns) == 0:
        return np.zeros(0, dtype=complex), float(np.linalg.norm(target))
    vectors = [as_vector(column, "column") for column in columns]
    if any(vector.shape != target.shape for vector in vectors):
        raise DimensionMismatch(
            "columns and target must share a dimension",
            target=target.shape[0],
            columns=[vector.shape[0] for vector in vectors],
        )
    stacked = np.column_stack(vectors)
    coefficients, _, _, _ = scipy.linalg.lstsq(stacked, target, cond=tol.rank)
    residual = float(np.linalg.norm(stacked @ coefficients - target))
    return coefficients, residual


def orthonormal_span(matrices: Sequence[np.ndarray], tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Hilbert-Schmidt orthonormal basis of the span, by singular-value filtering

    Returns an array of shape (n, rows, cols).
    """
    matrices = [np.asarray(m, dtype=complex) for m in matrices]
    if not matrices:
        raise DimensionMismatch("cannot span an empty family")
    shape = matrices[0].shape
    if any(m.shape != shape for m in matrices):
        raise DimensionMismatch("matrices differ in shape", shapes=[m.shape for m in matrices])
    stacked = np.column_stack([m.reshape(-1) for m in matrices])
    norm = frobenius_norm(stacked)
    if norm == 0.0:
        return np.zeros((0,) + shape, dtype=complex)
    left, singular_values, _ = np.linalg.svd(stacked, full_matrices=False)
    keep = singular_values > tol.rank * norm
    basis = left[:, keep].T
    return basis.reshape((basis.shape[0],) + shape)


def project_onto_span(basis: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Hilbert-Schmidt orthogonal projection onto the span of an orthonormal basis"""
    coefficients = np.einsum("kij,ij->k", np.conjugate(basis), matrix)
    return np.einsum("k,kij->ij", coefficients, basis)


def span_residual(basis: np.ndarray, matrix: np.ndarray) -> float:
    return frobenius_norm(matrix - project_onto_span(basis, matrix))


def null_space(operator: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Orthonormal columns spanning the kernel of a linear map"""
    return scipy.linalg.null_space(operator, rcond=tol.rank)


# Tensor bookkeeping

def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every factor not in `keep`; kept factors appear in the order given"""
    dims = list(dims)
    total = int(np.prod(dims))
    require_square(np.asarray(rho), total, "rho")
    keep = list(keep)
    if len(set(keep)) != len(keep) or any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionMismatch("invalid factor selection", keep=keep, factors=len(dims))
    rest = [k for k in range(len(dims)) if k not in keep]
    n = len(dims)
    tensor = np.asarray(rho).reshape(dims + dims)
    order = keep + rest + [n + k for k in keep] + [n + r for r in rest]
    kept_dim = int(np.prod([dims[k] for k in keep])) if keep else 1
    rest_dim = int(np.prod([dims[r] for r in rest])) if rest else 1
    tensor = tensor.transpose(order).reshape(kept_dim, rest_dim, kept_dim, rest_dim)
    return np.einsum("arbr->ab", tensor)


def permutation_matrix(dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Unitary P with P (x_0 ⊗ ... ⊗ x_{n-1}) = x_{order[0]} ⊗ ... ⊗ x_{order[n-1]}"""
    dims = list(dims)
    total = int(np.prod(dims))
    identity = np.eye(total, dtype=complex).reshape(dims + [total])
    permuted = identity.transpose(list(order) + [len(dims)]).reshape(total, total)
    return permuted


def matrix_units(dim: int) -> List[np.ndarray]:
    """|i><j| for i, j < dim in row-major order"""
    units = []
    for i in range(dim):
        for j in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[i, j] = 1.0
            units.append(unit)
    return units


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
