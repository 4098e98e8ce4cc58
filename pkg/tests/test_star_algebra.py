"""
Tests for finite-dimensional *-algebras
"""

import numpy as np
import pytest

from entangle.core.exceptions import AbelianAlgebra, DimensionMismatch, NotNormalized
from entangle.processors.bipartite import singlet_vector
from entangle.processors.matrix import PAULI_X, PAULI_Z, kron, matrix_units
from entangle.processors.star_algebra import (
    center,
    commutant,
    compress,
    conditional_expectation,
    full_algebra,
    generate,
    is_cyclic,
    is_separating,
    qubit_embedding,
    rs_select,
    same_span,
    scalars,
    span_is_abelian,
    wedderburn_blocks,
)

I2 = np.eye(2)


def unit(dim, row, col):
    return matrix_units(dim)[row * dim + col]


@pytest.fixture(scope="module")
def alice_qubit():
    """M_2 ⊗ 1 inside M_4"""
    return generate(4, [kron(PAULI_X, I2), kron(PAULI_Z, I2)])


@pytest.fixture(scope="module")
def qubit_plus_scalar():
    """M_2 ⊕ C inside M_3"""
    return generate(3, [unit(3, 0, 1), unit(3, 2, 2)])


@pytest.mark.unit
class TestGenerate:

    def test_dimensions(self, alice_qubit):
        assert alice_qubit.dim == 4
        assert full_algebra(3).dim == 9
        assert scalars(3).dim == 1

    def test_full_algebra_basis_is_matrix_units(self):
        algebra = full_algebra(3)
        assert np.array_equal(algebra.basis, np.array(matrix_units(3)))
        assert algebra.contains(np.arange(9).reshape(3, 3))

    def test_contains_products_and_identity(self, alice_qubit):
        product = kron(PAULI_X @ PAULI_Z, I2)
        assert alice_qubit.contains(product)
        assert alice_qubit.contains(np.eye(4))
        assert not alice_qubit.contains(kron(I2, PAULI_X))

    def test_diagonal_generator_is_abelian(self):
        alg = generate(3, [np.diag([1.0, 2.0, 3.0])])
        assert alg.dim == 3
        assert alg.is_abelian()

    def test_wrong_generator_size(self):
        with pytest.raises(DimensionMismatch):
            generate(3, [np.eye(2)])

    def test_direct_sum_dimension(self, qubit_plus_scalar):
        assert qubit_plus_scalar.dim == 5
        assert not qubit_plus_scalar.is_abelian()


@pytest.mark.unit
class TestCommutant:

    def test_commutant_of_alice_is_bob(self, alice_qubit):
        bob = generate(4, [kron(I2, PAULI_X), kron(I2, PAULI_Z)])
        assert same_span(commutant(alice_qubit), bob)

    def test_bicommutant(self, qubit_plus_scalar):
        assert same_span(commutant(commutant(qubit_plus_scalar)), qubit_plus_scalar)

    def test_center(self, alice_qubit, qubit_plus_scalar):
        assert center(alice_qubit).shape[0] == 1
        assert center(qubit_plus_scalar).shape[0] == 2

    def test_conditional_expectation_traces_out(self, alice_qubit, rng):
        a = rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2))
        expected = kron(a, np.trace(b) / 2 * I2)
        assert np.allclose(conditional_expectation(alice_qubit, kron(a, b)), expected)


@pytest.mark.unit
class TestWedderburn:

    def test_blocks_in_index_order(self, qubit_plus_scalar):
        decomposition = wedderburn_blocks(qubit_plus_scalar)
        assert [block.size for block in decomposition.blocks] == [2, 1]
        assert decomposition.linear_dim == qubit_plus_scalar.dim

    def test_multiplicity(self, alice_qubit):
        (block,) = wedderburn_blocks(alice_qubit).blocks
        assert (block.size, block.multiplicity) == (2, 2)

    def test_matrix_units_multiply(self, qubit_plus_scalar):
        units = wedderburn_blocks(qubit_plus_scalar).blocks[0].units
        assert np.allclose(units[0, 1] @ units[1, 0], units[0, 0], atol=1e-9)
        assert np.allclose(units[0, 1] @ units[0, 1], 0, atol=1e-9)
        assert np.allclose(units[0, 1].conj().T, units[1, 0], atol=1e-9)

    def test_deterministic_for_seed(self, alice_qubit):
        first = wedderburn_blocks(alice_qubit, seed=4).blocks[0].units
        second = wedderburn_blocks(alice_qubit, seed=4).blocks[0].units
        assert np.array_equal(first, second)

    def test_qubit_embedding(self, qubit_plus_scalar):
        embedding = qubit_embedding(qubit_plus_scalar)
        assert embedding.block_index == 0
        assert np.linalg.matrix_rank(embedding.support) == 2
        assert np.allclose(embedding.apply(np.eye(2)), embedding.support)

    def test_abelian_has_no_embedding(self):
        with pytest.raises(AbelianAlgebra):
            qubit_embedding(generate(3, [np.diag([1.0, 2.0, 3.0])]))

    def test_compress_to_scalar_corner(self, qubit_plus_scalar):
        corner = compress(qubit_plus_scalar, unit(3, 2, 2))
        assert corner.shape[0] == 1
        assert span_is_abelian(corner)


@pytest.mark.unit
class TestCyclicVectors:

    def test_singlet_is_cyclic(self, alice_qubit):
        result = is_cyclic(alice_qubit, singlet_vector())
        assert result.cyclic and result.rank == 4

    def test_product_vector_is_not_cyclic(self, alice_qubit):
        result = is_cyclic(alice_qubit, np.array([1.0, 0.0, 0.0, 0.0]))
        assert not result.cyclic
        assert result.rank == 2

    def test_cyclic_for_algebra_iff_separating_for_commutant(self, alice_qubit):
        bob = commutant(alice_qubit)
        for psi in (singlet_vector(), np.array([1.0, 0.0, 0.0, 0.0])):
            assert is_cyclic(alice_qubit, psi).cyclic == is_separating(bob, psi).cyclic

    def test_rs_select_reaches_target(self, alice_qubit):
        psi = singlet_vector()
        chi = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
        selection = rs_select(alice_qubit, psi, chi)
        assert selection.residual == pytest.approx(0.0, abs=1e-10)
        assert np.allclose(selection.operator @ psi, chi)
        assert alice_qubit.contains(selection.operator)

    def test_vector_size_checked(self, alice_qubit):
        with pytest.raises(DimensionMismatch):
            is_cyclic(alice_qubit, np.ones(3))

    def test_unit_norm_required(self, alice_qubit):
        unit_vector = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
        with pytest.raises(NotNormalized) as info:
            is_cyclic(alice_qubit, 2 * singlet_vector())
        assert info.value.context["norm"] == pytest.approx(2.0)
        with pytest.raises(NotNormalized):
            rs_select(alice_qubit, 0.5 * singlet_vector(), unit_vector)
        with pytest.raises(NotNormalized) as info:
            rs_select(alice_qubit, singlet_vector(), 3 * unit_vector)
        assert info.value.context["vector"] == "chi"
