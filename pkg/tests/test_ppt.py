"""
Tests for the generalized ppt test and its witnesses
"""

import numpy as np
import pytest

from entangle.core.exceptions import DimensionMismatch, FamilyNotInAlgebra
from entangle.models.reports import Verdict
from entangle.processors.bipartite import random_separable, vector_state
from entangle.processors.matrix import PAULI_X, PAULI_Z, kron, min_eigenvalue
from entangle.processors.ppt import (
    check_partial_transpose_agreement,
    correlation_bound_check,
    family_from_vector,
    is_ppt,
    npt_witness_search_k2,
    partial_transpose,
    polarized_matrix,
    polarized_partial_transpose,
    ppt_kernel,
    ppt_sum,
    random_npt_state,
    random_ppt_state,
)

I2 = np.eye(2)


@pytest.mark.unit
class TestPartialTranspose:

    def test_singlet_partial_transpose(self, singlet):
        assert min_eigenvalue(partial_transpose(singlet.density, 2, 2)) == pytest.approx(-0.5)

    def test_product_operator(self, rng):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(3, 3))
        assert np.allclose(partial_transpose(np.kron(a, b), 2, 3), np.kron(a.T, b))

    def test_shape_checked(self):
        with pytest.raises(DimensionMismatch):
            partial_transpose(np.eye(4), 2, 3)


@pytest.mark.unit
class TestKernel:

    def test_singlet_is_npt(self, qubits, singlet):
        report = is_ppt(qubits, singlet)
        assert report.verdict == Verdict.NPT
        assert report.min_eig < 0
        assert report.witness is not None
        assert report.witness.value < 0

    def test_mixed_is_ppt(self, qubits, mixed):
        report = is_ppt(qubits, mixed)
        assert report.is_ppt
        assert report.witness is None

    def test_kernel_is_hermitian(self, qubits, werner):
        kernel = ppt_kernel(qubits, werner(0.6))
        assert kernel.shape == (16, 16)
        assert np.allclose(kernel, kernel.conj().T)

    def test_kernel_dropped_on_request(self, qubits, mixed):
        assert is_ppt(qubits, mixed, keep_kernel=False).kernel is None

    def test_state_size_checked(self, qutrits, singlet):
        with pytest.raises(DimensionMismatch):
            ppt_kernel(qutrits, singlet)

    def test_werner_boundary(self, qubits, werner):
        low, high = 0.0, 1.0
        for _ in range(40):
            middle = (low + high) / 2
            if is_ppt(qubits, werner(middle), keep_kernel=False).is_ppt:
                low = middle
            else:
                high = middle
        assert low == pytest.approx(1 / 3, abs=1e-6)

    def test_ppt_sum_matches_kernel_form(self, qubits, werner, rng):
        state = werner(0.7)
        z = rng.normal(size=16) + 1j * rng.normal(size=16)
        alice, bob = family_from_vector(qubits, z)
        direct = ppt_sum(state, alice, bob)
        form = np.vdot(z, ppt_kernel(qubits, state) @ z)
        assert direct == pytest.approx(form, abs=1e-10)

    def test_ppt_sum_families_must_pair(self, singlet):
        with pytest.raises(DimensionMismatch):
            ppt_sum(singlet, [np.eye(4)], [])

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_agreement_on_random_states(self, qutrits, seed):
        for state in (random_ppt_state(qutrits, seed), random_npt_state(qutrits, seed)):
            assert check_partial_transpose_agreement(qutrits, state).agrees

    def test_random_states_land_on_their_side(self, qutrits):
        assert is_ppt(qutrits, random_ppt_state(qutrits, 5), keep_kernel=False).is_ppt
        assert not is_ppt(qutrits, random_npt_state(qutrits, 5), keep_kernel=False).is_ppt


@pytest.mark.unit
class TestPolarized:

    @pytest.fixture
    def families(self):
        alice = [kron(PAULI_X, I2), kron(PAULI_Z, I2), np.eye(4)]
        bob = [kron(I2, PAULI_X), kron(I2, PAULI_Z)]
        return alice, bob

    def test_positive_for_every_state(self, qubits, singlet, families):
        matrix = polarized_matrix(qubits, singlet, *families)
        assert matrix.shape == (6, 6)
        assert min_eigenvalue(matrix) > -1e-10

    def test_partial_transpose_positive_on_separable(self, qubits, families):
        state = random_separable(qubits, 3, seed=8)
        matrix = polarized_matrix(qubits, state, *families)
        assert min_eigenvalue(polarized_partial_transpose(matrix, 3, 2)) > -1e-10

    def test_partial_transpose_negative_on_singlet(self, qubits, singlet):
        alice = [kron(u, I2) for u in (np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]]),
                                       np.array([[0, 0], [1, 0]]), np.array([[0, 0], [0, 1]]))]
        bob = [kron(I2, u) for u in (np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]]),
                                     np.array([[0, 0], [1, 0]]), np.array([[0, 0], [0, 1]]))]
        matrix = polarized_matrix(qubits, singlet, alice, bob)
        assert min_eigenvalue(polarized_partial_transpose(matrix, 4, 4)) < -1e-3

    def test_family_must_live_in_algebra(self, qubits, singlet):
        with pytest.raises(FamilyNotInAlgebra) as info:
            polarized_matrix(qubits, singlet, [kron(I2, PAULI_X)], [kron(I2, PAULI_Z)])
        assert info.value.context["index"] == 0


@pytest.mark.unit
class TestCorrelationBound:

    def test_holds_on_separable(self, qubits):
        state = random_separable(qubits, 2, seed=3)
        alice = [kron(PAULI_X, I2), kron(PAULI_Z, I2)]
        bob = [kron(I2, PAULI_X), kron(I2, PAULI_Z)]
        bound = correlation_bound_check(qubits, state, alice, bob)
        assert bound.state_is_ppt and bound.holds

    def test_violated_by_singlet_witness(self, qubits, singlet):
        witness = is_ppt(qubits, singlet).witness
        bound = correlation_bound_check(qubits, singlet, witness.alice, witness.bob)
        assert not bound.state_is_ppt
        assert bound.rhs < 0
        assert not bound.holds


@pytest.mark.unit
class TestK2Search:

    def test_singlet_has_k2_witness(self, qubits, singlet):
        witness = npt_witness_search_k2(qubits, singlet, restarts=2, seed=0)
        assert witness is not None
        assert witness.k == 2
        assert witness.value < 0
        assert ppt_sum(singlet, witness.alice, witness.bob).real == pytest.approx(witness.value, abs=1e-9)

    def test_mixed_has_none(self, qubits, mixed):
        assert npt_witness_search_k2(qubits, mixed, restarts=2, seed=0) is None

    def test_deterministic_for_seed(self, qubits, werner):
        first = npt_witness_search_k2(qubits, werner(0.8), restarts=3, seed=4)
        second = npt_witness_search_k2(qubits, werner(0.8), restarts=3, seed=4)
        assert first.value == second.value
        assert first.restart == second.restart

    def test_entangled_qutrit_vector(self, qutrits):
        psi = np.zeros(9, dtype=complex)
        psi[[0, 4, 8]] = 1 / np.sqrt(3)
        witness = npt_witness_search_k2(qutrits, vector_state(psi), restarts=2, seed=1)
        assert witness is not None and witness.value < 0
