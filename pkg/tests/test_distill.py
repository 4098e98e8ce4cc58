"""
Tests for CP maps, separable operations and the distillation protocols
"""

import numpy as np
import pytest

from entangle.core.exceptions import (
    InvalidOperation,
    NotCyclic,
    NotNormalized,
    WrongAlgebra,
)
from entangle.models.documents import dump_document, load_plan
from entangle.processors.bipartite import (
    new_system,
    schmidt_rank_vector,
    singlet_vector,
    tensor_system,
    vector_state,
)
from entangle.processors.distill import (
    SWAP,
    CPMap,
    SeparableSuperoperator,
    apply_superoperator,
    cp_apply,
    distill_from_cyclic,
    doubles_condition_check,
    is_one_distillable,
    random_separable_superoperator,
    rate_estimate,
    reeh_schlieder_instrument,
    renormalize_selected,
    replay_plan,
    two_qubit_reduction,
    witness_to_choi,
)
from entangle.processors.matrix import PAULI_X, PAULI_Z, kron, matrix_units
from entangle.processors.ppt import ppt_sum
from entangle.processors.star_algebra import generate

I2 = np.eye(2)


def alice_identity_map(qubits, scale=1.0):
    """T(X) = scale * X ⊗ 1"""
    units = matrix_units(2)
    blocks = np.array([[scale * kron(units[2 * a + b], I2) for b in range(2)] for a in range(2)])
    return CPMap.from_blocks(blocks, qubits.alg_a)


def bob_identity_map(qubits):
    units = matrix_units(2)
    blocks = np.array([[kron(I2, units[2 * a + b]) for b in range(2)] for a in range(2)])
    return CPMap.from_blocks(blocks, qubits.alg_b)


def max_entangled(dim):
    psi = np.zeros(dim * dim, dtype=complex)
    psi[[k * dim + k for k in range(dim)]] = 1 / np.sqrt(dim)
    return psi


@pytest.mark.unit
class TestCPMap:

    def test_kraus_round_trip(self, rng):
        kraus = [rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2)) for _ in range(2)]
        cp_map = CPMap.from_kraus(kraus)
        rebuilt = CPMap.from_kraus(cp_map.kraus_operators())
        assert np.allclose(rebuilt.choi, cp_map.choi)
        x = rng.normal(size=(2, 2))
        expected = sum(v @ x @ v.conj().T for v in kraus)
        assert np.allclose(cp_apply(cp_map, x), expected)

    def test_transpose_is_not_completely_positive(self):
        units = matrix_units(2)
        blocks = np.array([[units[2 * b + a] for b in range(2)] for a in range(2)])
        with pytest.raises(InvalidOperation):
            CPMap.from_blocks(blocks)

    def test_target_algebra_enforced(self, qubits):
        units = matrix_units(2)
        blocks = np.array([[kron(I2, units[2 * a + b]) for b in range(2)] for a in range(2)])
        with pytest.raises(WrongAlgebra):
            CPMap.from_blocks(blocks, qubits.alg_a)

    def test_unit(self, qubits):
        assert np.allclose(alice_identity_map(qubits).unit(), np.eye(4))


@pytest.mark.unit
class TestTwoQubitReduction:

    def test_identity_maps_reproduce_state(self, qubits, werner):
        state = werner(0.4)
        omega2 = two_qubit_reduction(qubits, state, alice_identity_map(qubits), bob_identity_map(qubits))
        assert np.allclose(omega2, state.density)

    def test_swap_equals_ppt_sum(self, qubits, werner, rng):
        state = werner(0.8)
        alice = [qubits.alg_a.element(rng.normal(size=4)) for _ in range(2)]
        bob = [qubits.alg_b.element(rng.normal(size=4)) for _ in range(2)]
        alice_map, bob_map = witness_to_choi(qubits, alice, bob)
        omega2 = two_qubit_reduction(qubits, state, alice_map, bob_map)
        assert np.trace(omega2 @ SWAP).real == pytest.approx(ppt_sum(state, alice, bob).real, abs=1e-10)

    def test_singlet_certified(self, qubits, singlet):
        report = is_one_distillable(qubits, singlet, restarts=2)
        assert report.certified
        assert report.pt_min_eig < 0
        assert report.transposition_gap <= 1e-9

    def test_mixed_inconclusive(self, qubits, mixed):
        report = is_one_distillable(qubits, mixed, restarts=2)
        assert not report.certified
        assert report.witness is None


@pytest.mark.unit
class TestCyclicDistillation:

    @pytest.mark.parametrize("dim", [2, 3])
    def test_maximally_entangled(self, dim):
        system = tensor_system(dim, dim)
        plan = distill_from_cyclic(system, max_entangled(dim))
        assert plan.selection_residual == pytest.approx(0.0, abs=1e-9)
        assert plan.pt_min_eig < 0
        normalized = plan.omega2 / plan.success_probability
        projector = np.outer(singlet_vector(), singlet_vector().conj())
        assert np.allclose(normalized, projector, atol=1e-8)
        assert rate_estimate(plan) == pytest.approx(plan.success_probability)

    @pytest.mark.parametrize("seed", [5, 17])
    def test_random_full_schmidt_rank_qutrits(self, qutrits, seed):
        psi = schmidt_rank_vector(3, 3, 3, seed)
        plan = distill_from_cyclic(qutrits, psi, seed)
        assert plan.selection_residual <= 1e-9
        assert plan.pt_min_eig < 0
        assert plan.pt_min_eig == pytest.approx(-plan.success_probability / 2, abs=1e-8)
        assert plan.singlet_fidelity == pytest.approx(1.0, abs=1e-8)
        assert 0 < plan.success_probability <= 1.0 + 1e-12
        normalized = plan.omega2 / plan.success_probability
        projector = np.outer(singlet_vector(), singlet_vector().conj())
        assert np.allclose(normalized, projector, atol=1e-8)
        assert replay_plan(plan).passed

    def test_product_vector_not_cyclic(self, qubits):
        with pytest.raises(NotCyclic):
            distill_from_cyclic(qubits, np.array([1.0, 0.0, 0.0, 0.0]))

    def test_schmidt_deficient_not_cyclic(self, qutrits):
        psi = np.zeros(9, dtype=complex)
        psi[[0, 4]] = 1 / np.sqrt(2)
        with pytest.raises(NotCyclic) as info:
            distill_from_cyclic(qutrits, psi)
        assert info.value.context["rank"] == 6

    def test_replay_passes(self, qubits):
        plan = distill_from_cyclic(qubits, singlet_vector())
        result = replay_plan(plan)
        assert result.passed
        assert result.failures == []

    def test_replay_detects_tampering(self, qubits):
        plan = distill_from_cyclic(qubits, singlet_vector())
        tampered = plan.model_copy(update={"omega2": plan.omega2 * 1.01})
        result = replay_plan(tampered)
        assert not result.passed
        assert "omega2" in result.failures

    def test_plan_survives_serialization(self, qubits, tmp_path):
        plan = distill_from_cyclic(qubits, singlet_vector())
        path = tmp_path / "plan.json"
        dump_document(plan, path)
        loaded = load_plan(path)
        assert np.allclose(loaded.selector, plan.selector)
        assert replay_plan(loaded).passed


@pytest.mark.unit
class TestSelection:

    def test_alice_identity_selection(self, qubits, singlet):
        selected, probability = renormalize_selected(singlet, alice_identity_map(qubits))
        assert probability == pytest.approx(1.0)
        assert np.allclose(selected.density, np.eye(2) / 2)

    def test_selection_above_identity_rejected(self, qubits, singlet):
        with pytest.raises(InvalidOperation):
            renormalize_selected(singlet, alice_identity_map(qubits, scale=2.0))

    def test_instrument_is_unital(self, qubits):
        selector = kron(np.array([[2.0, 1.0], [0.0, 0.5]]), I2)
        instrument = reeh_schlieder_instrument(qubits.alg_a, selector)
        assert np.allclose(instrument.unselected(np.eye(4)), np.eye(4))

    def test_instrument_selector_in_algebra(self, qubits):
        with pytest.raises(WrongAlgebra):
            reeh_schlieder_instrument(qubits.alg_a, kron(I2, PAULI_X))


@pytest.mark.unit
class TestSeparableSuperoperator:

    def test_random_operation_is_normalized(self, qubits, singlet):
        operation = random_separable_superoperator(qubits, (2, 2), seed=3)
        assert operation.normalization_defect() < 1e-9
        system, state = apply_superoperator(operation, singlet)
        assert system.factor_dims == (2, 2)
        assert np.trace(state.density).real == pytest.approx(1.0)

    def test_unnormalized_rejected(self, qubits, singlet):
        operation = SeparableSuperoperator(terms=((alice_identity_map(qubits, scale=0.5),
                                                   bob_identity_map(qubits)),))
        with pytest.raises(NotNormalized):
            apply_superoperator(operation, singlet)

    def test_identity_operation(self, qubits, werner):
        operation = SeparableSuperoperator(terms=((alice_identity_map(qubits), bob_identity_map(qubits)),))
        state = werner(0.3)
        _, output = apply_superoperator(operation, state)
        assert np.allclose(output.density, state.density)


@pytest.mark.unit
class TestDoubles:

    def test_singlet_doubles(self, qubits, singlet):
        check = doubles_condition_check(qubits, singlet)
        assert check.cond1
        assert check.cond2_residual == pytest.approx(0.0, abs=1e-9)

    def test_first_condition_threshold(self, qubits, singlet):
        value = doubles_condition_check(qubits, singlet).cond1_value
        assert doubles_condition_check(qubits, singlet, epsilon=0.5 * value).cond1
        strict = doubles_condition_check(qubits, singlet, epsilon=value)
        assert not strict.cond1
        assert strict.cond1_indices is None and strict.cond1_orientation is None

    def test_mixed_state(self, qubits, mixed):
        check = doubles_condition_check(qubits, mixed)
        assert check.cond1
        assert len(check.cond1_indices) == 5
        assert check.cond2_residual > 1e-3

    def test_abelian_pair_fails_first_condition(self):
        alg_a = generate(4, [kron(PAULI_Z, I2)])
        alg_b = generate(4, [kron(I2, PAULI_Z)])
        system = new_system(4, alg_a, alg_b)
        check = doubles_condition_check(system, vector_state(singlet_vector()))
        assert not check.cond1
        assert check.cond1_indices is None
