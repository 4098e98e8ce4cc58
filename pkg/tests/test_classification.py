"""
Tests for the combined classification and the implication-chain check
"""

import pytest

from entangle.core.exceptions import InputError
from entangle.models.reports import ChshResult, DistillabilityReport, DistillVerdict, PptReport, Verdict
from entangle.processors.bipartite import random_separable
from entangle.processors.classification import (
    CRITERIA,
    chain_violations,
    classify_state,
    parse_criteria,
    state_digest,
)


def ppt_report(verdict):
    return PptReport(verdict=verdict, min_eig=0.0 if verdict == Verdict.PPT else -0.5, scale=1.0)


def chsh_result(beta):
    return ChshResult(beta=beta, value=beta, observables=[], membership_residuals=[], norms=[],
                      iterations=1, restarts_used=1, best_restart=0)


@pytest.mark.unit
class TestCriteria:

    def test_default_is_everything(self):
        assert parse_criteria(None) == list(CRITERIA)

    def test_subset_keeps_canonical_order(self):
        assert parse_criteria("distill, ppt") == ["ppt", "distill"]

    def test_unknown_rejected(self):
        with pytest.raises(InputError) as info:
            parse_criteria("ppt,entropy")
        assert info.value.context["unknown"] == ["entropy"]


@pytest.mark.unit
class TestChainViolations:

    def test_consistent_verdicts(self):
        assert chain_violations(True, ppt_report(Verdict.PPT), chsh_result(2.0), None) == []

    def test_separable_but_npt(self):
        violations = chain_violations(True, ppt_report(Verdict.NPT), None, None)
        assert violations == ["certified separable state is npt"]

    def test_ppt_but_bell_violating(self):
        violations = chain_violations(False, ppt_report(Verdict.PPT), chsh_result(2.5), None)
        assert violations == ["ppt state violates the Bell-CHSH inequality"]

    def test_ppt_but_distillable(self):
        report = DistillabilityReport(verdict=DistillVerdict.CERTIFIED)
        violations = chain_violations(False, ppt_report(Verdict.PPT), None, report)
        assert violations == ["ppt state certified 1-distillable"]

    def test_slack_on_classical_bound(self):
        assert chain_violations(False, ppt_report(Verdict.PPT), chsh_result(2.0 + 1e-8), None) == []

    def test_nothing_checked_without_ppt(self):
        assert chain_violations(True, None, chsh_result(2.8), None) == []


@pytest.mark.unit
class TestClassifyState:

    def test_singlet(self, qubits, singlet):
        report = classify_state(qubits, singlet, restarts=3)
        assert report.ppt.verdict == Verdict.NPT
        assert report.chsh.beta == pytest.approx(2 * 2 ** 0.5, abs=1e-6)
        assert report.one_distillable.certified
        assert report.chain_consistent
        assert not report.separable_certificate
        assert report.timings is None
        assert report.ppt.kernel is None

    def test_separable_state(self, qubits):
        state = random_separable(qubits, 3, seed=21)
        report = classify_state(qubits, state, restarts=3)
        assert report.separable_certificate
        assert report.ppt.is_ppt
        assert report.chsh.beta <= 2.0 + 1e-7
        assert not report.one_distillable.certified
        assert report.chain_consistent

    def test_selected_criteria_only(self, qubits, mixed):
        report = classify_state(qubits, mixed, criteria=["ppt"])
        assert report.chsh is None and report.one_distillable is None
        assert report.ppt.is_ppt

    def test_timings_and_full(self, qubits, mixed):
        report = classify_state(qubits, mixed, criteria=["ppt"], timings=True, full=True, doubles=True)
        assert set(report.timings) == {"ppt", "doubles"}
        assert report.ppt.kernel.shape == (16, 16)
        assert report.doubles is not None

    def test_digest(self, qubits, singlet, mixed):
        assert state_digest(qubits, singlet) == state_digest(qubits, singlet)
        assert state_digest(qubits, singlet) != state_digest(qubits, mixed)
        assert classify_state(qubits, mixed, criteria=["ppt"], digest="cell-7").digest == "cell-7"

    def test_deterministic(self, qubits, werner):
        state = werner(0.6)
        first = classify_state(qubits, state, seed=5, restarts=3)
        second = classify_state(qubits, state, seed=5, restarts=3)
        assert first.model_dump_json() == second.model_dump_json()
