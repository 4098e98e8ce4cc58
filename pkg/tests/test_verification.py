"""
Tests for the randomized property suites
"""

import numpy as np
import pytest

from entangle.core.exceptions import NotCyclic, UnknownSuite
from entangle.processors.bipartite import schmidt_rank_vector, tensor_system
from entangle.processors.distill import distill_from_cyclic
from entangle.processors.verification import (
    ACCEPTANCE_TRIALS,
    SHAPES,
    SUITES,
    pt_agreement_on,
    run_seeds,
    run_suite,
    run_trial,
    run_verification,
    suite_names,
    trial_seeds,
)


@pytest.mark.unit
class TestSelection:

    def test_all(self):
        assert suite_names("all") == list(SUITES)
        assert len(SUITES) == 10

    def test_comma_list(self):
        assert suite_names("polarized, ppt-bell") == ["polarized", "ppt-bell"]

    def test_unknown(self):
        with pytest.raises(UnknownSuite):
            suite_names("ppt-bell,nonsense")
        with pytest.raises(UnknownSuite):
            run_trial("nonsense", 0)

    def test_seeds_are_reproducible(self):
        assert trial_seeds("polarized", 7, 5) == trial_seeds("polarized", 7, 5)
        assert trial_seeds("polarized", 7, 5) != trial_seeds("tensor-closure", 7, 5)


@pytest.mark.unit
class TestSuites:

    @pytest.mark.parametrize("suite", list(SUITES))
    def test_suite_passes(self, suite):
        result = run_suite(suite, trials=3, seed=0)
        assert result.trials == 3
        assert result.failed == 0, result.failing_seeds
        assert result.passed == 3

    def test_single_seed_replays_trial(self):
        seed = trial_seeds("cyclic-distill", 3, 2)[1]
        result = run_seeds("cyclic-distill", [seed])
        assert result.trials == 1
        assert result.ok
        assert run_trial("cyclic-distill", seed).passed

    def test_schmidt_deficient_trial(self):
        assert run_trial("cyclic-deficient", 2).passed
        assert run_trial("cyclic-deficient", 3).passed

    def test_acceptance_sizes_cover_every_suite(self):
        assert set(ACCEPTANCE_TRIALS) == set(SUITES)
        assert ACCEPTANCE_TRIALS["cyclic-deficient"] == 20
        assert ACCEPTANCE_TRIALS["pt-agreement"] == 200 * len(SHAPES)

    def test_acceptance_run_uses_suite_sizes(self):
        summary = run_verification("cyclic-deficient", None, seed=0)
        assert summary.trials == 20
        assert summary.suites[0].passed == 20

    def test_summary(self):
        summary = run_verification("separable-ppt,pt-agreement", trials=2, seed=1)
        assert [result.suite for result in summary.suites] == ["separable-ppt", "pt-agreement"]
        assert summary.all_passed
        assert summary.model_dump_json() == run_verification("separable-ppt,pt-agreement",
                                                             trials=2, seed=1).model_dump_json()


@pytest.mark.slow
class TestAcceptance:
    """Each suite at its acceptance size"""

    @pytest.mark.parametrize("suite", [name for name in SUITES if name != "pt-agreement"])
    def test_suite_at_acceptance_size(self, suite):
        result = run_suite(suite, trials=ACCEPTANCE_TRIALS[suite], seed=0)
        assert result.trials == ACCEPTANCE_TRIALS[suite]
        assert result.failed == 0, result.failing_seeds

    @pytest.mark.parametrize("dims", SHAPES)
    def test_partial_transpose_agreement_per_shape(self, dims):
        outcomes = [pt_agreement_on(dims, seed) for seed in range(200)]
        assert all(outcome.passed for outcome in outcomes)
        assert sum(outcome.excluded for outcome in outcomes) < 200

    def test_schmidt_deficient_states_are_not_cyclic(self):
        for seed in range(20):
            dim = 2 if seed % 2 == 0 else 3
            rank = int(np.random.default_rng(seed).integers(1, dim))
            psi = schmidt_rank_vector(dim, dim, rank, seed)
            with pytest.raises(NotCyclic):
                distill_from_cyclic(tensor_system(dim, dim), psi, seed)
