"""
Tests for spin-chain states, region algebras and sweeps
"""

import numpy as np
import pytest

from entangle.core.config import get_settings
from entangle.core.exceptions import InputError, InvalidRegions, SizeLimit
from entangle.models.documents import Boundary, RegionPair, SpinChainSpec, load_sweep
from entangle.models.reports import StateChoice, Verdict
from entangle.processors.lattice import (
    MODELS,
    check_sweep,
    classify,
    gibbs_state,
    ground_state,
    hamiltonian,
    reduce_vector,
    reduced_system,
    region_gap,
    region_system,
    register_model,
    run_cell,
    site_operator,
    sweep_cells,
    trace_out_sequentially,
)
from entangle.processors.matrix import PAULI_Z, partial_trace


def chain(sites, coupling=1.0, field=1.0, boundary=Boundary.OPEN):
    return SpinChainSpec(sites=sites, coupling=coupling, transverse_field=field, boundary=boundary)


def regions(a, b):
    return RegionPair(sites_a=a, sites_b=b)


@pytest.fixture
def small_cap(monkeypatch):
    monkeypatch.setenv("ENTANGLE_AMBIENT_CAP", "64")
    get_settings.cache_clear()
    yield
    monkeypatch.delenv("ENTANGLE_AMBIENT_CAP")
    get_settings.cache_clear()


@pytest.mark.unit
class TestHamiltonian:

    def test_field_only_ground_state(self):
        ground = ground_state(chain(2, coupling=0.0))
        assert ground.energy == pytest.approx(-2.0)
        assert not ground.degenerate
        assert np.allclose(ground.vector, np.full(4, 0.5))

    def test_coupling_only_is_degenerate(self):
        ground = ground_state(chain(2, field=0.0))
        assert ground.energy == pytest.approx(-1.0)
        assert ground.degenerate

    def test_six_site_energy(self):
        spec = chain(6)
        assert ground_state(spec).energy == pytest.approx(np.linalg.eigvalsh(hamiltonian(spec))[0])

    def test_periodic_adds_closing_bond(self):
        open_chain = hamiltonian(chain(3))
        ring = hamiltonian(chain(3, boundary=Boundary.PERIODIC))
        closing = site_operator(PAULI_Z.real, 2, 3) @ site_operator(PAULI_Z.real, 0, 3)
        assert np.allclose(open_chain - ring, closing)

    def test_size_cap(self, small_cap):
        with pytest.raises(SizeLimit):
            hamiltonian(chain(7))

    def test_unknown_model(self):
        spec = SpinChainSpec(sites=2, model="heisenberg")
        with pytest.raises(InputError) as info:
            hamiltonian(spec)
        assert "heisenberg" in str(info.value)

    def test_register_model(self):
        def zz_only(spec):
            return -site_operator(PAULI_Z.real, 0, spec.sites) @ site_operator(PAULI_Z.real, 1, spec.sites)

        register_model("zz", zz_only)
        try:
            spec = SpinChainSpec(sites=2, model="zz")
            assert np.allclose(hamiltonian(spec), np.diag([-1.0, 1.0, 1.0, -1.0]))
        finally:
            MODELS.pop("zz")


@pytest.mark.unit
class TestGibbs:

    def test_infinite_temperature(self):
        state = gibbs_state(chain(6), 0.0)
        assert np.allclose(state.density, np.eye(64) / 64)

    def test_low_temperature_approaches_ground(self):
        spec = chain(2, coupling=0.0)
        psi = ground_state(spec).vector
        state = gibbs_state(spec, 1e3)
        assert np.real(np.vdot(psi, state.density @ psi)) >= 1 - 1e-6

    def test_negative_beta_rejected(self):
        with pytest.raises(InputError):
            gibbs_state(chain(2), -1.0)


@pytest.mark.unit
class TestRegions:

    def test_region_system_dimensions(self):
        system = region_system(chain(3), regions([0], [2]))
        assert system.ambient_dim == 8
        assert system.alg_a.dim == 4 and system.alg_b.dim == 4
        assert not system.is_tensor

    def test_covering_regions_are_tensor(self):
        system = region_system(chain(2), regions([0], [1]))
        assert system.factor_dims == (2, 2)

    def test_overlap_rejected(self):
        with pytest.raises(InvalidRegions):
            region_gap(chain(4), regions([0, 1], [1, 2]))

    def test_site_outside_chain(self):
        with pytest.raises(InvalidRegions):
            region_gap(chain(4), regions([0], [4]))

    def test_gaps(self):
        assert region_gap(chain(6), regions([0], [3])) == 2
        assert region_gap(chain(6), regions([2], [3])) == 0
        assert region_gap(chain(6, boundary=Boundary.PERIODIC), regions([0], [5])) == 0

    def test_trace_order_does_not_matter(self):
        rho = gibbs_state(chain(4), 0.7).density
        direct = partial_trace(rho, [2, 2, 2, 2], [1, 3])
        for order in ([0, 2], [2, 0]):
            assert np.allclose(trace_out_sequentially(rho, 4, [1, 3], order), direct, atol=1e-10)

    def test_reduce_vector_matches_partial_trace(self):
        psi = ground_state(chain(4)).vector
        rho = np.outer(psi, psi.conj())
        assert np.allclose(reduce_vector(psi, 4, [3, 0]), partial_trace(rho, [2, 2, 2, 2], [3, 0]))

    def test_reduced_system_is_tensor(self):
        system, state = reduced_system(chain(4), regions([0], [2, 3]), StateChoice.GROUND)
        assert system.factor_dims == (2, 4)
        assert np.trace(state.density).real == pytest.approx(1.0)


@pytest.mark.unit
class TestClassify:

    def test_infinite_temperature_is_ppt(self):
        report = classify(chain(4), regions([1], [2]), StateChoice.GIBBS, beta=0.0,
                          criteria=("ppt", "chsh"), restarts=3)
        assert report.ppt.verdict == Verdict.PPT
        assert report.chsh.beta <= 2.0 + 1e-7
        assert report.chain_consistent

    def test_decoupled_chain_is_ppt(self):
        report = classify(chain(4, coupling=0.0), regions([1], [2]), StateChoice.GROUND,
                          criteria=("ppt",))
        assert report.ppt.is_ppt

    def test_edge_pair_is_entangled(self):
        report = classify(chain(6), regions([0], [1]), StateChoice.GROUND, criteria=("ppt",))
        assert report.ppt.verdict == Verdict.NPT
        assert report.ppt.min_eig < 0

    def test_gibbs_needs_beta(self):
        with pytest.raises(InputError):
            reduced_system(chain(2), regions([0], [1]), StateChoice.GIBBS)

    @pytest.mark.slow
    def test_adjacent_center_pair(self):
        report = classify(chain(6), regions([2], [3]), StateChoice.GROUND, restarts=4)
        assert report.ppt.verdict == Verdict.NPT
        assert report.one_distillable.certified
        assert report.chain_consistent


@pytest.mark.unit
class TestSweep:

    def test_cells_from_config(self, configs_dir):
        config = load_sweep(configs_dir / "sweep_tfim.yaml")
        check_sweep(config)
        cells = list(sweep_cells(config))
        assert len(cells) == 18
        assert [cell.index for cell in cells] == list(range(18))
        assert cells[0].choice == StateChoice.GROUND
        assert (cells[1].choice, cells[1].beta) == (StateChoice.GIBBS, 0.0)
        assert cells[9].spec.transverse_field == 2.0

    def test_check_sweep_rejects_overlap(self, configs_dir):
        config = load_sweep(configs_dir / "sweep_tfim.yaml")
        broken = config.model_copy(update={"regions": [regions([1], [1])]})
        with pytest.raises(InvalidRegions):
            check_sweep(broken)

    def test_run_cell(self, configs_dir):
        config = load_sweep(configs_dir / "sweep_tfim.yaml")
        cell = next(cell for cell in sweep_cells(config) if cell.beta == 0.0)
        row = run_cell(cell, criteria=("ppt",))
        assert row.error is None
        assert row.ppt_verdict == Verdict.PPT
        assert row.chsh_beta is None
        assert row.chain_consistent

    def test_failed_cell_keeps_error(self, configs_dir, small_cap):
        config = load_sweep(configs_dir / "sweep_tfim.yaml")
        big = config.model_copy(update={"chain": config.chain.model_copy(update={"sites": 7})})
        row = run_cell(next(sweep_cells(big)), criteria=("ppt",))
        assert row.error.startswith("SizeLimit")
        assert row.ppt_verdict is None
