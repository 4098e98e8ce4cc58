"""
Small spin chains: Hamiltonians, ground and Gibbs states, region algebras

Site 0 is the leftmost tensor factor. Classification works on the reduced
two-region state re-embedded as a tensor system: a small region algebra can
never have a cyclic vector in the full chain space (dim A psi <= dim A < 2^N),
so chain states are classified through the k=2 witness route, while the
cyclic-vector construction is exercised on full-Schmidt-rank pure states.
"""

import hashlib
import json
from typing import Callable, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..core.config import DEFAULT_TOLERANCES, Tolerances, get_settings
from ..core.exceptions import ComputationError, InputError, InvalidRegions, SizeLimit
from ..models.documents import Boundary, RegionPair, SpinChainSpec, SweepConfig
from ..models.reports import ClassificationReport, StateChoice, SweepRow
from .bipartite import BipartiteSystem, State, make_state, new_system, tensor_system
from .classification import classify_state
from .matrix import PAULI_X, PAULI_Y, PAULI_Z, expm_hermitian, hermitian_eig, kron, partial_trace
from .star_algebra import generate

logger = structlog.get_logger(__name__)

HamiltonianBuilder = Callable[[SpinChainSpec], np.ndarray]

DEGENERACY_GAP = 1e-8


class GroundState(NamedTuple):
    energy: float
    vector: np.ndarray
    degenerate: bool
    gap: float


def site_operator(local: np.ndarray, site: int, sites: int) -> np.ndarray:
    identity = np.eye(2, dtype=local.dtype)
    return kron(*[local if k == site else identity for k in range(sites)])


def _bonds(spec: SpinChainSpec) -> List[Tuple[int, int]]:
    bonds = [(i, i + 1) for i in range(spec.sites - 1)]
    if spec.boundary == Boundary.PERIODIC and spec.sites > 2:
        bonds.append((spec.sites - 1, 0))
    return bonds


def tfim_hamiltonian(spec: SpinChainSpec) -> np.ndarray:
    """H = -J sum Z_i Z_j over bonds - g sum X_i, dense and real"""
    n = spec.sites
    z, x = PAULI_Z.real, PAULI_X.real
    hamiltonian = np.zeros((2 ** n, 2 ** n))
    for i, j in _bonds(spec):
        hamiltonian -= spec.coupling * site_operator(z, i, n) @ site_operator(z, j, n)
    for i in range(n):
        hamiltonian -= spec.transverse_field * site_operator(x, i, n)
    return hamiltonian


MODELS: Dict[str, HamiltonianBuilder] = {
    "tfim": tfim_hamiltonian,
}


def register_model(name: str, builder: HamiltonianBuilder) -> None:
    MODELS[name] = builder


def hamiltonian(spec: SpinChainSpec) -> np.ndarray:
    _check_size(spec)
    try:
        builder = MODELS[spec.model]
    except KeyError:
        raise InputError(f"unknown chain model {spec.model!r}", known=sorted(MODELS)) from None
    return builder(spec)


def _check_size(spec: SpinChainSpec) -> None:
    cap = get_settings().ambient_cap
    if 2 ** spec.sites > cap:
        raise SizeLimit("chain Hilbert space exceeds the cap", dim=2 ** spec.sites, cap=cap)


def ground_state(spec: SpinChainSpec, tol: Tolerances = DEFAULT_TOLERANCES) -> GroundState:
    """Lowest eigenpair; first nonzero amplitude real positive, degeneracy flagged"""
    values, vectors = hermitian_eig(hamiltonian(spec), tol)
    gap = float(values[1] - values[0]) if values.size > 1 else float("inf")
    degenerate = gap <= DEGENERACY_GAP * max(1.0, abs(float(values[0])))
    if degenerate:
        logger.info("degenerate_ground_state", sites=spec.sites, gap=gap)
    return GroundState(energy=float(values[0]), vector=vectors[:, 0], degenerate=degenerate, gap=gap)


def gibbs_state(spec: SpinChainSpec, beta: float, tol: Tolerances = DEFAULT_TOLERANCES) -> State:
    """rho = exp(-beta H) / Tr exp(-beta H)"""
    if not beta >= 0:
        raise InputError("inverse temperature must be non-negative", beta=beta)
    weights, _ = expm_hermitian(hamiltonian(spec), -beta, tol)
    return make_state(weights / np.trace(weights), tol=tol)


# Regions

def check_regions(spec: SpinChainSpec, regions: RegionPair) -> None:
    sites = set(regions.sites_a) | set(regions.sites_b)
    if max(sites) >= spec.sites:
        raise InvalidRegions("region site outside the chain", sites=sorted(sites), chain=spec.sites)
    overlap = set(regions.sites_a) & set(regions.sites_b)
    if overlap:
        raise InvalidRegions("regions overlap", overlap=sorted(overlap))


def region_gap(spec: SpinChainSpec, regions: RegionPair) -> int:
    """Number of sites strictly between the two regions; >= 1 means separated"""
    check_regions(spec, regions)
    best = spec.sites
    for a in regions.sites_a:
        for b in regions.sites_b:
            distance = abs(a - b)
            if spec.boundary == Boundary.PERIODIC:
                distance = min(distance, spec.sites - distance)
            best = min(best, distance - 1)
    return best


def region_system(spec: SpinChainSpec, regions: RegionPair,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> BipartiteSystem:
    """Region algebras on the full chain space, generated by the site Paulis"""
    check_regions(spec, regions)
    _check_size(spec)
    n = spec.sites

    def local_generators(sites: Sequence[int]) -> List[np.ndarray]:
        return [site_operator(pauli, site, n) for site in sites for pauli in (PAULI_X, PAULI_Y, PAULI_Z)]

    alg_a = generate(2 ** n, local_generators(regions.sites_a), tol)
    alg_b = generate(2 ** n, local_generators(regions.sites_b), tol)
    factor_dims = None
    if list(regions.sites_a) + list(regions.sites_b) == list(range(n)):
        factor_dims = (2 ** len(regions.sites_a), 2 ** len(regions.sites_b))
    return new_system(2 ** n, alg_a, alg_b, factor_dims, tol)


def reduce_vector(psi: np.ndarray, sites: int, keep: Sequence[int]) -> np.ndarray:
    """Reduced density of a pure chain state on `keep`, in the order given"""
    rest = [k for k in range(sites) if k not in keep]
    tensor = np.asarray(psi, dtype=complex).reshape([2] * sites).transpose(list(keep) + rest)
    matrix = tensor.reshape(2 ** len(keep), -1)
    return matrix @ matrix.conj().T


def trace_out_sequentially(rho: np.ndarray, sites: int, keep: Sequence[int],
                           order: Optional[Sequence[int]] = None) -> np.ndarray:
    """Trace the complement of `keep` one site at a time in `order`"""
    remaining = list(range(sites))
    order = list(order) if order is not None else [k for k in range(sites) if k not in keep]
    current = np.asarray(rho)
    for site in order:
        position = remaining.index(site)
        others = [k for k in range(len(remaining)) if k != position]
        current = partial_trace(current, [2] * len(remaining), others)
        remaining.pop(position)
    final_order = [remaining.index(site) for site in keep]
    return partial_trace(current, [2] * len(remaining), final_order)


def reduced_system(spec: SpinChainSpec, regions: RegionPair, choice: StateChoice,
                   beta: Optional[float] = None,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[BipartiteSystem, State]:
    """Two-region reduced state as a tensor system (Alice's sites first)"""
    check_regions(spec, regions)
    keep = list(regions.sites_a) + list(regions.sites_b)
    if choice == StateChoice.GROUND:
        rho = reduce_vector(ground_state(spec, tol).vector, spec.sites, keep)
    else:
        if beta is None:
            raise InputError("a Gibbs state needs an inverse temperature")
        rho = partial_trace(gibbs_state(spec, beta, tol).density, [2] * spec.sites, keep)
    rho = rho / np.real(np.trace(rho))
    system = tensor_system(2 ** len(regions.sites_a), 2 ** len(regions.sites_b), tol)
    return system, make_state(rho, tol=tol)


def cell_digest(spec: SpinChainSpec, regions: RegionPair, choice: StateChoice,
                beta: Optional[float]) -> str:
    payload = {
        "chain": spec.model_dump(mode="json"),
        "regions": regions.model_dump(mode="json"),
        "state": choice.value,
        "beta": beta,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()


def classify(spec: SpinChainSpec, regions: RegionPair, choice: StateChoice,
             beta: Optional[float] = None, criteria: Sequence[str] = ("ppt", "chsh", "distill"),
             seed: int = 0, restarts: Optional[int] = None,
             tol: Tolerances = DEFAULT_TOLERANCES, timings: bool = False) -> ClassificationReport:
    system, state = reduced_system(spec, regions, choice, beta, tol)
    report = classify_state(
        system, state,
        digest=cell_digest(spec, regions, choice, beta),
        criteria=criteria, seed=seed, restarts=restarts, tol=tol, timings=timings,
    )
    logger.info("chain_cell_classified", sites=spec.sites, regions=[regions.sites_a, regions.sites_b],
                state=choice.value, beta=beta, chain_consistent=report.chain_consistent)
    return report


# Sweeps

class SweepCell(NamedTuple):
    index: int
    spec: SpinChainSpec
    regions: RegionPair
    choice: StateChoice
    beta: Optional[float]


def sweep_cells(config: SweepConfig) -> Iterator[SweepCell]:
    """Grid cells in a fixed order: field, then region pair, then ground before each beta"""
    fields = [config.chain.transverse_field]
    fields += [g for g in config.fields if g not in fields]
    index = 0
    for field in fields:
        spec = config.chain.model_copy(update={"transverse_field": field})
        for regions in config.regions:
            states = [(StateChoice.GROUND, None)] if config.ground else []
            states += [(StateChoice.GIBBS, beta) for beta in config.betas]
            for choice, beta in states:
                yield SweepCell(index, spec, regions, choice, beta)
                index += 1


def check_sweep(config: SweepConfig) -> None:
    for regions in config.regions:
        check_regions(config.chain, regions)


def run_cell(cell: SweepCell, criteria: Sequence[str] = ("ppt", "chsh", "distill"),
             seed: int = 0, restarts: Optional[int] = None,
             tol: Tolerances = DEFAULT_TOLERANCES) -> SweepRow:
    """Classify one cell; size and construction failures land in the row's error column"""
    spec, regions = cell.spec, cell.regions
    row = SweepRow(
        cell=cell.index,
        sites=spec.sites,
        coupling=spec.coupling,
        transverse_field=spec.transverse_field,
        boundary=spec.boundary.value,
        sites_a=list(regions.sites_a),
        sites_b=list(regions.sites_b),
        gap=region_gap(spec, regions),
        state=cell.choice,
        beta=cell.beta,
    )
    try:
        report = classify(spec, regions, cell.choice, cell.beta, criteria, seed, restarts, tol)
    except (InputError, ComputationError) as error:
        logger.warning("sweep_cell_failed", cell=cell.index, error=type(error).__name__, **error.context)
        return row.model_copy(update={"error": f"{type(error).__name__}: {error.message}"})
    update = {"chain_consistent": report.chain_consistent}
    if report.ppt is not None:
        update.update(ppt_verdict=report.ppt.verdict, ppt_margin=report.ppt.min_eig)
    if report.chsh is not None:
        update["chsh_beta"] = report.chsh.beta
    if report.one_distillable is not None:
        update["distillable"] = report.one_distillable.verdict
    return row.model_copy(update=update)
