"""
Report models emitted by the classifiers and the command line
"""

from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..core.config import Tolerances
from .matrix_types import ComplexMatrix, ComplexVector


class ReportModel(BaseModel):
    """Base for every report; numpy payloads ride on the annotated matrix types"""

    model_config = ConfigDict(arbitrary_types_allowed=True)


class Verdict(str, Enum):
    """Outcome of the generalized ppt test"""
    PPT = "ppt"
    NPT = "npt"


class DistillVerdict(str, Enum):
    CERTIFIED = "1-distillable (certified)"
    INCONCLUSIVE = "no witness found (inconclusive)"


class StateChoice(str, Enum):
    GROUND = "ground"
    GIBBS = "gibbs"


class PairedFamily(ReportModel):
    """Families A_1..A_k in Alice's algebra and B_1..B_k in Bob's with their ppt sum"""

    alice: List[ComplexMatrix]
    bob: List[ComplexMatrix]
    value: float
    k: int
    restart: Optional[int] = None


class PptReport(ReportModel):
    verdict: Verdict
    min_eig: float
    scale: float = Field(description="Frobenius norm of the kernel")
    witness: Optional[PairedFamily] = None
    kernel: Optional[ComplexMatrix] = Field(default=None, description="Omitted unless --full")

    @property
    def is_ppt(self) -> bool:
        return self.verdict == Verdict.PPT


class PartialTransposeAgreement(ReportModel):
    agrees: bool
    kernel_verdict: Verdict
    pt_verdict: Verdict
    margin_kernel: float
    margin_pt: float


class CorrelationBound(ReportModel):
    lhs: float
    rhs: float
    holds: bool
    state_is_ppt: bool


class ChshResult(ReportModel):
    beta: float = Field(description="See-saw lower bound on the CHSH supremum")
    value: float = Field(description="Signed CHSH expectation of the returned observables")
    observables: List[ComplexMatrix] = Field(description="A, A', B, B'")
    membership_residuals: List[float]
    norms: List[float]
    iterations: int
    restarts_used: int
    best_restart: int


class DistillabilityReport(ReportModel):
    verdict: DistillVerdict
    witness: Optional[PairedFamily] = None
    alice_choi: Optional[ComplexMatrix] = None
    bob_choi: Optional[ComplexMatrix] = None
    omega2: Optional[ComplexMatrix] = None
    pt_min_eig: Optional[float] = None
    transposition_gap: Optional[float] = Field(
        default=None,
        description="|omega2(swap) - ppt sum| for the witness family",
    )

    @property
    def certified(self) -> bool:
        return self.verdict == DistillVerdict.CERTIFIED


class DistillationPlan(ReportModel):
    """Everything needed to replay a cyclic-vector distillation"""

    ambient_dim: int
    psi: ComplexVector
    sigma_images: List[ComplexMatrix] = Field(description="sigma(|i><j|) for ij = 00, 01, 10, 11")
    sigma_block: int
    tau_images: List[ComplexMatrix]
    tau_block: int
    p: ComplexMatrix
    q: ComplexMatrix
    chi: ComplexVector
    selector: ComplexMatrix = Field(description="Alice selector rescaled to operator norm one")
    selector_norm: float = Field(description="Operator norm of the raw least-squares selector")
    selection_residual: float
    omega2: ComplexMatrix
    pt_min_eig: float
    singlet_fidelity: float
    success_probability: float


class ReplayResult(ReportModel):
    passed: bool
    checks: Dict[str, float]
    failures: List[str]


class DoublesCheck(ReportModel):
    cond1: bool
    cond1_value: float
    cond1_indices: Optional[List[int]] = Field(default=None, description="(a, b1, b2, b3, b4) basis indices")
    cond1_orientation: Optional[str] = None
    cond2_residual: float
    cond2_worst_index: int


class ClassificationReport(ReportModel):
    digest: str
    ppt: Optional[PptReport] = None
    chsh: Optional[ChshResult] = None
    one_distillable: Optional[DistillabilityReport] = None
    doubles: Optional[DoublesCheck] = None
    separable_certificate: bool
    chain_consistent: bool
    chain_violations: List[str] = Field(default_factory=list)
    tolerances: Tolerances
    seed: int
    timings: Optional[Dict[str, float]] = None


class SweepRow(ReportModel):
    cell: int
    sites: int
    coupling: float
    transverse_field: float
    boundary: str
    sites_a: List[int]
    sites_b: List[int]
    gap: int
    state: StateChoice
    beta: Optional[float] = None
    ppt_verdict: Optional[Verdict] = None
    ppt_margin: Optional[float] = None
    chsh_beta: Optional[float] = None
    distillable: Optional[DistillVerdict] = None
    chain_consistent: Optional[bool] = None
    error: Optional[str] = None


class SuiteResult(ReportModel):
    suite: str
    trials: int
    passed: int
    failed: int
    excluded: int = Field(default=0, description="Trials whose margin fell inside the tolerance band")
    worst_margin: float
    failing_seeds: List[int] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0


class VerificationSummary(ReportModel):
    seed: int
    trials: int
    suites: List[SuiteResult]
    all_passed: bool
