"""
Data models initialization
"""

from .documents import (
    BipartiteDocument,
    Boundary,
    CertificateDocument,
    RegionPair,
    SpinChainSpec,
    SweepConfig,
    load_document,
    load_sweep,
)

from .reports import (
    ChshResult,
    ClassificationReport,
    DistillabilityReport,
    DistillationPlan,
    DistillVerdict,
    DoublesCheck,
    PairedFamily,
    PptReport,
    ReplayResult,
    StateChoice,
    SuiteResult,
    SweepRow,
    Verdict,
    VerificationSummary,
)

from .matrix_types import ComplexMatrix, ComplexVector, RealVector

__all__ = [
    # Input documents
    'BipartiteDocument',
    'Boundary',
    'CertificateDocument',
    'RegionPair',
    'SpinChainSpec',
    'SweepConfig',
    'load_document',
    'load_sweep',

    # Reports
    'ChshResult',
    'ClassificationReport',
    'DistillabilityReport',
    'DistillationPlan',
    'DistillVerdict',
    'DoublesCheck',
    'PairedFamily',
    'PptReport',
    'ReplayResult',
    'StateChoice',
    'SuiteResult',
    'SweepRow',
    'Verdict',
    'VerificationSummary',

    # Matrix payloads
    'ComplexMatrix',
    'ComplexVector',
    'RealVector',
]
