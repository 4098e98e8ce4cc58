"""
Input documents: bipartite systems with a state, and spin-chain sweeps

Documents are JSON or YAML. Parse and validation failures surface as
DocumentError with a line number (syntax) or the offending field path.
"""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Type, TypeVar, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..core.exceptions import DocumentError
from .matrix_types import ComplexMatrix
from .reports import DistillationPlan

ModelT = TypeVar("ModelT", bound=BaseModel)


class CertificateDocument(BaseModel):
    """Convex weights with (rho_A, rho_B) factor pairs"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: List[float]
    factors: List[Tuple[ComplexMatrix, ComplexMatrix]]


class BipartiteDocument(BaseModel):
    """A bipartite system and a density matrix on its ambient space

    Tensor systems may give only `factor_dims`; the generators then default
    to the matrix units of each factor.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")

    ambient_dim: int = Field(..., ge=1)
    alice_generators: List[ComplexMatrix] = Field(default_factory=list)
    bob_generators: List[ComplexMatrix] = Field(default_factory=list)
    density: ComplexMatrix
    factor_dims: Optional[Tuple[int, int]] = None
    separable_certificate: Optional[CertificateDocument] = None
    description: Optional[str] = None


class Boundary(str, Enum):
    OPEN = "open"
    PERIODIC = "periodic"


class SpinChainSpec(BaseModel):
    """Transverse-field Ising chain H = -J sum Z_i Z_i+1 - g sum X_i"""

    model_config = ConfigDict(frozen=True)

    sites: int = Field(..., ge=2, le=12)
    coupling: float = Field(default=1.0, allow_inf_nan=False)
    transverse_field: float = Field(default=1.0, allow_inf_nan=False)
    boundary: Boundary = Boundary.OPEN
    model: str = Field(default="tfim")


class RegionPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    sites_a: Tuple[int, ...]
    sites_b: Tuple[int, ...]

    @field_validator("sites_a", "sites_b")
    @classmethod
    def non_empty_sorted(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value:
            raise ValueError("a region needs at least one site")
        if any(site < 0 for site in value):
            raise ValueError("site indices must be non-negative")
        return tuple(sorted(set(value)))


class SweepConfig(BaseModel):
    """Grid of chain parameters, region pairs and states for `entangle chain`"""

    chain: SpinChainSpec
    regions: List[RegionPair]
    ground: bool = True
    betas: List[float] = Field(default_factory=list)
    fields: List[float] = Field(default_factory=list, description="Extra transverse fields to sweep")

    @field_validator("betas")
    @classmethod
    def non_negative(cls, value: List[float]) -> List[float]:
        if any(beta < 0 for beta in value):
            raise ValueError("inverse temperatures must be non-negative")
        return value


def _read_raw(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise DocumentError(f"cannot read {path}: {error.strerror}", path=str(path)) from error

    if path.suffix.lower() in (".yaml", ".yml"):
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as error:
            mark = getattr(error, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            raise DocumentError(f"invalid YAML in {path}", line=line, path=str(path)) from error
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as error:
            raise DocumentError(f"invalid JSON in {path}: {error.msg}", line=error.lineno,
                                path=str(path)) from error
    if not isinstance(data, dict):
        raise DocumentError(f"{path} must contain a mapping at the top level", path=str(path))
    return data


def _location(loc: Tuple[Any, ...]) -> str:
    return ".".join(str(part) for part in loc) or "(root)"


def parse_model(model: Type[ModelT], data: Dict[str, Any], source: str = "document") -> ModelT:
    try:
        return model.model_validate(data)
    except ValidationError as error:
        errors = error.errors()
        problems = "; ".join(f"{_location(item['loc'])}: {item['msg']}" for item in errors)
        raise DocumentError(
            f"{source}: {problems}",
            field=_location(errors[0]["loc"]),
            fields=[_location(item["loc"]) for item in errors],
            errors=len(errors),
        ) from error


def load_document(path: Union[str, Path]) -> BipartiteDocument:
    return parse_model(BipartiteDocument, _read_raw(path), str(path))


def load_sweep(path: Union[str, Path]) -> SweepConfig:
    return parse_model(SweepConfig, _read_raw(path), str(path))


def dump_document(document: BaseModel, path: Union[str, Path]) -> None:
    path = Path(path)
    payload = document.model_dump(mode="json", exclude_none=True)
    if path.suffix.lower() in (".yaml", ".yml"):
        path.write_text(yaml.safe_dump(payload, sort_keys=False), encoding="utf-8")
    else:
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_plan(path: Union[str, Path]) -> DistillationPlan:
    return parse_model(DistillationPlan, _read_raw(path), str(path))
