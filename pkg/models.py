"""
Data models for the recollement toolkit: spec-file schemas, caps and reports
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class Provenance(str, Enum):
    """How an algebra was constructed"""
    QUIVER = "quiver"
    CORNER = "corner"
    QUOTIENT = "quotient"
    OPPOSITE = "opposite"
    TENSOR = "tensor"
    MORITA = "morita"


class Side(str, Enum):
    """Corner of a Morita context ring"""
    A = "A"
    B = "B"


class OracleStrategy(str, Enum):
    """Witness-producing strategies for resolution oracles"""
    SYZYGY_FINITE = "syzygy_finite"
    FINITE_GLDIM = "finite_gldim"
    EXPLICIT_TABLE = "explicit_table"
    INFLATED_CLOSURE = "inflated_closure"


class StrategyChoice(str, Enum):
    """Oracle strategy requested on the command line"""
    SYZYGY_FINITE = "syzygy-finite"
    GLDIM = "gldim"
    AUTO = "auto"


class CaseTag(str, Enum):
    """Relative global dimension cases of the gldim transformer"""
    DEEP = "case1"
    SHALLOW = "case2"
    DEEP_Q_EXACT = "case3"
    SHALLOW_Q_EXACT = "case4"


class Verdict(str, Enum):
    """Outcome of a single report line"""
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


# Spec files

class ArrowSpec(BaseModel):
    """Arrow of a quiver"""
    name: str = Field(..., description="Arrow name")
    source: str = Field(..., description="Source vertex label")
    target: str = Field(..., description="Target vertex label")


class QuiverSpec(BaseModel):
    """Vertices and arrows of a quiver"""
    vertices: List[str] = Field(..., description="Vertex labels")
    arrows: List[ArrowSpec] = Field(default_factory=list, description="Arrows")

    @field_validator('vertices')
    @classmethod
    def validate_vertices(cls, v):
        if not v:
            raise ValueError('quiver needs at least one vertex')
        if len(set(v)) != len(v):
            raise ValueError('vertex labels must be distinct')
        return v


class TermSpec(BaseModel):
    """One summand of a relation"""
    coefficient: int = Field(1, description="Coefficient, reduced mod p on load")
    path: List[str] = Field(..., description="Arrow names, composed left to right")


class BimoduleSpec(BaseModel):
    """Bimodule given by action matrices per basis element of each algebra"""
    dim: int = Field(..., ge=0, description="Vector space dimension")
    left_action: List[List[List[int]]] = Field(default_factory=list, description="One matrix per basis element of the left algebra")
    right_action: List[List[List[int]]] = Field(default_factory=list, description="One matrix per basis element of the right algebra")


class TensorDirective(BaseModel):
    """Build the algebra as a tensor product of two specs"""
    left: str = Field(..., description="Path of the left factor spec, relative to this file")
    right: str = Field(..., description="Path of the right factor spec, relative to this file")


class MoritaDirective(BaseModel):
    """Build the algebra as a Morita context ring with zero bimodule maps"""
    a: str = Field(..., description="Path of the spec of A")
    b: str = Field(..., description="Path of the spec of B")
    m: BimoduleSpec = Field(..., description="B-A-bimodule M")
    n: BimoduleSpec = Field(..., description="A-B-bimodule N")


class ProvenanceSpec(BaseModel):
    """Constructor directive replacing the quiver presentation"""
    tensor: Optional[TensorDirective] = Field(None, description="Tensor product directive")
    morita: Optional[MoritaDirective] = Field(None, description="Morita ring directive")

    @model_validator(mode='after')
    def exactly_one(self):
        if (self.tensor is None) == (self.morita is None):
            raise ValueError('provenance needs exactly one of tensor or morita')
        return self


class StructureSpec(BaseModel):
    """Algebra given directly by structure constants"""
    labels: List[str] = Field(..., description="Basis labels")
    mult: List[List[int]] = Field(default_factory=list, description="Nonzero constants as [i, j, k, c]: b_i b_j has c at b_k")
    unit: List[int] = Field(..., description="Unit in basis coordinates")
    idempotents: Dict[str, List[int]] = Field(..., description="Primitive idempotent per vertex")
    radical: List[List[int]] = Field(default_factory=list, description="Basis of the Jacobson radical")
    provenance: str = Field("quiver", description="Recorded construction")


class AlgebraSpecFile(BaseModel):
    """Algebra spec file"""
    prime: Optional[int] = Field(None, description="Field modulus; the run prime when omitted")
    quiver: Optional[QuiverSpec] = Field(None, description="Quiver")
    relations: List[List[TermSpec]] = Field(default_factory=list, description="Relations as linear combinations of paths")
    nilpotency_bound: Optional[int] = Field(None, ge=1, description="Paths of this length lie in the ideal")
    provenance: Optional[ProvenanceSpec] = Field(None, description="Constructor directive")
    structure: Optional[StructureSpec] = Field(None, description="Structure constants")

    @model_validator(mode='after')
    def presentation_or_directive(self):
        if self.provenance is not None and self.structure is not None:
            raise ValueError('give either a directive or structure constants, not both')
        if self.provenance is None and self.structure is None:
            if self.quiver is None or self.nilpotency_bound is None:
                raise ValueError('a presentation needs quiver and nilpotency_bound')
        return self


class ModuleSpecFile(BaseModel):
    """Module spec file: a quiver representation in row convention"""
    dims: Dict[str, int] = Field(..., description="Dimension per vertex")
    arrows: Dict[str, List[List[int]]] = Field(default_factory=dict, description="Matrix per arrow (source dim x target dim)")
    name: Optional[str] = Field(None, description="Display name")

    @field_validator('dims')
    @classmethod
    def validate_dims(cls, v):
        for label, d in v.items():
            if d < 0:
                raise ValueError(f'dimension at {label} must be non-negative')
        return v


# Caps and reports

class Caps(BaseModel):
    """Caps for every capped semi-decision of a run"""
    pd_cap: int = Field(64, ge=0, description="Projective dimension cap")
    decompose_trials: int = Field(64, ge=1, description="Random trials in idempotent search")
    syzygy_depth_cap: int = Field(8, ge=0, description="Deepest syzygy an oracle may use")
    closure_cap: int = Field(6, ge=0, description="Omega-closure rounds for syzygy-finite oracles")
    tensor_power_cap: int = Field(4, ge=1, description="Largest tensor power in nilpotency checks")
    tor_cap: int = Field(3, ge=1, description="Largest Tor index in perfectness checks")
    random_panel_size: int = Field(2, ge=0, description="Seeded random modules added to default panels")
    probe_count: int = Field(3, ge=0, description="Random short exact sequences per exactness probe")


class CheckLine(BaseModel):
    """One verified statement in a report"""
    name: str = Field(..., description="What was checked")
    verdict: Verdict = Field(..., description="Outcome")
    detail: Optional[str] = Field(None, description="Values behind the verdict")


class ChainSummary(BaseModel):
    """Digest of a verified exact chain"""
    target: str = Field(..., description="Panel module the chain resolves")
    dims: List[int] = Field(..., description="Object dimensions, head first")
    length: int = Field(..., description="Number of internal terms minus one")
    digest: str = Field(..., description="sha256 of dimensions and matrices")
    verified: bool = Field(..., description="verify_chain verdict")


class CertificateSummary(BaseModel):
    """Arity and provenance of an Igusa-Todorov certificate"""
    algebra_dim: int = Field(..., description="Dimension of the certified algebra")
    m: int = Field(..., description="Resolution length bound")
    n: int = Field(..., description="Syzygy depth")
    witness_dim: int = Field(..., description="Dimension of the witness module")
    provenance: str = Field(..., description="Transformer or oracle that produced it")
    panel_size: int = Field(..., description="Number of panel modules")
    chains: List[ChainSummary] = Field(default_factory=list, description="Verified chains")


class Report(BaseModel):
    """Deterministic command report"""
    command: List[str] = Field(..., description="Command echo")
    prime: int = Field(32003, description="Field modulus of the run")
    seed: int = Field(0, description="Seed of all randomised steps")
    caps: Caps = Field(default_factory=Caps, description="Caps in force")
    results: Dict[str, Any] = Field(default_factory=dict, description="Structured results")
    checks: List[CheckLine] = Field(default_factory=list, description="Verified statements")
    warnings: List[str] = Field(default_factory=list, description="Normalised readings and inconclusive markers")

    def add_check(self, name: str, passed: Optional[bool], detail: Optional[str] = None) -> None:
        """Append a check; None records an inconclusive outcome"""
        if passed is None:
            verdict = Verdict.INCONCLUSIVE
        else:
            verdict = Verdict.PASS if passed else Verdict.FAIL
        self.checks.append(CheckLine(name=name, verdict=verdict, detail=detail))

    def warn(self, message: str) -> None:
        if message not in self.warnings:
            self.warnings.append(message)

    def exit_code(self) -> int:
        """0 all pass, 1 verified negative present, 3 inconclusive present"""
        verdicts = {c.verdict for c in self.checks}
        if Verdict.INCONCLUSIVE in verdicts:
            return 3
        if Verdict.FAIL in verdicts:
            return 1
        return 0
