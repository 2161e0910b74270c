import math
from datetime import datetime
from decimal import Decimal
from typing import Any, Dict, Iterable, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.ival.interval import Interval

Kind = Literal["sl", "graph-chain", "graph-homotopy", "graph-partition", "poincare", "system-fixture", "forms-demo"]

# kinds and the config section each one reads
SECTION_FOR_KIND = {
    "sl": "sl",
    "graph-chain": "graph",
    "graph-homotopy": "homotopy",
    "graph-partition": "partition",
    "poincare": "poincare",
    "system-fixture": "system",
    "forms-demo": "forms",
}


def decimal_down(x: float) -> str:
    """Decimal text whose value is <= x and which parses back to x"""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    short = repr(x)
    return short if Decimal(short) <= Decimal(x) else str(Decimal(x))


def decimal_up(x: float) -> str:
    """Decimal text whose value is >= x and which parses back to x"""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    short = repr(x)
    return short if Decimal(short) >= Decimal(x) else str(Decimal(x))


# reports


class EntryRecord(BaseModel):
    """One enclosure, endpoints rendered so that re-parsing never narrows it"""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    index: int = Field(..., ge=0)
    lo: str
    hi: str
    width: float

    @classmethod
    def of(cls, index: int, iv: Interval) -> "EntryRecord":
        return cls(index=index, lo=decimal_down(iv.lo), hi=decimal_up(iv.hi), width=iv.width)

    def interval(self) -> Interval:
        return Interval(float(self.lo), float(self.hi))


class StageRecord(BaseModel):
    """A labelled list of enclosures (an operator, a chain step, a homotopy stage)"""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    label: str
    ceiling: Optional[float] = None
    entries: List[EntryRecord] = Field(default_factory=list)

    @classmethod
    def of(cls, label: str, values: Iterable[Interval], ceiling: Optional[float] = None,
           start: int = 0) -> "StageRecord":
        entries = [EntryRecord.of(start + i, v) for i, v in enumerate(values)]
        return cls(label=label, ceiling=ceiling, entries=entries)

    def intervals(self) -> List[Interval]:
        return [e.interval() for e in self.entries]


class EffortReport(BaseModel):
    """Operators touched, decoupling levels and eigenvalues computed"""

    operators: int = Field(..., ge=0)
    levels: int = Field(..., ge=0)
    eigenvalues_per_level: List[int] = Field(default_factory=list)
    total_eigenvalues: int = Field(..., ge=0)


class HaltInfo(BaseModel):
    message: str
    details: Dict[str, str] = Field(default_factory=dict)

    @classmethod
    def from_error(cls, exc: Exception) -> "HaltInfo":
        details = getattr(exc, "details", {}) or {}
        message = getattr(exc, "message", str(exc))
        return cls(message=message, details={k: str(v) for k, v in details.items()})


class RunReport(BaseModel):
    """Complete result of one CLI run"""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    kind: str
    name: str
    stages: List[StageRecord] = Field(default_factory=list)
    effort: Optional[EffortReport] = None
    metrics: Dict[str, Any] = Field(default_factory=dict)
    notes: Dict[str, Any] = Field(default_factory=dict)
    wall_seconds: float = 0.0
    halted: Optional[HaltInfo] = None
    created_at: datetime = Field(default_factory=datetime.now)
    cached: bool = Field(default=False, description="Whether this report came from the archive")

    @property
    def certified(self) -> bool:
        return self.halted is None

    def stage(self, label: str) -> StageRecord:
        for s in self.stages:
            if s.label == label:
                return s
        raise KeyError(label)


# configuration


class RunSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Kind
    name: str = "run"
    E: Optional[float] = Field(default=None, gt=0)
    tol: Optional[float] = Field(default=None, gt=0)
    basis_degree: Optional[int] = Field(default=None, ge=2, le=64)
    max_level: Optional[int] = Field(default=None, ge=0, le=16)


class SLSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lo: str = "0"
    hi: str
    unit: Literal["1", "pi"] = "1"
    a: str = "1"
    V: str = "0"
    left: str = "neumann"
    right: str = "neumann"
    strategy: Literal["uniform", "coefficient", "adaptive"] = "uniform"
    E_prime: Optional[float] = Field(default=None, gt=0)


class GraphSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    builder: Literal["grid", "staircase", "edges"] = "grid"
    k: Optional[int] = Field(default=None, ge=1)
    profile: Optional[str] = None
    edges: Optional[str] = None
    edges_line: int = 1
    remove: str = ""
    order: Literal["given", "congestion"] = "given"
    count: int = Field(default=6, ge=1)
    scale: str = "1"

    @model_validator(mode="after")
    def _builder_inputs(self):
        needs = {"grid": self.k, "staircase": self.profile, "edges": self.edges}
        if needs[self.builder] is None:
            raise ValueError(f"builder {self.builder!r} is missing its input")
        return self


class HomotopySection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    h: int = Field(..., ge=2)
    schedule: str = "0, 1/4, 1/2, 1"
    report: str = ""
    count: int = Field(default=7, ge=1)
    sweep: str = ""
    sweep_index: int = Field(default=1, ge=0)
    scale: str = "1"


class PartitionSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    graph: GraphSection
    parts: str
    a: float = Field(..., gt=0)
    b: float = Field(..., gt=0, le=1)


class PoincareSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(default=8, ge=2)
    profile: str = "degenerate"
    samples: int = Field(default=0, ge=0)
    n_max: int = Field(default=12, ge=2)
    seed: int = 0


class SystemSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: str = "-1"
    beta: str = "2"
    u: str = "100"
    v: str = "50"
    galerkin_degree: int = Field(default=0, ge=0)


class FormsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    matrix: str
    constraints: str


class RunConfig(BaseModel):
    """A validated problem configuration: the [run] section plus the section for its kind"""

    run: RunSection
    sl: Optional[SLSection] = None
    graph: Optional[GraphSection] = None
    homotopy: Optional[HomotopySection] = None
    partition: Optional[PartitionSection] = None
    poincare: Optional[PoincareSection] = None
    system: Optional[SystemSection] = None
    forms: Optional[FormsSection] = None

    @model_validator(mode="after")
    def _section_present(self):
        section = SECTION_FOR_KIND[self.run.kind]
        if getattr(self, section) is None:
            raise ValueError(f"kind {self.run.kind!r} needs a [{section}] section")
        if self.run.kind in ("sl", "system-fixture") and self.run.E is None:
            raise ValueError(f"kind {self.run.kind!r} needs a ceiling E")
        return self

    @property
    def payload(self) -> BaseModel:
        return getattr(self, SECTION_FOR_KIND[self.run.kind])

    def tol_or(self, default: float) -> float:
        return self.run.tol if self.run.tol is not None else default

    def canonical(self) -> str:
        """Stable text used as the archive key"""
        return self.model_dump_json(exclude_none=True)

    @field_validator("sl", "graph", "homotopy", "partition", "poincare", "system", "forms", mode="before")
    @classmethod
    def _empty_section(cls, v):
        return None if v == {} else v
