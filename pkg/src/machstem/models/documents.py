"""
Pydantic documents for everything read from disk or the command line.
Unknown keys are rejected so that typos in input files fail loudly.
"""

from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator

VERBS = (
    "thermo",
    "eos.report",
    "eos.find_weak",
    "shock.solve",
    "stability.classify",
    "stability.v",
    "stability.cstar",
    "stability.prop1",
    "stability.sweep",
    "lopatinskii.scan",
    "machstem.build",
    "machstem.verify",
    "asymptotics",
)


class DocumentModel(BaseModel):
    """Base for strict input documents."""
    model_config = ConfigDict(extra="forbid")


class IdealEosDocument(DocumentModel):
    type: Literal["ideal"]
    gamma: float = Field(gt=1.0)
    cv: float = Field(gt=0.0)
    tau_ref: float = Field(default=1.0, gt=0.0)
    s_ref: float = 0.0
    e_ref: float = Field(default=1.0, gt=0.0)


class MieGruneisenEosDocument(DocumentModel):
    type: Literal["mie_gruneisen"]
    gruneisen: float = Field(gt=0.0)
    cv: float = Field(gt=0.0)
    thermal_amplitude: float
    cold_stiffness: float = Field(ge=0.0)
    cold_exponent: float = Field(gt=1.0)
    tau_ref: float = Field(default=1.0, gt=0.0)
    s_ref: float = 0.0


EosDocument = Annotated[Union[IdealEosDocument, MieGruneisenEosDocument], Field(discriminator="type")]
EOS_ADAPTER: TypeAdapter[Union[IdealEosDocument, MieGruneisenEosDocument]] = TypeAdapter(EosDocument)


class StateDocument(DocumentModel):
    tau: float
    u: float
    v: float
    s: float


class ThermoDocument(DocumentModel):
    tau: float
    s: float
    e: float
    p: float
    T: float
    c: float
    gruneisen: float
    rho: float
    G: float


class ShockDocument(DocumentModel):
    eos: Optional[EosDocument] = None
    upstream: StateDocument
    downstream: StateDocument
    thermo0: ThermoDocument
    thermo1: ThermoDocument
    mass_flux: float
    u_bar: float
    mach1: float
    nu: float


class DiagnosticsDocument(DocumentModel):
    rh_residual_s1: float
    rh_residual_s2: float
    rh_residual_s3: float
    rh_residual_cd: float
    pressure_gap: float
    delta: float
    causality_cd: float
    causality_s3: float
    lax_s1: list[float]
    lax_s2: list[float]
    lax_s3: list[float]
    pressure_ordering: bool
    entropy_jump_s3: float
    contact_normal_velocity: list[float]
    branch_ok: bool
    failures: list[str] = Field(default_factory=list)


class PatternDocument(DocumentModel):
    eps: float
    states: list[StateDocument] = Field(min_length=4, max_length=4)
    theta: float
    phi: float
    psi: float
    phi0: float
    psi0: float
    lam: float
    u_upstream: float
    pressures: list[float] = Field(min_length=4, max_length=4)
    diagnostics: DiagnosticsDocument


class FamilyFailureDocument(DocumentModel):
    eps: float
    code: str
    message: str
    failures: list[str] = Field(default_factory=list)


class FamilyDocument(DocumentModel):
    shock: ShockDocument
    patterns: list[PatternDocument]
    failure: Optional[FamilyFailureDocument] = None


class ArtifactDocument(DocumentModel):
    """Envelope shared by every JSON artifact."""
    kind: str
    version: str
    payload: Any


class RunConfig(DocumentModel):
    """One CLI invocation, validated before dispatch."""
    verb: str
    eos_path: Optional[Path] = None
    shock_path: Optional[Path] = None
    family_path: Optional[Path] = None
    params: dict[str, Any] = Field(default_factory=dict)
    eps_grid: Optional[list[float]] = None
    output_format: Literal["json", "table"] = "json"
    out: Optional[Path] = None
    csv_path: Optional[Path] = None
    threads: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = None

    @field_validator("verb")
    @classmethod
    def verb_known(cls, value: str) -> str:
        if value not in VERBS:
            raise ValueError(f"unknown verb {value!r}")
        return value

    @field_validator("eps_grid")
    @classmethod
    def grid_nonempty(cls, value: Optional[list[float]]) -> Optional[list[float]]:
        if value is not None and not value:
            raise ValueError("eps grid must not be empty")
        return value
