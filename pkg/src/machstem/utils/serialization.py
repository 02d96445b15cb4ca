"""
JSON and CSV artifacts for machstem results.
Every JSON artifact is an envelope {"kind", "version", "payload"} rendered with orjson.
"""

import csv
from dataclasses import asdict
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np
import orjson

from machstem.models.core import (
    ConfigError,
    FamilyFailure,
    FamilyResult,
    FluidState,
    MachStemPattern,
    PatternDiagnostics,
    PlanarShock,
    ThermoPoint,
)
from machstem.models.documents import (
    ArtifactDocument,
    FamilyDocument,
    PatternDocument,
    ShockDocument,
    StateDocument,
    ThermoDocument,
)
from machstem.utils.config import get_version
from machstem.utils.logging import get_logger

logger = get_logger("serialization")

DUMP_OPTIONS = orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_SERIALIZE_DATACLASS | orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2


def _default(obj: Any) -> Any:
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray) and np.iscomplexobj(obj):
        return [[float(x.real), float(x.imag)] for x in obj.ravel()]
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"Type is not JSON serializable: {type(obj).__name__}")


def dumps(obj: Any) -> bytes:
    """Serialize dataclasses, numpy values and complex numbers to indented JSON."""
    return orjson.dumps(obj, default=_default, option=DUMP_OPTIONS)


def to_plain(obj: Any) -> Any:
    """Plain dicts and lists with the same content dumps would emit."""
    return orjson.loads(dumps(obj))


def artifact(kind: str, payload: Any) -> dict[str, Any]:
    return {"kind": kind, "version": get_version(), "payload": payload}


def write_artifact(path: str | Path, kind: str, payload: Any) -> None:
    target = Path(path)
    target.write_bytes(dumps(artifact(kind, payload)))
    logger.info(f"Wrote {kind} artifact to {target}")


def read_artifact(path: str | Path, kind: Optional[str] = None) -> Any:
    """Return the payload of an artifact file, checking its kind when given."""
    document = ArtifactDocument.model_validate(orjson.loads(Path(path).read_bytes()))
    if kind is not None and document.kind != kind:
        raise ConfigError(f"{path} holds a {document.kind!r} artifact, expected {kind!r}")
    return document.payload


# Shocks and families

def shock_payload(shock: PlanarShock) -> dict[str, Any]:
    return {
        "eos": shock.eos.to_spec() if shock.eos is not None else None,
        "upstream": asdict(shock.upstream),
        "downstream": asdict(shock.downstream),
        "thermo0": asdict(shock.thermo0),
        "thermo1": asdict(shock.thermo1),
        "mass_flux": shock.mass_flux,
        "u_bar": shock.u_bar,
        "mach1": shock.mach1,
        "nu": shock.nu,
    }


def family_payload(family: FamilyResult) -> dict[str, Any]:
    return {
        "shock": shock_payload(family.shock),
        "patterns": [asdict(p) for p in family.patterns],
        "failure": asdict(family.failure) if family.failure is not None else None,
    }


def _state(document: StateDocument) -> FluidState:
    return FluidState(tau=document.tau, u=document.u, v=document.v, s=document.s)


def _thermo(document: ThermoDocument) -> ThermoPoint:
    return ThermoPoint(**document.model_dump())


def shock_from_document(document: ShockDocument) -> PlanarShock:
    # Stored thermodynamics are used as written so a reload is bitwise identical.
    from machstem.services.eos import eos_from_spec

    eos = eos_from_spec(document.eos.model_dump()) if document.eos is not None else None
    return PlanarShock(
        eos=eos,
        upstream=_state(document.upstream),
        downstream=_state(document.downstream),
        thermo0=_thermo(document.thermo0),
        thermo1=_thermo(document.thermo1),
        mass_flux=document.mass_flux,
        u_bar=document.u_bar,
        mach1=document.mach1,
        nu=document.nu,
    )


def _pattern(document: PatternDocument) -> MachStemPattern:
    return MachStemPattern(
        eps=document.eps,
        states=[_state(s) for s in document.states],
        theta=document.theta,
        phi=document.phi,
        psi=document.psi,
        phi0=document.phi0,
        psi0=document.psi0,
        lam=document.lam,
        u_upstream=document.u_upstream,
        pressures=list(document.pressures),
        diagnostics=PatternDiagnostics(**document.diagnostics.model_dump()),
    )


def family_from_document(document: FamilyDocument) -> FamilyResult:
    failure = FamilyFailure(**document.failure.model_dump()) if document.failure is not None else None
    return FamilyResult(
        shock=shock_from_document(document.shock),
        patterns=[_pattern(p) for p in document.patterns],
        failure=failure,
    )


def load_shock(path: str | Path) -> PlanarShock:
    """Read a shock artifact (or a bare shock document) from disk."""
    raw = orjson.loads(Path(path).read_bytes())
    if isinstance(raw, dict) and "payload" in raw:
        raw = ArtifactDocument.model_validate(raw).payload
    return shock_from_document(ShockDocument.model_validate(raw))


def load_family(path: str | Path) -> FamilyResult:
    """Read a family artifact from disk."""
    raw = orjson.loads(Path(path).read_bytes())
    if isinstance(raw, dict) and "payload" in raw:
        raw = ArtifactDocument.model_validate(raw).payload
    return family_from_document(FamilyDocument.model_validate(raw))


# CSV projections

def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    return value


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    target = Path(path)
    with target.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(float(v)) if isinstance(v, np.floating) else _cell(v) for v in row])
    logger.info(f"Wrote CSV to {target}")


FAMILY_COLUMNS = ("eps", "theta", "phi", "psi", "lambda", "u_upstream", "p0", "p1", "p2", "p3", "passed")


def family_rows(family: FamilyResult) -> list[list[Any]]:
    return [
        [p.eps, p.theta, p.phi, p.psi, p.lam, p.u_upstream, *p.pressures, p.passed]
        for p in family.patterns
    ]
