"""
Shared fixtures for the machstem test-suite.
Reference equations of state, the ideal-gas Mach-2 shock and the weakly stable reference shock.
"""

from pathlib import Path
from typing import Iterator

import numpy as np
import pytest

from machstem.models.core import FamilyResult, FluidState, PlanarShock, ShockStrength, StrengthKind
from machstem.services.eos import ConstantGruneisen, IdealPolytropic
from machstem.services.machstem import continue_family
from machstem.services.shock import galilean_shift, solve_downstream
from machstem.services.stability import worksheet_from_shock
from machstem.utils.config import reset_config
from machstem.utils.serialization import artifact, dumps, shock_payload

# Compression of the reference shock; M1^2 nu sits inside the weak window.
REFERENCE_TAU1 = 0.76
FAMILY_EPS = tuple(float(e) for e in np.geomspace(1e-4, 1e-2, 10))


@pytest.fixture(autouse=True)
def fresh_config(monkeypatch: pytest.MonkeyPatch) -> Iterator[None]:
    """Every test starts from the default solver settings."""
    for name in ("MACHSTEM_LOG_LEVEL", "MACHSTEM_THREADS", "MACHSTEM_TRUST_REGION", "MACHSTEM_SEED"):
        monkeypatch.delenv(name, raising=False)
    reset_config()
    yield
    reset_config()


@pytest.fixture(scope="session")
def ideal_gas() -> IdealPolytropic:
    """gamma = 1.4 gas with p = 1 and e = 2.5 at tau = 1, s = 0."""
    return IdealPolytropic(gamma=1.4, cv=1.0, tau_ref=1.0, s_ref=0.0, e_ref=2.5)


@pytest.fixture(scope="session")
def stiff_eos() -> ConstantGruneisen:
    """Constant-Gruneisen EOS with a weakly stable Hugoniot segment from (tau, s) = (1, 0)."""
    return ConstantGruneisen(
        gruneisen=5.0,
        cv=1.0,
        thermal_amplitude=0.002,
        cold_stiffness=1.0,
        cold_exponent=1.2,
        tau_ref=1.0,
        s_ref=0.0,
    )


@pytest.fixture(scope="session")
def mach2_shock(ideal_gas: IdealPolytropic) -> PlanarShock:
    """Normal shock with upstream Mach number 2: j = 2 c0 / tau0."""
    upstream = FluidState(tau=1.0, u=0.0, v=-1.0, s=0.0)
    j = 2.0 * np.sqrt(1.4)
    return solve_downstream(ideal_gas, upstream, ShockStrength(StrengthKind.MASS_FLUX, float(j)))


@pytest.fixture(scope="session")
def weak_shock_at_rest(stiff_eos: ConstantGruneisen) -> PlanarShock:
    """Weakly stable reference shock with zero tangential velocity."""
    upstream = FluidState(tau=1.0, u=0.0, v=-1.0, s=0.0)
    return solve_downstream(stiff_eos, upstream, ShockStrength(StrengthKind.TAU1, REFERENCE_TAU1))


@pytest.fixture(scope="session")
def weak_shock(weak_shock_at_rest: PlanarShock) -> PlanarShock:
    """The same shock moving with tangential velocity -V."""
    return galilean_shift(weak_shock_at_rest, -worksheet_from_shock(weak_shock_at_rest).V)


@pytest.fixture(scope="session")
def reference_family(weak_shock: PlanarShock) -> FamilyResult:
    """Mach stem family over ten log-spaced eps in [1e-4, 1e-2]."""
    return continue_family(weak_shock, FAMILY_EPS)


@pytest.fixture
def stiff_eos_file(tmp_path: Path, stiff_eos: ConstantGruneisen) -> Path:
    path = tmp_path / "eos.json"
    path.write_bytes(dumps(stiff_eos.to_spec()))
    return path


@pytest.fixture
def ideal_eos_file(tmp_path: Path, ideal_gas: IdealPolytropic) -> Path:
    path = tmp_path / "ideal.json"
    path.write_bytes(dumps(ideal_gas.to_spec()))
    return path


@pytest.fixture
def weak_shock_file(tmp_path: Path, weak_shock: PlanarShock) -> Path:
    path = tmp_path / "shock.json"
    path.write_bytes(dumps(artifact("shock", shock_payload(weak_shock))))
    return path
