"""
Core models for shock stability and Mach stem computations.
Immutable value types, error codes and the exception hierarchy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Optional

import numpy as np

if TYPE_CHECKING:
    from machstem.services.eos import EquationOfState


class ErrorCode(str, Enum):
    """Stable machine-readable error codes."""
    DOMAIN = "domain"
    SINGULAR_MATRIX = "singular_matrix"
    CONVERGENCE = "convergence"
    ADMISSIBILITY = "admissibility"
    GLANCING = "glancing"
    COINCIDENCE = "coincidence"
    NOT_WEAKLY_STABLE = "not_weakly_stable"
    NO_ADMISSIBLE_ROOT = "no_admissible_root"
    DEGENERATE_QUARTIC = "degenerate_quartic"
    NO_ROOT_IN_INTERVAL = "no_root_in_interval"
    SEED_TOO_FAR = "seed_too_far"
    BRANCH_JUMP = "branch_jump"
    VALIDATION = "validation"
    CONFIG = "config"
    NOT_FOUND = "not_found"


class MachStemError(Exception):
    """Base error carrying a machine code and a human message."""
    code: ErrorCode = ErrorCode.DOMAIN

    def __init__(self, message: str, code: Optional[ErrorCode] = None) -> None:
        if code is not None:
            self.code = code
        self.message: str = message
        super().__init__(message)

    def to_dict(self) -> dict[str, Any]:
        """Render the error document body."""
        return {"code": self.code.value, "message": self.message}


class DomainError(MachStemError):
    """Input outside the domain of an operation."""
    code = ErrorCode.DOMAIN


class SingularMatrixError(MachStemError):
    """A matrix that must be invertible is numerically singular."""
    code = ErrorCode.SINGULAR_MATRIX


class ConvergenceError(MachStemError):
    """An iterative solver failed to converge."""
    code = ErrorCode.CONVERGENCE


class AdmissibilityError(MachStemError):
    """A requested shock violates the Lax inequalities."""
    code = ErrorCode.ADMISSIBILITY


class GlancingError(MachStemError):
    """The acoustic roots collide at a real frequency."""
    code = ErrorCode.GLANCING


class CoincidenceError(MachStemError):
    """The entropy-vorticity and acoustic eigenmodes coincide."""
    code = ErrorCode.COINCIDENCE


class NotWeaklyStableError(MachStemError):
    """The Lopatinskii determinant does not vanish where weak stability requires it."""
    code = ErrorCode.NOT_WEAKLY_STABLE


class NoAdmissibleRootError(MachStemError):
    """No root of the critical-velocity quadratic passes the characterization."""
    code = ErrorCode.NO_ADMISSIBLE_ROOT


class DegenerateQuarticError(MachStemError):
    """Both leading coefficients of the critical-velocity equation vanish."""
    code = ErrorCode.DEGENERATE_QUARTIC


class NoRootInIntervalError(MachStemError):
    """The angle equation has no root inside (M1, 1)."""
    code = ErrorCode.NO_ROOT_IN_INTERVAL


class SeedTooFarError(MachStemError):
    """A perturbed state left the trust region around the reference state."""
    code = ErrorCode.SEED_TOO_FAR


class BranchJumpError(MachStemError):
    """A converged front angle sits on the rejected branch."""
    code = ErrorCode.BRANCH_JUMP


class ConfigError(MachStemError):
    """Invalid configuration value."""
    code = ErrorCode.CONFIG


class NotFoundError(MachStemError):
    """A search returned no candidate."""
    code = ErrorCode.NOT_FOUND


class ValidationError(MachStemError):
    """One or more invariants failed; carries the list of failures."""
    code = ErrorCode.VALIDATION

    def __init__(self, message: str, failures: Optional[list[str]] = None) -> None:
        super().__init__(message)
        self.failures: list[str] = list(failures or [])

    def to_dict(self) -> dict[str, Any]:
        body = super().to_dict()
        body["failures"] = self.failures
        return body


@dataclass(frozen=True)
class FluidState:
    """State vector U = (tau, u, v, s)."""
    tau: float
    u: float
    v: float
    s: float

    def as_array(self) -> np.ndarray:
        return np.array([self.tau, self.u, self.v, self.s], dtype=float)

    @classmethod
    def from_array(cls, values: np.ndarray) -> "FluidState":
        return cls(float(values[0]), float(values[1]), float(values[2]), float(values[3]))

    @property
    def velocity(self) -> np.ndarray:
        return np.array([self.u, self.v], dtype=float)


@dataclass(frozen=True)
class ThermoPoint:
    """Thermodynamic quantities derived from e(tau, s) at one point."""
    tau: float
    s: float
    e: float
    p: float
    T: float
    c: float
    gruneisen: float
    rho: float
    G: float

    @property
    def c2(self) -> float:
        return self.c * self.c


@dataclass
class BetheWeylReport:
    """Per-inequality verdicts over a (tau, s) grid."""
    tau_range: tuple[float, float]
    s_range: tuple[float, float]
    grid_counts: tuple[int, int]
    checks: dict[str, bool]
    failure_counts: dict[str, int]
    first_failure: dict[str, list[float]]
    passed: bool


@dataclass
class WeakRegimeCandidate:
    """Upstream state and strength whose shock lands in the weak regime."""
    upstream: FluidState
    tau1: float
    mach1: float
    gruneisen1: float
    nu: float
    m2nu: float
    lower_bound: float
    upper_bound: float

    @property
    def margin(self) -> float:
        return min(self.m2nu - self.lower_bound, self.upper_bound - self.m2nu)


@dataclass
class WeakRegimeSearch:
    """Outcome of a weak-regime search; best is the closest candidate either way."""
    found: bool
    candidate: Optional[WeakRegimeCandidate]
    best: Optional[WeakRegimeCandidate]
    best_margin: float
    evaluated: int


class StrengthKind(str, Enum):
    """Ways of selecting a point on the Hugoniot."""
    TAU1 = "tau1"
    MASS_FLUX = "mass_flux"
    PRESSURE_RATIO = "pressure_ratio"


@dataclass(frozen=True)
class ShockStrength:
    """Shock strength in one of the three equivalent parameterizations."""
    kind: StrengthKind
    value: float


@dataclass(frozen=True)
class PlanarShock:
    """Steady planar shock along x2 = 0 with upstream state above the front.

    eos is None only for shocks realised directly from a stability worksheet; the
    thermodynamic points then carry every value the linearized analysis reads.
    """
    eos: Optional["EquationOfState"]
    upstream: FluidState
    downstream: FluidState
    thermo0: ThermoPoint
    thermo1: ThermoPoint
    mass_flux: float
    u_bar: float
    mach1: float
    nu: float


@dataclass
class LaxMargins:
    """Normal Mach numbers ahead of and behind a front."""
    upstream_mach: float
    downstream_mach: float

    @property
    def passed(self) -> bool:
        return self.upstream_mach > 1.0 > self.downstream_mach > 0.0


@dataclass(frozen=True)
class FrequencyPoint:
    """Laplace frequency z (Im z <= 0) and tangential wavenumber eta."""
    z: complex
    eta: float


@dataclass
class ModeDecomposition:
    """Eigenmodes and stable-subspace basis at one frequency."""
    frequency: FrequencyPoint
    omega0: complex
    omega_minus: complex
    basis_e0: tuple[np.ndarray, np.ndarray]
    basis_eminus: np.ndarray
    hyperbolic: bool

    def basis_matrix(self) -> np.ndarray:
        """Columns e01, e02, e- as a 4x3 complex matrix."""
        return np.column_stack([self.basis_e0[0], self.basis_e0[1], self.basis_eminus])


@dataclass
class LinearizedRhSolution:
    """Closed-form solution of the linearized jump conditions at (z, eta) = (0, 1)."""
    chi: float
    u_dot: np.ndarray
    r: np.ndarray
    alpha0: float
    mu0: float
    alpha_minus: float
    alpha0_rescaled: float
    alpha_minus_rescaled: float
    residual: float
    reconstruction_residual: float


class StabilityClass(str, Enum):
    """Uniform / weak / violent trichotomy and its two boundaries."""
    UNIFORM = "uniform"
    WEAK = "weak"
    VIOLENT = "violent"
    LIMIT_GLANCING = "limit_glancing"
    LIMIT_ONE_DIMENSIONAL = "limit_one_dimensional"


@dataclass
class StabilityRegime:
    """Classification with the two threshold margins."""
    regime: StabilityClass
    m2nu: float
    lower_margin: float
    upper_margin: float


@dataclass
class WeakStabilityWorksheet:
    """Dimensionless quantities of a weakly stable shock."""
    mach1: float
    gruneisen1: float
    nu: float
    c1: float
    v1: float
    k: float
    phi: float
    y: float
    beta: float
    upsilon: float
    c_star: float
    V: float


@dataclass
class Prop1Report:
    """Both routes to the critical tangential velocity and their gap."""
    mach1: float
    gruneisen1: float
    nu: float
    c1: float
    V: float
    c_star: float
    gap: float
    passed: bool


@dataclass
class Prop1SweepReport:
    """Statistics of a seeded critical-speed agreement sweep."""
    samples: int
    seed: int
    min_gap: float
    max_gap: float
    median_gap: float
    failures: int
    worst: Optional[Prop1Report] = None


@dataclass
class ScanRoot:
    """A real root of the Lopatinskii determinant located by a scan."""
    z: float
    normalized_abs: float
    method: str


@dataclass
class PatternDiagnostics:
    """Residuals and admissibility checks of one Mach stem pattern."""
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
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class MachStemPattern:
    """Four-wave steady pattern at one value of the bifurcation parameter."""
    eps: float
    states: list[FluidState]
    theta: float
    phi: float
    psi: float
    phi0: float
    psi0: float
    lam: float
    u_upstream: float
    pressures: list[float]
    diagnostics: PatternDiagnostics

    @property
    def passed(self) -> bool:
        return self.diagnostics.passed


@dataclass
class FamilyFailure:
    """Marker of the first grid point where continuation stopped."""
    eps: float
    code: str
    message: str
    failures: list[str] = field(default_factory=list)


@dataclass
class FamilyResult:
    """Continuation output: validated patterns plus an optional failure marker."""
    shock: PlanarShock
    patterns: list[MachStemPattern]
    failure: Optional[FamilyFailure] = None

    @property
    def complete(self) -> bool:
        return self.failure is None


@dataclass
class AsymptoticReport:
    """Closed-form small-angle coefficients against finite-difference estimates."""
    alpha0: float
    alpha_minus: float
    mu0: float
    gruneisen_nonlinearity: float
    eps_grid: list[float]
    lambda_over_eps_limit: float
    lambda_gap: float
    u_prime_0: float
    psi_prime_0: float
    psi_prime_0_fd: float
    psi_prime_gap: float
    omega0: float
    omega1: float
    d2_delta: float
    d2_delta_fd: float
    d2_delta_gap: float
    lax_slope_upstream: float
    lax_slope_upstream_fd: float
    lax_slope_downstream: float
    lax_slope_downstream_fd: float
    lax_slope_gap: float
    phi0: float
    phi0_limit: float
    psi0: float
    psi0_limit: float
    flagged: list[str] = field(default_factory=list)
