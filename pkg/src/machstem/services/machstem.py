"""
Four-wave Mach stem patterns bifurcating from a weakly stable planar shock.

A pattern at angle eps consists of the incident front S1 (direction pi - eps),
the reference front S2 along the x1 axis, the reflected front S3 (direction Psi)
and the contact CD (direction Phi). The tangential velocity u of the upstream
state is tuned so that the velocities behind S1 and S3 are collinear.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import newton

from machstem.models.core import (
    BranchJumpError,
    ConvergenceError,
    DomainError,
    FamilyFailure,
    FamilyResult,
    FluidState,
    MachStemError,
    MachStemPattern,
    PatternDiagnostics,
    PlanarShock,
    SeedTooFarError,
    ThermoPoint,
    ValidationError,
)
from machstem.numerics.newton import damped_newton
from machstem.services.eos import EquationOfState, state_thermo, thermo_eval
from machstem.services.flux import flux, flux_jacobian
from machstem.services.shock import (
    acoustic_front_angles,
    lax_margins,
    scaled_front_residual,
)
from machstem.utils.config import get_config
from machstem.utils.logging import get_logger

logger = get_logger("machstem")

TWO_PI = 2.0 * math.pi
RH_TOL = 1e-10
PRESSURE_TOL = 1e-12
DELTA_TOL = 1e-12
CONTACT_TOL = 1e-10
ENTROPY_TOL = 1e-10
SECANT_MAX_ITER = 50


@dataclass
class MismatchResult:
    """States behind S2, S1 and S3 for one upstream state, with the collinearity gap."""
    eps: float
    upstream: FluidState
    state1: FluidState
    state2: FluidState
    state3: FluidState
    psi: float
    lam: float
    delta: float
    delta_tilde: Optional[float]


def _require_eos(shock: PlanarShock) -> EquationOfState:
    if shock.eos is None:
        raise DomainError("Mach stem patterns need a shock with an equation of state")
    return shock.eos


def _state_scale(state: FluidState, thermo: ThermoPoint, cv: float) -> np.ndarray:
    speed = max(abs(state.u), abs(state.v)) + thermo.c
    return np.array([state.tau, speed, speed, cv])


def _check_trust(shock: PlanarShock, state: FluidState) -> None:
    eos = _require_eos(shock)
    scale = _state_scale(shock.upstream, shock.thermo0, eos.cv)
    deviation = float(np.max(np.abs(state.as_array() - shock.upstream.as_array()) / scale))
    if deviation > get_config().trust_region:
        raise SeedTooFarError(f"state deviates {deviation:.3g} from the reference upstream state")


def _solve_jump(
    eos: EquationOfState,
    state: FluidState,
    weights: tuple[float, float],
    seed: FluidState,
    label: str,
) -> FluidState:
    """W with w1 (f1(W) - f1(U)) + w2 (f2(W) - f2(U)) = 0, starting from seed."""
    w1, w2 = weights
    target = w1 * flux(eos, 1, state) + w2 * flux(eos, 2, state)
    f_scale = np.abs(flux(eos, 1, state)) + np.abs(flux(eos, 2, state))
    x_scale = _state_scale(seed, state_thermo(eos, seed), eos.cv)

    def residual(x: np.ndarray) -> np.ndarray:
        w = FluidState.from_array(x)
        return w1 * flux(eos, 1, w) + w2 * flux(eos, 2, w) - target

    def jacobian(x: np.ndarray) -> np.ndarray:
        w = FluidState.from_array(x)
        matrix = w2 * flux_jacobian(eos, 2, w)
        if w1 != 0.0:
            matrix = matrix + w1 * flux_jacobian(eos, 1, w)
        return matrix

    result = damped_newton(residual, jacobian, seed.as_array(), x_scale=x_scale,
                           f_scale=np.maximum(f_scale, np.finfo(float).tiny), label=label)
    return FluidState.from_array(result.x)


def downstream_state_1(shock: PlanarShock, state: FluidState) -> FluidState:
    """State behind a front along the x1 axis: f2(W) = f2(U), seeded at the reference downstream."""
    _check_trust(shock, state)
    return _solve_jump(_require_eos(shock), state, (0.0, 1.0), shock.downstream, "downstream_1")


def downstream_state_2(
    shock: PlanarShock,
    eps: float,
    state: FluidState,
    seed: Optional[FluidState] = None,
) -> FluidState:
    """State behind the front with normal (sin eps, cos eps)."""
    _check_trust(shock, state)
    if seed is None:
        seed = downstream_state_1(shock, state)
    return _solve_jump(_require_eos(shock), state, (math.sin(eps), math.cos(eps)), seed, "downstream_2")


def candidate_angles(eos: EquationOfState, state: FluidState) -> tuple[float, float]:
    """Both roots of -u sin Psi + v cos Psi + c = 0, the causal one first."""
    thermo = state_thermo(eos, state)
    return acoustic_front_angles(state.u, state.v, thermo.c)


def _kernel_vector(state: FluidState, thermo: ThermoPoint, psi: float) -> np.ndarray:
    return np.array([state.tau, thermo.c * math.sin(psi), -thermo.c * math.cos(psi), 0.0])


def _angle_distance(a: float, b: float) -> float:
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


def shock3_solve(
    eos: EquationOfState,
    state1: FluidState,
    p_target: float,
    seed: Optional[tuple[FluidState, float]] = None,
) -> tuple[FluidState, float, float]:
    """Reflected front S3 from U1 reaching pressure p_target.

    Newton on (U3, Psi) with the four jump conditions and p(U3) = p_target.
    Returns (U3, Psi, lambda), lambda being the projection of U3 - U1 on the
    kernel direction at U1.
    """
    thermo1 = state_thermo(eos, state1)
    causal, rejected = acoustic_front_angles(state1.u, state1.v, thermo1.c)
    kernel = _kernel_vector(state1, thermo1, causal)
    if p_target == thermo1.p:
        return state1, causal, 0.0

    if seed is None:
        lam0 = -(p_target - thermo1.p) * thermo1.tau / thermo1.c2
        x0 = np.append(state1.as_array() + lam0 * kernel, causal)
    else:
        x0 = np.append(seed[0].as_array(), seed[1])

    flux1_a, flux2_a = flux(eos, 1, state1), flux(eos, 2, state1)

    def residual(x: np.ndarray) -> np.ndarray:
        w, psi = FluidState.from_array(x[:4]), float(x[4])
        thermo = thermo_eval(eos, w.tau, w.s)
        jump = -math.sin(psi) * (flux(eos, 1, w) - flux1_a) + math.cos(psi) * (flux(eos, 2, w) - flux2_a)
        return np.append(jump, thermo.p - p_target)

    def jacobian(x: np.ndarray) -> np.ndarray:
        w, psi = FluidState.from_array(x[:4]), float(x[4])
        thermo = thermo_eval(eos, w.tau, w.s)
        sin_psi, cos_psi = math.sin(psi), math.cos(psi)
        matrix = np.zeros((5, 5))
        matrix[:4, :4] = -sin_psi * flux_jacobian(eos, 1, w) + cos_psi * flux_jacobian(eos, 2, w)
        matrix[:4, 4] = -cos_psi * (flux(eos, 1, w) - flux1_a) - sin_psi * (flux(eos, 2, w) - flux2_a)
        matrix[4, :4] = [-thermo.c2 / thermo.tau**2, 0.0, 0.0, thermo.gruneisen * thermo.T / thermo.tau]
        return matrix

    x_scale = np.append(_state_scale(state1, thermo1, eos.cv), 1.0)
    f_scale = np.append(np.abs(flux1_a) + np.abs(flux2_a), abs(p_target))
    result = damped_newton(residual, jacobian, x0, x_scale=x_scale, f_scale=f_scale, label="shock3")

    state3 = FluidState.from_array(result.x[:4])
    psi = float(result.x[4]) % TWO_PI
    if _angle_distance(psi, rejected) < _angle_distance(psi, causal):
        raise BranchJumpError(f"reflected front angle {psi:.12g} converged to the rejected branch")
    lam = float((state3.as_array() - state1.as_array()) @ kernel / (kernel @ kernel))
    return state3, psi, lam


def upstream_with_u(shock: PlanarShock, u: float) -> FluidState:
    return FluidState(shock.upstream.tau, u, shock.upstream.v, shock.upstream.s)


def velocity_mismatch(shock: PlanarShock, eps: float, state: FluidState) -> MismatchResult:
    """Collinearity gap det[u(U2), u(U3)] of the states behind S1 and S3."""
    eos = _require_eos(shock)
    state1 = downstream_state_1(shock, state)
    state2 = downstream_state_2(shock, eps, state, seed=state1)
    p2 = state_thermo(eos, state2).p
    state3, psi, lam = shock3_solve(eos, state1, p2)
    delta = state2.u * state3.v - state2.v * state3.u
    return MismatchResult(
        eps=eps,
        upstream=state,
        state1=state1,
        state2=state2,
        state3=state3,
        psi=psi,
        lam=lam,
        delta=delta,
        delta_tilde=delta / eps if eps != 0.0 else None,
    )


def reference_angles(shock: PlanarShock) -> tuple[float, float]:
    """Limit angles (Phi0, Psi0) of the degenerate pattern at eps = 0."""
    phi0 = math.atan2(shock.downstream.v, shock.u_bar) % TWO_PI
    psi0 = acoustic_front_angles(shock.u_bar, shock.downstream.v, shock.thermo1.c)[0]
    return phi0, psi0


def diagnose(
    eos: EquationOfState,
    eps: float,
    states: Sequence[FluidState],
    phi: float,
    psi: float,
) -> PatternDiagnostics:
    """Residuals and admissibility verdicts of an assembled pattern."""
    u0, u1, u2, u3 = states
    t0, t1, t2, t3 = (state_thermo(eos, s) for s in states)
    failures: list[str] = []

    rh = {
        "s1": scaled_front_residual(eos, u0, u2, math.pi - eps),
        "s2": scaled_front_residual(eos, u0, u1, 0.0),
        "s3": scaled_front_residual(eos, u1, u3, psi),
        "cd": scaled_front_residual(eos, u2, u3, phi),
    }
    failures.extend(f"rh_{name}" for name, value in rh.items() if not value < RH_TOL)

    pressure_gap = abs(t2.p - t3.p) / t2.p
    if not pressure_gap < PRESSURE_TOL:
        failures.append("pressure_match")
    delta = u2.u * u3.v - u2.v * u3.u
    if not abs(delta) < DELTA_TOL * float(np.linalg.norm(u2.velocity) * np.linalg.norm(u3.velocity)):
        failures.append("collinearity")

    causality_cd = float(u2.velocity @ np.array([math.cos(phi), math.sin(phi)]))
    causality_s3 = float(u1.velocity @ np.array([math.cos(psi), math.sin(psi)]))
    if not causality_cd > 0.0:
        failures.append("causality_cd")
    if not causality_s3 > 0.0:
        failures.append("causality_s3")

    lax = {
        "s1": lax_margins(eos, u0, u2, (math.sin(eps), math.cos(eps))),
        "s2": lax_margins(eos, u0, u1, (0.0, 1.0)),
        "s3": lax_margins(eos, u1, u3, (-math.sin(psi), math.cos(psi))),
    }
    failures.extend(f"lax_{name}" for name, margins in lax.items() if not margins.passed)

    ordering = t0.p < t1.p < t2.p
    if not ordering:
        failures.append("pressure_ordering")
    entropy_jump = u3.s - u1.s
    if entropy_jump < -ENTROPY_TOL * eos.cv:
        failures.append("entropy_s3")

    normal = np.array([-math.sin(phi), math.cos(phi)])
    contact = [
        abs(float(u2.velocity @ normal)) / float(np.linalg.norm(u2.velocity)),
        abs(float(u3.velocity @ normal)) / float(np.linalg.norm(u3.velocity)),
    ]
    if max(contact) >= CONTACT_TOL:
        failures.append("contact_normal_velocity")

    causal, rejected = acoustic_front_angles(u1.u, u1.v, t1.c)
    branch_ok = _angle_distance(psi, causal) <= _angle_distance(psi, rejected)
    if not branch_ok:
        failures.append("branch")

    return PatternDiagnostics(
        rh_residual_s1=rh["s1"],
        rh_residual_s2=rh["s2"],
        rh_residual_s3=rh["s3"],
        rh_residual_cd=rh["cd"],
        pressure_gap=pressure_gap,
        delta=delta,
        causality_cd=causality_cd,
        causality_s3=causality_s3,
        lax_s1=[lax["s1"].upstream_mach, lax["s1"].downstream_mach],
        lax_s2=[lax["s2"].upstream_mach, lax["s2"].downstream_mach],
        lax_s3=[lax["s3"].upstream_mach, lax["s3"].downstream_mach],
        pressure_ordering=ordering,
        entropy_jump_s3=entropy_jump,
        contact_normal_velocity=contact,
        branch_ok=branch_ok,
        failures=failures,
    )


def solve_pattern(
    shock: PlanarShock,
    eps: float,
    u_seed: Optional[float] = None,
    validate: bool = True,
) -> MachStemPattern:
    """Tune the upstream tangential velocity so that delta / eps vanishes, then assemble the pattern.

    Raises ValidationError listing every failed invariant unless validate is False.
    """
    eos = _require_eos(shock)
    if eps == 0.0:
        raise DomainError("the bifurcation parameter must be nonzero")
    u_start = shock.u_bar if u_seed is None else u_seed
    speed = float(np.linalg.norm(shock.upstream.velocity)) + shock.thermo0.c

    def objective(u: float) -> float:
        return velocity_mismatch(shock, eps, upstream_with_u(shock, float(u))).delta / eps

    try:
        u = float(newton(
            objective,
            u_start,
            x1=u_start + 1e-6 * speed,
            tol=1e-13 * speed / abs(eps),
            rtol=0.0,
            maxiter=SECANT_MAX_ITER,
        ))
    except RuntimeError as exc:
        raise ConvergenceError(f"tangential velocity iteration failed at eps={eps:.6g}: {exc}") from exc

    result = velocity_mismatch(shock, eps, upstream_with_u(shock, u))
    phi = math.atan2(result.state2.v, result.state2.u) % TWO_PI
    phi0, psi0 = reference_angles(shock)
    states = [result.upstream, result.state1, result.state2, result.state3]
    diagnostics = diagnose(eos, eps, states, phi, result.psi)
    pattern = MachStemPattern(
        eps=eps,
        states=states,
        theta=math.pi - eps,
        phi=phi,
        psi=result.psi,
        phi0=phi0,
        psi0=psi0,
        lam=result.lam,
        u_upstream=u,
        pressures=[state_thermo(eos, s).p for s in states],
        diagnostics=diagnostics,
    )
    logger.debug(f"Pattern eps={eps:.4g}: u={u:.12g}, psi={result.psi:.10g}, failures={diagnostics.failures}")
    if validate and diagnostics.failures:
        raise ValidationError(f"pattern at eps={eps:.6g} violates {', '.join(diagnostics.failures)}",
                              diagnostics.failures)
    return pattern


def _check_grid(eps_grid: Sequence[float]) -> None:
    if not eps_grid:
        raise DomainError("eps grid is empty")
    if any(e == 0.0 for e in eps_grid):
        raise DomainError("eps grid must not contain zero")
    if len({math.copysign(1.0, e) for e in eps_grid}) > 1:
        raise DomainError("eps grid must not mix signs")
    magnitudes = [abs(e) for e in eps_grid]
    if any(b <= a for a, b in zip(magnitudes, magnitudes[1:])):
        raise DomainError("eps grid must increase in magnitude")


def continue_family(shock: PlanarShock, eps_grid: Sequence[float]) -> FamilyResult:
    """Predictor-corrector continuation in eps; stops at the first failing grid point."""
    _check_grid(eps_grid)
    patterns: list[MachStemPattern] = []
    failure: Optional[FamilyFailure] = None
    logger.info(f"Continuing Mach stem family over {len(eps_grid)} values of eps")

    for eps in eps_grid:
        if not patterns:
            seed = shock.u_bar
        elif len(patterns) == 1:
            seed = shock.u_bar + (patterns[0].u_upstream - shock.u_bar) * eps / patterns[0].eps
        else:
            a, b = patterns[-2], patterns[-1]
            seed = b.u_upstream + (b.u_upstream - a.u_upstream) * (eps - b.eps) / (b.eps - a.eps)
        try:
            patterns.append(solve_pattern(shock, eps, seed))
        except MachStemError as exc:
            failures = exc.failures if isinstance(exc, ValidationError) else []
            failure = FamilyFailure(eps=eps, code=exc.code.value, message=exc.message, failures=failures)
            logger.warning(f"Continuation stopped at eps={eps:.6g}: {exc.message}")
            break

    return FamilyResult(shock=shock, patterns=patterns, failure=failure)


def verify_pattern(eos: EquationOfState, pattern: MachStemPattern) -> PatternDiagnostics:
    """Recompute the diagnostics of a stored pattern."""
    diagnostics = diagnose(eos, pattern.eps, pattern.states, pattern.phi, pattern.psi)
    if abs(pattern.theta - (math.pi - pattern.eps)) > 0.0:
        diagnostics.failures.append("theta")
    return diagnostics


def _monotone_breaks(values: Sequence[float]) -> list[int]:
    """Indices k >= 1 where values[k] - values[k-1] does not move in the overall direction."""
    if len(values) < 2:
        return []
    direction = math.copysign(1.0, values[-1] - values[0])
    return [k for k in range(1, len(values)) if not (values[k] - values[k - 1]) * direction > 0.0]


def verify_family(family: FamilyResult) -> list[PatternDiagnostics]:
    """Re-check every pattern of a stored family against its shock.

    Phi and Psi must move monotonically along the eps grid; a pattern that breaks
    the trend is flagged with monotone_phi or monotone_psi.
    """
    eos = _require_eos(family.shock)
    diagnostics = [verify_pattern(eos, pattern) for pattern in family.patterns]
    for name in ("phi", "psi"):
        for k in _monotone_breaks([getattr(pattern, name) for pattern in family.patterns]):
            diagnostics[k].failures.append(f"monotone_{name}")
    return diagnostics
