"""
Small-angle expansion of the Mach stem family checked against finite differences.
"""

import math
from typing import Callable, Optional, Sequence

import numpy as np

from machstem.models.core import AsymptoticReport, DomainError, MachStemError, MachStemPattern, PlanarShock
from machstem.numerics.differences import extrapolate_to_zero, mixed_partial
from machstem.services.eos import EquationOfState, state_thermo
from machstem.services.machstem import (
    reference_angles,
    solve_pattern,
    upstream_with_u,
    velocity_mismatch,
)
from machstem.services.normal_modes import solve_linearized_rh
from machstem.utils.logging import get_logger

logger = get_logger("asymptotics")

DEFAULT_EPS_GRID = (2e-3, 1e-3, 5e-4)
MIXED_STEP = 1e-3
GAP_LIMIT = 1e-4
LAMBDA_GAP_LIMIT = 1e-6
ANGLE_GAP_LIMIT = 1e-8


def omega_terms(mach1: float, beta: float) -> tuple[float, float]:
    """Positive factors Omega0 and Omega1 of the mixed derivative of delta."""
    q = 1.0 + mach1 * mach1 - 2.0 * mach1 * beta
    denominator = (mach1 - beta) * (1.0 - mach1 * beta)
    omega0 = q / denominator
    omega1 = (
        mach1 * (3.0 + mach1**2) * beta**2 - 2.0 * (1.0 + 3.0 * mach1**2) * beta + mach1 * (3.0 + mach1**2)
    ) / (denominator * q)
    return omega0, omega1


def _relative_gap(value: float, reference: float) -> float:
    return abs(value - reference) / max(abs(reference), np.finfo(float).tiny)


def _lax_functions(pattern: MachStemPattern, eos: EquationOfState) -> tuple[float, float]:
    """Dimensional S3 margins u.(sin Psi, -cos Psi) - c on the upstream and downstream sides."""
    normal = np.array([math.sin(pattern.psi), -math.cos(pattern.psi)])
    state1, state3 = pattern.states[1], pattern.states[3]
    upstream = float(state1.velocity @ normal) - state_thermo(eos, state1).c
    downstream = float(state3.velocity @ normal) - state_thermo(eos, state3).c
    return upstream, downstream


def asymptotic_checks(shock: PlanarShock, eps_grid: Optional[Sequence[float]] = None) -> AsymptoticReport:
    """Compare the closed-form first-order coefficients with centered differences in eps.

    Patterns are solved at +eps and -eps for every grid value; the centered
    quotients are extrapolated to eps = 0 in powers of eps^2.
    """
    if shock.eos is None:
        raise DomainError("asymptotic checks need a shock with an equation of state")
    eos: EquationOfState = shock.eos
    grid = sorted(float(e) for e in (eps_grid or DEFAULT_EPS_GRID))
    if len(grid) < 2 or grid[0] <= 0.0:
        raise DomainError("asymptotic checks need at least two positive eps values")

    linear = solve_linearized_rh(shock)
    t1 = shock.thermo1
    c1, curvature = t1.c, t1.G
    v1, ub = shock.downstream.v, shock.u_bar
    phi0, psi0 = reference_angles(shock)
    beta = math.cos(psi0)
    flagged: list[str] = []
    logger.info(f"Asymptotic checks over eps grid {grid}")

    plus = [solve_pattern(shock, e, validate=False) for e in grid]
    minus = [solve_pattern(shock, -e, validate=False) for e in grid]
    squares = [e * e for e in grid]

    def slope(quantity: Callable[[MachStemPattern], float]) -> float:
        quotients = [(quantity(p) - quantity(m)) / (2.0 * e) for p, m, e in zip(plus, minus, grid)]
        return extrapolate_to_zero(squares, quotients)

    def midpoint(quantity: Callable[[MachStemPattern], float]) -> float:
        return extrapolate_to_zero(squares, [0.5 * (quantity(p) + quantity(m)) for p, m in zip(plus, minus)])

    lambda_limit = slope(lambda p: p.lam)
    lambda_gap = _relative_gap(lambda_limit, linear.alpha_minus)
    if lambda_gap > LAMBDA_GAP_LIMIT:
        flagged.append("lambda_over_eps")

    u_prime = slope(lambda p: p.u_upstream)
    root = math.sqrt(ub * ub + v1 * v1 - c1 * c1)
    psi_prime = (-0.5 * linear.alpha_minus * c1 * curvature - math.sin(psi0) * u_prime) / root
    psi_prime_fd = slope(lambda p: p.psi)
    psi_gap = _relative_gap(psi_prime_fd, psi_prime)
    if psi_gap > GAP_LIMIT:
        flagged.append("psi_prime")

    lax_up = 0.5 * linear.alpha_minus * c1 * curvature
    lax_up_fd = slope(lambda p: _lax_functions(p, eos)[0])
    lax_down_fd = slope(lambda p: _lax_functions(p, eos)[1])
    lax_gap = max(_relative_gap(lax_up_fd, -lax_up), _relative_gap(lax_down_fd, lax_up))
    if lax_gap > GAP_LIMIT:
        flagged.append("lax_slopes")

    mach, nu = shock.mach1, shock.nu
    sine = math.sqrt(1.0 - beta * beta)
    omega0, omega1 = omega_terms(mach, beta)
    d2_delta = nu * v1 * sine * (omega0 + nu * mach * omega1) / (1.0 + nu)
    speed = float(np.linalg.norm(shock.upstream.velocity)) + shock.thermo0.c
    try:
        d2_delta_fd = mixed_partial(
            lambda e, u: velocity_mismatch(shock, e, upstream_with_u(shock, u)).delta,
            0.0, ub, MIXED_STEP, MIXED_STEP * speed,
        )
        d2_gap = _relative_gap(d2_delta_fd, d2_delta)
    except MachStemError as exc:
        logger.warning(f"Mixed difference of delta failed: {exc.message}")
        d2_delta_fd, d2_gap = math.nan, math.nan
    if not d2_gap <= GAP_LIMIT:
        flagged.append("d2_delta")

    phi0_limit = midpoint(lambda p: p.phi)
    psi0_limit = midpoint(lambda p: p.psi)
    if abs(phi0_limit - phi0) > ANGLE_GAP_LIMIT:
        flagged.append("phi0")
    if abs(psi0_limit - psi0) > ANGLE_GAP_LIMIT:
        flagged.append("psi0")
    if not (omega0 > 0.0 and omega1 > 0.0):
        flagged.append("omega_sign")

    if flagged:
        logger.warning(f"Asymptotic checks flagged: {', '.join(flagged)}")
    return AsymptoticReport(
        alpha0=linear.alpha0,
        alpha_minus=linear.alpha_minus,
        mu0=linear.mu0,
        gruneisen_nonlinearity=curvature,
        eps_grid=grid,
        lambda_over_eps_limit=lambda_limit,
        lambda_gap=lambda_gap,
        u_prime_0=u_prime,
        psi_prime_0=psi_prime,
        psi_prime_0_fd=psi_prime_fd,
        psi_prime_gap=psi_gap,
        omega0=omega0,
        omega1=omega1,
        d2_delta=d2_delta,
        d2_delta_fd=d2_delta_fd,
        d2_delta_gap=d2_gap,
        lax_slope_upstream=-lax_up,
        lax_slope_upstream_fd=lax_up_fd,
        lax_slope_downstream=lax_up,
        lax_slope_downstream_fd=lax_down_fd,
        lax_slope_gap=lax_gap,
        phi0=phi0,
        phi0_limit=phi0_limit,
        psi0=psi0,
        psi0_limit=psi0_limit,
        flagged=flagged,
    )
