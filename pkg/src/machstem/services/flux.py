"""
Conservative fluxes of the 2D Euler equations in (tau, u, v, s) and their Jacobians.

The core functions take a precomputed ThermoPoint so that they also serve shocks
realised without an equation of state; the eos-level wrappers evaluate it first.
"""

from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from machstem.models.core import DomainError, FluidState, SingularMatrixError, ThermoPoint
from machstem.services.eos import EquationOfState, state_thermo
from machstem.utils.config import get_config
from machstem.utils.logging import get_logger

logger = get_logger("flux")

MAX_QUADRATURE_NODES = 64
CONDITION_LIMIT = 1e14


def _check_axis(axis: int, allowed: tuple[int, ...]) -> None:
    if axis not in allowed:
        raise DomainError(f"axis must be one of {allowed}, got {axis}")


def flux_at(axis: int, state: FluidState, thermo: ThermoPoint) -> np.ndarray:
    """f_axis(U) from a precomputed thermodynamic point."""
    _check_axis(axis, (0, 1, 2))
    rho, u, v, p = thermo.rho, state.u, state.v, thermo.p
    energy = rho * (0.5 * (u * u + v * v) + thermo.e)
    if axis == 0:
        return np.array([rho, rho * u, rho * v, energy])
    if axis == 1:
        return np.array([rho * u, rho * u * u + p, rho * u * v, (energy + p) * u])
    return np.array([rho * v, rho * u * v, rho * v * v + p, (energy + p) * v])


def quasilinear_at(axis: int, state: FluidState, thermo: ThermoPoint) -> np.ndarray:
    """Matrix B_axis of the nonconservative system dU/dt + B1 dU/dx1 + B2 dU/dx2 = 0."""
    _check_axis(axis, (1, 2))
    tau, c2, gt = thermo.tau, thermo.c2, thermo.gruneisen * thermo.T
    speed = state.u if axis == 1 else state.v
    matrix = speed * np.eye(4)
    row = axis
    matrix[0, row] = -tau
    matrix[row, 0] = -c2 / tau
    matrix[row, 3] = gt
    return matrix


def pressure_transform_at(state: FluidState, thermo: ThermoPoint) -> np.ndarray:
    """P(U) = (df0/dU)^-1, mapping conservative increments back to (tau, u, v, s)."""
    tau, u, v, T = thermo.tau, state.u, state.v, thermo.T
    kinetic = 0.5 * (u * u + v * v)
    return np.array([
        [-tau * tau, 0.0, 0.0, 0.0],
        [-tau * u, tau, 0.0, 0.0],
        [-tau * v, 0.0, tau, 0.0],
        [tau * tau / T * (thermo.rho * (kinetic - thermo.e) - thermo.p), -tau * u / T, -tau * v / T, tau / T],
    ])


def flux_jacobian_at(axis: int, state: FluidState, thermo: ThermoPoint) -> np.ndarray:
    """df_axis/dU, obtained by solving P df = B."""
    _check_axis(axis, (0, 1, 2))
    transform = pressure_transform_at(state, thermo)
    if not np.all(np.isfinite(transform)) or np.linalg.cond(transform) > CONDITION_LIMIT:
        raise SingularMatrixError(f"pressure transform is singular at tau={thermo.tau:.6g}, T={thermo.T:.6g}")
    rhs = np.eye(4) if axis == 0 else quasilinear_at(axis, state, thermo)
    try:
        return np.asarray(np.linalg.solve(transform, rhs))
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("pressure transform is singular") from exc


def flux(eos: EquationOfState, axis: int, state: FluidState) -> np.ndarray:
    return flux_at(axis, state, state_thermo(eos, state))


def flux_jacobian(eos: EquationOfState, axis: int, state: FluidState) -> np.ndarray:
    return flux_jacobian_at(axis, state, state_thermo(eos, state))


def pressure_transform(eos: EquationOfState, state: FluidState) -> np.ndarray:
    return pressure_transform_at(state, state_thermo(eos, state))


def characteristic_speeds(eos: EquationOfState, axis: int, state: FluidState) -> np.ndarray:
    """Sorted eigenvalues of P df_axis, the characteristic speeds along an axis."""
    thermo = state_thermo(eos, state)
    matrix = pressure_transform_at(state, thermo) @ flux_jacobian_at(axis, state, thermo)
    return np.sort(np.real(np.linalg.eigvals(matrix)))


def averaged_jacobian(
    eos: EquationOfState,
    axis: int,
    state1: FluidState,
    state3: FluidState,
    nodes: Optional[int] = None,
    tol: Optional[float] = None,
) -> np.ndarray:
    """Integral of df_axis along the segment from U3 to U1 by Gauss-Legendre quadrature.

    Node count doubles until A (U1 - U3) reproduces f(U1) - f(U3) within tol.
    """
    config = get_config()
    count = nodes or config.quadrature_nodes
    tol = config.quadrature_tol if tol is None else tol
    a, b = state3.as_array(), state1.as_array()
    jump = flux(eos, axis, state1) - flux(eos, axis, state3)
    scale = float(np.linalg.norm(jump)) + 1e3 * np.finfo(float).eps * float(np.linalg.norm(flux(eos, axis, state1)))

    while True:
        points, weights = leggauss(count)
        matrix = np.zeros((4, 4))
        for point, weight in zip(points, weights):
            node = FluidState.from_array(a + 0.5 * (point + 1.0) * (b - a))
            matrix += 0.5 * weight * flux_jacobian(eos, axis, node)
        error = float(np.linalg.norm(matrix @ (b - a) - jump)) / scale if scale > 0.0 else 0.0
        if error < tol or count >= MAX_QUADRATURE_NODES:
            break
        count *= 2

    if error >= tol:
        logger.warning(f"Averaged Jacobian residual {error:.3e} above tolerance with {count} nodes")
    return matrix
