"""
Planar shocks: Rankine-Hugoniot residuals, Lax margins and downstream solves.

The upstream state sits above the front x2 = 0 and flows downward (v0 < 0).
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Iterator, Optional, Sequence

import numpy as np

from machstem.models.core import (
    AdmissibilityError,
    ConvergenceError,
    DomainError,
    FluidState,
    LaxMargins,
    MachStemError,
    PlanarShock,
    ShockStrength,
    StrengthKind,
    ThermoPoint,
)
from machstem.numerics.newton import damped_newton
from machstem.services.eos import EquationOfState, state_thermo, thermo_eval
from machstem.services.flux import flux, flux_at
from machstem.utils.logging import get_logger

logger = get_logger("shock")

PRESSURE_STEP = 1.5
MIN_PRESSURE_STEP = 1.0 + 1e-6
TAU_STEP = 0.01
MAX_PRESSURE_RATIO = 1e8
RH_TOLERANCE = 1e-12


def rh_residual(eos: EquationOfState, state_a: FluidState, state_b: FluidState, angle: float) -> np.ndarray:
    """sin(angle) [f1] + cos(angle) [f2] with [f] = f(Ub) - f(Ua)."""
    jump1 = flux(eos, 1, state_b) - flux(eos, 1, state_a)
    jump2 = flux(eos, 2, state_b) - flux(eos, 2, state_a)
    return math.sin(angle) * jump1 + math.cos(angle) * jump2


def front_residual_at(
    state_a: FluidState,
    thermo_a: ThermoPoint,
    state_b: FluidState,
    thermo_b: ThermoPoint,
    theta: float,
) -> np.ndarray:
    """Jump conditions across a front whose direction makes angle theta with the x1 axis."""
    jump1 = flux_at(1, state_b, thermo_b) - flux_at(1, state_a, thermo_a)
    jump2 = flux_at(2, state_b, thermo_b) - flux_at(2, state_a, thermo_a)
    return -math.sin(theta) * jump1 + math.cos(theta) * jump2


def front_residual(eos: EquationOfState, state_a: FluidState, state_b: FluidState, theta: float) -> np.ndarray:
    return front_residual_at(state_a, state_thermo(eos, state_a), state_b, state_thermo(eos, state_b), theta)


def residual_scale_at(
    state_a: FluidState,
    thermo_a: ThermoPoint,
    state_b: FluidState,
    thermo_b: ThermoPoint,
) -> np.ndarray:
    """Componentwise flux magnitude used to make jump residuals dimensionless."""
    total = np.zeros(4)
    for state, thermo in ((state_a, thermo_a), (state_b, thermo_b)):
        total += np.abs(flux_at(1, state, thermo)) + np.abs(flux_at(2, state, thermo))
    return np.maximum(total, np.finfo(float).tiny)


def scaled_front_residual(eos: EquationOfState, state_a: FluidState, state_b: FluidState, theta: float) -> float:
    """Max-norm of the front residual relative to the flux magnitudes on both sides."""
    thermo_a, thermo_b = state_thermo(eos, state_a), state_thermo(eos, state_b)
    residual = front_residual_at(state_a, thermo_a, state_b, thermo_b, theta)
    return float(np.max(np.abs(residual) / residual_scale_at(state_a, thermo_a, state_b, thermo_b)))


def lax_margins_at(
    state_a: FluidState,
    thermo_a: ThermoPoint,
    state_b: FluidState,
    thermo_b: ThermoPoint,
    normal: Sequence[float],
) -> LaxMargins:
    """Normal Mach numbers -u.n/c on both sides; normal points toward the upstream side."""
    n = np.asarray(normal, dtype=float)
    return LaxMargins(
        upstream_mach=float(-state_a.velocity @ n / thermo_a.c),
        downstream_mach=float(-state_b.velocity @ n / thermo_b.c),
    )


def lax_margins(eos: EquationOfState, state_a: FluidState, state_b: FluidState, normal: Sequence[float]) -> LaxMargins:
    return lax_margins_at(state_a, state_thermo(eos, state_a), state_b, state_thermo(eos, state_b), normal)


def acoustic_front_angles(u: float, v: float, c: float) -> tuple[float, float]:
    """Directions of the two fronts through which (u, v) has normal Mach number one.

    Returns (causal, rejected) angles in [0, 2 pi); the causal one has the smaller cosine.
    """
    speed2 = u * u + v * v
    excess = speed2 - c * c
    if excess <= 0.0:
        raise DomainError(f"flow is not supersonic: |u|^2 - c^2 = {excess:.6g}")
    root = math.sqrt(excess)
    angles = []
    for sign in (1.0, -1.0):
        cosine = (-c * v + sign * u * root) / speed2
        sine = (c * u + sign * v * root) / speed2
        angles.append((cosine, math.atan2(sine, cosine) % (2.0 * math.pi)))
    angles.sort()
    return angles[0][1], angles[1][1]


def _hugoniot(thermo0: ThermoPoint, thermo: ThermoPoint) -> float:
    return thermo.e - thermo0.e + 0.5 * (thermo.p + thermo0.p) * (thermo.tau - thermo0.tau)


def _hugoniot_gradient(thermo0: ThermoPoint, thermo: ThermoPoint) -> np.ndarray:
    """Partial derivatives of the Hugoniot function in (tau, s)."""
    p_tau = -thermo.c2 / thermo.tau**2
    p_s = thermo.gruneisen * thermo.T / thermo.tau
    d_tau = thermo.tau - thermo0.tau
    return np.array([0.5 * (thermo0.p - thermo.p) + 0.5 * p_tau * d_tau, thermo.T + 0.5 * p_s * d_tau])


def _pressure_gradient(thermo: ThermoPoint) -> np.ndarray:
    return np.array([-thermo.c2 / thermo.tau**2, thermo.gruneisen * thermo.T / thermo.tau])


class _HugoniotSolver:
    """Newton solves on the Hugoniot locus through one upstream thermodynamic point."""

    def __init__(self, eos: EquationOfState, thermo0: ThermoPoint) -> None:
        self.eos = eos
        self.thermo0 = thermo0
        self.x_scale = np.array([thermo0.tau, eos.cv])
        self.energy_scale = abs(thermo0.e) + thermo0.p * thermo0.tau

    def solve(self, kind: StrengthKind, target: float, seed: np.ndarray) -> np.ndarray:
        thermo0 = self.thermo0

        def constraint(thermo: ThermoPoint) -> tuple[float, np.ndarray]:
            if kind is StrengthKind.TAU1:
                return thermo.tau - target, np.array([1.0, 0.0])
            if kind is StrengthKind.PRESSURE_RATIO:
                return thermo.p - target, _pressure_gradient(thermo)
            value = thermo.p - thermo0.p - target * target * (thermo0.tau - thermo.tau)
            return value, _pressure_gradient(thermo) + np.array([target * target, 0.0])

        def residual(x: np.ndarray) -> np.ndarray:
            thermo = thermo_eval(self.eos, float(x[0]), float(x[1]))
            return np.array([constraint(thermo)[0], _hugoniot(thermo0, thermo)])

        def jacobian(x: np.ndarray) -> np.ndarray:
            thermo = thermo_eval(self.eos, float(x[0]), float(x[1]))
            return np.vstack([constraint(thermo)[1], _hugoniot_gradient(thermo0, thermo)])

        if kind is StrengthKind.TAU1:
            f_scale = np.array([thermo0.tau, self.energy_scale])
        elif kind is StrengthKind.PRESSURE_RATIO:
            f_scale = np.array([target, self.energy_scale])
        else:
            f_scale = np.array([thermo0.p + target * target * thermo0.tau, self.energy_scale])
        result = damped_newton(
            residual, jacobian, seed, x_scale=self.x_scale, f_scale=f_scale, label=f"hugoniot[{kind.value}]"
        )
        return result.x

    def acoustic_seed(self, pressure: float) -> np.ndarray:
        t0 = self.thermo0
        return np.array([t0.tau - (pressure - t0.p) * t0.tau**2 / t0.c2, t0.s])

    def pressure_path(self, targets: Sequence[float]) -> list[np.ndarray]:
        """Solutions at the pressure targets, in the order given.

        The march itself runs through the targets in increasing order, continuing from each solution.
        """
        points: list[np.ndarray] = [np.empty(0)] * len(targets)
        history: list[tuple[float, np.ndarray]] = [(math.log(self.thermo0.p), np.array([self.thermo0.tau, self.thermo0.s]))]
        for index in sorted(range(len(targets)), key=lambda k: targets[k]):
            history = self.march_pressure(history, targets[index])
            points[index] = history[-1][1]
        return points

    def march_pressure(self, history: list[tuple[float, np.ndarray]], target: float) -> list[tuple[float, np.ndarray]]:
        factor = PRESSURE_STEP
        log_target = math.log(target)
        while history[-1][0] < log_target - 1e-15:
            log_p = min(log_target, history[-1][0] + math.log(factor))
            seed = self._extrapolate(history, log_p)
            try:
                x = self.solve(StrengthKind.PRESSURE_RATIO, math.exp(log_p), seed)
            except MachStemError:
                factor = 1.0 + 0.5 * (factor - 1.0)
                if factor < MIN_PRESSURE_STEP:
                    raise
                continue
            history = (history + [(log_p, x)])[-2:]
            factor = min(PRESSURE_STEP, 1.0 + 2.0 * (factor - 1.0))
        return history

    def _extrapolate(self, history: list[tuple[float, np.ndarray]], log_p: float) -> np.ndarray:
        if len(history) < 2:
            return self.acoustic_seed(math.exp(log_p))
        (l0, x0), (l1, x1) = history[-2], history[-1]
        return x1 + (x1 - x0) * (log_p - l1) / (l1 - l0)

    def tau_path(self, targets: Sequence[float]) -> Iterator[np.ndarray]:
        """Continue in tau from tau0 down through decreasing targets in steps of TAU_STEP tau0."""
        step = TAU_STEP * self.thermo0.tau
        history = [np.array([self.thermo0.tau, self.thermo0.s])]
        for target in sorted(targets, reverse=True):
            while history[-1][0] > target + 1e-15 * self.thermo0.tau:
                tau = max(target, history[-1][0] - step)
                if len(history) >= 2:
                    x0, x1 = history[-2], history[-1]
                    seed = x1 + (x1 - x0) * (tau - x1[0]) / (x1[0] - x0[0])
                else:
                    seed = np.array([tau, self.thermo0.s])
                history = (history + [self.solve(StrengthKind.TAU1, tau, seed)])[-2:]
            yield history[-1]


def build_shock(eos: Optional[EquationOfState], upstream: FluidState, downstream: FluidState,
                thermo0: Optional[ThermoPoint] = None, thermo1: Optional[ThermoPoint] = None) -> PlanarShock:
    """Assemble a PlanarShock from both states, deriving j, M1 and nu."""
    if thermo0 is None or thermo1 is None:
        if eos is None:
            raise DomainError("thermodynamic points are required when no EOS is given")
        thermo0, thermo1 = state_thermo(eos, upstream), state_thermo(eos, downstream)
    if not downstream.tau < upstream.tau:
        raise AdmissibilityError("shock must compress: tau1 < tau0")
    mass_flux = math.sqrt((thermo1.p - thermo0.p) / (upstream.tau - downstream.tau)) if thermo1.p > thermo0.p else 0.0
    return PlanarShock(
        eos=eos,
        upstream=upstream,
        downstream=downstream,
        thermo0=thermo0,
        thermo1=thermo1,
        mass_flux=mass_flux,
        u_bar=upstream.u,
        mach1=-downstream.v / thermo1.c,
        nu=upstream.tau / downstream.tau - 1.0,
    )


def _shock_from_point(eos: EquationOfState, upstream: FluidState, thermo0: ThermoPoint, x: np.ndarray) -> PlanarShock:
    thermo1 = thermo_eval(eos, float(x[0]), float(x[1]))
    if not thermo1.p > thermo0.p:
        raise AdmissibilityError(f"downstream pressure {thermo1.p:.6g} does not exceed upstream {thermo0.p:.6g}")
    if not thermo1.tau < thermo0.tau:
        raise AdmissibilityError("shock must compress: tau1 < tau0")
    j = math.sqrt((thermo1.p - thermo0.p) / (thermo0.tau - thermo1.tau))
    up = FluidState(upstream.tau, upstream.u, -j * upstream.tau, upstream.s)
    down = FluidState(thermo1.tau, upstream.u, -j * thermo1.tau, thermo1.s)
    shock = build_shock(eos, up, down, thermo0, thermo1)

    margins = lax_margins_at(up, thermo0, down, thermo1, (0.0, 1.0))
    if not margins.passed:
        raise AdmissibilityError(
            f"Lax inequalities fail: upstream {margins.upstream_mach:.6g}, downstream {margins.downstream_mach:.6g}"
        )
    residual = scaled_front_residual(eos, up, down, 0.0)
    if residual > RH_TOLERANCE:
        raise ConvergenceError(f"planar jump residual {residual:.3e} above tolerance")
    return shock


def _prepare_upstream(eos: EquationOfState, upstream: FluidState) -> ThermoPoint:
    if upstream.u > 0.0:
        raise DomainError(f"tangential velocity must be non-positive, got {upstream.u}")
    if not upstream.v < 0.0:
        raise DomainError(f"upstream must flow toward the front (v0 < 0), got {upstream.v}")
    return thermo_eval(eos, upstream.tau, upstream.s)


def solve_downstream(eos: EquationOfState, upstream: FluidState, strength: ShockStrength) -> PlanarShock:
    """Solve the planar jump conditions for the downstream state.

    The upstream normal velocity is reset to -j tau0 once the mass flux is known.
    """
    thermo0 = _prepare_upstream(eos, upstream)
    solver = _HugoniotSolver(eos, thermo0)
    value = strength.value
    if strength.kind is StrengthKind.PRESSURE_RATIO:
        if not value > 1.0:
            raise AdmissibilityError(f"pressure ratio must exceed 1, got {value}")
        if value > MAX_PRESSURE_RATIO:
            raise DomainError(f"pressure ratio {value} is outside the supported range")
        x = solver.pressure_path([value * thermo0.p])[-1]
    elif strength.kind is StrengthKind.TAU1:
        if not 0.0 < value < upstream.tau:
            raise AdmissibilityError(f"tau1 must lie in (0, tau0), got {value}")
        x = list(solver.tau_path([value]))[-1]
    else:
        x = _mass_flux_point(solver, thermo0, value)
    shock = _shock_from_point(eos, upstream, thermo0, x)
    logger.debug(f"Shock solved: tau1={shock.downstream.tau:.10g}, j={shock.mass_flux:.10g}, M1={shock.mach1:.6g}")
    return shock


def _mass_flux_point(solver: _HugoniotSolver, thermo0: ThermoPoint, j: float) -> np.ndarray:
    acoustic = thermo0.c / thermo0.tau
    if not j > acoustic:
        raise AdmissibilityError(f"mass flux {j:.6g} does not exceed the acoustic value {acoustic:.6g}")
    history = [(math.log(thermo0.p), np.array([thermo0.tau, thermo0.s]))]
    pressure = thermo0.p
    while True:
        pressure *= PRESSURE_STEP
        if pressure > MAX_PRESSURE_RATIO * thermo0.p:
            raise ConvergenceError(f"mass flux {j:.6g} not reached along the Hugoniot")
        history = solver.march_pressure(history, pressure)
        x = history[-1][1]
        thermo = thermo_eval(solver.eos, float(x[0]), float(x[1]))
        if (thermo.p - thermo0.p) / (thermo0.tau - thermo.tau) >= j * j:
            return solver.solve(StrengthKind.MASS_FLUX, j, x)


def hugoniot_tau_path(
    eos: EquationOfState,
    upstream: FluidState,
    taus: Sequence[float],
    partial: bool = False,
) -> list[PlanarShock]:
    """Shocks at the given tau1 values, continued from tau0 in decreasing order.

    With partial=True the path stops quietly at the first failure and returns the
    shocks solved so far.
    """
    thermo0 = _prepare_upstream(eos, upstream)
    shocks: list[PlanarShock] = []
    try:
        for x in _HugoniotSolver(eos, thermo0).tau_path(taus):
            shocks.append(_shock_from_point(eos, upstream, thermo0, x))
    except MachStemError as exc:
        if not partial:
            raise
        logger.debug(f"Hugoniot path stopped after {len(shocks)} shocks: {exc.message}")
    return shocks


def hugoniot_sweep(eos: EquationOfState, upstream: FluidState, ratios: Sequence[float]) -> list[PlanarShock]:
    """Shocks at the given pressure ratios, returned in input order.

    The solves are continued through the ratios in increasing order.
    """
    if any(not r > 1.0 for r in ratios):
        raise AdmissibilityError("pressure ratios must exceed 1")
    thermo0 = _prepare_upstream(eos, upstream)
    points = _HugoniotSolver(eos, thermo0).pressure_path([r * thermo0.p for r in ratios])
    return [_shock_from_point(eos, upstream, thermo0, x) for x in points]


def galilean_shift(shock: PlanarShock, u_bar: float) -> PlanarShock:
    """Same shock with tangential velocity u_bar on both sides; any sign is accepted."""
    return replace(
        shock,
        upstream=replace(shock.upstream, u=u_bar),
        downstream=replace(shock.downstream, u=u_bar),
        u_bar=u_bar,
    )
