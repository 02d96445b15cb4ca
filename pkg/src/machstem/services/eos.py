"""
Complete equations of state e(tau, s) and their thermodynamic consequences.
Closed-form derivatives per variant; Bethe-Weyl admissibility checks.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Any, ClassVar, Sequence

import numpy as np
import orjson

from machstem.models.core import (
    BetheWeylReport,
    DomainError,
    FluidState,
    MachStemError,
    ThermoPoint,
    WeakRegimeCandidate,
    WeakRegimeSearch,
)
from machstem.utils.logging import get_logger

logger = get_logger("eos")

INEQUALITIES = (
    "p_positive",
    "T_positive",
    "e_tautau_positive",
    "e_taus_negative",
    "e_tautautau_negative",
)


@dataclass(frozen=True)
class EnergyDerivatives:
    """e and the partial derivatives the package needs."""
    e: float
    e_tau: float
    e_s: float
    e_tautau: float
    e_taus: float
    e_tautautau: float

    def inequalities(self) -> dict[str, bool]:
        """Bethe-Weyl sign conditions at this point."""
        return {
            "p_positive": -self.e_tau > 0.0,
            "T_positive": self.e_s > 0.0,
            "e_tautau_positive": self.e_tautau > 0.0,
            "e_taus_negative": self.e_taus < 0.0,
            "e_tautautau_negative": self.e_tautautau < 0.0,
        }


class EquationOfState(ABC):
    """Complete equation of state in the (tau, s) variables."""
    kind: ClassVar[str]
    cv: float

    @abstractmethod
    def energy_derivatives(self, tau: float, s: float) -> EnergyDerivatives:
        """Closed-form e and derivatives at (tau, s)."""

    @abstractmethod
    def to_spec(self) -> dict[str, Any]:
        """JSON document describing this EOS."""


@dataclass(frozen=True)
class IdealPolytropic(EquationOfState):
    """Polytropic gas: e = e_ref (tau/tau_ref)^(1-gamma) exp((s-s_ref)/cv)."""
    kind: ClassVar[str] = "ideal"
    gamma: float
    cv: float
    tau_ref: float = 1.0
    s_ref: float = 0.0
    e_ref: float = 1.0

    def __post_init__(self) -> None:
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must exceed 1, got {self.gamma}")
        for name in ("cv", "tau_ref", "e_ref"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be positive")

    def energy_derivatives(self, tau: float, s: float) -> EnergyDerivatives:
        g = self.gamma - 1.0
        e = self.e_ref * (tau / self.tau_ref) ** (-g) * math.exp((s - self.s_ref) / self.cv)
        return EnergyDerivatives(
            e=e,
            e_tau=-g * e / tau,
            e_s=e / self.cv,
            e_tautau=g * self.gamma * e / tau**2,
            e_taus=-g * e / (tau * self.cv),
            e_tautautau=-g * self.gamma * (self.gamma + 1.0) * e / tau**3,
        )

    def to_spec(self) -> dict[str, Any]:
        return {
            "type": self.kind,
            "gamma": self.gamma,
            "cv": self.cv,
            "tau_ref": self.tau_ref,
            "s_ref": self.s_ref,
            "e_ref": self.e_ref,
        }


@dataclass(frozen=True)
class ConstantGruneisen(EquationOfState):
    """Constant Gruneisen coefficient with a power-law cold curve.

    e = A x^(-G0) exp((s-s_ref)/cv) + K x^(1-n)/(n-1), x = tau/tau_ref.
    """
    kind: ClassVar[str] = "mie_gruneisen"
    gruneisen: float
    cv: float
    thermal_amplitude: float
    cold_stiffness: float
    cold_exponent: float
    tau_ref: float = 1.0
    s_ref: float = 0.0

    def __post_init__(self) -> None:
        if not self.gruneisen > 0.0:
            raise DomainError("gruneisen must be positive")
        if not self.cv > 0.0 or not self.tau_ref > 0.0:
            raise DomainError("cv and tau_ref must be positive")
        if self.cold_stiffness < 0.0:
            raise DomainError("cold_stiffness must be non-negative")
        if not self.cold_exponent > 1.0:
            raise DomainError("cold_exponent must exceed 1")

    def energy_derivatives(self, tau: float, s: float) -> EnergyDerivatives:
        g0, n, k, t_ref = self.gruneisen, self.cold_exponent, self.cold_stiffness, self.tau_ref
        x = tau / t_ref
        thermal = self.thermal_amplitude * x ** (-g0) * math.exp((s - self.s_ref) / self.cv)
        cold = k * x ** (1.0 - n) / (n - 1.0)
        return EnergyDerivatives(
            e=thermal + cold,
            e_tau=-g0 * thermal / tau - k * x ** (-n) / t_ref,
            e_s=thermal / self.cv,
            e_tautau=g0 * (g0 + 1.0) * thermal / tau**2 + n * k * x ** (-n - 1.0) / t_ref**2,
            e_taus=-g0 * thermal / (tau * self.cv),
            e_tautautau=(
                -g0 * (g0 + 1.0) * (g0 + 2.0) * thermal / tau**3
                - n * (n + 1.0) * k * x ** (-n - 2.0) / t_ref**3
            ),
        )

    def to_spec(self) -> dict[str, Any]:
        return {
            "type": self.kind,
            "gruneisen": self.gruneisen,
            "cv": self.cv,
            "thermal_amplitude": self.thermal_amplitude,
            "cold_stiffness": self.cold_stiffness,
            "cold_exponent": self.cold_exponent,
            "tau_ref": self.tau_ref,
            "s_ref": self.s_ref,
        }


def thermo_eval(eos: EquationOfState, tau: float, s: float, check: bool = True) -> ThermoPoint:
    """All derived quantities at (tau, s); raises DomainError on a Bethe-Weyl failure."""
    if not tau > 0.0 or not math.isfinite(tau) or not math.isfinite(s):
        raise DomainError(f"specific volume must be positive and finite, got tau={tau}")
    d = eos.energy_derivatives(tau, s)
    if check:
        failed = [name for name, ok in d.inequalities().items() if not ok]
        if failed:
            raise DomainError(f"Bethe-Weyl inequalities fail at tau={tau:.6g}, s={s:.6g}: {', '.join(failed)}")
    T = d.e_s
    return ThermoPoint(
        tau=tau,
        s=s,
        e=d.e,
        p=-d.e_tau,
        T=T,
        c=math.sqrt(max(tau * tau * d.e_tautau, 0.0)),
        gruneisen=-tau * d.e_taus / T if T != 0.0 else math.nan,
        rho=1.0 / tau,
        G=-0.5 * tau * d.e_tautautau / d.e_tautau if d.e_tautau != 0.0 else math.nan,
    )


def state_thermo(eos: EquationOfState, state: FluidState) -> ThermoPoint:
    return thermo_eval(eos, state.tau, state.s)


def bethe_weyl_report(
    eos: EquationOfState,
    tau_range: tuple[float, float],
    s_range: tuple[float, float],
    grid_counts: tuple[int, int],
) -> BetheWeylReport:
    """Per-inequality pass/fail over a uniform (tau, s) grid."""
    if not 0.0 < tau_range[0] < tau_range[1]:
        raise DomainError(f"tau range must satisfy 0 < a < b, got {tau_range}")
    if not s_range[0] < s_range[1]:
        raise DomainError(f"s range must satisfy a < b, got {s_range}")
    if min(grid_counts) < 2:
        raise DomainError("grid counts must be at least 2 in each direction")

    counts = {name: 0 for name in INEQUALITIES}
    first: dict[str, list[float]] = {}
    for tau in np.linspace(tau_range[0], tau_range[1], grid_counts[0]):
        for s in np.linspace(s_range[0], s_range[1], grid_counts[1]):
            for name, ok in eos.energy_derivatives(float(tau), float(s)).inequalities().items():
                if not ok:
                    counts[name] += 1
                    first.setdefault(name, [float(tau), float(s)])

    checks = {name: counts[name] == 0 for name in INEQUALITIES}
    passed = all(checks.values())
    if not passed:
        logger.info(f"Bethe-Weyl report: failing inequalities {sorted(first)}")
    return BetheWeylReport(
        tau_range=(float(tau_range[0]), float(tau_range[1])),
        s_range=(float(s_range[0]), float(s_range[1])),
        grid_counts=(int(grid_counts[0]), int(grid_counts[1])),
        checks=checks,
        failure_counts=counts,
        first_failure=first,
        passed=passed,
    )


def find_weak_regime(
    eos: EquationOfState,
    tau0_range: tuple[float, float],
    s0_range: tuple[float, float],
    ratio_range: tuple[float, float],
    grid: Sequence[int] = (3, 3, 16),
) -> WeakRegimeSearch:
    """Search upstream states and compressions tau1/tau0 for a weakly stable shock.

    Returns the candidate with the widest margin inside the weak window, or the
    closest miss with found=False.
    """
    from machstem.services.shock import hugoniot_tau_path
    from machstem.services.stability import classify

    if not 0.0 < ratio_range[0] < ratio_range[1] < 1.0:
        raise DomainError(f"compression ratio range must satisfy 0 < a < b < 1, got {ratio_range}")
    if not 0.0 < tau0_range[0] <= tau0_range[1] or s0_range[0] > s0_range[1]:
        raise DomainError("upstream box is empty")
    if len(grid) != 3 or min(grid) < 1:
        raise DomainError("grid must hold three positive counts")

    ratios = np.linspace(ratio_range[1], ratio_range[0], grid[2])
    best: WeakRegimeCandidate | None = None
    evaluated = 0
    for tau0 in np.linspace(tau0_range[0], tau0_range[1], grid[0]):
        for s0 in np.linspace(s0_range[0], s0_range[1], grid[1]):
            upstream = FluidState(float(tau0), 0.0, -1.0, float(s0))
            thermo_eval(eos, upstream.tau, upstream.s)
            try:
                shocks = hugoniot_tau_path(eos, upstream, [float(r * tau0) for r in ratios], partial=True)
            except MachStemError as exc:
                logger.debug(f"Hugoniot path from tau0={tau0:.4g}, s0={s0:.4g} stopped: {exc.message}")
                continue
            for shock in shocks:
                evaluated += 1
                regime = classify(shock.mach1, shock.thermo1.gruneisen, shock.nu)
                candidate = WeakRegimeCandidate(
                    upstream=FluidState(shock.upstream.tau, 0.0, shock.upstream.v, shock.upstream.s),
                    tau1=shock.downstream.tau,
                    mach1=shock.mach1,
                    gruneisen1=shock.thermo1.gruneisen,
                    nu=shock.nu,
                    m2nu=regime.m2nu,
                    lower_bound=regime.m2nu - regime.lower_margin,
                    upper_bound=regime.m2nu + regime.upper_margin,
                )
                if best is None or candidate.margin > best.margin:
                    best = candidate

    found = best is not None and best.margin > 0.0
    logger.info(f"Weak-regime search: {evaluated} shocks evaluated, found={found}")
    return WeakRegimeSearch(
        found=found,
        candidate=best if found else None,
        best=best,
        best_margin=best.margin if best is not None else -math.inf,
        evaluated=evaluated,
    )


def eos_from_spec(spec: dict[str, Any]) -> EquationOfState:
    """Build an EOS from its validated JSON document."""
    from machstem.models.documents import EOS_ADAPTER, IdealEosDocument

    document = EOS_ADAPTER.validate_python(spec)
    if isinstance(document, IdealEosDocument):
        return IdealPolytropic(
            gamma=document.gamma,
            cv=document.cv,
            tau_ref=document.tau_ref,
            s_ref=document.s_ref,
            e_ref=document.e_ref,
        )
    return ConstantGruneisen(
        gruneisen=document.gruneisen,
        cv=document.cv,
        thermal_amplitude=document.thermal_amplitude,
        cold_stiffness=document.cold_stiffness,
        cold_exponent=document.cold_exponent,
        tau_ref=document.tau_ref,
        s_ref=document.s_ref,
    )


def load_eos(path: str | Path) -> EquationOfState:
    """Read an EOS document from disk."""
    raw = orjson.loads(Path(path).read_bytes())
    if isinstance(raw, dict) and "payload" in raw and "kind" in raw:
        raw = raw["payload"]
    return eos_from_spec(raw)
