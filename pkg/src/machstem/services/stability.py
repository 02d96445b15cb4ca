"""
Uniform / weak / violent classification of planar shocks and the two
independent routes to the critical tangential velocity of a weakly stable shock.
"""

import math
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from machstem.models.core import (
    DegenerateQuarticError,
    DomainError,
    FluidState,
    FrequencyPoint,
    MachStemError,
    NoAdmissibleRootError,
    NoRootInIntervalError,
    PlanarShock,
    Prop1Report,
    Prop1SweepReport,
    ScanRoot,
    StabilityClass,
    StabilityRegime,
    ThermoPoint,
    WeakStabilityWorksheet,
)
from machstem.services.normal_modes import lopatinskii, normalized_lopatinskii
from machstem.services.shock import build_shock
from machstem.utils.config import get_config
from machstem.utils.logging import get_logger
from machstem.utils.pool import map_ordered

logger = get_logger("stability")

BOUNDARY_TOL = 1e-12
ROOT_SELECTION_TOL = 1e-10
RELATION_TOL = 1e-6
PROP1_TOL = 1e-10
REAL_ROOT_TOL = 1e-8


def _check_triple(mach1: float, gruneisen1: float, nu: float) -> None:
    if not 0.0 < mach1 < 1.0:
        raise DomainError(f"downstream Mach number must lie in (0, 1), got {mach1}")
    if not gruneisen1 > 0.0:
        raise DomainError(f"Gruneisen coefficient must be positive, got {gruneisen1}")
    if not nu > 0.0:
        raise DomainError(f"compression nu must be positive, got {nu}")


def weak_window(mach1: float, gruneisen1: float) -> tuple[float, float]:
    """Bounds 1/(1+Gamma) and (1+M)/Gamma on M^2 nu."""
    return 1.0 / (1.0 + gruneisen1), (1.0 + mach1) / gruneisen1


def classify(mach1: float, gruneisen1: float, nu: float) -> StabilityRegime:
    """Place (M1, Gamma1, nu) in the stability trichotomy."""
    _check_triple(mach1, gruneisen1, nu)
    m2nu = mach1 * mach1 * nu
    lower, upper = weak_window(mach1, gruneisen1)
    lower_margin, upper_margin = m2nu - lower, upper - m2nu

    if abs(lower_margin) <= BOUNDARY_TOL * max(1.0, lower):
        regime = StabilityClass.LIMIT_GLANCING
    elif abs(upper_margin) <= BOUNDARY_TOL * max(1.0, upper):
        regime = StabilityClass.LIMIT_ONE_DIMENSIONAL
    elif lower_margin < 0.0:
        regime = StabilityClass.UNIFORM
    elif upper_margin < 0.0:
        regime = StabilityClass.VIOLENT
    else:
        regime = StabilityClass.WEAK
    return StabilityRegime(regime=regime, m2nu=m2nu, lower_margin=lower_margin, upper_margin=upper_margin)


def _real_quadratic_roots(a: float, b: float, c: float) -> list[float]:
    """Real roots of a X^2 + b X + c, linear fallback when a is negligible."""
    if abs(a) <= 1e-12 * max(abs(b), abs(c), 1.0):
        if abs(b) <= 1e-12 * max(abs(c), 1.0):
            raise DegenerateQuarticError("critical-velocity equation degenerates: both leading coefficients vanish")
        return [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        if disc < -1e-14 * b * b:
            return []
        disc = 0.0
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    if q == 0.0:
        return [0.0]
    return [q / a, c / q]


def solve_v(mach1: float, gruneisen1: float, nu: float, c1: float) -> tuple[float, WeakStabilityWorksheet]:
    """Critical tangential speed V from the characterization of weak stability."""
    regime = classify(mach1, gruneisen1, nu)
    if regime.regime is not StabilityClass.WEAK:
        raise NoAdmissibleRootError(f"shock is {regime.regime.value}, not weakly stable (M^2 nu = {regime.m2nu:.6g})")
    if not c1 > 0.0:
        raise DomainError("sound speed must be positive")

    m2 = mach1 * mach1
    v1 = -mach1 * c1
    v12 = v1 * v1
    k = 2.0 - m2 * gruneisen1 * nu
    km1 = k - 1.0
    a = km1 * km1 - m2
    b = (km1 * km1 + 1.0 - 2.0 * m2 - 2.0 * nu * (km1 + m2)) * v12
    c = v12 * v12 * (1.0 - m2) * (1.0 + nu) ** 2

    accepted: list[tuple[float, float]] = []
    for x in _real_quadratic_roots(a, b, c):
        glancing = c1 * c1 - v12
        if not x > glancing * (1.0 - ROOT_SELECTION_TOL):
            continue
        bound = v12 * (1.0 - m2) * (1.0 + nu)
        if not (1.0 + m2 - m2 * gruneisen1 * nu) * x < bound * (1.0 + ROOT_SELECTION_TOL):
            continue
        lhs = ((km1 + m2) * x - bound) ** 2
        rhs = k * k * x * (m2 * x - v12 * (1.0 - m2))
        residual = abs(lhs - rhs) / max(abs(lhs) + abs(rhs), np.finfo(float).tiny)
        accepted.append((residual, x))
    if not accepted or min(accepted)[0] > RELATION_TOL:
        raise NoAdmissibleRootError(f"no root of the critical-velocity equation passes the characterization at M={mach1}")

    V = math.sqrt(max(min(accepted)[1], 0.0))
    worksheet = _worksheet(mach1, gruneisen1, nu, c1, k, V)
    return V, worksheet


def _larger_angle_root(mach1: float, gruneisen1: float, nu: float) -> float:
    m2 = mach1 * mach1
    b = mach1 * gruneisen1
    c = -1.0 - gruneisen1 + (1.0 - m2) / (nu * m2)
    disc = b * b - 4.0 * c
    if disc < 0.0:
        raise NoRootInIntervalError(f"angle equation has no real root at M={mach1}, Gamma={gruneisen1}, nu={nu}")
    q = -0.5 * (b + math.sqrt(disc))
    phi = c / q if q != 0.0 else 0.0
    if not mach1 < phi < 1.0:
        raise NoRootInIntervalError(f"angle root {phi:.12g} lies outside ({mach1}, 1)")
    return phi


def c_star(mach1: float, gruneisen1: float, nu: float, c1: float) -> tuple[float, float, float]:
    """Critical speed from the front-angle route.

    Returns (c_star, phi, beta): phi is the larger root of the angle equation and
    beta the cosine of the weak-stability front angle.
    """
    _check_triple(mach1, gruneisen1, nu)
    phi = _larger_angle_root(mach1, gruneisen1, nu)
    m2 = mach1 * mach1
    beta = (2.0 * mach1 - (1.0 + m2) * phi) / (1.0 + m2 - 2.0 * mach1 * phi)
    return c1 * (1.0 - mach1 * beta) / math.sqrt(1.0 - beta * beta), phi, beta


def _worksheet(mach1: float, gruneisen1: float, nu: float, c1: float, k: float, V: float) -> WeakStabilityWorksheet:
    speed, phi, beta = c_star(mach1, gruneisen1, nu, c1)
    return WeakStabilityWorksheet(
        mach1=mach1,
        gruneisen1=gruneisen1,
        nu=nu,
        c1=c1,
        v1=-mach1 * c1,
        k=k,
        phi=phi,
        y=mach1 * phi,
        beta=beta,
        upsilon=-speed / c1,
        c_star=speed,
        V=V,
    )


def proposition1_check(mach1: float, gruneisen1: float, nu: float, c1: float = 1.0) -> Prop1Report:
    """Compare V from the characterization with c_star from the angle route."""
    V, _ = solve_v(mach1, gruneisen1, nu, c1)
    speed = c_star(mach1, gruneisen1, nu, c1)[0]
    gap = abs(speed - V) / V
    return Prop1Report(
        mach1=mach1, gruneisen1=gruneisen1, nu=nu, c1=c1, V=V, c_star=speed, gap=gap, passed=gap < PROP1_TOL
    )


def sample_weak_triples(samples: int, rng: np.random.Generator) -> list[tuple[float, float, float]]:
    """Uniform draws of (M1, Gamma1, nu) strictly inside the weak window."""
    triples = []
    for _ in range(samples):
        mach1 = float(rng.uniform(0.05, 0.95))
        gruneisen1 = float(rng.uniform(0.2, 10.0))
        lower, upper = weak_window(mach1, gruneisen1)
        width = upper - lower
        m2nu = float(rng.uniform(lower + 0.01 * width, upper - 0.01 * width))
        triples.append((mach1, gruneisen1, m2nu / (mach1 * mach1)))
    return triples


def _prop1_item(triple: tuple[float, float, float]) -> Prop1Report:
    return proposition1_check(*triple)


def prop1_sweep(samples: int = 1000, seed: Optional[int] = None, threads: Optional[int] = None) -> Prop1SweepReport:
    """Check both critical-speed routes on seeded random weak triples."""
    if samples < 1:
        raise DomainError("sample count must be positive")
    seed = get_config().seed if seed is None else seed
    triples = sample_weak_triples(samples, np.random.default_rng(seed))
    reports = map_ordered(_prop1_item, triples, threads)
    gaps = np.array([report.gap for report in reports])
    worst = reports[int(np.argmax(gaps))]
    failures = sum(1 for report in reports if not report.passed)
    if failures:
        logger.warning(f"{failures} of {samples} triples exceed the critical-speed tolerance")
    return Prop1SweepReport(
        samples=samples,
        seed=seed,
        min_gap=float(gaps.min()),
        max_gap=float(gaps.max()),
        median_gap=float(np.median(gaps)),
        failures=failures,
        worst=worst,
    )


def angle_polynomial(mach1: float, gruneisen1: float, nu: float, y: float) -> float:
    """Q(Y) = Y^2 + M^2 Gamma Y - M^2 (1 + Gamma) + (1 - M^2)/nu."""
    m2 = mach1 * mach1
    return y * y + m2 * gruneisen1 * y - m2 * (1.0 + gruneisen1) + (1.0 - m2) / nu


def intermediate_inequality(mach1: float, gruneisen1: float, nu: float) -> float:
    """Margin of y above (M^2 - 1 + nu M^2 (2 + Gamma)) / (nu (1 + M^2 + M^2 Gamma)); positive passes."""
    m2 = mach1 * mach1
    y = mach1 * c_star(mach1, gruneisen1, nu, 1.0)[1]
    bound = (m2 - 1.0 + nu * m2 * (2.0 + gruneisen1)) / (nu * (1.0 + m2 + m2 * gruneisen1))
    return y - bound


def relation_check(mach1: float, gruneisen1: float, nu: float, c1: float = 1.0) -> dict[str, float]:
    """Residuals of the intermediate identities along the angle route."""
    m2 = mach1 * mach1
    speed, phi, _ = c_star(mach1, gruneisen1, nu, c1)
    y = mach1 * phi
    v12 = m2 * c1 * c1
    relation1 = v12 * (1.0 - y) ** 2 / (m2 - y * y)
    a2 = 4.0 + nu * (1.0 - m2 - 2.0 * m2 * gruneisen1)
    a1 = -4.0 * (1.0 + m2) + nu * m2 * gruneisen1 * (3.0 + m2)
    a0 = (1.0 + m2) ** 2 - nu * m2 * (1.0 - m2) - nu * m2 * gruneisen1 * (1.0 + m2)
    q = angle_polynomial(mach1, gruneisen1, nu, y)
    return {
        "angle_polynomial": abs(q),
        "relation1": abs(speed * speed - relation1) / (speed * speed),
        "relation2": abs(nu * q * (a2 * y * y + a1 * y + a0)),
        "intermediate_margin": intermediate_inequality(mach1, gruneisen1, nu),
    }


def worksheet_from_shock(shock: PlanarShock) -> WeakStabilityWorksheet:
    """Worksheet of a concrete shock; NoAdmissibleRootError outside the weak regime."""
    return solve_v(shock.mach1, shock.thermo1.gruneisen, shock.nu, shock.thermo1.c)[1]


def realize_worksheet(
    mach1: float,
    gruneisen1: float,
    nu: float,
    c1: float = 1.0,
    tau1: float = 1.0,
    u_bar: float = 0.0,
) -> PlanarShock:
    """Planar shock consistent with the jump conditions for any (M1, Gamma1, nu).

    Only the values the linearized analysis reads are set; there is no equation
    of state behind the result.
    """
    _check_triple(mach1, gruneisen1, nu)
    if mach1 * mach1 * nu >= 1.0:
        raise DomainError("upstream pressure would be non-positive: M^2 nu must stay below 1")
    tau0 = tau1 * (1.0 + nu)
    j = mach1 * c1 / tau1
    v1, v0 = -mach1 * c1, -j * tau0
    p1 = c1 * c1 / tau1
    p0 = p1 - j * j * (tau0 - tau1)
    e1 = 2.0 * p1 * tau1
    e0 = e1 + 0.5 * (p1 + p0) * (tau1 - tau0)
    thermo1 = ThermoPoint(tau=tau1, s=0.0, e=e1, p=p1, T=1.0, c=c1, gruneisen=gruneisen1, rho=1.0 / tau1, G=1.0)
    thermo0 = ThermoPoint(
        tau=tau0, s=0.0, e=e0, p=p0, T=1.0, c=0.5 * abs(v0), gruneisen=gruneisen1, rho=1.0 / tau0, G=1.0
    )
    return build_shock(None, FluidState(tau0, u_bar, v0, 0.0), FluidState(tau1, u_bar, v1, 0.0), thermo0, thermo1)


def scan_real_roots(
    shock: PlanarShock,
    eta: float = 1.0,
    z_interval: Optional[tuple[float, float]] = None,
    grid_count: int = 2000,
) -> list[ScanRoot]:
    """Real zeros of the Lopatinskii determinant on an interval of z.

    Glancing points split the interval. Sign changes of the phase-aligned determinant
    locate roots on hyperbolic pieces; minima of |Delta| locate them on elliptic ones.
    """
    if eta <= 0.0:
        raise DomainError("eta must be positive")
    v1, c1 = shock.downstream.v, shock.thermo1.c
    root_k = math.sqrt(c1 * c1 - v1 * v1)
    scale = (c1 + abs(shock.u_bar)) * eta
    lo, hi = z_interval if z_interval is not None else (-5.0 * scale, 5.0 * scale)
    if not lo < hi:
        raise DomainError(f"empty scan interval ({lo}, {hi})")

    shrink = 1e-9 * scale
    glancing = sorted(-shock.u_bar * eta + sign * root_k * eta for sign in (-1.0, 1.0))
    cuts = [lo] + [g for g in glancing if lo < g < hi] + [hi]
    roots: list[ScanRoot] = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        a_in = a + shrink if a in glancing else a
        b_in = b - shrink if b in glancing else b
        if not a_in < b_in:
            continue
        count = max(16, int(grid_count * (b_in - a_in) / (hi - lo)))
        grid = np.linspace(a_in, b_in, count)
        zeta = 0.5 * (a_in + b_in) + shock.u_bar * eta
        if zeta * zeta - (c1 * c1 - v1 * v1) * eta * eta > 0.0:
            roots.extend(_hyperbolic_roots(shock, eta, grid))
        else:
            roots.extend(_elliptic_roots(shock, eta, grid))

    roots.sort(key=lambda root: root.z)
    unique: list[ScanRoot] = []
    for root in roots:
        if not unique or abs(root.z - unique[-1].z) > 1e-9 * scale:
            unique.append(root)
    logger.debug(f"Real-root scan on [{lo:.4g}, {hi:.4g}] found {len(unique)} roots")
    return unique


def _hyperbolic_roots(shock: PlanarShock, eta: float, grid: np.ndarray) -> list[ScanRoot]:
    values = np.array([lopatinskii(shock, FrequencyPoint(complex(z), eta)) for z in grid])
    phase = 0.5 * np.angle(np.sum(values * values))

    def proxy(z: float) -> float:
        return float((lopatinskii(shock, FrequencyPoint(complex(z), eta)) * np.exp(-1j * phase)).real)

    signs = (values * np.exp(-1j * phase)).real
    found = []
    for i in range(len(grid) - 1):
        if signs[i] == 0.0:
            found.append(ScanRoot(z=float(grid[i]), normalized_abs=0.0, method="grid"))
        elif signs[i] * signs[i + 1] < 0.0:
            z = float(brentq(proxy, grid[i], grid[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps))
            found.append(ScanRoot(z=z, normalized_abs=normalized_lopatinskii(shock, FrequencyPoint(complex(z), eta)),
                                  method="brentq"))
    return found


def _elliptic_roots(shock: PlanarShock, eta: float, grid: np.ndarray) -> list[ScanRoot]:
    def magnitude(z: float) -> float:
        return normalized_lopatinskii(shock, FrequencyPoint(complex(z), eta))

    values = [magnitude(float(z)) for z in grid]
    found = []
    for i in range(1, len(grid) - 1):
        if values[i] <= values[i - 1] and values[i] <= values[i + 1]:
            try:
                result = minimize_scalar(magnitude, bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                                         options={"xatol": 1e-13})
            except MachStemError:
                continue
            if result.fun < REAL_ROOT_TOL:
                found.append(ScanRoot(z=float(result.x), normalized_abs=float(result.fun), method="minimize"))
    return found
