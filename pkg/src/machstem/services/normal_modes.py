"""
Normal-mode analysis of a planar shock: eigenmodes of the downstream interior
symbol, the stable subspace, the Lopatinskii determinant and the linearized
jump conditions at the weak-stability point.

Frequencies follow the convention Im z <= 0 for growing modes.
"""

import math
from typing import Optional

import numpy as np

from machstem.models.core import (
    CoincidenceError,
    ConvergenceError,
    DomainError,
    FrequencyPoint,
    GlancingError,
    LinearizedRhSolution,
    ModeDecomposition,
    NotWeaklyStableError,
    PlanarShock,
)
from machstem.services.flux import flux_at, flux_jacobian_at
from machstem.services.shock import acoustic_front_angles
from machstem.utils.logging import get_logger

logger = get_logger("normal_modes")

GLANCING_TOL = 1e-12
COINCIDENCE_TOL = 1e-10
OFFSET_AGREEMENT = 1e-10
MAX_OFFSET_HALVINGS = 40
WEAK_ZERO_TOL = 1e-8
MAX_SUBDIVISION = 24


def _quadratic_roots(a: complex, b: complex, c: complex) -> tuple[complex, complex]:
    """Both roots of a w^2 + b w + c with the cancellation-free q formula."""
    root = complex(np.sqrt(complex(b * b - 4.0 * a * c)))
    if (b.conjugate() * root).real < 0.0:
        root = -root
    q = -0.5 * (b + root)
    if q == 0:
        return 0j, 0j
    return q / a, c / q


def _acoustic_roots(shock: PlanarShock, z: complex, eta: float) -> tuple[complex, complex]:
    v1, c2 = shock.downstream.v, shock.thermo1.c2
    zeta = z + shock.u_bar * eta
    return _quadratic_roots(complex(v1 * v1 - c2), complex(2.0 * v1 * zeta), complex(zeta * zeta - c2 * eta * eta))


def _stable_root(shock: PlanarShock, z: complex, eta: float) -> tuple[complex, bool]:
    """Acoustic root continued from Im z < 0; the flag marks a hyperbolic point."""
    v1, c2 = shock.downstream.v, shock.thermo1.c2
    zeta = z + shock.u_bar * eta
    k = c2 - v1 * v1

    if z.imag < 0.0:
        return min(_acoustic_roots(shock, z, eta), key=lambda w: w.imag), False

    if z.imag > 0.0:
        raise DomainError("frequencies must satisfy Im z <= 0")

    discriminant = (zeta * zeta - k * eta * eta).real
    if abs(discriminant) <= GLANCING_TOL * (abs(zeta) ** 2 + k * eta * eta):
        raise GlancingError(f"acoustic roots collide at z={z.real:.12g}, eta={eta:.6g}")
    if discriminant < 0.0:
        return min(_acoustic_roots(shock, z, eta), key=lambda w: w.imag), False

    # Hyperbolic point: follow the root that leaves the lower half-plane, halving the
    # offset gamma below the real axis until consecutive roots agree.
    scale = max(abs(z) + abs(shock.u_bar * eta), math.sqrt(c2) * abs(eta))
    gamma = 1e-8 * scale
    previous: Optional[complex] = None
    for _ in range(MAX_OFFSET_HALVINGS):
        shifted = min(_acoustic_roots(shock, z - 1j * gamma, eta), key=lambda w: w.imag)
        if previous is not None and abs(shifted - previous) <= OFFSET_AGREEMENT * max(abs(shifted), 1.0):
            break
        previous = shifted
        gamma *= 0.5
    else:
        raise ConvergenceError(
            f"stable root at z={z.real:.12g}, eta={eta:.6g} did not settle in {MAX_OFFSET_HALVINGS} halvings"
        )
    real_roots = _acoustic_roots(shock, complex(z.real, 0.0), eta)
    chosen = min(real_roots, key=lambda w: abs(w - shifted))
    return complex(chosen.real, 0.0), True


def eigenmodes(shock: PlanarShock, frequency: FrequencyPoint) -> ModeDecomposition:
    """Entropy-vorticity and stable acoustic eigenmodes behind the shock."""
    z, eta = complex(frequency.z), frequency.eta
    t1 = shock.thermo1
    v1, c2 = shock.downstream.v, t1.c2
    zeta = z + shock.u_bar * eta

    omega0 = -zeta / v1
    omega_minus, hyperbolic = _stable_root(shock, z, eta)
    if abs(omega0 - omega_minus) < COINCIDENCE_TOL * (abs(omega0) + abs(omega_minus)):
        raise CoincidenceError(f"entropy and acoustic modes coincide at z={z}, eta={eta:.6g}")

    e01 = np.array([0.0, omega0, -eta, 0.0], dtype=complex)
    e02 = np.array([t1.gruneisen * t1.T * t1.tau, 0.0, 0.0, c2], dtype=complex)
    e_minus = np.array(
        [t1.tau * (zeta + v1 * omega_minus), c2 * eta, c2 * omega_minus, 0.0], dtype=complex
    )
    return ModeDecomposition(
        frequency=frequency,
        omega0=omega0,
        omega_minus=omega_minus,
        basis_e0=(e01, e02),
        basis_eminus=e_minus,
        hyperbolic=hyperbolic,
    )


def stable_subspace(shock: PlanarShock, frequency: FrequencyPoint) -> ModeDecomposition:
    """Eigenmodes with a rank check on the three-dimensional stable subspace."""
    modes = eigenmodes(shock, frequency)
    singular = np.linalg.svd(modes.basis_matrix(), compute_uv=False)
    if singular[-1] <= COINCIDENCE_TOL * singular[0]:
        raise CoincidenceError(f"stable subspace is rank deficient at z={frequency.z}, eta={frequency.eta:.6g}")
    return modes


def interior_symbol(shock: PlanarShock, frequency: FrequencyPoint, omega: complex) -> np.ndarray:
    """Symbol (z + u eta + v omega) I + eta tilde-B1 + omega tilde-B2 of the downstream system."""
    t1 = shock.thermo1
    tau, c2, gt = t1.tau, t1.c2, t1.gruneisen * t1.T
    eta = frequency.eta
    a = complex(frequency.z) + shock.u_bar * eta + shock.downstream.v * omega
    return np.array([
        [a, -tau * eta, -tau * omega, 0.0],
        [-c2 * eta / tau, a, 0.0, gt * eta],
        [-c2 * omega / tau, 0.0, a, gt * omega],
        [0.0, 0.0, 0.0, a],
    ], dtype=complex)


def forcing_vector(shock: PlanarShock, frequency: FrequencyPoint) -> np.ndarray:
    """r = df2(U1)^-1 (z [f0] + eta [f1]), the front-displacement column."""
    up, down = shock.upstream, shock.downstream
    jump0 = flux_at(0, down, shock.thermo1) - flux_at(0, up, shock.thermo0)
    jump1 = flux_at(1, down, shock.thermo1) - flux_at(1, up, shock.thermo0)
    rhs = complex(frequency.z) * jump0 + frequency.eta * jump1
    return np.asarray(np.linalg.solve(flux_jacobian_at(2, down, shock.thermo1), rhs), dtype=complex)


def lopatinskii_matrix(shock: PlanarShock, frequency: FrequencyPoint) -> np.ndarray:
    modes = eigenmodes(shock, frequency)
    return np.column_stack([modes.basis_matrix(), forcing_vector(shock, frequency)])


def lopatinskii(shock: PlanarShock, frequency: FrequencyPoint) -> complex:
    """Lopatinskii determinant det[e01 | e02 | e- | r]."""
    return complex(np.linalg.det(lopatinskii_matrix(shock, frequency)))


def normalized_lopatinskii(shock: PlanarShock, frequency: FrequencyPoint) -> float:
    """|Delta| divided by the product of column norms, a value in [0, 1]."""
    matrix = lopatinskii_matrix(shock, frequency)
    norms = float(np.prod(np.linalg.norm(matrix, axis=0)))
    if norms == 0.0:
        return 0.0
    return abs(complex(np.linalg.det(matrix))) / norms


def _contour_value(shock: PlanarShock, z: complex, eta: float) -> complex:
    # Delta vanishes to first order where omega0 = omega-; dividing removes that zero.
    modes = eigenmodes(shock, FrequencyPoint(z, eta))
    matrix = np.column_stack([modes.basis_matrix(), forcing_vector(shock, FrequencyPoint(z, eta))])
    value = complex(np.linalg.det(matrix)) / (modes.omega_minus - modes.omega0)
    if value == 0:
        raise ConvergenceError(f"Lopatinskii determinant vanishes on the contour at z={z}")
    return value


def _arg_change(shock: PlanarShock, eta: float, a: complex, b: complex, ga: complex, gb: complex, depth: int) -> float:
    step = math.atan2((gb / ga).imag, (gb / ga).real)
    if abs(step) <= math.pi / 4.0 or depth == 0:
        return step
    mid = 0.5 * (a + b)
    gm = _contour_value(shock, mid, eta)
    return (_arg_change(shock, eta, a, mid, ga, gm, depth - 1)
            + _arg_change(shock, eta, mid, b, gm, gb, depth - 1))


def count_unstable_zeros(
    shock: PlanarShock,
    eta: float = 1.0,
    radius: Optional[float] = None,
    samples: int = 400,
) -> int:
    """Zeros of the Lopatinskii determinant with Im z < 0, by the argument principle.

    The contour is the rectangle [-R, R] x [-R, -gamma0] traversed counterclockwise.
    """
    if eta <= 0.0:
        raise DomainError("eta must be positive")
    scale = (shock.thermo1.c + abs(shock.u_bar)) * eta
    big = radius if radius is not None else 50.0 * scale
    floor = 1e-3 * scale
    corners = [complex(-big, -big), complex(big, -big), complex(big, -floor), complex(-big, -floor)]
    per_edge = max(samples // 4, 8)

    total = 0.0
    for start, end in zip(corners, corners[1:] + corners[:1]):
        points = [start + (end - start) * t for t in np.linspace(0.0, 1.0, per_edge + 1)]
        values = [_contour_value(shock, point, eta) for point in points]
        for i in range(per_edge):
            total += _arg_change(shock, eta, points[i], points[i + 1], values[i], values[i + 1], MAX_SUBDIVISION)

    winding = total / (2.0 * math.pi)
    count = int(round(winding))
    if abs(winding - count) > 0.1:
        logger.warning(f"Winding number {winding:.4f} is far from an integer")
    logger.debug(f"Argument principle: winding {winding:.6f} with R={big:.4g}")
    return count


def _rh_equation_residuals(shock: PlanarShock, u_dot: np.ndarray) -> np.ndarray:
    """Residuals of the four linearized jump equations at (z, eta) = (0, 1), each scaled by its terms."""
    t0, t1 = shock.thermo0, shock.thermo1
    tau0, tau1, v1, ub = t0.tau, t1.tau, shock.downstream.v, shock.u_bar
    c2, gt, dp = t1.c2, t1.gruneisen * t1.T, t1.p - t0.p
    tau_d, u_d, v_d, s_d = (float(x) for x in u_dot)
    equations = [
        [-v1 * tau_d / tau1**2, v_d / tau1, (t1.rho - t0.rho) * ub],
        [v1 * u_d / tau1, dp],
        [-(v1 * v1 + c2) * tau_d / tau1**2, 2.0 * v1 * v_d / tau1, gt * s_d / tau1],
        [-0.5 * (c2 * (tau1 - tau0) / tau1**2 + dp) * tau_d,
         t1.T * (1.0 + t1.gruneisen * (tau1 - tau0) / (2.0 * tau1)) * s_d],
    ]
    return np.array([abs(sum(terms)) / max(sum(abs(x) for x in terms), 1e-300) for terms in equations])


def solve_linearized_rh(shock: PlanarShock) -> LinearizedRhSolution:
    """Closed-form front perturbation at (z, eta) = (0, 1) and its decomposition on the stable basis."""
    weak = normalized_lopatinskii(shock, FrequencyPoint(0j, 1.0))
    if weak > WEAK_ZERO_TOL:
        raise NotWeaklyStableError(f"Lopatinskii determinant does not vanish at (0, 1): {weak:.3e}")

    t0, t1 = shock.thermo0, shock.thermo1
    tau0, tau1, T1, g1, c1 = t0.tau, t1.tau, t1.T, t1.gruneisen, t1.c
    v0, v1, ub = shock.upstream.v, shock.downstream.v, shock.u_bar
    a = tau1 - tau0

    tau_d = v1 * a * ub * (2.0 * tau1 + g1 * a) / (tau0 * (c1 * c1 - v1 * v1))
    u_d = v1 - v0
    v_d = a * ub / tau0 + v1 * tau_d / tau1
    s_d = a * a * v1 * ub / (tau0 * tau1 * T1)
    u_dot = np.array([tau_d, u_d, v_d, s_d])

    r = forcing_vector(shock, FrequencyPoint(0j, 1.0)).real
    mismatch = float(np.linalg.norm(u_dot + r)) / float(np.linalg.norm(r))
    residual = max(float(np.max(_rh_equation_residuals(shock, u_dot))), mismatch)

    psi0, _ = acoustic_front_angles(ub, v1, c1)
    sin_psi, beta = math.sin(psi0), math.cos(psi0)
    alpha0 = -(ub / v0) * (v1 - v0) ** 2 / (ub * ub + v1 * v1)
    alpha_minus = (v1 - v0) / (c1 * sin_psi) * (v1 / v0) * (ub * ub + v0 * v1) / (ub * ub + v1 * v1)
    mu0 = s_d / (c1 * c1)

    mach, nu = shock.mach1, shock.nu
    s = math.sqrt(1.0 - beta * beta)
    q = 1.0 + mach * mach - 2.0 * mach * beta
    alpha0_rescaled = -mach * nu * nu * (1.0 - mach * beta) * s / ((1.0 + nu) * q)
    alpha_minus_rescaled = -(mach * nu / (1.0 + nu)) * (1.0 / s + nu * mach * mach * s / q)

    basis = np.column_stack([
        [0.0, ub, v1, 0.0],
        [g1 * T1 * tau1, 0.0, 0.0, c1 * c1],
        [tau1, c1 * sin_psi, -c1 * beta, 0.0],
    ])
    rebuilt = basis @ np.array([alpha0, mu0, alpha_minus])
    reconstruction = float(np.linalg.norm(rebuilt - u_dot)) / float(np.linalg.norm(u_dot))
    logger.debug(f"Linearized jump: residual {residual:.3e}, reconstruction {reconstruction:.3e}")

    return LinearizedRhSolution(
        chi=1.0,
        u_dot=u_dot,
        r=r,
        alpha0=alpha0,
        mu0=mu0,
        alpha_minus=alpha_minus,
        alpha0_rescaled=alpha0_rescaled,
        alpha_minus_rescaled=alpha_minus_rescaled,
        residual=residual,
        reconstruction_residual=reconstruction,
    )
