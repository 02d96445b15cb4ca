"""
Unit tests for normal modes, the Lopatinskii determinant and the linearized jump solution.
"""

import math

import numpy as np
import pytest

from machstem.models.core import (
    ConvergenceError,
    DomainError,
    FluidState,
    FrequencyPoint,
    NotWeaklyStableError,
    PlanarShock,
    ShockStrength,
    StabilityClass,
    StrengthKind,
)
from machstem.services.eos import ConstantGruneisen
from machstem.services import normal_modes
from machstem.services.normal_modes import (
    count_unstable_zeros,
    eigenmodes,
    interior_symbol,
    lopatinskii,
    normalized_lopatinskii,
    solve_linearized_rh,
    stable_subspace,
)
from machstem.services.shock import galilean_shift, solve_downstream
from machstem.services.stability import classify, realize_worksheet, scan_real_roots, worksheet_from_shock

pytestmark = pytest.mark.unit

# Compressions spread across the weakly stable part of the reference Hugoniot.
WEAK_TAUS = tuple(round(float(t), 3) for t in np.linspace(0.74, 0.80, 13))


@pytest.fixture(scope="module")
def weak_band(stiff_eos: ConstantGruneisen) -> list[PlanarShock]:
    upstream = FluidState(tau=1.0, u=0.0, v=-1.0, s=0.0)
    return [solve_downstream(stiff_eos, upstream, ShockStrength(StrengthKind.TAU1, tau1)) for tau1 in WEAK_TAUS]


def acoustic_residual(shock: PlanarShock, z: complex, eta: float, omega: complex) -> complex:
    v1, c2 = shock.downstream.v, shock.thermo1.c2
    zeta = z + shock.u_bar * eta
    return (zeta + v1 * omega) ** 2 - c2 * (eta * eta + omega * omega)


# Eigenmodes

def test_normal_incidence_modes(weak_shock_at_rest: PlanarShock) -> None:
    modes = eigenmodes(weak_shock_at_rest, FrequencyPoint(-1j, 0.0))
    v1 = weak_shock_at_rest.downstream.v

    assert modes.omega0 == pytest.approx(1j / v1, rel=1e-14)
    assert modes.omega_minus.imag < 0.0
    assert abs(acoustic_residual(weak_shock_at_rest, -1j, 0.0, modes.omega_minus)) < 1e-12
    assert not modes.hyperbolic


def test_stable_root_at_critical_velocity(weak_shock: PlanarShock) -> None:
    v1, c1, ub = weak_shock.downstream.v, weak_shock.thermo1.c, weak_shock.u_bar
    expected = (v1 * ub - c1 * math.sqrt(ub * ub + v1 * v1 - c1 * c1)) / (c1 * c1 - v1 * v1)
    modes = eigenmodes(weak_shock, FrequencyPoint(0j, 1.0))

    assert modes.hyperbolic
    assert modes.omega_minus.real == pytest.approx(expected, rel=1e-12)
    assert modes.omega_minus.imag == 0.0


@pytest.mark.parametrize("scale", [2.0, 10.0])
@pytest.mark.parametrize("z", [-0.4 - 0.3j, 1.5 + 0j, -2.0 + 0j, 0.2 + 0j])
def test_stable_root_is_homogeneous(weak_shock_at_rest: PlanarShock, z: complex, scale: float) -> None:
    base = eigenmodes(weak_shock_at_rest, FrequencyPoint(z, 1.0)).omega_minus
    scaled = eigenmodes(weak_shock_at_rest, FrequencyPoint(scale * z, scale)).omega_minus
    assert scaled == pytest.approx(scale * base, rel=1e-10)


ROOT_SIDES = (-1.5, 1.5, 3.0)


def acoustic_roots(shock: PlanarShock, z: complex) -> list[complex]:
    """Both roots omega of the acoustic dispersion relation at eta = 1."""
    v1, c2 = shock.downstream.v, shock.thermo1.c2
    zeta = z + shock.u_bar
    return [complex(w) for w in np.roots([v1 * v1 - c2, 2.0 * v1 * zeta, zeta * zeta - c2])]


def lowest_root(shock: PlanarShock, z: complex) -> complex:
    return min(acoustic_roots(shock, z), key=lambda w: w.imag)


@pytest.mark.parametrize("side", ROOT_SIDES)
def test_hyperbolic_root_is_the_limit_from_below(weak_shock_at_rest: PlanarShock, side: float) -> None:
    shock = weak_shock_at_rest
    k = shock.thermo1.c2 - shock.downstream.v ** 2
    z = side * math.sqrt(k)
    gammas = [1e-6 * 0.5**n for n in range(24)]
    roots = [lowest_root(shock, z - 1j * gamma) for gamma in gammas]
    gaps = [abs(b - a) for a, b in zip(roots, roots[1:])]

    assert all(root.imag < 0.0 for root in roots)
    assert gaps[-1] < 1e-10 * max(abs(roots[-1]), 1.0)
    assert gaps[-1] < 1e-3 * gaps[0]

    modes = eigenmodes(shock, FrequencyPoint(complex(z), 1.0))
    assert modes.hyperbolic
    assert modes.omega_minus.imag == 0.0
    assert modes.omega_minus.real == pytest.approx(roots[-1].real, abs=1e-9)
    other = max(acoustic_roots(shock, complex(z)), key=lambda w: abs(w - modes.omega_minus))
    assert abs(other - roots[-1]) > 1e-3


def test_unsettled_hyperbolic_root_raises(weak_shock_at_rest: PlanarShock,
                                          monkeypatch: pytest.MonkeyPatch) -> None:
    k = weak_shock_at_rest.thermo1.c2 - weak_shock_at_rest.downstream.v ** 2
    monkeypatch.setattr(normal_modes, "MAX_OFFSET_HALVINGS", 1)

    with pytest.raises(ConvergenceError, match="did not settle"):
        eigenmodes(weak_shock_at_rest, FrequencyPoint(complex(2.0 * math.sqrt(k)), 1.0))


def test_entropy_vorticity_basis_at_zero_frequency(weak_shock: PlanarShock) -> None:
    t1 = weak_shock.thermo1
    modes = eigenmodes(weak_shock, FrequencyPoint(0j, 1.0))
    e01, e02 = modes.basis_e0

    expected = np.array([0.0, weak_shock.u_bar, weak_shock.downstream.v, 0.0])
    np.testing.assert_allclose(e01 * -weak_shock.downstream.v, expected, rtol=1e-14, atol=1e-15)
    np.testing.assert_allclose(e02, [t1.gruneisen * t1.T * t1.tau, 0.0, 0.0, t1.c2], rtol=1e-15)


@pytest.mark.parametrize("z", [-1.3 - 0.2j, 0.5 + 0j, 2.5 + 0j, -0.7 - 1.0j])
def test_basis_is_annihilated_by_interior_symbol(weak_shock: PlanarShock, z: complex) -> None:
    frequency = FrequencyPoint(z, 1.0)
    modes = eigenmodes(weak_shock, frequency)
    for omega, vector in [
        (modes.omega0, modes.basis_e0[0]),
        (modes.omega0, modes.basis_e0[1]),
        (modes.omega_minus, modes.basis_eminus),
    ]:
        product = interior_symbol(weak_shock, frequency, omega) @ vector
        assert float(np.linalg.norm(product)) < 1e-12 * max(1.0, float(np.linalg.norm(vector))) * (abs(z) + abs(omega) + 3.0)


def test_stable_subspace_has_rank_three(weak_shock: PlanarShock) -> None:
    for z in np.linspace(-4.0, 4.0, 17):
        for gamma in (0.0, 0.5):
            modes = stable_subspace(weak_shock, FrequencyPoint(complex(z, -gamma) + 0.013, 1.0))
            assert np.linalg.matrix_rank(modes.basis_matrix()) == 3


def test_upper_half_plane_is_rejected(weak_shock: PlanarShock) -> None:
    with pytest.raises(DomainError):
        eigenmodes(weak_shock, FrequencyPoint(0.3 + 0.1j, 1.0))


# Lopatinskii determinant

def test_determinant_vanishes_at_critical_velocity(weak_shock: PlanarShock) -> None:
    assert normalized_lopatinskii(weak_shock, FrequencyPoint(0j, 1.0)) < 1e-8


@pytest.mark.parametrize("scale", [2.0, 10.0])
@pytest.mark.parametrize("z", [1.5, -2.0, 3.2])
def test_determinant_is_homogeneous_of_degree_three(weak_shock_at_rest: PlanarShock, z: float, scale: float) -> None:
    base = lopatinskii(weak_shock_at_rest, FrequencyPoint(complex(z), 1.0))
    scaled = lopatinskii(weak_shock_at_rest, FrequencyPoint(complex(scale * z), scale))
    assert abs(scaled - scale**3 * base) < 1e-9 * abs(scale**3 * base)


def test_uniform_shock_determinant_has_a_floor(mach2_shock: PlanarShock) -> None:
    values = [normalized_lopatinskii(mach2_shock, FrequencyPoint(complex(z), 1.0)) for z in np.linspace(-5.0, 5.0, 201)]
    assert min(values) > 1e-3
    assert scan_real_roots(mach2_shock) == []


def test_weak_shock_roots_sit_at_plus_minus_v(weak_band: list[PlanarShock]) -> None:
    assert len(weak_band) >= 10
    for shock in weak_band:
        assert classify(shock.mach1, shock.thermo1.gruneisen, shock.nu).regime is StabilityClass.WEAK
        V = worksheet_from_shock(shock).V
        roots = [root.z for root in scan_real_roots(shock)]
        assert len(roots) == 2
        assert roots[0] == pytest.approx(-V, abs=1e-8)
        assert roots[1] == pytest.approx(V, abs=1e-8)
        assert roots[0] + roots[1] == pytest.approx(0.0, abs=1e-9)


def test_critical_shift_moves_a_root_to_zero(weak_shock: PlanarShock) -> None:
    roots = [root.z for root in scan_real_roots(weak_shock)]
    assert min(abs(z) for z in roots) < 1e-8


def test_galilean_shift_translates_the_zero_set(weak_band: list[PlanarShock]) -> None:
    """Zeros of Delta(u, ., 1) are the zeros of Delta(0, ., 1) moved by -u."""
    for shock in weak_band[::4]:
        at_rest = [root.z for root in scan_real_roots(shock, grid_count=600)]
        V = worksheet_from_shock(shock).V
        for u_bar in (-0.25 * V, -V, -2.0 * V):
            moved = [root.z for root in scan_real_roots(galilean_shift(shock, u_bar), grid_count=600)]
            assert moved == pytest.approx([z - u_bar for z in at_rest], abs=1e-9)


# Unstable zeros

def test_no_unstable_zeros_for_stable_shocks(mach2_shock: PlanarShock, weak_shock: PlanarShock) -> None:
    assert count_unstable_zeros(mach2_shock) == 0
    assert count_unstable_zeros(weak_shock) == 0


@pytest.mark.parametrize("triple,expected_unstable", [
    ((0.5, 0.4, 1.0), False),
    ((0.8, 5.0, 0.5), False),
    ((0.8, 10.0, 0.5), True),
])
def test_zero_count_follows_the_trichotomy(triple: tuple[float, float, float], expected_unstable: bool) -> None:
    shock = realize_worksheet(*triple)
    count = count_unstable_zeros(shock)
    assert (count >= 1) is expected_unstable


def test_zero_count_needs_positive_eta(weak_shock: PlanarShock) -> None:
    with pytest.raises(DomainError):
        count_unstable_zeros(weak_shock, eta=0.0)


# Linearized jump conditions

def test_linearized_solution_closed_forms(weak_shock: PlanarShock) -> None:
    solution = solve_linearized_rh(weak_shock)

    assert solution.chi == 1.0
    assert solution.u_dot[1] == weak_shock.downstream.v - weak_shock.upstream.v
    assert solution.residual < 1e-12
    assert solution.reconstruction_residual < 1e-12
    assert solution.alpha0 == pytest.approx(solution.alpha0_rescaled, rel=1e-12)
    assert solution.alpha_minus == pytest.approx(solution.alpha_minus_rescaled, rel=1e-12)


def test_linearized_coefficients_of_reference_shock(weak_shock: PlanarShock) -> None:
    solution = solve_linearized_rh(weak_shock)

    assert solution.alpha_minus < 0.0
    assert solution.alpha0 < 0.0
    assert solution.alpha_minus == pytest.approx(-0.3215, abs=3e-3)
    assert solution.alpha0 == pytest.approx(-0.0368, abs=2e-3)


def test_linearized_solution_needs_critical_velocity(weak_shock_at_rest: PlanarShock) -> None:
    with pytest.raises(NotWeaklyStableError):
        solve_linearized_rh(weak_shock_at_rest)
