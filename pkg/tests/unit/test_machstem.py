"""
Unit tests for the Mach stem pattern solver and the eps-continuation of the family.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from machstem.models.core import (
    DomainError,
    FamilyResult,
    PlanarShock,
    ValidationError,
)
from machstem.numerics.differences import extrapolate_to_zero
from machstem.services.machstem import (
    continue_family,
    downstream_state_1,
    downstream_state_2,
    reference_angles,
    shock3_solve,
    solve_pattern,
    upstream_with_u,
    velocity_mismatch,
    verify_family,
    verify_pattern,
)
from machstem.services.normal_modes import solve_linearized_rh
from machstem.services.shock import acoustic_front_angles, galilean_shift
from machstem.services.stability import realize_worksheet, worksheet_from_shock

pytestmark = pytest.mark.unit


def mismatch_slope(shock: PlanarShock, h: float = 1e-4) -> float:
    """Centered difference of delta in eps at the reference upstream state."""
    plus = velocity_mismatch(shock, h, shock.upstream).delta
    minus = velocity_mismatch(shock, -h, shock.upstream).delta
    return (plus - minus) / (2.0 * h)


# Inner solves

def test_downstream_state_1_reproduces_reference(weak_shock: PlanarShock) -> None:
    state = downstream_state_1(weak_shock, weak_shock.upstream)
    np.testing.assert_allclose(state.as_array(), weak_shock.downstream.as_array(), rtol=1e-12, atol=1e-14)


def test_downstream_state_1_moves_with_tangential_velocity(weak_shock: PlanarShock) -> None:
    h = 1e-4
    plus = downstream_state_1(weak_shock, upstream_with_u(weak_shock, weak_shock.u_bar + h))
    minus = downstream_state_1(weak_shock, upstream_with_u(weak_shock, weak_shock.u_bar - h))
    derivative = (plus.as_array() - minus.as_array()) / (2.0 * h)
    np.testing.assert_allclose(derivative, [0.0, 1.0, 0.0, 0.0], atol=1e-7)


def test_downstream_state_2_at_zero_angle(weak_shock: PlanarShock) -> None:
    state = upstream_with_u(weak_shock, weak_shock.u_bar - 0.01)
    np.testing.assert_allclose(
        downstream_state_2(weak_shock, 0.0, state).as_array(),
        downstream_state_1(weak_shock, state).as_array(),
        rtol=1e-12,
        atol=1e-14,
    )


def test_downstream_state_2_derivative_is_linearized_solution(weak_shock: PlanarShock) -> None:
    h = 1e-5
    plus = downstream_state_2(weak_shock, h, weak_shock.upstream)
    minus = downstream_state_2(weak_shock, -h, weak_shock.upstream)
    derivative = (plus.as_array() - minus.as_array()) / (2.0 * h)
    np.testing.assert_allclose(derivative, solve_linearized_rh(weak_shock).u_dot, rtol=1e-5, atol=1e-6)


def test_zero_amplitude_reflected_front(weak_shock: PlanarShock) -> None:
    eos = weak_shock.eos
    assert eos is not None
    down, t1 = weak_shock.downstream, weak_shock.thermo1
    state3, psi, lam = shock3_solve(eos, down, t1.p)

    assert state3 == down
    assert lam == 0.0
    assert psi == acoustic_front_angles(down.u, down.v, t1.c)[0]
    assert -weak_shock.u_bar * math.sin(psi) + down.v * math.cos(psi) == pytest.approx(-t1.c, rel=1e-13)


def test_reflected_state_moves_along_kernel_direction(weak_shock: PlanarShock) -> None:
    eos = weak_shock.eos
    assert eos is not None
    down, t1 = weak_shock.downstream, weak_shock.thermo1
    _, psi0 = reference_angles(weak_shock)
    kernel = np.array([t1.tau, t1.c * math.sin(psi0), -t1.c * math.cos(psi0), 0.0])

    plus, _, lam_plus = shock3_solve(eos, down, t1.p * (1.0 + 1e-6))
    minus, _, lam_minus = shock3_solve(eos, down, t1.p * (1.0 - 1e-6))
    derivative = (plus.as_array() - minus.as_array()) / (lam_plus - lam_minus)

    assert lam_plus < 0.0 < lam_minus
    np.testing.assert_allclose(derivative, kernel, rtol=1e-4, atol=1e-6)


# Velocity mismatch

def test_mismatch_vanishes_at_zero_angle(weak_shock: PlanarShock) -> None:
    for du in (-0.02, 0.0, 0.02):
        result = velocity_mismatch(weak_shock, 0.0, upstream_with_u(weak_shock, weak_shock.u_bar + du))
        assert abs(result.delta) < 1e-12
        assert result.delta_tilde is None


def test_mismatch_is_stationary_only_at_critical_velocity(weak_shock_at_rest: PlanarShock) -> None:
    V = worksheet_from_shock(weak_shock_at_rest).V
    at_critical = abs(mismatch_slope(galilean_shift(weak_shock_at_rest, -V)))
    off_critical = abs(mismatch_slope(galilean_shift(weak_shock_at_rest, -1.01 * V)))

    assert at_critical < 1e-6
    assert off_critical > 10.0 * at_critical
    assert off_critical > 1e-5


# Patterns

def test_reference_family_is_complete(reference_family: FamilyResult) -> None:
    assert reference_family.complete
    assert len(reference_family.patterns) == 10
    assert all(pattern.passed for pattern in reference_family.patterns)


def test_family_angles_and_pressures(reference_family: FamilyResult) -> None:
    for pattern in reference_family.patterns:
        p0, p1, p2, p3 = pattern.pressures
        assert pattern.theta == math.pi - pattern.eps
        assert p0 < p1 < p2
        assert abs(p2 - p3) / p2 < 1e-12
        assert pattern.diagnostics.branch_ok
        assert math.pi < pattern.phi0 < 1.5 * math.pi
        assert pattern.phi0 < pattern.psi0 < 2.0 * math.pi


def test_family_state_gap_is_first_order(reference_family: FamilyResult, weak_shock: PlanarShock) -> None:
    reference = weak_shock.downstream.as_array()
    eps = np.array([p.eps for p in reference_family.patterns])
    gaps = np.array([
        max(float(np.linalg.norm(state.as_array() - reference)) for state in p.states[1:])
        for p in reference_family.patterns
    ])
    slope = np.polyfit(np.log(eps), np.log(gaps), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.1)


def test_family_angles_tend_to_limit_angles(reference_family: FamilyResult, weak_shock: PlanarShock) -> None:
    phi0, psi0 = reference_angles(weak_shock)
    head = reference_family.patterns[:4]
    eps = [p.eps for p in head]

    assert phi0 == pytest.approx(math.atan2(weak_shock.downstream.v, weak_shock.u_bar) % (2.0 * math.pi))
    assert extrapolate_to_zero(eps, [p.phi for p in head], degree=2) == pytest.approx(phi0, abs=1e-6)
    assert extrapolate_to_zero(eps, [p.psi for p in head], degree=2) == pytest.approx(psi0, abs=1e-6)


@pytest.mark.parametrize("index", range(10))
def test_lambda_follows_linearized_amplitude(reference_family: FamilyResult, weak_shock: PlanarShock,
                                            index: int) -> None:
    """lam / eps = alpha- + O(eps) at every point of the family grid."""
    alpha_minus = solve_linearized_rh(weak_shock).alpha_minus
    assert len(reference_family.patterns) == 10
    pattern = reference_family.patterns[index]
    assert pattern.lam / pattern.eps == pytest.approx(alpha_minus, rel=1e-2 + 30.0 * pattern.eps)


def test_negative_eps_fails_reflected_lax_check(weak_shock: PlanarShock) -> None:
    with pytest.raises(ValidationError) as excinfo:
        solve_pattern(weak_shock, -1e-3)
    assert "lax_s3" in excinfo.value.failures

    pattern = solve_pattern(weak_shock, -1e-3, validate=False)
    assert "lax_s3" in pattern.diagnostics.failures


def test_off_critical_shock_drifts_back_to_critical_velocity(weak_shock_at_rest: PlanarShock) -> None:
    V = worksheet_from_shock(weak_shock_at_rest).V
    shifted = galilean_shift(weak_shock_at_rest, -1.01 * V)
    pattern = solve_pattern(shifted, 1e-4, validate=False)
    assert abs(pattern.u_upstream + V) < 0.2 * abs(shifted.u_bar + V)


def test_zero_eps_is_rejected(weak_shock: PlanarShock) -> None:
    with pytest.raises(DomainError):
        solve_pattern(weak_shock, 0.0)


def test_patterns_need_an_equation_of_state() -> None:
    with pytest.raises(DomainError):
        solve_pattern(realize_worksheet(0.8, 5.0, 0.5), 1e-3)


@pytest.mark.parametrize("grid", [[], [1e-3, 0.0], [1e-3, -2e-3], [2e-3, 1e-3], [1e-3, 1e-3]])
def test_continue_family_rejects_bad_grids(weak_shock: PlanarShock, grid: list[float]) -> None:
    with pytest.raises(DomainError):
        continue_family(weak_shock, grid)


def test_negative_grid_stops_at_first_point(weak_shock: PlanarShock) -> None:
    family = continue_family(weak_shock, [-1e-3, -2e-3])

    assert not family.complete
    assert family.patterns == []
    assert family.failure is not None
    assert family.failure.eps == -1e-3
    assert family.failure.code == "validation"
    assert "lax_s3" in family.failure.failures


# Verification

def test_verify_family_passes_stored_patterns(reference_family: FamilyResult) -> None:
    assert all(diagnostics.passed for diagnostics in verify_family(reference_family))


def test_verify_pattern_detects_tampering(reference_family: FamilyResult, weak_shock: PlanarShock) -> None:
    eos = weak_shock.eos
    assert eos is not None
    pattern = reference_family.patterns[-1]

    bent = verify_pattern(eos, replace(pattern, psi=pattern.psi + 1e-3))
    assert "rh_s3" in bent.failures

    skewed = verify_pattern(eos, replace(pattern, theta=pattern.theta + 1e-12))
    assert skewed.failures == ["theta"]


def test_reference_family_angles_are_monotone(reference_family: FamilyResult) -> None:
    diagnostics = verify_family(reference_family)
    assert not any(name.startswith("monotone_") for d in diagnostics for name in d.failures)


def test_verify_family_flags_out_of_order_pattern(reference_family: FamilyResult) -> None:
    patterns = list(reference_family.patterns)
    patterns[4], patterns[5] = patterns[5], patterns[4]

    diagnostics = verify_family(replace(reference_family, patterns=patterns))

    assert diagnostics[5].failures == ["monotone_phi", "monotone_psi"]
    assert all(d.passed for k, d in enumerate(diagnostics) if k != 5)
