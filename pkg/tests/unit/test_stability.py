"""
Unit tests for the stability trichotomy and the critical tangential velocity.
"""

import math

import numpy as np
import pytest

from machstem.models.core import (
    DomainError,
    NoAdmissibleRootError,
    NoRootInIntervalError,
    PlanarShock,
    StabilityClass,
)
from machstem.services.stability import (
    angle_polynomial,
    c_star,
    classify,
    prop1_sweep,
    proposition1_check,
    realize_worksheet,
    relation_check,
    sample_weak_triples,
    solve_v,
    weak_window,
    worksheet_from_shock,
)

pytestmark = pytest.mark.unit

WORKSHEET_TRIPLE = (0.8, 5.0, 0.5)


# Classification

@pytest.mark.parametrize("triple,expected", [
    ((0.5, 0.4, 1.0), StabilityClass.UNIFORM),
    ((0.8, 5.0, 0.5), StabilityClass.WEAK),
    ((0.8, 10.0, 0.5), StabilityClass.VIOLENT),
    ((0.8, 5.0, 1.0 / 3.84), StabilityClass.LIMIT_GLANCING),
    ((0.5, 5.0, 1.2), StabilityClass.LIMIT_ONE_DIMENSIONAL),
])
def test_classify_examples(triple: tuple[float, float, float], expected: StabilityClass) -> None:
    assert classify(*triple).regime is expected


def test_classify_margins() -> None:
    regime = classify(*WORKSHEET_TRIPLE)
    lower, upper = weak_window(0.8, 5.0)

    assert regime.m2nu == pytest.approx(0.32, rel=1e-15)
    assert regime.lower_margin == pytest.approx(0.32 - lower, rel=1e-14)
    assert regime.upper_margin == pytest.approx(upper - 0.32, rel=1e-14)
    assert lower == pytest.approx(1.0 / 6.0, rel=1e-15)
    assert upper == pytest.approx(0.36, rel=1e-15)


@pytest.mark.parametrize("triple", [(1.2, 5.0, 0.5), (0.0, 5.0, 0.5), (0.5, -1.0, 1.0), (0.5, 1.0, 0.0)])
def test_classify_rejects_out_of_range_triples(triple: tuple[float, float, float]) -> None:
    with pytest.raises(DomainError):
        classify(*triple)


def test_mach2_shock_is_uniformly_stable(mach2_shock: PlanarShock) -> None:
    regime = classify(mach2_shock.mach1, mach2_shock.thermo1.gruneisen, mach2_shock.nu)
    assert regime.regime is StabilityClass.UNIFORM
    assert regime.m2nu == pytest.approx(5.0 / 9.0, rel=1e-10)


def test_reference_shock_is_weakly_stable(weak_shock_at_rest: PlanarShock) -> None:
    regime = classify(weak_shock_at_rest.mach1, weak_shock_at_rest.thermo1.gruneisen, weak_shock_at_rest.nu)
    assert regime.regime is StabilityClass.WEAK
    assert regime.m2nu == pytest.approx(0.1992, abs=2e-3)


# Critical velocity

def test_worksheet_values() -> None:
    V, worksheet = solve_v(*WORKSHEET_TRIPLE, 1.0)

    assert V * V == pytest.approx(1.13521, abs=1e-5)
    assert worksheet.V == V
    assert worksheet.k == pytest.approx(0.4, rel=1e-14)
    assert worksheet.v1 == pytest.approx(-0.8, rel=1e-15)
    assert worksheet.phi == pytest.approx(0.97909, abs=1e-5)
    assert worksheet.y == pytest.approx(0.8 * worksheet.phi, rel=1e-15)
    assert worksheet.beta == pytest.approx(-0.07778, abs=1e-4)
    assert worksheet.upsilon == pytest.approx(-worksheet.c_star, rel=1e-15)
    assert V * V > 1.0 - 0.64


def test_critical_velocity_scales_with_sound_speed() -> None:
    base, _ = solve_v(*WORKSHEET_TRIPLE, 1.0)
    for c1 in (0.5, 2.0, 7.3):
        V, _ = solve_v(*WORKSHEET_TRIPLE, c1)
        assert V == pytest.approx(c1 * base, rel=1e-12)
        assert c_star(*WORKSHEET_TRIPLE, c1)[0] == pytest.approx(c1 * c_star(*WORKSHEET_TRIPLE, 1.0)[0], rel=1e-12)


def test_both_routes_agree_on_worksheet() -> None:
    report = proposition1_check(*WORKSHEET_TRIPLE)

    assert report.passed
    assert report.gap < 1e-10
    assert report.c_star == pytest.approx(report.V, rel=1e-10)


@pytest.mark.parametrize("triple", [(0.5, 0.4, 1.0), (0.8, 10.0, 0.5)])
def test_solve_v_rejects_non_weak_triples(triple: tuple[float, float, float]) -> None:
    with pytest.raises(NoAdmissibleRootError):
        solve_v(*triple, 1.0)


def test_solve_v_rejects_non_positive_sound_speed() -> None:
    with pytest.raises(DomainError):
        solve_v(*WORKSHEET_TRIPLE, 0.0)


def test_angle_route_has_no_root_for_uniform_triple() -> None:
    with pytest.raises(NoRootInIntervalError):
        c_star(0.5, 0.4, 1.0, 1.0)


def test_critical_velocity_approaches_glancing_limit() -> None:
    """Near M^2 nu = 1/(1 + Gamma) the critical speed tends to sqrt(c1^2 - v1^2)."""
    nu_limit = 1.0 / 3.84
    gaps = [solve_v(0.8, 5.0, nu_limit * (1.0 + delta), 1.0)[0] ** 2 - 0.36 for delta in (1e-2, 1e-4, 1e-6)]

    assert all(gap > 0.0 for gap in gaps)
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 5e-2


def test_critical_velocity_at_tiny_glancing_margin() -> None:
    nu = (1.0 / 6.0 + 1e-8) / 0.64
    V, _ = solve_v(0.8, 5.0, nu, 1.0)
    assert abs(V - 0.6) < 1e-6


def test_relation_check_on_worksheet() -> None:
    relations = relation_check(*WORKSHEET_TRIPLE)

    assert relations["angle_polynomial"] < 1e-12
    assert relations["relation1"] < 1e-10
    assert relations["relation2"] < 1e-10
    assert relations["intermediate_margin"] > 0.0


def test_angle_polynomial_vanishes_at_worksheet_root() -> None:
    _, phi, _ = c_star(*WORKSHEET_TRIPLE, 1.0)
    assert angle_polynomial(*WORKSHEET_TRIPLE, 0.8 * phi) == pytest.approx(0.0, abs=1e-12)


# Sweeps

def test_sampled_triples_are_weak() -> None:
    triples = sample_weak_triples(200, np.random.default_rng(3))
    assert all(classify(*triple).regime is StabilityClass.WEAK for triple in triples)


def test_sweep_over_thousand_triples() -> None:
    report = prop1_sweep(samples=1000, seed=20240601)

    assert report.samples == 1000
    assert report.failures == 0
    assert report.max_gap < 1e-9
    assert report.min_gap <= report.median_gap <= report.max_gap
    assert report.worst is not None
    assert report.worst.gap == report.max_gap


def test_sweep_is_reproducible_across_thread_counts() -> None:
    serial = prop1_sweep(samples=50, seed=7, threads=1)
    pooled = prop1_sweep(samples=50, seed=7, threads=4)
    assert serial == pooled


def test_sweep_rejects_empty_sample() -> None:
    with pytest.raises(DomainError):
        prop1_sweep(samples=0, seed=1)


# Realized shocks

def test_realized_shock_carries_the_triple() -> None:
    shock = realize_worksheet(*WORKSHEET_TRIPLE, c1=1.3)

    assert shock.eos is None
    assert shock.mach1 == pytest.approx(0.8, rel=1e-14)
    assert shock.nu == pytest.approx(0.5, rel=1e-14)
    assert shock.thermo1.gruneisen == 5.0
    assert shock.thermo0.p > 0.0
    assert shock.mass_flux == pytest.approx(0.8 * 1.3, rel=1e-12)


def test_worksheet_of_realized_shock() -> None:
    worksheet = worksheet_from_shock(realize_worksheet(*WORKSHEET_TRIPLE))
    assert worksheet.V**2 == pytest.approx(1.13521, abs=1e-5)


def test_realize_rejects_non_positive_upstream_pressure() -> None:
    with pytest.raises(DomainError):
        realize_worksheet(0.9, 1.0, 1.5)


def test_worksheet_from_reference_shock(weak_shock_at_rest: PlanarShock) -> None:
    worksheet = worksheet_from_shock(weak_shock_at_rest)
    glancing = math.sqrt(worksheet.c1**2 - worksheet.v1**2)

    assert glancing < worksheet.V < worksheet.c1
    assert worksheet.c_star == pytest.approx(worksheet.V, rel=1e-10)
