"""Tilted equilibrium measures, their thermodynamics, and the transition ladder."""

import math

import numpy as np
import pytest

from ocp2d import (
    DomainError,
    RadialMeasure,
    SingularityError,
    StabilityError,
    closed_form_energy,
    closed_form_entropy,
    energy_excess,
    entropy_excess,
    entropy_functional,
    equilibrium_measure,
    leading_cumulant,
    mean_field_energy,
    stability_domain,
    support_radii,
    transition_order,
    typical_value,
)


# --- stability domains -------------------------------------------------------

def test_stability_domain_shapes():
    assert stability_domain(1.0).contains(-50.0)
    assert stability_domain(1.5).contains(1e6)
    assert stability_domain(2.0).contains(-0.49)
    assert not stability_domain(2.0).contains(-0.5)
    assert stability_domain(3.0).contains(0.0)
    assert not stability_domain(3.0).contains(-1e-12)


def test_stability_domain_require_raises():
    with pytest.raises(StabilityError):
        stability_domain(2.0).require(-0.6)
    with pytest.raises(StabilityError):
        stability_domain(2.5).require(-0.1)
    assert stability_domain(1.0).require(-3.0) == -3.0


def test_bad_exponent_rejected():
    for bad in (0.0, -1.0, math.nan):
        with pytest.raises(DomainError):
            stability_domain(bad)


# --- support radii and the measure itself -----------------------------------

def test_support_radii_untilted_is_unit_disk():
    for p in (0.5, 1.0, 2.0, 3.0):
        r_in, r_out = support_radii(p, 0.0)
        assert r_in == 0.0
        assert r_out == pytest.approx(1.0, abs=1e-13)


def test_support_radii_quadratic_tilt_closed_form():
    # outer radius solves R^2 (1 + 2s) = 1 when the tilt is quadratic
    for s in (-0.3, 0.2, 1.0, 4.0):
        r_in, r_out = support_radii(2.0, s)
        assert r_in == 0.0
        assert r_out == pytest.approx(1.0 / math.sqrt(1.0 + 2.0 * s), rel=1e-12)


def test_support_becomes_annular_for_weak_negative_tilt():
    # sub-quadratic tilt with s < 0 opens a hole of radius (-s p)^{1/(2-p)}
    p, s = 1.0, -0.4
    r_in, r_out = support_radii(p, s)
    assert r_in == pytest.approx((-s * p) ** (1.0 / (2.0 - p)), rel=1e-12)
    assert r_in > 0.0
    measure = equilibrium_measure(p, s)
    assert measure.is_annular
    # density stays nonnegative across the support, vanishing nowhere inside
    rs = np.linspace(r_in, r_out, 50)
    dens = [measure.density(float(r)) for r in rs]
    assert min(dens) > 0.0


def test_equilibrium_measure_normalized():
    for p, s in [(0.5, -0.25), (1.0, 2.0), (2.0, -0.4), (2.0, 5.0), (3.0, 1.0)]:
        m = equilibrium_measure(p, s)
        assert m.cumulative(m.outer_radius) == pytest.approx(1.0, abs=1e-12)
        assert m.as_radial_measure().total_mass() == pytest.approx(1.0, abs=1e-12)


def test_density_zero_outside_support():
    m = equilibrium_measure(1.0, -0.4)
    assert m.density(m.inner_radius * 0.5) == 0.0
    assert m.density(m.outer_radius * 1.1) == 0.0


# --- energy / entropy excess -------------------------------------------------

def test_excess_vanishes_at_zero_tilt():
    for p in (0.5, 1.0, 2.0, 3.0):
        assert energy_excess(p, 0.0) == pytest.approx(0.0, abs=1e-14)
        assert entropy_excess(p, 0.0) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("s", [-0.3, 0.25, 1.0, 4.0])
def test_quadratic_tilt_closed_forms(s):
    assert energy_excess(2.0, s) == pytest.approx(0.25 * math.log1p(2 * s), rel=1e-12)
    assert entropy_excess(2.0, s) == pytest.approx(math.log1p(2 * s), rel=1e-12)
    assert closed_form_energy(2.0, s) == pytest.approx(0.25 * math.log1p(2 * s), rel=1e-14)
    assert closed_form_entropy(2.0, s) == pytest.approx(math.log1p(2 * s), rel=1e-14)


@pytest.mark.parametrize("s", [-0.35, 0.5, 1.0, 3.0])
def test_linear_tilt_closed_forms_match_quadrature(s):
    assert closed_form_energy(1.0, s) == pytest.approx(energy_excess(1.0, s), rel=1e-10)
    assert closed_form_entropy(1.0, s) == pytest.approx(entropy_excess(1.0, s), rel=1e-9)


def test_linear_tilt_entropy_reference_value():
    assert closed_form_entropy(1.0, 1.0) == pytest.approx(1.10298033415, abs=1e-10)


def test_closed_forms_limited_to_known_exponents():
    with pytest.raises(DomainError):
        closed_form_energy(1.5, 0.3)
    with pytest.raises(DomainError):
        closed_form_entropy(3.0, 0.3)


@pytest.mark.parametrize("p,s", [(1.0, 0.4), (2.0, 0.8), (0.5, -0.2), (3.0, 1.5)])
def test_tilt_derivative_is_typical_value(p, s):
    # envelope identity: d/ds of the excess equals the tilted moment
    h = 1e-6
    diff = (energy_excess(p, s + h) - energy_excess(p, s - h)) / (2 * h)
    assert diff == pytest.approx(typical_value(p, s), rel=1e-7)


def test_typical_value_at_zero_tilt():
    for p in (0.5, 1.0, 2.0, 4.0):
        assert typical_value(p, 0.0) == pytest.approx(2.0 / (2.0 + p), rel=1e-12)


@pytest.mark.parametrize("p,s", [(1.0, 0.4), (2.0, 0.8), (1.0, -0.3)])
def test_energy_excess_against_functional_oracle(p, s):
    # independent route: Coulomb energy of the tilted minimizer plus the
    # tilt work, referenced to the untilted disk value 3/8
    mu = equilibrium_measure(p, s).as_radial_measure()
    combo = mean_field_energy(mu) + s * typical_value(p, s) - 0.375
    assert combo == pytest.approx(energy_excess(p, s), abs=1e-9)


@pytest.mark.parametrize("p,s", [(1.0, 0.4), (2.0, 0.8)])
def test_entropy_excess_is_functional_deficit(p, s):
    mu = equilibrium_measure(p, s).as_radial_measure()
    deficit = math.log(math.pi) - entropy_functional(mu)
    assert deficit == pytest.approx(entropy_excess(p, s), abs=1e-9)


def test_unstable_tilt_raises():
    with pytest.raises(StabilityError):
        energy_excess(2.0, -0.5)
    with pytest.raises(StabilityError):
        entropy_excess(3.0, -0.01)


# --- mean-field functionals on the flat disk ---------------------------------

def test_disk_energy_and_entropy():
    disk = RadialMeasure.circular_law()
    assert mean_field_energy(disk) == pytest.approx(0.375, abs=1e-10)
    assert entropy_functional(disk) == pytest.approx(math.log(math.pi), abs=1e-10)


# --- transition classification ------------------------------------------------

@pytest.mark.parametrize(
    "p,order",
    [(0.5, 3), (1.0, 4), (4.0 / 3.0, 6), (1.5, 8), (1.9, 40)],
)
def test_transition_order_below_quadratic(p, order):
    t = transition_order(p)
    assert t.order == order
    assert not t.analytic
    assert not t.one_sided_domain


def test_transition_order_at_and_above_quadratic():
    t2 = transition_order(2.0)
    assert t2.analytic and t2.order is None and not t2.one_sided_domain
    t3 = transition_order(3.0)
    assert t3.analytic and t3.one_sided_domain


# --- cumulant formulas ---------------------------------------------------------

def test_leading_cumulant_values():
    assert leading_cumulant(1.0, 2.0, 100, 1) == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert leading_cumulant(2.0, 2.0, 10, 2) == pytest.approx(
        2.0 / (2.0 * 2.0 * 100), rel=1e-15
    )
    assert leading_cumulant(2.0, 4.0, 32, 2) == pytest.approx(
        1.0 / (4.0 * 32 ** 2), rel=1e-15
    )
    assert leading_cumulant(1.0, 2.0, 10, 3) == pytest.approx(
        1.0 / (2.0 * 4.0 * 10 ** 4), rel=1e-15
    )


def test_leading_cumulant_scales_cubically_in_exponent():
    k3a = leading_cumulant(1.0, 1.0, 1, 3)
    k3b = leading_cumulant(1.5, 1.0, 1, 3)
    assert k3b / k3a == pytest.approx(1.5 ** 3, rel=1e-12)


def test_cumulants_beyond_transition_raise():
    with pytest.raises(SingularityError):
        leading_cumulant(0.5, 2.0, 10, 3)   # transition order 3
    # order 2 still exists there
    assert leading_cumulant(0.5, 2.0, 10, 2) > 0.0


def test_leading_cumulant_argument_validation():
    with pytest.raises(DomainError):
        leading_cumulant(1.0, 2.0, 10, 4)
    with pytest.raises(DomainError):
        leading_cumulant(1.0, -2.0, 10, 1)
    with pytest.raises(DomainError):
        leading_cumulant(1.0, 2.0, 0, 1)
