import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvecurrents.errors import DivergingLimitError, NonConvergentError
from curvecurrents.regularization import (
    DEFAULT_CUTOFF,
    QuadratureSpec,
    RegularizationSchedule,
    SpatialBand,
    chi_profile,
    chi_profile_prime,
    cutoff_eval,
    dbar_cutoff_pairing,
    integrate_disc,
    limit_extrapolate,
    polar_grid,
    pv_integrate,
)

QUAD = QuadratureSpec()


# -- cutoff profile ---------------------------------------------------------

def test_profile_ranges():
    x = np.linspace(0.0, 3.0, 301)
    v = chi_profile(x)
    assert np.all((0.0 <= v) & (v <= 1.0))
    assert np.all(v[x <= 1.0] == 0.0)
    assert np.all(v[x >= 2.0] == 1.0)
    assert np.all(np.diff(v) >= -1e-15)


def test_profile_derivative_integrates_to_one():
    x, w = np.polynomial.legendre.leggauss(40)
    x = 1.5 + 0.5 * x
    assert abs(np.sum(0.5 * w * chi_profile_prime(x)) - 1.0) < 1e-12


def test_profile_derivative_support():
    assert chi_profile_prime(0.999) == 0.0
    assert chi_profile_prime(2.001) == 0.0
    assert chi_profile_prime(1.5) > 0.0


@pytest.mark.parametrize("tau,expect_val,expect_zero_dbar", [
    (0.05, 0.0, True),    # |tau|/delta = 0.5 < 1
    (0.3, 1.0, True),     # |tau|/delta = 3 > 2
])
def test_cutoff_eval_outside_band(tau, expect_val, expect_zero_dbar):
    val, dbar = cutoff_eval(DEFAULT_CUTOFF, 0.1, tau)
    assert val == expect_val
    assert (dbar == 0) == expect_zero_dbar


def test_cutoff_eval_in_band():
    val, dbar = cutoff_eval(DEFAULT_CUTOFF, 0.1, 0.15)
    assert 0.0 < val < 1.0
    assert dbar != 0
    # closed form: profile'(1.5) * tau/(2 |tau| delta)
    expected = chi_profile_prime(1.5) * 0.15 / (2 * 0.15 * 0.1)
    assert abs(dbar - expected) < 1e-14


def test_dbar_support_annulus_exact():
    delta = 0.07
    taus = np.array([0.069, 0.1401, 0.0999j, 0.07 + 0j, 0.1399 + 0j])
    _, dbar = cutoff_eval(DEFAULT_CUTOFF, delta, taus)
    inside = (np.abs(taus) > delta) & (np.abs(taus) < 2 * delta)
    assert np.all((dbar != 0) == inside)


# -- schedules, quadrature specs -------------------------------------------

def test_schedule_geometric():
    s = RegularizationSchedule(0.2, 0.5, 6, 2)
    d = s.deltas
    assert len(d) == 6
    assert np.allclose(np.array(d[1:]) / np.array(d[:-1]), 0.5)


def test_schedule_validation():
    with pytest.raises(ValueError):
        RegularizationSchedule(0.2, 1.5, 8, 2)
    with pytest.raises(ValueError):
        RegularizationSchedule(0.2, 0.5, 2, 2)


def test_quadrature_spec_requires_even_angular():
    with pytest.raises(ValueError):
        QuadratureSpec(angular_points=33)


# -- extrapolation ----------------------------------------------------------

def test_limit_extrapolate_linear_trace_exact():
    trace = [(d, 3.0 + d) for d in [0.2 * 0.5 ** j for j in range(6)]]
    out = limit_extrapolate(trace, order=2)
    assert abs(out.value - 3.0) < 1e-13
    assert out.error_estimate < 1e-12


def test_limit_extrapolate_diverging():
    trace = [(d, 1.0 / d) for d in [0.2 * 0.5 ** j for j in range(6)]]
    with pytest.raises(DivergingLimitError) as err:
        limit_extrapolate(trace, order=2)
    assert err.value.growth == pytest.approx(1.0, abs=0.05)


def test_limit_extrapolate_noise_not_diverging():
    # tiny roundoff-scale growth must not be flagged
    trace = [(d, 1e-15 / d) for d in [0.2 * 0.5 ** j for j in range(8)]]
    out = limit_extrapolate(trace, order=2)
    assert abs(out.value) < 1e-10


@settings(max_examples=40, deadline=None)
@given(
    L=st.floats(-5, 5),
    c1=st.floats(-3, 3),
    c2=st.floats(-3, 3),
)
def test_limit_extrapolate_exact_on_low_degree(L, c1, c2):
    trace = [(d, L + c1 * d + c2 * d * d)
             for d in [0.3 * 0.5 ** j for j in range(7)]]
    out = limit_extrapolate(trace, order=2)
    assert abs(out.value - L) < 1e-9 * max(1.0, abs(L), abs(c1), abs(c2))


# -- grids and integration ---------------------------------------------------

def test_polar_grid_area():
    nodes, w = polar_grid(0.0, 1.0, 16, 64)
    assert abs(np.sum(w) - math.pi) < 1e-12


def test_polar_grid_offcenter_area():
    nodes, w = polar_grid(0.3 + 0.1j, 0.25, 12, 64)
    assert abs(np.sum(w) - math.pi * 0.25 ** 2) < 1e-10


def test_polar_grid_offcenter_with_breaks_consistent():
    # integrating a radial kink function: panel splits recover accuracy
    f = lambda tau: np.where(np.abs(tau) < 0.5, 1.0, 0.0) + 0j
    val, err = integrate_disc(f, QuadratureSpec(radial_points=12,
                                                angular_points=96),
                              0.25, global_breaks=(0.5,), center=0.4)
    # exact area of {|tau|<0.5} within the disc |tau-0.4|<0.25
    # computed by lens-area formula
    r1, r2, d = 0.5, 0.25, 0.4
    a1 = r1 ** 2 * math.acos((d ** 2 + r1 ** 2 - r2 ** 2) / (2 * d * r1))
    a2 = r2 ** 2 * math.acos((d ** 2 + r2 ** 2 - r1 ** 2) / (2 * d * r2))
    a3 = 0.5 * math.sqrt((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2)
                         * (d + r1 + r2))
    assert abs(val - (a1 + a2 - a3)) < 1e-9


def test_spatial_band():
    band = SpatialBand(0.5, 0.9)
    assert band.value(0.3) == 1.0
    assert band.value(0.95) == 0.0
    assert 0 < band.value(0.7) < 1
    assert band.dbar_coeff(0.3 + 0j) == 0


# -- principal values ---------------------------------------------------------

def test_pv_smooth_agrees_with_plain():
    f = lambda tau: np.exp(-np.abs(tau) ** 2) * (1.0 + tau.real)
    plain, _ = integrate_disc(f, QUAD, 0.8)
    pv = pv_integrate(f, QUAD, singular_set=(), radius=0.8)
    assert abs(pv.value - plain) < 1e-10


def test_pv_cauchy_kernel_zero():
    # dA/tau has zero principal value on a disc (odd angular mode)
    out = pv_integrate(lambda tau: 1.0 / tau, QUAD, singular_set=(0.0,),
                       radius=1.0)
    assert abs(out.value) < 1e-10


def test_pv_mean_zero_second_order():
    out = pv_integrate(lambda tau: tau / np.conj(tau) / np.abs(tau) ** 2,
                       QUAD, singular_set=(0.0,), radius=1.0)
    assert abs(out.value) < 1e-9


def test_pv_nonconvergent_for_nonzero_mean():
    with pytest.raises(NonConvergentError):
        pv_integrate(lambda tau: 1.0 / np.abs(tau) ** 2, QUAD,
                     singular_set=(0.0,), radius=1.0)


def test_pv_linear_in_integrand():
    f1 = lambda tau: np.conj(tau) / tau
    f2 = lambda tau: (1.0 + tau.real ** 2) + 0j
    a, b = 2.0, -0.7
    lhs = pv_integrate(lambda tau: a * f1(tau) + b * f2(tau), QUAD,
                       singular_set=(0.0,), radius=0.9)
    v1 = pv_integrate(f1, QUAD, singular_set=(0.0,), radius=0.9)
    v2 = pv_integrate(f2, QUAD, singular_set=(0.0,), radius=0.9)
    assert abs(lhs.value - (a * v1.value + b * v2.value)) < 1e-9


def test_stokes_self_calibration():
    # the annulus integral of dbar(chi_delta) ^ dtau/tau is 2 pi i for
    # every delta
    for delta in (0.2, 0.05, 0.01):
        val = dbar_cutoff_pairing(lambda tau: 1.0 / tau, delta, QUAD)
        assert abs(val - 2j * math.pi) < 1e-12
