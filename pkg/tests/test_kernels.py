import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvecurrents.curves import make_cusp, normalize
from curvecurrents.errors import DenominatorVanishesError, PoleAtDiagonalError
from curvecurrents.kernels import (
    KernelSpec,
    bm_form_eval,
    curve_kernel_assemble,
    cusp_kernel_factor,
    default_weight,
    disc_kernel,
    hefer,
    nontrivial_root_coeffs,
    split_tail_coeffs,
    stout_boundary_kernel,
    weight_vikt_eval,
)
from curvecurrents.polynomials import MultiPoly, eval_tau

TWO = ("z1", "z2")
TWO_PI_I = 2j * math.pi


def _zvar(name, power=1):
    return MultiPoly.var(TWO, name, power=power)


# -- Hefer data ---------------------------------------------------------------

def test_hefer_square():
    hd = hefer(_zvar("z1") ** 2)
    assert hd.g1 == MultiPoly(("zeta1", "zeta2", "z1", "z2"),
                              {(1, 0, 0, 0): 1, (0, 0, 1, 0): 1})
    assert hd.g2.is_zero()


def test_hefer_cusp23():
    hd = hefer(_zvar("z1") ** 2 - _zvar("z2") ** 3)
    v = ("zeta1", "zeta2", "z1", "z2")
    assert hd.g1 == MultiPoly(v, {(1, 0, 0, 0): 1, (0, 0, 1, 0): 1})
    assert hd.g2 == MultiPoly(v, {(0, 2, 0, 0): -1, (0, 1, 0, 1): -1,
                                  (0, 0, 0, 2): -1})


def test_hefer_constant():
    hd = hefer(MultiPoly.const(TWO, 5))
    assert hd.g1.is_zero() and hd.g2.is_zero()


@pytest.mark.parametrize("a", [
    _zvar("z1") ** 2 - _zvar("z2") ** 3,
    _zvar("z1") ** 3 - _zvar("z2") ** 4,
    _zvar("z1") ** 2 - _zvar("z2") ** 5,
])
def test_hefer_identity_exact(a):
    assert hefer(a).identity_defect().is_zero()


@settings(max_examples=25, deadline=None)
@given(coeffs=st.lists(
    st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(-5, 5)),
    min_size=1, max_size=5,
))
def test_hefer_identity_random_polys(coeffs):
    terms = {}
    for i, j, c in coeffs:
        terms[(i, j)] = terms.get((i, j), 0) + c
    a = MultiPoly(TWO, terms)
    assert hefer(a).identity_defect().is_zero()


# -- Bochner-Martinelli and weights ---------------------------------------------

def test_bm_form_n1():
    out = bm_form_eval(1, 1.0, 0.0)
    assert out["b1"] == pytest.approx(1.0 / TWO_PI_I)
    out = bm_form_eval(1, 2j, 1j)
    assert out["b1"] == pytest.approx(1.0 / (TWO_PI_I * 1j))


def test_bm_form_pole():
    with pytest.raises(PoleAtDiagonalError):
        bm_form_eval(1, 0.5, 0.5)


def test_bm_form_n2_components():
    out = bm_form_eval(2, [1.0, 1j], [0.0, 0.0])
    eta2 = 2.0
    assert np.allclose(out["b1"], np.array([1.0, -1j]) / (TWO_PI_I * eta2))
    assert out["b2"] == pytest.approx(1.0 / (TWO_PI_I ** 2 * eta2 ** 2))


def test_weight_normalized_on_diagonal():
    w = default_weight(1.0, ambient_dimension=1)
    for z in (0.1, 0.3 + 0.2j, -0.5j):
        out = weight_vikt_eval(w, z, z)
        assert out["g0"] == pytest.approx(1.0)
        assert out["dbar_chi"] == 0


def test_weight_sigma_value():
    w = default_weight(1.0, ambient_dimension=1)
    out = weight_vikt_eval(w, 0.9, 0.0)
    assert out["sigma"] == pytest.approx(0.9 / (TWO_PI_I * 0.81))


def test_weight_denominator_guard():
    w = default_weight(1.0, ambient_dimension=1)
    with pytest.raises(DenominatorVanishesError):
        weight_vikt_eval(w, 0.5, 0.5)


# -- the cusp kernel factor -------------------------------------------------------

def test_factor_arithmetic_23():
    assert cusp_kernel_factor(2, 3, 2.0, 1.0) == pytest.approx(0.75)
    assert cusp_kernel_factor(2, 3, 1.0, 0.0) == pytest.approx(1.0)


def test_factor_diagonal_residue_coefficient():
    assert cusp_kernel_factor(2, 3, 0.7, 0.7) == pytest.approx(1.0)
    assert cusp_kernel_factor(3, 4, 0.5j, 0.5j) == pytest.approx(1.0)


def test_factor_near_root_pairing_guarded():
    # tau near a nontrivial cube root of unity times t: 0/0 in the raw
    # quotient, finite via the factored form
    t = 0.5
    omega = np.exp(2j * math.pi / 3)
    tau = omega * t * (1 + 1e-9)
    val = cusp_kernel_factor(2, 3, tau, t)
    assert np.isfinite(val.real) and np.isfinite(val.imag)
    # compare with a point at safe distance along the same path
    ref = cusp_kernel_factor(2, 3, omega * t * (1 + 1e-3), t)
    assert abs(val - ref) < 2e-2 * abs(ref)


def test_factor_joint_rescaling():
    # the polynomial pairing part is homogeneous of joint degree
    # (r-1)(s-1) - 1 and the pole contributes -(r-1)(s-1), so scaling
    # tau, t together multiplies the factor by 1/c
    for r, s in [(2, 3), (3, 4), (2, 5)]:
        v1 = cusp_kernel_factor(r, s, 0.8, 0.3 + 0.1j)
        c = 0.7 * np.exp(0.4j)
        v2 = cusp_kernel_factor(r, s, c * 0.8, c * (0.3 + 0.1j))
        assert v2 == pytest.approx(v1 / c, rel=1e-9)


def test_root_coeffs_23():
    assert nontrivial_root_coeffs(2, 3) == [1, -1, 1]
    assert split_tail_coeffs(2, 3) == [0, 1]


def test_root_coeffs_degree():
    for r, s in [(2, 3), (3, 4), (2, 5), (4, 5)]:
        b = nontrivial_root_coeffs(r, s)
        assert len(b) == (r - 1) * (s - 1) + 1
        assert b[-1] == 1
        # the product of (1 - w) over the nontrivial roots is rs/(r s) = 1
        assert sum(b) == 1
        roots = np.roots(b[::-1])
        assert np.allclose(np.abs(roots), 1.0)


def test_split_identity_pointwise():
    # factor(tau,t) = 1/(tau-t) - sum_i d_i t^{i-1}/tau^i, exactly
    for r, s in [(2, 3), (3, 4), (2, 5)]:
        d = split_tail_coeffs(r, s)
        rng = np.random.default_rng(3)
        for _ in range(20):
            tau = complex(*rng.normal(size=2))
            t = complex(*rng.normal(size=2)) * 0.3
            lhs = cusp_kernel_factor(r, s, tau, t)
            rhs = 1.0 / (tau - t) - sum(
                di * t ** (i - 1) / tau ** i for i, di in enumerate(d, 1))
            assert abs(lhs - rhs) < 1e-9 * (1 + abs(lhs))


# -- assembly ----------------------------------------------------------------------

def test_assembled_kernel_matches_closed_form():
    spec = make_cusp(2, 3, 1.0)
    kern = curve_kernel_assemble(spec, variant="general-codim-one")
    taus = np.array([0.5, 0.3 + 0.4j, -0.6, 0.7j, 0.2 - 0.5j])
    for t in (0.25, 0.1 + 0.2j):
        got = kern.factor(taus, t)
        want = cusp_kernel_factor(2, 3, taus, t)
        assert np.allclose(got, want, rtol=1e-10)


def test_assembled_kernel_at_example_point():
    spec = make_cusp(2, 3, 1.0)
    kern = curve_kernel_assemble(spec, variant="general-codim-one")
    got = kern.factor(np.array([2.0]), 1.0)[0]
    assert got == pytest.approx(0.75)


def test_branch_consistency_on_curve():
    spec = make_cusp(2, 3, 1.0)
    kern = curve_kernel_assemble(spec, variant="general-codim-one")
    taus = 0.7 * np.exp(1j * np.linspace(0.1, 6.2, 40))
    assert kern.consistency_defect(taus, 0.3 + 0.1j) < 1e-10


def test_disc_kernel_is_cauchy():
    kern = disc_kernel(1.0)
    assert kern.factor(np.array([0.5]), 0.2)[0] == pytest.approx(1 / 0.3)
    with pytest.raises(PoleAtDiagonalError):
        kern.factor(np.array([0.2]), 0.2)


def test_kernel_role_switch():
    kern = disc_kernel(1.0)
    assert kern.with_role("projection").role == "projection"


# -- boundary representation -------------------------------------------------------

def test_stout_reproduces_constants():
    spec = make_cusp(2, 3, 1.0)
    one = MultiPoly.const(TWO, 1)
    assert stout_boundary_kernel(spec, one, 0.3) == pytest.approx(1.0, abs=1e-9)


def test_stout_reproduces_monomials():
    spec = make_cusp(2, 3, 1.0)
    par = normalize(spec)
    for amb, order in [(_zvar("z2"), 2), (_zvar("z1"), 3),
                       (_zvar("z1") * _zvar("z2"), 5)]:
        for t in (0.3, 0.4 + 0.1j):
            got = stout_boundary_kernel(spec, amb, t)
            want = complex(amb.eval({
                "z1": eval_tau(par.gamma1, t), "z2": eval_tau(par.gamma2, t)
            }))
            assert abs(got - want) < 1e-9


def test_stout_example_z2_at_03():
    spec = make_cusp(2, 3, 1.0)
    assert stout_boundary_kernel(spec, _zvar("z2"), 0.3) \
        == pytest.approx(0.09, abs=1e-9)


def test_stout_requires_interior_target():
    spec = make_cusp(2, 3, 1.0)
    with pytest.raises(ValueError):
        stout_boundary_kernel(spec, MultiPoly.const(TWO, 1), 0.9)
