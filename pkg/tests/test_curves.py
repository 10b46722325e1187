import math

import numpy as np
import pytest

from curvecurrents.curves import (
    curve_from_config,
    curve_to_config,
    make_cusp,
    make_disc,
    make_implicit,
    make_parametrized,
    normalize,
    parse_gamma,
    pullback_form,
    pullback_function,
    sing_distance,
    structure_form,
)
from curvecurrents.polynomials import AMBIENT_VARS, TAU_VARS, MultiPoly, eval_tau


def test_make_cusp_basic():
    spec = make_cusp(2, 3, 1.0)
    assert spec.kind == "cusp" and not spec.smooth
    a = spec.defining_polynomial()
    assert a.coeff((2, 0)) == 1 and a.coeff((0, 3)) == -1


def test_make_cusp_smooth_flag():
    assert make_cusp(1, 2, 1.0).smooth


def test_make_cusp_rejects_common_factor():
    with pytest.raises(ValueError):
        make_cusp(2, 4, 1.0)


def test_normalize_cusp_radius():
    par = normalize(make_cusp(2, 3, 1.0))
    assert eval_tau(par.gamma1, 0.5) == pytest.approx(0.125)
    assert eval_tau(par.gamma2, 0.5) == pytest.approx(0.25)
    rho = par.disc_radius
    # rho solves rho^6 + rho^4 = 1
    assert rho ** 6 + rho ** 4 == pytest.approx(1.0, abs=1e-10)
    assert rho == pytest.approx(0.868836961832585, abs=1e-9)


def test_normalize_map_passthrough():
    g1 = parse_gamma("t^3")
    g2 = parse_gamma("t^7 + t^8")
    par = normalize(make_parametrized(g1, g2, 1.0))
    assert par.gamma1 == g1 and par.gamma2 == g2
    m = par.norm(par.disc_radius)
    assert m == pytest.approx(1.0, abs=1e-9)


def test_normalize_smooth_graph():
    par = normalize(make_cusp(1, 2, 1.0))
    assert par.gamma1.degree_in("tau") == 2
    assert par.gamma2.degree_in("tau") == 1


def test_normalize_implicit_monomial_only():
    two = ("z1", "z2")
    a = MultiPoly.var(two, "z1") ** 2 - MultiPoly.var(two, "z2") ** 3
    par = normalize(make_implicit(a, 1.0))
    assert par.gamma1.degree_in("tau") == 3
    b = (MultiPoly.var(two, "z1") ** 2 - MultiPoly.var(two, "z2") ** 3
         + MultiPoly.var(two, "z1"))
    with pytest.raises(ValueError):
        normalize(make_implicit(b, 1.0))


def test_parametrization_vanishes_at_zero_required():
    with pytest.raises(ValueError):
        make_parametrized(parse_gamma("t + 1"), parse_gamma("t^2"), 1.0)


def test_parametrization_injectivity_rejected():
    # tau -> (tau^2, tau^4) glues tau and -tau
    with pytest.raises(ValueError):
        make_parametrized(parse_gamma("t^2"), parse_gamma("t^4"), 1.0)


def test_defining_poly_vanishes_on_curve_exactly():
    for r, s in [(2, 3), (3, 4), (2, 5)]:
        spec = make_cusp(r, s, 1.0)
        par = normalize(spec)
        a = spec.defining_polynomial()
        pulled = a.subs({"z1": par.gamma1, "z2": par.gamma2})
        assert pulled.is_zero()


def test_pullback_intro_example():
    par = normalize(make_parametrized(parse_gamma("t^3"),
                                      parse_gamma("t^7+t^8"), 1.0))
    P = MultiPoly.var(AMBIENT_VARS, "z2b")
    Q = MultiPoly.zero(AMBIENT_VARS)
    tf = pullback_form(par, (P, Q), 0.3)
    assert tf.poly == MultiPoly(TAU_VARS, {(0, 9): 3, (0, 10): 3})
    assert tf.degree == 1
    assert tf.smoothness_class == "ambient-pullback"


def test_pullback_chain_rule():
    par = normalize(make_cusp(2, 3, 1.0))   # gamma = (tau^3, tau^2)
    P = MultiPoly.zero(AMBIENT_VARS)
    Q = MultiPoly.const(AMBIENT_VARS, 1)
    tf = pullback_form(par, (P, Q), 0.3)
    assert tf.poly == MultiPoly(TAU_VARS, {(0, 1): 2})


def test_pullback_zero_form():
    par = normalize(make_cusp(2, 3, 1.0))
    z = MultiPoly.zero(AMBIENT_VARS)
    tf = pullback_form(par, (z, z), 0.3)
    assert tf.poly.is_zero()


def test_pullback_linear_in_coefficients():
    par = normalize(make_cusp(2, 3, 1.0))
    P1 = MultiPoly.var(AMBIENT_VARS, "z1b")
    P2 = MultiPoly.var(AMBIENT_VARS, "z2")
    z = MultiPoly.zero(AMBIENT_VARS)
    t1 = pullback_form(par, (P1, z), 0.3)
    t2 = pullback_form(par, (P2, z), 0.3)
    t12 = pullback_form(par, (P1 + 2 * P2, z), 0.3)
    assert t12.poly == t1.poly + 2 * t2.poly


@pytest.mark.parametrize("r,s", [(2, 3), (2, 5), (3, 4), (3, 5), (4, 5)])
def test_structure_form_pole_order(r, s):
    sf = structure_form(make_cusp(r, s, 1.0))
    assert sf.pole_order == (r - 1) * (s - 1)
    assert sf.constant_factor == -2j * math.pi
    assert sf.numerator == MultiPoly.const(TAU_VARS, 1)


def test_structure_form_smooth_case():
    sf = structure_form(make_cusp(1, 2, 1.0))
    assert sf.pole_order == 0


def test_structure_form_needs_embedding():
    spec = make_parametrized(parse_gamma("t^3"), parse_gamma("t^7+t^8"), 1.0)
    with pytest.raises(ValueError):
        structure_form(spec)


def test_sing_distance():
    spec = make_cusp(2, 3, 1.0)
    assert sing_distance(spec, 0.0) == 0.0
    assert sing_distance(spec, 0.5) == pytest.approx(
        math.hypot(0.125, 0.25))
    assert sing_distance(make_cusp(1, 2, 1.0), 0.3) == math.inf


def test_sing_distance_monotone():
    spec = make_cusp(2, 3, 1.0)
    ts = np.linspace(0.05, 0.8, 12)
    d = [sing_distance(spec, t) for t in ts]
    assert all(a < b for a, b in zip(d, d[1:]))


def test_config_roundtrip_cusp():
    spec = make_cusp(2, 5, 1.25)
    back = curve_from_config(curve_to_config(spec))
    assert back == spec


def test_config_roundtrip_map():
    spec = make_parametrized(parse_gamma("t^3"), parse_gamma("t^7+t^8"), 1.0)
    back = curve_from_config(curve_to_config(spec))
    assert back.gamma1 == spec.gamma1 and back.gamma2 == spec.gamma2


def test_disc_spec():
    spec = make_disc(1.0)
    assert spec.smooth
    assert normalize(spec).disc_radius == pytest.approx(1.0, abs=1e-9)
