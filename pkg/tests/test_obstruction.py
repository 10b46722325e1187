from fractions import Fraction

import pytest

from curvecurrents.curves import make_parametrized, normalize, parse_gamma
from curvecurrents.errors import JetOrderError
from curvecurrents.obstruction import (
    build_jet_system,
    certificate_applies,
    feasibility,
    witness_reproduces,
)
from curvecurrents.polynomials import TAU_VARS, MultiPoly, parse_tau_poly


def _param(g1, g2):
    return normalize(make_parametrized(parse_gamma(g1), parse_gamma(g2), 1.0))

INTRO = _param("t^3", "t^7+t^8")
CUSP23 = _param("t^2", "t^3")
MU_INTRO = parse_tau_poly("3*(conj(t)^9 + conj(t)^10)")


def test_target_is_termwise_primitive():
    sys = build_jet_system(INTRO, MU_INTRO, D=12)
    assert sys.target[(0, 10)] == Fraction(3, 10)
    assert sys.target[(0, 11)] == Fraction(3, 11)


def test_columns_are_exact_rationals():
    sys = build_jet_system(INTRO, MU_INTRO, D=12)
    for _, vec in sys.columns:
        assert all(isinstance(v, Fraction) for v in vec.values())


def test_holomorphic_columns_are_free():
    sys = build_jet_system(INTRO, MU_INTRO, D=12)
    labels = [label for label, _ in sys.columns]
    assert ("hol", 0) in labels and ("hol", 12) in labels


def test_intro_example_infeasible_with_certificate():
    sys = build_jet_system(INTRO, MU_INTRO, D=12)
    verdict = feasibility(sys)
    assert verdict.kind == "infeasible"
    assert verdict.smooth_solvability == "impossible"
    assert certificate_applies(sys, verdict.certificate)
    # the certificate must see the target
    total = sum(verdict.certificate.get(e, Fraction(0)) * v
                for e, v in sys.target.items())
    assert total != 0


def test_infeasibility_monotone_in_ambient_order():
    # same target truncation, one more ambient order: still infeasible
    for D in (12, 13):
        sys = build_jet_system(INTRO, MU_INTRO, D=D, parameter_order=12)
        assert feasibility(sys).kind == "infeasible"


def test_certificate_kills_all_pullbacks_at_higher_order():
    sys12 = build_jet_system(INTRO, MU_INTRO, D=12, parameter_order=12)
    cert = feasibility(sys12).certificate
    sys13 = build_jet_system(INTRO, MU_INTRO, D=13, parameter_order=12)
    assert certificate_applies(sys13, cert)


def test_positive_control_witness():
    mu = parse_tau_poly("2*conj(t)")
    sys = build_jet_system(CUSP23, mu, D=4)
    verdict = feasibility(sys)
    assert verdict.kind == "feasible"
    assert verdict.smooth_solvability == "inconclusive"
    assert verdict.witness == {("mono", 0, 1, 0, 0): 1}
    assert witness_reproduces(sys, verdict.witness)


def test_zero_target_feasible():
    sys = build_jet_system(CUSP23, MultiPoly.zero(TAU_VARS), D=4)
    verdict = feasibility(sys)
    assert verdict.kind == "feasible"
    assert verdict.witness == {}


def test_order_too_small():
    with pytest.raises(JetOrderError) as err:
        build_jet_system(INTRO, MU_INTRO, D=8)
    assert err.value.required_order == 11


def test_rejects_float_data():
    mu = MultiPoly(TAU_VARS, {(0, 1): 0.5})
    with pytest.raises(ValueError):
        build_jet_system(CUSP23, mu, D=4)


def test_mixed_datum_supported():
    # mixed tau/taubar data go through the same construction
    mu = parse_tau_poly("2*conj(t) + t*conj(t)")
    sys = build_jet_system(CUSP23, mu, D=6)
    verdict = feasibility(sys)
    if verdict.kind == "infeasible":
        assert certificate_applies(sys, verdict.certificate)
    else:
        assert witness_reproduces(sys, verdict.witness)
