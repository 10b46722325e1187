from fractions import Fraction

import numpy as np
import pytest

from curvecurrents.polynomials import (
    AMBIENT_VARS,
    TAU_VARS,
    MultiPoly,
    eval_tau,
    parse_ambient_poly,
    parse_tau_poly,
    tau_poly,
)


def test_ring_operations_exact():
    x = MultiPoly.var(TAU_VARS, "tau")
    p = (x + 1) * (x - 1)
    assert p == x ** 2 - 1
    assert (p - p).is_zero()
    assert p.degree() == 2


def test_mixed_coefficients_keep_exact_types():
    p = tau_poly({1: Fraction(1, 3)}) + tau_poly({1: Fraction(2, 3)})
    assert p.coeff((1, 0)) == 1
    assert isinstance(p.coeff((1, 0)), (int, Fraction))


def test_partial_derivative():
    p = MultiPoly(TAU_VARS, {(2, 1): 3})
    assert p.partial("tau") == MultiPoly(TAU_VARS, {(1, 1): 6})
    assert p.partial("taubar") == MultiPoly(TAU_VARS, {(2, 0): 3})


def test_conjugated_swaps_and_conjugates():
    p = MultiPoly(TAU_VARS, {(2, 0): 1j})
    q = p.conjugated({"tau": "taubar", "taubar": "tau"})
    assert q == MultiPoly(TAU_VARS, {(0, 2): -1j})


def test_subs_composition():
    z = MultiPoly.var(("z",), "z")
    gamma = MultiPoly(TAU_VARS, {(3, 0): 1})
    composed = (z ** 2).subs({"z": gamma})
    assert composed == MultiPoly(TAU_VARS, {(6, 0): 1})


def test_eval_broadcasts():
    p = MultiPoly(TAU_VARS, {(1, 1): 1})
    tau = np.array([1 + 1j, 2j])
    vals = eval_tau(p, tau)
    assert np.allclose(vals, np.abs(tau) ** 2)


def test_parse_tau_poly_exact_fractions():
    p = parse_tau_poly("3*(conj(t)^9 + conj(t)^10)")
    assert p.coeff((0, 9)) == 3 and p.coeff((0, 10)) == 3
    q = parse_tau_poly("t^2/10")
    assert q.coeff((2, 0)) == Fraction(1, 5) + Fraction(1, 10)


def test_parse_ambient_poly_names():
    p = parse_ambient_poly("conj(w)*z - 2")
    assert p.coeff((1, 0, 0, 1)) == 1
    assert p.coeff((0, 0, 0, 0)) == -2
    assert p.vars == AMBIENT_VARS


def test_parse_rejects_unknown_names():
    with pytest.raises(ValueError):
        parse_tau_poly("q + 1")


def test_truncated():
    p = MultiPoly(TAU_VARS, {(5, 0): 1, (1, 1): 2})
    assert p.truncated(2) == MultiPoly(TAU_VARS, {(1, 1): 2})
