"""Acceptance suite: every criterion at its stated tolerance.

Each test prints a pass/fail line (visible with ``pytest -s`` or in the
``selftest`` CLI output, which runs the same records).
"""

import pytest

from curvecurrents import selftest


def _check(record):
    status = "PASS" if record["passed"] else "FAIL"
    print(f"{status} criterion {record['criterion']}: {record['name']} "
          f"(max_err={record['max_err']:.3e}, tol={record['tol']:.0e})")
    assert record["passed"], record


def test_criterion_01_cauchy_pompeiu_baseline():
    rec = selftest.criterion_1()
    assert rec["tol"] == 1e-6
    _check(rec)


def test_criterion_02_residue_oracle_equivalence():
    rec = selftest.criterion_2()
    assert rec["tol"] == 1e-4
    assert rec["details"]["cases"] == 125
    _check(rec)


def test_criterion_03_coleff_herrera_tensor_oracle():
    rec = selftest.criterion_3()
    assert rec["tol"] == 1e-3
    _check(rec)


def test_criterion_04_hefer_identity_exact():
    _check(selftest.criterion_4())


def test_criterion_05_structure_form_exact():
    _check(selftest.criterion_5())


def test_criterion_06_holomorphic_reproduction_on_cusp():
    rec = selftest.criterion_6()
    assert rec["tol"] == 1e-3
    _check(rec)


def test_criterion_07_koppelman_identity_on_cusp():
    rec = selftest.criterion_7()
    assert rec["tol"] == 1e-3
    assert len(rec["details"]["per_form"]) == 2
    _check(rec)


def test_criterion_08_membership_and_correction():
    rec = selftest.criterion_8()
    assert rec["tol"] == 1e-3
    assert rec["details"]["solve"]["membership_after"]
    _check(rec)


def test_criterion_09_negative_example_certificate():
    rec = selftest.criterion_9()
    assert rec["details"]["negative_example"] == "infeasible"
    assert rec["details"]["positive_control"] == "feasible"
    _check(rec)


def test_criterion_10_sep():
    rec = selftest.criterion_10()
    assert rec["tol"] == 1e-4
    _check(rec)


def test_criterion_11_determinism():
    _check(selftest.criterion_11())
