"""The acceptance suite: one callable per criterion, shared by the CLI
``selftest`` command and the pytest acceptance module.

Each criterion function returns a record dict with a boolean ``passed``,
the measured worst error, the tolerance it was held to, and enough
detail to audit the run.  Records are deterministic: fixed grids, fixed
targets, no randomness.
"""

from __future__ import annotations

import json
import math
import warnings

import numpy as np

from .curves import (
    make_cusp,
    make_disc,
    make_parametrized,
    normalize,
    pullback_form,
    pullback_function,
    structure_form,
)
from .kernels import curve_kernel_assemble, disc_kernel, hefer, stout_boundary_kernel
from .obstruction import (
    build_jet_system,
    certificate_applies,
    feasibility,
    witness_reproduces,
)
from .operators import (
    apply_P,
    correct_solution,
    extract_residue_coeffs,
    membership_test,
    solve_dbar,
    verify_koppelman,
)
from .polynomials import AMBIENT_VARS, TAU_VARS, MultiPoly, eval_tau, parse_tau_poly
from .regularization import RegularizationSchedule, default_schedule
from .residues import (
    TestForm,
    ch_product_pair,
    ch_tensor_oracle,
    monomial_form,
    residue_oracle,
    residue_pair,
    residue_restriction,
    sep_restrict,
)

TWO_PI = 2.0 * math.pi


def _ring_targets(radii, count, jitter=0.37):
    """Deterministic well-spread targets on the given radii."""
    out = []
    k = 0
    while len(out) < count:
        r = radii[k % len(radii)]
        ang = TWO_PI * ((k * jitter) % 1.0)
        out.append(r * complex(math.cos(ang), math.sin(ang)))
        k += 1
    return out


def _record(num, name, passed, max_err, tol, details=None):
    return {
        "criterion": num,
        "name": name,
        "passed": bool(passed),
        "max_err": float(max_err),
        "tol": float(tol),
        "details": details or {},
    }


# ---------------------------------------------------------------------------

def criterion_1():
    """Cauchy-Pompeiu baseline on the smooth disc."""
    tol = 1e-6
    pk = disc_kernel(1.0, role="projection")
    targets = _ring_targets([0.1, 0.18, 0.25], 10)
    worst = 0.0
    for k in range(5):
        phi = MultiPoly(TAU_VARS, {(k, 0): 1})
        vals = apply_P(pk, phi, targets)
        for v, t in zip(vals, targets):
            exact = t ** k
            worst = max(worst, abs(v.value - exact) / max(abs(exact), 1e-30))
    phi0 = TestForm(MultiPoly(TAU_VARS, {(0, 1): 1}), 0.3, degree=0,
                    smoothness_class="ambient-pullback")
    rep = verify_koppelman(make_disc(1.0), phi0, targets)
    worst = max(worst, rep.max_residual)
    return _record(1, "cauchy-pompeiu baseline (disc)", worst <= tol, worst,
                   tol, {"koppelman_residual": rep.max_residual})


def criterion_2():
    """Residue pairings against the derivative oracle."""
    tol = 1e-4
    worst = 0.0
    for m in range(1, 6):
        for a in range(5):
            for b in range(5):
                psi = monomial_form(a, b, 0.4)
                got = residue_pair(m, psi)
                want = residue_oracle(m, psi)
                worst = max(worst, abs(got.value - want) / TWO_PI)
    return _record(2, "residue pairing vs derivative oracle", worst <= tol,
                   worst, tol, {"cases": 125})


def criterion_3():
    """Iterated two-variable products against the tensor oracle."""
    tol = 1e-3
    scale = TWO_PI ** 2
    worst = 0.0
    monos = [
        (a, b, c, d)
        for a in range(3) for b in range(3) for c in range(3) for d in range(3)
        if a + b + c + d <= 2
    ]
    for p in range(1, 4):
        for q in range(1, 4):
            for exps in monos:
                psi = MultiPoly(AMBIENT_VARS, {exps: 1})
                got = ch_product_pair(p, q, psi)
                want = ch_tensor_oracle(p, q, psi)
                worst = max(worst, abs(got.value - want) / scale)
    return _record(3, "coleff-herrera vs tensor oracle", worst <= tol, worst,
                   tol, {"cases": 9 * len(monos)})


def criterion_4():
    """Divided-difference identity is the zero polynomial, exactly."""
    two = ("z1", "z2")
    z1, z2 = MultiPoly.var(two, "z1"), MultiPoly.var(two, "z2")
    cases = [z1 ** 2 - z2 ** 3, z1 ** 3 - z2 ** 4, z1 ** 2 - z2 ** 5]
    ok = all(hefer(a).identity_defect().is_zero() for a in cases)
    return _record(4, "hefer identity exact", ok, 0.0 if ok else 1.0, 0.0,
                   {"cases": 3})


def criterion_5():
    """Structure forms of monomial cusps, exact."""
    ok = True
    for r, s in [(2, 3), (2, 5), (3, 4)]:
        sf = structure_form(make_cusp(r, s, 1.0))
        ok = ok and sf.pole_order == (r - 1) * (s - 1)
        ok = ok and sf.constant_factor == -2j * math.pi
        ok = ok and sf.numerator == MultiPoly.const(TAU_VARS, 1)
    return _record(5, "structure form exact", ok, 0.0 if ok else 1.0, 0.0,
                   {"cases": 3})


def criterion_6():
    """Holomorphic reproduction on the cusp through P and the boundary
    formula."""
    tol = 1e-3
    spec = make_cusp(2, 3, 1.0)
    pk = curve_kernel_assemble(spec, role="projection")
    targets = _ring_targets([0.22, 0.35, 0.48, 0.6], 10)
    two = ("z1", "z2")
    ambient = {
        0: MultiPoly.const(two, 1),
        2: MultiPoly.var(two, "z2"),
        3: MultiPoly.var(two, "z1"),
        4: MultiPoly.var(two, "z2") ** 2,
    }
    worst = 0.0
    for k, amb in ambient.items():
        phi = MultiPoly(TAU_VARS, {(k, 0): 1})
        vals = apply_P(pk, phi, targets)
        for v, t in zip(vals, targets):
            exact = t ** k
            worst = max(worst, abs(v.value - exact) / max(abs(exact), 1e-30))
        for t in targets:
            got = stout_boundary_kernel(spec, amb, t)
            exact = t ** k
            worst = max(worst, abs(got - exact) / max(abs(exact), 1e-30))
    return _record(6, "holomorphic reproduction on cusp", worst <= tol, worst,
                   tol, {"monomial_orders": [0, 2, 3, 4]})


def criterion_7():
    """Koppelman identity for (0,1) pullback forms on the cusp."""
    tol = 1e-3
    spec = make_cusp(2, 3, 1.0)
    par = normalize(spec)
    rho0 = par.disc_radius
    sr = 0.32 * rho0
    forms = [
        pullback_form(par, (MultiPoly.var(AMBIENT_VARS, "z2b"),
                            MultiPoly.zero(AMBIENT_VARS)), sr),
        pullback_form(par, (MultiPoly.zero(AMBIENT_VARS),
                            MultiPoly.var(AMBIENT_VARS, "z1")), sr),
    ]
    targets = _ring_targets([0.25 * rho0, 0.4 * rho0, 0.55 * rho0], 20)
    worst = 0.0
    residuals = []
    for phi in forms:
        rep = verify_koppelman(spec, phi, targets)
        residuals.append(rep.max_residual)
        worst = max(worst, rep.max_residual)
    return _record(7, "koppelman identity on cusp", worst <= tol, worst, tol,
                   {"per_form": residuals})


def criterion_8():
    """Strong-domain membership, extraction, and correction."""
    tol = 1e-3
    spec = make_cusp(2, 3, 1.0)
    kern = curve_kernel_assemble(spec)
    par = kern.param
    omega = kern.structure
    rho0 = par.disc_radius
    sched = default_schedule(rho0)
    sr = 0.28 * rho0
    details = {}
    ok = True

    # (a) smooth pullbacks pass, with a decaying primary trace
    z1_z2b = MultiPoly.var(AMBIENT_VARS, "z1") * MultiPoly.var(AMBIENT_VARS, "z2b")
    for name, amb in [("z1b", MultiPoly.var(AMBIENT_VARS, "z1b")),
                      ("z1*z2b", z1_z2b)]:
        u = pullback_function(par, amb, sr)
        verdict = membership_test(u.coeff, omega, sched,
                                  semigroup_generators=(2, 3))
        spread = max(abs(v) for _, v in verdict.trace)
        ratio_ok = spread <= 1e-9 or verdict.last_ratio <= tol
        details[f"membership[{name}]"] = {
            "passed": verdict.passed, "last_ratio": verdict.last_ratio,
        }
        ok = ok and verdict.passed and ratio_ok

    # (b) solve with correction
    psi = pullback_function(par, MultiPoly.var(AMBIENT_VARS, "z1b"), sr)
    mu = TestForm(psi.poly.partial("taubar"), sr, degree=1,
                  smoothness_class="ambient-pullback")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = solve_dbar(spec, mu)
    details["solve"] = {
        "membership_after": rep.membership_after.passed,
        "max_dbar_residual": rep.max_dbar_residual,
    }
    ok = ok and rep.membership_after.passed and rep.max_dbar_residual <= tol

    # (c) planted meromorphic tail
    planted = 0.7 - 0.3j
    smooth = pullback_function(par, MultiPoly.var(AMBIENT_VARS, "z2"), sr)

    def u1(tau):
        tau = np.asarray(tau, dtype=complex)
        return smooth.coeff(tau) + planted / tau

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        coeffs = extract_residue_coeffs(u1, omega, schedule=sched)
    recovered = coeffs.c[omega.pole_order] / omega.constant_factor
    plant_err = abs(recovered - planted) / abs(planted)
    u, _, _ = correct_solution(u1, coeffs, omega)
    verdict_c = membership_test(u, omega, sched, semigroup_generators=(2, 3))
    details["planted"] = {"relative_error": plant_err,
                          "restored": verdict_c.passed}
    ok = ok and plant_err <= tol and verdict_c.passed
    worst = max(plant_err, rep.max_dbar_residual)
    return _record(8, "membership and correction", ok, worst, tol, details)


def criterion_9():
    """Smooth non-solvability certificate and the positive control."""
    g1 = MultiPoly(TAU_VARS, {(3, 0): 1})
    g2 = MultiPoly(TAU_VARS, {(7, 0): 1, (8, 0): 1})
    par = normalize(make_parametrized(g1, g2, 1.0))
    mu = parse_tau_poly("3*(conj(t)^9 + conj(t)^10)")
    sys = build_jet_system(par, mu, D=12)
    verdict = feasibility(sys)
    infeasible_ok = (verdict.kind == "infeasible"
                     and certificate_applies(sys, verdict.certificate))

    par2 = normalize(make_parametrized(MultiPoly(TAU_VARS, {(2, 0): 1}),
                                       MultiPoly(TAU_VARS, {(3, 0): 1}), 1.0))
    sys2 = build_jet_system(par2, parse_tau_poly("2*conj(t)"), D=4)
    verdict2 = feasibility(sys2)
    witness_ok = (verdict2.kind == "feasible"
                  and witness_reproduces(sys2, verdict2.witness)
                  and verdict2.witness == {("mono", 0, 1, 0, 0): 1})
    ok = infeasible_ok and witness_ok
    return _record(9, "jet obstruction certificates", ok, 0.0 if ok else 1.0,
                   0.0, {
                       "negative_example": verdict.kind,
                       "certificate_rows": sorted(
                           f"{m},{n}" for (m, n) in (verdict.certificate or {})
                       ),
                       "positive_control": verdict2.kind,
                   })


def criterion_10():
    """Standard extension property of principal values; residue contrast."""
    tol = 1e-4
    worst = 0.0
    for m in range(1, 4):
        psi = monomial_form(m - 1, 0, 0.4)
        got = sep_restrict(m, psi)
        worst = max(worst, abs(got.value) / TWO_PI)
        psi2 = monomial_form(m, 1, 0.4)
        got2 = sep_restrict(m, psi2)
        worst = max(worst, abs(got2.value) / TWO_PI)
    contrast = residue_restriction(1, monomial_form(0, 0, 0.4))
    contrast_err = abs(contrast.value - 2j * math.pi) / TWO_PI
    worst = max(worst, contrast_err)
    return _record(10, "sep restriction and residue contrast", worst <= tol,
                   worst, tol, {"contrast_error": contrast_err})


CRITERIA = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
]


def run_core():
    return [fn() for fn in CRITERIA]


def criterion_11(first=None):
    """Byte-identical JSON across two full runs."""
    first = first if first is not None else run_core()
    second = run_core()
    s1 = json.dumps(first, sort_keys=True)
    s2 = json.dumps(second, sort_keys=True)
    ok = s1 == s2
    return _record(11, "deterministic selftest output", ok,
                   0.0 if ok else 1.0, 0.0, {"bytes": len(s1)})


def run_all():
    records = run_core()
    records.append(criterion_11(records))
    return records
