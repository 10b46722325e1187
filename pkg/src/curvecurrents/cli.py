"""Command-line front end.

Subcommands: ``residue``, ``kernel eval``, ``koppelman``, ``reproduce``,
``solve-dbar``, ``membership``, ``obstruction``, ``selftest``.  Results
are emitted as line-delimited JSON records
``{command, params, value_re, value_im, error, trace?, verdict?}`` and,
when an output path is given with csv format, as tables with the header
``t_re,t_im,value_re,value_im,error``.

Exit codes: 0 success, 1 validation failure, 2 non-convergent or
diverging regularization, 3 acceptance failure from ``selftest``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import selftest as selftest_mod
from .config import RunConfig, apply_overrides, load_config, parse_curve_arg
from .curves import normalize, pullback_form, structure_form
from .errors import (
    CurveCurrentsError,
    DivergingLimitError,
    JetOrderError,
    NonConvergentError,
)
from .kernels import curve_kernel_assemble, cusp_kernel_factor, disc_kernel, \
    stout_boundary_kernel
from .obstruction import build_jet_system, feasibility
from .operators import apply_P, membership_test, solve_dbar, verify_koppelman
from .polynomials import AMBIENT_VARS, TAU_VARS, MultiPoly, parse_tau_poly
from .residues import TestForm, residue_oracle, residue_pair


def _record(command, params, value=None, error=None, trace=None, verdict=None):
    rec = {"command": command, "params": params}
    if value is not None:
        rec["value_re"] = float(np.real(value))
        rec["value_im"] = float(np.imag(value))
    if error is not None:
        rec["error"] = float(error)
    if trace is not None:
        rec["trace"] = [[float(d), float(np.real(v)), float(np.imag(v))]
                        for d, v in trace]
    if verdict is not None:
        rec["verdict"] = verdict
    return rec


def _emit(records, cfg: RunConfig, csv_rows=None):
    for rec in records:
        print(json.dumps(rec))
    if not cfg.output_path:
        return
    if cfg.output_format == "json":
        with open(cfg.output_path, "w") as fh:
            for rec in records:
                fh.write(json.dumps(rec) + "\n")
    else:
        with open(cfg.output_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t_re", "t_im", "value_re", "value_im", "error"])
            for row in csv_rows or []:
                writer.writerow([repr(float(x)) for x in row])


def _targets_for(disc_radius, count):
    return selftest_mod._ring_targets(
        [0.25 * disc_radius, 0.4 * disc_radius, 0.55 * disc_radius], count
    )


def _pmap(fn, items, jobs):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_residue(args, cfg: RunConfig) -> int:
    psi_poly = parse_tau_poly(args.psi)
    psi = TestForm(psi_poly, args.support, degree=0)
    schedule = cfg.schedule(psi.support_radius)
    result = residue_pair(args.m, psi, schedule, cfg.quadrature())
    oracle = residue_oracle(args.m, psi)
    rec = _record(
        "residue",
        {"m": args.m, "psi": args.psi, "support": args.support,
         "oracle_re": oracle.real, "oracle_im": oracle.imag},
        value=result.value, error=result.error_estimate, trace=result.trace,
    )
    _emit([rec], cfg)
    return 0


def cmd_kernel(args, cfg: RunConfig) -> int:
    if args.action != "eval":
        raise ValueError(f"unknown kernel action {args.action!r}")
    spec = cfg.curve or parse_curve_arg("cusp:2,3")
    role = "solution" if args.role == "k" else "projection"
    kernel = curve_kernel_assemble(spec, role=role) if spec.kind != "map" \
        else disc_kernel(spec.ball_radius, role=role)
    tau, t = complex(args.tau), complex(args.t)
    value = kernel.factor(np.array([tau]), t)[0]
    params = {"curve": args.curve or "cusp:2,3", "role": args.role,
              "tau": [tau.real, tau.imag], "t": [t.real, t.imag]}
    diag = {}
    if kernel.variant != "smooth-disc":
        r, s = kernel.r, kernel.s
        diag = {
            "eta_s": abs(tau ** s - t ** s),
            "eta_r": abs(tau ** r - t ** r),
            "closed_form": [np.real(cusp_kernel_factor(r, s, tau, t)),
                            np.imag(cusp_kernel_factor(r, s, tau, t))],
        }
    rec = _record("kernel", params, value=value, error=0.0, verdict=None)
    rec["conditioning"] = diag
    _emit([rec], cfg)
    return 0


def cmd_koppelman(args, cfg: RunConfig) -> int:
    spec = cfg.curve or parse_curve_arg("cusp:2,3")
    par = normalize(spec)
    sr = 0.32 * par.disc_radius
    forms = [
        ("dz2b-pullback", pullback_form(par, (MultiPoly.var(AMBIENT_VARS, "z2b"),
                                              MultiPoly.zero(AMBIENT_VARS)), sr)),
        ("z1-dz1b-pullback", pullback_form(par, (MultiPoly.zero(AMBIENT_VARS),
                                                 MultiPoly.var(AMBIENT_VARS, "z1")), sr)),
    ]
    targets = _targets_for(par.disc_radius, args.targets)
    quad = cfg.quadrature()
    records, rows = [], []
    reports = _pmap(lambda nf: (nf[0], verify_koppelman(spec, nf[1], targets,
                                                        quad)),
                    forms, cfg.jobs)
    for name, rep in reports:
        records.append(_record(
            "koppelman",
            {"curve": args.curve or "cusp:2,3", "form": name,
             "targets": len(targets), "fd_step": rep.fd_step},
            value=rep.max_residual, error=rep.max_residual,
            verdict="pass" if rep.max_residual <= args.tolerance else "fail",
        ))
        for t, residual, qerr, _ in rep.rows:
            rows.append((t.real, t.imag, residual, 0.0, qerr))
    _emit(records, cfg, csv_rows=rows)
    return 0


def cmd_reproduce(args, cfg: RunConfig) -> int:
    spec = cfg.curve or parse_curve_arg("cusp:2,3")
    if spec.kind == "map":
        kernel = disc_kernel(spec.ball_radius, role="projection")
        orders = [0, 1, 2, 3, 4]
        two = None
    else:
        kernel = curve_kernel_assemble(spec, role="projection")
        r, s = spec.r, spec.s
        orders = sorted({0, r, s, 2 * r})
        two = ("z1", "z2")
    rho0 = kernel.param.disc_radius
    targets = _targets_for(rho0, args.targets)
    quad = cfg.quadrature()
    records, rows = [], []
    for k in orders:
        phi = MultiPoly(TAU_VARS, {(k, 0): 1})
        vals = apply_P(kernel, phi, targets, quad)
        worst = 0.0
        for v, t in zip(vals, targets):
            err = abs(v.value - t ** k) / max(abs(t ** k), 1e-30)
            worst = max(worst, err)
            rows.append((t.real, t.imag, v.value.real, v.value.imag,
                         v.error_estimate))
        rec = _record("reproduce", {"curve": args.curve or "cusp:2,3",
                                    "monomial_order": k,
                                    "route": "projection"},
                      value=worst, error=worst,
                      verdict="pass" if worst <= args.tolerance else "fail")
        records.append(rec)
        if spec.kind == "cusp":
            amb = {0: MultiPoly.const(two, 1), r: MultiPoly.var(two, "z2"),
                   s: MultiPoly.var(two, "z1"),
                   2 * r: MultiPoly.var(two, "z2") ** 2}[k]
            worst_b = max(
                abs(stout_boundary_kernel(spec, amb, t) - t ** k)
                / max(abs(t ** k), 1e-30)
                for t in targets
            )
            records.append(_record(
                "reproduce", {"curve": args.curve, "monomial_order": k,
                              "route": "boundary"},
                value=worst_b, error=worst_b,
                verdict="pass" if worst_b <= args.tolerance else "fail"))
    _emit(records, cfg, csv_rows=rows)
    return 0


def cmd_solve_dbar(args, cfg: RunConfig) -> int:
    spec = cfg.curve or parse_curve_arg("cusp:2,3")
    mu_poly = parse_tau_poly(args.mu)
    par = normalize(spec)
    sr = args.support if args.support else 0.28 * par.disc_radius
    mu = TestForm(mu_poly, sr, degree=1, smoothness_class="ambient-pullback")
    schedule = cfg.schedule(par.disc_radius)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = solve_dbar(spec, mu, schedule, cfg.quadrature())
    coeff_list = [[j, c.real if hasattr(c, "real") else float(c),
                   c.imag if hasattr(c, "imag") else 0.0]
                  for j, c in enumerate(report.coefficients.c)]
    rec = _record(
        "solve-dbar",
        {"curve": args.curve or "cusp:2,3", "mu": args.mu, "support": sr,
         "correction": report.correction.description,
         "coefficients": coeff_list,
         "membership_before": report.membership_before.passed,
         "membership_after": report.membership_after.passed},
        value=report.max_dbar_residual, error=report.max_dbar_residual,
        trace=report.membership_after.trace,
        verdict="pass" if report.passed else "fail",
    )
    rows = [(t.real, t.imag, u.real, u.imag, 0.0)
            for t, u in report.raw_solution_samples]
    _emit([rec], cfg, csv_rows=rows)
    return 0 if report.passed else 2


def cmd_membership(args, cfg: RunConfig) -> int:
    spec = cfg.curve or parse_curve_arg("cusp:2,3")
    omega = structure_form(spec)
    par = normalize(spec)
    u_poly = parse_tau_poly(args.u)
    m = args.pole

    def u(tau):
        tau = np.asarray(tau, dtype=complex)
        vals = u_poly.eval({"tau": tau, "taubar": np.conj(tau)})
        return vals / tau ** m if m else vals

    schedule = cfg.schedule(par.disc_radius)
    gens = (spec.r, spec.s) if spec.kind == "cusp" else None
    verdict = membership_test(u, omega, schedule, semigroup_generators=gens)
    growth = {str(j): g for j, g in verdict.growth.items()}
    rec = _record(
        "membership",
        {"curve": args.curve or "cusp:2,3", "u": args.u, "pole": m,
         "last_ratio": verdict.last_ratio, "growth": growth},
        value=verdict.probe_values[0].value
        if 0 in verdict.probe_values else 0.0,
        error=verdict.probe_values[0].error_estimate
        if 0 in verdict.probe_values else 0.0,
        trace=verdict.trace,
        verdict="pass" if verdict.passed else "fail",
    )
    _emit([rec], cfg)
    return 0


def cmd_obstruction(args, cfg: RunConfig) -> int:
    spec = cfg.curve or parse_curve_arg("map:t^3,t^7+t^8")
    if spec.kind == "cusp":
        spec_par = normalize(spec)
    elif spec.kind == "map":
        spec_par = normalize(spec)
    else:
        raise ValueError("obstruction needs a cusp or map curve")
    mu = parse_tau_poly(args.mu)
    sys = build_jet_system(spec_par, mu, D=args.order)
    verdict = feasibility(sys)

    def fr(x):
        return str(x) if isinstance(x, Fraction) else repr(x)

    payload = {"kind": verdict.kind,
               "smooth_solvability": verdict.smooth_solvability}
    if verdict.certificate:
        payload["certificate"] = {f"{m},{n}": fr(v)
                                  for (m, n), v in sorted(verdict.certificate.items())}
    if verdict.witness:
        payload["witness"] = {str(k): fr(v)
                              for k, v in sorted(verdict.witness.items(),
                                                 key=lambda kv: str(kv[0]))}
    rec = _record(
        "obstruction",
        {"curve": args.curve or "map:t^3,t^7+t^8", "mu": args.mu,
         "order": args.order, "system_shape": list(sys.shape)},
        value=0.0, error=0.0, verdict=verdict.kind,
    )
    rec["result"] = payload
    _emit([rec], cfg)
    return 0


def cmd_selftest(args, cfg: RunConfig) -> int:
    records = selftest_mod.run_all()
    out = []
    for r in records:
        rec = _record("selftest",
                      {"criterion": r["criterion"], "name": r["name"]},
                      value=r["max_err"], error=r["max_err"],
                      verdict="pass" if r["passed"] else "fail")
        rec["tol"] = r["tol"]
        rec["details"] = r["details"]
        out.append(rec)
    _emit(out, cfg)
    return 0 if all(r["passed"] for r in records) else 3


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvecurrents",
        description="Residue currents and Koppelman operators on singular "
                    "plane curves",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="INI config file")
        p.add_argument("--curve", help="cusp:r,s | map:g1,g2 | disc[:R]")
        p.add_argument("--out", help="output path")
        p.add_argument("--format", choices=["json", "csv"])
        p.add_argument("--jobs", type=int)
        p.add_argument("--delta-max", dest="delta_max", type=float)
        p.add_argument("--ratio", type=float)
        p.add_argument("--count", type=int)
        p.add_argument("--extrapolation-order", dest="extrapolation_order",
                       type=int)
        p.add_argument("--radial-points", dest="radial_points", type=int)
        p.add_argument("--angular-points", dest="angular_points", type=int)
        p.add_argument("--tol", type=float)

    p = sub.add_parser("residue", help="pair dbar(1/tau^m) with a test form")
    common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--psi", required=True, help="polynomial in t, conj(t)")
    p.add_argument("--support", type=float, default=0.4)
    p.set_defaults(func=cmd_residue)

    p = sub.add_parser("kernel", help="evaluate kernel factors")
    common(p)
    p.add_argument("action", choices=["eval"])
    p.add_argument("--role", choices=["k", "p"], default="k")
    p.add_argument("--tau", required=True)
    p.add_argument("--t", required=True)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("koppelman", help="verify the Koppelman identity")
    common(p)
    p.add_argument("--verify", action="store_true", default=True)
    p.add_argument("--targets", type=int, default=20)
    p.add_argument("--tolerance", type=float, default=1e-3)
    p.set_defaults(func=cmd_koppelman)

    p = sub.add_parser("reproduce",
                       help="reproduce holomorphic monomials via P")
    common(p)
    p.add_argument("--targets", type=int, default=10)
    p.add_argument("--tolerance", type=float, default=1e-3)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("solve-dbar", help="solve dbar u = mu on a cusp")
    common(p)
    p.add_argument("--mu", required=True, help="dtaubar-coefficient in t, conj(t)")
    p.add_argument("--support", type=float)
    p.set_defaults(func=cmd_solve_dbar)

    p = sub.add_parser("membership", help="strong-domain boundary test")
    common(p)
    p.add_argument("--u", required=True, help="numerator polynomial")
    p.add_argument("--pole", type=int, default=0,
                   help="divide by tau^pole")
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("obstruction", help="jet feasibility certificates")
    common(p)
    p.add_argument("--mu", required=True)
    p.add_argument("--order", type=int, default=12)
    p.set_defaults(func=cmd_obstruction)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    common(p)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config) if getattr(args, "config", None) \
            else RunConfig()
        cfg = apply_overrides(cfg, args)
        return args.func(args, cfg)
    except (NonConvergentError, DivergingLimitError) as exc:
        print(json.dumps({"command": args.command, "error": str(exc),
                          "verdict": "non-convergent"}), file=sys.stderr)
        return 2
    except (ValueError, JetOrderError, OSError, CurveCurrentsError) as exc:
        print(json.dumps({"command": args.command, "error": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
