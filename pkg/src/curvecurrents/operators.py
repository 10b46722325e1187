"""The integral operators K and P and the curve dbar-solver.

``K phi(t)`` is a principal-value area integral of the kernel factor
against a (0,1) test form; ``P`` integrates over the annulus where the
spatial cutoff varies.  The solver pipeline applies K, measures the
obstruction to the strong-domain boundary condition at the singular
point through Dirac-coefficient moments, subtracts the meromorphic
correction, and verifies both membership and the pointwise dbar residual.

For monomial cusps the kernel factor admits the exact split
``F(tau, t) = 1/(tau - t) - sum_i d_i t^{i-1}/tau^i`` (partial fractions
of the factored form), so K decomposes into a Cauchy transform plus a
polynomial in t with principal-value coefficients that do not depend on
the target.  The split route is used for target points close to the
singular parameter value, where the direct two-patch principal value
loses accuracy; both routes are cross-checked in the tests.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .curves import CurveSpec, StructureForm, sing_distance
from .errors import DivergingLimitError, NonConvergentError
from .kernels import KernelSpec, curve_kernel_assemble, disc_kernel, split_tail_coeffs
from .polynomials import MultiPoly, eval_tau
from .regularization import (
    DEFAULT_CUTOFF,
    CurrentValue,
    QuadratureSpec,
    RegularizationSchedule,
    cutoff_eval,
    default_schedule,
    limit_extrapolate,
    polar_grid,
    pv_integrate,
)
from .residues import TestForm

TWO_PI_I = 2j * math.pi
K_CONST = -1.0 / math.pi   # (1/2 pi i) chi F dtau ^ (psi dtaubar) = K_CONST chi F psi dA
P_CONST = -1.0 / math.pi   # sign calibrated on the Cauchy-Pompeiu baseline

DEFAULT_QUAD = QuadratureSpec()
MEMBERSHIP_QUAD = QuadratureSpec(radial_points=10, angular_points=32)


def numerical_semigroup(generators, upto):
    """All integers in [0, upto] representable from the generators."""
    reachable = {0}
    for g in generators:
        if g <= 0:
            continue
        for base in sorted(reachable):
            v = base + g
            while v <= upto:
                reachable.add(v)
                v += g
    return sorted(v for v in reachable if v <= upto)


# ---------------------------------------------------------------------------
# structured coefficients and the Cauchy-transform evaluator
# ---------------------------------------------------------------------------

class StructuredCoeff:
    """A sum of terms ``c * radial(|tau|) * tau^a conj(tau)^b``.

    Callable like any coefficient function; the term list additionally
    lets the Cauchy evaluator reduce a whole ring of targets to one grid
    pass, because radial factors are rotation invariant and the Cauchy
    denominator rotates covariantly.
    """

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = [
            (int(a), int(b), complex(c), radial)
            for a, b, c, radial in terms if c != 0
        ]

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=complex)
        rho = np.abs(tau)
        out = np.zeros(tau.shape, dtype=complex)
        for a, b, c, radial in self.terms:
            term = np.full(tau.shape, c, dtype=complex)
            if a:
                term = term * tau ** a
            if b:
                term = term * np.conj(tau) ** b
            if radial is not None:
                term = term * radial(rho)
            out += term
        return out

    def times_radial(self, fn):
        def compose(radial):
            if radial is None:
                return fn
            return lambda rho, _r=radial: _r(rho) * fn(rho)

        return StructuredCoeff(
            [(a, b, c, compose(radial)) for a, b, c, radial in self.terms]
        )


def structured_from(phi, use_dbar=False):
    """Structured view of a test-form coefficient, or None for callables."""
    if isinstance(phi, TestForm):
        return StructuredCoeff(phi.dbar_terms() if use_dbar
                               else phi.coeff_terms())
    if isinstance(phi, MultiPoly):
        if use_dbar:
            phi = phi.partial("taubar")
        return StructuredCoeff([(a, b, c, None) for (a, b), c in phi.terms()])
    return None


class CauchyEvaluator:
    """Evaluates ``t -> Int g(tau) / (tau - t) dA`` over a disc.

    Uses a polar grid centered at the target.  All kink circles of ``g``
    are centered at the origin, so the grid for target ``t`` is the grid
    for ``|t|`` rotated by ``arg t``.  For structured coefficients every
    ring of targets shares one set of scalar moments: with
    ``tau = e^{i al} n`` on the base grid at radius ``|t|``,
    ``g(tau)/(tau - t)`` contributes ``e^{i al (a - b - 1)}`` times a
    target-independent sum per term.
    """

    def __init__(self, g, outer, breaks, quad: QuadratureSpec):
        self.g = g
        self.structured = g if isinstance(g, StructuredCoeff) else None
        self.outer = float(outer)
        self.breaks = tuple(sorted(set(
            float(b) for b in breaks if 0 < b <= outer * (1.0 + 1e-12)
        )))
        self.quad = quad
        self._cache = {}
        self._moment_cache = {}

    def _grid(self, rho, fine=False):
        key = (round(rho, 13), fine)
        if key not in self._cache:
            q = self.quad.refined() if fine else self.quad
            self._cache[key] = polar_grid(complex(rho), rho + self.outer,
                                          q.radial_points, q.angular_points,
                                          global_breaks=self.breaks)
        return self._cache[key]

    def _ring_moments(self, rho, fine=False):
        key = (round(rho, 13), fine)
        if key not in self._moment_cache:
            nodes, w = self._grid(rho, fine)
            rho_n = np.abs(nodes)
            denom = nodes - rho
            S = np.empty(len(self.structured.terms), dtype=complex)
            for k, (a, b, c, radial) in enumerate(self.structured.terms):
                arr = (w * c) / denom
                if a:
                    arr = arr * nodes ** a
                if b:
                    arr = arr * np.conj(nodes) ** b
                if radial is not None:
                    arr = arr * radial(rho_n)
                S[k] = arr.sum()
            self._moment_cache[key] = S
        return self._moment_cache[key]

    def _combine(self, ts, S):
        phases = np.where(np.abs(ts) > 1e-300, ts / np.abs(ts), 1.0)
        out = np.zeros(ts.shape, dtype=complex)
        for k, (a, b, _, _) in enumerate(self.structured.terms):
            out += S[k] * phases ** (a - b - 1)
        return out

    def value(self, t, with_error=False):
        t = complex(t)
        rho = abs(t)
        if self.structured is not None:
            ts = np.array([t])
            v = complex(self._combine(ts, self._ring_moments(rho))[0])
            if not with_error:
                return v, None
            vf = complex(self._combine(ts, self._ring_moments(rho, True))[0])
            return vf, abs(vf - v)
        phase = t / rho if rho > 1e-300 else 1.0
        nodes, w = self._grid(rho)
        zt = phase * nodes
        v = complex(np.sum(w * np.asarray(self.g(zt), dtype=complex)
                           / (zt - t)))
        if not with_error:
            return v, None
        nodes_f, w_f = self._grid(rho, fine=True)
        ztf = phase * nodes_f
        vf = complex(np.sum(w_f * np.asarray(self.g(ztf), dtype=complex)
                            / (ztf - t)))
        return vf, abs(vf - v)

    def values(self, ts):
        """Vectorized evaluation; targets sharing a radius share a grid."""
        ts = np.asarray(ts, dtype=complex).ravel()
        out = np.empty(ts.shape, dtype=complex)
        order = {}
        for i, t in enumerate(ts):
            order.setdefault(round(abs(complex(t)), 13), []).append(i)
        for rho, idx in order.items():
            group = ts[idx]
            if self.structured is not None:
                out[idx] = self._combine(group, self._ring_moments(rho))
                continue
            nodes, w = self._grid(rho)
            phases = np.where(np.abs(group) > 1e-300, group / np.abs(group), 1.0)
            zt = phases[:, None] * nodes[None, :]
            gv = np.asarray(self.g(zt), dtype=complex)
            out[idx] = (gv / (zt - group[:, None])) @ w
        return out


# ---------------------------------------------------------------------------
# the solution operator K
# ---------------------------------------------------------------------------

def _form_breaks(kernel: KernelSpec, phi) -> tuple:
    breaks = [kernel.weight.band.lo, kernel.weight.band.hi]
    if isinstance(phi, TestForm) and phi.bump:
        breaks += [phi.support_radius, 2.0 * phi.support_radius]
    return tuple(breaks)


def _coeff_fn(phi):
    if isinstance(phi, TestForm):
        return phi.coeff
    if isinstance(phi, MultiPoly):
        return lambda tau: eval_tau(phi, tau)
    return phi


class KOperator:
    """K for one kernel and one (0,1)-form coefficient, both routes."""

    def __init__(self, kernel: KernelSpec, phi, quad: QuadratureSpec,
                 use_dbar: bool = False):
        self.kernel = kernel
        self.quad = quad
        band = kernel.weight.band
        struct = structured_from(phi, use_dbar)
        if struct is not None:
            weighted = struct.times_radial(band.value_rho)
        else:
            fn = phi.coeff if isinstance(phi, TestForm) else phi

            def weighted(tau):
                return band.value(tau) * np.asarray(fn(tau), dtype=complex)

        self.weighted = weighted
        outer = band.hi
        if isinstance(phi, TestForm) and phi.bump:
            outer = min(outer, phi.outer_radius)
        self.radius = outer
        self.breaks = _form_breaks(kernel, phi)
        self._cauchy = CauchyEvaluator(weighted, outer, self.breaks, quad)
        self._pv_tail = None

    # ---- split route ----
    def _tail(self):
        if self._pv_tail is None:
            if self.kernel.variant == "smooth-disc":
                self._pv_tail = []
            else:
                d = split_tail_coeffs(self.kernel.r, self.kernel.s)
                tail = []
                for i, di in enumerate(d, start=1):
                    if di == 0:
                        tail.append((i, di, CurrentValue(0.0, 0.0, [])))
                        continue
                    cv = pv_integrate(
                        lambda tau, _i=i: self.weighted(tau) / tau ** _i,
                        self.quad, singular_set=(0.0,), radius=self.radius,
                        global_breaks=self.breaks,
                    )
                    tail.append((i, di, cv))
                self._pv_tail = tail
        return self._pv_tail

    def split_value(self, t, with_error=False) -> CurrentValue:
        c, cerr = self._cauchy.value(t, with_error=with_error)
        total = c
        err = cerr or 0.0
        for i, di, cv in self._tail():
            if di == 0:
                continue
            total -= di * t ** (i - 1) * cv.value
            err += abs(di) * abs(t) ** (i - 1) * cv.error_estimate
        return CurrentValue(K_CONST * total, abs(K_CONST) * err, [])

    def split_values(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=complex)
        flat = ts.ravel()
        total = self._cauchy.values(flat)
        for i, di, cv in self._tail():
            if di:
                total = total - di * flat ** (i - 1) * cv.value
        return (K_CONST * total).reshape(ts.shape)

    # ---- direct route ----
    def direct_value(self, t) -> CurrentValue:
        t = complex(t)
        kernel = self.kernel

        def integrand(tau):
            return K_CONST * self.weighted(tau) * kernel.factor(tau, t)

        sing = [t]
        if kernel.pole_order > 0:
            sing.insert(0, 0.0)
        return pv_integrate(integrand, self.quad, singular_set=sing,
                            radius=self.radius, global_breaks=self.breaks)


def apply_K(kernel: KernelSpec, phi: TestForm, targets, quad=None,
            method: str = "auto"):
    """Samples of ``K phi`` at the targets; one CurrentValue per target.

    ``phi`` must be a compactly supported (0,1) test form.  ``method`` is
    ``"direct"`` (principal-value integral with singular set {0, t}),
    ``"split"`` (Cauchy transform plus target-independent principal
    values; cusp and disc kernels only), or ``"auto"``.
    """
    if isinstance(phi, TestForm):
        if phi.degree != 1:
            raise ValueError("apply_K expects a (0,1) form")
        if not phi.bump:
            raise ValueError("apply_K needs a compactly supported form")
    quad = quad or DEFAULT_QUAD
    op = KOperator(kernel, phi, quad)
    if method == "auto":
        method = "split" if kernel.variant in ("smooth-disc", "cusp-closed-form") \
            else "direct"
    out = []
    for t in targets:
        if method == "split":
            out.append(op.split_value(complex(t), with_error=True))
        else:
            out.append(op.direct_value(complex(t)))
    return out


def k_solution_callable(kernel: KernelSpec, phi: TestForm, quad=None):
    """The function ``t -> K phi(t)`` (split route), accepting arrays."""
    quad = quad or DEFAULT_QUAD
    op = KOperator(kernel, phi, quad)

    def u1(ts):
        scalar = np.isscalar(ts) or getattr(ts, "shape", None) == ()
        vals = op.split_values(np.atleast_1d(ts))
        return complex(vals[0]) if scalar else vals

    return u1, op


# ---------------------------------------------------------------------------
# the projection operator P
# ---------------------------------------------------------------------------

def apply_P(kernel: KernelSpec, phi, targets, quad=None):
    """Samples of the projection ``P phi`` at the targets.

    ``phi`` is a (0,0) test form or a bare polynomial coefficient (need
    not be compactly supported: the integration lives on the annulus
    where the spatial cutoff varies).  Holomorphic weights make the
    output holomorphic in the target.
    """
    if isinstance(phi, TestForm) and phi.degree != 0:
        raise ValueError("apply_P expects a (0,0) form")
    quad = quad or DEFAULT_QUAD
    band = kernel.weight.band
    n_ang = max(quad.angular_points, 256)
    coeff = _coeff_fn(phi)

    def grids(n_rad, n_angular):
        mids = tuple(band.lo + k * (band.hi - band.lo) / 3.0 for k in (1, 2))
        nodes, w = polar_grid(0.0, band.hi, n_rad, n_angular,
                              local_breaks=mids, rmin=band.lo)
        base = w * band.dbar_coeff(nodes) * np.asarray(coeff(nodes), dtype=complex)
        return nodes, base

    nodes, base = grids(quad.radial_points, n_ang)
    nodes_f, base_f = grids(quad.radial_points + 8, n_ang * 2)
    out = []
    for t in targets:
        t = complex(t)
        v = P_CONST * complex(np.sum(base * kernel.factor(nodes, t)))
        vf = P_CONST * complex(np.sum(base_f * kernel.factor(nodes_f, t)))
        out.append(CurrentValue(vf, abs(vf - v), []))
    return out


# ---------------------------------------------------------------------------
# Koppelman identity verification
# ---------------------------------------------------------------------------

def dbar_fd(fn, t, h):
    """Central finite-difference d/dtbar = (d/dx + i d/dy)/2."""
    fx = (fn(t + h) - fn(t - h)) / (2.0 * h)
    fy = (fn(t + 1j * h) - fn(t - 1j * h)) / (2.0 * h)
    return 0.5 * (fx + 1j * fy)


@dataclass
class KoppelmanReport:
    rows: list
    max_residual: float
    fd_step: float

    def to_records(self):
        return [
            {
                "t_re": float(t.real), "t_im": float(t.imag),
                "residual": float(r), "quad_error": float(e),
                "fd_noise_flag": bool(f),
            }
            for t, r, e, f in self.rows
        ]


def verify_koppelman(spec: CurveSpec, phi: TestForm, targets, quad=None,
                     fd_step=None, method="auto") -> KoppelmanReport:
    """Residuals of the Koppelman identity at the targets.

    For a (0,1) form on a curve the identity reduces to
    ``phi = dbar K phi`` (there are no (0,2) forms, and the projection
    term vanishes on (0,1) input), with dbar computed by central finite
    differences of K-samples.  For a (0,0) form the identity is
    ``phi = K(dbar phi) + P phi``.
    """
    quad = quad or DEFAULT_QUAD
    kernel = curve_kernel_assemble(spec) if spec.kind != "map" \
        else disc_kernel(spec.ball_radius)
    if fd_step is None:
        fd_step = max(1e-3, math.sqrt(quad.adaptive_tolerance))
    rows = []
    if phi.degree == 1:
        op = KOperator(kernel, phi, quad)
        evaluate = (lambda z: op.split_value(z).value) if method != "direct" \
            else (lambda z: op.direct_value(z).value)
        for t in targets:
            t = complex(t)
            qerr = (op.split_value(t, with_error=True).error_estimate
                    if method != "direct" else op.direct_value(t).error_estimate)
            dbar_k = dbar_fd(evaluate, t, fd_step)
            residual = abs(complex(phi.coeff(t)) - dbar_k)
            noise_flag = qerr / fd_step > 10.0 * quad.adaptive_tolerance ** 0.5
            rows.append((t, residual, qerr, noise_flag))
    else:
        op = KOperator(kernel, phi, quad, use_dbar=True)
        p_kernel = kernel.with_role("projection")
        p_vals = apply_P(p_kernel, phi, targets, quad)
        for t, pv in zip(targets, p_vals):
            t = complex(t)
            if method == "direct":
                kv = op.direct_value(t)
            else:
                kv = op.split_value(t, with_error=True)
            residual = abs(complex(phi.coeff(t)) - kv.value - pv.value)
            qerr = kv.error_estimate + pv.error_estimate
            rows.append((t, residual, qerr, False))
    max_res = max(r for _, r, _, _ in rows) if rows else 0.0
    return KoppelmanReport(rows=rows, max_residual=float(max_res),
                           fd_step=float(fd_step))


# ---------------------------------------------------------------------------
# membership in the strong domain, moments, and the correction
# ---------------------------------------------------------------------------

def _moment_traces(u, omega: StructureForm, probes, schedule, quad):
    """Traces of ``Int dbar(chi_delta) ^ (u omega tau^j)`` for each probe j.

    One evaluation of ``u`` per annulus is shared by all probes.
    """
    traces = {j: [] for j in probes}
    for delta in schedule.deltas:
        nodes, w = polar_grid(0.0, 2.0 * delta, quad.radial_points,
                              quad.angular_points,
                              local_breaks=(1.5 * delta,), rmin=delta)
        _, dbar = cutoff_eval(DEFAULT_CUTOFF, delta, nodes)
        base = w * dbar * np.asarray(u(nodes), dtype=complex) * omega.coeff(nodes)
        for j in probes:
            probe_vals = base * nodes ** j if j else base
            traces[j].append((delta, 2j * complex(np.sum(probe_vals))))
    return traces


@dataclass
class MembershipVerdict:
    """Outcome of the boundary-condition test at the singular point."""

    passed: bool
    probe_values: dict
    growth: dict
    last_ratio: float
    trace: list

    def __bool__(self):
        return self.passed


def membership_test(u, omega: StructureForm, schedule: RegularizationSchedule,
                    quad=None, probes=None, semigroup_generators=None,
                    rtol=1e-3) -> MembershipVerdict:
    """Test ``dbar(chi_delta) ^ u omega -> 0`` against admissible probes.

    The primary probe is the test function identically 1 near 0; the
    holomorphic monomial probes tau^j for j in the value semigroup of the
    curve are the admissible diagnostics (they are restrictions of
    ambient monomials).  Fails when any probe limit is nonzero or any
    trace diverges, reporting the growth exponent.
    """
    quad = quad or MEMBERSHIP_QUAD
    if probes is None:
        upto = omega.pole_order + 3
        if semigroup_generators:
            probes = numerical_semigroup(semigroup_generators, upto)
        else:
            probes = [0]
    traces = _moment_traces(u, omega, probes, schedule, quad)
    probe_values, growth = {}, {}
    passed = True
    for j in probes:
        trace = traces[j]
        spread = max(abs(v) for _, v in trace)
        try:
            lim = limit_extrapolate(trace, schedule.extrapolation_order,
                                    divergence_floor=max(1e-2, 1e3 * rtol * spread))
        except DivergingLimitError as exc:
            growth[j] = exc.growth
            probe_values[j] = CurrentValue(complex(float("nan"), 0.0),
                                           float("inf"), trace)
            passed = False
            continue
        probe_values[j] = lim
        if abs(lim.value) > max(rtol * spread, 1e-9):
            passed = False
    trace0 = traces[probes[0]]
    spread0 = max(abs(v) for _, v in trace0)
    last_ratio = abs(trace0[-1][1]) / spread0 if spread0 > 0 else 0.0
    return MembershipVerdict(passed=passed, probe_values=probe_values,
                             growth=growth, last_ratio=float(last_ratio),
                             trace=trace0)


@dataclass
class ResidueCoefficients:
    """Dirac-derivative coefficients extracted from the moment pairings."""

    c: list
    raw: list
    tolerance_mask: list
    J_max: int
    order_warning: bool = False

    def values(self):
        return list(self.c)

    def nonzero(self):
        return [(j, cj) for j, cj in enumerate(self.c) if cj != 0]


def extract_residue_coeffs(u, omega: StructureForm, J_max=None,
                           schedule=None, quad=None,
                           mask_tol=1e-6) -> ResidueCoefficients:
    """Moments ``M_j = lim Int dbar(chi_delta) ^ u omega tau^j`` and the
    coefficients ``c_j = M_j / (2 pi i)`` of the Dirac expansion.

    The moment duality ``<dbar(1/tau^{i+1}) ^ dtau, tau^j> = 2 pi i d_ij``
    makes the c_j the coefficients of derivatives of the Dirac mass in
    the limit current.  Only holomorphic derivatives occur.  Warns when
    the top moment is above tolerance (the expansion order may exceed
    J_max).
    """
    if J_max is None:
        J_max = omega.pole_order + 5
    if schedule is None:
        raise ValueError("an explicit schedule is required")
    quad = quad or MEMBERSHIP_QUAD
    probes = list(range(J_max + 1))
    traces = _moment_traces(u, omega, probes, schedule, quad)
    raw = []
    for j in probes:
        lim = limit_extrapolate(traces[j], schedule.extrapolation_order,
                                divergence_floor=1e6)
        raw.append(lim.value / TWO_PI_I)
    scale = max(max(abs(c) for c in raw), 1.0)
    mask = [abs(c) < mask_tol * scale for c in raw]
    c = [0.0 if m else cj for cj, m in zip(raw, mask)]
    warn = not mask[J_max]
    if warn:
        warnings.warn(
            f"moment at J_max={J_max} is {abs(raw[J_max]):.2e}; the Dirac "
            "expansion may have higher order - increase J_max",
            stacklevel=2,
        )
    return ResidueCoefficients(c=c, raw=raw, tolerance_mask=mask, J_max=J_max,
                               order_warning=warn)


@dataclass
class CorrectionInfo:
    """Description of the meromorphic correction u2."""

    terms: list  # (j, c_j, exponent of tau)
    description: str


def correct_solution(u1, coeffs: ResidueCoefficients, omega: StructureForm):
    """Subtract ``u2 = sum_j c_j tau^{k-j-1} / (c f(tau))`` from u1.

    ``c`` is the constant factor and ``f`` the unit numerator of the
    structure form, so that ``u2 * omega = sum_j c_j dtau / tau^{j+1}``
    and the corrected solution satisfies the boundary condition.
    Exponents may be negative (the correction is then meromorphic,
    holomorphic away from 0, which the solution class permits).
    """
    k = omega.pole_order
    c0 = omega.constant_factor
    terms = [(j, cj, k - j - 1) for j, cj in coeffs.nonzero()]

    def u2(tau):
        tau = np.asarray(tau, dtype=complex)
        out = np.zeros(tau.shape, dtype=complex)
        if terms:
            f = omega.numerator_value(tau)
            for _, cj, expo in terms:
                out = out + cj * tau ** expo / (c0 * f)
        if out.shape == ():
            return complex(out)
        return out

    def u(tau):
        return np.asarray(u1(tau), dtype=complex) - u2(tau)

    desc = " + ".join(f"({cj:.6g}) tau^{expo}/f" for _, cj, expo in terms) \
        or "0"
    return u, u2, CorrectionInfo(terms=terms, description=desc)


# ---------------------------------------------------------------------------
# the solver pipeline
# ---------------------------------------------------------------------------

@dataclass
class SolveReport:
    """Full output of the dbar solve: raw samples, extracted coefficients,
    correction, membership verdicts, and pointwise residuals."""

    raw_solution_samples: list
    coefficients: ResidueCoefficients
    correction: CorrectionInfo
    membership_before: MembershipVerdict
    membership_after: MembershipVerdict
    dbar_residuals: list
    fd_step: float

    @property
    def max_dbar_residual(self):
        return max(r for _, r in self.dbar_residuals) if self.dbar_residuals else 0.0

    @property
    def passed(self):
        return bool(self.membership_after.passed)


def solve_dbar(spec: CurveSpec, mu: TestForm, schedule=None, quad=None,
               sample_targets=None, J_max=None) -> SolveReport:
    """Solve ``dbar u = mu`` on the curve with the singular-point correction.

    Pipeline: apply K; test the boundary condition; extract the Dirac
    coefficients of the obstruction; subtract the meromorphic correction;
    re-test membership; check the pointwise dbar residual at regular
    sample points by finite differences.
    """
    if mu.degree != 1:
        raise ValueError("mu must be a (0,1) form")
    if spec.kind == "map" and not spec.smooth:
        raise ValueError(
            "solve_dbar needs a curve with defining-equation data "
            "(monomial cusp or implicit); parametrized images carry none"
        )
    kernel = curve_kernel_assemble(spec)
    omega = kernel.structure
    rho0 = kernel.param.disc_radius
    schedule = schedule or default_schedule(rho0)
    quad = quad or DEFAULT_QUAD

    u1, op = k_solution_callable(kernel, mu, quad)
    if sample_targets is None:
        angles = np.exp(2j * math.pi * (np.arange(8) + 0.35) / 8)
        sample_targets = list(0.35 * rho0 * angles)

    samples = [(t, complex(u1(t))) for t in sample_targets]
    gens = (spec.r, spec.s) if spec.kind == "cusp" else None
    membership_before = membership_test(u1, omega, schedule,
                                        semigroup_generators=gens)
    coeffs = extract_residue_coeffs(u1, omega, J_max=J_max, schedule=schedule)
    u, u2, correction = correct_solution(u1, coeffs, omega)
    membership_after = membership_test(u, omega, schedule,
                                       semigroup_generators=gens)

    fd_step = max(1e-3, math.sqrt(quad.adaptive_tolerance))
    h = fd_step
    stencil = np.array([
        [t + h, t - h, t + 1j * h, t - 1j * h] for t in sample_targets
    ], dtype=complex)
    vals = u1(stencil)
    residuals = []
    for i, t in enumerate(sample_targets):
        t = complex(t)
        fx = (vals[i, 0] - vals[i, 1]) / (2.0 * h)
        fy = (vals[i, 2] - vals[i, 3]) / (2.0 * h)
        approx = 0.5 * (fx + 1j * fy)
        residuals.append((t, abs(approx - complex(mu.coeff(t)))))

    return SolveReport(
        raw_solution_samples=samples,
        coefficients=coeffs,
        correction=correction,
        membership_before=membership_before,
        membership_after=membership_after,
        dbar_residuals=residuals,
        fd_step=fd_step,
    )


# ---------------------------------------------------------------------------
# smoothness-locality diagnostic
# ---------------------------------------------------------------------------

def kernel_smoothing_diagnostic(kernel: KernelSpec, phi: TestForm, t, quad=None,
                                orders=(1, 2), step=2e-3):
    """Finite-difference derivative magnitudes of K phi near a target where
    phi vanishes; bounded under refinement when the input vanishes nearby."""
    quad = quad or DEFAULT_QUAD
    op = KOperator(kernel, phi, quad)

    def f(z):
        return op.split_value(z).value

    out = {}
    if 1 in orders:
        out[1] = abs((f(t + step) - f(t - step)) / (2 * step))
    if 2 in orders:
        out[2] = abs((f(t + step) - 2 * f(t) + f(t - step)) / step ** 2)
    return out
