"""Cutoff regularization and principal-value quadrature on the parameter disc.

This module owns the numerical machinery shared by every current pairing
in the package:

* the fixed polynomial smoothstep profile used for all cutoff functions
  ``chi_delta(tau) = profile(|tau|/delta)``,
* polar-grid quadrature (trapezoid in angle, composite Gauss-Legendre in
  radius, with panels split at known kink radii),
* principal values via symmetric exclusion radii around singular points,
  with angular integration first so that angular-mean-zero non-integrable
  parts cancel,
* Richardson extrapolation of regularized traces ``delta -> 0``.

Orientation convention: the positive area measure is ``(i/2) dtau ^ dtaubar``,
i.e. ``rho drho dtheta`` in polar coordinates.  All integrators below
integrate against that measure; pairing-level constants (``2i``, ``-1/pi``,
...) live with the callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergingLimitError, NonConvergentError

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# cutoff profiles
# ---------------------------------------------------------------------------

def chi_profile(x):
    """Smoothstep approximand of the indicator of [1, oo).

    0 for x <= 1, 1 for x >= 2, and the fixed quintic
    ``u^3 (10 - 15 u + 6 u^2)`` with ``u = x - 1`` in between.
    """
    x = np.asarray(x, dtype=float)
    u = np.clip(x - 1.0, 0.0, 1.0)
    return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)


def chi_profile_prime(x):
    """Derivative of :func:`chi_profile`; supported exactly in [1, 2]."""
    x = np.asarray(x, dtype=float)
    u = x - 1.0
    inside = (u > 0.0) & (u < 1.0)
    u = np.where(inside, u, 0.0)
    d = 30.0 * u * u * (1.0 - u) * (1.0 - u)
    return np.where(inside, d, 0.0)


def bump_profile(x):
    """1 near 0, 0 for x >= 2: the complementary cutoff ``1 - profile``."""
    return 1.0 - chi_profile(x)


def bump_profile_prime(x):
    return -chi_profile_prime(x)


def _blend(x):
    """Internal C^3 partition-of-unity ramp (0 below 0, 1 above 1)."""
    u = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    u2 = u * u
    return u2 * u2 * (35.0 - 84.0 * u + 70.0 * u2 - 20.0 * u2 * u)


def patch_weight(tau, center, radius):
    """Smooth weight: 1 within radius/2 of center, 0 beyond radius."""
    d = np.abs(np.asarray(tau, dtype=complex) - center)
    return 1.0 - _blend(2.0 * d / radius - 1.0)


@dataclass(frozen=True)
class Cutoff:
    """The smooth approximand chi of the characteristic function of [1, oo).

    The profile is the fixed polynomial smoothstep above, so results are
    reproducible; its derivative is supported in [1, 2] and integrates
    to 1.
    """

    def value(self, x):
        return chi_profile(x)

    def deriv(self, x):
        return chi_profile_prime(x)


DEFAULT_CUTOFF = Cutoff()


def cutoff_eval(cutoff: Cutoff, delta: float, tau):
    """Evaluate ``chi_delta`` and the coefficient of dtaubar in dbar(chi_delta).

    Returns ``(value, dbar_part)`` with
    ``value = profile(|tau|/delta)`` and
    ``dbar_part = profile'(|tau|/delta) * tau / (2 |tau| delta)``
    (zero outside the annulus ``delta <= |tau| <= 2 delta``).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    tau = np.asarray(tau, dtype=complex)
    rho = np.abs(tau)
    value = cutoff.value(rho / delta)
    safe = np.where(rho > 0.0, rho, 1.0)
    dbar = cutoff.deriv(rho / delta) * tau / (2.0 * safe * delta)
    dbar = np.where(rho > 0.0, dbar, 0.0)
    if value.shape == ():
        return float(value), complex(dbar)
    return value, dbar


@dataclass(frozen=True)
class SpatialBand:
    """A cutoff in |tau| equal to 1 below ``lo`` and 0 above ``hi``.

    Used for the compactly supported weights: the transition is the fixed
    smoothstep profile remapped affinely onto [lo, hi].
    """

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 < self.lo < self.hi):
            raise ValueError("need 0 < lo < hi")

    def value(self, tau):
        return self.value_rho(np.abs(np.asarray(tau, dtype=complex)))

    def value_rho(self, rho):
        return 1.0 - chi_profile(1.0 + (np.asarray(rho, dtype=float) - self.lo)
                                 / (self.hi - self.lo))

    def radial_deriv(self, rho):
        """d/drho of the band cutoff (nonpositive, supported in [lo, hi])."""
        width = self.hi - self.lo
        return -chi_profile_prime(1.0 + (np.asarray(rho, dtype=float) - self.lo)
                                  / width) / width

    def dbar_coeff(self, tau):
        """Coefficient of dtaubar in dbar of the band cutoff."""
        tau = np.asarray(tau, dtype=complex)
        rho = np.abs(tau)
        safe = np.where(rho > 0.0, rho, 1.0)
        out = self.radial_deriv(rho) * tau / (2.0 * safe)
        return np.where(rho > 0.0, out, 0.0)

    @property
    def breaks(self):
        return (self.lo, self.hi)


# ---------------------------------------------------------------------------
# schedules, quadrature parameters, results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegularizationSchedule:
    """Geometric sequence of cutoff scales delta_j = delta_max * ratio**j."""

    delta_max: float
    ratio: float = 0.5
    count: int = 8
    extrapolation_order: int = 2

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0):
            raise ValueError("ratio must lie in (0, 1)")
        if self.count < 4:
            raise ValueError("need at least 4 scales")
        if self.extrapolation_order < 1:
            raise ValueError("extrapolation_order must be >= 1")
        if self.delta_max <= 0:
            raise ValueError("delta_max must be positive")

    @property
    def deltas(self):
        return [self.delta_max * self.ratio ** j for j in range(self.count)]

    def scaled(self, factor):
        return RegularizationSchedule(
            self.delta_max * factor, self.ratio, self.count, self.extrapolation_order
        )


def default_schedule(disc_radius: float) -> RegularizationSchedule:
    return RegularizationSchedule(delta_max=0.2 * disc_radius)


@dataclass(frozen=True)
class QuadratureSpec:
    """Grid sizes and tolerances for the polar quadrature engine."""

    radial_points: int = 16
    angular_points: int = 128
    adaptive_tolerance: float = 1e-7
    exclusion_radius_policy: str = "origin"  # "none" | "origin" | "target"

    def __post_init__(self):
        if self.angular_points % 2:
            raise ValueError("angular_points must be even")
        if self.radial_points < 2:
            raise ValueError("radial_points must be >= 2")

    def refined(self):
        return QuadratureSpec(
            self.radial_points + 6,
            ((3 * self.angular_points // 2 + 1) // 2) * 2,
            self.adaptive_tolerance,
            self.exclusion_radius_policy,
        )

    def with_angular(self, n):
        return QuadratureSpec(self.radial_points, n, self.adaptive_tolerance,
                              self.exclusion_radius_policy)


@dataclass
class CurrentValue:
    """A regularized-limit result: value, error estimate, and the trace."""

    value: complex
    error_estimate: float
    trace: list = field(default_factory=list)

    def to_record(self):
        return {
            "value_re": float(self.value.real),
            "value_im": float(self.value.imag),
            "error": float(self.error_estimate),
            "trace": [[float(d), float(v.real), float(v.imag)] for d, v in self.trace],
        }


# ---------------------------------------------------------------------------
# Richardson extrapolation of regularized traces
# ---------------------------------------------------------------------------

def limit_extrapolate(trace, order: int = 2, divergence_floor: float = 1e-2) -> CurrentValue:
    """Extrapolate a geometric trace [(delta, value), ...] to delta -> 0.

    Assumes an expansion ``value(delta) = L + c1 delta + c2 delta^2 + ...``
    and eliminates the first ``order`` powers with a Richardson table.
    Exact (to rounding) on polynomial traces of degree <= order.

    Raises
    ------
    DivergingLimitError
        If |value| grows steadily as delta shrinks and exceeds
        ``divergence_floor`` (guards against flagging pure roundoff noise).
    """
    if len(trace) < order + 2:
        raise ValueError(f"need at least {order + 2} trace points")
    deltas = np.array([d for d, _ in trace], dtype=float)
    values = np.array([v for _, v in trace], dtype=complex)
    if np.any(deltas[1:] >= deltas[:-1]):
        raise ValueError("trace must have strictly decreasing delta")
    ratios = deltas[1:] / deltas[:-1]
    r = float(ratios.mean())
    if np.max(np.abs(ratios - r)) > 1e-8 * max(1.0, abs(r)):
        raise ValueError("trace must be geometric in delta")

    mags = np.abs(values)
    tail = min(3, len(values) - 1)
    growing = all(
        mags[-i] > mags[-i - 1] * (1.0 + 1e-12) for i in range(1, tail + 1)
    )
    if growing and mags[-1] > max(10.0 * mags[0], divergence_floor):
        growth = math.log(mags[-1] / mags[-2]) / math.log(1.0 / r)
        raise DivergingLimitError(
            f"trace grows like delta^-{growth:.2f}", growth=growth, trace=trace
        )

    table = values.copy()
    for m in range(1, order + 1):
        rm = r ** m
        table = (table[1:] - rm * table[:-1]) / (1.0 - rm)
    diffs = np.abs(np.diff(table))
    if len(diffs) == 0:
        return CurrentValue(complex(table[-1]), float("nan"), list(trace))
    j = int(np.argmin(diffs)) + 1
    # prefer the most refined row when it is just as good
    if diffs[-1] <= 2.0 * diffs[j - 1]:
        j = len(table) - 1
        best_err = float(diffs[-1])
    else:
        best_err = float(diffs[j - 1])
    return CurrentValue(complex(table[j]), best_err, list(trace))


# ---------------------------------------------------------------------------
# polar grids
# ---------------------------------------------------------------------------

_GAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss(n):
    if n not in _GAUSS_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GAUSS_CACHE[n] = (x, w)
    return _GAUSS_CACHE[n]


def _panel_points(lo, hi, cuts, n):
    """Composite Gauss-Legendre nodes/weights on [lo, hi] split at cuts."""
    edges = [lo]
    for c in sorted(set(cuts)):
        if lo + 1e-15 < c < hi - 1e-15:
            edges.append(c)
    edges.append(hi)
    x0, w0 = _gauss(n)
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        xs.append(mid + half * x0)
        ws.append(half * w0)
    return np.concatenate(xs), np.concatenate(ws)


def polar_grid(center, rmax, n_rad, n_ang, global_breaks=(), local_breaks=(),
               rmin=0.0):
    """Polar quadrature grid around ``center`` for the area measure.

    ``global_breaks`` are radii of circles about the origin at which the
    integrand may lose smoothness (cutoff edges); panel boundaries are
    inserted at the per-ray crossings.  ``local_breaks`` are radii about
    ``center`` itself.  Returns flat arrays (nodes, weights) with
    ``sum w_i f(tau_i) ~ Int f dA``.
    """
    center = complex(center)
    dtheta = TWO_PI / n_ang
    thetas = dtheta * np.arange(n_ang)
    if abs(center) < 1e-15:
        cuts = tuple(global_breaks) + tuple(local_breaks)
        rho, wr = _panel_points(rmin, rmax, cuts, n_rad)
        nodes = rho[:, None] * np.exp(1j * thetas)[None, :]
        weights = (rho * wr)[:, None] * np.full((1, n_ang), dtheta)
        return nodes.ravel(), weights.ravel()

    # off-center: per-ray panel edges at the circle crossings, vectorized
    phases = np.exp(1j * thetas)
    p = (np.conj(center) * phases).real            # ray-parameter offsets
    cuts = [np.full(n_ang, c) for c in local_breaks]
    for c in global_breaks:
        disc = p * p - abs(center) ** 2 + c * c
        ok = disc > 0.0
        root = np.sqrt(np.where(ok, disc, 0.0))
        for sign in (-1.0, 1.0):
            r = -p + sign * root
            cuts.append(np.where(ok, r, rmin))
    if cuts:
        cuts = np.stack(cuts, axis=1)
        cuts = np.clip(cuts, rmin, rmax)
        cuts.sort(axis=1)
        edges = np.concatenate([
            np.full((n_ang, 1), rmin), cuts, np.full((n_ang, 1), rmax)
        ], axis=1)
    else:
        edges = np.stack([np.full(n_ang, rmin), np.full(n_ang, rmax)], axis=1)
    mids = 0.5 * (edges[:, 1:] + edges[:, :-1])    # (n_ang, panels)
    halfs = 0.5 * (edges[:, 1:] - edges[:, :-1])
    x0, w0 = _gauss(n_rad)
    rho = mids[:, :, None] + halfs[:, :, None] * x0          # (ang, panel, g)
    wts = (rho * (halfs[:, :, None] * w0) * dtheta).ravel()
    nodes = (center + rho * phases[:, None, None]).ravel()
    keep = wts != 0.0          # zero-width panels would sit on the center
    return nodes[keep], wts[keep]


def _masked_sum(f, nodes, weights, mask_values=None):
    """Quadrature sum, evaluating f only where the mask is nonzero."""
    if mask_values is None:
        vals = np.asarray(f(nodes), dtype=complex)
        return complex(np.sum(vals * weights))
    mask = np.asarray(mask_values, dtype=float)
    idx = mask > 0.0
    if not np.any(idx):
        return 0.0 + 0.0j
    vals = np.asarray(f(nodes[idx]), dtype=complex)
    return complex(np.sum(vals * mask[idx] * weights[idx]))


def integrate_disc(f, quad: QuadratureSpec, radius, global_breaks=(),
                   center=0.0, local_breaks=(), rmin=0.0, estimate_error=True):
    """Plain area integral of ``f`` over a disc; returns (value, error).

    The error estimate comes from one grid refinement.
    """
    nodes, weights = polar_grid(center, radius, quad.radial_points,
                                quad.angular_points, global_breaks,
                                local_breaks, rmin)
    value = _masked_sum(f, nodes, weights)
    if not estimate_error:
        return value, 0.0
    fine = quad.refined()
    nodes2, weights2 = polar_grid(center, radius, fine.radial_points,
                                  fine.angular_points, global_breaks,
                                  local_breaks, rmin)
    value2 = _masked_sum(f, nodes2, weights2)
    return value2, abs(value2 - value)


# ---------------------------------------------------------------------------
# principal values
# ---------------------------------------------------------------------------

def pv_integrate(f, quad: QuadratureSpec, singular_set=(), radius=1.0,
                 global_breaks=(), eps_ratio=0.5, eps_count=6) -> CurrentValue:
    """Principal-value area integral over the disc of ``radius``.

    ``f(tau)`` evaluates the full integrand against the positive area
    measure on arrays of parameter points.  ``singular_set`` lists the
    parameter points where ``f`` is singular.  Around each of them the
    integral is computed on a polar patch, integrating angularly first;
    around points requiring it (the origin under the default exclusion
    policy) a symmetric exclusion radius is shrunk geometrically and the
    partial values are Richardson-extrapolated.

    Raises
    ------
    NonConvergentError
        If the exclusion sequence fails its Cauchy criterion, which
        signals an integrand without a principal value.
    """
    sing = [complex(s) for s in singular_set]
    if not sing:
        value, err = integrate_disc(f, quad, radius, global_breaks)
        return CurrentValue(value, err, [])

    # patch radii: keep patches disjoint and inside the domain
    radii = []
    for i, s in enumerate(sing):
        a = 0.45 * radius
        for j, s2 in enumerate(sing):
            if i != j:
                a = min(a, 0.35 * abs(s - s2))
        if abs(s) > 1e-15:
            a = min(a, 0.45 * (radius - abs(s)) + 1e-15)
        if a <= 0:
            raise ValueError(f"singular point {s} too close to the boundary")
        radii.append(a)

    patch_circle_breaks = []
    for s, a in zip(sing, radii):
        for c in (0.5 * a, a):
            patch_circle_breaks.extend((abs(abs(s) - c), abs(s) + c))

    # remainder: f times (1 - sum of patch weights), smooth and zero near
    # every singular point
    rem_breaks = tuple(global_breaks) + tuple(patch_circle_breaks)

    def remainder_mask(tau):
        m = np.ones(tau.shape, dtype=float)
        for s, a in zip(sing, radii):
            m = m * (1.0 - patch_weight(tau, s, a))
        return m

    def masked_remainder(nodes, weights):
        mask = remainder_mask(nodes)
        return _masked_sum(f, nodes, weights, mask)

    nodes, weights = polar_grid(0.0, radius, quad.radial_points,
                                quad.angular_points, rem_breaks)
    rem1 = masked_remainder(nodes, weights)
    fine = quad.refined()
    nodes, weights = polar_grid(0.0, radius, fine.radial_points,
                                fine.angular_points, rem_breaks)
    rem = masked_remainder(nodes, weights)
    err = abs(rem - rem1)

    total = rem
    trace_out = []
    for s, a in zip(sing, radii):
        def fw(tau, _s=s, _a=a):
            return np.asarray(f(tau), dtype=complex) * patch_weight(tau, _s, _a)

        needs_exclusion = (
            quad.exclusion_radius_policy == "target"
            or (quad.exclusion_radius_policy == "origin" and abs(s) < 1e-15)
        )
        if not needs_exclusion:
            val, e = integrate_disc(fw, quad, a, global_breaks, center=s,
                                    local_breaks=(0.5 * a,))
            total += val
            err += e
            continue

        # symmetric exclusion: integrate shells [eps_j, eps_{j-1}] and
        # extrapolate the cumulative values in eps
        eps = [0.5 * a * eps_ratio ** j for j in range(eps_count)]
        shells = []
        hi = a
        partial = 0.0 + 0.0j
        trace = []
        for j, lo in enumerate(eps):
            cuts = (0.5 * a,) if j == 0 else ()
            val, e = integrate_disc(fw, quad, hi, global_breaks, center=s,
                                    local_breaks=cuts, rmin=lo,
                                    estimate_error=(j == 0))
            partial += val
            err += e
            trace.append((lo, partial))
            hi = lo
            shells.append(val)
        try:
            lim = limit_extrapolate(trace, order=2)
        except DivergingLimitError as exc:
            raise NonConvergentError(
                f"no principal value at {s}: {exc}", trace=trace
            ) from exc
        # genuinely non-principal-value integrands leave residuals on the
        # scale of the values themselves (log-divergence and worse); grid
        # noise sits many orders below that
        scale = max(1.0, max(abs(v) for _, v in trace))
        threshold = scale * max(1e-4, 200.0 * quad.adaptive_tolerance)
        if lim.error_estimate > threshold:
            raise NonConvergentError(
                f"exclusion sequence at {s} fails the Cauchy criterion "
                f"(residual {lim.error_estimate:.2e} > {threshold:.2e})",
                trace=trace,
            )
        total += lim.value
        err += lim.error_estimate
        trace_out = [(d, v + (total - lim.value)) for d, v in trace]

    return CurrentValue(total, err, trace_out)


# ---------------------------------------------------------------------------
# cutoff-annulus pairings
# ---------------------------------------------------------------------------

def dbar_cutoff_pairing(g, delta, quad: QuadratureSpec, cutoff=DEFAULT_CUTOFF):
    """The annulus functional ``2i * Int dbar(chi_delta) g dA``.

    This is the building block of all residue-type pairings: with the
    orientation fixed above,
    ``Int dbar(chi_delta) ^ (g dtau) = 2i Int (dchi/dtaubar) g dA``.
    ``g`` is evaluated only on the support annulus delta <= |tau| <= 2 delta.
    """
    nodes, weights = polar_grid(0.0, 2.0 * delta, quad.radial_points,
                                max(quad.angular_points, 32),
                                local_breaks=(1.5 * delta,), rmin=delta)
    _, dbar = cutoff_eval(cutoff, delta, nodes)
    vals = np.asarray(g(nodes), dtype=complex)
    return 2j * complex(np.sum(vals * dbar * weights))


def band_dbar_pairing(g, band: SpatialBand, quad: QuadratureSpec,
                      extra_breaks=()):
    """The annulus functional ``2i * Int dbar(chi_band) g dA`` for a
    spatial cutoff band (used by projection-type operators)."""
    cuts = tuple(b for b in extra_breaks if band.lo < b < band.hi)
    mid = tuple(band.lo + k * (band.hi - band.lo) / 3.0 for k in (1, 2))
    nodes, weights = polar_grid(0.0, band.hi, quad.radial_points,
                                quad.angular_points,
                                local_breaks=cuts + mid, rmin=band.lo)
    vals = np.asarray(g(nodes), dtype=complex)
    return 2j * complex(np.sum(vals * band.dbar_coeff(nodes) * weights))
