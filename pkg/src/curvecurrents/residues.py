"""Principal-value and residue currents in one and two variables.

Pairings are computed by cutoff regularization and extrapolation
(:mod:`.regularization`); each operation has an independent exact oracle
built from symbolic derivatives of the test polynomial.  The oracles
never share code with the quadrature engine.

Conventions: ``<1/tau^m, psi (i/2) dtau^dtaubar>`` pairs against the
positive area measure; ``<dbar(1/tau^m), psi dtau>`` is the limit of
``Int dbar(chi_delta) ^ (psi/tau^m) dtau``, which in one variable
extracts ``2 pi i / (m-1)!`` times the (m-1)-st holomorphic derivative
of ``psi`` at 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .polynomials import AMBIENT_VARS, TAU_VARS, MultiPoly, eval_tau
from .regularization import (
    CurrentValue,
    QuadratureSpec,
    RegularizationSchedule,
    bump_profile,
    bump_profile_prime,
    chi_profile,
    chi_profile_prime,
    dbar_cutoff_pairing,
    limit_extrapolate,
    polar_grid,
    pv_integrate,
)

TWO_PI_I = 2j * math.pi

DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class TestForm:
    """A compactly supported test form on the parameter disc.

    The coefficient is a polynomial in (tau, taubar) times the standard
    radial bump, which is identically 1 for ``|tau| <= support_radius``
    and 0 beyond twice that, so all derivatives at 0 are those of the
    polynomial.  ``degree`` is q for a (0, q)-form, q in {0, 1}.
    """

    poly: MultiPoly
    support_radius: float
    degree: int = 0
    smoothness_class: str = "intrinsic-smooth"
    bump: bool = True

    def __post_init__(self):
        if self.poly.vars != TAU_VARS:
            raise ValueError("test-form coefficients live in (tau, taubar)")
        if self.degree not in (0, 1):
            raise ValueError("degree must be 0 or 1")
        if self.support_radius <= 0:
            raise ValueError("support_radius must be positive")

    @property
    def outer_radius(self) -> float:
        return 2.0 * self.support_radius if self.bump else math.inf

    def bump_value(self, tau):
        if not self.bump:
            return np.ones(np.shape(tau), dtype=float)
        rho = np.abs(np.asarray(tau, dtype=complex))
        return bump_profile(rho / self.support_radius)

    def coeff(self, tau):
        """Coefficient value psi(tau, taubar) including the bump."""
        return eval_tau(self.poly, tau) * self.bump_value(tau)

    def dbar_coeff(self, tau):
        """Coefficient of dtaubar in dbar(psi * bump), in closed form."""
        tau = np.asarray(tau, dtype=complex)
        rho = np.abs(tau)
        out = eval_tau(self.poly.partial("taubar"), tau) * self.bump_value(tau)
        if self.bump:
            safe = np.where(rho > 0.0, rho, 1.0)
            ring = bump_profile_prime(rho / self.support_radius) \
                * tau / (2.0 * safe * self.support_radius)
            ring = np.where(rho > 0.0, ring, 0.0)
            out = out + eval_tau(self.poly, tau) * ring
        return out

    def germ(self, a: int, b: int):
        """Exact Taylor coefficient of tau^a taubar^b at 0."""
        return self.poly.coeff((a, b))

    def scaled(self, c):
        return replace(self, poly=self.poly * c)

    # structured views: lists of (a, b, coeff, radial_fn|None) with
    # value = sum coeff * radial(|tau|) * tau^a taubar^b.  Radial factors
    # are rotation invariant, which the operator layer exploits.
    def coeff_terms(self):
        radial = self._bump_radial() if self.bump else None
        return [(a, b, c, radial) for (a, b), c in self.poly.terms()]

    def dbar_terms(self):
        out = []
        radial = self._bump_radial() if self.bump else None
        for (a, b), c in self.poly.partial("taubar").terms():
            out.append((a, b, c, radial))
        if self.bump:
            ring = self._ring_radial()
            for (a, b), c in self.poly.terms():
                out.append((a + 1, b, c, ring))
        return out

    def _bump_radial(self):
        sr = self.support_radius
        return lambda rho: bump_profile(rho / sr)

    def _ring_radial(self):
        sr = self.support_radius
        return lambda rho: bump_profile_prime(rho / sr) / (2.0 * rho * sr)


def monomial_form(a: int, b: int, support_radius: float, degree: int = 0,
                  coeff=1) -> TestForm:
    return TestForm(MultiPoly(TAU_VARS, {(a, b): coeff}), support_radius,
                    degree=degree)


def _as_poly(psi) -> MultiPoly:
    return psi.poly if isinstance(psi, TestForm) else psi


def _schedule_for(psi: TestForm, schedule):
    if schedule is not None:
        if 2.0 * schedule.delta_max > psi.outer_radius:
            raise ValueError("schedule reaches outside the test-form support")
        return schedule
    return RegularizationSchedule(delta_max=0.2 * psi.support_radius)


# ---------------------------------------------------------------------------
# one-variable currents
# ---------------------------------------------------------------------------

def residue_oracle(m: int, psi) -> complex:
    """Exact value of ``<dbar(1/tau^m), psi dtau>``.

    Equals ``2 pi i`` times the tau^(m-1)-coefficient of the polynomial
    part of psi (only holomorphic derivatives contribute).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    return TWO_PI_I * complex(_as_poly(psi).coeff((m - 1, 0)))


def residue_pair(m: int, psi: TestForm, schedule=None,
                 quad: QuadratureSpec = DEFAULT_QUAD) -> CurrentValue:
    """Regularized pairing ``<dbar(1/tau^m), psi dtau>``.

    Computed as the limit over the schedule of the annulus integrals
    ``Int dbar(chi_delta) ^ (psi / tau^m) dtau``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    schedule = _schedule_for(psi, schedule)
    trace = []
    for delta in schedule.deltas:
        val = dbar_cutoff_pairing(
            lambda tau: psi.coeff(tau) / tau ** m, delta, quad
        )
        trace.append((delta, val))
    return limit_extrapolate(trace, schedule.extrapolation_order)


def pv_pair(m: int, psi: TestForm, schedule=None,
            quad: QuadratureSpec = DEFAULT_QUAD) -> CurrentValue:
    """Principal-value pairing ``<1/tau^m, psi (i/2) dtau^dtaubar>``.

    Each trace entry integrates ``chi_delta psi / tau^m`` over the disc;
    the cutoff removes the neighborhood of 0, so the integrals are plain
    and the limit is extrapolated.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    schedule = _schedule_for(psi, schedule)
    outer = psi.outer_radius
    trace = []
    for delta in schedule.deltas:
        nodes, weights = polar_grid(
            0.0, outer, quad.radial_points, quad.angular_points,
            local_breaks=(2.0 * delta, psi.support_radius), rmin=delta,
        )
        chi = chi_profile(np.abs(nodes) / delta)
        vals = psi.coeff(nodes) / nodes ** m
        trace.append((delta, complex(np.sum(weights * chi * vals))))
    return limit_extrapolate(trace, schedule.extrapolation_order)


def pv_oracle(m: int, psi: TestForm, quad: QuadratureSpec = DEFAULT_QUAD):
    """Independent route for smooth pairings: plain quadrature of the
    integrand with the removable part cancelled symbolically.

    Only valid when psi = tau^m * (smooth); used by tests."""
    nodes, weights = polar_grid(0.0, psi.outer_radius, quad.radial_points,
                                quad.angular_points,
                                local_breaks=(psi.support_radius,))
    return complex(np.sum(weights * psi.coeff(nodes) / nodes ** m))


def sep_restrict(m: int, psi: TestForm, schedule=None,
                 quad: QuadratureSpec = DEFAULT_QUAD) -> CurrentValue:
    """Pairing of ``1_{{0}} (1/tau^m)`` with psi; zero iff 1/tau^m has the
    standard extension property at 0, which it does.

    The two terms are computed by genuinely different mechanisms: the
    full pairing by symmetric-exclusion principal value, the restricted
    one by the cutoff limit.
    """
    full = pv_integrate(
        lambda tau: psi.coeff(tau) / tau ** m,
        quad, singular_set=(0.0,), radius=psi.outer_radius,
        global_breaks=(psi.support_radius,),
    )
    removed = pv_pair(m, psi, schedule, quad)
    trace = [(d, full.value - v) for d, v in removed.trace]
    return CurrentValue(full.value - removed.value,
                        full.error_estimate + removed.error_estimate, trace)


def residue_restriction(m: int, psi: TestForm, schedule=None,
                        quad: QuadratureSpec = DEFAULT_QUAD) -> CurrentValue:
    """Pairing of ``1_{{0}} dbar(1/tau^m)`` with psi dtau.

    Support of the residue current sits at 0, so the restriction returns
    the full pairing: the removed part ``lim chi_outer dbar(1/tau^m)``
    vanishes because the inner annuli leave the outer cutoff's support.
    """
    schedule = _schedule_for(psi, schedule)
    full = residue_pair(m, psi, schedule, quad)
    outer_trace = []
    for d_out in schedule.deltas:
        inner = []
        for j in range(schedule.count):
            d_in = 0.25 * d_out * schedule.ratio ** j
            val = dbar_cutoff_pairing(
                lambda tau: chi_profile(np.abs(tau) / d_out)
                * psi.coeff(tau) / tau ** m,
                d_in, quad,
            )
            inner.append((d_in, val))
        outer_trace.append((d_out, limit_extrapolate(inner).value))
    removed = limit_extrapolate(outer_trace, schedule.extrapolation_order)
    return CurrentValue(full.value - removed.value,
                        full.error_estimate + removed.error_estimate,
                        full.trace)


# ---------------------------------------------------------------------------
# two-variable Coleff-Herrera products for monomial ideals
# ---------------------------------------------------------------------------

def ch_tensor_oracle(p: int, q: int, psi: MultiPoly) -> complex:
    """Exact tensor value of ``<dbar(1/z2^q)^dbar(1/z1^p), psi dz1^dz2>``:
    ``(2 pi i)^2`` times the z1^(p-1) z2^(q-1) coefficient of psi."""
    if psi.vars != AMBIENT_VARS:
        raise ValueError("psi must be a polynomial in (z1, z1b, z2, z2b)")
    return TWO_PI_I ** 2 * complex(psi.coeff((p - 1, 0, q - 1, 0)))


def ch_product_pair(p: int, q: int, psi: MultiPoly, schedule=None,
                    quad: QuadratureSpec | None = None,
                    support_radius: float = 0.5) -> CurrentValue:
    """Iterated-cutoff Coleff-Herrera pairing for the ideal (z1^p, z2^q).

    The inner factor ``dbar(1/z1^p)`` is regularized at the separated
    scale ``delta**2`` and the outer one at ``delta``, emulating the
    iterated one-variable limits; the trace over delta is extrapolated.
    The test polynomial is assumed to carry a bump that is 1 on the
    sampled bi-annuli (true for the schedules used here).
    """
    if p < 1 or q < 1:
        raise ValueError("p, q must be >= 1")
    if psi.vars != AMBIENT_VARS:
        raise ValueError("psi must be a polynomial in (z1, z1b, z2, z2b)")
    if schedule is None:
        # the inner scale delta^2 spans twice the decades, so the nested
        # trace is kept shorter than the one-variable default
        schedule = RegularizationSchedule(delta_max=0.2 * support_radius,
                                          count=6)
    if quad is None:
        quad = QuadratureSpec(radial_points=10, angular_points=24)

    trace = []
    for delta in schedule.deltas:
        d_in = delta * delta
        n1, w1 = polar_grid(0.0, 2.0 * d_in, quad.radial_points,
                            quad.angular_points, rmin=d_in)
        n2, w2 = polar_grid(0.0, 2.0 * delta, quad.radial_points,
                            quad.angular_points, rmin=delta)
        rho1, rho2 = np.abs(n1), np.abs(n2)
        d1 = (chi_profile_prime(rho1 / d_in) * n1 / (2.0 * rho1 * d_in)
              / n1 ** p) * w1
        d2 = (chi_profile_prime(rho2 / delta) * n2 / (2.0 * rho2 * delta)
              / n2 ** q) * w2
        grid = psi.eval({
            "z1": n1[:, None], "z1b": np.conj(n1)[:, None],
            "z2": n2[None, :], "z2b": np.conj(n2)[None, :],
        })
        val = -4.0 * complex(d1 @ np.asarray(grid, dtype=complex) @ d2)
        trace.append((delta, val))
    # pairings live on the (2 pi)^2 scale; roundoff from the nested inner
    # annuli must not trip the divergence detector
    return limit_extrapolate(trace, schedule.extrapolation_order,
                             divergence_floor=1.0)
