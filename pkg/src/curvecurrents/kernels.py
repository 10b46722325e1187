"""Integrand data for the solution and projection operators.

The pieces assembled here: polynomial Hefer data from divided
differences, the Bochner-Martinelli form, the compactly supported
holomorphic-in-z weight, the closed-form kernel on monomial cusps, and a
Stout-type boundary representation for strongly holomorphic functions.

Sign conventions: with ``F`` the scalar kernel factor produced below, the
solution operator on a curve is ``K phi (t) = (1/2 pi i) Int chi F dtau ^ phi``
and the projection operator is ``P phi (t) = -(1/2 pi i) Int dbar(chi) F dtau phi``.
The relative sign is calibrated once by requiring reproduction of
constants on the smooth disc (the Cauchy-Pompeiu baseline); the
acceptance suite pins it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import (
    CurveSpec,
    Parametrization,
    StructureForm,
    make_disc,
    normalize,
    structure_form,
    _monomial_cusp_pattern,
)
from .errors import (
    DenominatorVanishesError,
    InconsistentBranchesError,
    PoleAtDiagonalError,
)
from .polynomials import HEFER_VARS, MultiPoly, eval_tau
from .regularization import SpatialBand

TWO_PI_I = 2j * math.pi

# Spatial cutoff band, as fractions of the parameter disc radius.  The
# inner edge leaves room for targets up to ~0.7 of the disc radius.
BAND_LO_FRACTION = 0.74
BAND_HI_FRACTION = 0.98


# ---------------------------------------------------------------------------
# Hefer data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeferData:
    """Divided-difference pair with (zeta1-z1) g1 + (zeta2-z2) g2 = a(zeta)-a(z).

    The identity holds at the coefficient level, exactly.  The classical
    normalization carries an extra 1/(2 pi i) per form factor, stored
    separately so the polynomials stay exact.
    """

    g1: MultiPoly
    g2: MultiPoly
    a: MultiPoly
    normalization: complex = 1.0 / TWO_PI_I

    def identity_defect(self) -> MultiPoly:
        """(zeta1-z1) g1 + (zeta2-z2) g2 - a(zeta) + a(z); zero when valid."""
        v = HEFER_VARS
        zeta1, zeta2 = MultiPoly.var(v, "zeta1"), MultiPoly.var(v, "zeta2")
        z1, z2 = MultiPoly.var(v, "z1"), MultiPoly.var(v, "z2")
        two = self.a.vars
        a_zeta = self.a.subs({two[0]: zeta1, two[1]: zeta2})
        a_z = self.a.subs({two[0]: z1, two[1]: z2})
        return (zeta1 - z1) * self.g1 + (zeta2 - z2) * self.g2 - a_zeta + a_z

    def eval(self, which, zeta1, zeta2, z1, z2):
        g = self.g1 if which == 1 else self.g2
        return g.eval({"zeta1": zeta1, "zeta2": zeta2, "z1": z1, "z2": z2})


def hefer(a: MultiPoly) -> HeferData:
    """Divided-difference decomposition of a(zeta) - a(z).

    Telescopes each monomial: for zeta1^al zeta2^be,
    ``zeta1^al zeta2^be - z1^al z2^be =
    (zeta1-z1) [sum_{i<al} zeta1^i z1^{al-1-i}] zeta2^be
    + z1^al (zeta2-z2) [sum_{j<be} zeta2^j z2^{be-1-j}]``.
    """
    if len(a.vars) != 2:
        raise ValueError("defining polynomial must have two variables")
    v = HEFER_VARS
    g1 = MultiPoly.zero(v)
    g2 = MultiPoly.zero(v)
    for (al, be), c in a.terms():
        for i in range(al):
            g1 = g1 + MultiPoly(
                v, {(i, be, al - 1 - i, 0): c}
            )
        for j in range(be):
            g2 = g2 + MultiPoly(
                v, {(0, j, al, be - 1 - j): c}
            )
    data = HeferData(g1=g1, g2=g2, a=a)
    if not data.identity_defect().is_zero():
        raise AssertionError("divided-difference identity failed")
    return data


# ---------------------------------------------------------------------------
# Bochner-Martinelli form and compact-support weight
# ---------------------------------------------------------------------------

def bm_form_eval(N: int, zeta, z):
    """Components of the Bochner-Martinelli form B = s/(nabla s), s = d|eta|^2.

    Returns a dict with ``b1``: coefficients of d(eta_j) in B_1, i.e.
    ``conj(eta_j) / (2 pi i |eta|^2)``; for N = 2 also ``b2``: the scalar
    multiplying ``(conj(eta).deta) ^ (dconj(eta).deta)``-type terms,
    ``1 / ((2 pi i)^2 |eta|^4)``.
    """
    if N not in (1, 2):
        raise ValueError("N must be 1 or 2")
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex)).ravel()
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if zeta.size != N or z.size != N:
        raise ValueError(f"points must have {N} components")
    eta = zeta - z
    norm2 = float(np.sum(np.abs(eta) ** 2))
    if norm2 == 0.0:
        raise PoleAtDiagonalError("Bochner-Martinelli form evaluated at zeta = z")
    b1 = np.conj(eta) / (TWO_PI_I * norm2)
    out = {"b1": b1 if N == 2 else complex(b1[0])}
    if N == 2:
        out["b2"] = 1.0 / (TWO_PI_I ** 2 * norm2 ** 2)
    return out


@dataclass(frozen=True)
class WeightSpec:
    """Compactly supported weight, holomorphic in z.

    ``band`` is the radial cutoff: chi = 1 inside band.lo (the inner
    region where targets live) and 0 beyond band.hi.
    """

    ambient_dimension: int
    band: SpatialBand
    holomorphic_in_z: bool = True


def weight_vikt_eval(w: WeightSpec, zeta, z):
    """Components of the weight g = chi - dbar(chi) ^ sigma/(nabla sigma).

    For points ``zeta``, ``z`` (scalars for N=1, length-2 arrays for N=2)
    returns ``g0 = chi(zeta)``, the sigma coefficients
    ``conj(zeta_j) / (2 pi i (|zeta|^2 - conj(zeta).z))``, and the
    dbar(chi) coefficient.  Holomorphic in z wherever defined.
    """
    N = w.ambient_dimension
    zeta_arr = np.atleast_1d(np.asarray(zeta, dtype=complex))
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if zeta_arr.size != N or z_arr.size != N:
        raise ValueError(f"points must have {N} components")
    denom = complex(np.sum(np.abs(zeta_arr) ** 2) - np.sum(np.conj(zeta_arr) * z_arr))
    if abs(denom) < 1e-14:
        raise DenominatorVanishesError("|zeta|^2 - conj(zeta).z vanished")
    radius = math.sqrt(float(np.sum(np.abs(zeta_arr) ** 2)))
    g0 = float(w.band.value(radius))
    sigma = np.conj(zeta_arr) / (TWO_PI_I * denom)
    # dbar(chi) = chi'(|zeta|) * zeta_j / (2 |zeta|) in dconj(zeta_j)
    if radius > 0.0:
        dbar_chi = float(w.band.radial_deriv(radius)) * zeta_arr / (2.0 * radius)
    else:
        dbar_chi = np.zeros(N, dtype=complex)
    return {
        "g0": g0,
        "sigma": sigma if N == 2 else complex(sigma[0]),
        "dbar_chi": dbar_chi if N == 2 else complex(dbar_chi[0]),
        "denominator": denom,
    }


def default_weight(disc_radius: float, ambient_dimension: int = 2) -> WeightSpec:
    band = SpatialBand(BAND_LO_FRACTION * disc_radius,
                       BAND_HI_FRACTION * disc_radius)
    return WeightSpec(ambient_dimension=ambient_dimension, band=band)


# ---------------------------------------------------------------------------
# the closed-form cusp kernel
# ---------------------------------------------------------------------------

def nontrivial_root_coeffs(r: int, s: int) -> list[int]:
    """Integer coefficients (ascending) of prod (x - w) over the rs-th
    roots of unity that are neither r-th nor s-th roots.

    Computed by exact division
    ``(x^{rs} - 1)(x - 1) / ((x^r - 1)(x^s - 1))``; the degree is
    (r-1)(s-1).
    """
    if math.gcd(r, s) != 1:
        raise ValueError("r and s must be coprime")

    def poly_mul(p, q):
        out = [0] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            for j, b in enumerate(q):
                out[i + j] += a * b
        return out

    def poly_div_exact(num, den):
        num = list(num)
        out = [0] * (len(num) - len(den) + 1)
        for k in range(len(out) - 1, -1, -1):
            c = num[k + len(den) - 1] // den[-1]
            if c * den[-1] != num[k + len(den) - 1]:
                raise ArithmeticError("inexact polynomial division")
            out[k] = c
            for j, d in enumerate(den):
                num[k + j] -= c * d
        if any(num[: len(den) - 1]):
            raise ArithmeticError("nonzero remainder")
        return out

    x_rs = [-1] + [0] * (r * s - 1) + [1]
    num = poly_mul(x_rs, [-1, 1])
    num = poly_div_exact(num, [-1] + [0] * (r - 1) + [1])
    num = poly_div_exact(num, [-1] + [0] * (s - 1) + [1])
    assert len(num) == (r - 1) * (s - 1) + 1 and num[-1] == 1
    return num


def split_tail_coeffs(r: int, s: int) -> list[int]:
    """Coefficients d_1..d_k of the exact kernel split
    ``factor(tau, t) = 1/(tau - t) - sum_i d_i t^{i-1} / tau^i``
    with k = (r-1)(s-1).  Follows from partial fractions of the factored
    form; d_i = sum_{m >= i} sigma_m with sigma_m the t^m-coefficient of
    prod (tau - w t) / tau^k.
    """
    b = nontrivial_root_coeffs(r, s)
    k = len(b) - 1
    sigma = [b[k - m] for m in range(k + 1)]
    return [sum(sigma[i:]) for i in range(1, k + 1)]


def cusp_kernel_factor(r: int, s: int, tau, t, guard_tol: float = 1e-6):
    """Scalar factor of the cusp solution kernel:
    ``(tau^{rs} - t^{rs}) / ((tau^s - t^s)(tau^r - t^r)) / tau^{(r-1)(s-1)}``.

    Near coincident root pairings (tau^s ~ t^s or tau^r ~ t^r away from
    tau = t) the direct quotient is 0/0; there the factored form over the
    nontrivial root pairings is used instead.  At tau == t exactly the
    returned value is the Cauchy-pole residue coefficient, which is 1.
    """
    tau = np.asarray(tau, dtype=complex)
    t = complex(t)
    k = (r - 1) * (s - 1)
    scale = np.maximum(np.abs(tau), abs(t)) + 1e-300

    den_s = tau ** s - t ** s
    den_r = tau ** r - t ** r
    bad = (np.abs(den_s) < guard_tol * scale ** s) \
        | (np.abs(den_r) < guard_tol * scale ** r)

    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (tau ** (r * s) - t ** (r * s)) / (den_s * den_r)
        direct = direct / tau ** k if k else direct

    if np.any(bad):
        b = nontrivial_root_coeffs(r, s)
        # prod_S (tau - w t) = sum_i b[i] tau^i t^(k-i), exact integers
        prod = np.zeros_like(tau)
        for i, bi in enumerate(b):
            if bi:
                prod = prod + bi * tau ** i * t ** (k - i)
        diag = np.abs(tau - t) < 1e-14 * scale
        with np.errstate(divide="ignore", invalid="ignore"):
            factored = prod / (tau - t)
            factored = factored / tau ** k if k else factored
        factored = np.where(diag, 1.0, factored)
        out = np.where(bad, factored, direct)
    else:
        out = direct
    if out.shape == ():
        return complex(out)
    return out


# ---------------------------------------------------------------------------
# kernel assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelSpec:
    """Assembled integrand data for the operators K and P on one curve.

    ``variant`` is one of ``"cusp-closed-form"``, ``"general-codim-one"``,
    ``"smooth-disc"``; ``role`` is ``"solution"`` (K) or ``"projection"``
    (P).  ``factor(tau, t)`` is the scalar F with
    ``K phi(t) = (1/2 pi i) Int chi(tau) F(tau, t) dtau ^ phi(tau)``.
    """

    curve: CurveSpec
    weight: WeightSpec
    variant: str
    role: str = "solution"
    hefer_data: HeferData | None = None
    structure: StructureForm | None = None
    param: Parametrization | None = None
    r: int | None = None
    s: int | None = None
    branch_threshold: float = 1e-3

    @property
    def pole_order(self) -> int:
        return self.structure.pole_order if self.structure else 0

    @property
    def disc_radius(self) -> float:
        return self.param.disc_radius

    def factor(self, tau, t):
        if self.variant == "smooth-disc":
            tau = np.asarray(tau, dtype=complex)
            if np.any(np.abs(tau - t) == 0.0):
                raise PoleAtDiagonalError("kernel factor at tau = t")
            return 1.0 / (tau - complex(t))
        if self.variant == "cusp-closed-form":
            return cusp_kernel_factor(self.r, self.s, tau, t)
        return self._general_factor(tau, t)

    def _general_factor(self, tau, t, check=False):
        """On-curve assembly k~ = g1/eta2 (fallback -g2/eta1) times the
        pullback of dzeta2 / (da/dzeta1)."""
        tau = np.asarray(tau, dtype=complex)
        t = complex(t)
        p = self.param
        ze1, ze2 = eval_tau(p.gamma1, tau), eval_tau(p.gamma2, tau)
        z1, z2 = complex(eval_tau(p.gamma1, t)), complex(eval_tau(p.gamma2, t))
        eta1, eta2 = ze1 - z1, ze2 - z2
        g1 = self.hefer_data.eval(1, ze1, ze2, z1, z2)
        g2 = self.hefer_data.eval(2, ze1, ze2, z1, z2)
        scale2 = np.abs(eta2) + np.abs(eta1)
        use2 = np.abs(eta2) >= self.branch_threshold * scale2
        with np.errstate(divide="ignore", invalid="ignore"):
            br2 = g1 / eta2
            br1 = -g2 / eta1
        kt = np.where(use2, br2, br1)
        if check:
            both = (np.abs(eta2) >= self.branch_threshold) \
                & (np.abs(eta1) >= self.branch_threshold)
            if np.any(both):
                diff = np.abs(br2 - br1)[both]
                ref = np.abs(kt[both]) + 1.0
                if np.max(diff / ref) > 1e-8:
                    raise InconsistentBranchesError(
                        f"branch mismatch up to {np.max(diff / ref):.2e}"
                    )
        dgamma2 = eval_tau(p.gamma2.partial("tau"), tau)
        jac = self.structure.jacobian.eval({"z1": ze1, "z2": ze2})
        out = kt * dgamma2 / jac
        if out.shape == ():
            return complex(out)
        return out

    def consistency_defect(self, tau, t):
        """Max relative disagreement of the two branch expressions where
        both denominators are well conditioned."""
        tau = np.asarray(tau, dtype=complex)
        t = complex(t)
        p = self.param
        ze1, ze2 = eval_tau(p.gamma1, tau), eval_tau(p.gamma2, tau)
        z1, z2 = complex(eval_tau(p.gamma1, t)), complex(eval_tau(p.gamma2, t))
        eta1, eta2 = ze1 - z1, ze2 - z2
        g1 = self.hefer_data.eval(1, ze1, ze2, z1, z2)
        g2 = self.hefer_data.eval(2, ze1, ze2, z1, z2)
        both = (np.abs(eta1) > self.branch_threshold) & (np.abs(eta2) > self.branch_threshold)
        if not np.any(both):
            return 0.0
        br2 = g1[both] / eta2[both]
        br1 = -g2[both] / eta1[both]
        return float(np.max(np.abs(br2 - br1) / (np.abs(br2) + 1.0)))

    def with_role(self, role: str):
        from dataclasses import replace
        return replace(self, role=role)


def disc_kernel(radius: float = 1.0, role: str = "solution",
                weight: WeightSpec | None = None) -> KernelSpec:
    """The smooth-disc baseline: Cauchy kernel with the compact weight."""
    curve = make_disc(radius)
    param = normalize(curve)
    if weight is None:
        weight = default_weight(param.disc_radius, ambient_dimension=1)
    return KernelSpec(curve=curve, weight=weight, variant="smooth-disc",
                      role=role, param=param)


def curve_kernel_assemble(spec: CurveSpec, weight: WeightSpec | None = None,
                          role: str = "solution",
                          variant: str | None = None) -> KernelSpec:
    """Assemble the codimension-one curve kernel.

    For monomial cusps the general assembly (Hefer quotient times the
    Jacobian pullback) agrees with the closed-form factor; both are kept
    and cross-checked in the tests.
    """
    if spec.kind == "map" and not spec.smooth:
        raise ValueError("kernel assembly needs a defining equation")
    if spec.kind == "implicit":
        pattern = _monomial_cusp_pattern(spec.a)
        if pattern is None:
            raise ValueError("only z1^r - z2^s implicit curves are supported")
        spec = CurveSpec(kind="cusp", ball_radius=spec.ball_radius,
                         r=pattern[0], s=pattern[1])
    if spec.kind == "map":
        return disc_kernel(spec.ball_radius, role)
    param = normalize(spec)
    if weight is None:
        weight = default_weight(param.disc_radius, ambient_dimension=2)
    if variant is None:
        variant = "cusp-closed-form"
    return KernelSpec(
        curve=spec,
        weight=weight,
        variant=variant,
        role=role,
        hefer_data=hefer(spec.defining_polynomial()),
        structure=structure_form(spec),
        param=param,
        r=spec.r,
        s=spec.s,
    )


# ---------------------------------------------------------------------------
# Stout-type boundary representation
# ---------------------------------------------------------------------------

def stout_boundary_kernel(spec: CurveSpec, phi_hol: MultiPoly, t,
                          n_nodes: int = 512) -> complex:
    """Boundary representation of a strongly holomorphic function.

    In the limit where the weight cutoff becomes the characteristic
    function of the ball, the projection collapses to a contour integral
    over the parameter circle; the weight denominator
    ``|zeta|^2 - z . conj(zeta)`` cancels against the Hefer numerator on
    the curve.  ``phi_hol`` is an ambient holomorphic polynomial in
    (z1, z2); the return value approximates its value at gamma(t).
    """
    if spec.kind != "cusp":
        raise ValueError("boundary representation implemented for cusps")
    param = normalize(spec)
    rho0 = param.disc_radius
    t = complex(t)
    if abs(t) >= rho0:
        raise ValueError("target must be interior")
    hd = hefer(spec.defining_polynomial())
    theta = 2.0 * math.pi * np.arange(n_nodes) / n_nodes
    tau = rho0 * np.exp(1j * theta)
    ze1, ze2 = param.point(tau)
    z1, z2 = complex(eval_tau(param.gamma1, t)), complex(eval_tau(param.gamma2, t))
    g1 = hd.eval(1, ze1, ze2, z1, z2)
    g2 = hd.eval(2, ze1, ze2, z1, z2)
    p_tilde = g1 * np.conj(ze2) - g2 * np.conj(ze1)
    denom = np.conj(ze1) * (ze1 - z1) + np.conj(ze2) * (ze2 - z2)
    dgamma2 = eval_tau(param.gamma2.partial("tau"), tau)
    jac = spec.r * ze1 ** (spec.r - 1) if spec.r > 1 else np.ones_like(ze1)
    two = phi_hol.vars
    phi_vals = phi_hol.eval({two[0]: ze1, two[1]: ze2})
    integrand = p_tilde / denom * (dgamma2 / jac) * phi_vals
    # (1/2 pi i) contour integral, dtau = i tau dtheta
    return complex(np.sum(integrand * tau)) / n_nodes
