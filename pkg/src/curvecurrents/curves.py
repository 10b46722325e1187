"""Singular plane curves, normalizations, pullbacks, and structure forms.

A curve is the zero set of ``z1^r - z2^s`` (a monomial cusp), the image of
an explicit polynomial map ``tau -> (gamma1, gamma2)``, or the zero set of
a given polynomial in two variables; the domain is the intersection with
the ball of a prescribed radius.  Only curves with a single singular point
at the origin are supported.  All types are immutable after construction.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polynomials import (
    AMBIENT_VARS,
    TAU_VARS,
    MultiPoly,
    eval_tau,
    parse_poly,
)
from .residues import TestForm

TWO_PI_I = 2j * math.pi

_CONJ_PAIRS = {"tau": "taubar", "taubar": "tau"}


@dataclass(frozen=True)
class CurveSpec:
    """A singular plane curve with its ambient ball domain.

    ``kind`` is one of ``"cusp"`` (monomial cusp ``z1^r = z2^s``),
    ``"map"`` (explicit parametrized image), or ``"implicit"``.
    """

    kind: str
    ball_radius: float
    r: int | None = None
    s: int | None = None
    gamma1: MultiPoly | None = None
    gamma2: MultiPoly | None = None
    a: MultiPoly | None = None

    @property
    def smooth(self) -> bool:
        """True when the curve is a smooth graph (no singular point)."""
        if self.kind == "cusp":
            return self.r == 1
        if self.kind == "map":
            g1 = self.gamma1.coeff((1, 0)) if self.gamma1 else 0
            g2 = self.gamma2.coeff((1, 0)) if self.gamma2 else 0
            return g1 != 0 or g2 != 0
        return False

    def defining_polynomial(self) -> MultiPoly:
        if self.kind == "cusp":
            two = ("z1", "z2")
            return (MultiPoly.var(two, "z1") ** self.r
                    - MultiPoly.var(two, "z2") ** self.s)
        if self.kind == "implicit":
            return self.a
        raise ValueError("parametrized curves carry no defining polynomial")


@dataclass(frozen=True)
class Parametrization:
    """The normalization ``tau -> (gamma1(tau), gamma2(tau))``.

    ``disc_radius`` is the parameter radius at which the image meets the
    boundary of the ambient ball.
    """

    gamma1: MultiPoly
    gamma2: MultiPoly
    disc_radius: float

    def point(self, tau):
        return eval_tau(self.gamma1, tau), eval_tau(self.gamma2, tau)

    def norm(self, tau):
        g1, g2 = self.point(tau)
        return np.sqrt(np.abs(g1) ** 2 + np.abs(g2) ** 2)


@dataclass(frozen=True)
class StructureForm:
    """The intrinsic meromorphic form ``c * f(tau) dtau / tau^k``.

    For a monomial cusp the numerator is 1, ``k = (r-1)(s-1)`` and
    ``c = -2 pi i``; the ambient contraction data (coordinate split and
    Jacobian factor) are kept for diagnostics.
    """

    numerator: MultiPoly
    pole_order: int
    constant_factor: complex
    split: tuple = ()
    jacobian: MultiPoly | None = None

    def __post_init__(self):
        if self.numerator.coeff((0, 0)) == 0:
            raise ValueError("structure-form numerator must be a unit at 0")
        if self.pole_order < 0:
            raise ValueError("pole_order must be nonnegative")

    def coeff(self, tau):
        """The dtau-coefficient ``c f(tau) / tau^k`` (tau nonzero)."""
        tau = np.asarray(tau, dtype=complex)
        vals = self.constant_factor * eval_tau(self.numerator, tau)
        if self.pole_order:
            vals = vals / tau ** self.pole_order
        return vals

    def numerator_value(self, tau):
        return eval_tau(self.numerator, tau)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def make_cusp(r: int, s: int, ball_radius: float) -> CurveSpec:
    """Monomial cusp ``z1^r = z2^s`` inside the ball of ``ball_radius``.

    Requires ``1 <= r < s`` and ``gcd(r, s) = 1``; ``r = 1`` is accepted
    and flagged smooth (the curve is the graph of a function).
    """
    r, s = int(r), int(s)
    if r < 1 or s <= r:
        raise ValueError(f"need 1 <= r < s, got ({r}, {s})")
    if math.gcd(r, s) != 1:
        raise ValueError(
            f"gcd({r},{s}) = {math.gcd(r, s)} != 1: z1^{r} - z2^{s} is not reduced"
        )
    if ball_radius <= 0:
        raise ValueError("ball_radius must be positive")
    return CurveSpec(kind="cusp", ball_radius=float(ball_radius), r=r, s=s)


def make_parametrized(gamma1: MultiPoly, gamma2: MultiPoly,
                      ball_radius: float) -> CurveSpec:
    """Curve given as the image of ``tau -> (gamma1, gamma2)``."""
    for g in (gamma1, gamma2):
        if g.vars != TAU_VARS:
            raise ValueError("gamma must be polynomials in tau")
        if g.degree_in("taubar") > 0:
            raise ValueError("gamma must be holomorphic in tau")
        if g.coeff((0, 0)) != 0:
            raise ValueError("gamma must vanish at 0")
    if ball_radius <= 0:
        raise ValueError("ball_radius must be positive")
    if not _generically_injective(gamma1, gamma2):
        raise ValueError("parametrization is not generically injective")
    return CurveSpec(kind="map", ball_radius=float(ball_radius),
                     gamma1=gamma1, gamma2=gamma2)


def make_implicit(a: MultiPoly, ball_radius: float) -> CurveSpec:
    """Curve ``{a = 0}``; ``a`` must be square-free."""
    if set(a.vars) != {"z1", "z2"}:
        raise ValueError("defining polynomial must be in z1, z2")
    if _monomial_cusp_pattern(a) is None and not _squarefree_heuristic(a):
        raise ValueError("defining polynomial must be square-free")
    return CurveSpec(kind="implicit", ball_radius=float(ball_radius), a=a)


def make_disc(radius: float) -> CurveSpec:
    """The smooth baseline: the disc embedded as ``tau -> (tau, 0)``."""
    g1 = MultiPoly.var(TAU_VARS, "tau")
    g2 = MultiPoly.zero(TAU_VARS)
    return CurveSpec(kind="map", ball_radius=float(radius),
                     gamma1=g1, gamma2=g2)


def _poly_roots(p: MultiPoly):
    deg = p.degree_in("tau")
    if deg < 1:
        return np.array([], dtype=complex)
    coeffs = [complex(p.coeff((deg - i, 0))) for i in range(deg + 1)]
    return np.roots(coeffs)


def _generically_injective(gamma1, gamma2, samples=24) -> bool:
    """Sampling check: distinct parameters map to distinct points.

    For sampled sigma, every root tau != sigma of gamma1(tau) = gamma1(sigma)
    must separate in the second coordinate (a sampled stand-in for the
    vanishing of the resultant-based coincidence locus).
    """
    if gamma2.is_zero() and gamma1.degree_in("tau") == 1:
        return True
    rng_angles = np.linspace(0.13, 2 * math.pi + 0.13, samples, endpoint=False)
    for rho in (0.37, 0.61, 0.89):
        for ang in rng_angles:
            sigma = rho * np.exp(1j * ang)
            v1 = complex(eval_tau(gamma1, sigma))
            shifted = gamma1 - MultiPoly.const(TAU_VARS, v1)
            for root in _poly_roots(shifted):
                if abs(root - sigma) < 1e-9:
                    continue
                v2 = complex(eval_tau(gamma2, root)) - complex(eval_tau(gamma2, sigma))
                if abs(v2) < 1e-9:
                    return False
    return True


def _squarefree_heuristic(a: MultiPoly) -> bool:
    """gcd(a, da/dz1, da/dz2) is constant, checked at random points."""
    az1, az2 = a.partial("z1"), a.partial("z2")
    rng = np.random.default_rng(7)
    hits = 0
    for _ in range(400):
        z1 = complex(*rng.normal(size=2))
        z2 = complex(*rng.normal(size=2))
        v = a.eval({"z1": z1, "z2": z2})
        if abs(v) < 1e-9 and abs(az1.eval({"z1": z1, "z2": z2})) < 1e-9 \
                and abs(az2.eval({"z1": z1, "z2": z2})) < 1e-9:
            hits += 1
    return hits == 0


def _monomial_cusp_pattern(a: MultiPoly):
    """Recognize c*(z1^r - z2^s); returns (r, s) or None."""
    terms = a.terms()
    if len(terms) != 2:
        return None
    (e1, c1), (e2, c2) = terms
    if e1[0] > 0 and e1[1] == 0 and e2[0] == 0 and e2[1] > 0:
        r, s, cr, cs = e1[0], e2[1], c1, c2
    elif e2[0] > 0 and e2[1] == 0 and e1[0] == 0 and e1[1] > 0:
        r, s, cr, cs = e2[0], e1[1], c2, c1
    else:
        return None
    if cr != -cs:
        return None
    if r >= s or math.gcd(r, s) != 1:
        return None
    return (r, s)


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def _is_monomial(p: MultiPoly) -> bool:
    return len(p.coeffs) <= 1


def _circle_max(gamma1, gamma2, rho, coarse=256):
    if _is_monomial(gamma1) and _is_monomial(gamma2):
        total = 0.0
        for g in (gamma1, gamma2):
            for (e, _), c in g.terms():
                total += abs(complex(c)) ** 2 * rho ** (2 * e)
        return math.sqrt(total)

    thetas = np.linspace(0.0, 2 * math.pi, coarse, endpoint=False)
    tau = rho * np.exp(1j * thetas)
    vals = np.abs(eval_tau(gamma1, tau)) ** 2 + np.abs(eval_tau(gamma2, tau)) ** 2
    i = int(np.argmax(vals))

    def v(theta):
        t = rho * np.exp(1j * theta)
        return (abs(complex(eval_tau(gamma1, t))) ** 2
                + abs(complex(eval_tau(gamma2, t))) ** 2)

    lo = thetas[i] - 2 * math.pi / coarse
    hi = thetas[i] + 2 * math.pi / coarse
    for _ in range(40):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if v(m1) < v(m2):
            lo = m1
        else:
            hi = m2
    return math.sqrt(v(0.5 * (lo + hi)))


def _solve_disc_radius(gamma1, gamma2, ball_radius, tol=1e-12):
    """Bisection on the increasing function rho -> max_{|tau|=rho} |gamma|."""
    hi = 1.0
    while _circle_max(gamma1, gamma2, hi) < ball_radius:
        hi *= 2.0
        if hi > 1e8:
            raise ValueError("parametrization never reaches the ball boundary")
    lo = 0.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if _circle_max(gamma1, gamma2, mid) < ball_radius:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@functools.lru_cache(maxsize=64)
def normalize(spec: CurveSpec) -> Parametrization:
    """Normalization of the curve: ``tau -> (tau^s, tau^r)`` for cusps,
    the given map for parametrized curves.

    Implicit curves are supported only for the quasi-homogeneous pattern
    ``z1^r - z2^s`` (documented limitation).
    """
    if spec.kind == "cusp":
        g1 = MultiPoly.var(TAU_VARS, "tau", power=spec.s)
        g2 = MultiPoly.var(TAU_VARS, "tau", power=spec.r)
    elif spec.kind == "map":
        g1, g2 = spec.gamma1, spec.gamma2
    else:
        pattern = _monomial_cusp_pattern(spec.a)
        if pattern is None:
            raise ValueError(
                "normalization of implicit curves is supported only for "
                "z1^r - z2^s"
            )
        r, s = pattern
        g1 = MultiPoly.var(TAU_VARS, "tau", power=s)
        g2 = MultiPoly.var(TAU_VARS, "tau", power=r)
    rho0 = _solve_disc_radius(g1, g2, spec.ball_radius)
    return Parametrization(g1, g2, rho0)


# ---------------------------------------------------------------------------
# pullbacks and structure forms
# ---------------------------------------------------------------------------

def _gamma_substitution(param: Parametrization):
    conj = _CONJ_PAIRS
    return {
        "z1": param.gamma1,
        "z1b": param.gamma1.conjugated(conj),
        "z2": param.gamma2,
        "z2b": param.gamma2.conjugated(conj),
    }


def pullback_form(param: Parametrization, ambient_coeffs, support_radius,
                  bump=True) -> TestForm:
    """Pull back the ambient (0,1)-form ``P dz1b + Q dz2b`` to the disc.

    The coefficient of ``dtaubar`` is
    ``(P o gamma) conj(gamma1') + (Q o gamma) conj(gamma2')`` times the
    standard bump at ``support_radius``.
    """
    P, Q = ambient_coeffs
    sub = _gamma_substitution(param)
    d1 = param.gamma1.partial("tau").conjugated(_CONJ_PAIRS)
    d2 = param.gamma2.partial("tau").conjugated(_CONJ_PAIRS)
    psi = P.subs(sub) * d1 + Q.subs(sub) * d2
    if support_radius > param.disc_radius:
        raise ValueError("support_radius exceeds the parameter disc")
    return TestForm(poly=psi, support_radius=float(support_radius), degree=1,
                    smoothness_class="ambient-pullback", bump=bump)


def pullback_function(param: Parametrization, ambient_poly,
                      support_radius, bump=True) -> TestForm:
    """Pull back an ambient smooth (polynomial) function to the disc."""
    psi = ambient_poly.subs(_gamma_substitution(param))
    return TestForm(poly=psi, support_radius=float(support_radius), degree=0,
                    smoothness_class="ambient-pullback", bump=bump)


def structure_form(spec: CurveSpec) -> StructureForm:
    """The intrinsic form ``-2 pi i dtau / tau^{(r-1)(s-1)}`` of a cusp.

    Substituting the normalization into the ambient contraction
    representative cancels the factor ``r``: ``dzeta2 = r tau^{r-1} dtau``
    and ``zeta1^{r-1} = tau^{s(r-1)}``.
    """
    if spec.kind == "map":
        raise ValueError(
            "structure form requires the embedding data of a defining "
            "equation; parametrized curves carry none"
        )
    if spec.kind == "implicit":
        pattern = _monomial_cusp_pattern(spec.a)
        if pattern is None:
            raise ValueError("structure forms are supported only for z1^r - z2^s")
        r, s = pattern
    else:
        r, s = spec.r, spec.s
    two = ("z1", "z2")
    jac = MultiPoly.var(two, "z1", power=r - 1, coeff=r) if r > 1 \
        else MultiPoly.const(two, 1)
    return StructureForm(
        numerator=MultiPoly.const(TAU_VARS, 1),
        pole_order=(r - 1) * (s - 1),
        constant_factor=-TWO_PI_I,
        split=("z1",),
        jacobian=jac,
    )


def sing_distance(spec: CurveSpec, t) -> float:
    """Distance from the curve point gamma(t) to the singular point.

    Smooth curves report +inf (empty singular set).  Used only in
    diagnostics of the blow-up rates of structure forms and kernels.
    """
    if spec.smooth:
        return math.inf
    param = normalize(spec)
    return float(param.norm(complex(t)))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _poly_to_string(p: MultiPoly) -> str:
    bits = []
    for (e, _), c in p.terms():
        if isinstance(c, Fraction):
            cs = f"({c.numerator}/{c.denominator})"
        elif isinstance(c, complex):
            cs = f"({c.real:+g}{c.imag:+g}j)"
        else:
            cs = f"({c})"
        bits.append(f"{cs}*t^{e}" if e else cs)
    return " + ".join(bits) if bits else "0"


def parse_gamma(text: str) -> MultiPoly:
    """Parse a holomorphic polynomial in ``t`` for curve configs."""
    p = parse_poly(text, TAU_VARS, names={"t": "tau", "tau": "tau"},
                   conj_names=_CONJ_PAIRS)
    if p.degree_in("taubar") > 0:
        raise ValueError("gamma must be holomorphic (no conj terms)")
    return p


def curve_to_config(spec: CurveSpec) -> dict:
    out = {"kind": spec.kind, "ball_radius": repr(spec.ball_radius)}
    if spec.kind == "cusp":
        out["r"] = str(spec.r)
        out["s"] = str(spec.s)
    elif spec.kind == "map":
        out["gamma1"] = _poly_to_string(spec.gamma1)
        out["gamma2"] = _poly_to_string(spec.gamma2)
    else:
        raise ValueError("implicit curves are configured via gamma or (r, s)")
    return out


def curve_from_config(cfg: dict) -> CurveSpec:
    kind = cfg["kind"].strip().lower()
    ball = float(cfg.get("ball_radius", 1.0))
    if kind == "cusp":
        return make_cusp(int(cfg["r"]), int(cfg["s"]), ball)
    if kind == "map":
        return make_parametrized(parse_gamma(cfg["gamma1"]),
                                 parse_gamma(cfg["gamma2"]), ball)
    if kind == "disc":
        return make_disc(ball)
    raise ValueError(f"unknown curve kind {kind!r}")
