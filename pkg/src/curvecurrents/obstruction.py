"""Jet-level certification that a dbar datum admits no smooth solution.

A smooth ambient solution ``f`` composed with the parametrization has a
Taylor expansion whose coefficients are (exactly computable) linear
combinations of the jet of ``f``.  Prescribing the jet of a particular
solution of ``d psi / d taubar = mu`` therefore yields a linear system
over the rationals: if the target jet lies outside the span of the
pullback jets (with holomorphic parameter directions added as free
columns, since holomorphic additions leave the equation unchanged), no
smooth solution exists, and a left null functional gives an exact
certificate.  Feasibility at a finite order is necessary but not
sufficient for smooth solvability, so a feasible outcome is inconclusive
in that direction; infeasibility is a proof.

All arithmetic is exact (int / Fraction); no floating point enters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import Parametrization
from .errors import JetOrderError
from .polynomials import TAU_VARS, MultiPoly


def _require_exact(p: MultiPoly, what: str):
    for _, c in p.terms():
        if not isinstance(c, (int, Fraction)):
            raise ValueError(
                f"{what} must have integer or rational coefficients for the "
                f"exact jet computation; got {type(c).__name__}"
            )


def _antiholomorphic_primitive(mu: MultiPoly) -> MultiPoly:
    """Termwise primitive in taubar: tau^m taubar^n -> tau^m taubar^(n+1)/(n+1)."""
    out = {}
    for (m, n), c in mu.terms():
        out[(m, n + 1)] = Fraction(c) / (n + 1) if isinstance(c, int) \
            else c / (n + 1)
    return MultiPoly(TAU_VARS, out)


@dataclass(frozen=True)
class JetSystem:
    """The linear system 'ambient jets -> parameter jets' with its target.

    ``rows`` are parameter-jet exponent pairs (m, n) with m + n <= D';
    ``columns`` pair a label with the exact truncated pullback jet.
    Labels are ``("mono", a, b, c, d)`` for the ambient monomial
    ``z^a conj(z)^b w^c conj(w)^d`` and ``("hol", m)`` for the free
    holomorphic directions tau^m.
    """

    param: Parametrization
    ambient_order: int
    parameter_order: int
    rows: tuple
    columns: tuple  # ((label, {row_index: Fraction}), ...)
    target: dict    # {row_index: Fraction}
    mu: MultiPoly

    @property
    def shape(self):
        return (len(self.rows), len(self.columns))


def build_jet_system(param: Parametrization, mu: MultiPoly, D: int,
                     parameter_order: int | None = None) -> JetSystem:
    """Assemble the jet system for the datum ``mu dtaubar`` at ambient
    order ``D``.

    The target is the jet of the termwise antiholomorphic primitive of
    ``mu``; pure holomorphic directions are free columns.  Raises
    :class:`JetOrderError` when ``D`` (or an explicit parameter order)
    cannot express the target.
    """
    if mu.vars != TAU_VARS:
        raise ValueError("mu must be a polynomial in (tau, taubar)")
    _require_exact(mu, "mu")
    _require_exact(param.gamma1, "gamma1")
    _require_exact(param.gamma2, "gamma2")

    psi0 = _antiholomorphic_primitive(mu)
    target_order = psi0.degree()
    Dp = parameter_order if parameter_order is not None else D
    if Dp < target_order:
        raise JetOrderError(
            f"parameter order {Dp} cannot express the target (needs "
            f">= {target_order}); increase the order",
            required_order=target_order,
        )

    rows = tuple(sorted(
        (m, n) for m in range(Dp + 1) for n in range(Dp + 1 - m)
    ))
    row_set = set(rows)

    conj = {"tau": "taubar", "taubar": "tau"}
    g1, g2 = param.gamma1, param.gamma2
    g1b, g2b = g1.conjugated(conj), g2.conjugated(conj)

    def trunc_pows(p):
        """Truncated powers p^0 .. p^D."""
        out = [MultiPoly.const(TAU_VARS, 1)]
        for _ in range(D):
            out.append((out[-1] * p).truncated(Dp))
        return out

    p1, p1b = trunc_pows(g1), trunc_pows(g1b)
    p2, p2b = trunc_pows(g2), trunc_pows(g2b)

    columns = []
    seen = {}
    for a in range(D + 1):
        for b in range(D + 1 - a):
            for c in range(D + 1 - a - b):
                for d in range(D + 1 - a - b - c):
                    jet = (((p1[a] * p1b[b]).truncated(Dp)
                            * p2[c]).truncated(Dp) * p2b[d]).truncated(Dp)
                    if jet.is_zero():
                        continue
                    vec = {e: Fraction(co) for e, co in jet.terms()
                           if e in row_set}
                    if not vec:
                        continue
                    key = tuple(sorted(vec.items()))
                    if key in seen:
                        continue
                    seen[key] = True
                    columns.append((("mono", a, b, c, d), vec))
    for m in range(Dp + 1):
        columns.append((("hol", m), {(m, 0): Fraction(1)}))

    target = {e: Fraction(co) for e, co in psi0.terms() if e in row_set}
    return JetSystem(param=param, ambient_order=D, parameter_order=Dp,
                     rows=rows, columns=tuple(columns), target=target, mu=mu)


@dataclass(frozen=True)
class JetVerdict:
    """Outcome of the exact feasibility computation.

    ``kind`` is ``"feasible"`` or ``"infeasible"``.  Infeasibility proves
    that no smooth ambient function solves the equation (the certificate
    is a rational functional annihilating every pullback jet but not the
    target).  Feasibility at finite order is inconclusive for smooth
    solvability; ``smooth_solvability`` records this asymmetry.
    """

    kind: str
    witness: dict | None = None
    certificate: dict | None = None

    @property
    def smooth_solvability(self) -> str:
        return "impossible" if self.kind == "infeasible" else "inconclusive"

    def __bool__(self):
        return self.kind == "feasible"


def feasibility(sys: JetSystem) -> JetVerdict:
    """Exact rank decision: is the target in the span of the columns?

    Gaussian elimination over the rationals on the augmented system; the
    row-operation record provides the certificate on infeasibility.
    """
    rows, cols = list(sys.rows), list(sys.columns)
    R, C = len(rows), len(cols)
    row_index = {e: i for i, e in enumerate(rows)}

    # nice-witness fast path: a single column matching the target exactly
    for label, vec in cols:
        if set(vec) == set(sys.target) and sys.target:
            items = iter(sys.target.items())
            e0, t0 = next(items)
            if vec[e0] == 0:
                continue
            ratio = t0 / vec[e0]
            if all(vec[e] * ratio == t for e, t in sys.target.items()):
                return JetVerdict(kind="feasible", witness={label: ratio})

    # dense augmented matrix [A | b | I] over Fraction
    zero = Fraction(0)
    M = [[zero] * (C + 1 + R) for _ in range(R)]
    for j, (_, vec) in enumerate(cols):
        for e, v in vec.items():
            M[row_index[e]][j] = v
    for e, v in sys.target.items():
        M[row_index[e]][C] = v
    for i in range(R):
        M[i][C + 1 + i] = Fraction(1)

    pivot_cols = []
    rank = 0
    for j in range(C):
        pivot = None
        for i in range(rank, R):
            if M[i][j] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        pv = M[rank][j]
        M[rank] = [x / pv for x in M[rank]]
        for i in range(R):
            if i != rank and M[i][j] != 0:
                f = M[i][j]
                M[i] = [x - f * y for x, y in zip(M[i], M[rank])]
        pivot_cols.append(j)
        rank += 1

    for i in range(rank, R):
        if M[i][C] != 0:
            certificate = {
                rows[r]: M[i][C + 1 + r]
                for r in range(R) if M[i][C + 1 + r] != 0
            }
            return JetVerdict(kind="infeasible", certificate=certificate)

    witness = {}
    for i, j in enumerate(pivot_cols):
        if M[i][C] != 0:
            witness[cols[j][0]] = M[i][C]
    return JetVerdict(kind="feasible", witness=witness)


def certificate_applies(sys: JetSystem, certificate: dict) -> bool:
    """Exact check that the certificate annihilates every column."""
    for _, vec in sys.columns:
        total = sum(certificate.get(e, Fraction(0)) * v for e, v in vec.items())
        if total != 0:
            return False
    return True


def witness_reproduces(sys: JetSystem, witness: dict) -> bool:
    """Exact check that the witness combination equals the target jet."""
    acc: dict = {}
    col_map = dict(sys.columns)
    for label, coeff in witness.items():
        for e, v in col_map[label].items():
            acc[e] = acc.get(e, Fraction(0)) + coeff * v
    acc = {e: v for e, v in acc.items() if v != 0}
    return acc == {e: v for e, v in sys.target.items() if v != 0}
