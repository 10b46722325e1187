"""Sparse multivariate polynomials with exact or floating coefficients.

Every piece of algebra in the package runs through :class:`MultiPoly`:
curve parametrizations, pullbacks of ambient forms, divided-difference
decompositions, derivative oracles, and the rational jet systems.
Coefficients may be ``int``, ``fractions.Fraction``, ``float`` or
``complex``.  Ring operations preserve exact coefficient types; coercion
to complex happens only when a polynomial is evaluated on numeric data.

Variables are named strings.  Antiholomorphic variables are ordinary
variables from the polynomial's point of view; the pairing between a
variable and its conjugate is supplied to :meth:`MultiPoly.conjugated`
and to the expression parser.
"""

from __future__ import annotations

import ast
from fractions import Fraction

import numpy as np

# Canonical variable tuples used across the package.
TAU_VARS = ("tau", "taubar")
AMBIENT_VARS = ("z1", "z1b", "z2", "z2b")
HEFER_VARS = ("zeta1", "zeta2", "z1", "z2")

_EXACT_TYPES = (int, Fraction)


def conj_scalar(c):
    """Complex conjugate preserving exact real types."""
    if isinstance(c, _EXACT_TYPES) or isinstance(c, float):
        return c
    return complex(c).conjugate()


def _is_zero(c):
    return c == 0


class MultiPoly:
    """Sparse polynomial over named variables.

    Stored as a dict mapping exponent tuples to coefficients; zero
    coefficients are dropped eagerly so equality is exact coefficient
    comparison.
    """

    __slots__ = ("vars", "coeffs")

    def __init__(self, variables, coeffs=None):
        self.vars = tuple(variables)
        nvars = len(self.vars)
        cleaned = {}
        if coeffs:
            for exps, c in coeffs.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != nvars:
                    raise ValueError(f"exponent tuple {exps} does not match variables {self.vars}")
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                if exps in cleaned:
                    c = cleaned[exps] + c
                if _is_zero(c):
                    cleaned.pop(exps, None)
                else:
                    cleaned[exps] = c
        self.coeffs = cleaned

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, variables):
        return cls(variables, {})

    @classmethod
    def const(cls, variables, c):
        return cls(variables, {tuple(0 for _ in variables): c})

    @classmethod
    def var(cls, variables, name, power=1, coeff=1):
        variables = tuple(variables)
        exps = [0] * len(variables)
        exps[variables.index(name)] = power
        return cls(variables, {tuple(exps): coeff})

    @classmethod
    def monomial(cls, variables, exps, coeff=1):
        return cls(variables, {tuple(exps): coeff})

    # -- ring operations ----------------------------------------------
    def _check(self, other):
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(self.vars, other)
        self._check(other)
        out = dict(self.coeffs)
        for exps, c in other.coeffs.items():
            s = out.get(exps, 0) + c
            if _is_zero(s):
                out.pop(exps, None)
            else:
                out[exps] = s
        return MultiPoly(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(self.vars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if _is_zero(other):
                return MultiPoly.zero(self.vars)
            return MultiPoly(self.vars, {e: c * other for e, c in self.coeffs.items()})
        self._check(other)
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(exps, 0) + c1 * c2
                if _is_zero(s):
                    out.pop(exps, None)
                else:
                    out[exps] = s
        return MultiPoly(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0 or int(n) != n:
            raise ValueError("only nonnegative integer powers")
        result = MultiPoly.const(self.vars, 1)
        base = self
        n = int(n)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return self.coeffs == MultiPoly.const(self.vars, other).coeffs
        return self.vars == other.vars and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.vars, frozenset(self.coeffs.items())))

    # -- queries --------------------------------------------------------
    def is_zero(self):
        return not self.coeffs

    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        if not self.coeffs:
            return -1
        return max(sum(e) for e in self.coeffs)

    def degree_in(self, name):
        if not self.coeffs:
            return -1
        i = self.vars.index(name)
        return max(e[i] for e in self.coeffs)

    def coeff(self, exps):
        return self.coeffs.get(tuple(exps), 0)

    def terms(self):
        """Deterministically ordered (exponents, coefficient) pairs."""
        return sorted(self.coeffs.items(), key=lambda kv: kv[0])

    # -- calculus -------------------------------------------------------
    def partial(self, name):
        i = self.vars.index(name)
        out = {}
        for exps, c in self.coeffs.items():
            if exps[i] == 0:
                continue
            e = list(exps)
            k = e[i]
            e[i] = k - 1
            out[tuple(e)] = out.get(tuple(e), 0) + c * k
        return MultiPoly(self.vars, out)

    def conjugated(self, pairs):
        """Formal conjugate: swap paired variables, conjugate coefficients.

        ``pairs`` maps each variable to its conjugate partner (an
        involution; self-paired names are allowed for real variables).
        """
        perm = []
        for name in self.vars:
            partner = pairs.get(name, name)
            perm.append(self.vars.index(partner))
        out = {}
        for exps, c in self.coeffs.items():
            new = tuple(exps[perm[i]] for i in range(len(self.vars)))
            out[new] = conj_scalar(c)
        return MultiPoly(self.vars, out)

    def truncated(self, total_degree):
        return MultiPoly(
            self.vars,
            {e: c for e, c in self.coeffs.items() if sum(e) <= total_degree},
        )

    # -- substitution / evaluation ---------------------------------------
    def subs(self, mapping):
        """Substitute polynomials for variables.

        ``mapping`` maps every variable name of ``self`` to a MultiPoly
        (all over one common variable tuple).  Exact coefficients stay
        exact.
        """
        targets = None
        for name in self.vars:
            if name not in mapping:
                raise ValueError(f"no substitution given for {name}")
            if targets is None:
                targets = mapping[name].vars
            elif mapping[name].vars != targets:
                raise ValueError("substitution images must share variables")
        result = MultiPoly.zero(targets)
        pow_cache = {}

        def powed(name, k):
            key = (name, k)
            if key not in pow_cache:
                pow_cache[key] = mapping[name] ** k
            return pow_cache[key]

        for exps, c in self.coeffs.items():
            term = MultiPoly.const(targets, c)
            for name, k in zip(self.vars, exps):
                if k:
                    term = term * powed(name, k)
            result = result + term
        return result

    def eval(self, values):
        """Evaluate on scalars or numpy arrays.

        ``values`` maps variable names to scalars/arrays.  Returns a
        complex scalar or array.
        """
        arrays = [np.asarray(values[name], dtype=complex) for name in self.vars]
        shape = np.broadcast_shapes(*(a.shape for a in arrays)) if arrays else ()
        out = np.zeros(shape, dtype=complex)
        pow_cache = {}

        def powed(i, k):
            key = (i, k)
            if key not in pow_cache:
                pow_cache[key] = arrays[i] ** k
            return pow_cache[key]

        for exps, c in self.terms():
            term = complex(c) * np.ones(shape, dtype=complex)
            for i, k in enumerate(exps):
                if k:
                    term = term * powed(i, k)
            out += term
        if out.shape == ():
            return complex(out)
        return out

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for exps, c in self.terms():
            mono = "*".join(
                f"{v}^{e}" if e > 1 else v
                for v, e in zip(self.vars, exps)
                if e
            )
            bits.append(f"({c})*{mono}" if mono else f"({c})")
        return " + ".join(bits)


# -- one-variable helpers (parameter-disc polynomials) --------------------

def tau_poly(coeffs):
    """Polynomial in tau from {exponent: coeff} or a coefficient list."""
    if isinstance(coeffs, dict):
        return MultiPoly(TAU_VARS, {(e, 0): c for e, c in coeffs.items()})
    return MultiPoly(TAU_VARS, {(e, 0): c for e, c in enumerate(coeffs)})


def taubar_poly(coeffs):
    if isinstance(coeffs, dict):
        return MultiPoly(TAU_VARS, {(0, e): c for e, c in coeffs.items()})
    return MultiPoly(TAU_VARS, {(0, e): c for e, c in enumerate(coeffs)})


def tau_monomial(a, b, coeff=1):
    return MultiPoly(TAU_VARS, {(a, b): coeff})


def eval_tau(p, tau):
    tau = np.asarray(tau, dtype=complex)
    return p.eval({"tau": tau, "taubar": np.conj(tau)})


# -- expression parsing ----------------------------------------------------

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Pow, ast.Div)


def parse_poly(text, variables, names=None, conj_names=None):
    """Parse a polynomial expression string.

    Accepts ``+ - * / ** ( )`` (``^`` is rewritten to ``**``), integer,
    float and imaginary literals, variable names, and ``conj(...)``.
    Division is only allowed by constants and is exact on integers.

    Parameters
    ----------
    text : str
        Expression, e.g. ``"3*(conj(t)^9+conj(t)^10)"``.
    variables : tuple of str
        Variable tuple of the resulting MultiPoly.
    names : dict, optional
        Maps source-level names to variables, e.g. ``{"t": "tau"}``.
    conj_names : dict, optional
        Conjugation pairs among ``variables``, e.g. ``{"tau": "taubar",
        "taubar": "tau"}``.  Required to parse ``conj``.
    """
    names = dict(names or {})
    conj_names = dict(conj_names or {})
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant):
            c = node.value
            if isinstance(c, (int, float, complex)):
                return MultiPoly.const(variables, c)
            raise ValueError(f"bad literal {c!r}")
        if isinstance(node, ast.Name):
            target = names.get(node.id, node.id)
            if target not in variables:
                raise ValueError(f"unknown variable {node.id!r}")
            return MultiPoly.var(variables, target)
        if isinstance(node, ast.UnaryOp):
            inner = build(node.operand)
            if isinstance(node.op, ast.USub):
                return -inner
            if isinstance(node.op, ast.UAdd):
                return inner
            raise ValueError("unsupported unary operator")
        if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
            left = build(node.left)
            if isinstance(node.op, ast.Pow):
                if not isinstance(node.right, ast.Constant) or not isinstance(node.right.value, int):
                    raise ValueError("exponent must be an integer literal")
                return left ** node.right.value
            right = build(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            # division by a constant only
            if len(right.coeffs) != 1 or right.degree() != 0:
                raise ValueError("division only by constants")
            c = right.coeff(tuple(0 for _ in variables))
            if isinstance(c, int):
                inv = Fraction(1, c)
            elif isinstance(c, Fraction):
                inv = 1 / c
            else:
                inv = 1.0 / c
            return left * inv
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "conj":
            if len(node.args) != 1:
                raise ValueError("conj takes one argument")
            if not conj_names:
                raise ValueError("conj not available for these variables")
            return build(node.args[0]).conjugated(conj_names)
        raise ValueError(f"unsupported syntax: {ast.dump(node)}")

    return build(tree)


def parse_tau_poly(text):
    """Parse an expression in ``t``/``tau`` and ``conj(t)`` on the disc."""
    return parse_poly(
        text,
        TAU_VARS,
        names={"t": "tau", "tau": "tau"},
        conj_names={"tau": "taubar", "taubar": "tau"},
    )


def parse_ambient_poly(text):
    """Parse an ambient polynomial in ``z``, ``w`` and their conjugates."""
    return parse_poly(
        text,
        AMBIENT_VARS,
        names={"z": "z1", "w": "z2", "z1": "z1", "z2": "z2"},
        conj_names={"z1": "z1b", "z1b": "z1", "z2": "z2b", "z2b": "z2"},
    )
