"""Closed-form expression handling with certified sign evaluation.

Model documents carry component expressions as strings over the cover
coordinates (x, y, z), rational literals, pi and sin/cos.  They are parsed
with a whitelist into sympy, differentiated symbolically, evaluated
numerically through lambdify, and evaluated *rigorously* through interval
arithmetic (mpmath.iv) with rational endpoints when a sign has to be
certified, e.g. for Jacobian determinants at exact fixed points.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
import sympy

from .errors import InputError

_VARS = sympy.symbols("x y z")
_ALLOWED_FUNCS = (sympy.sin, sympy.cos)
_LOCALS = {"x": _VARS[0], "y": _VARS[1], "z": _VARS[2],
           "sin": sympy.sin, "cos": sympy.cos, "pi": sympy.pi,
           "Rational": sympy.Rational}


def variables(dim: int):
    return _VARS[:dim]


def parse_expression(text: str, dim: int):
    """Parse one component expression; only the declared grammar is allowed."""
    try:
        expr = sympy.parse_expr(str(text), local_dict=_LOCALS, evaluate=True)
        expr = sympy.nsimplify(expr, rational=True)
    except (sympy.SympifyError, SyntaxError, TypeError, ValueError) as e:
        raise InputError(f"cannot parse expression {text!r}: {e}")
    allowed_symbols = set(_VARS[:dim]) | {sympy.pi}
    for atom in expr.atoms(sympy.Symbol):
        if atom not in allowed_symbols:
            raise InputError(f"expression {text!r} uses unknown symbol {atom}")
    for func in expr.atoms(sympy.Function):
        if not isinstance(func, _ALLOWED_FUNCS):
            raise InputError(f"expression {text!r} uses unsupported function "
                             f"{func.func}")
    return expr


def jacobian(components, dim: int):
    vs = variables(dim)
    return [[sympy.diff(c, v) for v in vs] for c in components]


def lambdify_vector(components, dim: int):
    import numpy as np
    vs = variables(dim)
    funcs = [sympy.lambdify(vs, c, modules="numpy") for c in components]

    def f(points):
        cols = [points[:, i] for i in range(dim)]
        return np.stack([np.broadcast_to(fn(*cols), points.shape[0])
                         for fn in funcs], axis=1).astype(float)

    return f


def lambdify_matrix(matrix, dim: int):
    import numpy as np
    vs = variables(dim)
    rows = [[sympy.lambdify(vs, e, modules="numpy") for e in row] for row in matrix]

    def jac(point):
        return np.array([[float(fn(*point)) for fn in row] for row in rows])

    return jac


def _to_interval(expr, subs):
    iv = mpmath.iv
    if expr is sympy.pi:
        return iv.pi
    if isinstance(expr, sympy.Integer):
        return iv.mpf(int(expr))
    if isinstance(expr, sympy.Rational):
        return iv.mpf(int(expr.p)) / iv.mpf(int(expr.q))
    if isinstance(expr, sympy.Symbol):
        frac = subs[expr]
        return iv.mpf(frac.numerator) / iv.mpf(frac.denominator)
    if isinstance(expr, sympy.Add):
        total = iv.mpf(0)
        for arg in expr.args:
            total += _to_interval(arg, subs)
        return total
    if isinstance(expr, sympy.Mul):
        total = iv.mpf(1)
        for arg in expr.args:
            total *= _to_interval(arg, subs)
        return total
    if isinstance(expr, sympy.Pow):
        base, exp = expr.args
        if not (isinstance(exp, sympy.Integer)):
            raise InputError(f"only integer powers are certified: {expr}")
        b = _to_interval(base, subs)
        e = int(exp)
        if e >= 0:
            out = iv.mpf(1)
            for _ in range(e):
                out *= b
            return out
        out = iv.mpf(1)
        for _ in range(-e):
            out *= b
        return iv.mpf(1) / out
    if isinstance(expr, sympy.sin):
        return iv.sin(_to_interval(expr.args[0], subs))
    if isinstance(expr, sympy.cos):
        return iv.cos(_to_interval(expr.args[0], subs))
    raise InputError(f"cannot certify expression node {expr!r}")


def certified_sign(expr, point: dict) -> int:
    """Sign of an expression at an exact rational point: -1, 0 or +1.

    Tries symbolic exact-zero detection first, then interval arithmetic at
    increasing precision.  Raises when the sign stays ambiguous, which only
    happens for values extremely close to (but not provably at) zero.
    """
    subs = {v: Fraction(val) for v, val in point.items()}
    exact = sympy.simplify(expr.subs({v: sympy.Rational(f.numerator, f.denominator)
                                      for v, f in subs.items()}))
    if exact == 0:
        return 0
    for prec in (60, 120, 240):
        with mpmath.workprec(prec):
            try:
                interval = _to_interval(sympy.expand_trig(sympy.expand(expr)), subs)
            except InputError:
                raise
            if interval.a > 0:
                return 1
            if interval.b < 0:
                return -1
    raise InputError(f"sign of {expr} at {point} is ambiguous at 240 bits; "
                     "shrink the isolation radius or simplify the model")


def is_exact_zero_vector(components, point_values) -> bool:
    """True when every component vanishes exactly at a rational point."""
    subs = {}
    for v, val in point_values.items():
        f = Fraction(val)
        subs[v] = sympy.Rational(f.numerator, f.denominator)
    for c in components:
        val = sympy.simplify(c.subs(subs))
        if val != 0:
            return False
    return True


def snap_to_rational(value: float, max_denominator: int = 64,
                     tolerance: float = 1e-7):
    """Nearest small-denominator rational within tolerance, else None."""
    frac = Fraction(value).limit_denominator(max_denominator)
    if abs(float(frac) - value) <= tolerance:
        return frac
    return None
