"""Sparse multivariate polynomials over Q and a small safe expression evaluator.

Monomials are stored as sorted tuples of ``(variable, exponent)`` pairs, so a
polynomial in a1..a36 only pays for the variables it actually uses.
"""

import ast
import operator
import re
from fractions import Fraction

__all__ = ["MultiPoly", "var", "const", "evaluate", "parse_poly", "ExpressionError"]


_NAME_RE = re.compile(r"^([A-Za-z_]+?)(\d*)$")


def _var_key(name):
    m = _NAME_RE.match(name)
    if not m:
        return (name, -1)
    return (m.group(1), int(m.group(2)) if m.group(2) else -1)


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items(), key=lambda p: _var_key(p[0])))


class MultiPoly:
    """Polynomial with Fraction coefficients, immutable by convention."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        if terms:
            for mono, c in terms.items():
                c = Fraction(c)
                if c:
                    t[mono] = t.get(mono, 0) + c
                    if not t[mono]:
                        del t[mono]
        self.terms = t

    @classmethod
    def _raw(cls, terms):
        p = cls.__new__(cls)
        p.terms = terms
        return p

    # -- construction / coercion
    @staticmethod
    def coerce(x):
        if isinstance(x, MultiPoly):
            return x
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return MultiPoly._raw({(): Fraction(x)} if x else {})
        return NotImplemented

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or list(self.terms) == [()]

    def constant(self):
        return self.terms.get((), Fraction(0))

    def variables(self):
        out = set()
        for mono in self.terms:
            out.update(v for v, _ in mono)
        return sorted(out, key=_var_key)

    def degree(self):
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    # -- arithmetic
    def __add__(self, other):
        o = MultiPoly.coerce(other)
        if o is NotImplemented:
            return o
        t = dict(self.terms)
        for m, c in o.terms.items():
            s = t.get(m, 0) + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return MultiPoly._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({m: -c for m, c in self.terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = MultiPoly.coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = MultiPoly.coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return MultiPoly._raw({})
            return MultiPoly._raw({m: c * other for m, c in self.terms.items()})
        o = MultiPoly.coerce(other)
        if o is NotImplemented:
            return o
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mono_mul(m1, m2)
                s = t.get(m, 0) + c1 * c2
                if s:
                    t[m] = s
                else:
                    t.pop(m, None)
        return MultiPoly._raw(t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # only division by a nonzero constant stays polynomial
        o = MultiPoly.coerce(other)
        if o is NotImplemented:
            return o
        if not o.is_constant() or o.is_zero():
            raise ExpressionError("polynomial division by a non-constant or zero")
        c = o.constant()
        return MultiPoly._raw({m: v / c for m, v in self.terms.items()})

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ExpressionError("polynomial powers must be non-negative integers")
        out = MultiPoly.coerce(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = MultiPoly.coerce(other)
        if o is NotImplemented:
            return o
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- substitution / evaluation
    def subs(self, mapping):
        """Substitute variables by scalars or polynomials."""
        if not mapping:
            return self
        out = MultiPoly._raw({})
        for mono, c in self.terms.items():
            term = MultiPoly._raw({(): c})
            rest = []
            for v, e in mono:
                if v in mapping:
                    term = term * MultiPoly.coerce(mapping[v]) ** e
                else:
                    rest.append((v, e))
            if rest:
                term = term * MultiPoly._raw({tuple(rest): Fraction(1)})
            out = out + term
        return out

    def __call__(self, **values):
        """Evaluate with every variable bound; the result is a scalar."""
        total = 0
        for mono, c in self.terms.items():
            t = c
            for v, e in mono:
                if v not in values:
                    raise ExpressionError(f"unbound variable {v}")
                t = t * values[v] ** e
            total = total + t
        return total

    # -- printing
    def _sorted_terms(self):
        def key(item):
            mono = item[0]
            deg = sum(e for _, e in mono)
            return (-deg, [(_var_key(v), -e) for v, e in mono])
        return sorted(self.terms.items(), key=key)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self._sorted_terms():
            mono_s = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
            ac = abs(c)
            if mono_s and ac == 1:
                body = mono_s
            elif mono_s:
                body = f"{ac}*{mono_s}"
            else:
                body = str(ac)
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"MultiPoly({self})"


def var(name):
    return MultiPoly._raw({((name, 1),): Fraction(1)})


def const(c):
    return MultiPoly.coerce(Fraction(c))


# -- safe expression evaluation ------------------------------------------------

class ExpressionError(ValueError):
    pass


_BINOPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.Div: operator.truediv, ast.Pow: operator.pow,
}
_CMPOPS = {
    ast.Eq: operator.eq, ast.NotEq: operator.ne, ast.Lt: operator.lt,
    ast.LtE: operator.le, ast.Gt: operator.gt, ast.GtE: operator.ge,
}


def _eval(node, env, funcs):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env, funcs)
    if isinstance(node, ast.Constant):
        v = node.value
        if isinstance(v, bool):
            return v
        if isinstance(v, int):
            return Fraction(v)
        raise ExpressionError(f"literal {v!r} not allowed (exact numbers only)")
    if isinstance(node, ast.Name):
        if node.id in env:
            return env[node.id]
        raise ExpressionError(f"unknown name {node.id!r}")
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, env, funcs)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
        if isinstance(node.op, ast.Not):
            return not v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        left = _eval(node.left, env, funcs)
        right = _eval(node.right, env, funcs)
        if isinstance(node.op, ast.Pow):
            if not (isinstance(right, Fraction) and right.denominator == 1):
                raise ExpressionError("exponents must be integers")
            right = int(right)
        return _BINOPS[type(node.op)](left, right)
    if isinstance(node, ast.BoolOp):
        vals = (_eval(v, env, funcs) for v in node.values)
        return all(vals) if isinstance(node.op, ast.And) else any(vals)
    if isinstance(node, ast.Compare):
        left = _eval(node.left, env, funcs)
        for op, comp in zip(node.ops, node.comparators):
            right = _eval(comp, env, funcs)
            if type(op) in _CMPOPS:
                ok = _CMPOPS[type(op)](left, right)
            elif isinstance(op, ast.In):
                ok = left in right
            elif isinstance(op, ast.NotIn):
                ok = left not in right
            else:
                raise ExpressionError("unsupported comparison")
            if not ok:
                return False
            left = right
        return True
    if isinstance(node, (ast.Tuple, ast.Set, ast.List)):
        return tuple(_eval(e, env, funcs) for e in node.elts)
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        f = funcs.get(node.func.id)
        if f is None:
            raise ExpressionError(f"unknown function {node.func.id!r}")
        return f(*[_eval(a, env, funcs) for a in node.args])
    raise ExpressionError(f"unsupported syntax: {ast.dump(node)[:60]}")


def _implies(p, q):
    return (not p) or q


DEFAULT_FUNCS = {"abs": abs, "implies": _implies}


def evaluate(expr, env=None, funcs=None):
    """Evaluate an arithmetic/boolean expression exactly.

    Integer literals become Fractions, ``^`` means power, and only names in
    ``env`` and functions in ``funcs`` (default: abs, implies) are visible.
    """
    text = expr.replace("^", "**")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {expr!r}: {exc.msg}") from None
    f = dict(DEFAULT_FUNCS)
    if funcs:
        f.update(funcs)
    return _eval(tree, env or {}, f)


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_IMPLICIT_RE = re.compile(r"(\d|\))\s*(?=[A-Za-z_(])")


def parse_poly(text, names=None):
    """Parse a polynomial such as ``"3*a18*a33 + a36^2 + 1"``.

    Juxtaposition after a number or a closing bracket means multiplication
    (``2a3``, ``(a1+a2)a4``).  Every identifier becomes a variable unless
    ``names`` supplies a value for it.
    """
    text = _IMPLICIT_RE.sub(r"\1*", text)
    env = {}
    for ident in _IDENT_RE.findall(text):
        env[ident] = var(ident)
    if names:
        env.update(names)
    val = evaluate(text, env)
    return MultiPoly.coerce(val) if not isinstance(val, MultiPoly) else val
