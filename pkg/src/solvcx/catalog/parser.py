"""Structure-equation text <-> LieAlgebra.

Accepted syntax: ``(e^{13},-e^{23},0,0,0,0)``; coefficients may be integers,
``\\frac{p}{q}``, parenthesised expressions and parameter names, written with
Greek letters (α, \\alpha) or in ASCII (alpha), e.g.
``-\\frac{\\alpha+\\beta}{2}e^{35}`` or ``-(a+1)e^{25}``.
"""

import re
from fractions import Fraction

from ..liealg import LieAlgebra
from ..polys import ExpressionError, MultiPoly, evaluate, var

__all__ = ["StructureSyntaxError", "parse_structure_equations", "parse_terms",
           "coefficient_to_python", "format_structure_equations", "GREEK"]

GREEK = {"α": "alpha", "β": "beta", "γ": "gamma", "δ": "delta", "ε": "eps",
         "λ": "lam", "μ": "mu", "ν": "nu"}


class StructureSyntaxError(ValueError):
    pass


_FRAC_SHORT = re.compile(r"\\[dt]?frac\s*(\d)\s*(\d)")
_IMPLICIT = re.compile(r"(\d|\))\s*(?=[A-Za-z_(])")


def _replace_frac(text):
    # \frac{A}{B} -> ((A)/(B)), innermost first via a brace-matching scan
    text = _FRAC_SHORT.sub(r"((\1)/(\2))", text)
    key = re.compile(r"\\[dt]?frac\s*\{")
    while True:
        m = key.search(text)
        if not m:
            return text
        i = m.end()
        depth, j = 1, i
        while depth:
            if j >= len(text):
                raise StructureSyntaxError("unbalanced braces in \\frac")
            depth += {"{": 1, "}": -1}.get(text[j], 0)
            j += 1
        num = text[i:j - 1]
        if j >= len(text) or text[j] != "{":
            raise StructureSyntaxError("\\frac needs two arguments")
        k, depth = j + 1, 1
        while depth:
            if k >= len(text):
                raise StructureSyntaxError("unbalanced braces in \\frac")
            depth += {"{": 1, "}": -1}.get(text[k], 0)
            k += 1
        den = text[j + 1:k - 1]
        text = text[:m.start()] + f"(({num})/({den}))" + text[k:]


def coefficient_to_python(text):
    """Translate a LaTeX-ish coefficient to a Python arithmetic expression."""
    t = text
    for g, a in GREEK.items():
        t = t.replace(g, f" {a} ")
    t = re.sub(r"\\(alpha|beta|gamma|delta|lambda|mu|nu)\b", lambda m: f" {m.group(1)} ", t)
    t = t.replace("\\lambda", "lam").replace("\\left", "").replace("\\right", "")
    t = t.replace("\\,", " ").replace("\\!", "").replace("−", "-")
    t = _replace_frac(t)
    t = t.replace("{", "(").replace("}", ")")
    t = _IMPLICIT.sub(r"\1*", t)
    # juxtaposed identifiers such as "alpha beta" -> "alpha*beta"
    t = re.sub(r"([A-Za-z_]\w*)\s+(?=[A-Za-z_(])", r"\1*", t.strip())
    t = re.sub(r"\)\s*(?=[A-Za-z_(])", ")*", t)
    return t.strip()


def _split_top(text, seps):
    """Split at top-level characters in seps, keeping the separator."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch in "({[":
            depth += 1
        elif ch in ")}]":
            depth -= 1
        if depth == 0 and ch in seps:
            parts.append(cur)
            cur = ch if ch != "," else ""
            continue
        cur += ch
    parts.append(cur)
    return parts


_TERM = re.compile(r"^(.*?)e\^\{?(\d)(\d)\}?\s*$", re.S)
_TERM1 = re.compile(r"^(.*?)e\^\{?(\d)\}?\s*$", re.S)


def parse_terms(slot, single=False):
    """Split a signed sum of terms into [(coefficient python-expr, indices)]."""
    slot = slot.strip().replace("−", "-")
    if slot in ("", "0"):
        return []
    out = []
    for raw in _split_top(slot, "+-"):
        raw = raw.strip()
        if not raw or raw in "+-":
            if raw in "+-" and raw:
                raise StructureSyntaxError(f"dangling sign in {slot!r}")
            continue
        m = (_TERM1 if single else _TERM).match(raw)
        if not m:
            raise StructureSyntaxError(f"malformed term {raw!r}")
        coef = m.group(1).strip()
        idx = tuple(int(g) for g in m.groups()[1:])
        sign = ""
        if coef and coef[0] in "+-":
            sign, coef = coef[0], coef[1:].strip()
        coef = coef.rstrip("*").strip()
        expr = coefficient_to_python(coef) if coef else "1"
        out.append((f"{'-' if sign == '-' else ''}({expr})", idx))
    return out


def _eval_coef(expr, env):
    try:
        return evaluate(expr, env)
    except ExpressionError as exc:
        raise StructureSyntaxError(str(exc)) from None


def parse_structure_equations(src, params=(), values=None, name=""):
    """Parse a structure-equation list into a LieAlgebra.

    Parameters listed in ``params`` but absent from ``values`` stay symbolic
    (polynomial structure constants).
    """
    text = src.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise StructureSyntaxError("structure equations must be a parenthesised list")
    slots = _split_top(text[1:-1], ",")
    n = len(slots)
    values = dict(values or {})
    env = {}
    for p in params:
        if p not in values:
            env[p] = var(p)
        else:
            v = values[p]
            env[p] = v if isinstance(v, MultiPoly) else Fraction(v)
    unknown = set(values) - set(params)
    if unknown:
        raise StructureSyntaxError(f"undeclared parameters {sorted(unknown)}")
    rows = []
    for k, slot in enumerate(slots):
        row = {}
        for expr, (i, j) in parse_terms(slot):
            if not (1 <= i <= n and 1 <= j <= n):
                raise StructureSyntaxError(f"index out of range in e^{{{i}{j}}}")
            if i == j:
                raise StructureSyntaxError(f"e^{{{i}{j}}} has a repeated index")
            c = _eval_coef(expr, env)
            if isinstance(c, MultiPoly) and c.is_constant():
                c = c.constant()
            key = (i - 1, j - 1) if i < j else (j - 1, i - 1)
            c = c if i < j else -c
            row[key] = row.get(key, 0) + c
        rows.append(row)
    return LieAlgebra.from_differentials(rows, name=name, params=values)


def _fmt_coef(c):
    if isinstance(c, MultiPoly):
        if c.is_constant():
            c = c.constant()
        else:
            return "(" + str(c) + ")"
    c = Fraction(c)
    if c == 1:
        return ""
    if c == -1:
        return "-"
    if c.denominator == 1:
        return str(c.numerator)
    sign = "-" if c < 0 else ""
    return f"{sign}\\frac{{{abs(c.numerator)}}}{{{c.denominator}}}"


def format_structure_equations(L):
    """Inverse of parse_structure_equations (1-digit indices)."""
    slots = []
    for row in L.differentials():
        parts = []
        for (i, j), c in sorted(row.items()):
            if c == 0:
                continue
            s = _fmt_coef(c)
            if s.startswith("-") and not s.startswith("-("):
                term = s + f"e^{{{i + 1}{j + 1}}}"
            elif s.startswith("("):
                term = "+" + s + f"e^{{{i + 1}{j + 1}}}"
            else:
                term = "+" + s + f"e^{{{i + 1}{j + 1}}}"
            parts.append(term)
        slot = "".join(parts).lstrip("+") or "0"
        slots.append(slot)
    return "(" + ",".join(slots) + ")"
