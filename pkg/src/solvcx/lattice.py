"""Lattices in semidirect products R^k ⋉_phi N.

phi(t) = exp(t ad e0 |_n) is evaluated exactly from a block description
(rotations, scalings, a commuting nilpotent part) at t a multiple of pi/2.
pi itself is kept as a formal symbol: matrix entries live in the ring of
Laurent polynomials in pi over Q or Q(sqrt d).
"""

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exactmath import (QuadExt, det, identity, inverse, is_nilpotent_matrix,
                        is_zero_matrix, matrix, rref, smith_normal_form,
                        to_int_matrix, zeros)
from .liealg import LieAlgebra, ad, bracket, lower_central_series
from .polys import ExpressionError, MultiPoly, evaluate, parse_poly

__all__ = [
    "PiPoly", "PI", "Block", "OneParamSubgroup", "EvalPoint", "phi_eval",
    "LatticeCertificate", "CertificateReport", "yamada_certify", "bch_product",
    "ClassTooLargeError", "GroupPresentation", "abelianization",
    "SemidirectGroup", "parse_vector", "restricted_algebra",
]


class PiPoly:
    """Laurent polynomial in the formal symbol pi: {exponent: coefficient}."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        self.c = {k: v for k, v in (coeffs or {}).items() if v != 0}

    @staticmethod
    def coerce(x):
        if isinstance(x, PiPoly):
            return x
        if isinstance(x, (int, Fraction, QuadExt)) and not isinstance(x, bool):
            return PiPoly({0: x})
        return NotImplemented

    def __add__(self, other):
        o = PiPoly.coerce(other)
        if o is NotImplemented:
            return o
        out = dict(self.c)
        for k, v in o.c.items():
            out[k] = out.get(k, 0) + v
        return PiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return PiPoly({k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        o = PiPoly.coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = PiPoly.coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = PiPoly.coerce(other)
        if o is NotImplemented:
            return o
        out = {}
        for k1, v1 in self.c.items():
            for k2, v2 in o.c.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + v1 * v2
        return PiPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = PiPoly.coerce(other)
        if o is NotImplemented:
            return o
        if len(o.c) != 1:
            raise ZeroDivisionError("can only divide by a monomial in pi")
        (k, v), = o.c.items()
        return PiPoly({e - k: x / v for e, x in self.c.items()})

    def __rtruediv__(self, other):
        return PiPoly.coerce(other) / self

    def __pow__(self, n):
        out = PiPoly({0: Fraction(1)})
        base = self if n >= 0 else PiPoly({0: Fraction(1)}) / self
        for _ in range(abs(n)):
            out = out * base
        return out

    def __eq__(self, other):
        o = PiPoly.coerce(other)
        if o is NotImplemented:
            return o
        keys = set(self.c) | set(o.c)
        return all(self.c.get(k, 0) == o.c.get(k, 0) for k in keys)

    def __hash__(self):
        return hash(tuple(sorted(self.c.items(), key=lambda kv: kv[0])))

    def monomial(self):
        """(power, coefficient) if this is c*pi^k, else None."""
        if len(self.c) == 1:
            return next(iter(self.c.items()))
        return None

    def constant(self):
        if not self.c:
            return Fraction(0)
        if set(self.c) != {0}:
            raise ValueError(f"{self} still contains pi")
        return self.c[0]

    def __repr__(self):
        if not self.c:
            return "0"
        return " + ".join(f"({v})*pi^{k}" if k else f"({v})" for k, v in sorted(self.c.items()))


PI = PiPoly({1: Fraction(1)})


# -- one-parameter subgroups ---------------------------------------------------

@dataclass
class Block:
    """One diagonal block of the semisimple part.

    kind "zero": (0); "scalar": (s); "rotation": [[s, w], [-w, s]] where s is
    the scaling (a polynomial expression in the algebra parameters, "0" for
    none) and w the rational angular rate.  exp(t * block) is e^{st} R(wt)
    with R(x) = [[cos x, sin x], [-sin x, cos x]].
    """
    kind: str
    rate: Fraction = Fraction(0)
    scale: str = "0"

    @property
    def size(self):
        return 2 if self.kind == "rotation" else 1


class PhiValidationError(ValueError):
    pass


@dataclass
class OneParamSubgroup:
    """phi(t) = exp(t (S + N)) on the nilradical, in a block basis.

    ``basis`` lists the block-basis vectors in the coordinates of g; ``e0`` is
    the generator in g whose ad, restricted to n, must equal S + N.
    """
    e0: list
    basis: list
    blocks: list
    N: np.ndarray

    @property
    def n(self):
        return len(self.basis)

    def S_symbolic(self):
        S = zeros(self.n)
        i = 0
        for b in self.blocks:
            s = parse_poly(b.scale)
            s = s.constant() if s.is_constant() else s
            if b.kind == "zero":
                S[i, i] = Fraction(0)
            elif b.kind == "scalar":
                S[i, i] = s
            elif b.kind == "rotation":
                S[i, i] = s
                S[i + 1, i + 1] = s
                S[i, i + 1] = Fraction(b.rate)
                S[i + 1, i] = -Fraction(b.rate)
            else:
                raise PhiValidationError(f"unknown block kind {b.kind!r}")
            i += b.size
        if i != self.n:
            raise PhiValidationError("block sizes do not add up to dim n")
        return S

    def validate(self, L):
        """Check S + N = ad e0|_n (L may carry symbolic parameters), SN = NS,
        N nilpotent.  Returns a list of problems (empty when valid)."""
        problems = []
        P = np.array([list(v) for v in self.basis], dtype=object).T
        A = ad(L, self.e0)
        image = A.dot(P)
        try:
            D = solve_mixed(P, image)
        except ValueError as exc:
            return [f"ad e0 does not preserve the block basis span: {exc}"]
        S = self.S_symbolic()
        if not is_zero_matrix(D - (S + self.N)):
            problems.append("S + N != ad e0|_n")
        if not is_zero_matrix(S.dot(self.N) - self.N.dot(S)):
            problems.append("S and N do not commute")
        if not is_nilpotent_matrix(self.N):
            problems.append("N is not nilpotent")
        return problems


def solve_mixed(P, Y):
    """Solve P X = Y where P is a rational full-column-rank matrix and Y may
    hold polynomials or pi-entries; raises ValueError if Y leaves col(P)."""
    n, m = P.shape
    if n == m:
        return inverse(P).dot(Y)
    _, _, rows = rref(P.T)
    rows = list(rows)
    X = inverse(P[rows, :]).dot(Y[rows, :])
    if not is_zero_matrix(P.dot(X) - Y):
        raise ValueError("image leaves the subspace")
    return X


@dataclass
class EvalPoint:
    """t = k*pi (k with denominator 1 or 2); bindings map a scaling
    expression g to the value of exp(g*t)."""
    k: Fraction
    bindings: dict = field(default_factory=dict)

    @classmethod
    def parse(cls, t, bindings=None):
        k = evaluate(str(t), {"pi": Fraction(1)}) if not isinstance(t, Fraction) else t
        return cls(Fraction(k), dict(bindings or {}))

    @property
    def t(self):
        return PI * self.k


def _cos_sin(x):
    """cos and sin of x*pi for x with denominator <= 2."""
    x = Fraction(x)
    if (2 * x).denominator != 1:
        raise ValueError(f"angle {x}*pi is not a multiple of pi/2")
    q = int(2 * x) % 4
    return [(1, 0), (0, 1), (-1, 0), (0, -1)][q]


def _scale_value(scale, point):
    s = parse_poly(scale)
    if s.is_zero():
        return Fraction(1)
    for key, val in point.bindings.items():
        g = parse_poly(key)
        # find integer c with s = c * g
        ratios = set()
        ok = set(s.terms) == set(g.terms)
        if ok:
            for mono in s.terms:
                ratios.add(s.terms[mono] / g.terms[mono])
        if ok and len(ratios) == 1:
            c = ratios.pop()
            if c.denominator != 1:
                raise ValueError(f"scaling {scale} is a fractional multiple of {key}")
            return val ** int(c)
    raise ValueError(f"unbound scaling symbol {scale!r}")


def phi_eval(p, point):
    """exp(t S) exp(t N) with entries in PiPoly."""
    n = p.n
    E = zeros(n)
    i = 0
    for b in p.blocks:
        if b.kind == "zero":
            E[i, i] = Fraction(1)
        elif b.kind == "scalar":
            E[i, i] = _scale_value(b.scale, point)
        else:
            cs, sn = _cos_sin(Fraction(b.rate) * point.k)
            f = _scale_value(b.scale, point)
            E[i, i], E[i, i + 1] = f * cs, f * sn
            E[i + 1, i], E[i + 1, i + 1] = -f * sn, f * cs
        i += b.size
    # exp(tN) = sum (tN)^j / j!
    tN = np.array([[PI * point.k * x for x in row] for row in p.N], dtype=object)
    expN = identity(n)
    term = identity(n)
    for j in range(1, n + 1):
        term = term.dot(tN)
        if is_zero_matrix(term):
            break
        expN = expN + np.array([[x * Fraction(1, math.factorial(j)) for x in row]
                                for row in term], dtype=object)
    return np.array([[PiPoly.coerce(x) if not isinstance(x, PiPoly) else x for x in row]
                     for row in E.dot(expN)], dtype=object)


# -- vectors with pi / unit entries ----------------------------------------------

class _Vec:
    def __init__(self, entries):
        self.e = list(entries)

    def __add__(self, o):
        return _Vec(a + b for a, b in zip(self.e, o.e))

    def __sub__(self, o):
        return _Vec(a - b for a, b in zip(self.e, o.e))

    def __neg__(self):
        return _Vec(-a for a in self.e)

    def __mul__(self, s):
        if isinstance(s, _Vec):
            raise ExpressionError("cannot multiply two vectors")
        return _Vec(a * s for a in self.e)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return _Vec(a / s for a in self.e)


_IMPL = re.compile(r"(\d|\))\s*(?=[A-Za-z_(])")


def parse_vector(text, dim, unit=None):
    """Parse e.g. "2*pi*e1" or "u*e2 + 1/u*e4" into a list of PiPoly entries."""
    env = {"pi": PI}
    if unit is not None:
        env["u"] = PiPoly.coerce(unit)
    for i in range(dim):
        v = [PiPoly() for _ in range(dim)]
        v[i] = PiPoly.coerce(Fraction(1))
        env[f"e{i + 1}"] = _Vec(v)
    text = _IMPL.sub(r"\1*", text)
    val = evaluate(text, env)
    if not isinstance(val, _Vec):
        raise ExpressionError(f"{text!r} is not a vector")
    return [PiPoly.coerce(x) for x in val.e]


# -- certificates ----------------------------------------------------------------

@dataclass
class LatticeCertificate:
    name: str
    algebra: LieAlgebra              # may carry symbolic parameters
    generators: list                 # [(OneParamSubgroup, EvalPoint, expected int matrix or None)]
    basis: list                      # vectors of PiPoly in g-coordinates
    expected_det: int = 1


@dataclass
class CertificateReport:
    name: str
    passed: bool
    matrices: list
    problems: list

    def summary(self):
        return f"{self.name}: {'PASS' if self.passed else 'FAIL'}" + (
            "" if self.passed else " (" + "; ".join(self.problems) + ")")


def _factor_columns(B):
    """B = B0 * diag(pi^k_j); returns (B0 over the base field, [k_j])."""
    n, m = B.shape
    B0 = np.empty((n, m), dtype=object)
    ks = []
    for j in range(m):
        k = None
        for i in range(n):
            mono = B[i, j].monomial() if B[i, j].c else None
            if B[i, j].c and mono is None:
                raise ValueError(f"basis vector {j + 1} mixes powers of pi")
            if mono:
                if k is not None and mono[0] != k:
                    raise ValueError(f"basis vector {j + 1} mixes powers of pi")
                k = mono[0]
        ks.append(k or 0)
        for i in range(n):
            B0[i, j] = B[i, j].c.get(ks[-1], Fraction(0))
    return B0, ks


def _conj_by_basis(B0, ks, M):
    """diag(pi^-k) B0^-1 M B0 diag(pi^k) for M with PiPoly entries."""
    Binv = inverse(B0)
    n = len(ks)
    out = np.empty((n, n), dtype=object)
    mid = np.array([[PiPoly.coerce(x) for x in row] for row in Binv], dtype=object)
    mid = mid.dot(M).dot(np.array([[PiPoly.coerce(x) for x in row] for row in B0], dtype=object))
    for i in range(n):
        for j in range(n):
            out[i, j] = mid[i, j] * PiPoly({ks[j] - ks[i]: Fraction(1)})
    return out


def _scalar_value(p):
    """Collapse a pi-free PiPoly to a Fraction when rational, else return None."""
    try:
        x = p.constant()
    except ValueError:
        return None
    if isinstance(x, QuadExt):
        return x.a if x.b == 0 else None
    return Fraction(x)


def restricted_algebra(L, P):
    """Structure constants of the subalgebra spanned by P, in that basis;
    must be parameter free."""
    n = len(P)
    cols = np.array([list(v) for v in P], dtype=object).T
    c = np.empty((n, n, n), dtype=object)
    for a in range(n):
        for b in range(n):
            v = bracket(L, P[a], P[b])
            coords = solve_mixed(cols, v.reshape(-1, 1))[:, 0]
            for k in range(n):
                x = coords[k]
                if isinstance(x, MultiPoly):
                    if not x.is_constant():
                        raise ValueError("nilradical brackets depend on parameters")
                    x = x.constant()
                c[a, b, k] = Fraction(x)
    return LieAlgebra(c, name="n")


def yamada_certify(cert):
    """Check that B^-1 phi_j B is an integer matrix of determinant +-1 for
    every generator, and that n has rational structure constants in B."""
    problems = []
    mats = []
    first = cert.generators[0][0]
    dim = first.n
    P = [np.array(v, dtype=object) for v in first.basis]
    Pm = np.array([list(v) for v in P], dtype=object).T
    # basis of n in block coordinates
    Bg = np.array([[PiPoly.coerce(x) for x in v] for v in cert.basis], dtype=object).T
    try:
        B0g, ks = _factor_columns(Bg)
        B0 = solve_mixed(Pm, B0g)
    except ValueError as exc:
        return CertificateReport(cert.name, False, [], [str(exc)])
    for p, point, expected in cert.generators:
        problems.extend(f"phi data: {msg}" for msg in p.validate(cert.algebra))
        if [list(v) for v in p.basis] != [list(v) for v in first.basis]:
            problems.append("generators use different block bases")
            continue
        phi = phi_eval(p, point)
        M = _conj_by_basis(B0, ks, phi)
        vals = np.empty(M.shape, dtype=object)
        for idx, x in np.ndenumerate(M):
            v = _scalar_value(x)
            if v is None or v.denominator != 1:
                problems.append(f"entry {idx} = {x} is not an integer")
                v = None
            vals[idx] = v
        if any(v is None for v in vals.flat):
            mats.append(None)
            continue
        Mi = to_int_matrix(vals)
        d = det(vals)
        if abs(d) != 1:
            problems.append(f"determinant {d} is not +-1")
        elif cert.expected_det is not None and d != cert.expected_det:
            problems.append(f"determinant {d}, expected {cert.expected_det}")
        if expected is not None:
            E = to_int_matrix(matrix(expected))
            if E is None or E.shape != Mi.shape or not (E == Mi).all():
                problems.append(f"matrix {Mi.tolist()} differs from expected {expected}")
        mats.append(Mi)
    # rationality of the structure constants of n in B
    try:
        nL = restricted_algebra(cert.algebra, P)
        Bcols = [np.array([PiPoly.coerce(x) for x in B0[:, j]], dtype=object)
                 * PiPoly({ks[j]: Fraction(1)}) for j in range(dim)]
        Binv = inverse(B0)
        for a in range(dim):
            for b in range(a + 1, dim):
                v = bracket(nL, Bcols[a], Bcols[b])
                coords = np.array([PiPoly.coerce(x) for x in Binv.dot(v)], dtype=object)
                for k in range(dim):
                    x = coords[k] * PiPoly({-ks[k]: Fraction(1)})
                    if _scalar_value(x) is None:
                        problems.append(f"[X{a + 1},X{b + 1}] has irrational coordinate {x}")
    except ValueError as exc:
        problems.append(str(exc))
    return CertificateReport(cert.name, not problems, mats, problems)


# -- BCH and group presentations -----------------------------------------------------

class ClassTooLargeError(ValueError):
    pass


def nilpotency_class(L):
    series = lower_central_series(L)
    if series[-1].dim != 0:
        raise ClassTooLargeError("algebra is not nilpotent")
    return len(series) - 1


def bch_product(L, x, y, check=True):
    """x.y = x + y + [x,y]/2 + ([x,[x,y]] + [y,[y,x]])/12 (class <= 3)."""
    if check and nilpotency_class(L) > 3:
        raise ClassTooLargeError("BCH truncation needs nilpotency class <= 3")
    x = np.array(list(x), dtype=object)
    y = np.array(list(y), dtype=object)
    xy = bracket(L, x, y)
    half = Fraction(1, 2)
    twelfth = Fraction(1, 12)
    return (x + y + xy * half
            + (bracket(L, x, xy) + bracket(L, y, -xy)) * twelfth)


class SemidirectGroup:
    """Z ⋉ N with N = (n, BCH) and the Z factor acting by an automorphism A.

    Elements are pairs (k, v); (a, v)(b, w) = (a + b, v . A^a w).
    """

    def __init__(self, L, A):
        self.L = L
        self.A = np.array(A, dtype=object)
        self.Ainv = inverse(self.A)
        if nilpotency_class(L) > 3:
            raise ClassTooLargeError("BCH truncation needs nilpotency class <= 3")

    def _power(self, k):
        M = identity(self.L.dim)
        base = self.A if k >= 0 else self.Ainv
        for _ in range(abs(k)):
            M = M.dot(base)
        return M

    def mul(self, g, h):
        (a, v), (b, w) = g, h
        return (a + b, bch_product(self.L, v, self._power(a).dot(w), check=False))

    def inv(self, g):
        a, v = g
        return (-a, self._power(-a).dot(-np.array(v, dtype=object)))

    def identity(self):
        return (0, np.array([Fraction(0)] * self.L.dim, dtype=object))

    def pow(self, g, k):
        out = self.identity()
        base = g if k >= 0 else self.inv(g)
        for _ in range(abs(k)):
            out = self.mul(out, base)
        return out

    def equal(self, g, h):
        return g[0] == h[0] and all(a == b for a, b in zip(g[1], h[1]))


_TOKEN = re.compile(r"([A-Za-z]\w*)(?:\^(?:\{([^}]*)\}|(-?\d+)))?")


class GroupPresentation:
    """Generators and relations "lhs = rhs" over words like "t3^{t4}" or "t2^3 t3".

    x^{y} denotes y^-1 x y; x^{-2} and x^3 are powers.
    """

    def __init__(self, generators, relations):
        self.generators = list(generators)
        self.relations = []
        for rel in relations:
            if "=" in rel:
                lhs, rhs = rel.split("=", 1)
            else:
                lhs, rhs = rel, ""
            self.relations.append((self.parse_word(lhs), self.parse_word(rhs)))

    def parse_word(self, text):
        """A word as a list of (generator, exponent)."""
        word = []
        pos = 0
        text = text.strip()
        for m in _TOKEN.finditer(text):
            if text[pos:m.start()].strip():
                raise ValueError(f"cannot parse word {text!r}")
            pos = m.end()
            g, sup, power = m.group(1), m.group(2), m.group(3)
            if g not in self.generators:
                raise ValueError(f"undeclared generator {g!r}")
            if sup is not None:
                sup = sup.strip()
                if sup.lstrip("-").isdigit():
                    word.append((g, int(sup)))
                else:
                    conj = self.parse_word(sup)
                    word.extend([(h, -e) for h, e in reversed(conj)])
                    word.append((g, 1))
                    word.extend(conj)
            else:
                word.append((g, int(power) if power else 1))
        if text[pos:].strip():
            raise ValueError(f"cannot parse word {text!r}")
        return word

    def relators(self):
        """Each relation as a single word lhs * rhs^-1."""
        return [lhs + [(g, -e) for g, e in reversed(rhs)] for lhs, rhs in self.relations]

    def relation_matrix(self):
        idx = {g: i for i, g in enumerate(self.generators)}
        rows = []
        for w in self.relators():
            row = [0] * len(self.generators)
            for g, e in w:
                row[idx[g]] += e
            rows.append(row)
        return rows

    def evaluate_word(self, group, images, word):
        out = group.identity()
        for g, e in word:
            out = group.mul(out, group.pow(images[g], e))
        return out

    def check_relations(self, group, images):
        """List of (relation index, holds) under the given generator images."""
        return [(i, group.equal(self.evaluate_word(group, images, lhs),
                                self.evaluate_word(group, images, rhs)))
                for i, (lhs, rhs) in enumerate(self.relations)]


def abelianization(p):
    """Invariant factors of the abelianized group.

    Returns (factors, torsion, free_rank): factors has one entry per generator
    (0 for a free summand), torsion lists the factors > 1.
    """
    rows = p.relation_matrix()
    ngen = len(p.generators)
    if not rows:
        return [0] * ngen, [], ngen
    _, D, _ = smith_normal_form(matrix(rows))
    diag = [int(D[i, i]) for i in range(min(D.shape))]
    diag += [0] * (ngen - len(diag))
    factors = sorted(diag[:ngen], key=lambda x: (x == 0, x))
    torsion = [f for f in factors if f > 1]
    return factors, torsion, factors.count(0)
