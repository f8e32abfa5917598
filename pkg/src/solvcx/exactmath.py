"""Exact scalars and matrices.

Rationals are :class:`fractions.Fraction`.  Quadratic fields Q(sqrt d) and
Gaussian extensions K(i) are small value classes.  Matrices are numpy object
arrays whose entries are any of these scalars (or anything supporting the ring
operations, e.g. polynomials).
"""

from fractions import Fraction
from numbers import Rational as _RationalABC

import numpy as np

Rational = Fraction

__all__ = [
    "Rational", "Q", "FieldMismatchError", "QuadField", "QuadExt", "GaussExt",
    "quad_unit", "matrix", "identity", "zeros", "block_diag", "is_zero_matrix",
    "rref", "rank", "nullspace", "solve", "inverse", "det", "smith_normal_form",
    "is_nilpotent_matrix", "to_int_matrix",
]


class FieldMismatchError(ValueError):
    pass


def Q(x):
    """Coerce an int, str or Fraction to a Fraction.  Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot make an exact rational from {type(x).__name__}")


def _squarefree(n):
    # n = s^2 * d with d square-free (sign kept in d)
    sign = -1 if n < 0 else 1
    n = abs(n)
    s, d, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            d *= p
        p += 1
    return s, sign * d * n


class QuadField:
    """Descriptor for Q(sqrt d); d is reduced to its square-free part."""

    _cache = {}

    def __new__(cls, n):
        if isinstance(n, QuadField):
            return n
        n = int(n)
        _, d = _squarefree(n)
        if d == 1 or d == 0:
            raise ValueError(f"Q(sqrt {n}) is not a proper quadratic field")
        if d not in cls._cache:
            obj = super().__new__(cls)
            obj.d = d
            cls._cache[d] = obj
        return cls._cache[d]

    def __repr__(self):
        return f"QuadField({self.d})"

    def sqrt(self, n):
        """sqrt(n) as an element of this field, for n = s^2 d."""
        s, d = _squarefree(int(n))
        if d == 1:
            return QuadExt(s, 0, self)
        if d != self.d:
            raise FieldMismatchError(f"sqrt({n}) does not lie in Q(sqrt {self.d})")
        return QuadExt(0, s, self)

    def __reduce__(self):
        return (QuadField, (self.d,))


class QuadExt:
    """a + b*sqrt(d) with a, b rational."""

    __slots__ = ("a", "b", "field")

    def __init__(self, a, b=0, field=None):
        if field is None:
            raise ValueError("QuadExt needs a field (QuadField or an integer d)")
        self.a = Q(a)
        self.b = Q(b)
        self.field = QuadField(field)

    @property
    def d(self):
        return self.field.d

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.field is not self.field:
                raise FieldMismatchError(
                    f"Q(sqrt {self.d}) and Q(sqrt {other.d}) cannot be mixed")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QuadExt(other, 0, self.field)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.a + o.a, self.b + o.b, self.field)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.field)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.a - o.a, self.b - o.b, self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.a * o.a + self.d * self.b * o.b,
                       self.a * o.b + self.b * o.a, self.field)

    __rmul__ = __mul__

    def conjugate(self):
        return QuadExt(self.a, -self.b, self.field)

    def norm(self):
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        return QuadExt(self.a / n, -self.b / n, self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        out = QuadExt(1, 0, self.field)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return (self.field is other.field and self.a == other.a
                    and self.b == other.b)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def is_rational(self):
        return self.b == 0

    def __repr__(self):
        return f"QuadExt({self.a}, {self.b}, d={self.d})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.d})"


def quad_unit(m):
    """The unit (m + sqrt(m^2 - 4))/2 of Q(sqrt(m^2-4)), i.e. exp(t_m), m >= 3."""
    m = int(m)
    if m < 3:
        raise ValueError("quad_unit needs an integer m >= 3")
    F = QuadField(m * m - 4)
    r = F.sqrt(m * m - 4)
    return (r + m) / 2


def _is_zero(x):
    return x == 0


class GaussExt:
    """re + i*im over a base field (Fraction or QuadExt)."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = re if not isinstance(re, int) else Fraction(re)
        self.im = im if not isinstance(im, int) else Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussExt):
            return other
        if isinstance(other, (int, Fraction, QuadExt)) and not isinstance(other, bool):
            return GaussExt(other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussExt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussExt(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussExt(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussExt(self.re * o.re - self.im * o.im,
                        self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self):
        return GaussExt(self.re, -self.im)

    def norm(self):
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Gaussian extension")
        p = self * o.conjugate()
        return GaussExt(p.re / n, p.im / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussExt({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        return f"({self.re} + {self.im}*i)"


I = GaussExt(0, 1)


# -- matrices ---------------------------------------------------------------

def _scalar(x):
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        return Q(x)
    return x


def matrix(rows):
    """Object array from nested rows; ints and strings become Fractions."""
    rows = [[_scalar(x) for x in r] for r in rows]
    n = len(rows)
    m = len(rows[0]) if n else 0
    A = np.empty((n, m), dtype=object)
    for i, r in enumerate(rows):
        if len(r) != m:
            raise ValueError("ragged rows")
        for j, x in enumerate(r):
            A[i, j] = x
    return A


def zeros(n, m=None, zero=Fraction(0)):
    m = n if m is None else m
    A = np.empty((n, m), dtype=object)
    A.fill(zero)
    return A


def identity(n, one=Fraction(1), zero=Fraction(0)):
    A = zeros(n, n, zero)
    for i in range(n):
        A[i, i] = one
    return A


def block_diag(*blocks):
    n = sum(b.shape[0] for b in blocks)
    m = sum(b.shape[1] for b in blocks)
    A = zeros(n, m)
    i = j = 0
    for b in blocks:
        A[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return A


def is_zero_matrix(A):
    return all(_is_zero(x) for x in np.asarray(A).flat)


def rref(A):
    """Reduced row echelon form over the field of the entries.

    Returns (R, rank, pivots).  The input is not modified.
    """
    R = np.array(A, dtype=object, copy=True)
    if R.ndim != 2:
        raise ValueError("rref needs a 2-d array")
    n, m = R.shape
    pivots = []
    r = 0
    for c in range(m):
        if r == n:
            break
        p = next((i for i in range(r, n) if not _is_zero(R[i, c])), None)
        if p is None:
            continue
        if p != r:
            R[[r, p]] = R[[p, r]]
        inv = 1 / R[r, c] if not isinstance(R[r, c], int) else Fraction(1, R[r, c])
        R[r] = [x * inv for x in R[r]]
        for i in range(n):
            if i != r and not _is_zero(R[i, c]):
                f = R[i, c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, r, tuple(pivots)


def rank(A):
    A = np.asarray(A, dtype=object)
    if A.size == 0:
        return 0
    return rref(A)[1]


def nullspace(A):
    """Basis of {x : A x = 0} as a list of 1-d object arrays."""
    A = np.asarray(A, dtype=object)
    n, m = A.shape
    if n == 0:
        return [identity(m)[:, j].copy() for j in range(m)]
    R, r, piv = rref(A)
    free = [c for c in range(m) if c not in piv]
    zero = Fraction(0)
    basis = []
    for f in free:
        v = np.empty(m, dtype=object)
        v.fill(zero)
        v[f] = Fraction(1)
        for row, pc in enumerate(piv):
            v[pc] = -R[row, f]
        basis.append(v)
    return basis


def solve(A, B):
    """Solve A X = B exactly; A must be square and invertible."""
    A = np.asarray(A, dtype=object)
    B = np.asarray(B, dtype=object)
    vec = B.ndim == 1
    if vec:
        B = B.reshape(-1, 1)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("solve needs a square matrix")
    R, r, _ = rref(np.hstack([A, B]))
    if r < n or any(_is_zero(R[i, i]) for i in range(n)):
        raise ZeroDivisionError("matrix is singular")
    X = R[:, n:]
    return X[:, 0].copy() if vec else X


def inverse(A):
    n = np.asarray(A).shape[0]
    one = Fraction(1)
    return solve(A, identity(n, one))


def det(A):
    A = np.array(A, dtype=object, copy=True)
    n = A.shape[0]
    out = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if not _is_zero(A[i, c])), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[[c, p]] = A[[p, c]]
            out = -out
        out = out * A[c, c]
        inv = 1 / A[c, c]
        for i in range(c + 1, n):
            if not _is_zero(A[i, c]):
                f = A[i, c] * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return out


def is_nilpotent_matrix(A):
    """True iff A^n = 0 (n = size)."""
    A = np.asarray(A, dtype=object)
    n = A.shape[0]
    P = A.copy()
    for _ in range(max(n - 1, 0)):
        if is_zero_matrix(P):
            return True
        P = P.dot(A)
    return is_zero_matrix(P)


def to_int_matrix(A):
    """Convert to a Python-int object array, or return None if some entry
    is not an integer."""
    A = np.asarray(A, dtype=object)
    out = np.empty(A.shape, dtype=object)
    for idx, x in np.ndenumerate(A):
        if isinstance(x, QuadExt):
            if x.b != 0:
                return None
            x = x.a
        if isinstance(x, GaussExt):
            if x.im != 0:
                return None
            x = x.re
        x = Fraction(x)
        if x.denominator != 1:
            return None
        out[idx] = int(x)
    return out


# -- Smith normal form --------------------------------------------------------

def smith_normal_form(A):
    """Smith normal form of an integer matrix.

    Returns (U, D, V) with U, V unimodular and U @ A @ V == D diagonal,
    each diagonal entry dividing the next, all non-negative.
    """
    A = np.asarray(A, dtype=object)
    n, m = A.shape
    D = [[int(A[i, j]) for j in range(m)] for i in range(n)]
    for i in range(n):
        for j in range(m):
            if Fraction(A[i, j]).denominator != 1:
                raise ValueError("smith_normal_form needs an integer matrix")
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(M, a, b):
        M[a], M[b] = M[b], M[a]

    def swap_cols(M, a, b):
        for row in M:
            row[a], row[b] = row[b], row[a]

    def add_row(M, src, dst, f):  # row dst += f * row src
        M[dst] = [x + f * y for x, y in zip(M[dst], M[src])]

    def add_col(M, src, dst, f):
        for row in M:
            row[dst] += f * row[src]

    t = 0
    while t < min(n, m):
        nz = [(abs(D[i][j]), i, j) for i in range(t, n) for j in range(t, m) if D[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(D, t, pi); swap_rows(U, t, pi)
        swap_cols(D, t, pj); swap_cols(V, t, pj)
        done = False
        while not done:
            done = True
            for i in range(t + 1, n):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    add_row(D, t, i, -q); add_row(U, t, i, -q)
                    if D[i][t]:
                        swap_rows(D, t, i); swap_rows(U, t, i)
                        done = False
            for j in range(t + 1, m):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    add_col(D, t, j, -q); add_col(V, t, j, -q)
                    if D[t][j]:
                        swap_cols(D, t, j); swap_cols(V, t, j)
                        done = False
            if done:
                # divisibility of the remaining block
                bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, m)
                            if D[i][j] % D[t][t]), None)
                if bad is not None:
                    add_row(D, bad[0], t, 1); add_row(U, bad[0], t, 1)
                    done = False
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return matrix(U), matrix(D), matrix(V)
