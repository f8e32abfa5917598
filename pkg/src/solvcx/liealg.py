"""Lie algebras given by structure constants.

Convention: for a 1-form a, da(x, y) = -a([x, y]).  So a structure equation
de^k = sum c e^{ij} means [e_i, e_j] has e_k-component -c.
"""

import itertools
import random
from fractions import Fraction

import numpy as np

from .exactmath import identity, is_nilpotent_matrix, nullspace, rank, rref, zeros
from .polys import MultiPoly, var

__all__ = [
    "LieAlgebra", "Subspace", "KForm", "NotSolvableError", "bracket", "ad",
    "jacobi_check", "derived_series", "lower_central_series", "is_solvable",
    "is_nilpotent", "nilradical", "is_unimodular", "is_strongly_unimodular",
    "ce_d", "d_matrix", "betti", "symplectic_exists", "center",
]


class NotSolvableError(ValueError):
    pass


def _vec(x, n=None):
    v = np.array(list(x), dtype=object)
    if n is not None and v.shape != (n,):
        raise ValueError(f"expected a vector of length {n}, got shape {v.shape}")
    return v


def _basis_vector(n, i, one=Fraction(1)):
    v = np.empty(n, dtype=object)
    v.fill(Fraction(0))
    v[i] = one
    return v


class LieAlgebra:
    """Structure constants c[i, j, k] = e_k-component of [e_i, e_j] (0-based)."""

    def __init__(self, consts, name="", params=None, labels=None):
        c = np.asarray(consts, dtype=object)
        n = c.shape[0] if c.ndim == 3 else 0
        if c.ndim == 3 and c.shape != (n, n, n):
            raise ValueError("structure constants must have shape (n, n, n)")
        if c.ndim != 3:
            c = np.empty((0, 0, 0), dtype=object)
        self.c = c
        self.dim = n
        self.name = name
        self.params = dict(params or {})
        self.labels = list(labels or [f"e{i + 1}" for i in range(n)])
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if c[i, j, k] != -c[j, i, k]:
                        raise ValueError("structure constants are not antisymmetric")
        # sparse table of nonzero brackets for speed
        self._nz = [(i, j, k, c[i, j, k]) for i in range(n) for j in range(n)
                    for k in range(n) if c[i, j, k] != 0]

    @classmethod
    def from_differentials(cls, rows, name="", params=None):
        """rows[k] = {(i, j): coef} meaning de^{k} contains coef*e^{ij} (0-based)."""
        n = len(rows)
        c = np.empty((n, n, n), dtype=object)
        c.fill(Fraction(0))
        for k, row in enumerate(rows):
            for (i, j), coef in row.items():
                if i == j:
                    raise ValueError("e^{ii} is zero")
                if i > j:
                    i, j, coef = j, i, -coef
                c[i, j, k] = c[i, j, k] - coef
                c[j, i, k] = c[j, i, k] + coef
        return cls(c, name=name, params=params)

    @classmethod
    def abelian(cls, n):
        c = np.empty((n, n, n), dtype=object)
        c.fill(Fraction(0))
        return cls(c, name=f"R^{n}")

    def differentials(self):
        """Inverse of from_differentials: list of {(i, j): coef}, i < j."""
        rows = [dict() for _ in range(self.dim)]
        for i, j, k, v in self._nz:
            if i < j:
                rows[k][(i, j)] = -v
        return rows

    def basis(self, i):
        return _basis_vector(self.dim, i)

    def zero(self):
        return _basis_vector(self.dim, 0, Fraction(0)) if self.dim else _vec([])

    def subs(self, **values):
        """Bind symbolic (polynomial) structure constants to values."""
        c = np.empty(self.c.shape, dtype=object)
        for idx, x in np.ndenumerate(self.c):
            if isinstance(x, MultiPoly):
                x = x.subs(values)
                if x.is_constant():
                    x = x.constant()
            c[idx] = x
        params = dict(self.params)
        params.update(values)
        return LieAlgebra(c, self.name, params, self.labels)

    def __repr__(self):
        return f"LieAlgebra({self.name or 'unnamed'}, dim={self.dim})"


def bracket(L, x, y):
    x = _vec(x, L.dim)
    y = _vec(y, L.dim)
    out = L.zero()
    for i, j, k, v in L._nz:
        if x[i] != 0 and y[j] != 0:
            out[k] = out[k] + x[i] * y[j] * v
    return out


def ad(L, x):
    """Matrix of ad x: column j is [x, e_j]."""
    x = _vec(x, L.dim)
    M = zeros(L.dim)
    for i, j, k, v in L._nz:
        if x[i] != 0:
            M[k, j] = M[k, j] + x[i] * v
    return M


def _ad_basis(L):
    return [ad(L, L.basis(i)) for i in range(L.dim)]


def jacobi_check(L):
    """List of (i, j, k, l, residual) with nonzero Jacobi residual, i < j < k."""
    by_first = {}
    for m, k, l, w in L._nz:
        by_first.setdefault(m, []).append((k, l, w))
    # residual(a<b<c) = sum over the cyclic rotations (x,y,z) of [[e_x, e_y], e_z]
    acc = {}
    for i, j, m, v in L._nz:
        for k, l, w in by_first.get(m, ()):
            if k == i or k == j:
                continue
            a, b, c = sorted((i, j, k))
            if (i, j, k) in ((a, b, c), (b, c, a), (c, a, b)):
                key = (a, b, c, l)
                acc[key] = acc.get(key, 0) + v * w
    return [key + (r,) for key, r in sorted(acc.items(), key=lambda kv: kv[0]) if r != 0]


class Subspace:
    """Subspace of K^n, stored by a reduced row-echelon basis (as rows)."""

    def __init__(self, n, vectors=()):
        self.n = n
        vecs = [_vec(v, n) for v in vectors]
        if vecs:
            R, r, piv = rref(np.array(vecs, dtype=object).reshape(len(vecs), n))
            self._rows = R[:r]
            self.pivots = piv
        else:
            self._rows = np.empty((0, n), dtype=object)
            self.pivots = ()

    @classmethod
    def full(cls, n):
        return cls(n, [_basis_vector(n, i) for i in range(n)])

    @property
    def dim(self):
        return self._rows.shape[0]

    def basis(self):
        return [self._rows[i].copy() for i in range(self.dim)]

    def contains(self, v):
        # reduced rows: v is in the span iff v - sum v[p] row_p vanishes
        v = _vec(v, self.n)
        r = v.copy()
        for p, row in zip(self.pivots, self._rows):
            if v[p] != 0:
                r = r - v[p] * row
        return all(x == 0 for x in r)

    def contains_subspace(self, other):
        return all(self.contains(v) for v in other.basis())

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.n == other.n and self.dim == other.dim
                and self.contains_subspace(other))

    def __add__(self, other):
        return Subspace(self.n, self.basis() + other.basis())

    def complement_basis(self):
        """Standard basis vectors completing this subspace to K^n."""
        return [_basis_vector(self.n, i) for i in range(self.n) if i not in self.pivots]

    def coords(self, v):
        """Coordinates of v in the stored basis (v must lie in the subspace)."""
        v = _vec(v, self.n)
        coeffs = [v[p] for p in self.pivots]
        recon = self.zero_vec()
        for a, row in zip(coeffs, self._rows):
            recon = recon + a * row
        if any(x != 0 for x in recon - v):
            raise ValueError("vector is not in the subspace")
        return coeffs

    def zero_vec(self):
        return _basis_vector(self.n, 0, Fraction(0))

    def restrict(self, M):
        """Matrix of a linear map M (preserving this subspace) in the stored basis."""
        B = self.basis()
        out = zeros(self.dim)
        for j, b in enumerate(B):
            for i, a in enumerate(self.coords(M.dot(b))):
                out[i, j] = a
        return out

    def __repr__(self):
        return f"Subspace(dim={self.dim} in K^{self.n})"


def bracket_span(L, A, B):
    vecs = [bracket(L, a, b) for a in A.basis() for b in B.basis()]
    return Subspace(L.dim, vecs)


def _is_subalgebra(L, S):
    return all(S.contains(bracket(L, a, b)) for a, b in itertools.combinations(S.basis(), 2))


def derived_series(L):
    g = Subspace.full(L.dim)
    out = [g]
    while True:
        nxt = bracket_span(L, out[-1], out[-1])
        if nxt.dim == out[-1].dim:
            return out
        out.append(nxt)


def lower_central_series(L, start=None):
    """start ⊃ [start, start] ⊃ [start, [start, start]] ⊃ ... until it stabilises."""
    s = Subspace.full(L.dim) if start is None else start
    if not _is_subalgebra(L, s):
        raise ValueError("start is not closed under the bracket")
    out = [s]
    while True:
        nxt = bracket_span(L, s, out[-1])
        if nxt.dim == out[-1].dim:
            return out
        out.append(nxt)


def is_solvable(L):
    return derived_series(L)[-1].dim == 0


def is_nilpotent(L, sub=None):
    return lower_central_series(L, sub)[-1].dim == 0


def center(L):
    rows = []
    for j in range(L.dim):
        rows.extend(ad(L, L.basis(j)).tolist())
    # x central iff [x, e_j] = 0 for all j, i.e. ad(e_j) x = 0
    M = np.array(rows, dtype=object).reshape(-1, L.dim) if rows else zeros(0, L.dim)
    return Subspace(L.dim, nullspace(M))


class _Echelon:
    """Incrementally reduced set of vectors (pivot -> row with 1 at pivot)."""

    def __init__(self):
        self.rows = {}

    def insert(self, v):
        """Add v; returns False if it was already in the span."""
        v = [Fraction(x) for x in v]
        for p, row in self.rows.items():
            if v[p] != 0:
                c = v[p]
                v = [a - c * b for a, b in zip(v, row)]
        piv = next((i for i, x in enumerate(v) if x != 0), None)
        if piv is None:
            return False
        c = v[piv]
        self.rows[piv] = [x / c for x in v]
        return True


def nilradical(L):
    """Maximal nilpotent ideal of a solvable Lie algebra.

    An element y is in the nilradical iff ad y is nilpotent iff
    Tr(A ad y) = 0 for every A in the associative algebra generated by the
    ad e_i (simultaneous triangularisation).  Words are added length by length
    and we stop as soon as the common kernel is a nilpotent subalgebra, which
    then is the nilradical (it contains [g, g], hence is an ideal).
    """
    cached = getattr(L, "_nilradical", None)
    if cached is not None:
        return cached
    L._nilradical = _nilradical(L)
    return L._nilradical


def _matmul(A, B):
    """Product of object matrices, skipping zero entries (ad matrices are sparse)."""
    n, m = A.shape[0], B.shape[1]
    out = zeros(n, m)
    rows_b = [[(j, x) for j, x in enumerate(B[k]) if x != 0] for k in range(B.shape[0])]
    for i in range(n):
        for k, a in enumerate(A[i]):
            if a != 0:
                for j, b in rows_b[k]:
                    out[i, j] = out[i, j] + a * b
    return out


def _trace_product(A, B):
    """Tr(A B) without forming the product."""
    total = Fraction(0)
    for i in range(A.shape[0]):
        for j in range(A.shape[1]):
            if A[i, j] != 0 and B[j, i] != 0:
                total = total + A[i, j] * B[j, i]
    return total


def _nilradical(L):
    if not is_solvable(L):
        raise NotSolvableError(f"{L.name or 'algebra'} is not solvable")
    n = L.dim
    if n == 0:
        return Subspace(0)
    ads = _ad_basis(L)
    words = [identity(n)]
    forms = []
    span = _Echelon()

    def add_forms(A):
        forms.append([_trace_product(A, M) for M in ads])

    for A in words:
        add_forms(A)
    while True:
        K = Subspace(n, nullspace(np.array(forms, dtype=object)))
        if _is_subalgebra(L, K) and is_nilpotent(L, K):
            return K
        new = []
        for A in words:
            for M in ads:
                P = _matmul(A, M)
                if span.insert(P.reshape(-1)):
                    new.append(P)
        if not new:
            raise RuntimeError("nilradical search did not converge")  # pragma: no cover
        words = new
        for A in new:
            add_forms(A)


def nilradical_certificate(L, N=None):
    """Check the nilradical postconditions: contains [g,g], ideal, nilpotent,
    and each complement basis vector has non-nilpotent ad."""
    N = nilradical(L) if N is None else N
    g = Subspace.full(L.dim)
    dg = bracket_span(L, g, g)
    return {
        "contains_derived": N.contains_subspace(dg),
        "ideal": bracket_span(L, g, N).dim == 0 or N.contains_subspace(bracket_span(L, g, N)),
        "nilpotent": is_nilpotent(L, N),
        "complement_not_nilpotent": all(not is_nilpotent_matrix(ad(L, v))
                                        for v in N.complement_basis()),
    }


def is_unimodular(L):
    return all(np.trace(ad(L, L.basis(i))) == 0 for i in range(L.dim)) if L.dim else True


def _trace_on(S, M):
    """Trace of M on an M-invariant subspace S: the pivot coordinates of M b_j."""
    total = Fraction(0)
    for p, b in zip(S.pivots, S.basis()):
        total = total + M[p].dot(b)
    return total


def is_strongly_unimodular(L):
    """Traces of ad x on every layer n^l / n^(l+1) of the nilradical vanish."""
    N = nilradical(L)
    series = lower_central_series(L, N)
    for i in range(L.dim):
        M = ad(L, L.basis(i))
        traces = [_trace_on(S, M) for S in series]
        for a, b in zip(traces, traces[1:] + [Fraction(0)]):
            if a - b != 0:
                return False
    return True


# -- exterior forms -----------------------------------------------------------

def _sort_sign(idx):
    """Sort an index tuple; return (sign, sorted) or (0, None) on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class KForm:
    """Exterior k-form on K^n; keys are increasing 0-based index tuples."""

    __slots__ = ("n", "k", "coeffs")

    def __init__(self, n, k, coeffs=None):
        self.n = n
        self.k = k
        self.coeffs = {}
        for idx, v in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != k:
                raise ValueError("index tuple of wrong degree")
            s, key = _sort_sign(idx)
            if s and v != 0:
                cur = self.coeffs.get(key, 0) + s * v
                if cur != 0:
                    self.coeffs[key] = cur
                else:
                    self.coeffs.pop(key, None)

    @classmethod
    def basis1(cls, n, i):
        return cls(n, 1, {(i,): Fraction(1)})

    @classmethod
    def from_covector(cls, v):
        return cls(len(v), 1, {(i,): x for i, x in enumerate(v) if x != 0})

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        if self.k != other.k or self.n != other.n:
            raise ValueError("adding forms of different degree")
        out = dict(self.coeffs)
        for key, v in other.coeffs.items():
            s = out.get(key, 0) + v
            if s != 0:
                out[key] = s
            else:
                out.pop(key, None)
        f = KForm(self.n, self.k)
        f.coeffs = out
        return f

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        f = KForm(self.n, self.k)
        f.coeffs = {key: a * v for key, v in self.coeffs.items() if a * v != 0}
        return f

    def __rmul__(self, a):
        return self.scale(a)

    def wedge(self, other):
        out = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                s, key = _sort_sign(k1 + k2)
                if s:
                    out[key] = out.get(key, 0) + s * v1 * v2
        return KForm(self.n, self.k + other.k, out)

    __xor__ = wedge

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return self.k == other.k and (self - other).is_zero()

    def __call__(self, *vectors):
        """Evaluate on k vectors (determinant formula)."""
        total = 0
        for key, v in self.coeffs.items():
            M = np.array([[vec[i] for vec in vectors] for i in key], dtype=object)
            total = total + v * _det_small(M)
        return total

    def proportional_to(self, other):
        """True iff self = z * other for some nonzero scalar z."""
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        if set(self.coeffs) != set(other.coeffs):
            return False
        key = next(iter(self.coeffs))
        z = self.coeffs[key] / other.coeffs[key]
        return all(self.coeffs[k] == z * other.coeffs[k] for k in self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for key in sorted(self.coeffs):
            parts.append(f"({self.coeffs[key]})e^{{{''.join(str(i + 1) for i in key)}}}")
        return " + ".join(parts)


def _det_small(M):
    n = M.shape[0]
    if n == 0:
        return 1
    if n == 1:
        return M[0, 0]
    total = 0
    for j in range(n):
        if M[0, j] != 0:
            minor = np.delete(M[1:], j, axis=1)
            total = total + (-1) ** j * M[0, j] * _det_small(minor)
    return total


def _d1(L):
    # de^k = -sum_{i<j} c[i,j,k] e^{ij}
    out = []
    for k in range(L.dim):
        coeffs = {}
        for i, j, kk, v in L._nz:
            if kk == k and i < j:
                coeffs[(i, j)] = -v
        out.append(KForm(L.dim, 2, coeffs))
    return out


def ce_d(L, form):
    """Chevalley-Eilenberg differential, extended as an antiderivation."""
    d1 = _d1(L)
    out = KForm(L.dim, form.k + 1)
    for key, v in form.coeffs.items():
        for r, i in enumerate(key):
            left = KForm(L.dim, r, {key[:r]: Fraction(1)}) if r else None
            right = KForm(L.dim, len(key) - r - 1, {key[r + 1:]: Fraction(1)})
            term = d1[i] if left is None else left.wedge(d1[i])
            term = term.wedge(right)
            out = out + term.scale(v * (-1) ** r)
    return out


def d_matrix(L, k):
    """Matrix of d: Lambda^k -> Lambda^(k+1) in the lexicographic bases."""
    cache = L.__dict__.setdefault("_dmat", {})
    if k not in cache:
        cache[k] = _d_matrix(L, k)
    return cache[k].copy()


def _d_matrix(L, k):
    n = L.dim
    src = list(itertools.combinations(range(n), k))
    dst = list(itertools.combinations(range(n), k + 1))
    pos = {key: i for i, key in enumerate(dst)}
    M = zeros(len(dst), len(src))
    d1 = [form.coeffs for form in _d1(L)]
    # d e^I = sum_r (-1)^r e^{i_1..i_(r-1)} ^ de^{i_r} ^ e^{i_(r+1)..}
    for j, key in enumerate(src):
        for r, i in enumerate(key):
            for (a, b), c in d1[i].items():
                sign, sk = _sort_sign(key[:r] + (a, b) + key[r + 1:])
                if sign:
                    M[pos[sk], j] = M[pos[sk], j] + (-1) ** r * sign * c
    return M


def betti(L, k):
    n = L.dim
    if not 0 <= k <= n:
        raise ValueError("degree out of range")
    dim_k = len(list(itertools.combinations(range(n), k)))
    r_out = rank(d_matrix(L, k)) if k < n else 0
    r_in = rank(d_matrix(L, k - 1)) if k > 0 else 0
    return dim_k - r_out - r_in


def closed_forms(L, k):
    """Basis of closed k-forms."""
    n = L.dim
    src = list(itertools.combinations(range(n), k))
    if k == n:
        vecs = [identity(1)[:, 0]]
    else:
        vecs = nullspace(d_matrix(L, k))
    return [KForm(n, k, {key: v[i] for i, key in enumerate(src) if v[i] != 0}) for v in vecs]


def symplectic_exists(L, seed=0):
    """Decide if some closed 2-form is nondegenerate (dim 6).

    Returns (True, omega) with a witness, or (False, cubic) where cubic is the
    identically zero polynomial giving the top coefficient of omega^3 on Z^2.
    """
    if L.dim != 6:
        raise ValueError("symplectic_exists supports dimension 6 only")
    Z = closed_forms(L, 2)
    s = [var(f"s{i + 1}") for i in range(len(Z))]
    omega = KForm(6, 2)
    for si, z in zip(s, Z):
        omega = omega + z.scale(si)
    cube = omega.wedge(omega).wedge(omega)
    top = cube.coeffs.get(tuple(range(6)), MultiPoly())
    top = MultiPoly.coerce(top)
    if top.is_zero():
        return False, top
    rng = random.Random(seed)
    while True:
        vals = {f"s{i + 1}": Fraction(rng.randint(-3, 3)) for i in range(len(Z))}
        if top(**vals) != 0:
            w = KForm(6, 2)
            for i, z in enumerate(Z):
                w = w + z.scale(vals[f"s{i + 1}"])
            return True, w
