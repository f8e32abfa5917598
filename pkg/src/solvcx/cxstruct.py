"""Almost complex structures on Lie algebras: Nijenhuis tensor, Koszul form,
invariant (n,0)-forms and the closed non-invariant form certificate."""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exactmath import GaussExt, identity, inverse, is_zero_matrix, matrix, nullspace
from .liealg import KForm, Subspace, _trace_product, ad, bracket, bracket_span, ce_d

__all__ = [
    "AlmostComplexStructure", "NotComplexError", "nijenhuis", "is_integrable",
    "koszul", "dpsi_is_zero", "chern_ricci_flat", "invariant_top_form",
    "tau_certificate", "TrivializationCertificate",
]


class NotComplexError(ValueError):
    pass


class AlmostComplexStructure:
    """A matrix J (column j = J e_j) with J^2 = -I."""

    def __init__(self, J):
        J = np.array(J, dtype=object)
        n = J.shape[0]
        if J.shape != (n, n) or n % 2:
            raise NotComplexError("J must be square of even size")
        if not is_zero_matrix(J.dot(J) + identity(n)):
            raise NotComplexError("J^2 != -I")
        self.J = J
        self.n = n

    @classmethod
    def from_images(cls, n, images):
        """Complete a partial description {v_i: J v_i} using J^2 = -I.

        ``images`` is a list of (v, w) vector pairs with J v = w for n/2
        pairs; then J w = -v and {v_i, w_i} must be a basis.
        """
        if len(images) != n // 2:
            raise NotComplexError(f"need {n // 2} pairs, got {len(images)}")
        src = [np.array(v, dtype=object) for v, _ in images] + \
              [np.array(w, dtype=object) for _, w in images]
        dst = [np.array(w, dtype=object) for _, w in images] + \
              [-np.array(v, dtype=object) for v, _ in images]
        S = np.array(src, dtype=object).T
        D = np.array(dst, dtype=object).T
        try:
            Sinv = inverse(S)
        except ZeroDivisionError:
            raise NotComplexError("v_i, Jv_i do not form a basis") from None
        return cls(D.dot(Sinv))

    def __call__(self, x):
        # column combination; skips the zero coordinates of x
        out = None
        for j, xj in enumerate(x):
            if xj != 0:
                col = self.J[:, j] * xj
                out = col if out is None else out + col
        return np.array([Fraction(0)] * self.n, dtype=object) if out is None else out

    def __repr__(self):
        return f"AlmostComplexStructure({self.J.tolist()})"


def _as_acs(J):
    return J if isinstance(J, AlmostComplexStructure) else AlmostComplexStructure(J)


def nijenhuis(L, J, x, y):
    """N(x,y) = [x,y] + J([Jx,y] + [x,Jy]) - [Jx,Jy]."""
    J = _as_acs(J)
    Jx, Jy = J(x), J(y)
    return (bracket(L, x, y) + J(bracket(L, Jx, y) + bracket(L, x, Jy))
            - bracket(L, Jx, Jy))


def is_integrable(L, J):
    J = _as_acs(J)
    n = L.dim
    for i in range(n):
        for j in range(i + 1, n):
            if any(v != 0 for v in nijenhuis(L, J, L.basis(i), L.basis(j))):
                return False
    return True


def koszul(L, J):
    """psi(x) = Tr(J ad x) - Tr ad(Jx), as a covector (list of coefficients)."""
    J = _as_acs(J)
    out = []
    for i in range(L.dim):
        x = L.basis(i)
        out.append(_trace_product(J.J, ad(L, x)) - np.trace(ad(L, J(x))))
    return np.array(out, dtype=object)


def dpsi_is_zero(L, J):
    """psi vanishes on [g,g]; cross-checked against d(psi) = 0."""
    psi = koszul(L, J)
    g = Subspace.full(L.dim)
    on_derived = all(v.dot(psi) == 0 for v in bracket_span(L, g, g).basis())
    closed = ce_d(L, KForm.from_covector(psi)).is_zero()
    if on_derived != closed:  # pragma: no cover - would mean a bug in ce_d
        raise AssertionError("psi([g,g]) = 0 and d(psi) = 0 disagree")
    return on_derived


chern_ricci_flat = dpsi_is_zero


def _holomorphic_coframe(J):
    """Basis of {eta : eta o J = i eta}, by elimination on (J^T - i I)."""
    n = J.n
    i = GaussExt(0, 1)
    M = np.empty((n, n), dtype=object)
    for r in range(n):
        for c in range(n):
            M[r, c] = GaussExt(J.J[c, r]) - (i if r == c else 0)
    return nullspace(M)


def invariant_top_form(L, J):
    """sigma = eta^1 ^ ... ^ eta^m for a (1,0)-coframe; leading coefficient 1."""
    J = _as_acs(J)
    if not is_integrable(L, J):
        raise NotComplexError("J is not integrable")
    etas = _holomorphic_coframe(J)
    sigma = KForm(L.dim, 0, {(): GaussExt(1)})
    for eta in etas:
        sigma = sigma.wedge(KForm.from_covector(eta))
    if sigma.is_zero():  # pragma: no cover
        raise AssertionError("degenerate (1,0)-coframe")
    lead = sigma.coeffs[min(sigma.coeffs)]
    return sigma.scale(1 / lead)


@dataclass
class TrivializationCertificate:
    e0: np.ndarray
    h: Subspace
    c: object
    psi: np.ndarray
    sigma: KForm
    d_sigma: KForm
    closed: bool
    exponent: object = field(default=None)  # c/2, i.e. tau = exp(-i (c/2) t) sigma

    @property
    def sign(self):
        return 1 if self.c > 0 else -1


def tau_certificate(L, J, e0=None):
    """Check d(sigma) = (i c/2) e0^* ^ sigma with c = Tr(J ad e0), e0^* = psi/psi(e0).

    This is what makes exp(-(i/2) c t) sigma closed on g = R e0 + ker psi.
    """
    J = _as_acs(J)
    psi = koszul(L, J)
    if all(v == 0 for v in psi):
        raise ValueError("psi vanishes identically; sigma itself is closed")
    if not dpsi_is_zero(L, J):
        raise ValueError("psi does not vanish on [g,g]; no closed (n,0)-form")
    n = L.dim
    if e0 is None:
        k = next(k for k in range(n) if psi[k] != 0)
        e0 = L.basis(k)
    e0 = np.array(e0, dtype=object)
    p0 = e0.dot(psi)
    if p0 == 0:
        raise ValueError("psi(e0) = 0")
    c = _trace_product(J.J, ad(L, e0))
    h = Subspace(n, nullspace(matrix([list(psi)])))
    sigma = invariant_top_form(L, J)
    e0_dual = KForm.from_covector([v / p0 for v in psi])
    d_sigma = ce_d(L, sigma)
    rhs = e0_dual.wedge(sigma).scale(GaussExt(0, Fraction(c) / 2))
    return TrivializationCertificate(e0=e0, h=h, c=c, psi=psi, sigma=sigma,
                                     d_sigma=d_sigma, closed=(d_sigma == rhs),
                                     exponent=Fraction(c) / 2)
