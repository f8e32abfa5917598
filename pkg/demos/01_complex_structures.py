"""Complex structures on a six-dimensional solvable algebra.

Walks through g_10 = s_{6,147}^0: its structure equations, a left-invariant
complex structure, the Koszul form and the invariant (3,0)-form.
"""

from fractions import Fraction

import numpy as np

from solvcx.catalog import get
from solvcx.cxstruct import AlmostComplexStructure, invariant_top_form, is_integrable, koszul
from solvcx.liealg import betti, ce_d


def e(i):
    v = [Fraction(0)] * 6
    v[i - 1] = Fraction(1)
    return np.array(v, dtype=object)


L, entry = get("g_10")
print("algebra       ", entry.display_name({}))
print("equations     ", entry.equations)

# Je1 = e2, Je3 = -e4, Je5 = -2e6
J = AlmostComplexStructure.from_images(6, [(e(1), e(2)), (e(3), -e(4)), (e(5), -2 * e(6))])
print("J^2 = -1      ", bool((J.J.dot(J.J) == -np.eye(6, dtype=int)).all()))
print("integrable    ", is_integrable(L, J))

psi = koszul(L, J)
print("psi           ", [str(c) for c in psi])

# psi = 0 means the invariant (3,0)-form is closed
sigma = invariant_top_form(L, J)
print("d(sigma) = 0  ", ce_d(L, sigma).is_zero())

print("betti         ", [betti(L, k) for k in range(7)])

# compare with s_{6,44}, where psi does not vanish
L44, entry44 = get("s_{6,44}")
(stored,) = entry44.structures_at()
print()
print("algebra       ", entry44.display_name({}))
print("stored J      ", stored.images, " psi listed as", stored.psi)
print("psi           ", [str(c) for c in koszul(L44, stored.matrix(6))])
