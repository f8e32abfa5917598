"""A lattice in S_{6,154}^0 and its abelianization.

The one-parameter subgroup at t = pi acts on the nilradical n_{5,2} by an
integral matrix, so Z x Gamma_N is a lattice.  The group law on Gamma_N is
the Baker-Campbell-Hausdorff product; the stored presentation is checked
against it and then abelianized.
"""

from fractions import Fraction

import numpy as np

from solvcx.catalog import get
from solvcx.catalog.cases import get_case
from solvcx.lattice import bch_product
from solvcx.polys import var

case = get_case("S_{6,154}^0")
report = case.certify("t = pi")
print("certificate at t = pi:", "PASS" if report.passed else report.problems)
for M in report.matrices:
    print(np.array(M.tolist()))

# symbolic BCH product on n_{5,2}
L, _ = get("n_{5,2}")
m = np.array([var(f"m{i}") for i in range(1, 6)], dtype=object)
n = np.array([var(f"n{i}") for i in range(1, 6)], dtype=object)
print()
print("m * n in n_{5,2}:")
for i, z in enumerate(bch_product(L, m, n), 1):
    print(f"  e{i}: {z}")

# the conjugation e4^{e5} lands on (e1/2)(-e2/2) e3 e4
e = [np.array([Fraction(int(i == j)) for j in range(5)], dtype=object) for i in range(5)]
lhs = bch_product(L, bch_product(L, -e[4], e[3]), e[4])
rhs = bch_product(L, bch_product(L, e[0] / 2, -e[1] / 2), bch_product(L, e[2], e[3]))
print()
print("e4^{e5} =", list(map(str, lhs)), " matches:", list(lhs) == list(rhs))

pres = case.presentation_report()
print()
print("relations hold:", sum(ok for _, ok in pres["relations"]), "/", len(pres["relations"]))
print("torsion:", pres["torsion"], " free rank:", pres["free_rank"])
