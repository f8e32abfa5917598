"""Betti numbers and symplectic forms from the Chevalley-Eilenberg complex."""

from solvcx.catalog import get
from solvcx.liealg import betti, ce_d, symplectic_exists

for name in ("g_9", "g_10", "s_{6,154}^0", "R x n_{5,2}"):
    L, _ = get(name)
    b = [betti(L, k) for k in range(L.dim + 1)]
    exists, witness = symplectic_exists(L)
    print(f"{name:14} b = {b}  symplectic: {exists}")
    if exists:
        # witness is a closed 2-form with nonzero cube
        print(" " * 15, "omega =", witness)
        print(" " * 15, "d(omega) = 0:", ce_d(L, witness).is_zero())
