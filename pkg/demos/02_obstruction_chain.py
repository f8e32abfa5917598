"""Replaying an obstruction chain with the generic polynomial tables.

The generic almost complex structure J = (a_ij) on s_{5,41}^{-1,-1} x R is
pushed through psi = 0, J^2 = -1 and N = 0 step by step.  The chain ends in
a sum of squares plus one, so no complex structure exists.
"""

from solvcx.catalog import load_chains
from solvcx.genpoly import printed_variant, replay

chain = next(c for c in load_chains() if c.kind == "complex")
print(chain.name)
print()

ok, results = replay(chain)
for r in results:
    if r.step.op == "assert":
        print(f"  {'ok ' if r.passed else 'BAD'} {r.step.lhs} = {r.computed}")
    elif r.step.op == "substitute":
        print("  substitute", ", ".join(f"{k} = {v}" for k, v in r.step.values.items()))
    else:
        print(f"  {r.step.op} {r.step.lhs or r.step.note}")
print()
print("computed chain replays:", ok)

# the displayed version of the same chain carries two wrong entries
ok, results = replay(printed_variant(chain))
print("displayed chain replays:", ok)
for r in results:
    if not r.passed:
        print(f"  {r.step.lhs}: displayed {r.expected}, computed {r.computed}")
