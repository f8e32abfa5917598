"""Generic almost complex structures with polynomial entries.

J has entry (i, j) = a_{n(j-1)+i} (1-based, column-major), so the first
column is a1..a_n.  The Nijenhuis components, the entries B_ij of J^2 + I
and the Koszul components psi_k then become polynomials, and elimination
chains over them can be replayed step by step.

Chain tables list N_ijk = e^k(N(e_j, e_i)) = -e^k(N(e_i, e_j)).  The overall
sign does not affect the vanishing locus; the stored chains use this
orientation.
"""

import re
from dataclasses import dataclass, field

import numpy as np

from .exactmath import identity
from .liealg import ad, bracket
from .polys import MultiPoly, parse_poly, var

__all__ = [
    "generic_acs", "generic_nijenhuis", "generic_b", "generic_koszul",
    "PolyTables", "ObstructionChain", "ChainStep", "StepResult", "replay",
    "parse_chain", "printed_variant",
]


def generic_acs(n):
    J = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            J[i, j] = var(f"a{n * j + i + 1}")
    return J


TABLE_SIGN = -1


def generic_nijenhuis(L, sign=1):
    """{(i, j, k): sign * e^k(N(e_i, e_j))} for 1-based i < j and every k."""
    n = L.dim
    J = generic_acs(n)
    cols = [J[:, j] for j in range(n)]
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            ei, ej = L.basis(i), L.basis(j)
            inner = bracket(L, cols[i], ej) + bracket(L, ei, cols[j])
            N = bracket(L, ei, ej) + J.dot(inner) - bracket(L, cols[i], cols[j])
            for k in range(n):
                out[(i + 1, j + 1, k + 1)] = MultiPoly.coerce(N[k]) * sign
    return out


def generic_b(L_or_n):
    n = L_or_n if isinstance(L_or_n, int) else L_or_n.dim
    J = generic_acs(n)
    B = J.dot(J) + identity(n)
    return {(i + 1, j + 1): MultiPoly.coerce(B[i, j]) for i in range(n) for j in range(n)}


def generic_koszul(L):
    n = L.dim
    J = generic_acs(n)
    out = {}
    for k in range(n):
        x = L.basis(k)
        out[k + 1] = MultiPoly.coerce(np.trace(J.dot(ad(L, x))) - np.trace(ad(L, J[:, k])))
    return out


class PolyTables:
    """N, B and psi tables with a running substitution applied lazily."""

    def __init__(self, L):
        self.L = L
        self.n = L.dim
        self._base = {}
        for (i, j, k), p in generic_nijenhuis(L, TABLE_SIGN).items():
            self._base[f"N{i}{j}{k}"] = p
            self._base[f"N{j}{i}{k}"] = -p
        for (i, j), p in generic_b(L).items():
            self._base[f"B{i}{j}"] = p
        for k, p in generic_koszul(L).items():
            self._base[f"psi{k}"] = p
        self.substitution = {}
        self._cache = {}

    def substitute(self, values):
        new = {k: MultiPoly.coerce(v) if not isinstance(v, MultiPoly) else v
               for k, v in values.items()}
        # compose with the existing substitution
        self.substitution = {k: v.subs(new) for k, v in self.substitution.items()}
        self.substitution.update(new)
        self._cache = {}

    def __getitem__(self, name):
        if name not in self._cache:
            self._cache[name] = self._base[name].subs(self.substitution)
        return self._cache[name]

    def names(self):
        return list(self._base)

    def expr(self, text):
        """Evaluate an expression over table entries and the variables a_k."""
        used = set(re.findall(r"\b(?:N\d{3}|B\d{2}|psi\d)\b", text))
        names = {u: self[u] for u in used}
        for k, v in self.substitution.items():
            names.setdefault(k, v)
        return parse_poly(text, names)


@dataclass
class ChainStep:
    op: str                 # "assert", "substitute" or "nonvanishing"
    lhs: str = ""
    rhs: str = ""
    values: dict = field(default_factory=dict)
    note: str = ""
    printed: str = ""       # displayed form, when it differs from lhs = rhs


@dataclass
class ObstructionChain:
    name: str
    algebra: object          # a LieAlgebra
    steps: list


@dataclass
class StepResult:
    index: int
    step: ChainStep
    passed: bool
    computed: str = ""
    expected: str = ""


def parse_chain(doc, algebra):
    steps = []
    for raw in doc["steps"]:
        if "assert" in raw:
            lhs, rhs = raw["assert"].split("=", 1)
            steps.append(ChainStep("assert", lhs.strip(), rhs.strip(), note=raw.get("note", ""),
                                   printed=raw.get("printed", "")))
        elif "substitute" in raw:
            steps.append(ChainStep("substitute", values=dict(raw["substitute"]),
                                   note=raw.get("note", "")))
        elif "nonvanishing" in raw:
            steps.append(ChainStep("nonvanishing", lhs=raw["nonvanishing"],
                                   note=raw.get("note", "")))
        else:
            raise ValueError(f"unknown chain step {raw!r}")
    return ObstructionChain(doc["name"], algebra, steps)


def printed_variant(chain):
    """The chain with every assertion replaced by its displayed form."""
    steps = []
    for st in chain.steps:
        if st.op == "assert" and st.printed:
            lhs, rhs = st.printed.split("=", 1)
            st = ChainStep("assert", lhs.strip(), rhs.strip(), note=st.note)
        steps.append(st)
    return ObstructionChain(chain.name + " (as printed)", chain.algebra, steps)


def replay(chain):
    """Recompute every step; returns (all_passed, [StepResult])."""
    tables = PolyTables(chain.algebra)
    results = []
    for idx, step in enumerate(chain.steps):
        if step.op == "substitute":
            tables.substitute({k: parse_poly(str(v)) for k, v in step.values.items()})
            results.append(StepResult(idx, step, True))
        elif step.op == "assert":
            got = tables.expr(step.lhs)
            want = parse_poly(step.rhs)
            results.append(StepResult(idx, step, got == want, str(got), str(want)))
        elif step.op == "nonvanishing":
            got = tables.expr(step.lhs)
            results.append(StepResult(idx, step, not got.is_zero(), str(got), "nonzero"))
        else:  # pragma: no cover
            raise ValueError(step.op)
    return all(r.passed for r in results), results
