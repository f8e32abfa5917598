"""Machine-readable catalog of six-dimensional solvable strongly unimodular
Lie algebras, with stored complex structures, Koszul-form tables, worked
lattice cases and obstruction chains.

Data lives in YAML documents under ``data/`` (or ``$CATALOG_DIR``); see
``data/SCHEMA.md`` for the layout.
"""

from __future__ import annotations

import itertools
import os
import re
import unicodedata
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np
import yaml

from ..cxstruct import AlmostComplexStructure
from ..liealg import bracket, lower_central_series, nilradical
from ..polys import ExpressionError, evaluate
from .parser import (GREEK, StructureSyntaxError, format_structure_equations, parse_structure_equations, parse_terms)

__all__ = [
    "Catalog", "CatalogEntry", "StoredJ", "UnknownNameError", "DomainError",
    "load_catalog", "get", "normalize_name", "nil_signature", "NIL_SIGNATURES",
    "parse_structure_equations", "format_structure_equations", "StructureSyntaxError",
    "parse_vector_expr", "parse_covector", "expand_pm", "to_fraction",
    "load_chains", "load_facts",
]

SCHEMA_VERSION = 1
DATA_DIR = Path(__file__).with_name("data")


class UnknownNameError(KeyError):
    pass


class DomainError(ValueError):
    pass


def catalog_dir():
    return Path(os.environ.get("CATALOG_DIR") or DATA_DIR)


def to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; write rationals as 'p/q'")
    return Fraction(str(x).strip())


# -- names -------------------------------------------------------------------------

_GREEK_ASCII = {**GREEK, "\\alpha": "alpha", "\\beta": "beta", "\\gamma": "gamma",
                "\\delta": "delta"}


def normalize_name(text):
    """Shell-safe key: lower case, Greek spelled out, runs of other characters
    collapsed to '_' ("s_{6,154}^0" -> "s_6_154_0")."""
    t = unicodedata.normalize("NFKC", str(text))
    for g, a in _GREEK_ASCII.items():
        t = t.replace(g, f"_{a}_")
    t = t.replace("\\times", " x ").replace("×", " x ").replace("\\frac", "")
    t = t.replace("ℝ", "R").replace("−", "-")
    t = t.replace("-", "m").replace("+", "p").replace("/", "d")
    return re.sub(r"[^a-z0-9]+", "_", t.lower()).strip("_")


def _strip_superscripts(name):
    """'s_{5,9}^{a,b,-a-b-1} x R' -> 's_{5,9} x R'."""
    out = re.sub(r"\^\{[^}]*\}", "", name)
    return re.sub(r"\^\\?[-\w]+", "", out)


# -- nilradicals ---------------------------------------------------------------------

# dims of the lower central series of n (ending at 0) and dim of its centre
NIL_SIGNATURES = {
    "R5": ((5, 0), 5),
    "h3xR2": ((5, 1, 0), 3),
    "n51": ((5, 2, 0), 2),
    "n52": ((5, 3, 2, 0), 2),
    "n53": ((5, 1, 0), 1),
    "R4": ((4, 0), 4),
}


def nil_signature(L):
    N = nilradical(L)
    series = [s.dim for s in lower_central_series(L, N)]
    if series[-1] != 0:  # pragma: no cover - nilradical is nilpotent
        series.append(0)
    B = N.basis()
    rows = []
    for b in B:
        cols = [bracket(L, a, b) for a in B]
        rows.append(cols)
    # x = sum c_i B_i is central in n iff sum_i c_i [B_i, B_j] = 0 for all j
    M = np.array([[rows[i][j][k] for i in range(len(B))]
                  for j in range(len(B)) for k in range(L.dim)], dtype=object)
    from ..exactmath import rank
    cdim = len(B) - (rank(M) if len(B) else 0)
    return tuple(series), cdim


# -- vectors and covectors ---------------------------------------------------------------

def _basis_env(n, prefix="e"):
    env = {}
    for i in range(n):
        v = np.array([Fraction(0)] * n, dtype=object)
        v[i] = Fraction(1)
        env[f"{prefix}{i + 1}"] = v
    return env


def parse_vector_expr(text, n, params=None):
    """'e5 - 2*alpha*e6' -> exact vector (parameters from ``params``)."""
    env = _basis_env(n)
    env.update(params or {})
    val = evaluate(str(text), env)
    if not isinstance(val, np.ndarray):
        raise ExpressionError(f"{text!r} is not a vector")
    return val


def expand_pm(text):
    """All sign choices of a formula containing '\\pm' (or '±')."""
    t = text.replace("±", "\\pm").replace("\\mp", "\\pm")
    k = t.count("\\pm")
    out = []
    for signs in itertools.product("+-", repeat=k):
        s = t
        for sg in signs:
            s = s.replace("\\pm", sg, 1)
        out.append(s)
    return out


def parse_covector(text, n, params=None):
    """'2(\\gamma - 1)e^5 + 2e^6' -> list of n coefficients."""
    out = [Fraction(0)] * n
    text = text.strip()
    if text in ("0", ""):
        return out
    if text[0] == "+":
        text = text[1:]
    env = dict(params or {})
    for expr, (k,) in parse_terms(text.replace("--", "+").replace("+-", "-")
                                  .replace("-+", "-").replace("++", "+"), single=True):
        c = evaluate(expr, env)
        out[k - 1] = out[k - 1] + c
    return out


# -- entries -----------------------------------------------------------------------------

def _pred(text, values):
    if isinstance(text, bool):
        return text
    env = dict(values)
    return bool(evaluate(str(text), env))


@dataclass
class StoredJ:
    """A complex structure attached to an entry, given by images J e_i."""
    role: str                      # complex | koszul | psi0 | search | alias
    images: dict
    when: str | bool = True
    psi: str | None = None         # listed Koszul options, e.g. "\pm 2e^3"
    note: str = ""

    def applies(self, values):
        return _pred(self.when, values)

    def matrix(self, n, values=None):
        pairs = [(parse_vector_expr(k, n, values), parse_vector_expr(v, n, values))
                 for k, v in self.images.items()]
        return AlmostComplexStructure.from_images(n, pairs)

    def psi_options(self, n, values=None):
        if self.psi is None:
            return None
        return [parse_covector(s, n, values) for s in expand_pm(self.psi)]

    def describe(self):
        return ", ".join(f"J{k}={v}" for k, v in self.images.items())


@dataclass
class CatalogEntry:
    name: str
    table: int
    nil: str
    equations: str
    params: list = field(default_factory=list)
    domain: str = "True"
    samples: list = field(default_factory=list)
    extra_points: list = field(default_factory=list)
    J: str | bool = False
    dpsi: object = False
    structures: list = field(default_factory=list)
    aliases: list = field(default_factory=list)

    @property
    def key(self):
        return normalize_name(self.name)

    @property
    def family_key(self):
        return normalize_name(_strip_superscripts(self.name))

    def bind(self, values=None):
        values = {k: to_fraction(v) for k, v in (values or {}).items()}
        unknown = set(values) - set(self.params)
        if unknown:
            raise DomainError(f"{self.name}: unknown parameters {sorted(unknown)}")
        missing = [p for p in self.params if p not in values]
        if missing:
            raise DomainError(f"{self.name}: missing parameters {missing}")
        return values

    def in_domain(self, values):
        return _pred(self.domain, values)

    def check_domain(self, values):
        if not self.in_domain(values):
            raise DomainError(f"{self.name}: parameters {_fmt_vals(values)} violate "
                              f"the constraint {self.domain}")

    def algebra(self, values=None, check=True, symbolic=False):
        """Instantiate; with ``symbolic`` unbound parameters stay polynomial."""
        if symbolic:
            vals = dict(values or {})
        else:
            vals = self.bind(values)
            if check:
                self.check_domain(vals)
        return parse_structure_equations(self.equations, self.params, vals, name=self.name)

    def points(self):
        """Sample points (domain points, then documented extra points)."""
        if not self.params:
            return [{}]
        return [self.bind(p) for p in self.samples] + [self.bind(p) for p in self.extra_points]

    def admits_J(self, values=None):
        return _pred(self.J, self.bind(values))

    def dpsi_flag(self, values=None):
        """'no', 'closed' or 'zero' at the given parameters."""
        vals = self.bind(values)
        if not self.admits_J(vals):
            return "no"
        spec = self.dpsi
        if isinstance(spec, dict):
            for cond, flag in spec.items():
                if _pred(cond, vals):
                    return _flag(flag)
            return "no"
        return _flag(spec)

    def structures_at(self, values=None, roles=None):
        vals = self.bind(values)
        return [s for s in self.structures
                if (roles is None or s.role in roles) and s.applies(vals)]

    def display_name(self, values=None):
        if not values:
            return self.name
        return f"{self.name} [{_fmt_vals(values)}]"


def _flag(x):
    if x is False or x in ("no", "x", "×"):
        return "no"
    if x is True or x in ("closed", "yes", "✓"):
        return "closed"
    if x in ("zero", "✓✓"):
        return "zero"
    raise ValueError(f"unknown dpsi flag {x!r}")


def _fmt_vals(values):
    return ", ".join(f"{k}={v}" for k, v in values.items())


def _entry_from_doc(doc, table):
    structures = [StoredJ(role=s.get("role", "complex"),
                          images={str(k): str(v) for k, v in s["J"].items()},
                          when=s.get("when", True), psi=s.get("psi"),
                          note=s.get("note", ""))
                  for s in doc.get("structures", [])]
    return CatalogEntry(
        name=doc["name"], table=table, nil=doc["nil"], equations=doc["equations"],
        params=list(doc.get("params", [])), domain=doc.get("domain", "True"),
        samples=list(doc.get("samples", [])), extra_points=list(doc.get("extra_points", [])),
        J=doc.get("J", False), dpsi=doc.get("dpsi", False), structures=structures,
        aliases=list(doc.get("aliases", [])))


# -- the catalog ----------------------------------------------------------------------------

@dataclass
class Alias:
    label: str           # e.g. "g_2^alpha"
    target: str          # entry name
    values: dict         # parameter binding (may reference alias parameters)
    params: list
    samples: list
    J: dict | None
    note: str = ""

    def points(self):
        return self.samples or [{}]


class Catalog:
    def __init__(self, root=None):
        self.root = Path(root) if root else catalog_dir()
        self.entries = []
        self._index = {}
        self._family = {}
        for path in sorted((self.root / "tables").glob("table*.yaml")):
            doc = _load_yaml(path)
            _check_schema(doc, path)
            for raw in doc["entries"]:
                self._add(_entry_from_doc(raw, doc["table"]))
        self.aliases = {}
        alias_path = self.root / "aliases.yaml"
        if alias_path.exists():
            doc = _load_yaml(alias_path)
            _check_schema(doc, alias_path)
            for raw in doc["aliases"]:
                a = Alias(label=raw["label"], target=raw["target"],
                          values=dict(raw.get("values", {})), params=list(raw.get("params", [])),
                          samples=list(raw.get("samples", [])), J=raw.get("J"),
                          note=raw.get("note", ""))
                self.aliases[normalize_name(a.label)] = a
        self.sieve = []
        sieve_path = self.root / "sieve.yaml"
        if sieve_path.exists():
            doc = _load_yaml(sieve_path)
            _check_schema(doc, sieve_path)
            self.sieve = list(doc["algebras"])
        self.others = {}
        other_path = self.root / "nilpotent.yaml"
        if other_path.exists():
            doc = _load_yaml(other_path)
            _check_schema(doc, other_path)
            for raw in doc["algebras"]:
                self.others[normalize_name(raw["name"])] = raw

    def _add(self, entry):
        if entry.key in self._index:
            raise ValueError(f"duplicate catalog entry {entry.name}")
        self.entries.append(entry)
        self._index[entry.key] = entry
        self._family.setdefault(entry.family_key, []).append(entry)
        for extra in entry.aliases:
            self._index.setdefault(normalize_name(extra), entry)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def lookup(self, name):
        """Entry by display name, ASCII transliteration or family name."""
        key = normalize_name(name)
        if key in self._index:
            return self._index[key]
        fam = self._family.get(normalize_name(_strip_superscripts(name)))
        if fam is None:
            fam = self._family.get(key)
        if fam and len(fam) == 1:
            return fam[0]
        if fam:
            raise UnknownNameError(f"{name!r} is ambiguous: " + ", ".join(e.name for e in fam))
        raise UnknownNameError(f"no catalog entry named {name!r}")

    def get(self, name, **params):
        """(LieAlgebra, CatalogEntry), validating the parameter domain."""
        key = normalize_name(name)
        if key in self.aliases:
            alias = self.aliases[key]
            entry = self.lookup(alias.target)
            vals = self.alias_values(alias, params)
            return entry.algebra(vals), entry
        if key in self.others:
            raw = self.others[key]
            if params:
                raise DomainError(f"{raw['name']} has no parameters")
            return parse_structure_equations(raw["equations"], name=raw["name"]), None
        entry = self.lookup(name)
        return entry.algebra(params), entry

    def alias_values(self, alias, params=None):
        env = {k: to_fraction(v) for k, v in (params or {}).items()}
        missing = [p for p in alias.params if p not in env]
        if missing:
            raise DomainError(f"{alias.label}: missing parameters {missing}")
        return {k: Fraction(evaluate(str(v), env)) for k, v in alias.values.items()}

    def alias_structure(self, alias):
        return StoredJ(role="alias", images={str(k): str(v) for k, v in alias.J.items()},
                       psi="0") if alias.J else None

    def other_algebra(self, name):
        raw = self.others[normalize_name(name)]
        return parse_structure_equations(raw["equations"], name=raw["name"])

    def names(self):
        return [e.name for e in self.entries]


def _load_yaml(path):
    with open(path, encoding="utf-8") as fh:
        return yaml.safe_load(fh)


def _check_schema(doc, path):
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"{path}: expected schema {SCHEMA_VERSION}")


@lru_cache(maxsize=4)
def _cached(root):
    return Catalog(root)


def load_catalog(root=None):
    return _cached(str(Path(root) if root else catalog_dir()))


def get(name, **params):
    return load_catalog().get(name, **params)


def load_chains(root=None):
    """Stored obstruction chains, bound to their catalog algebras."""
    from ..genpoly import parse_chain
    cat = load_catalog(root)
    chains = []
    for path in sorted((cat.root / "chains").glob("*.yaml")):
        doc = _load_yaml(path)
        _check_schema(doc, path)
        L, _ = cat.get(doc["algebra"], **{k: v for k, v in (doc.get("params") or {}).items()})
        chain = parse_chain(doc, L)
        chain.kind = doc.get("kind", "")
        chain.source = path.name
        chains.append(chain)
    return chains


def load_facts(root=None):
    """Betti-number and symplectic claims as plain dictionaries."""
    path = load_catalog(root).root / "facts.yaml"
    if not path.exists():
        return {"betti": [], "symplectic": []}
    doc = _load_yaml(path)
    _check_schema(doc, path)
    return {"betti": list(doc.get("betti", [])), "symplectic": list(doc.get("symplectic", []))}
