"""Worked lattice cases: one-parameter subgroups, Yamada data, tau exponents
and (where available) lattice presentations.

Each case document under ``data/cases/`` names a catalog entry, a complex
structure, the block decomposition of ad e0 on the nilradical and one or more
lattices given by a rational basis and integer matrices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from ..cxstruct import AlmostComplexStructure, tau_certificate
from ..exactmath import quad_unit
from ..lattice import (Block, EvalPoint, GroupPresentation, LatticeCertificate,
                       OneParamSubgroup, SemidirectGroup, abelianization,
                       parse_vector, phi_eval, restricted_algebra, yamada_certify)
from ..polys import evaluate, var
from . import (UnknownNameError, _check_schema, _load_yaml, catalog_dir,
               load_catalog, normalize_name, parse_vector_expr, to_fraction)

__all__ = ["LatticeCase", "LatticeSpec", "load_cases", "get_case"]


def _bind_params(raw):
    """Parameter bindings: rationals, or expressions in symbolic parameters."""
    out = {}
    for k, v in (raw or {}).items():
        s = str(v).strip()
        try:
            out[k] = to_fraction(s)
        except (ValueError, ZeroDivisionError):
            out[k] = evaluate(s, {name: var(name) for name in _names_in(s)})
    return out


def _names_in(text):
    return set(re.findall(r"[A-Za-z_]\w*", text))


def _blocks(raw):
    out = []
    for b in raw:
        blk = Block(kind=b["kind"], rate=to_fraction(b.get("rate", 0)),
                    scale=str(b.get("scale", "0")))
        out.extend([blk] * int(b.get("repeat", 1)))
    return out


def _nilpotent(raw, n):
    N = np.array([[Fraction(0)] * n for _ in range(n)], dtype=object)
    for key, val in (raw or {}).items():
        i, j = (int(x) for x in str(key).split(","))
        N[i - 1, j - 1] = to_fraction(val)
    return N


@dataclass
class LatticeSpec:
    label: str
    basis: list                      # vector expressions (pi, u allowed)
    generators: list                 # dicts: subgroup, t, bindings, expected
    m: list = field(default_factory=list)
    note: str = ""

    def uses_unit(self):
        return bool(self.m)


@dataclass
class LatticeCase:
    name: str
    entry: str
    params: dict
    symbolic: list
    J: dict
    frame: list | None
    J_frame: dict | None
    tau: dict | None
    subgroups: dict                  # label -> raw dict
    lattices: list
    presentation: dict | None = None
    note: str = ""

    @property
    def key(self):
        return normalize_name(self.name)

    # -- algebra and structures ----------------------------------------------

    def catalog_entry(self):
        return load_catalog().lookup(self.entry)

    def algebra(self, values=None):
        """The algebra with the case bindings (symbolic parameters stay free)."""
        vals = dict(self.params)
        vals.update(values or {})
        return self.catalog_entry().algebra(vals, symbolic=True)

    def complex_structure(self, n=6, values=None):
        pairs = [(parse_vector_expr(k, n, values), parse_vector_expr(v, n, values))
                 for k, v in self.J.items()]
        return AlmostComplexStructure.from_images(n, pairs)

    def frame_vectors(self):
        return [parse_vector_expr(v, 6) for v in self.frame] if self.frame else None

    def frame_problems(self):
        """The restated J in the frame must agree with J on the defining basis."""
        if not self.frame:
            return []
        F = self.frame_vectors()
        J = self.complex_structure().J
        fv = {f"f{i + 1}": np.array(v, dtype=object) for i, v in enumerate(F)}
        problems = []
        for src, dst in (self.J_frame or {}).items():
            lhs = J.dot(fv[src])
            rhs = np.array(parse_vector_expr(dst.replace("f", "e"), 6), dtype=object)
            rhs = sum((rhs[i] * fv[f"f{i + 1}"] for i in range(6)), np.zeros(6, dtype=object))
            if any(a != b for a, b in zip(lhs, rhs)):
                problems.append(f"J {src} = {dst} does not hold in the frame")
        return problems

    # -- subgroups and lattices ------------------------------------------------

    def subgroup(self, label):
        raw = self.subgroups[label]
        basis = [parse_vector_expr(v, 6) for v in raw["basis"]]
        return OneParamSubgroup(e0=parse_vector_expr(raw["e0"], 6), basis=basis,
                                blocks=_blocks(raw["blocks"]),
                                N=_nilpotent(raw.get("N"), len(basis)))

    def lattice(self, label):
        for spec in self.lattices:
            if spec.label == label:
                return spec
        raise KeyError(f"{self.name}: no lattice labelled {label!r}")

    def _eval_env(self, m):
        env = {}
        if m is not None:
            env = {"m": Fraction(m), "u": quad_unit(m)}
        return env

    def eval_point(self, gen, m=None):
        env = self._eval_env(m)
        bindings = {k: evaluate(str(v), env) for k, v in (gen.get("bindings") or {}).items()}
        return EvalPoint(to_fraction(gen["t"]), bindings)

    def expected_matrix(self, gen, m=None):
        if gen.get("expected") is None:
            return None
        env = self._eval_env(m)
        return [[evaluate(str(x), env) for x in row] for row in gen["expected"]]

    def certificate(self, label, m=None, expected_override=None):
        spec = self.lattice(label)
        if spec.uses_unit() and m is None:
            m = spec.m[0]
        unit = quad_unit(m) if m is not None else None
        gens = []
        for i, gen in enumerate(spec.generators):
            p = self.subgroup(gen["subgroup"])
            exp = self.expected_matrix(gen, m)
            if expected_override is not None and i in expected_override:
                exp = expected_override[i]
            gens.append((p, self.eval_point(gen, m), exp))
        basis = [parse_vector(v, 6, unit) for v in spec.basis]
        title = f"{self.name} [{spec.label}" + (f", m={m}]" if m is not None else "]")
        return LatticeCertificate(name=title, algebra=self.algebra(), generators=gens,
                                  basis=basis)

    def certify(self, label, m=None, expected_override=None):
        return yamada_certify(self.certificate(label, m, expected_override))

    def all_certificates(self):
        """(label, m) pairs covering every stored lattice and every listed m."""
        out = []
        for spec in self.lattices:
            for m in (spec.m or [None]):
                out.append((spec.label, m))
        return out

    # -- tau ------------------------------------------------------------------

    def tau_values(self):
        vals = dict(self.params)
        vals.update(_bind_params((self.tau or {}).get("at")))
        return vals

    def tau_check(self):
        """(certificate, expected |c/2|) at the case's tau parameters."""
        vals = self.tau_values()
        entry = self.catalog_entry()
        free = {k: v for k, v in vals.items() if k in entry.params}
        for k, v in list(free.items()):
            if not isinstance(v, Fraction):
                free[k] = Fraction(evaluate(str(v), {a: b for a, b in free.items()
                                                     if isinstance(b, Fraction)}))
        L = entry.algebra(free, check=False)
        J = self.complex_structure(values=free)
        e0 = parse_vector_expr(self.tau["e0"], 6, free)
        cert = tau_certificate(L, J, e0=e0)
        expected = Fraction(evaluate(str(self.tau["exponent"]), dict(free)))
        return cert, expected

    # -- presentation -----------------------------------------------------------

    def presentation_group(self):
        """(GroupPresentation, SemidirectGroup, images) for the stored presentation."""
        raw = self.presentation
        spec = self.lattice(raw["lattice"])
        gen = spec.generators[0]
        p = self.subgroup(gen["subgroup"])
        nL = restricted_algebra(self.algebra(), p.basis)
        A = self.expected_matrix(gen)
        if A is None:
            A = [[x.constant() for x in row] for row in phi_eval(p, self.eval_point(gen))]
        group = SemidirectGroup(nL, A)
        pres = GroupPresentation(raw["generators"], raw["relations"])
        images = {}
        for g, text in raw["images"].items():
            text = str(text).strip()
            if text == "shift":
                images[g] = (1, group.identity()[1])
            else:
                v = parse_vector_expr(text, nL.dim)
                images[g] = (0, np.array(v, dtype=object))
        return pres, group, images

    def presentation_report(self):
        pres, group, images = self.presentation_group()
        checks = pres.check_relations(group, images)
        factors, torsion, free = abelianization(pres)
        return {"relations": checks, "torsion": torsion, "free_rank": free,
                "expected_torsion": list(self.presentation.get("torsion", [])),
                "expected_free_rank": self.presentation.get("free_rank")}


def _case_from_doc(doc):
    lattices = [LatticeSpec(label=str(raw["label"]), basis=[str(v) for v in raw["basis"]],
                            generators=list(raw["generators"]), m=list(raw.get("m", [])),
                            note=raw.get("note", ""))
                for raw in doc.get("lattices", [])]
    return LatticeCase(
        name=doc["name"], entry=doc["entry"], params=_bind_params(doc.get("params")),
        symbolic=list(doc.get("symbolic", [])),
        J={str(k): str(v) for k, v in doc["J"].items()},
        frame=[str(v) for v in doc["frame"]] if doc.get("frame") else None,
        J_frame={str(k): str(v) for k, v in doc["J_frame"].items()} if doc.get("J_frame") else None,
        tau=doc.get("tau"), subgroups=dict(doc.get("subgroups", {})), lattices=lattices,
        presentation=doc.get("presentation"), note=doc.get("note", ""))


@lru_cache(maxsize=4)
def _cached_cases(root):
    cases = {}
    for path in sorted(Path(root).joinpath("cases").glob("*.yaml")):
        doc = _load_yaml(path)
        _check_schema(doc, path)
        case = _case_from_doc(doc)
        if case.key in cases:
            raise ValueError(f"duplicate case {case.name}")
        cases[case.key] = case
    return cases


def load_cases(root=None):
    return _cached_cases(str(Path(root) if root else catalog_dir()))


def get_case(name, root=None):
    """Case by name ("S_{6,165}", "s_6_165", ...); family names match too."""
    cases = load_cases(root)
    key = normalize_name(name)
    if key in cases:
        return cases[key]
    hits = [c for k, c in cases.items() if k.startswith(key + "_") or
            normalize_name(c.entry) == key]
    if len(hits) == 1:
        return hits[0]
    if hits:
        raise UnknownNameError(f"{name!r} is ambiguous: " + ", ".join(c.name for c in hits))
    raise UnknownNameError(f"no lattice case named {name!r}")
