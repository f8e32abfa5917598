"""Whole-catalog verification.

``verify_all`` re-derives every stored claim (table columns, complex
structures, Koszul forms, trivializing forms, obstruction chains, lattice
certificates, presentations, Betti numbers, symplectic claims) and collects
the outcome as a flat list of checks.  Failures are report content, never
exceptions.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field


from ..cxstruct import dpsi_is_zero, invariant_top_form, is_integrable, koszul
from ..genpoly import replay
from ..liealg import (betti, ce_d, is_nilpotent, is_solvable, is_strongly_unimodular,
                      is_unimodular, jacobi_check, symplectic_exists)
from . import (NIL_SIGNATURES, load_catalog, load_chains, load_facts, nil_signature,
               parse_structure_equations)
from .cases import load_cases

__all__ = ["SCOPES", "Check", "Report", "verify_all"]

SCOPES = ("soundness", "complex", "koszul", "sigma", "tau", "chains", "lattice",
          "presentation", "betti", "symplectic")


@dataclass
class Check:
    scope: str
    subject: str
    check: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    checks: list = field(default_factory=list)
    scopes: tuple = SCOPES

    def add(self, scope, subject, check, passed, detail=""):
        self.checks.append(Check(scope, subject, check, bool(passed), str(detail)))

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self):
        return not self.failures

    def sorted(self):
        order = {s: i for i, s in enumerate(SCOPES)}
        return sorted(self.checks, key=lambda c: (order.get(c.scope, 99), c.subject, c.check))

    def to_dict(self):
        return {"schema": 1, "passed": self.passed, "scopes": list(self.scopes),
                "total": len(self.checks), "failures": len(self.failures),
                "checks": [asdict(c) for c in self.sorted()]}

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    def to_text(self, verbose=False):
        lines = []
        counts = {}
        for c in self.checks:
            ok, total = counts.get(c.scope, (0, 0))
            counts[c.scope] = (ok + c.passed, total + 1)
        for scope in SCOPES:
            if scope in counts:
                ok, total = counts[scope]
                lines.append(f"{scope:<13} {ok:>4}/{total:<4} {'ok' if ok == total else 'FAIL'}")
        shown = self.sorted() if verbose else [c for c in self.sorted() if not c.passed]
        for c in shown:
            mark = "PASS" if c.passed else "FAIL"
            tail = f"  ({c.detail})" if c.detail and not c.passed else ""
            lines.append(f"{mark} [{c.scope}] {c.subject}: {c.check}{tail}")
        lines.append(f"{len(self.checks) - len(self.failures)}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def _guard(report, scope, subject, check, fn):
    """Run fn() -> (passed, detail); exceptions become failures."""
    try:
        out = fn()
        passed, detail = out if isinstance(out, tuple) else (out, "")
    except Exception as exc:  # report content, not a crash
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    report.add(scope, subject, check, passed, detail)
    return passed


def _psi_str(psi):
    return "(" + ", ".join(str(x) for x in psi) + ")"


# -- scopes ------------------------------------------------------------------

def _soundness(report, cat):
    for entry in cat:
        for vals in entry.points():
            subj = entry.display_name(vals)
            L = entry.algebra(vals, check=False)
            def jacobi(L=L):
                bad = jacobi_check(L)
                return not bad, f"residuals {bad[:3]}"
            _guard(report, "soundness", subj, "jacobi", jacobi)
            _guard(report, "soundness", subj, "solvable", lambda: is_solvable(L))
            _guard(report, "soundness", subj, "non-nilpotent", lambda: not is_nilpotent(L))
            _guard(report, "soundness", subj, "strongly unimodular",
                   lambda: is_strongly_unimodular(L))

            def nil():
                got = nil_signature(L)
                want = NIL_SIGNATURES[entry.nil]
                return got == want, f"computed {got}, table {entry.nil} = {want}"
            _guard(report, "soundness", subj, f"nilradical {entry.nil}", nil)
    for raw in cat.sieve:
        def sieve(raw=raw):
            L = parse_structure_equations(raw["equations"])
            got = (is_unimodular(L), is_strongly_unimodular(L))
            want = (raw["unimodular"], raw["strongly_unimodular"])
            return (not jacobi_check(L) and got == want,
                    f"unimodular, strongly unimodular = {got}, expected {want}")
        _guard(report, "soundness", raw["equations"], "sieve classification", sieve)


def _stored_pairs(cat):
    """(subject, L, J, StoredJ, entry, values) for every stored structure."""
    for entry in cat:
        for vals in entry.points():
            L = entry.algebra(vals, check=False)
            for s in entry.structures_at(vals):
                yield (f"{entry.display_name(vals)} {{{s.describe()}}}", L, s, entry, vals)
    for alias in cat.aliases.values():
        s = cat.alias_structure(alias)
        if s is None:
            continue
        entry = cat.lookup(alias.target)
        for p in alias.points():
            vals = cat.alias_values(alias, p)
            L = entry.algebra(vals, check=False)
            label = alias.label + (" [" + ", ".join(f"{k}={v}" for k, v in p.items()) + "]"
                                   if p else "")
            yield (f"{label} = {entry.display_name(vals)} {{{s.describe()}}}", L, s, entry, vals)


def _complex(report, cat):
    for subj, L, s, entry, vals in _stored_pairs(cat):
        def integrable():
            J = s.matrix(6, vals)
            sq = J.J.dot(J.J)
            ok = all(sq[i, j] == (-1 if i == j else 0) for i in range(6) for j in range(6))
            return ok and is_integrable(L, J), "J^2 = -I and N_J = 0"
        _guard(report, "complex", subj, "integrable", integrable)
    for entry in cat:
        for vals in entry.points():
            if entry.admits_J(vals):
                _guard(report, "complex", entry.display_name(vals), "J column has a witness",
                       lambda: bool(entry.structures_at(vals)))


def _koszul(report, cat):
    for subj, L, s, entry, vals in _stored_pairs(cat):
        if s.psi is None:
            continue

        def psi_match():
            psi = list(koszul(L, s.matrix(6, vals)))
            opts = [list(o) for o in s.psi_options(6, vals)]
            return psi in opts, f"computed {_psi_str(psi)}, listed {s.psi}"
        _guard(report, "koszul", subj, "psi matches the listed options", psi_match)
    for entry in cat:
        for vals in entry.points():
            flag = entry.dpsi_flag(vals)
            if flag == "no" and not entry.admits_J(vals):
                continue
            subj = entry.display_name(vals)
            L = entry.algebra(vals, check=False)
            stored = entry.structures_at(vals)

            def flag_check():
                closed = [dpsi_is_zero(L, s.matrix(6, vals)) for s in stored]
                zero = [all(x == 0 for x in koszul(L, s.matrix(6, vals))) for s in stored]
                if flag == "zero":
                    return any(zero), "needs a stored J with psi = 0"
                if flag == "closed":
                    return any(closed), "needs a stored J with d(psi) = 0"
                return not any(closed), "a stored J has d(psi) = 0 on a x-flagged entry"
            _guard(report, "koszul", subj, f"d(psi) flag '{flag}'", flag_check)


def _sigma(report, cat):
    for subj, L, s, entry, vals in _stored_pairs(cat):
        def sigma_closed():
            J = s.matrix(6, vals)
            if any(x != 0 for x in koszul(L, J)):
                return None
            return ce_d(L, invariant_top_form(L, J)).is_zero(), "d(sigma) != 0"
        try:
            J = s.matrix(6, vals)
            psi_zero = all(x == 0 for x in koszul(L, J))
        except Exception:
            continue
        if psi_zero:
            _guard(report, "sigma", subj, "d(sigma) = 0", sigma_closed)


def _tau(report, cases):
    for case in cases.values():
        if case.frame:
            _guard(report, "tau", case.name, "frame restates J",
                   lambda: (not case.frame_problems(), "; ".join(case.frame_problems())))
        if not case.tau:
            continue

        def tau():
            cert, want = case.tau_check()
            ok = cert.closed and abs(cert.exponent) == want
            return ok, f"closed={cert.closed}, |c/2|={abs(cert.exponent)}, expected {want}"
        _guard(report, "tau", case.name, "tau closed with |c/2| as stated", tau)


def _chains(report, root):
    for chain in load_chains(root):
        def run(chain=chain):
            ok, results = replay(chain)
            bad = [f"step {r.index}: {r.step.lhs} -> {r.computed} (expected {r.expected})"
                   for r in results if not r.passed]
            return ok, "; ".join(bad)
        _guard(report, "chains", chain.name, "replay", run)


def _lattice(report, cases):
    for case in cases.values():
        for label, m in case.all_certificates():
            def cert(label=label, m=m):
                r = case.certify(label, m)
                return r.passed, "; ".join(r.problems)
            tag = label + (f", m={m}" if m is not None else "")
            _guard(report, "lattice", case.name, f"Yamada certificate [{tag}]", cert)


def _presentation(report, cases):
    for case in cases.values():
        if not case.presentation:
            continue

        def pres():
            out = case.presentation_report()
            bad = [i for i, ok in out["relations"] if not ok]
            ok = (not bad and out["torsion"] == out["expected_torsion"]
                  and out["free_rank"] == out["expected_free_rank"])
            return ok, (f"failing relations {bad}; torsion {out['torsion']}, "
                        f"free rank {out['free_rank']}")
        _guard(report, "presentation", case.name, "relations and abelianization", pres)


def _facts_algebra(cat, raw):
    return cat.get(raw["algebra"], **dict(raw.get("params") or {}))[0]


def _betti(report, cat, facts):
    for raw in facts["betti"]:
        subj = raw["algebra"] + (f" {raw['params']}" if raw.get("params") else "")

        def b(raw=raw):
            got = betti(_facts_algebra(cat, raw), raw["k"])
            return got == raw["value"], f"computed {got}, expected {raw['value']}"
        _guard(report, "betti", subj, f"b{raw['k']} = {raw['value']}", b)


def _symplectic(report, cat, facts):
    for raw in facts["symplectic"]:
        def s(raw=raw):
            L = _facts_algebra(cat, raw)
            exists, witness = symplectic_exists(L)
            if exists:
                cube = witness.wedge(witness).wedge(witness)
                closed = ce_d(L, witness).is_zero()
                exists = exists and closed and not cube.is_zero()
            return exists == raw["exists"], f"computed {exists}"
        _guard(report, "symplectic", raw["algebra"],
               "symplectic" if raw["exists"] else "no symplectic form", s)


def verify_all(scope=None, root=None):
    """Run the requested scopes (default: all) against the catalog at ``root``."""
    scopes = tuple(SCOPES if not scope else
                   [s.strip() for s in (scope.split(",") if isinstance(scope, str) else scope)])
    unknown = [s for s in scopes if s not in SCOPES]
    if unknown:
        raise ValueError(f"unknown scope(s) {unknown}; choose from {', '.join(SCOPES)}")
    cat = load_catalog(root)
    report = Report(scopes=scopes)
    cases = load_cases(root) if {"tau", "lattice", "presentation"} & set(scopes) else {}
    facts = load_facts(root) if {"betti", "symplectic"} & set(scopes) else {}
    runners = {
        "soundness": lambda: _soundness(report, cat),
        "complex": lambda: _complex(report, cat),
        "koszul": lambda: _koszul(report, cat),
        "sigma": lambda: _sigma(report, cat),
        "tau": lambda: _tau(report, cases),
        "chains": lambda: _chains(report, root),
        "lattice": lambda: _lattice(report, cases),
        "presentation": lambda: _presentation(report, cases),
        "betti": lambda: _betti(report, cat, facts),
        "symplectic": lambda: _symplectic(report, cat, facts),
    }
    for s in SCOPES:
        if s in scopes:
            runners[s]()
    return report
