"""Command-line front end.

    solvcx catalog-verify [--scope koszul,lattice] [--json]
    solvcx info 's_{6,17}' --params a=1,b=-1/2,c=-1/3
    solvcx check-j s_6_147_0
    solvcx yamada S_6_165 --m 3

Exit status: 0 when every requested check passes, 1 when some check fails,
2 for usage errors and unknown names.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from .catalog import (DomainError, UnknownNameError, load_catalog, load_chains,
                      normalize_name, parse_vector_expr, to_fraction)
from .catalog.cases import get_case, load_cases
from .catalog.verify import SCOPES, verify_all
from .cxstruct import NotComplexError, dpsi_is_zero, is_integrable, koszul
from .genpoly import printed_variant, replay
from .lattice import ClassTooLargeError, bch_product, restricted_algebra
from .liealg import betti, is_nilpotent, symplectic_exists
from .polys import ExpressionError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- helpers --------------------------------------------------------------------

def parse_params(text):
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise UsageError(f"bad --params item {item!r}; expected name=value")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = to_fraction(v.strip())
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise UsageError(f"bad value for {k.strip()}: {exc}") from None
    return out


def _covector(psi):
    terms = []
    for i, c in enumerate(psi):
        if c == 0:
            continue
        if c == 1:
            terms.append(f"e^{i + 1}")
        elif c == -1:
            terms.append(f"-e^{i + 1}")
        else:
            terms.append(f"{c}e^{i + 1}")
    return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def format_blocks(M):
    """Split an integer matrix into diagonal blocks: "(1) ⊕ [[0,-1],[1,-3]]"."""
    M = np.asarray(M, dtype=object)
    n = M.shape[0]
    parts = []
    start = 0
    while start < n:
        end = start + 1
        while any(M[i, j] != 0 for i in range(start, end) for j in range(end, n)) or \
                any(M[i, j] != 0 for i in range(end, n) for j in range(start, end)):
            end += 1
        blk = M[start:end, start:end]
        if blk.shape == (1, 1):
            parts.append(f"({blk[0, 0]})")
        else:
            parts.append("[" + ",".join("[" + ",".join(str(x) for x in row) + "]"
                                        for row in blk) + "]")
        start = end
    return " ⊕ ".join(parts)


def _emit(args, payload, text_lines):
    if args.json:
        print(json.dumps(payload, indent=2, ensure_ascii=False, default=str))
    else:
        print("\n".join(text_lines))


def _algebra(name, params):
    """(LieAlgebra, entry or None, display name) for catalog, alias or nilpotent names."""
    cat = load_catalog()
    L, entry = cat.get(name, **params)
    key = normalize_name(name)
    if key in cat.aliases:
        a = cat.aliases[key]
        vals = cat.alias_values(a, params)
        return L, entry, f"{a.label} = {entry.display_name(vals)}", vals
    if entry is None:
        return L, None, L.name, {}
    return L, entry, entry.display_name(params), params


def _structures(name, params):
    """Stored complex structures that apply to the named algebra."""
    cat = load_catalog()
    L, entry, label, vals = _algebra(name, params)
    out = []
    if entry is not None:
        out.extend(entry.structures_at(vals))
        for a in cat.aliases.values():
            if a.J and cat.lookup(a.target) is entry and not a.params:
                if cat.alias_values(a) == {k: Fraction(v) for k, v in vals.items()}:
                    out.append(cat.alias_structure(a))
    seen, unique = set(), []
    for s in out:
        key = tuple(sorted(s.images.items()))
        if key not in seen:
            seen.add(key)
            unique.append(s)
    return L, entry, label, vals, unique


# -- verbs ----------------------------------------------------------------------

def cmd_catalog_verify(args):
    report = verify_all(args.scope)
    if args.json:
        print(report.to_json())
    else:
        print(report.to_text(verbose=args.verbose))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_report(args):
    report = verify_all(args.scope)
    if args.json:
        print(report.to_json())
    else:
        print(report.to_text(verbose=True))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_info(args):
    params = parse_params(args.params)
    cat = load_catalog()
    L, entry, label, vals = _algebra(args.name, params)
    payload = {"name": label, "dim": L.dim}
    lines = [label]
    if entry is not None:
        payload.update(table=entry.table, params=entry.params, domain=entry.domain,
                       equations=entry.equations, nil=entry.nil)
        lines += [f"  table        {entry.table}",
                  f"  equations    {entry.equations}",
                  f"  parameters   {', '.join(entry.params) or '-'}",
                  f"  domain       {entry.domain}",
                  f"  nilradical   {entry.nil}"]
        if not entry.params or vals:
            flag = entry.dpsi_flag(vals)
            payload.update(admits_J=entry.admits_J(vals), dpsi=flag)
            lines += [f"  admits J     {entry.admits_J(vals)}",
                      f"  d(psi) = 0   {flag}"]
            for s in entry.structures_at(vals):
                lines.append(f"  J [{s.role}]   {s.describe()}" + (f"  psi = {s.psi}" if s.psi else ""))
        aliases = [a.label for a in cat.aliases.values() if cat.lookup(a.target) is entry]
        if aliases:
            payload["aliases"] = aliases
            lines.append(f"  also known as {', '.join(aliases)}")
        cases = [c.name for c in load_cases().values() if c.catalog_entry() is entry]
        if cases:
            payload["cases"] = cases
            lines.append(f"  lattice case {', '.join(cases)}")
    else:
        lines.append(f"  dim {L.dim}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_check_j(args):
    params = parse_params(args.params)
    L, entry, label, vals, stored = _structures(args.name, params)
    if args.J:
        from .catalog import StoredJ
        images = dict(item.split(":", 1) for item in args.J.split(","))
        stored = [StoredJ("given", {k.strip(): v.strip() for k, v in images.items()})]
    if not stored:
        print(f"{label}: no stored complex structure", file=sys.stderr)
        return EXIT_FAIL
    ok_all = True
    rows = []
    lines = [label]
    for s in stored:
        try:
            J = s.matrix(L.dim, vals)
            ok = is_integrable(L, J)
            psi = koszul(L, J)
            row = {"J": s.describe(), "role": s.role, "integrable": ok,
                   "psi": _covector(psi), "dpsi_zero": dpsi_is_zero(L, J)}
        except NotComplexError as exc:
            ok, row = False, {"J": s.describe(), "role": s.role, "integrable": False,
                              "error": str(exc)}
        ok_all &= ok
        rows.append(row)
        lines.append(f"  {'PASS' if ok else 'FAIL'} {row['J']}: "
                     + (f"psi = {row['psi']}" if "psi" in row else row.get("error", "")))
    _emit(args, {"name": label, "passed": ok_all, "structures": rows}, lines)
    return EXIT_OK if ok_all else EXIT_FAIL


def cmd_koszul(args):
    params = parse_params(args.params)
    L, entry, label, vals, stored = _structures(args.name, params)
    ok_all = True
    rows = []
    lines = [label]
    for s in stored:
        J = s.matrix(L.dim, vals)
        psi = list(koszul(L, J))
        opts = s.psi_options(L.dim, vals)
        ok = opts is None or psi in [list(o) for o in opts]
        ok_all &= ok
        rows.append({"J": s.describe(), "psi": _covector(psi), "listed": s.psi,
                     "dpsi_zero": dpsi_is_zero(L, J), "passed": ok})
        lines.append(f"  {'PASS' if ok else 'FAIL'} {s.describe()}: psi = {_covector(psi)}"
                     + (f" (listed {s.psi})" if s.psi else "")
                     + f", d(psi) = 0: {dpsi_is_zero(L, J)}")
    if entry is not None and (vals or not entry.params):
        lines.append(f"  table flag: {entry.dpsi_flag(vals)}")
    _emit(args, {"name": label, "passed": ok_all, "structures": rows}, lines)
    return EXIT_OK if ok_all else EXIT_FAIL


def cmd_cohomology(args):
    L, entry, label, _ = _algebra(args.name, parse_params(args.params))
    bs = [betti(L, k) for k in range(L.dim + 1)]
    _emit(args, {"name": label, "betti": bs},
          [label, "  " + "  ".join(f"b{k}={b}" for k, b in enumerate(bs))])
    return EXIT_OK


def cmd_symplectic(args):
    L, entry, label, _ = _algebra(args.name, parse_params(args.params))
    exists, witness = symplectic_exists(L)
    payload = {"name": label, "symplectic": exists}
    lines = [f"{label}: {'symplectic' if exists else 'no symplectic form'}"]
    if exists:
        terms = {"".join(str(i + 1) for i in k): str(v) for k, v in sorted(witness.coeffs.items())}
        payload["witness"] = terms
        lines.append("  omega = " + " + ".join(f"({v})e^{{{k}}}" for k, v in terms.items()))
    else:
        lines.append("  omega^3 vanishes identically on closed 2-forms")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_chains(args):
    chains = load_chains()
    if args.name:
        key = normalize_name(args.name)
        chains = [c for c in chains if normalize_name(c.name).startswith(key)
                  or key in normalize_name(c.name)]
        if not chains:
            raise UnknownNameError(f"no chain matching {args.name!r}")
    ok_all = True
    rows = []
    lines = []
    for chain in chains:
        if args.printed:
            chain = printed_variant(chain)
        ok, results = replay(chain)
        ok_all &= ok
        rows.append({"name": chain.name, "passed": ok,
                     "steps": [{"op": r.step.op, "lhs": r.step.lhs, "computed": r.computed,
                                "expected": r.expected, "passed": r.passed} for r in results]})
        lines.append(f"{'PASS' if ok else 'FAIL'} {chain.name}")
        for r in results:
            if r.step.op == "substitute":
                lines.append("    substitute " + ", ".join(f"{k} = {v}" for k, v in r.step.values.items()))
            else:
                lines.append(f"    {'ok ' if r.passed else 'BAD'} {r.step.lhs} = {r.computed}"
                             + ("" if r.passed else f"   (expected {r.expected})"))
    _emit(args, {"passed": ok_all, "chains": rows}, lines)
    return EXIT_OK if ok_all else EXIT_FAIL


def cmd_yamada(args):
    case = get_case(args.name)
    targets = case.all_certificates()
    if args.lattice:
        targets = [(l, m) for l, m in targets if l == args.lattice]
    if args.m is not None:
        spec_m = {l for l, m in targets if m is not None}
        if not spec_m:
            raise UsageError(f"{case.name} has no quadratic-unit lattice; drop --m")
        targets = sorted({(l, args.m) for l in spec_m})
    if not targets:
        print(f"{case.name}: no stored lattice certificate", file=sys.stderr)
        return EXIT_FAIL
    ok_all = True
    rows = []
    lines = []
    for label, m in targets:
        r = case.certify(label, m)
        ok_all &= r.passed
        mats = [format_blocks(M) if M is not None else None for M in r.matrices]
        rows.append({"name": r.name, "passed": r.passed, "matrices": mats,
                     "problems": r.problems})
        lines.append(r.summary())
        for M in mats:
            if M is not None:
                lines.append(f"    {M}")
    _emit(args, {"passed": ok_all, "certificates": rows}, lines)
    return EXIT_OK if ok_all else EXIT_FAIL


def _vector(text, n):
    text = text.strip()
    if "e" in text:
        return parse_vector_expr(text, n)
    vals = [to_fraction(x) for x in text.split(",")]
    if len(vals) != n:
        raise UsageError(f"vector {text!r} needs {n} entries")
    return vals


def cmd_bch(args):
    """BCH product in a nilpotent algebra, or in the nilradical of a lattice case."""
    try:
        L, entry, label, _ = _algebra(args.name, parse_params(args.params))
    except UnknownNameError:
        L = None
    if L is None or not is_nilpotent(L):
        case = get_case(args.name)
        if not case.lattices:
            raise UsageError(f"{case.name} has no stored nilradical basis")
        p = case.subgroup(case.lattices[0].generators[0]["subgroup"])
        L, label = restricted_algebra(case.algebra(), p.basis), f"nilradical of {case.name}"
    x, y = _vector(args.x, L.dim), _vector(args.y, L.dim)
    z = bch_product(L, x, y)
    _emit(args, {"name": label, "x": [str(v) for v in x], "y": [str(v) for v in y],
                 "product": [str(v) for v in z]},
          [f"{label}: x.y = ({', '.join(str(v) for v in z)})"])
    return EXIT_OK


def cmd_abelianization(args):
    case = get_case(args.name)
    if not case.presentation:
        print(f"{case.name}: no stored presentation", file=sys.stderr)
        return EXIT_FAIL
    out = case.presentation_report()
    bad = [i for i, ok in out["relations"] if not ok]
    ok = (not bad and out["torsion"] == out["expected_torsion"]
          and out["free_rank"] == out["expected_free_rank"])
    tors = " ⊕ ".join(f"Z_{t}" for t in out["torsion"])
    lines = [f"{'PASS' if ok else 'FAIL'} {case.name}",
             f"    relations checked against the group law: {len(out['relations']) - len(bad)}"
             f"/{len(out['relations'])}",
             f"    abelianization: {tors + ' ⊕ ' if tors else ''}Z^{out['free_rank']}",
             f"    b1 = {out['free_rank']}"]
    _emit(args, {"name": case.name, "passed": ok, "failing_relations": bad,
                 "torsion": out["torsion"], "free_rank": out["free_rank"]}, lines)
    return EXIT_OK if ok else EXIT_FAIL


# -- parser ---------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="solvcx", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="verb", metavar="verb")
    sub.required = True

    def add(name, fn, help_, target=True, params=True):
        sp = sub.add_parser(name, help=help_)
        if target == "optional":
            sp.add_argument("name", nargs="?", default=None)
        elif target:
            sp.add_argument("name")
        if params:
            sp.add_argument("--params", default="", help="k=v,... parameter bindings")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(fn=fn)
        return sp

    for name, fn, help_ in (("catalog-verify", cmd_catalog_verify, "verify the whole catalog"),
                            ("report", cmd_report, "full verification report")):
        sp = add(name, fn, help_, target=False, params=False)
        sp.add_argument("--scope", default=None,
                        help="comma-separated subset of: " + ",".join(SCOPES))
        sp.add_argument("--verbose", action="store_true")
    add("info", cmd_info, "show a catalog entry")
    sp = add("check-j", cmd_check_j, "integrability and psi of stored complex structures")
    sp.add_argument("--J", default=None, help="images, e.g. e1:e2,e3:e4,e5:e6")
    add("koszul", cmd_koszul, "Koszul forms against the listed options")
    add("cohomology", cmd_cohomology, "Betti numbers")
    add("symplectic", cmd_symplectic, "decide existence of a symplectic form")
    sp = add("chains", cmd_chains, "replay obstruction chains", target="optional", params=False)
    sp.add_argument("--printed", action="store_true", help="use the displayed (printed) forms")
    sp = add("yamada", cmd_yamada, "check lattice certificates", params=False)
    sp.add_argument("--m", type=int, default=None, help="quadratic unit parameter m >= 3")
    sp.add_argument("--lattice", default=None, help="lattice label, e.g. 't = pi'")
    sp = add("bch", cmd_bch, "BCH product in a nilpotent algebra")
    sp.add_argument("x")
    sp.add_argument("y")
    add("abelianization", cmd_abelianization, "abelianize a stored lattice presentation",
        params=False)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.fn(args)
    except (UsageError, UnknownNameError, DomainError, ExpressionError,
            ClassTooLargeError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"solvcx {args.verb}: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
