"""Acceptance criteria 1-10.  Everything is exact (tolerance 0).

Each criterion records one PASS/FAIL line; the lines are printed in the
"acceptance criteria" section at the end of a pytest run, and by
``python3 tests/test_acceptance.py``.
"""

import random
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from solvcx.catalog import NIL_SIGNATURES, get, load_catalog, load_chains, nil_signature
from solvcx.catalog.cases import get_case, load_cases
from solvcx.cxstruct import (AlmostComplexStructure, dpsi_is_zero, invariant_top_form,
                             is_integrable, koszul, nijenhuis, tau_certificate)
from solvcx.exactmath import inverse, is_zero_matrix, matrix
from solvcx.genpoly import generic_b, generic_koszul, generic_nijenhuis, printed_variant, replay
from solvcx.lattice import EvalPoint, bch_product, phi_eval
from solvcx.liealg import betti, ce_d, d_matrix, symplectic_exists
from solvcx.polys import MultiPoly, parse_poly, var

TITLES = {
    1: "catalog soundness",
    2: "complex-structure table",
    3: "Koszul table",
    4: "obstruction flags",
    5: "sigma/tau certificates",
    6: "symbolic replay, printed forms verbatim",
    7: "lattice certificates",
    8: "BCH product and presentation",
    9: "cohomology and symplectic facts",
    10: "property suites",
}
RESULTS = {}


@contextmanager
def criterion(n):
    try:
        yield
    except BaseException:
        RESULTS[n] = False
        raise
    RESULTS[n] = True


def summary_lines():
    out = []
    for n, title in TITLES.items():
        if n in RESULTS:
            out.append(f"criterion {n:>2} {'PASS' if RESULTS[n] else 'FAIL'}  {title}")
    return out


def _by_scope(report, scope):
    checks = [c for c in report.checks if c.scope == scope]
    assert checks, f"no {scope} checks ran"
    return checks


def _e(i, n=6):
    v = [Fraction(0)] * n
    v[i - 1] = Fraction(1)
    return np.array(v, dtype=object)


# -- 1 ---------------------------------------------------------------------------

def test_criterion_1_catalog_soundness(full_report):
    with criterion(1):
        cat = load_catalog()
        checks = _by_scope(full_report, "soundness")
        assert not [c for c in checks if not c.passed]
        names = {"jacobi", "solvable", "non-nilpotent", "strongly unimodular"}
        per_subject = {}
        for c in checks:
            per_subject.setdefault(c.subject, []).append(c.check)
        points = [e.display_name(v) for e in cat for v in e.points()]
        for p in points:
            for name in names | {"nilradical"}:
                assert any(c.startswith(name) for c in per_subject[p]), (p, name)
        for entry in cat:
            if entry.params:
                assert len(entry.samples) >= 3
        # two spot checks computed here
        L, entry = get("s_{6,154}^0")
        assert nil_signature(L) == NIL_SIGNATURES[entry.nil] == NIL_SIGNATURES["n52"]
        L, entry = get("s_{4,7} x R^2")
        assert nil_signature(L) == NIL_SIGNATURES[entry.nil]


# -- 2 ---------------------------------------------------------------------------

def test_criterion_2_complex_structures(full_report):
    with criterion(2):
        checks = _by_scope(full_report, "complex")
        assert all(c.passed for c in checks)
        assert sum(c.check == "integrable" for c in checks) >= 100
        cat = load_catalog()
        entry = cat.lookup("s_{6,216}")
        for alpha in (Fraction(-1), Fraction(-3, 2), Fraction(-1, 7)):
            vals = {"alpha": alpha}
            L = entry.algebra(vals)
            for s in entry.structures_at(vals):
                J = s.matrix(6, vals)
                assert is_zero_matrix(J.J.dot(J.J) + np.eye(6, dtype=int))
                assert is_integrable(L, J)


# -- 3 ---------------------------------------------------------------------------

def test_criterion_3_koszul_table(full_report):
    with criterion(3):
        assert all(c.passed for c in _by_scope(full_report, "koszul"))
        L, entry = get("s_{6,44}")
        (s,) = entry.structures_at()
        assert list(koszul(L, s.matrix(6))) in ([0] * 5 + [4], [0] * 5 + [-4])
        cat = load_catalog()
        entry = cat.lookup("s_{5,13}^{\\alpha,-\\alpha,\\gamma} x R")
        gamma = Fraction(1, 2)
        family = [[0, 0, 0, 0, x * 2 * (gamma + y), 0] for x in (1, -1) for y in (1, -1)]
        for alpha in (Fraction(0), Fraction(1), Fraction(5, 2)):
            vals = {"alpha": alpha, "gamma": gamma}
            L = entry.algebra(vals)
            for s in entry.structures_at(vals):
                assert list(koszul(L, s.matrix(6, vals))) in family
        # g_1 .. g_10: psi = 0 exactly
        for alias in cat.aliases.values():
            J = cat.alias_structure(alias)
            target = cat.lookup(alias.target)
            for p in alias.points():
                vals = cat.alias_values(alias, p)
                psi = koszul(target.algebra(vals, check=False), J.matrix(6, vals))
                assert not any(psi), (alias.label, p)
        L, _ = get("g_10")
        J = AlmostComplexStructure.from_images(6, [(_e(1), _e(2)), (_e(3), -_e(4)),
                                                   (_e(5), -2 * _e(6))])
        assert is_integrable(L, J) and not any(koszul(L, J))


# -- 4 ---------------------------------------------------------------------------

def test_criterion_4_obstruction_flags(full_report):
    with criterion(4):
        flags = [c for c in _by_scope(full_report, "koszul") if c.check.startswith("d(psi) flag")]
        assert flags and all(c.passed for c in flags)
        cat = load_catalog()
        seen = {"closed": 0, "zero": 0, "no": 0}
        for entry in cat:
            for vals in entry.points():
                flag = entry.dpsi_flag(vals)
                stored = entry.structures_at(vals)
                if not stored:
                    continue
                L = entry.algebra(vals, check=False)
                closed = [dpsi_is_zero(L, s.matrix(6, vals)) for s in stored]
                seen[flag] += 1
                if flag == "no":
                    assert not any(closed), entry.display_name(vals)
                else:
                    assert any(closed), entry.display_name(vals)
        assert all(seen.values())


# -- 5 ---------------------------------------------------------------------------

def test_criterion_5_sigma_tau(full_report):
    with criterion(5):
        assert all(c.passed for c in _by_scope(full_report, "sigma"))
        tau = _by_scope(full_report, "tau")
        assert all(c.passed for c in tau)
        cases = load_cases()
        assert sum(c.check.startswith("tau closed") for c in tau) == sum(
            1 for c in cases.values() if c.tau)
        for name, want in (("S_{5,8}^0 x R", 2), ("S_{6,25}", 1)):
            cert, expected = get_case(name).tau_check()
            assert cert.closed and abs(cert.exponent) == want == expected
        # (1 - beta) across the s_{6,226}^{0,beta,-1} family
        case = get_case("S_{6,226}")
        entry = case.catalog_entry()
        for beta in (Fraction(1, 2), Fraction(1, 3), Fraction(3, 4)):
            vals = {"beta": beta}
            L = entry.algebra(vals)
            cert = tau_certificate(L, case.complex_structure(values=vals), e0=_e(5))
            assert cert.closed and abs(cert.exponent) == 1 - beta
        # sigma is closed when psi = 0
        L, _ = get("g_10")
        J = AlmostComplexStructure.from_images(6, [(_e(1), _e(2)), (_e(3), -_e(4)),
                                                   (_e(5), -2 * _e(6))])
        assert ce_d(L, invariant_top_form(L, J)).is_zero()


# -- 6 ---------------------------------------------------------------------------

TERMINAL = {"s_{5,41}^{-1,-1} x R": ["3*a18*a33 + a36^2 + 1", "9*a2*(a22^2 + 1)"]}


def test_criterion_6_computed_chains_replay():
    """The chains replay step by step from the generic tables (computed forms)."""
    chains = load_chains()
    assert len(chains) == 3
    for chain in chains:
        ok, results = replay(chain)
        assert ok
    ok, results = replay(next(c for c in chains if c.kind == "complex"))
    rhs = [parse_poly(r.step.rhs) for r in results if r.step.op == "assert"]
    assert parse_poly("3*a18*a33 + a36^2 + 1") in rhs


@pytest.mark.xfail(strict=True, reason=(
    "three displayed forms do not hold: the N141 entry of the s_{4,3} chain "
    "(e3 for a3), the B66 entry of the s_{5,41} chain (missing +1) and the "
    "terminal identity 9a2(a22^2+1), which is a2(9a22^2+1)"))
def test_criterion_6_printed_chains_verbatim():
    with criterion(6):
        for chain in load_chains():
            ok, results = replay(printed_variant(chain))
            bad = [(r.step.lhs, r.computed, r.expected) for r in results if not r.passed]
            assert ok, (chain.name, bad)
        last = {}
        for chain in load_chains():
            if chain.kind == "complex":
                last = [s for s in printed_variant(chain).steps if s.op == "assert"]
        for want in TERMINAL["s_{5,41}^{-1,-1} x R"]:
            assert any(parse_poly(s.rhs) == parse_poly(want) for s in last)


# -- 7 ---------------------------------------------------------------------------

def _cert(name, label, m=None):
    r = get_case(name).certify(label, m)
    assert r.passed, r.problems
    return [M.tolist() for M in r.matrices]


def test_criterion_7_lattice_certificates(full_report):
    with criterion(7):
        lattice = _by_scope(full_report, "lattice")
        assert all(c.passed for c in lattice)
        expected_total = sum(len(c.all_certificates()) for c in load_cases().values())
        assert len(lattice) == expected_total
        I5 = np.eye(5, dtype=int).tolist()
        assert _cert("S_{3,3}^0 x R^3", "t = 2pi") == [I5]
        (M,) = _cert("S_{5,8}^0 x R", "t = 2pi")
        assert [row[:2] for row in M[:2]] == [[1, 1], [0, 1]]
        assert [row[2:4] for row in M[2:4]] == [[1, 1], [0, 1]]
        for m in (3, 4, 5):
            (M,) = _cert("S_{6,165}", "t = pi", m)
            block = [[0, -1], [1, -m]]
            assert M[0] == [1, 0, 0, 0, 0]
            assert [r[1:3] for r in M[1:3]] == block and [r[3:5] for r in M[3:5]] == block
            T, S = _cert("S_{6,228}", "t = pi, s = 2pi", m)
            assert T == (-np.eye(4, dtype=int)).tolist()
            assert S == [[0, -1, 0, 0], [1, m, 0, 0], [0, 0, 0, -1], [0, 0, 1, m]]
        (M,) = _cert("S_{6,154}^0", "t = pi")
        assert M == np.diag([-1, -1, 1, -1, -1]).tolist()
        for case in load_cases().values():
            for label, m in case.all_certificates():
                for M in case.certify(label, m).matrices:
                    assert abs(round(np.linalg.det(np.array(M, dtype=float)))) == 1


# -- 8 ---------------------------------------------------------------------------

DISPLAYED = [
    "(m4*n5^2 - m5*n4*n5 - m4*m5*n5 + m5^2*n4)/12 + (m3*n5 - m5*n3)/2",
    "(m4*n4*n5 - m5*n4^2 - m4^2*n5 + m4*m5*n4)/12 + (m3*n4 - m4*n3)/2",
    "(m4*n5 - m5*n4)/2",
    "0",
    "0",
]


def test_criterion_8_bch_and_presentation(full_report):
    with criterion(8):
        L, _ = get("n_{5,2}")
        m = np.array([var(f"m{i}") for i in range(1, 6)], dtype=object)
        n = np.array([var(f"n{i}") for i in range(1, 6)], dtype=object)
        z = bch_product(L, m, n)
        for i in range(5):
            assert MultiPoly.coerce(z[i] - m[i] - n[i]) == parse_poly(DISPLAYED[i])
        coeffs = {abs(c) for i in range(3) for c in MultiPoly.coerce(z[i]).terms.values()}
        assert Fraction(1, 12) in coeffs and Fraction(1, 2) in coeffs
        # the nilradical of s_{6,154}^0 in the lattice basis is this n_{5,2}
        case = get_case("S_{6,154}^0")
        pres, group, images = case.presentation_group()
        assert group.L.c.tolist() == L.c.tolist()
        # relations of Gamma_N: conjugation in N by BCH
        e = [_e(i, 5) for i in range(1, 6)]

        def conj(x, y):
            return bch_product(L, bch_product(L, -y, x), y)
        assert list(conj(e[2], e[3])) == list(bch_product(L, e[1], e[2]))
        assert list(conj(e[2], e[4])) == list(bch_product(L, e[0], e[2]))
        rhs = bch_product(L, bch_product(L, e[0] / 2, -e[1] / 2), bch_product(L, e[2], e[3]))
        assert list(conj(e[3], e[4])) == list(rhs)
        report = case.presentation_report()
        assert all(ok for _, ok in report["relations"]) and len(report["relations"]) == 8
        assert report["torsion"] == [2, 2, 2] and report["free_rank"] == 1
        assert all(c.passed for c in _by_scope(full_report, "presentation"))


# -- 9 ---------------------------------------------------------------------------

def test_criterion_9_cohomology_and_symplectic(full_report):
    with criterion(9):
        assert betti(get("g_10")[0], 2) == 2
        for name, params in (("g_1", {}), ("g_2^alpha", {"alpha": 0}),
                             ("g_2^alpha", {"alpha": 1}), ("g_3", {}), ("g_8", {}),
                             ("g_10", {})):
            assert betti(get(name, **params)[0], 1) == 2, (name, params)
        assert betti(get("s_{6,154}^0")[0], 1) == 1
        for name in ("R x n_{5,2}", "s_{6,154}^0"):
            exists, cubic = symplectic_exists(get(name)[0])
            assert not exists and cubic.is_zero()
        L = get("g_9")[0]
        exists, omega = symplectic_exists(L)
        assert exists and ce_d(L, omega).is_zero()
        assert not omega.wedge(omega).wedge(omega).is_zero()
        assert all(c.passed for c in _by_scope(full_report, "betti"))
        assert all(c.passed for c in _by_scope(full_report, "symplectic"))


# -- 10 --------------------------------------------------------------------------

def _sparse_product_is_zero(A, B):
    for i in range(A.shape[0]):
        row = [(k, a) for k, a in enumerate(A[i]) if a != 0]
        for j in range(B.shape[1]):
            if sum(a * B[k, j] for k, a in row) != 0:
                return False
    return True


def _conjugated_J(rng):
    J0 = AlmostComplexStructure.from_images(6, [(_e(1), _e(2)), (_e(3), _e(4)), (_e(5), _e(6))])
    lo = matrix([[rng.randint(-1, 1) if j < i else int(i == j) for j in range(6)]
                 for i in range(6)])
    up = matrix([[rng.randint(-1, 1) if j > i else int(i == j) for j in range(6)]
                 for i in range(6)])
    P = lo.dot(up)
    return AlmostComplexStructure(P.dot(J0.J).dot(inverse(P)))


def _point(J):
    return {f"a{6 * j + i + 1}": J[i, j] for i in range(6) for j in range(6)}


def test_criterion_10_property_suites(catalog_points):
    with criterion(10):
        rng = random.Random(10)
        B6 = generic_b(6)
        entries_seen = set()
        for label, L, entry, vals in catalog_points:
            # d o d = 0, Euler characteristic and Poincare duality
            for k in range(L.dim - 1):
                assert _sparse_product_is_zero(d_matrix(L, k + 1), d_matrix(L, k)), (label, k)
            b = [betti(L, k) for k in range(L.dim + 1)]
            assert b == b[::-1], label
            assert sum((-1) ** k * x for k, x in enumerate(b)) == 0, label
            if entry.name in entries_seen:
                continue
            entries_seen.add(entry.name)
            # Nijenhuis identities and generic-vs-concrete agreement, one point per entry
            J = _conjugated_J(rng)
            structures = [s.matrix(6, vals) for s in entry.structures_at(vals)] + [J]
            N, K = generic_nijenhuis(L), generic_koszul(L)
            for S in structures:
                x = np.array([Fraction(rng.randint(-3, 3)) for _ in range(6)], dtype=object)
                y = np.array([Fraction(rng.randint(-3, 3)) for _ in range(6)], dtype=object)
                Nxy = nijenhuis(L, S, x, y)
                assert list(Nxy) == list(-nijenhuis(L, S, y, x))
                assert list(nijenhuis(L, S, S(x), y)) == list(-S(Nxy))
                pt = _point(S.J)
                for (i, j, k), p in N.items():
                    assert p(**pt) == nijenhuis(L, S, L.basis(i - 1), L.basis(j - 1))[k - 1]
                psi = koszul(L, S)
                assert all(p(**pt) == psi[k - 1] for k, p in K.items())
                assert all(p(**pt) == 0 for p in B6.values())
        assert len(entries_seen) == len(load_catalog())
        # phi homomorphism and det 1 on every stored one-parameter subgroup
        for case in load_cases().values():
            for label, spec in ((s.label, s) for s in case.lattices):
                for gen in spec.generators:
                    p = case.subgroup(gen["subgroup"])
                    m = spec.m[0] if spec.m else None
                    one = case.eval_point(gen, m)
                    two = EvalPoint(2 * one.k, {k: v * v for k, v in one.bindings.items()})
                    A = phi_eval(p, one)
                    assert (A.dot(A) == phi_eval(p, two)).all(), (case.name, label)
                    r = case.certify(label, m)
                    assert all(round(np.linalg.det(np.array(M, dtype=float))) == 1
                               for M in r.matrices)
        # BCH associativity on 100 random integer triples
        L, _ = get("n_{5,2}")
        for _ in range(100):
            x, y, z = (np.array([Fraction(rng.randint(-5, 5)) for _ in range(5)], dtype=object)
                       for _ in range(3))
            assert list(bch_product(L, bch_product(L, x, y), z)) == \
                list(bch_product(L, x, bch_product(L, y, z)))


if __name__ == "__main__":
    import sys
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    print("\n".join(summary_lines()))
    sys.exit(code)
