import shutil
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from solvcx.catalog import (NIL_SIGNATURES, DomainError, StructureSyntaxError, UnknownNameError,
                            expand_pm, format_structure_equations, get, load_catalog,
                            load_chains, load_facts, nil_signature, normalize_name,
                            parse_covector, parse_structure_equations, parse_vector_expr)
from solvcx.catalog.cases import get_case, load_cases
from solvcx.liealg import LieAlgebra

from conftest import fractions


def test_names_normalize():
    assert normalize_name("s_{6,17}^{a,b,c,-(a+b+c+1)}") == "s_6_17_a_b_c_m_apbpcp1"
    assert normalize_name("S_6_17") == "s_6_17"
    cat = load_catalog()
    assert cat.lookup("s_{6,25}") is cat.lookup("S_6_25")
    assert cat.lookup("s_{6,216}").params == ["alpha"]


def test_catalog_size_and_tables(catalog):
    assert len(catalog) == 85
    assert sorted({e.table for e in catalog}) == [1, 2, 3, 4, 5, 6, 7]
    for entry in catalog:
        assert entry.nil in NIL_SIGNATURES
        if entry.params:
            assert len(entry.samples) >= 3, entry.name
            assert all(entry.in_domain(entry.bind(p)) for p in entry.samples), entry.name


def test_unknown_and_ambiguous_names():
    with pytest.raises(UnknownNameError):
        get("no_such_algebra")
    with pytest.raises(UnknownNameError):
        get_case("S_{9,9}")


def test_domain_is_enforced():
    with pytest.raises(DomainError):
        get("s_{6,17}", a=1, b=Fraction(-1, 2), c=Fraction(-1, 2))   # |d| = 1 > |c|
    with pytest.raises(DomainError):
        get("s_{6,17}", a=1)
    L, entry = get("s_{6,17}", a=1, b=Fraction(-3, 4), c=Fraction(-3, 4))
    assert L.dim == 6 and entry.params == ["a", "b", "c"]


def test_aliases_and_other_algebras():
    L, entry = get("g_10")
    assert entry.key == normalize_name("s_{6,147}^0")
    L, entry = get("g_2^alpha", alpha=1)
    assert entry.name.startswith("s_{5,13}")
    L, entry = get("n_{5,2}")
    assert entry is None and L.dim == 5
    with pytest.raises(DomainError):
        get("n_{5,2}", a=1)


def test_nil_signature_examples():
    L, entry = get("s_{6,154}^0")
    assert nil_signature(L) == NIL_SIGNATURES[entry.nil]


@st.composite
def algebras(draw):
    n = draw(st.integers(1, 6))
    rows = []
    for _ in range(n):
        pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                              .filter(lambda p: p[0] != p[1]), max_size=3))
        rows.append({p: draw(fractions().filter(bool)) for p in pairs})
    return LieAlgebra.from_differentials(rows)


@given(algebras())
def test_structure_equation_round_trip(L):
    text = format_structure_equations(L)
    assert parse_structure_equations(text).c.tolist() == L.c.tolist()


def test_parser_accepts_parameters_and_rejects_garbage():
    L = parse_structure_equations("(a e^{13}, -e^{23}, 0)", params=["a"], values={"a": Fraction(2)})
    assert L.differentials()[0] == {(0, 2): 2}
    for bad in ("(e^{11},0)", "(e^{13},0)", "e^{12}", "(e^{1x},0,0)"):
        with pytest.raises(StructureSyntaxError):
            parse_structure_equations(bad)


def test_vectors_and_covectors():
    assert list(parse_vector_expr("2*e1 - e3/2", 3)) == [2, 0, Fraction(-1, 2)]
    options = [list(parse_covector(s, 6)) for s in expand_pm("\\pm 2e^3")]
    assert options == [[0, 0, 2, 0, 0, 0], [0, 0, -2, 0, 0, 0]]
    assert list(parse_covector("-(g+1)e^5", 6, {"g": Fraction(1, 2)})) == [0] * 4 + [Fraction(-3, 2), 0]


def test_chains_facts_and_cases_load():
    kinds = sorted(c.kind for c in load_chains())
    assert kinds == ["complex", "koszul", "psi"]
    facts = load_facts()
    assert len(facts["betti"]) == 8 and len(facts["symplectic"]) == 3
    cases = load_cases()
    assert len(cases) == 21
    assert get_case("s_6_165").name == "S_{6,165}^\\alpha"


def test_catalog_dir_override(tmp_path, monkeypatch):
    from solvcx.catalog import catalog_dir
    root = tmp_path / "data"
    shutil.copytree(catalog_dir(), root)
    monkeypatch.setenv("CATALOG_DIR", str(root))
    assert catalog_dir() == root
    assert len(load_catalog()) == 85
