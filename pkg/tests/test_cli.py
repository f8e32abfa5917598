import json
from fractions import Fraction

import pytest

from solvcx.cli import format_blocks, main, parse_params


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_info(capsys):
    code, out, _ = run(capsys, "info", "s_{6,154}^0")
    assert code == 0
    assert "nilradical   n52" in out and "lattice case S_{6,154}^0" in out
    code, doc = run_json(capsys, "info", "s_{6,17}", "--params", "a=1,b=-3/4,c=-3/4")
    assert code == 0 and doc["dim"] == 6 and doc["params"] == ["a", "b", "c"]


@pytest.mark.parametrize("argv", [
    ("info", "no_such_algebra"),
    ("info", "s_{6,17}", "--params", "a=1,b=-1/2,c=-1/2"),
    ("info", "s_{6,17}", "--params", "a=0.5"),
    ("yamada", "S_{6,154}", "--m", "3"),
    ("bogus-verb",),
])
def test_usage_and_domain_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_check_j_and_koszul(capsys):
    code, doc = run_json(capsys, "check-j", "g_10")
    assert code == 0 and doc["passed"]
    assert all(s["psi"] == "0" for s in doc["structures"])
    code, _, _ = run(capsys, "check-j", "s_{5,41}^{-1,-1} x R", "--J", "e1:e2,e3:e4,e5:e6")
    assert code == 1
    code, doc = run_json(capsys, "koszul", "s_{6,44}")
    assert code == 0 and doc["structures"][0]["listed"] == "\\pm 4e^6"


def test_cohomology_and_symplectic(capsys):
    code, doc = run_json(capsys, "cohomology", "g_10")
    assert code == 0 and doc["betti"] == [1, 2, 2, 2, 2, 2, 1]
    code, doc = run_json(capsys, "symplectic", "s_{6,154}^0")
    assert code == 0 and doc["symplectic"] is False
    code, doc = run_json(capsys, "symplectic", "g_9")
    assert doc["symplectic"] is True and doc["witness"]


def test_chains(capsys):
    code, doc = run_json(capsys, "chains")
    assert code == 0 and doc["passed"] and len(doc["chains"]) == 3
    code, doc = run_json(capsys, "chains", "--printed")
    assert code == 1
    assert [c["passed"] for c in doc["chains"]] == [True, False, False]


def test_yamada(capsys):
    code, out, _ = run(capsys, "yamada", "S_{6,165}", "--m", "3")
    assert code == 0
    assert "(1) ⊕ [[0,-1],[1,-3]] ⊕ [[0,-1],[1,-3]]" in out
    code, doc = run_json(capsys, "yamada", "S_{6,228}")
    assert code == 0 and len(doc["certificates"]) == 3


def test_bch_and_abelianization(capsys):
    code, doc = run_json(capsys, "bch", "n_{5,2}", "1,0,0,1,0", "0,0,1,0,1")
    assert doc["product"] == ["13/12", "-7/12", "3/2", "1", "1"]
    code, doc = run_json(capsys, "bch", "S_{6,154}", "e1", "e2")
    assert code == 0 and doc["product"] == ["1", "1", "0", "0", "0"]
    code, doc = run_json(capsys, "abelianization", "S_6_154")
    assert code == 0 and doc["torsion"] == [2, 2, 2] and doc["free_rank"] == 1


def test_catalog_verify_json_round_trip(capsys):
    code, doc = run_json(capsys, "catalog-verify", "--scope", "chains,presentation,betti")
    assert code == 0 and doc["passed"] and doc["schema"] == 1
    assert doc["total"] == len(doc["checks"]) == 12
    assert {c["scope"] for c in doc["checks"]} == {"chains", "presentation", "betti"}
    code, _, err = run(capsys, "catalog-verify", "--scope", "nope")
    assert code == 2 and "nope" in err


def test_helpers():
    assert parse_params("a=1,b=-1/2") == {"a": Fraction(1), "b": Fraction(-1, 2)}
    assert parse_params("") == {}
    assert format_blocks([[-1, 0], [0, -1]]) == "(-1) ⊕ (-1)"
