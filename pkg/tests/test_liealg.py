import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from solvcx.catalog import get, parse_structure_equations
from solvcx.exactmath import is_nilpotent_matrix
from solvcx.liealg import (KForm, LieAlgebra, NotSolvableError, Subspace, ad, betti, bracket,
                           bracket_span, ce_d, d_matrix, derived_series, is_nilpotent,
                           is_solvable, is_strongly_unimodular, is_unimodular, jacobi_check,
                           lower_central_series, nilradical, symplectic_exists)

from conftest import fractions


def e(n, *idx):
    v = [Fraction(0)] * n
    for i in idx:
        v[i - 1] += 1
    return v


def span(n, *idx):
    return Subspace(n, [e(n, i) for i in idx])


S33xR3 = parse_structure_equations("(e^{23},-e^{13},0,0,0,0)")
H3 = parse_structure_equations("(-e^{23},0,0)")
N52 = parse_structure_equations("(-e^{35},-e^{34},-e^{45},0,0)")


def test_bracket_examples():
    assert list(bracket(S33xR3, e(6, 2), e(6, 3))) == [-1, 0, 0, 0, 0, 0]
    assert list(bracket(S33xR3, e(6, 1), e(6, 3))) == e(6, 2)
    assert list(bracket(H3, e(3, 2), e(3, 3))) == e(3, 1)
    R6 = LieAlgebra.abelian(6)
    assert all(not any(bracket(R6, e(6, i), e(6, j))) for i in range(1, 7) for j in range(1, 7))


def test_from_differentials_round_trip():
    L = parse_structure_equations("(e^{23}+2e^{15},e^{25},e^{35},-4e^{45},0)")
    assert LieAlgebra.from_differentials(L.differentials()).c.tolist() == L.c.tolist()


def _flips(L):
    for i, j, k, v in L._nz:
        if i < j:
            c = L.c.copy()
            c[i, j, k], c[j, i, k] = -c[i, j, k], -c[j, i, k]
            yield (i, j, k), LieAlgebra(c)


def test_jacobi_detects_a_sign_flip():
    assert jacobi_check(LieAlgebra.abelian(6)) == []
    # each single flip in s_{6,25} is undone by e_i -> -e_i, so all stay Lie
    L, _ = get("s_{6,25}")
    assert jacobi_check(L) == []
    assert all(jacobi_check(M) == [] for _, M in _flips(L))
    L, _ = get("s_{6,154}^0")
    broken = {key: jacobi_check(M) for key, M in _flips(L)}
    assert broken[(0, 5, 1)] == [(2, 4, 5, 1, Fraction(2))]
    assert sum(1 for v in broken.values() if v) == 6
    assert all(len(r) == 5 and r[-1] != 0 for v in broken.values() for r in v)


def test_lower_central_series():
    dims = [s.dim for s in lower_central_series(N52)]
    assert dims == [5, 3, 2, 0]
    assert lower_central_series(N52)[1].contains_subspace(span(5, 1, 2, 3))
    assert [s.dim for s in lower_central_series(LieAlgebra.abelian(5))] == [5, 0]
    assert [s.dim for s in lower_central_series(H3)] == [3, 1, 0]
    # [e4,[e4,e5]] = -e2 makes n_{5,2} three-step
    assert list(bracket(N52, e(5, 4), bracket(N52, e(5, 4), e(5, 5)))) == [0, -1, 0, 0, 0]


def test_nilradical_examples():
    L, _ = get("s_{4,7} x R^2")
    assert nilradical(L).dim == 5
    assert nilradical(L).contains_subspace(span(6, 1, 2, 3, 5, 6))
    L, _ = get("s_{6,154}^0")
    assert nilradical(L).contains_subspace(span(6, 1, 2, 3, 4, 5))
    assert nilradical(LieAlgebra.abelian(6)).dim == 6


def test_nilradical_rejects_non_solvable():
    sl2 = parse_structure_equations("(-e^{23},2e^{12},-2e^{13})")
    assert not is_solvable(sl2)
    with pytest.raises(NotSolvableError):
        nilradical(sl2)


def test_unimodularity():
    assert is_unimodular(S33xR3)
    aff = parse_structure_equations("(e^{12},0)")
    assert not is_unimodular(aff)


def test_sieve_example_is_rejected():
    L = parse_structure_equations("(-e^{23}+2e^{15},e^{25},e^{35},-4e^{45},0)")
    assert jacobi_check(L) == []
    assert is_unimodular(L) and not is_strongly_unimodular(L)


def test_ce_d_examples():
    L = parse_structure_equations("(e^{13},-e^{23},0,0,0,0)")
    assert ce_d(L, KForm.basis1(6, 0)) == KForm(6, 2, {(0, 2): 1})
    L, _ = get("s_{6,154}^0")
    assert ce_d(L, KForm.basis1(6, 3)) == KForm(6, 2, {(4, 5): 1})


def test_betti_examples():
    L, _ = get("g_10")
    assert betti(L, 2) == 2
    L, _ = get("s_{6,154}^0")
    assert betti(L, 1) == 1
    assert betti(LieAlgebra.abelian(6), 3) == 20
    assert betti(LieAlgebra.abelian(0), 0) == 1


def test_symplectic_examples():
    L, _ = get("R x n_{5,2}")
    exists, cubic = symplectic_exists(L)
    assert not exists and cubic.is_zero()
    L, _ = get("g_9")
    exists, omega = symplectic_exists(L)
    assert exists and ce_d(L, omega).is_zero()
    assert not omega.wedge(omega).wedge(omega).is_zero()
    with pytest.raises(ValueError):
        symplectic_exists(H3)


# -- properties over the whole catalog ---------------------------------------

def test_nilradical_invariants(catalog_points):
    for label, L, _, _ in catalog_points:
        n = nilradical(L)
        g = Subspace.full(L.dim)
        assert n.contains_subspace(bracket_span(L, g, g)), label
        assert n.contains_subspace(bracket_span(L, g, n)), label
        assert lower_central_series(L, n)[-1].dim == 0, label
        for v in n.complement_basis():
            assert not is_nilpotent_matrix(ad(L, v)), label


@given(st.data())
def test_bracket_ce_d_duality(catalog_points, data):
    label, L, _, _ = data.draw(st.sampled_from(catalog_points))
    alpha = data.draw(st.lists(fractions(), min_size=L.dim, max_size=L.dim))
    da = ce_d(L, KForm.from_covector(alpha))
    for i, j in itertools.combinations(range(L.dim), 2):
        lhs = da.coeffs.get((i, j), 0)
        assert lhs == -np.dot(alpha, bracket(L, L.basis(i), L.basis(j)))


def test_derived_series_terminates(catalog_points):
    for label, L, _, _ in catalog_points:
        assert derived_series(L)[-1].dim == 0
        assert not is_nilpotent(L)


def test_d_matrix_agrees_with_ce_d():
    L, _ = get("s_{6,154}^0")
    for k in range(L.dim):
        M = d_matrix(L, k)
        src = list(itertools.combinations(range(6), k))
        dst = list(itertools.combinations(range(6), k + 1))
        for j, key in enumerate(src):
            df = ce_d(L, KForm(6, k, {key: Fraction(1)}))
            assert {dst[i]: M[i, j] for i in range(len(dst)) if M[i, j] != 0} == df.coeffs
