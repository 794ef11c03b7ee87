import pytest
import sympy
from sympy.matrices.normalforms import invariant_factors as sympy_invariant_factors
from hypothesis import given
from hypothesis import strategies as st

from hfd.errors import DomainError
from hfd.intlinalg import (
    SubgroupPresentation,
    SubquotientPresentation,
    det,
    extend_to_basis,
    hermite_normal_form,
    int_solve,
    inverse_unimodular,
    invariant_factors,
    kernel,
    matmul,
    matvec,
    maximal_minors_gcd,
    nontorsion_class,
    rank,
    smith_normal_form,
)

entries = st.integers(-6, 6)


@st.composite
def matrices(draw, max_rows=4, max_cols=4):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return tuple(tuple(draw(entries) for _ in range(c)) for _ in range(r)), c


def test_hnf_small():
    assert hermite_normal_form([(2, 4), (1, 3)], 2) == ((1, 1), (0, 2))
    assert hermite_normal_form([(0, 0)], 2) == ()
    assert hermite_normal_form([(-3, 6)], 2) == ((3, -6),)


def test_snf_small():
    assert invariant_factors([(2, 4, 4), (-6, 6, 12), (10, -4, -16)]) == [2, 6, 12]
    assert invariant_factors([(2, 0), (0, 3)]) == [1, 6]


@given(matrices())
def test_snf_transforms(mc):
    m, c = mc
    s, l, r = smith_normal_form(m, c)
    assert abs(det(l)) == 1 and abs(det(r)) == 1
    assert matmul(matmul(l, m, ncols=c), r, ncols=c) == s
    diag = [s[i][i] for i in range(min(len(s), c))]
    assert all(s[i][j] == 0 for i in range(len(s)) for j in range(c) if i != j)
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@given(matrices())
def test_invariant_factors_match_sympy(mc):
    m, c = mc
    expected = [abs(int(d)) for d in sympy_invariant_factors(sympy.Matrix(m), domain=sympy.ZZ) if d != 0]
    assert invariant_factors(m, c) == expected


@given(matrices())
def test_hnf_is_canonical_basis_of_row_span(mc):
    m, c = mc
    h = hermite_normal_form(m, c)
    assert rank(m, c) == len(h) == sympy.Matrix(m).rank()
    # rows of m lie in the span of h and vice versa
    for row in m:
        assert int_solve(h, row) is not None
    for row in h:
        assert int_solve(m, row) is not None
    pivots = [next(j for j, x in enumerate(row) if x) for row in h]
    assert pivots == sorted(set(pivots))
    for i, p in enumerate(pivots):
        assert h[i][p] > 0
        assert all(0 <= h[k][p] < h[i][p] for k in range(i))
    # canonical: any unimodular row mix gives the same HNF
    if len(m) >= 2:
        mixed = (tuple(a + 2 * b for a, b in zip(m[0], m[1])),) + m[1:]
        assert hermite_normal_form(mixed, c) == h


@given(matrices())
def test_kernel_is_saturated_and_complete(mc):
    m, c = mc
    k = kernel(m, c)
    for v in k:
        assert not any(matvec(m, v))
    assert len(k) == c - rank(m, c)
    assert maximal_minors_gcd(k, c) == 1 or not k


@given(matrices(), st.lists(entries, min_size=4, max_size=4))
def test_int_solve_round_trip(mc, coeffs):
    m, c = mc
    cols = [tuple(m[i][j] for i in range(len(m))) for j in range(c)]
    x = tuple(sum(coeffs[j] * cols[j][i] for j in range(c)) for i in range(len(m)))
    y = int_solve(cols, x)
    assert y is not None
    assert tuple(sum(y[j] * cols[j][i] for j in range(c)) for i in range(len(m))) == x


def test_int_solve_detects_non_integral():
    assert int_solve([(2, 0)], (1, 0)) is None
    assert int_solve([(1, 0)], (0, 1)) is None


@given(st.lists(st.tuples(entries, entries, entries), min_size=1, max_size=2))
def test_extend_to_basis(vectors):
    lat = SubgroupPresentation.span(vectors, 3).saturate()
    if not lat.basis:
        return
    extra = extend_to_basis(lat.basis, 3)
    assert abs(det(lat.basis + extra)) == 1


def test_extend_rejects_non_primitive():
    with pytest.raises(DomainError):
        extend_to_basis([(2, 0)], 2)


def test_inverse_unimodular():
    m = ((2, 1), (1, 1))
    assert matmul(m, inverse_unimodular(m)) == ((1, 0), (0, 1))
    with pytest.raises(DomainError):
        inverse_unimodular(((2, 0), (0, 1)))


def test_subgroup_calculus():
    a = SubgroupPresentation.span([(2, 0), (0, 3)], 2)
    b = SubgroupPresentation.span([(1, 1)], 2)
    assert (a + b).rank == 2
    assert (2, 0) in a and (1, 0) not in a
    inter = a.intersect(b)
    assert inter.basis == ((6, 6),)
    assert a.saturate() == SubgroupPresentation.full(2)
    assert not a.is_saturated() and b.is_saturated()
    assert b.annihilator().basis == ((1, -1),)
    assert a.preimage([((1, 1),)], [SubgroupPresentation.span([(4,)], 1)]).contains_subgroup(
        SubgroupPresentation.span([(2, 6)], 2))


@given(st.lists(st.tuples(entries, entries, entries), max_size=3),
       st.lists(st.tuples(entries, entries, entries), max_size=3))
def test_intersection_property(va, vb):
    a, b = SubgroupPresentation.span(va, 3), SubgroupPresentation.span(vb, 3)
    i = a.intersect(b)
    assert a.contains_subgroup(i) and b.contains_subgroup(i)
    # rank formula over Q
    assert i.rank == a.rank + b.rank - (a + b).rank


def test_subquotient_torsion():
    num = SubgroupPresentation.full(2)
    den = SubgroupPresentation.span([(2, 0)], 2)
    q = SubquotientPresentation(num, den)
    assert q.invariant_factors() == [2, 0]
    assert q.free_rank == 1
    assert not nontorsion_class((1, 0), q)
    assert nontorsion_class((1, 1), q)
    with pytest.raises(DomainError):
        SubquotientPresentation(den, num)
