from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hfd.errors import DimensionError, PreconditionError
from hfd.exterior import (
    ExtElement,
    build_exterior,
    build_mst,
    contract,
    lift_in_mst,
    merge_sign,
    mst_basis,
    mst_index,
    subsets,
    wedge_action_matrix,
)
from hfd.intlinalg import matvec


def lam(n, *idx, c=1):
    return ExtElement(n, {tuple(idx): c})


def e(n, j):
    return ExtElement.basis(n, j)


def perm_sign(p):
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return -1 if inv % 2 else 1


def test_wedge_examples():
    assert e(2, 1).wedge(e(2, 2)) == lam(2, 1, 2)
    assert e(2, 2).wedge(e(2, 1)) == lam(2, 1, 2, c=-1)
    assert e(2, 1).wedge(e(2, 1)).is_zero()


def test_wedge_rank_mismatch():
    with pytest.raises(DimensionError):
        e(2, 1).wedge(e(3, 1))


@pytest.mark.parametrize("p", list(permutations([1, 2, 3, 4])))
def test_basis_sign_is_permutation_sign(p):
    # oracle: sign of the sorting permutation computed by inversion count
    assert ExtElement.basis(4, *p) == lam(4, 1, 2, 3, 4, c=perm_sign(p))


def test_merge_sign():
    assert merge_sign((1,), (2,)) == 1
    assert merge_sign((2,), (1,)) == -1
    assert merge_sign((1, 3), (2,)) == -1
    assert merge_sign((1,), (1,)) == 0


def test_contract_examples():
    assert contract(e(2, 1), lam(2, 1, 2)) == lam(2, 2)
    assert contract(e(2, 2), lam(2, 1, 2)) == lam(2, 1, c=-1)
    assert contract(e(2, 1), lam(2, 2)).is_zero()


def test_contract_composition():
    # i_{v ^ w} = i_v o i_w
    for s in subsets(3):
        x = lam(3, *s)
        for i in range(1, 4):
            for j in range(1, 4):
                lhs = contract(e(3, i).wedge(e(3, j)), x)
                rhs = contract(e(3, i), contract(e(3, j), x))
                assert lhs == rhs


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_anticommutation_and_square_zero(n):
    for s in subsets(n):
        x = lam(n, *s)
        for i in range(1, n + 1):
            assert contract(e(n, i), contract(e(n, i), x)).is_zero()
            for j in range(1, n + 1):
                if i != j:
                    a = contract(e(n, i), contract(e(n, j), x))
                    b = contract(e(n, j), contract(e(n, i), x))
                    assert a == -b


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_contraction_linear_in_vector(v, w):
    x = lam(3, 1, 2, 3) + lam(3, 2)
    vw = [a + b for a, b in zip(v, w)]
    assert contract(ExtElement.vector(vw), x) == contract(ExtElement.vector(v), x) + contract(ExtElement.vector(w), x)


def test_mst_ranks():
    m0 = build_mst(0, 0, (-4, 4))
    assert [m0.rank(g) for g in m0.gradings] == [1, 0] * 4 + [1]
    m2 = build_mst(2, 0, (-4, 4))
    assert all(m2.rank(g) == 2 for g in m2.gradings)
    m1 = build_mst(1, Fraction(1, 2), (Fraction(-7, 2), Fraction(7, 2)))
    assert all(m1.rank(g) == 1 for g in m1.gradings)
    m4 = build_mst(4, 0, (-2, 2))
    assert all(m4.rank(g) == 8 for g in m4.gradings)


def test_mst_rejects_bad_window():
    with pytest.raises(PreconditionError):
        build_mst(1, Fraction(1, 2), (0, 3))


def test_mst_basis_gradings():
    for g in range(-3, 4):
        for s, m in mst_basis(3, 0, Fraction(g)):
            assert len(s) - 2 * m == g


def test_exterior_module():
    mod = build_exterior(3)
    assert [mod.rank(g) for g in mod.gradings] == [1, 3, 3, 1]
    assert mod.u == {}


def _vec(n, sigma, g, entries):
    idx = mst_index(n, sigma, g)
    v = [0] * len(idx)
    for key, c in entries.items():
        v[idx[key]] = c
    return tuple(v)


def test_lift_examples():
    m1 = build_mst(1, 0, (-4, 4))
    assert lift_in_mst(m1, 0, _vec(1, 0, 0, {((), 0): 1}), [(1,)]) == _vec(1, 0, 1, {((1,), 0): 1})
    m2 = build_mst(2, 0, (-4, 4))
    x = _vec(2, 0, 0, {((), 0): 1})
    assert lift_in_mst(m2, 0, x, [(1, 0), (0, 1)]) in {_vec(2, 0, 2, {((1, 2), 0): s}) for s in (1, -1)}
    # with i_{e1} lambda_12 = +lambda_2 the lift of lambda_2 along e_1 is +lambda_12
    x = _vec(2, 0, 1, {((2,), 0): 1})
    assert lift_in_mst(m2, 1, x, [(1, 0)]) == _vec(2, 0, 2, {((1, 2), 0): 1})


def test_lift_preconditions():
    m2 = build_mst(2, 0, (-4, 4))
    x = _vec(2, 0, 1, {((1,), 0): 1})
    with pytest.raises(PreconditionError):
        lift_in_mst(m2, 1, x, [(1, 0)])  # e_1 does not kill lambda_1
    with pytest.raises(PreconditionError):
        lift_in_mst(m2, 1, _vec(2, 0, 1, {((2,), 0): 1}), [(2, 0)])  # not primitive


@given(st.integers(-3, 3), st.lists(st.integers(-2, 2), min_size=4, max_size=4),
       st.sampled_from([[(1, 0, 0)], [(1, 1, 0)], [(1, 0, 0), (0, 1, 0)], [(1, 2, 0), (0, 1, 1)]]))
def test_lift_round_trip(g, coeffs, vectors):
    m = build_mst(3, 0, (-6, 6))
    g = Fraction(g)
    kill = wedge_action_matrix(m, vectors, g)
    # project a random vector into the kernel of the wedge action by taking an image element
    src = g - len(vectors) * m.degree
    y = tuple(coeffs)
    x = matvec(wedge_action_matrix(m, vectors, src), y)
    assert not any(matvec(kill, x))
    xp = lift_in_mst(m, g, x, vectors)
    assert matvec(wedge_action_matrix(m, vectors, src), xp) == x


@pytest.mark.parametrize("n", [1, 2, 3])
def test_every_kernel_element_lifts(n):
    from hfd.intlinalg import SubgroupPresentation

    m = build_mst(n, 0, (-5, 5))
    for k in range(1, n + 1):
        vectors = [tuple(1 if i == j else 0 for i in range(n)) for j in range(k)]
        vectors[0] = tuple(1 for _ in range(n))  # still extends to a basis
        for g in (Fraction(x) for x in range(-2, 3)):
            full = SubgroupPresentation.full(m.rank(g))
            killed = full.preimage([m.action(v, g) for v in vectors],
                                   [SubgroupPresentation.zero(m.rank(g - 1))] * k)
            for x in killed.basis:
                xp = lift_in_mst(m, g, x, vectors)
                assert matvec(wedge_action_matrix(m, vectors, g - k * m.degree), xp) == tuple(x)


def test_wedge_condition_alone_is_not_enough():
    # i_{e1 ^ e2} lambda_1 = 0, but nothing contracts onto lambda_1
    m = build_mst(2, 0, (-4, 4))
    x = _vec(2, 0, 1, {((1,), 0): 1})
    assert not any(matvec(wedge_action_matrix(m, [(1, 0), (0, 1)], Fraction(1)), x))
    image = wedge_action_matrix(m, [(1, 0), (0, 1)], Fraction(3))
    assert all(not any(matvec(image, y)) or matvec(image, y) != x
               for y in [(1, 0), (0, 1), (1, 1)])
    with pytest.raises(PreconditionError):
        lift_in_mst(m, Fraction(1), x, [(1, 0), (0, 1)])
