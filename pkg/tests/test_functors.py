from fractions import Fraction
from itertools import product
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hfd import catalog
from hfd.errors import InvariantViolation
from hfd.exterior import build_exterior, build_mst, mst_index
from hfd.functors import (
    SQModule,
    Subspace,
    all_primitive_subspaces,
    check_v_acts_trivially,
    dual_swap_report,
    enumerate_primitive_subspaces,
    group_structure,
    kernel_functor,
    kq,
    kunneth_report,
    qk,
    quotient_functor,
    saturate_subspace,
    tower_report,
)
from hfd.intlinalg import hermite_normal_form, maximal_minors_gcd, rank

F = Fraction


def test_saturation_examples():
    assert saturate_subspace(Subspace.of(2, [(2, 0)])).basis == ((1, 0),)
    assert saturate_subspace(Subspace.of(2, [(2, 2)])).basis == ((1, 1),)
    v = Subspace.of(3, [(1, 0, 2), (0, 1, 1)])
    assert saturate_subspace(v).lattice() == v.lattice()


def test_enumeration_examples():
    got = {v.basis for v in enumerate_primitive_subspaces(2, 1, 1)}
    assert got == {((1, 0),), ((0, 1),), ((1, 1),), ((1, -1),)}
    assert [v.basis for v in enumerate_primitive_subspaces(2, 2, 5)] == [((1, 0), (0, 1))]
    assert [v.basis for v in enumerate_primitive_subspaces(1, 1, 3)] == [((1,),)]
    assert [v.basis for v in enumerate_primitive_subspaces(0, 0, 3)] == [()]


def _brute_force(n, k, bound):
    """Every saturated rank-k span of box vectors whose HNF stays in the box."""
    box = list(product(range(-bound, bound + 1), repeat=n))
    found = set()
    for rows in product(box, repeat=k):
        if rank(rows, n) != k or maximal_minors_gcd(rows, n) != 1:
            continue
        h = hermite_normal_form(rows, n)
        if all(abs(x) <= bound for r in h for x in r):
            found.add(h)
    return found


@pytest.mark.parametrize("n,k,bound", [(2, 1, 2), (3, 1, 2), (3, 2, 1), (3, 2, 2), (4, 2, 1)])
def test_enumeration_matches_brute_force(n, k, bound):
    got = [v.basis for v in enumerate_primitive_subspaces(n, k, bound)]
    assert len(got) == len(set(got))
    assert set(got) == _brute_force(n, k, bound)


def test_rank_one_is_primitive_vectors():
    for n in (2, 3):
        got = {v.basis[0] for v in enumerate_primitive_subspaces(n, 1, 2)}
        want = set()
        for v in product(range(-2, 3), repeat=n):
            if not any(v) or gcd(*v) != 1:
                continue
            lead = next(x for x in v if x)
            want.add(v if lead > 0 else tuple(-x for x in v))
        assert got == want


def test_trivial_subspace_is_identity(s2):
    whole = SQModule.whole(s2.hf_inf)
    assert kernel_functor(whole, Subspace.zero(2)) is whole
    assert quotient_functor(whole, Subspace.zero(2)) is whole


def test_s2_full_kernel_is_the_d_tower(s2):
    whole = SQModule.whole(s2.hf_inf)
    h = Subspace.full(2)
    k = kernel_functor(whole, h)
    for g in k.valid:
        assert k.free_rank(g) == (1 if g % 2 == 1 else 0)
        if g % 2 == 1:
            idx = mst_index(2, s2.sigma, g)
            tower = [0] * len(idx)
            tower[idx[((), int((s2.sigma - g) / 2))]] = 1
            assert tower in k.num[g]
    q = quotient_functor(whole, h)
    for g in q.valid:
        assert q.free_rank(g) == (1 if g % 2 == 1 else 0)


def test_hyp_beta_kernel_and_quotient(hyp):
    whole = SQModule.whole(hyp.hf_inf)
    beta = Subspace.of(2, [(0, 1)])
    k = kernel_functor(whole, beta)
    q = quotient_functor(whole, beta)
    sig = hyp.sigma
    i0, im1 = mst_index(2, sig, F(0)), mst_index(2, sig, F(-1))

    def unit(idx, key):
        v = [0] * len(idx)
        v[idx[key]] = 1
        return v

    # K: c = -l1 at grading 0, d = -l0 at grading -1; b and U a are not killed
    assert k.num[F(0)].rank == 1 and unit(i0, ((1,), 0)) in k.num[F(0)]
    assert k.num[F(-1)].rank == 1 and unit(im1, ((), 0)) in k.num[F(-1)]
    # Q: classes of b at grading 0 and U a at grading -1
    assert q.free_rank(F(0)) == 1 and unit(i0, ((1,), 0)) in q.den[F(0)]
    assert q.free_rank(F(-1)) == 1 and unit(im1, ((), 0)) in q.den[F(-1)]


@pytest.mark.parametrize("p,q", [(1, 0), (2, 1), (3, 1), (3, 2), (2, -3)])
def test_q_of_iplus_has_p_torsion(hyp, p, q):
    # (p alpha + q beta) U a = p U b + q U c, and U c lies in I^-
    iplus = SQModule.quotient(hyp.hf_inf, hyp.iminus)
    out = quotient_functor(iplus, Subspace.of(2, [(p, q)]))
    want = (0, ()) if p == 1 else (0, (p,))
    assert group_structure(out.at(F(-2))) == want


def test_n0_composites_are_the_module():
    m = catalog.build_s1s2(0)
    whole = SQModule.whole(m.hf_inf)
    v = Subspace.zero(0)
    for out in (qk(whole, v), kq(whole, v)):
        for g in out.valid:
            assert group_structure(out.at(g)) == (m.hf_inf.rank(g), ())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_v_acts_trivially(n):
    mod = build_mst(n, 0, (-4, 4))
    whole = SQModule.whole(mod)
    for v in all_primitive_subspaces(n, 1):
        check_v_acts_trivially(kernel_functor(whole, v), v)
        check_v_acts_trivially(quotient_functor(whole, v), v)


def test_v_acts_trivially_detects_failure():
    mod = build_mst(2, 0, (-4, 4))
    with pytest.raises(InvariantViolation):
        check_v_acts_trivially(SQModule.whole(mod), Subspace.of(2, [(1, 0)]))


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_tower_lemma(n):
    sigma = Fraction(-n, 2)
    mod = build_mst(n, sigma, (sigma - 6, sigma + 6))
    for v in all_primitive_subspaces(n, 2 if n < 3 else 1):
        assert tower_report(mod, v) == []


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3).filter(any))
def test_tower_lemma_random_vectors(vec):
    mod = build_mst(3, 0, (-5, 5))
    assert tower_report(mod, Subspace.of(3, [vec]).canonical()) == []


def test_tower_fails_off_standard_module(s2):
    # the identity window with an action zeroed out is no longer standard
    from hfd.hfmodel import WindowModule

    mod = s2.hf_inf
    acts = {g: (a[0], tuple(tuple(0 for _ in r) for r in a[1])) for g, a in mod.actions.items()}
    broken = WindowModule(2, mod.lo, mod.hi, dict(mod.ranks), acts, dict(mod.u))
    assert tower_report(broken, Subspace.full(2))


@pytest.mark.parametrize("na,nb", [(1, 1), (1, 2), (2, 2)])
def test_kunneth(na, nb):
    a, b = build_exterior(na), build_exterior(nb)
    for v1 in all_primitive_subspaces(na, 1):
        for v2 in all_primitive_subspaces(nb, 1):
            assert kunneth_report(a, b, v1, v2) == []


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_dual_swap(n):
    mod = build_exterior(n)
    for v in all_primitive_subspaces(n, 1):
        assert dual_swap_report(mod, v) == []


def test_dual_swap_on_standard_window():
    # the window edges are truncated, so only interior gradings are compared
    inner = build_mst(2, 0, (-3, 3))
    for v in all_primitive_subspaces(2, 2):
        fails = [f for f in dual_swap_report(inner, v) if not any(f"grading {e}" in f for e in (-3, 3))]
        assert fails == []
