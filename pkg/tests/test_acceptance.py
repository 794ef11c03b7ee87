"""Acceptance criteria, one test each. Every comparison is exact and every value
must be certified; the terminal summary lists one PASS/FAIL line per criterion."""
import random
from fractions import Fraction
from math import gcd

from hfd import catalog
from hfd.dinv import (
    PropertyReport,
    check_basis_change,
    check_duality,
    check_minus,
    check_rank_inequality,
    check_simple,
    d_bot,
    d_invariant,
    d_star,
    d_table,
    d_top,
    random_chain,
    random_unimodular,
)
from hfd.exterior import build_exterior, build_mst
from hfd.functors import (
    Subspace,
    all_primitive_subspaces,
    dual_swap_report,
    kunneth_report,
    tower_report,
)
from hfd.hfmodel import connected_sum, reverse_orientation
from hfd.obstruct import (
    DInvariantTable,
    Lattice,
    LinkingForm,
    char_vector_max,
    e8,
    enumerate_metabolizers,
    intform_kernel_candidates,
    slice_obstruction,
)

F = Fraction
COPRIME = [(p, q) for p in range(-3, 4) for q in range(-3, 4) if gcd(p, q) == 1]


def _models():
    return catalog.catalog_models(2)


def _s_n_failures(m, n, subs=None):
    bad = []
    t = d_table(m, 2, subspaces=subs)
    for e in t.entries:
        k = e.subspace.rank
        if not e.certified or e.d.value != F(n, 2) - k or e.d_star.value != k - F(n, 2):
            bad.append(f"n={n} {e.subspace}: d={e.d} d*={e.d_star}")
    return bad, len(t.entries)


def test_c01_s1xs2_family(record):
    bad, count = [], 0
    for n in range(5):
        b, c = _s_n_failures(catalog.build_s1s2(n), n)
        bad += b
        count += c
    record(1, "S_n, n = 0..4: d = n/2 - rank V, d* = rank V - n/2 on every B = 2 subspace",
           not bad, f"{count} subspaces" + (f"; {bad[:3]}" if bad else ""))


def _hyp_failures(m):
    bad = []
    bot, top = d_bot(m), d_top(m)
    if (bot.value, top.value) != (-1, -1) or not (bot.certified and top.certified):
        bad.append(f"(d_bot, d_top) = ({bot}, {top})")
    for p, q in COPRIME:
        v = Subspace.of(2, [(p, q)])
        d, ds = d_invariant(m, v), d_star(m, v)
        want = (0, -2) if p == 0 else (-2, 0)
        if (d.value, ds.value) != want or not (d.certified and ds.certified):
            bad.append(f"<{p}a+{q}b>: d={d} d*={ds}")
    return bad


def test_c02_example_hyp(record):
    bad = _hyp_failures(catalog.build_example_hyp())
    record(2, "S^1xS^2 # S^3_0(T): d_bot = d_top = -1; d, d* on <pa+qb> for coprime |p|,|q| <= 3",
           not bad, f"{len(COPRIME)} subspaces" + (f"; {bad[:3]}" if bad else ""))


def test_c03_trefoil(record):
    m = catalog.build_trefoil_surgery()
    bot, top = d_bot(m), d_top(m)
    ok = (bot.value, top.value) == (F(-1, 2), F(-3, 2)) and bot.certified and top.certified
    record(3, "S^3_0(T): (d_bot, d_top) = (-1/2, -3/2)", ok, f"got ({bot}, {top})")


def test_c04_connected_sums(record):
    s1 = catalog.build_s1s2(1)
    bad = _hyp_failures(connected_sum(s1, catalog.build_trefoil_surgery()))
    b, _ = _s_n_failures(connected_sum(s1, s1), 2)
    bad += b
    record(4, "S_1 # S^3_0(T) reproduces criterion 2; S_1 # S_1 reproduces the n = 2 rows of criterion 1",
           not bad, "; ".join(bad[:3]))


def test_c05_minus_reformulation(record):
    bad, checked = [], 0
    for m in _models():
        rep = check_minus(m, 2)
        bad += [f"{m.name}: {f}" for f in rep.failures]
        checked += rep.checked
    record(5, "d- = d - 2 and d*- = d* - 2 on catalog models x B = 2 subspaces", not bad,
           f"{checked} checks" + (f"; {bad[:3]}" if bad else ""))


def test_c06_duality(record):
    bad, checked = [], 0
    for m in _models():
        rep = check_duality(m, reverse_orientation(m), 2)
        bad += [f"{m.name}: {f}" for f in rep.failures]
        checked += rep.checked
    record(6, "d(Y, V) = -d*(-Y, V) and d*(Y, V) = -d(-Y, V) on catalog models x B = 2 subspaces", not bad,
           f"{checked} checks" + (f"; {bad[:3]}" if bad else ""))


def test_c07_rank_inequality_and_simplicity(record):
    rng = random.Random(20240607)
    models = [m for m in _models() if m.n > 0]
    rep = PropertyReport("rank")
    for i in range(100):
        small, big = random_chain(models[i % len(models)].n, rng)
        check_rank_inequality(models[i % len(models)], small, big, rep)
    bad = list(rep.failures)
    for n in range(5):
        simple, srep = check_simple(catalog.build_s1s2(n), 1)
        if not simple or not srep.ok:
            bad.append(f"S_{n} not classified simple: {srep.failures[:2]}")
    simple, _ = check_simple(catalog.build_example_hyp())
    if simple:
        bad.append("example-hyp classified simple")
    record(7, "rank inequality + mod-2 congruence on 100 seeded chains; S_n simple, example-hyp not", not bad,
           f"{rep.checked} checks" + (f"; {bad[:3]}" if bad else ""))


def test_c08_functor_lemmas(record):
    bad, count = [], 0
    for n in range(5):
        sigma = F(-n, 2)
        # n = 4 has 4154 subspaces; seven gradings still show both residues twice
        w = 3 if n == 4 else 5
        mod = build_mst(n, sigma, (sigma - w, sigma + w))
        for v in all_primitive_subspaces(n, 2):
            bad += tower_report(mod, v)
            count += 1
    for na, nb in [(1, 1), (1, 2), (2, 2), (1, 3)]:
        a, b = build_exterior(na), build_exterior(nb)
        for v1 in all_primitive_subspaces(na, 1):
            for v2 in all_primitive_subspaces(nb, 1):
                bad += kunneth_report(a, b, v1, v2)
    for n in range(1, 5):
        mod = build_exterior(n)
        for v in all_primitive_subspaces(n, 2 if n < 4 else 1):
            bad += dual_swap_report(mod, v)
    record(8, "tower ranks for M^st (n <= 4, B = 2); Kunneth and dual-swap rank equalities", not bad,
           f"{count} tower subspaces" + (f"; {bad[:3]}" if bad else ""))


def test_c09_metabolizers_and_slice(record):
    bad = []
    z9 = LinkingForm((9,), ((F(1, 9),),))
    if enumerate_metabolizers(z9).subgroups != (((3,),),):
        bad.append("Z/9")
    if len(enumerate_metabolizers(LinkingForm((3, 3), ((F(1, 3), 0), (0, F(-1, 3))))).subgroups) != 2:
        bad.append("(Z/3)^2")
    if enumerate_metabolizers(LinkingForm((2,), ((F(1, 2),),))).subgroups:
        bad.append("Z/2")
    entries = {(t,): ((F(0), F(0)) if t % 3 == 0 else (F(2, 9), F(2, 9))) for t in range(9)}
    if slice_obstruction(DInvariantTable(0, (9,), entries), z9, 1).label != "UNOBSTRUCTED":
        bad.append("slice example 1")
    entries[(3,)] = (F(-2), F(0))
    if slice_obstruction(DInvariantTable(0, (9,), entries), z9, 1).label != "OBSTRUCTED":
        bad.append("slice example 2")
    v = slice_obstruction(DInvariantTable(0, (9,), entries), z9, 2)
    if v.label != "OBSTRUCTED" or "nullity" not in v.reason:
        bad.append("slice example 3")
    record(9, "metabolizers of Z/9, (Z/3)^2, Z/2; the three slice verdicts", not bad, ", ".join(bad))


def test_c10_lattices(record):
    bad = []
    for r in range(1, 5):
        res = char_vector_max(Lattice(tuple(tuple(-1 if i == j else 0 for j in range(r)) for i in range(r))))
        if res.value != 0 or not res.certified:
            bad.append(f"diag(-1)^{r}: {res.value}")
    res = char_vector_max(e8())
    if res.value != 8 or not res.certified:
        bad.append(f"E8: {res.value}")
    record(10, "max(c^2 + rank) = 0 on diag(-1)^r, r <= 4, and 8 on E8(-1), certified", not bad, ", ".join(bad))


def test_c11_kernel_candidates(record):
    t = d_table(catalog.build_example_hyp(), 3)
    got = intform_kernel_candidates(t)
    keys = {c.subspace.key() for c in got}
    want = {Subspace.of(2, [(0, 1)]).key(), Subspace.full(2).key()}
    ok = t.certified and keys == want and all(c.tight for c in got)
    record(11, "kernel candidates on example-hyp are exactly <b> and H_1, both tight", ok,
           ", ".join(f"{c.subspace} d={c.d} tight={c.tight}" for c in got))


def test_c12_basis_change(record):
    rng = random.Random(4242)
    models = [m for m in _models() if m.n > 0]
    bad, checked = [], 0
    for i in range(50):
        m = models[i % len(models)]
        rep = check_basis_change(m, random_unimodular(m.n, rng), 2)
        bad += [f"{m.name}: {f}" for f in rep.failures]
        checked += rep.checked
    record(12, "d-tables unchanged under 50 seeded unimodular changes of H_1 basis", not bad,
           f"{checked} entries" + (f"; {bad[:3]}" if bad else ""))
