"""Kernel and quotient functors K^V, Q^V and their composites on window modules.

Everything is computed inside the ambient graded groups of one WindowModule:
a subquotient module is a pair of per-grading lattices (numerator,
denominator) closed under the action. The functors never leave the ambient
coordinates, so induced maps between outputs are always "the identity on
representatives".
"""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from itertools import combinations, product
from math import gcd

from .errors import InvariantViolation
from .intlinalg import (
    Matrix,
    SubgroupPresentation,
    SubquotientPresentation,
    extend_to_basis,
    hermite_normal_form,
    maximal_minors_gcd,
    rank,
)


@dataclass(frozen=True)
class Subspace:
    """A subgroup V of Z^n given by basis columns; ``basis`` holds them as tuples."""

    n: int
    basis: tuple = ()

    @classmethod
    def of(cls, n: int, vectors) -> "Subspace":
        vecs = tuple(tuple(int(x) for x in v) for v in vectors if any(v))
        for v in vecs:
            if len(v) != n:
                raise ValueError(f"vector {v} does not lie in Z^{n}")
        return cls(n, vecs)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def rank(self) -> int:
        return rank(self.basis, self.n)

    @property
    def saturated(self) -> bool:
        return self.rank == len(self.basis) and maximal_minors_gcd(self.basis, self.n) == 1

    def lattice(self) -> SubgroupPresentation:
        return SubgroupPresentation.span(self.basis, self.n)

    def canonical(self) -> "Subspace":
        """Saturation in canonical HNF form (the key used by d-tables)."""
        return Subspace(self.n, self.lattice().saturate().basis)

    def key(self) -> tuple:
        return self.canonical().basis

    def transform(self, m: Matrix) -> "Subspace":
        """Image under x -> m x."""
        return Subspace.of(self.n, [tuple(sum(m[i][j] * v[j] for j in range(self.n)) for i in range(self.n))
                                    for v in self.basis])

    def contains(self, other: "Subspace") -> bool:
        return self.canonical().lattice().contains_subgroup(other.lattice())

    def complement(self) -> tuple:
        """Deterministic completion of the saturated basis to a basis of Z^n."""
        return extend_to_basis(self.canonical().basis, self.n)

    def label(self) -> str:
        if not self.basis:
            return "0"
        return ";".join(",".join(str(x) for x in v) for v in self.basis)

    def __str__(self):
        return f"<{self.label()}>"


def saturate_subspace(v: Subspace) -> Subspace:
    return v.canonical()


class LazyGraded(Mapping):
    """Per-grading lattices computed on first access; the key set is fixed up front."""

    def __init__(self, keys, compute):
        self._keys = tuple(sorted(keys))
        self._keyset = frozenset(self._keys)
        self._compute = compute
        self._done = {}

    def __getitem__(self, g):
        if g not in self._keyset:
            raise KeyError(g)
        if g not in self._done:
            self._done[g] = self._compute(g)
        return self._done[g]

    def __contains__(self, g):
        return g in self._keyset

    def __iter__(self):
        return iter(self._keys)

    def __len__(self):
        return len(self._keys)

    def __getstate__(self):
        return {"_done": {g: self[g] for g in self._keys}, "_keys": self._keys, "_keyset": self._keyset}

    def __setstate__(self, st):
        self.__dict__.update(st)
        self._compute = None


@dataclass(frozen=True, eq=False)
class SQModule:
    """Subquotient module num/den of a WindowModule, defined on ``valid`` gradings."""

    module: object
    num: dict
    den: dict

    @property
    def valid(self) -> list:
        return sorted(self.num)

    def at(self, g) -> SubquotientPresentation:
        return SubquotientPresentation(self.num[g], self.den[g])

    def free_rank(self, g) -> int:
        return self.num[g].rank - self.den[g].rank

    @classmethod
    def whole(cls, module) -> "SQModule":
        num = {g: SubgroupPresentation.full(module.rank(g)) for g in module.gradings}
        den = {g: SubgroupPresentation.zero(module.rank(g)) for g in module.gradings}
        return cls(module, num, den)

    @classmethod
    def quotient(cls, module, sub: dict) -> "SQModule":
        """module / sub."""
        num = {g: SubgroupPresentation.full(module.rank(g)) for g in module.gradings}
        return cls(module, num, {g: sub[g] for g in module.gradings})

    @classmethod
    def submodule(cls, module, sub: dict) -> "SQModule":
        den = {g: SubgroupPresentation.zero(module.rank(g)) for g in module.gradings}
        return cls(module, {g: sub[g] for g in module.gradings}, den)


# the descriptive alias used in reports
FunctorResult = SQModule


def kernel_functor(m: SQModule, v: Subspace) -> SQModule:
    """K^V: elements killed by every basis vector of V (mod the denominator)."""
    mod = m.module
    if not v.basis:
        return m
    keys = [g for g in m.valid if g + mod.degree in m.den and mod.in_window(g)]

    def num(g):
        maps = [mod.action(w, g) for w in v.basis]
        return m.num[g].preimage(maps, [m.den[g + mod.degree]] * len(maps))

    return SQModule(mod, LazyGraded(keys, num), LazyGraded(keys, lambda g: m.den[g]))


def quotient_functor(m: SQModule, v: Subspace) -> SQModule:
    """Q^V: divide by the images of the basis vectors of V (within the numerator)."""
    mod = m.module
    if not v.basis:
        return m
    keys = [g for g in m.valid if g - mod.degree in m.num and mod.in_window(g - mod.degree)]

    def den(g):
        src = g - mod.degree
        d = m.den[g]
        for w in v.basis:
            d = d + m.num[src].image(mod.action(w, src), mod.rank(g))
        return d

    return SQModule(mod, LazyGraded(keys, lambda g: m.num[g]), LazyGraded(keys, den))


def image_in(src: SQModule, tgt: SQModule) -> SQModule:
    """Image of the map src -> tgt induced by the identity on representatives."""
    keys = [g for g in src.valid if g in tgt.num]
    return SQModule(src.module, LazyGraded(keys, lambda g: src.num[g] + tgt.den[g]),
                    LazyGraded(keys, lambda g: tgt.den[g]))


def image_free_rank(src: SQModule, tgt: SQModule, g) -> int:
    """Rank of the non-torsion part of the image of src_g in tgt_g."""
    return (src.num[g] + tgt.den[g]).rank - tgt.den[g].rank


def image_nonzero(src: SQModule, tgt: SQModule, g) -> bool:
    return not tgt.den[g].contains_subgroup(src.num[g])


def qk(m: SQModule, v: Subspace) -> SQModule:
    n = m.module.n
    return quotient_functor(kernel_functor(m, v), Subspace.full(n))


def kq(m: SQModule, v: Subspace) -> SQModule:
    n = m.module.n
    return kernel_functor(quotient_functor(m, v), Subspace.full(n))


def check_v_acts_trivially(m: SQModule, v: Subspace):
    """V must act as zero on K^V / Q^V outputs; raise otherwise."""
    mod = m.module
    for g in m.valid:
        tgt = g + mod.degree
        if tgt not in m.den:
            continue
        for w in v.basis:
            a = mod.action(w, g)
            if a is None:
                continue
            if not m.den[tgt].contains_subgroup(m.num[g].image(a, mod.rank(tgt))):
                raise InvariantViolation(f"V does not act trivially at grading {g}")


def induced_action(m: SQModule, v: Subspace) -> dict:
    """Per grading, the matrices (in numerator coordinates, mod denominator) of a
    complement basis of H/V acting on m. Verifies well-definedness."""
    mod = m.module
    comp = v.complement() if v.basis else tuple(Subspace.full(mod.n).basis)
    out = {}
    for g in m.valid:
        tgt = g + mod.degree
        if tgt not in m.num:
            continue
        mats = []
        for w in comp:
            a = mod.action(w, g)
            if a is None:
                break
            img = m.num[g].image(a, mod.rank(tgt))
            if not m.num[tgt].contains_subgroup(img):
                raise InvariantViolation(f"induced action leaves the numerator at grading {g}")
            dimg = m.den[g].image(a, mod.rank(tgt))
            if not m.den[tgt].contains_subgroup(dimg):
                raise InvariantViolation(f"induced action leaves the denominator at grading {g}")
            mats.append(tuple(m.num[tgt].coordinates(x) for x in
                              (tuple(sum(r[j] * b[j] for j in range(len(b))) for r in a) for b in m.num[g].basis)))
        else:
            out[g] = (comp, mats)
    return out


def enumerate_primitive_subspaces(n: int, k: int, bound: int) -> list[Subspace]:
    """Saturated rank-k subgroups of Z^n whose row-HNF basis has entries bounded by ``bound``."""
    if k < 0 or k > n:
        raise ValueError("rank out of range")
    if k == 0:
        return [Subspace.zero(n)]
    if k == n:
        return [Subspace.full(n)]
    out = []
    seen = set()
    for pivots in combinations(range(n), k):
        for pvals in product(range(1, bound + 1), repeat=k):
            # free slots: (row, col) with col > pivot[row], col not a pivot column
            # plus slots above later pivots, reduced into [0, pivot)
            slots = []
            for r in range(k):
                for c in range(pivots[r] + 1, n):
                    if c in pivots:
                        prow = pivots.index(c)
                        slots.append((r, c, range(0, pvals[prow])))
                    else:
                        slots.append((r, c, range(-bound, bound + 1)))
            for vals in product(*(s[2] for s in slots)):
                rows = [[0] * n for _ in range(k)]
                for r in range(k):
                    rows[r][pivots[r]] = pvals[r]
                for (r, c, _), x in zip(slots, vals):
                    rows[r][c] = x
                rows = tuple(tuple(r) for r in rows)
                if maximal_minors_gcd(rows, n) != 1:
                    continue
                key = hermite_normal_form(rows, n)
                if key in seen:
                    continue
                seen.add(key)
                out.append(Subspace(n, key))
    out.sort(key=lambda s: _sort_key(s))
    return out


def _sort_key(s: Subspace):
    return tuple(tuple((abs(x), -x) for x in v) for v in s.basis)


def all_primitive_subspaces(n: int, bound: int) -> list[Subspace]:
    return [v for k in range(n + 1) for v in enumerate_primitive_subspaces(n, k, bound)]


def rank1(n: int, bound: int) -> list[Subspace]:
    return enumerate_primitive_subspaces(n, 1, bound)


def primitive_vector(v) -> bool:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g == 1


# ---------------------------------------------------------------------------
# structural lemmas, checked numerically


def group_structure(sq) -> tuple:
    """(free rank, sorted prime-power torsion) of a SubquotientPresentation."""
    fac = sq.invariant_factors()
    return fac.count(0), tuple(sorted(q for d in fac if d > 1 for q in _prime_powers(d)))


def _prime_powers(d: int) -> list[int]:
    out = []
    p = 2
    while p * p <= d:
        if d % p == 0:
            q = 1
            while d % p == 0:
                d //= p
                q *= p
            out.append(q)
        p += 1
    if d > 1:
        out.append(d)
    return out


def _tensor_groups(a: tuple, b: tuple) -> tuple:
    fa, ta = a
    fb, tb = b
    tors = [t for t in tb for _ in range(fa)] + [t for t in ta for _ in range(fb)]
    for x in ta:
        for y in tb:
            g = gcd(x, y)
            if g > 1:
                tors.append(g)
    return fa * fb, tuple(sorted(tors))


def _sum_groups(parts) -> tuple:
    free = sum(p[0] for p in parts)
    return free, tuple(sorted(t for p in parts for t in p[1]))


def tower_report(mod, v: Subspace) -> list[str]:
    """QK^V and KQ^V of a standard window are Z in one parity of gradings and 0 in the other."""
    failures = []
    whole = SQModule.whole(mod)
    for name, out in (("QK", qk(whole, v)), ("KQ", kq(whole, v))):
        ranks = {}
        for g in out.valid:
            free, tors = group_structure(out.at(g))
            if tors:
                failures.append(f"{name}^{v} has torsion {tors} at grading {g}")
            ranks[g] = free
        for g, r in ranks.items():
            if r not in (0, 1):
                failures.append(f"{name}^{v} has rank {r} at grading {g}")
            if g + 1 in ranks and r + ranks[g + 1] != 1:
                failures.append(f"{name}^{v}: ranks {r}, {ranks[g + 1]} at gradings {g}, {g + 1}")
    return failures


def tensor_modules(a, b):
    """Tensor product over Z of two finite homological modules without U.

    The basis is pairs (i, j) ordered lexicographically; H_a acts on the left
    factor, H_b on the right with the Koszul sign (-1)^(grading of the left factor).
    """
    from .hfmodel import WindowModule

    n = a.n + b.n
    ga, gb = a.gradings, b.gradings
    lo, hi = a.lo + b.lo, a.hi + b.hi
    blocks = {}
    for g in (lo + k for k in range(int(hi - lo) + 1)):
        blocks[g] = [(x, y) for x in ga for y in gb if x + y == g]
    offsets, ranks = {}, {}
    for g, pairs in blocks.items():
        off = 0
        for x, y in pairs:
            offsets[(g, x)] = off
            off += a.rank(x) * b.rank(y)
        ranks[g] = off
    actions = {}
    for g, pairs in blocks.items():
        if g - 1 not in ranks:
            continue
        mats = []
        for k in range(n):
            rows = [[0] * ranks[g] for _ in range(ranks[g - 1])]
            for x, y in pairs:
                src = offsets[(g, x)]
                if k < a.n:
                    if x - 1 not in a.ranks:
                        continue
                    am = a.actions[x][k]
                    tgt = offsets[(g - 1, x - 1)]
                    for i2, row in enumerate(am):
                        for i, c in enumerate(row):
                            if c:
                                for j in range(b.rank(y)):
                                    rows[tgt + i2 * b.rank(y) + j][src + i * b.rank(y) + j] += c
                else:
                    if y - 1 not in b.ranks:
                        continue
                    bm = b.actions[y][k - a.n]
                    sign = -1 if int(x) % 2 else 1
                    tgt = offsets[(g - 1, x)]
                    for i in range(a.rank(x)):
                        for j2, row in enumerate(bm):
                            for j, c in enumerate(row):
                                if c:
                                    rows[tgt + i * b.rank(y - 1) + j2][src + i * b.rank(y) + j] += sign * c
            mats.append(tuple(tuple(r) for r in rows))
        actions[g] = tuple(mats)
    return WindowModule(n=n, lo=lo, hi=hi, ranks=ranks, actions=actions, u={})


def kunneth_report(a, b, v1: Subspace, v2: Subspace) -> list[str]:
    """K and Q of a tensor product against the tensor product of K and Q, grading by grading."""
    from .dinv import direct_sum

    failures = []
    ab = tensor_modules(a, b)
    v = direct_sum(v1, v2)
    for name, fn in (("K", kernel_functor), ("Q", quotient_functor)):
        left = fn(SQModule.whole(ab), v)
        ra, rb = fn(SQModule.whole(a), v1), fn(SQModule.whole(b), v2)
        for g in left.valid:
            parts = [_tensor_groups(group_structure(ra.at(x)), group_structure(rb.at(g - x)))
                     for x in ra.valid if g - x in rb.num]
            lhs, rhs = group_structure(left.at(g)), _sum_groups(parts)
            # gradings where one factor is truncated by the window are skipped
            complete = all((g - x) in rb.num for x in ra.valid if (g - x) in b.ranks) and \
                all(x in ra.num for x in a.gradings if (g - x) in rb.num)
            if complete and lhs != rhs:
                failures.append(f"{name}^{v} at grading {g}: {lhs} vs {rhs}")
    return failures


def dual_swap_report(mod, v: Subspace) -> list[str]:
    """rank (Q^V M)_g = rank K_V(M^*)_g and rank (K^V M)_g = rank Q_V(M^*)_g."""
    failures = []
    dual = mod.dual()
    pairs = (("Q^V / K_V*", quotient_functor(SQModule.whole(mod), v), kernel_functor(SQModule.whole(dual), v)),
             ("K^V / Q_V*", kernel_functor(SQModule.whole(mod), v), quotient_functor(SQModule.whole(dual), v)))
    for name, x, y in pairs:
        for g in x.valid:
            if g in y.num and x.free_rank(g) != y.free_rank(g):
                failures.append(f"{name} at grading {g}: {x.free_rank(g)} vs {y.free_rank(g)}")
    return failures
