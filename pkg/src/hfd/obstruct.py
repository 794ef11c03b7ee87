"""Applications of d-tables: linking-form metabolizers and the slice obstruction,
rational homology cobordism checks, and negative-definite filling bounds.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import isqrt, prod

from .errors import CapacityError, InputError
from .intlinalg import as_matrix, det, inverse_unimodular

METABOLIZER_CAP = 10**6


def _frac(x) -> Fraction:
    return Fraction(x)


@dataclass(frozen=True)
class LinkingForm:
    """A symmetric Q/Z-valued pairing on Z/n_1 + ... + Z/n_k."""

    factors: tuple
    pairing: tuple  # k x k Fractions, read mod 1

    def __post_init__(self):
        k = len(self.factors)
        if any(f < 1 for f in self.factors):
            raise InputError("cyclic factors must be positive")
        p = tuple(tuple(_frac(x) % 1 for x in row) for row in self.pairing)
        if len(p) != k or any(len(r) != k for r in p):
            raise InputError("pairing matrix must be square of size len(factors)")
        for i in range(k):
            for j in range(k):
                if p[i][j] != p[j][i]:
                    raise InputError(f"pairing is not symmetric at ({i}, {j})")
                if (self.factors[i] * p[i][j]).denominator != 1:
                    raise InputError(f"pairing entry ({i}, {j}) is not killed by n_{i}")
        object.__setattr__(self, "factors", tuple(int(f) for f in self.factors))
        object.__setattr__(self, "pairing", p)

    @property
    def order(self) -> int:
        return prod(self.factors)

    def elements(self):
        return product(*(range(f) for f in self.factors))

    def add(self, x, y):
        return tuple((a + b) % f for a, b, f in zip(x, y, self.factors))

    def __call__(self, x, y) -> Fraction:
        k = len(self.factors)
        return sum((x[i] * y[j] * self.pairing[i][j] for i in range(k) for j in range(k)), Fraction(0)) % 1

    def span(self, gens) -> frozenset:
        zero = tuple(0 for _ in self.factors)
        seen = {zero}
        frontier = [zero]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)


def canonical_generators(f: LinkingForm, sub: frozenset) -> tuple:
    """Greedy generating set: repeatedly take the smallest element not yet spanned."""
    gens = []
    cur = f.span(())
    for x in sorted(sub):
        if x not in cur:
            gens.append(x)
            cur = f.span(gens)
        if len(cur) == len(sub):
            break
    return tuple(gens)


@dataclass(frozen=True)
class Metabolizers:
    subgroups: tuple  # canonical generator tuples
    reason: str = ""
    elements: tuple = ()  # matching frozensets


def enumerate_metabolizers(f: LinkingForm, cap: int = METABOLIZER_CAP) -> Metabolizers:
    """All subgroups A with |A|^2 = |G| on which the form vanishes identically."""
    order = f.order
    if order > cap:
        raise CapacityError(f"group of order {order} exceeds the cap {cap}")
    root = isqrt(order)
    if root * root != order:
        return Metabolizers((), f"|G| = {order} is not a perfect square")
    elems = sorted(f.elements())
    # isotropic subgroups grown one generator at a time
    start = f.span(())
    seen = {start}
    frontier = [start]
    found = set()
    while frontier:
        nxt = []
        for a in frontier:
            if len(a) == root:
                found.add(a)
                continue
            for x in elems:
                if x in a or f(x, x) != 0 or any(f(x, y) != 0 for y in a):
                    continue
                b = f.span(canonical_generators(f, a) + (x,))
                if len(b) > root or b in seen:
                    continue
                seen.add(b)
                nxt.append(b)
        frontier = nxt
    subs = sorted(found, key=lambda s: canonical_generators(f, s))
    for a in subs:
        assert len(a) ** 2 == order and all(f(x, y) == 0 for x in a for y in a)
    return Metabolizers(tuple(canonical_generators(f, a) for a in subs), "", tuple(subs))


@dataclass(frozen=True)
class DInvariantTable:
    """(d_bot, d_top) for every spin^c structure s_0 + t, t in a finite group T."""

    b1: int
    factors: tuple
    entries: dict  # t -> (d_bot, d_top)

    def __post_init__(self):
        expected = set(product(*(range(f) for f in self.factors)))
        keys = {tuple(k) for k in self.entries}
        if keys != expected:
            raise InputError("table keys do not exhaust the declared group")
        object.__setattr__(self, "entries",
                           {tuple(k): (_frac(v[0]), _frac(v[1])) for k, v in self.entries.items()})


@dataclass(frozen=True)
class SliceVerdict:
    obstructed: bool
    reason: str
    surviving: tuple = ()

    @property
    def label(self) -> str:
        return "OBSTRUCTED" if self.obstructed else "UNOBSTRUCTED"


def slice_obstruction(table: DInvariantTable, form: LinkingForm, components: int) -> SliceVerdict:
    """For a slice link the nullity is the component count, and some metabolizer
    carries (d_bot, d_top) = (-b1/2, b1/2) on every element."""
    if tuple(table.factors) != tuple(form.factors):
        raise InputError(f"table group {table.factors} differs from form group {form.factors}")
    if table.b1 != components - 1:
        return SliceVerdict(True, f"nullity {table.b1 + 1} differs from the component count {components}")
    mets = enumerate_metabolizers(form)
    if not mets.subgroups:
        return SliceVerdict(True, mets.reason or "no metabolizer")
    want = (Fraction(-table.b1, 2), Fraction(table.b1, 2))
    ok = tuple(gens for gens, a in zip(mets.subgroups, mets.elements)
               if all(table.entries[t] == want for t in a))
    if not ok:
        return SliceVerdict(True, f"no metabolizer has (d_bot, d_top) = ({want[0]}, {want[1]}) throughout")
    return SliceVerdict(False, f"{len(ok)} of {len(mets.subgroups)} metabolizers survive", ok)


def qhcob_standard_check(table, n: int) -> bool:
    """True iff the d-table is that of #^n S^1 x S^2: d = n/2 - rank V, d* = rank V - n/2."""
    half = Fraction(n, 2)
    for e in table.entries:
        k = e.subspace.rank
        if not e.certified or e.d.value != half - k or e.d_star.value != k - half:
            return False
    return True


def negdef_bound(c1sq, b2minus: int, b1: int, rank_v: int, d) -> bool:
    """c_1^2 + b_2^- <= 4 d(Y, t, V) - 2 b_1 + 4 rank V.

    With rank V = b_1 this is the d_bot bound c_1^2 + b_2^- <= 4 d_bot + 2 b_1.
    Derivation: drilling X down to a cobordism W from #^k S^1 x S^2 to Y, where
    k is the rank of H_1(Y) -> H_1(X), gives chi(W) = b_1(Y) - k + b_2^-(X) and
    sigma(W) = -b_2^-(X), so the cobordism maps shift grading by
    (c_1^2 - 2 b_1(Y) + 2k + b_2^-(X))/4; compare against d = k/2 - rank V-bar.
    """
    return _frac(c1sq) + b2minus <= 4 * _frac(d) - 2 * b1 + 4 * rank_v


def negdef_bot_bound(c1sq, b2minus: int, b1: int, dbot) -> bool:
    return _frac(c1sq) + b2minus <= 4 * _frac(dbot) + 2 * b1


@dataclass(frozen=True)
class Lattice:
    gram: tuple

    def __post_init__(self):
        g = as_matrix(self.gram)
        r = len(g)
        if any(len(row) != r for row in g):
            raise InputError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(r) for j in range(r)):
            raise InputError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> int:
        return det(self.gram) if self.gram else 1

    @property
    def unimodular(self) -> bool:
        return abs(self.det) == 1

    @property
    def negative_definite(self) -> bool:
        """Leading principal minors alternate in sign, starting negative."""
        g = self.gram
        for k in range(1, self.rank + 1):
            m = det(tuple(row[:k] for row in g[:k]))
            if m == 0 or (m > 0) != (k % 2 == 0):
                return False
        return True

    def dual_norm(self, c) -> Fraction:
        """c^2 = c^T G^{-1} c for c in the dual lattice."""
        ginv = inverse_unimodular(self.gram)
        r = self.rank
        return Fraction(sum(c[i] * ginv[i][j] * c[j] for i in range(r) for j in range(r)))


@dataclass(frozen=True)
class CharVectorResult:
    value: int  # max of c^2 + rank
    witness: tuple
    certified: bool
    bound: int
    required_bound: int


def e8(sign: int = -1) -> Lattice:
    """The E_8 lattice (Bourbaki Cartan matrix), negative definite by default."""
    c = [[0] * 8 for _ in range(8)]
    for i in range(8):
        c[i][i] = 2
    for i, j in [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]:
        c[i][j] = c[j][i] = -1
    return Lattice(tuple(tuple(sign * x for x in row) for row in c))


def _required_bound(lat: Lattice, ginv, norm: int) -> int:
    """Box size for c covering every characteristic vector with -c^2 <= norm.

    For u = G^{-1} c and P = -G positive definite, u^T P u <= N forces
    |u_i| <= sqrt(N (P^{-1})_ii); then c = G u gives |c_i| <= sum_j |G_ij| R_j.
    """
    r = lat.rank
    radii = [isqrt(norm * -ginv[j][j]) for j in range(r)]
    return max((sum(abs(lat.gram[i][j]) * radii[j] for j in range(r)) for i in range(r)), default=0)


def char_vector_max(lat: Lattice, bound: int | None = None) -> CharVectorResult:
    """Maximum of c^2 + rank over characteristic covectors of a negative-definite unimodular lattice."""
    if not lat.unimodular:
        raise InputError(f"lattice has determinant {lat.det}, not unimodular")
    if not lat.negative_definite:
        raise InputError("lattice is not negative definite")
    r = lat.rank
    if r == 0:
        return CharVectorResult(0, (), True, 0, 0)
    ginv = inverse_unimodular(lat.gram)
    parity = [lat.gram[i][i] % 2 for i in range(r)]
    seed = tuple(parity)
    seed_norm = -int(lat.dual_norm(seed))
    if bound is None:
        bound = _required_bound(lat, ginv, seed_norm)
    best = None
    best_c = None
    ranges = [[x for x in range(-bound, bound + 1) if x % 2 == p] for p in parity]
    for c in product(*ranges):
        n2 = sum(c[i] * ginv[i][j] * c[j] for i in range(r) for j in range(r))
        if best is None or n2 > best:
            best, best_c = n2, c
    if best is None:
        return CharVectorResult(None, None, False, bound, _required_bound(lat, ginv, seed_norm))
    need = _required_bound(lat, ginv, -best)
    return CharVectorResult(best + r, tuple(best_c), bound >= need, bound, need)


@dataclass(frozen=True)
class KernelCandidate:
    subspace: object
    d: Fraction
    tight: bool


def intform_kernel_candidates(table) -> list[KernelCandidate]:
    """Subspaces V with d(V) >= b_1/2 - rank V; equality forces a diagonal intersection form."""
    b1 = table.n
    out = []
    for e in table.entries:
        floor = Fraction(b1, 2) - e.subspace.rank
        if e.d.value is not None and e.d.value >= floor:
            out.append(KernelCandidate(e.subspace, e.d.value, e.d.value == floor))
    return out
