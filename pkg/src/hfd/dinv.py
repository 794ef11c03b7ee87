"""Correction terms d(Y, s, V) and d*(Y, s, V) of a window model, and property checkers.

d is the least grading in which QK^V(pi_*) : QK^V(HF^inf) -> Q(J^+) has a
non-torsion element in its image; d* uses KQ^V(pi_*) : KQ^V(HF^inf) -> KQ^V(I^+).
Every value comes with a certification flag derived from the window promises.
"""
from __future__ import annotations

import random
import weakref
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvariantViolation, ValidationError
from .functors import (
    SQModule,
    Subspace,
    all_primitive_subspaces,
    image_free_rank,
    image_in,
    image_nonzero,
    kernel_functor,
    quotient_functor,
)
from .hfmodel import HFModel, validate
from .intlinalg import SubgroupPresentation, det

DEFAULT_BOUND = 3


@dataclass(frozen=True)
class DValue:
    value: Fraction | None
    certified: bool
    witness: tuple | None = None  # (grading, coordinates)
    note: str = ""

    def __str__(self):
        if self.value is None:
            return "none"
        return f"{self.value}" + ("" if self.certified else " (uncertified)")


_VALIDATED = weakref.WeakSet()


def _check_model(m: HFModel):
    if m in _VALIDATED:
        return
    rep = validate(m)
    if not rep.ok:
        raise ValidationError(rep)
    _VALIDATED.add(m)


class _Pipeline:
    """Functor outputs for one (model, V), built lazily and shared between flavours."""

    def __init__(self, m: HFModel, v: Subspace):
        self.m = m
        self.v = v.canonical()
        self.H = Subspace.full(m.n)
        mod = m.hf_inf
        self.hf = SQModule.whole(mod)
        self.iplus = SQModule.quotient(mod, m.iminus)
        self.imin = SQModule.submodule(mod, m.iminus)
        self._cache = {}

    def get(self, name):
        if name not in self._cache:
            self._cache[name] = getattr(self, "_" + name)()
        return self._cache[name]

    def _K(self):
        return kernel_functor(self.hf, self.v)

    def _QK(self):
        return quotient_functor(self.get("K"), self.H)

    def _Jplus(self):
        return image_in(self.get("K"), self.iplus)

    def _QJplus(self):
        return quotient_functor(self.get("Jplus"), self.H)

    def _Q(self):
        return quotient_functor(self.hf, self.v)

    def _KQ(self):
        return kernel_functor(self.get("Q"), self.H)

    def _KQplus(self):
        return kernel_functor(quotient_functor(self.iplus, self.v), self.H)

    def _QKminus(self):
        return quotient_functor(kernel_functor(self.imin, self.v), self.H)

    def _KJminus(self):
        return kernel_functor(image_in(quotient_functor(self.imin, self.v), self.get("Q")), self.H)


def _witness(src: SQModule, tgt: SQModule, g):
    """A numerator element of src that stays non-torsion in tgt."""
    for b in src.num[g].basis:
        if SubgroupPresentation.span(tgt.den[g].basis + (b,), tgt.den[g].ambient_rank).rank > tgt.den[g].rank:
            return (g, b)
    return None


def _scan(grs, start, step, hit, exhaustive, what, strict=True):
    """Visit gradings from ``start`` in direction sign(step), one at a time.

    ``step`` is the U-persistence shift (+2 for minima, -2 for maxima): a hit at
    g forces a hit at g + step, which is asserted on every visited pair. Stops
    once the first hit g0 and g0 + step have both been visited, unless
    ``exhaustive``. Returns (g0, whether g0 + step was a hit, all hits seen).
    """
    up = step > 0
    order = [g for g in (grs if up else reversed(grs)) if (g >= start if up else g <= start)]
    seen = {}
    first = None
    for g in order:
        seen[g] = hit(g)
        prev = g - step
        if strict and seen.get(prev) and not seen[g]:
            raise InvariantViolation(f"{what}: class at {prev} does not persist to {g}")
        if seen[g] and first is None:
            first = g
        if first is not None and not exhaustive and g == first + step:
            break
    confirmed = first is not None and bool(seen.get(first + step))
    return first, confirmed, {g for g, h in seen.items() if h}


def _minimal(m: HFModel, src: SQModule, tgt: SQModule, what: str, exhaustive=False) -> DValue:
    grs = [g for g in src.valid if g in tgt.num]
    if not grs:
        return DValue(None, False, None, "empty window")
    # below the fullness grading I^+ vanishes, and with it the target
    start = max(m.full_below, grs[0])
    g0, confirmed, _ = _scan(grs, start, 2, lambda g: image_free_rank(src, tgt, g) > 0, exhaustive, what)
    if g0 is None:
        return DValue(None, False, None, "no non-torsion class in window")
    notes = []
    if not m.margin_ok:
        notes.append("fullness promise is less than 4 gradings above the window bottom")
    if grs[0] > m.full_below:
        notes.append("scan does not reach down to the fullness grading")
    if not confirmed:
        notes.append("persistence at value + 2 not confirmed in window")
    return DValue(g0, not notes, _witness(src, tgt, g0), "; ".join(notes))


def _maximal(m: HFModel, src: SQModule, tgt: SQModule, what: str, nontorsion=True, exhaustive=False) -> DValue:
    grs = [g for g in src.valid if g in tgt.num]
    top = m.iminus_top()
    if not grs or top is None:
        return DValue(None, False, None, "no class in window")
    # the source is built from I^-, which vanishes above its top grading
    start = min(top, grs[-1])
    if nontorsion:
        hit = lambda g: image_free_rank(src, tgt, g) > 0  # noqa: E731
    else:
        hit = lambda g: image_nonzero(src, tgt, g)  # noqa: E731
    g0, confirmed, _ = _scan(grs, start, -2, hit, exhaustive, what, strict=nontorsion)
    if g0 is None:
        return DValue(None, False, None, "no class in window")
    notes = []
    if not m.top_vanishing:
        notes.append("I^- does not vanish at the window top")
    if grs[-1] < top:
        notes.append("scan does not reach the top of I^-")
    if not confirmed:
        notes.append("persistence at value - 2 not confirmed in window")
    return DValue(g0, not notes, _witness(src, tgt, g0) if nontorsion else None, "; ".join(notes))


def d_invariant(m: HFModel, v: Subspace, exhaustive: bool = False, _p: _Pipeline | None = None) -> DValue:
    _check_model(m)
    p = _p or _Pipeline(m, v)
    return _minimal(m, p.get("QK"), p.get("QJplus"), "d", exhaustive)


def d_star(m: HFModel, v: Subspace, exhaustive: bool = False, _p: _Pipeline | None = None) -> DValue:
    _check_model(m)
    p = _p or _Pipeline(m, v)
    return _minimal(m, p.get("KQ"), p.get("KQplus"), "d*", exhaustive)


def d_minus(m: HFModel, v: Subspace, reading: str = "nontorsion", exhaustive: bool = False,
            _p: _Pipeline | None = None) -> DValue:
    """Maximal grading of QK^V(I^-) with non-torsion (or merely nonzero) image in QK^V(HF^inf)."""
    _check_model(m)
    p = _p or _Pipeline(m, v)
    return _maximal(m, p.get("QKminus"), p.get("QK"), "d-", reading == "nontorsion", exhaustive)


def d_star_minus(m: HFModel, v: Subspace, reading: str = "nontorsion", exhaustive: bool = False,
                 _p: _Pipeline | None = None) -> DValue:
    """Maximal grading of K(J^-) with non-torsion (or nonzero) image in KQ^V(HF^inf)."""
    _check_model(m)
    p = _p or _Pipeline(m, v)
    return _maximal(m, p.get("KJminus"), p.get("KQ"), "d*-", reading == "nontorsion", exhaustive)


def d_bot(m: HFModel) -> DValue:
    a = d_invariant(m, Subspace.full(m.n))
    b = d_star(m, Subspace.zero(m.n))
    if a.value != b.value:
        raise InvariantViolation(f"d(H) = {a.value} but d*(0) = {b.value}")
    return a if a.certified else b


def d_top(m: HFModel) -> DValue:
    a = d_invariant(m, Subspace.zero(m.n))
    b = d_star(m, Subspace.full(m.n))
    if a.value != b.value:
        raise InvariantViolation(f"d(0) = {a.value} but d*(H) = {b.value}")
    return a if a.certified else b


@dataclass(frozen=True)
class Entry:
    subspace: Subspace
    d: DValue
    d_star: DValue
    d_minus: DValue | None = None
    d_star_minus: DValue | None = None

    @property
    def certified(self) -> bool:
        return self.d.certified and self.d_star.certified


@dataclass
class DTable:
    model: str
    n: int
    bound: int
    entries: list = field(default_factory=list)

    def lookup(self, v: Subspace) -> Entry:
        key = v.key()
        for e in self.entries:
            if e.subspace.basis == key:
                return e
        raise KeyError(str(v))

    def values(self) -> dict:
        return {e.subspace.basis: (e.d.value, e.d_star.value) for e in self.entries}

    @property
    def certified(self) -> bool:
        return all(e.certified for e in self.entries)


def entry_for(m: HFModel, v: Subspace, minus: bool = False) -> Entry:
    v = v.canonical()
    p = _Pipeline(m, v)
    d = d_invariant(m, v, _p=p)
    ds = d_star(m, v, _p=p)
    dm = dsm = None
    if minus:
        dm = d_minus(m, v, _p=p)
        dsm = d_star_minus(m, v, _p=p)
    return Entry(v, d, ds, dm, dsm)


def _entry_job(args):
    m, v, minus = args
    return entry_for(m, v, minus)


def d_table(m: HFModel, bound: int = DEFAULT_BOUND, minus: bool = False, jobs: int = 1,
            subspaces=None) -> DTable:
    _check_model(m)
    subs = list(subspaces) if subspaces is not None else all_primitive_subspaces(m.n, bound)
    if jobs > 1 and len(subs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            entries = list(ex.map(_entry_job, [(m, v, minus) for v in subs], chunksize=4))
    else:
        entries = [entry_for(m, v, minus) for v in subs]
    return DTable(m.name, m.n, bound, entries)


# ---------------------------------------------------------------------------
# property checkers


@dataclass
class PropertyReport:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, cond: bool, msg: str):
        self.checked += 1
        if not cond:
            self.failures.append(msg)


def _mod2(x: Fraction) -> Fraction:
    return x % 2


def check_rank_inequality(m: HFModel, v_small: Subspace, v_big: Subspace, rep: PropertyReport | None = None):
    """d(V) >= d(V') - rank(V/V') and d*(V) <= d*(V') + rank(V/V'), with congruences mod 2."""
    rep = rep or PropertyReport("rank-inequality")
    if not v_big.contains(v_small):
        raise ValueError(f"{v_small} is not contained in {v_big}")
    r = v_big.rank - v_small.rank
    a, b = entry_for(m, v_small), entry_for(m, v_big)
    tag = f"{m.name}: {v_small} < {v_big}"
    for x in (a.d, a.d_star, b.d, b.d_star):
        rep.check(x.certified, f"{tag}: uncertified value")
    if a.d.value is None or b.d.value is None:
        return rep
    rep.check(b.d.value >= a.d.value - r, f"{tag}: d {b.d.value} < {a.d.value} - {r}")
    rep.check(_mod2(b.d.value) == _mod2(a.d.value - r), f"{tag}: d residues differ mod 2")
    rep.check(b.d_star.value <= a.d_star.value + r, f"{tag}: d* {b.d_star.value} > {a.d_star.value} + {r}")
    rep.check(_mod2(b.d_star.value) == _mod2(a.d_star.value + r), f"{tag}: d* residues differ mod 2")
    return rep


def random_unimodular(n: int, rng: random.Random, steps: int = 12, size: int = 2):
    """Product of random elementary matrices and sign flips."""
    m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    if n == 0:
        return ()
    for _ in range(steps):
        if n > 1:
            i, j = rng.sample(range(n), 2)
            c = rng.randint(-size, size)
            for r in range(n):
                m[r][j] += c * m[r][i]
        if rng.random() < 0.3:
            k = rng.randrange(n)
            for r in range(n):
                m[r][k] = -m[r][k]
        if n > 1 and rng.random() < 0.3:
            i, j = rng.sample(range(n), 2)
            for r in range(n):
                m[r][i], m[r][j] = m[r][j], m[r][i]
    out = tuple(tuple(r) for r in m)
    assert abs(det(out)) == 1
    return out


def random_chain(n: int, rng: random.Random):
    """A nested pair V' < V of saturated subspaces from a random unimodular basis."""
    p = random_unimodular(n, rng)
    cols = [tuple(p[r][c] for r in range(n)) for c in range(n)]
    k = rng.randint(0, n)
    l = rng.randint(0, k)
    return Subspace.of(n, cols[:l]), Subspace.of(n, cols[:k])


def check_simple(m: HFModel, bound: int = 2, table: DTable | None = None):
    """Returns (is_simple, report). When simple, the whole table must be affine in rank V."""
    rep = PropertyReport("simple")
    bot, top = d_bot(m), d_top(m)
    simple = bot.value == top.value - m.n
    if simple:
        table = table or d_table(m, bound)
        for e in table.entries:
            k = e.subspace.rank
            rep.check(e.d.value == top.value - k, f"d{e.subspace} = {e.d.value} != {top.value} - {k}")
            rep.check(e.d_star.value == bot.value + k, f"d*{e.subspace} = {e.d_star.value} != {bot.value} + {k}")
    return simple, rep


def check_duality(m: HFModel, m_rev: HFModel, bound: int = 2) -> PropertyReport:
    """d(Y, V) = -d*(-Y, V) and d*(Y, V) = -d(-Y, V) over the enumerated table."""
    rep = PropertyReport("duality")
    t, tr = d_table(m, bound), d_table(m_rev, bound)
    for e in t.entries:
        r = tr.lookup(e.subspace)
        rep.check(e.certified and r.certified, f"{e.subspace}: uncertified")
        rep.check(e.d.value == -r.d_star.value, f"d{e.subspace} = {e.d.value}, d*(-Y) = {r.d_star.value}")
        rep.check(e.d_star.value == -r.d.value, f"d*{e.subspace} = {e.d_star.value}, d(-Y) = {r.d.value}")
    return rep


def direct_sum(v: Subspace, w: Subspace) -> Subspace:
    na, nb = v.n, w.n
    vecs = [tuple(x) + (0,) * nb for x in v.basis] + [(0,) * na + tuple(y) for y in w.basis]
    return Subspace.of(na + nb, vecs)


def check_additivity(a: HFModel, b: HFModel, ab: HFModel, bound: int = 1) -> PropertyReport:
    """d(Y#Z, V+W) = d(Y, V) + d(Z, W) (and likewise d*), plus d_top additivity."""
    rep = PropertyReport("additivity")
    ta, tb = d_table(a, bound), d_table(b, bound)
    for ea in ta.entries:
        for eb in tb.entries:
            s = direct_sum(ea.subspace, eb.subspace)
            e = entry_for(ab, s)
            rep.check(e.certified and ea.certified and eb.certified, f"{s}: uncertified")
            rep.check(e.d.value == ea.d.value + eb.d.value,
                      f"d{s} = {e.d.value} != {ea.d.value} + {eb.d.value}")
            rep.check(e.d_star.value == ea.d_star.value + eb.d_star.value,
                      f"d*{s} = {e.d_star.value} != {ea.d_star.value} + {eb.d_star.value}")
    rep.check(d_top(ab).value == d_top(a).value + d_top(b).value, "d_top is not additive")
    return rep


def check_minus(m: HFModel, bound: int = 2) -> PropertyReport:
    """d^- = d - 2 and d*^- = d* - 2; both readings of d^- agree."""
    rep = PropertyReport("minus-reformulation")
    for e in d_table(m, bound, minus=True).entries:
        v = e.subspace
        rep.check(e.d_minus.certified and e.d_star_minus.certified, f"{v}: uncertified minus value")
        rep.check(e.d_minus.value == e.d.value - 2, f"d-{v} = {e.d_minus.value}, d = {e.d.value}")
        rep.check(e.d_star_minus.value == e.d_star.value - 2, f"d*-{v} = {e.d_star_minus.value}, d* = {e.d_star.value}")
        alt = d_minus(m, v, reading="nontrivial")
        rep.check(alt.value == e.d_minus.value, f"d-{v}: nontrivial reading {alt.value} vs {e.d_minus.value}")
        alt = d_star_minus(m, v, reading="nontrivial")
        rep.check(alt.value == e.d_star_minus.value,
                  f"d*-{v}: nontrivial reading {alt.value} vs {e.d_star_minus.value}")
    return rep


def check_basis_change(m: HFModel, p, bound: int = 2) -> PropertyReport:
    """d-table invariance under a change of H_1 basis (subspaces transformed accordingly)."""
    from .hfmodel import change_h1_basis
    from .intlinalg import inverse_unimodular

    rep = PropertyReport("basis-change")
    m2 = change_h1_basis(m, p)
    pinv = inverse_unimodular(p)
    for e in d_table(m, bound).entries:
        v2 = e.subspace.transform(pinv)
        e2 = entry_for(m2, v2)
        rep.check((e2.d.value, e2.d_star.value) == (e.d.value, e.d_star.value),
                  f"{e.subspace}: {(e.d.value, e.d_star.value)} vs {(e2.d.value, e2.d_star.value)}")
    return rep
