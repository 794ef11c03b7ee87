"""Finite grading-window models of (HF^inf, I^-) for a 3-manifold with standard HF^inf.

A model stores the localized module on a window of gradings together with the
submodule I^- = im(iota_*). The quotient I^+ = HF^inf / I^- is implicit.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any

from . import exterior
from .errors import InvariantViolation, PreconditionError, ValidationError
from .intlinalg import (
    Matrix,
    SubgroupPresentation,
    SubquotientPresentation,
    as_matrix,
    det,
    identity,
    inverse_unimodular,
    matmul,
    transpose,
    zeros,
)


def _add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def _scale(c: int, a: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in r) for r in a)


@dataclass(frozen=True, eq=False)
class WindowModule:
    """A Q-graded module over Lambda^*(Z^n) (x Z[U]) restricted to gradings lo..hi.

    ``actions[g][i]`` is the matrix of the i-th basis vector of H from grading g
    to g + degree; ``u[g]`` is U from g to g + 2*degree. Either is absent when
    the target grading falls outside the window.
    """

    n: int
    lo: Fraction
    hi: Fraction
    ranks: dict
    actions: dict
    u: dict = field(default_factory=dict)
    cohomological: bool = False
    _memo: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def degree(self) -> int:
        return 1 if self.cohomological else -1

    @property
    def gradings(self) -> list[Fraction]:
        return exterior.grading_range(self.lo, self.hi)

    def rank(self, g) -> int:
        return self.ranks.get(g, 0)

    def in_window(self, g) -> bool:
        return g in self.ranks

    def action(self, w, g) -> Matrix | None:
        """Matrix of sum_i w_i A_i out of grading g, or None if it leaves the window."""
        tgt = g + self.degree
        if g not in self.ranks or tgt not in self.ranks:
            return None
        key = (tuple(w), g)
        if key not in self._memo:
            out = zeros(self.rank(tgt), self.rank(g))
            for wi, a in zip(w, self.actions[g]):
                if wi:
                    out = _add(out, _scale(wi, a))
            self._memo[key] = out
        return self._memo[key]

    def u_map(self, g) -> Matrix | None:
        if g not in self.u:
            return None
        return self.u[g]

    def dual(self) -> "WindowModule":
        """Graded dual: same gradings, transposed actions, opposite type."""
        deg = -self.degree
        # (a . phi)(x) = phi(a . x): the dual action out of g transposes the action into g
        actions = {}
        for g in self.ranks:
            src = g + deg
            if src in self.actions:
                actions[g] = tuple(transpose(a, self.rank(src)) for a in self.actions[src])
        u = {}
        for g in self.ranks:
            src = g + 2 * deg
            if src in self.u:
                u[g] = transpose(self.u[src], self.rank(src))
        return WindowModule(self.n, self.lo, self.hi, dict(self.ranks), actions, u, not self.cohomological)

    def same_as(self, other: "WindowModule") -> bool:
        return (
            self.n == other.n
            and self.lo == other.lo
            and self.hi == other.hi
            and self.ranks == other.ranks
            and self.actions == other.actions
            and self.u == other.u
            and self.cohomological == other.cohomological
        )


@dataclass(frozen=True, eq=False)
class HFModel:
    """HF^inf window plus the submodule I^- and the boundary promises.

    ``full_below``: I^-_g is all of HF^inf_g for every g < full_below.
    ``identification``: optional per-grading matrices whose columns are the
    standard-module basis expressed in hf_inf coordinates (None = identity).
    """

    name: str
    n: int
    sigma: Fraction
    hf_inf: WindowModule
    iminus: dict
    full_below: Fraction
    torsion_label: Any = "0"
    identification: dict | None = None

    @property
    def lo(self) -> Fraction:
        return self.hf_inf.lo

    @property
    def hi(self) -> Fraction:
        return self.hf_inf.hi

    @property
    def gradings(self) -> list[Fraction]:
        return self.hf_inf.gradings

    def I(self, g) -> SubgroupPresentation:
        return self.iminus[g]

    @property
    def top_vanishing(self) -> bool:
        """I^- vanishes at the two top gradings, hence (U-closure) everywhere above."""
        return all(self.iminus[g].rank == 0 for g in (self.hi, self.hi - 1) if g in self.iminus)

    @property
    def margin_ok(self) -> bool:
        return self.full_below >= self.lo + 4

    def iminus_top(self) -> Fraction | None:
        nz = [g for g in self.gradings if self.iminus[g].rank]
        return max(nz) if nz else None

    def iplus_rank(self, g) -> int:
        return self.hf_inf.rank(g) - self.iminus[g].rank

    @property
    def is_canonical(self) -> bool:
        return self.identification is None


@dataclass
class ValidationReport:
    model: str
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, msg: str):
        self.failures.append(msg)


def _is_zero(m: Matrix) -> bool:
    return not any(any(r) for r in m)


def validate(m: HFModel) -> ValidationReport:
    rep = ValidationReport(m.name)
    mod = m.hf_inf
    if mod.cohomological:
        rep.fail("hf_inf must be of homological type")
        return rep
    if mod.n != m.n:
        rep.fail(f"hf_inf rank n={mod.n} differs from b1={m.n}")
    if (mod.lo - m.sigma).denominator != 1:
        rep.fail("window start is not congruent to sigma mod 1")
        return rep
    st = exterior.build_mst(m.n, m.sigma, (mod.lo, mod.hi))
    expected_rank = 2 ** (m.n - 1) if m.n else None
    for g in st.gradings:
        if mod.rank(g) != st.rank(g):
            extra = f" (standard rank is {expected_rank})" if expected_rank else ""
            rep.fail(f"standardness: rank {mod.rank(g)} at grading {g}, expected {st.rank(g)}{extra}")
    if not rep.ok:
        return rep
    for g in mod.gradings:
        acts = mod.actions.get(g)
        if (g - 1) in mod.ranks and (acts is None or len(acts) != m.n):
            rep.fail(f"missing action matrices at grading {g}")
        if (g - 2) in mod.ranks and g not in mod.u:
            rep.fail(f"missing U matrix at grading {g}")
    if not rep.ok:
        return rep

    # (a) identification with the standard module
    if m.identification is None:
        if mod.actions != st.actions or mod.u != st.u:
            rep.fail("standardness: action matrices differ from the standard module")
    else:
        P = m.identification
        for g in mod.gradings:
            if g not in P or abs(det(P[g])) != 1:
                rep.fail(f"identification at grading {g} is missing or not unimodular")
        if rep.ok:
            for g in mod.gradings:
                if g in mod.actions:
                    for i in range(m.n):
                        lhs = matmul(mod.actions[g][i], P[g], ncols=mod.rank(g))
                        rhs = matmul(P[g - 1], st.actions[g][i], ncols=mod.rank(g))
                        if lhs != rhs:
                            rep.fail(f"standardness: action {i + 1} at grading {g} not intertwined")
                if g in mod.u:
                    if matmul(mod.u[g], P[g], ncols=mod.rank(g)) != matmul(P[g - 2], st.u[g], ncols=mod.rank(g)):
                        rep.fail(f"standardness: U at grading {g} not intertwined")

    # module relations (redundant given (a) but cheap, and catches bad identifications)
    for g in mod.gradings:
        if g in mod.actions and (g - 1) in mod.actions:
            for i in range(m.n):
                for j in range(i, m.n):
                    ij = matmul(mod.actions[g - 1][i], mod.actions[g][j], ncols=mod.rank(g))
                    ji = matmul(mod.actions[g - 1][j], mod.actions[g][i], ncols=mod.rank(g))
                    if not _is_zero(_add(ij, ji)):
                        rep.fail(f"relation: A{i + 1}A{j + 1} + A{j + 1}A{i + 1} != 0 at grading {g}")
        if g in mod.u and (g - 2) in mod.actions and g in mod.actions:
            for i in range(m.n):
                ua = matmul(mod.u[g - 1], mod.actions[g][i], ncols=mod.rank(g)) if (g - 1) in mod.u else None
                au = matmul(mod.actions[g - 2][i], mod.u[g], ncols=mod.rank(g))
                if ua is not None and ua != au:
                    rep.fail(f"relation: U does not commute with A{i + 1} at grading {g}")

    # (d) U isomorphisms in-window
    for g, um in mod.u.items():
        if mod.rank(g) != mod.rank(g - 2) or (mod.rank(g) and abs(det(um)) != 1):
            rep.fail(f"U is not an isomorphism at grading {g}")

    # (b) I^- is a submodule
    for g in mod.gradings:
        if g not in m.iminus:
            rep.fail(f"I^- missing at grading {g}")
            continue
        ig = m.iminus[g]
        if ig.ambient_rank != mod.rank(g):
            rep.fail(f"I^- at grading {g} has wrong ambient rank")
            continue
        if g in mod.actions:
            for i in range(m.n):
                img = ig.image(mod.actions[g][i], mod.rank(g - 1))
                if not m.iminus[g - 1].contains_subgroup(img):
                    rep.fail(f"closure: A{i + 1} maps I^-_{g} outside I^-_{g - 1}")
        if g in mod.u:
            img = ig.image(mod.u[g], mod.rank(g - 2))
            if not m.iminus[g - 2].contains_subgroup(img):
                rep.fail(f"closure: U maps I^-_{g} outside I^-_{g - 2}")

    # (c) fullness promise
    for g in mod.gradings:
        if g < m.full_below and g in m.iminus and m.iminus[g].rank != mod.rank(g):
            rep.fail(f"promise: I^- is not full at grading {g} < {m.full_below}")
        if g < m.full_below and g in m.iminus and m.iminus[g].rank == mod.rank(g):
            if m.iminus[g] != SubgroupPresentation.full(mod.rank(g)):
                rep.fail(f"promise: I^- has finite index but is not full at grading {g}")
    return rep


def require_valid(m: HFModel) -> HFModel:
    rep = validate(m)
    if not rep.ok:
        raise ValidationError(rep)
    return m


def lowest_nonfull(iminus: dict, module: WindowModule) -> Fraction:
    for g in module.gradings:
        if iminus[g] != SubgroupPresentation.full(module.rank(g)):
            return g
    return module.hi + 1


def make_model(name, n, sigma, window, iminus_of, torsion_label="0", full_below=None) -> HFModel:
    """Build a canonical model; ``iminus_of(g, basis)`` returns generator vectors."""
    sigma = Fraction(sigma)
    mod = exterior.build_mst(n, sigma, window)
    iminus = {}
    for g in mod.gradings:
        basis = exterior.mst_basis(n, sigma, g)
        iminus[g] = SubgroupPresentation.span(iminus_of(g, basis), len(basis))
    fb = lowest_nonfull(iminus, mod) if full_below is None else Fraction(full_below)
    return HFModel(name, n, sigma, mod, iminus, fb, torsion_label)


def shift_grading(m: HFModel, s) -> HFModel:
    s = Fraction(s)

    def rekey(d):
        return {g + s: v for g, v in d.items()}

    mod = m.hf_inf
    new = WindowModule(mod.n, mod.lo + s, mod.hi + s, rekey(mod.ranks), rekey(mod.actions), rekey(mod.u),
                       mod.cohomological)
    ident = rekey(m.identification) if m.identification is not None else None
    return HFModel(m.name, m.n, m.sigma + s, new, rekey(m.iminus), m.full_below + s, m.torsion_label, ident)


def exterior_power_matrix(q: Matrix, k: int, n: int) -> Matrix:
    """Lambda^k(q) in the basis of size-k subsets: entry (S', S) = det q[S', S]."""
    subs = exterior.subsets(n, k)
    return tuple(
        tuple(det(tuple(tuple(q[i - 1][j - 1] for j in s) for i in sp)) for s in subs)
        for sp in subs
    )


def change_h1_basis(m: HFModel, p) -> HFModel:
    """Re-express the model in a new basis of H_1: new basis vector i is column i of p.

    The graded groups and I^- are untouched; the action matrices become
    A'_i = sum_j p[j][i] A_j, and the identification with the standard module is
    composed with Lambda^*(p^{-T}).
    """
    p = as_matrix(p)
    n = m.n
    if len(p) != n or abs(det(p)) != 1:
        raise PreconditionError("basis change must be a unimodular n x n matrix")
    mod = m.hf_inf
    actions = {}
    for g, acts in mod.actions.items():
        new = []
        for i in range(n):
            acc = zeros(mod.rank(g + mod.degree), mod.rank(g))
            for j in range(n):
                if p[j][i]:
                    acc = _add(acc, _scale(p[j][i], acts[j]))
            new.append(acc)
        actions[g] = tuple(new)
    q = transpose(inverse_unimodular(p))
    powers = [exterior_power_matrix(q, k, n) for k in range(n + 1)]
    ident = {}
    for g in mod.gradings:
        basis = exterior.mst_basis(n, m.sigma, g)
        r = len(basis)
        phi = [[0] * r for _ in range(r)]
        pos = {b: i for i, b in enumerate(basis)}
        for col, (s, mm) in enumerate(basis):
            k = len(s)
            subs = exterior.subsets(n, k)
            ci = subs.index(s)
            for ri, sp in enumerate(subs):
                v = powers[k][ri][ci]
                if v:
                    phi[pos[(sp, mm)]][col] = v
        phi = as_matrix(phi)
        if m.identification is not None:
            phi = matmul(m.identification[g], phi, ncols=r)
        ident[g] = phi
    new_mod = WindowModule(n, mod.lo, mod.hi, dict(mod.ranks), actions, dict(mod.u), mod.cohomological)
    return HFModel(m.name, n, m.sigma, new_mod, dict(m.iminus), m.full_below, m.torsion_label, ident)


def canonicalize(m: HFModel) -> HFModel:
    """Transport I^- along the identification so hf_inf becomes the standard module."""
    if m.identification is None:
        return m
    iminus = {}
    for g in m.gradings:
        pinv = inverse_unimodular(m.identification[g])
        iminus[g] = m.iminus[g].image(pinv, m.hf_inf.rank(g))
    mod = exterior.build_mst(m.n, m.sigma, (m.lo, m.hi))
    return HFModel(m.name, m.n, m.sigma, mod, iminus, m.full_below, m.torsion_label, None)


def hodge_sign(s: tuple[int, ...], n: int) -> int:
    """Sign c_S with i_{e_j}(lambda_S) -> e_j ^ (c_S e_{S^c}) intertwining contraction and wedge."""
    comp = tuple(i for i in range(1, n + 1) if i not in s)
    k = len(s)
    return exterior.merge_sign(s, comp) * (-1 if (k * (k - 1) // 2) % 2 else 1)


def reverse_orientation(m: HFModel) -> HFModel:
    """Model of (-Y, s): HF^inf_g(-Y) = Hom(HF^inf_{-g-2}(Y), Z), I^-(-Y)_g = Ann I^-(Y)_{-g-2}."""
    m = canonicalize(m)
    n = m.n
    sigma = -n - m.sigma - 2
    lo, hi = -m.hi - 2, -m.lo - 2
    mod = exterior.build_mst(n, sigma, (lo, hi))
    full = set(range(1, n + 1))
    phis = {}
    iminus = {}
    for g in mod.gradings:
        h = -g - 2
        basis = exterior.mst_basis(n, sigma, g)
        old = {b: i for i, b in enumerate(exterior.mst_basis(n, m.sigma, h))}
        r = len(basis)
        # columns: canonical basis of -Y in dual coordinates of HF_h(Y)
        phi = [[0] * r for _ in range(r)]
        for col, (s, mm) in enumerate(basis):
            comp = tuple(sorted(full - set(s)))
            phi[old[(comp, -mm)]][col] = hodge_sign(s, n)
        phi = as_matrix(phi)
        phis[g] = phi
        ann = m.iminus[h].annihilator()
        iminus[g] = ann.image(transpose(phi, r), r)  # phi is a signed permutation: inverse = transpose
    # the transposed action of Y must match the standard action of -Y under phi
    for g in mod.gradings:
        h = -g - 2
        if (g - 1) in mod.ranks:
            for i in range(n):
                transposed = transpose(m.hf_inf.actions[h + 1][i], mod.rank(g))
                lhs = matmul(transposed, phis[g], ncols=mod.rank(g))
                rhs = matmul(phis[g - 1], mod.actions[g][i], ncols=mod.rank(g))
                if lhs != rhs:
                    raise InvariantViolation(f"duality identification fails for A{i + 1} at grading {g}")
    fb = lowest_nonfull(iminus, mod)
    name = m.name[1:] if m.name.startswith("-") else "-" + m.name
    return HFModel(name, n, sigma, mod, iminus, fb, m.torsion_label, None)


def _u_free(m: HFModel) -> bool:
    mod = m.hf_inf
    for g in mod.gradings:
        up = g + 2
        if up in mod.u:
            img = m.iminus[up].image(mod.u[up], mod.rank(g))
        else:
            img = SubgroupPresentation.zero(mod.rank(g))
        if SubquotientPresentation(m.iminus[g], img).torsion():
            return False
    return True


def _iminus_ext(m: HFModel, g: Fraction):
    """Generators of I^- at an arbitrary grading, using the boundary promises."""
    basis = exterior.mst_basis(m.n, m.sigma, g)
    if g in m.iminus:
        return basis, m.iminus[g].basis
    if g < m.lo:
        return basis, identity(len(basis))
    return basis, ()


def connected_sum(a: HFModel, b: HFModel) -> HFModel:
    """Model of (Y # Z, s # t) from the tensor product of I^- over Z[U], shifted up by 2."""
    a, b = canonicalize(a), canonicalize(b)
    for m in (a, b):
        if not m.top_vanishing:
            raise PreconditionError(f"{m.name}: I^- must vanish at the top two window gradings")
        if m.full_below <= m.lo:
            raise PreconditionError(f"{m.name}: fullness promise does not reach inside the window")
        if not _u_free(m):
            raise PreconditionError(f"{m.name}: I^- is not U-free; Tor corrections are out of scope")
    n = a.n + b.n
    sigma = a.sigma + b.sigma
    ta, tb = a.iminus_top(), b.iminus_top()
    if ta is None or tb is None:
        raise PreconditionError("I^- is empty in window")
    lo = a.full_below + b.full_below - 6
    hi = max(ta + tb + 2 + 8, lo + 12)
    mod = exterior.build_mst(n, sigma, (lo, hi))
    iminus = {}
    for g in mod.gradings:
        target = {bb: i for i, bb in enumerate(exterior.mst_basis(n, sigma, g))}
        gens = []
        g1 = g - 2 - tb
        while g1 <= ta:
            g2 = g - 2 - g1
            basis1, gen1 = _iminus_ext(a, g1)
            basis2, gen2 = _iminus_ext(b, g2)
            if gen1 and gen2:
                for x in gen1:
                    for y in gen2:
                        v = [0] * len(target)
                        for i, xc in enumerate(x):
                            if not xc:
                                continue
                            s, m1 = basis1[i]
                            for j, yc in enumerate(y):
                                if not yc:
                                    continue
                                t, m2 = basis2[j]
                                key = (s + tuple(k + a.n for k in t), m1 + m2 - 1)
                                v[target[key]] += xc * yc
                        gens.append(v)
            g1 += 1
        iminus[g] = SubgroupPresentation.span(gens, len(target))
    fb = lowest_nonfull(iminus, mod)
    return HFModel(f"{a.name}#{b.name}", n, sigma, mod, iminus, fb, (a.torsion_label, b.torsion_label), None)


def with_name(m: HFModel, name: str) -> HFModel:
    return replace(m, name=name)
