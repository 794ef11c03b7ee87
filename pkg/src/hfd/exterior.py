"""Exterior algebra over Z^n, contraction, and the standard module.

The standard module is Lambda^* H^* tensor Z[U, U^-1], with lambda_S U^m in
grading |S| - 2m + sigma. Elements of Lambda^* H act by contraction, U acts by
raising the U-power.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .errors import DimensionError, InvariantViolation, PreconditionError
from .intlinalg import (
    Matrix,
    int_solve,
    matmul,
    matvec,
    maximal_minors_gcd,
    transpose,
)


def subsets(n: int, k: int | None = None) -> list[tuple[int, ...]]:
    """Increasing multi-indices over 1..n, ordered by size then lexicographically."""
    sizes = range(n + 1) if k is None else [k]
    return [s for j in sizes for s in combinations(range(1, n + 1), j)]


def merge_sign(s: tuple[int, ...], t: tuple[int, ...]) -> int:
    """Sign of the shuffle sorting the concatenation s + t; 0 if they meet."""
    if set(s) & set(t):
        return 0
    inversions = sum(1 for a in s for b in t if a > b)
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class ExtElement:
    """Integer combination of basis monomials e_S (or lambda_S) in rank n."""

    n: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for s, c in self.coeffs.items():
            s = tuple(s)
            if list(s) != sorted(set(s)) or any(not 1 <= i <= self.n for i in s):
                raise ValueError(f"bad multi-index {s} for n={self.n}")
            if c:
                clean[s] = clean.get(s, 0) + c
        object.__setattr__(self, "coeffs", {s: c for s, c in clean.items() if c})

    @classmethod
    def basis(cls, n: int, *idx: int) -> "ExtElement":
        """The monomial e_{i1} ^ ... ^ e_{ik} with the sign of sorting."""
        e = cls(n, {(): 1})
        for i in idx:
            e = e.wedge(cls(n, {(i,): 1}))
        return e

    @classmethod
    def vector(cls, v) -> "ExtElement":
        return cls(len(v), {(i + 1,): c for i, c in enumerate(v) if c})

    def _same(self, other):
        if self.n != other.n:
            raise DimensionError(f"rank {self.n} vs {other.n}")

    def __add__(self, other):
        self._same(other)
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out.get(s, 0) + c
        return ExtElement(self.n, out)

    def __neg__(self):
        return ExtElement(self.n, {s: -c for s, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int):
        return ExtElement(self.n, {s: k * c for s, c in self.coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, ExtElement) and self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.coeffs.items()))))

    def is_zero(self) -> bool:
        return not self.coeffs

    def degrees(self) -> set[int]:
        return {len(s) for s in self.coeffs}

    def wedge(self, other: "ExtElement") -> "ExtElement":
        self._same(other)
        out = {}
        for s, a in self.coeffs.items():
            for t, b in other.coeffs.items():
                sg = merge_sign(s, t)
                if sg:
                    key = tuple(sorted(s + t))
                    out[key] = out.get(key, 0) + sg * a * b
        return ExtElement(self.n, out)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*e{''.join(map(str, s)) or '0'}" for s, c in sorted(self.coeffs.items()))


def contract_basis(j: int, s: tuple[int, ...]):
    """i_{e_j}(lambda_S) as (sign, S minus j); sign 0 when j not in S."""
    if j not in s:
        return 0, s
    sign = -1 if sum(1 for x in s if x < j) % 2 else 1
    return sign, tuple(x for x in s if x != j)


def contract(v: ExtElement, lam: ExtElement) -> ExtElement:
    """Left contraction i_v(lam), with i_{v ^ w} = i_v o i_w."""
    v._same(lam)
    out = ExtElement(lam.n, {})
    for s, c in v.coeffs.items():
        cur = dict(lam.coeffs)
        for j in reversed(s):
            nxt = {}
            for t, a in cur.items():
                sg, t2 = contract_basis(j, t)
                if sg:
                    nxt[t2] = nxt.get(t2, 0) + sg * a
            cur = nxt
        out = out + ExtElement(lam.n, {t: c * a for t, a in cur.items()})
    return out


def mst_basis(n: int, sigma: Fraction, g: Fraction) -> list[tuple[tuple[int, ...], int]]:
    """Basis (S, m) of the standard module in grading g, ordered like ``subsets``."""
    j = g - sigma
    if j.denominator != 1:
        return []
    j = int(j)
    out = []
    for s in subsets(n):
        if (len(s) - j) % 2 == 0:
            out.append((s, (len(s) - j) // 2))
    return out


def grading_range(lo: Fraction, hi: Fraction) -> list[Fraction]:
    if (hi - lo).denominator != 1:
        raise PreconditionError(f"window [{lo}, {hi}] does not have integral length")
    return [lo + k for k in range(int(hi - lo) + 1)]


def build_mst(n: int, sigma, window):
    """The standard module M^st(n) with grading offset sigma on a finite window."""
    from .hfmodel import WindowModule  # late import: hfmodel builds on this module

    sigma = Fraction(sigma)
    lo, hi = (Fraction(x) for x in window)
    if (lo - sigma).denominator != 1:
        raise PreconditionError(f"window start {lo} not congruent to sigma={sigma} mod 1")
    grs = grading_range(lo, hi)
    bases = {g: mst_basis(n, sigma, g) for g in grs}
    index = {g: {b: i for i, b in enumerate(bases[g])} for g in grs}
    ranks = {g: len(bases[g]) for g in grs}

    def contraction_matrix(i, g):
        tgt = g - 1
        rows = [[0] * ranks[g] for _ in range(ranks[tgt])]
        for col, (s, m) in enumerate(bases[g]):
            sg, t = contract_basis(i, s)
            if sg:
                rows[index[tgt][(t, m)]][col] = sg
        return tuple(tuple(r) for r in rows)

    def u_matrix(g):
        tgt = g - 2
        rows = [[0] * ranks[g] for _ in range(ranks[tgt])]
        for col, (s, m) in enumerate(bases[g]):
            rows[index[tgt][(s, m + 1)]][col] = 1
        return tuple(tuple(r) for r in rows)

    actions = {g: tuple(contraction_matrix(i, g) for i in range(1, n + 1)) for g in grs if g - 1 in ranks}
    u = {g: u_matrix(g) for g in grs if g - 2 in ranks}
    return WindowModule(n=n, lo=lo, hi=hi, ranks=ranks, actions=actions, u=u)


def mst_index(n: int, sigma, g) -> dict:
    return {b: i for i, b in enumerate(mst_basis(n, Fraction(sigma), Fraction(g)))}


def wedge_action_matrix(module, vectors, g) -> Matrix:
    """Matrix of (v_1 ^ ... ^ v_k) acting from grading g, i.e. i_{v1} o ... o i_{vk}."""
    deg = module.degree
    m = None
    cur = g
    for v in reversed(vectors):
        a = module.action(v, cur)
        if a is None:
            return None
        m = a if m is None else matmul(a, m, ncols=module.rank(g))
        cur = cur + deg
    return m


def lift_in_mst(module, g, x, vectors):
    """Solve (v_1 ^ ... ^ v_k) . x' = x for x' in grading g - k*degree.

    ``x`` lies in grading g of a standard module; ``vectors`` must extend to a
    basis of H and each of them must annihilate x. The weaker condition
    (v_1 ^ ... ^ v_k) . x = 0 does not suffice once k >= 2: for n = 2,
    i_{e1 ^ e2} kills lambda_1, yet lambda_1 is not in the image of i_{e1 ^ e2}.
    Returns the coordinates of x'.
    """
    x = tuple(x)
    k = len(vectors)
    n = module.n
    if k == 0:
        return x
    if maximal_minors_gcd([tuple(v) for v in vectors], n) != 1:
        raise PreconditionError("vectors do not extend to a basis of H")
    kill = wedge_action_matrix(module, vectors, g)
    if kill is None:
        raise PreconditionError("action leaves the grading window")
    if any(matvec(kill, x)):
        raise PreconditionError("(v_1 ^ ... ^ v_k) . x is not zero")
    for v in vectors:
        a = module.action(v, g)
        if a is None:
            raise PreconditionError("action leaves the grading window")
        if any(matvec(a, x)):
            raise PreconditionError(f"{tuple(v)} . x is not zero; every v_i must kill x for a lift to exist")
    src = g - k * module.degree
    if src not in module.ranks:
        raise PreconditionError("lift grading outside the window")
    c = wedge_action_matrix(module, vectors, src)
    if c is None:
        raise PreconditionError("action leaves the grading window")
    y = int_solve(transpose(c, module.rank(src)), x)
    if y is None:
        raise InvariantViolation(f"no lift exists for {x}; the standard-module lifting property failed")
    if matvec(c, y) != x:
        raise InvariantViolation("lift does not satisfy the contraction equation")
    return tuple(y)


def build_exterior(n: int):
    """The finite module Lambda^* H^* (no U), lambda_S in grading |S|, acted on by contraction."""
    from .hfmodel import WindowModule

    bases = {Fraction(k): subsets(n, k) for k in range(n + 1)}
    index = {g: {s: i for i, s in enumerate(b)} for g, b in bases.items()}
    actions = {}
    for g in bases:
        if g - 1 not in bases:
            continue
        mats = []
        for i in range(1, n + 1):
            rows = [[0] * len(bases[g]) for _ in range(len(bases[g - 1]))]
            for col, s in enumerate(bases[g]):
                sg, t = contract_basis(i, s)
                if sg:
                    rows[index[g - 1][t]][col] = sg
            mats.append(tuple(tuple(r) for r in rows))
        actions[g] = tuple(mats)
    ranks = {g: len(b) for g, b in bases.items()}
    return WindowModule(n=n, lo=Fraction(0), hi=Fraction(n), ranks=ranks, actions=actions, u={})
