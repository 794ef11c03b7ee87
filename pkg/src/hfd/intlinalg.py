"""Exact integer linear algebra: normal forms, subgroups and subquotients of Z^r.

Matrices are tuples of row tuples of Python ints; vectors are tuples of ints.
A matrix with zero rows carries no column count, so functions that need one
take it explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass
from operator import mul
from typing import Iterable, Sequence

from .errors import DimensionError, DomainError

Vector = tuple
Matrix = tuple


def as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> Matrix:
    return tuple((0,) * c for _ in range(r))


def transpose(m: Matrix, ncols: int | None = None) -> Matrix:
    if not m:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*m))


def matmul(a: Matrix, b: Matrix, inner: int | None = None, ncols: int | None = None) -> Matrix:
    if not a:
        return ()
    bt = transpose(b, ncols)
    return tuple(tuple(sum(map(mul, row, col)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence[int]) -> Vector:
    return tuple(sum(map(mul, row, v)) for row in a)


def vec_add(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(x + y for x, y in zip(u, v))


def vec_scale(c: int, v: Sequence[int]) -> Vector:
    return tuple(c * x for x in v)


def lincomb(coeffs: Sequence[int], vectors: Sequence[Sequence[int]], dim: int) -> Vector:
    out = [0] * dim
    for c, v in zip(coeffs, vectors):
        if c:
            for i, x in enumerate(v):
                out[i] += c * x
    return tuple(out)


def det(m: Matrix) -> int:
    """Bareiss fraction-free determinant."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _hnf(rows: Sequence[Sequence[int]], ncols: int, track: bool = False):
    """Row Hermite normal form.

    Returns (h, t, rank) with t unimodular and t @ rows == h. The first
    ``rank`` rows of h are the echelon basis with positive pivots and entries
    above each pivot reduced into [0, pivot); the remaining rows are zero, so
    the matching rows of t span the left kernel.
    """
    a = [list(r) for r in rows]
    m = len(a)
    t = [[1 if i == j else 0 for j in range(m)] for i in range(m)] if track else None
    pr = 0
    for col in range(ncols):
        if pr == m:
            break
        while True:
            nz = [i for i in range(pr, m) if a[i][col]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][col]))
            if p != pr:
                a[p], a[pr] = a[pr], a[p]
                if track:
                    t[p], t[pr] = t[pr], t[p]
            piv = a[pr][col]
            clean = True
            for i in range(pr + 1, m):
                if a[i][col]:
                    q = a[i][col] // piv
                    ai, ap = a[i], a[pr]
                    for j in range(col, ncols):
                        ai[j] -= q * ap[j]
                    if track:
                        ti, tp = t[i], t[pr]
                        for j in range(m):
                            ti[j] -= q * tp[j]
                    if ai[col]:
                        clean = False
            if clean:
                break
        if not any(a[i][col] for i in range(pr, m)):
            continue
        if a[pr][col] < 0:
            a[pr] = [-x for x in a[pr]]
            if track:
                t[pr] = [-x for x in t[pr]]
        piv = a[pr][col]
        for i in range(pr):
            q = a[i][col] // piv
            if q:
                for j in range(col, ncols):
                    a[i][j] -= q * a[pr][j]
                if track:
                    for j in range(m):
                        t[i][j] -= q * t[pr][j]
        pr += 1
    h = tuple(tuple(r) for r in a)
    return h, (tuple(tuple(r) for r in t) if track else None), pr


def hermite_normal_form(rows: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Nonzero rows of the row HNF; a canonical basis of the row span."""
    h, _, r = _hnf(rows, ncols)
    return h[:r]


def rank(rows: Sequence[Sequence[int]], ncols: int) -> int:
    return _hnf(rows, ncols)[2]


def kernel(m: Matrix, ncols: int) -> Matrix:
    """Saturated integer basis (HNF) of {x in Z^ncols : m x = 0}."""
    if not m or not any(any(r) for r in m):
        return identity(ncols)
    cols = transpose(m)
    _, t, r = _hnf(cols, len(m), track=True)
    return hermite_normal_form(t[r:], ncols)


def int_solve(columns: Sequence[Sequence[int]], x: Sequence[int]):
    """Integer coefficients y with sum_j y_j columns[j] == x, or None."""
    dim = len(x)
    if not columns:
        return () if not any(x) else None
    h, t, r = _hnf(columns, dim, track=True)
    rest = list(x)
    z = [0] * r
    for i in range(r):
        row = h[i]
        p = next(j for j in range(dim) if row[j])
        if rest[p] % row[p]:
            return None
        c = rest[p] // row[p]
        z[i] = c
        if c:
            for j in range(p, dim):
                rest[j] -= c * row[j]
    if any(rest):
        return None
    return lincomb(z, t[:r], len(columns))


def smith_normal_form(m: Sequence[Sequence[int]], ncols: int | None = None):
    """Return (s, l, r) with l @ m @ r == s, s diagonal with d1 | d2 | ...

    Pivots are chosen by minimal absolute value. l and r are unimodular.
    """
    a = [list(r) for r in m]
    rows = len(a)
    cols = ncols if ncols is not None else (len(a[0]) if a else 0)
    lm = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    rm = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def row_op(i, k, q):  # row_i -= q * row_k
        a[i] = [x - q * y for x, y in zip(a[i], a[k])]
        lm[i] = [x - q * y for x, y in zip(lm[i], lm[k])]

    def col_op(j, k, q):  # col_j -= q * col_k
        for row in a:
            row[j] -= q * row[k]
        for row in rm:
            row[j] -= q * row[k]

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < best[0]):
                    best = (abs(a[i][j]), i, j)
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        lm[t], lm[i] = lm[i], lm[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        for row in rm:
            row[t], row[j] = row[j], row[t]
        piv = a[t][t]
        dirty = False
        for i in range(t + 1, rows):
            if a[i][t]:
                row_op(i, t, a[i][t] // piv)
                dirty = dirty or bool(a[i][t])
        for j in range(t + 1, cols):
            if a[t][j]:
                col_op(j, t, a[t][j] // piv)
                dirty = dirty or bool(a[t][j])
        if dirty:
            continue
        bad = next(
            (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % piv),
            None,
        )
        if bad is not None:
            row_op(t, bad, -1)
            continue
        if piv < 0:
            a[t] = [-x for x in a[t]]
            lm[t] = [-x for x in lm[t]]
        t += 1
    return as_matrix(a), as_matrix(lm), as_matrix(rm)


def diagonal(s: Matrix) -> list[int]:
    return [s[i][i] for i in range(min(len(s), len(s[0]) if s else 0))]


def invariant_factors(m: Sequence[Sequence[int]], ncols: int | None = None) -> list[int]:
    s, _, _ = smith_normal_form(m, ncols)
    return [d for d in diagonal(s) if d]


def extend_to_basis(vectors: Sequence[Sequence[int]], dim: int) -> Matrix:
    """Complete a primitive family to a basis of Z^dim.

    Returns the added vectors (dim - k of them), chosen deterministically
    from the SNF column transform of the family.
    """
    k = len(vectors)
    if k == 0:
        return identity(dim)
    s, l, r = smith_normal_form(vectors, dim)
    if any(abs(d) != 1 for d in diagonal(s)) or len(invariant_factors(vectors, dim)) != k:
        raise DomainError("family is not primitive; cannot extend to a basis")
    # l @ V @ r = [I | 0]: columns k.. of r span a complement of V^perp-dual;
    # the rows of inverse(r) indexed k.. extend V.
    rinv = transpose(_inverse_unimodular(transpose(r)))
    return tuple(rinv[i] for i in range(k, dim))


def _inverse_unimodular(m: Matrix) -> Matrix:
    n = len(m)
    cols = [int_solve(m and transpose(m), e) for e in identity(n)]
    if any(c is None for c in cols):
        raise DomainError("matrix is not unimodular")
    return transpose(tuple(cols))


def inverse_unimodular(m: Matrix) -> Matrix:
    return _inverse_unimodular(as_matrix(m))


def maximal_minors_gcd(vectors: Sequence[Sequence[int]], dim: int) -> int:
    """gcd of k x k minors; equals 1 exactly when the family is primitive."""
    k = len(vectors)
    if k == 0:
        return 1
    fac = invariant_factors(vectors, dim)
    if len(fac) < k:
        return 0
    out = 1
    for d in fac:
        out *= d
    return out


@dataclass(frozen=True)
class SubgroupPresentation:
    """A subgroup of Z^ambient_rank, stored by its canonical HNF basis."""

    ambient_rank: int
    basis: Matrix = ()

    @classmethod
    def span(cls, vectors: Iterable[Sequence[int]], ambient_rank: int) -> "SubgroupPresentation":
        vecs = [tuple(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_rank:
                raise DimensionError(f"vector of length {len(v)} in Z^{ambient_rank}")
        return cls(ambient_rank, hermite_normal_form(vecs, ambient_rank))

    @classmethod
    def zero(cls, ambient_rank: int) -> "SubgroupPresentation":
        return cls(ambient_rank, ())

    @classmethod
    def full(cls, ambient_rank: int) -> "SubgroupPresentation":
        return cls(ambient_rank, identity(ambient_rank))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def generators(self) -> Matrix:
        """Generators as the columns of an ambient_rank x rank matrix."""
        return transpose(self.basis, self.ambient_rank)

    def _check(self, other: "SubgroupPresentation"):
        if other.ambient_rank != self.ambient_rank:
            raise DimensionError(f"Z^{self.ambient_rank} vs Z^{other.ambient_rank}")

    def __contains__(self, v) -> bool:
        return int_solve(self.basis, tuple(v)) is not None

    def contains_subgroup(self, other: "SubgroupPresentation") -> bool:
        self._check(other)
        return all(v in self for v in other.basis)

    def __add__(self, other: "SubgroupPresentation") -> "SubgroupPresentation":
        self._check(other)
        if not other.basis:
            return self
        if not self.basis:
            return other
        return SubgroupPresentation.span(self.basis + other.basis, self.ambient_rank)

    def intersect(self, other: "SubgroupPresentation") -> "SubgroupPresentation":
        self._check(other)
        if not self.basis or not other.basis:
            return SubgroupPresentation.zero(self.ambient_rank)
        k = self.rank
        stacked = self.basis + tuple(vec_scale(-1, v) for v in other.basis)
        # coefficient vectors (x, y) with x.B1 = y.B2
        coeffs = kernel(transpose(stacked, self.ambient_rank), len(stacked))
        vecs = [lincomb(c[:k], self.basis, self.ambient_rank) for c in coeffs]
        return SubgroupPresentation.span(vecs, self.ambient_rank)

    def annihilator(self) -> "SubgroupPresentation":
        """{y : y . x = 0 for all x in self}."""
        return SubgroupPresentation(self.ambient_rank, kernel(self.basis, self.ambient_rank))

    def saturate(self) -> "SubgroupPresentation":
        """Smallest primitive subgroup containing self."""
        ann = self.annihilator()
        return SubgroupPresentation(self.ambient_rank, kernel(ann.basis, self.ambient_rank))

    def is_saturated(self) -> bool:
        return self.saturate() == self

    def image(self, m: Matrix, target_rank: int) -> "SubgroupPresentation":
        """Image under x -> m x (m is target_rank x ambient_rank)."""
        if not self.basis or not m:
            return SubgroupPresentation.zero(target_rank)
        return SubgroupPresentation.span((matvec(m, v) for v in self.basis), target_rank)

    def preimage(self, maps: Sequence[Matrix], targets: Sequence["SubgroupPresentation"]) -> "SubgroupPresentation":
        """{x in self : maps[i] x in targets[i] for every i}."""
        if not self.basis:
            return self
        k = self.rank
        blocks = []
        extra = 0
        for m, tgt in zip(maps, targets):
            blocks.append((m, tgt, extra))
            extra += tgt.rank
        total = k + extra
        # linear map Z^total -> prod Z^{r_i}: (c, e_1, ...) -> (m_i B c - e_i T_i)
        rows = []
        for m, tgt, off in blocks:
            imgs = [matvec(m, v) if m else (0,) * tgt.ambient_rank for v in self.basis]
            for j in range(tgt.ambient_rank):
                row = [imgs[c][j] for c in range(k)] + [0] * extra
                for e, tv in enumerate(tgt.basis):
                    row[k + off + e] = -tv[j]
                rows.append(tuple(row))
        if not rows:
            return self
        ker = kernel(tuple(rows), total)
        vecs = [lincomb(c[:k], self.basis, self.ambient_rank) for c in ker]
        return SubgroupPresentation.span(vecs, self.ambient_rank)

    @staticmethod
    def kernel_of_map(m: Matrix, source_rank: int) -> "SubgroupPresentation":
        return SubgroupPresentation(source_rank, kernel(m, source_rank))

    def coordinates(self, v: Sequence[int]):
        """Coefficients of v in the stored basis; DomainError if v is not a member."""
        c = int_solve(self.basis, tuple(v))
        if c is None:
            raise DomainError(f"{tuple(v)} is not in the subgroup")
        return c


def subgroup_ops(a: SubgroupPresentation, b: SubgroupPresentation | None, op: str,
                 matrix: Matrix | None = None, target_rank: int | None = None) -> SubgroupPresentation:
    """Dispatcher over the subgroup calculus (sum, intersect, kernel, image, saturate)."""
    if op == "sum":
        return a + b
    if op == "intersect":
        return a.intersect(b)
    if op == "saturate":
        return a.saturate()
    if op == "kernel-of-map":
        m = as_matrix(matrix)
        if m and len(m[0]) != a.ambient_rank:
            raise DimensionError("map source does not match subgroup ambient rank")
        ker = SubgroupPresentation.kernel_of_map(m, a.ambient_rank)
        return ker.intersect(a)
    if op == "image-of-map":
        m = as_matrix(matrix)
        if m and len(m[0]) != a.ambient_rank:
            raise DimensionError("map source does not match subgroup ambient rank")
        return a.image(m, target_rank if target_rank is not None else len(m))
    raise ValueError(f"unknown subgroup op {op!r}")


@dataclass(frozen=True)
class SubquotientPresentation:
    numerator: SubgroupPresentation
    denominator: SubgroupPresentation

    def __post_init__(self):
        if self.numerator.ambient_rank != self.denominator.ambient_rank:
            raise DimensionError("numerator and denominator ambient ranks differ")
        if not self.numerator.contains_subgroup(self.denominator):
            raise DomainError("denominator is not contained in numerator")

    @property
    def ambient_rank(self) -> int:
        return self.numerator.ambient_rank

    @property
    def free_rank(self) -> int:
        return self.numerator.rank - self.denominator.rank

    def invariant_factors(self) -> list[int]:
        """Invariant factors of numerator/denominator; 0 marks a free summand."""
        k = self.numerator.rank
        rel = [self.numerator.coordinates(v) for v in self.denominator.basis]
        fac = invariant_factors(rel, k) if rel else []
        torsion = [d for d in fac if d != 1]
        return torsion + [0] * (k - len(fac))

    def torsion(self) -> list[int]:
        return [d for d in self.invariant_factors() if d > 1]

    def is_nontorsion(self, x: Sequence[int]) -> bool:
        return nontorsion_class(x, self)


def nontorsion_class(x: Sequence[int], q: SubquotientPresentation) -> bool:
    """True iff the class of x in q has infinite order."""
    x = tuple(x)
    if len(x) != q.ambient_rank:
        raise DimensionError("vector length does not match ambient rank")
    if x not in q.numerator:
        raise DomainError(f"{x} is not in the numerator subgroup")
    if not any(x):
        return False
    return rank(q.denominator.basis + (x,), q.ambient_rank) > q.denominator.rank
