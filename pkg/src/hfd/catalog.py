"""Hard-coded example models with known correction terms.

All models are canonical (hf_inf is literally the standard module) and I^- is
spanned by standard basis elements lambda_S U^m, so each builder reduces to a
predicate on (S, m).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .hfmodel import HFModel, make_model, require_valid

# gradings kept below the fullness grading and above the top of I^-; six below
# leaves room for the d^- witnesses at d - 4, four above for d + 2 at the top
MARGIN_BELOW = 6
MARGIN_ABOVE = 4


def _unit_span(pred):
    def iminus_of(g, basis):
        out = []
        for i, (s, m) in enumerate(basis):
            if pred(s, m):
                v = [0] * len(basis)
                v[i] = 1
                out.append(v)
        return out

    return iminus_of


def _window(full_below: Fraction, top: Fraction):
    return full_below - MARGIN_BELOW, top + MARGIN_ABOVE


def build_s1s2(n: int) -> HFModel:
    """#^n S^1 x S^2 with its torsion spin^c structure; n = 0 gives S^3.

    The top generator lambda_{1..n} sits in grading n/2, and I^- = U * HF^inf.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    sigma = Fraction(-n, 2)
    m = make_model(f"s1s2-{n}", n, sigma, _window(sigma, Fraction(n, 2)),
                   _unit_span(lambda s, k: k >= 1))
    return require_valid(m)


def build_trefoil_surgery() -> HFModel:
    """0-surgery on the right-handed trefoil, torsion spin^c structure.

    HF^inf has rank 1 in each half-integral grading; the basis vector in
    grading g = 1/2 mod 2 is lambda_1 U^m and beta sends it to lambda_0 U^m.
    I^- contains lambda_1 U^m for m >= 2 and lambda_0 U^m for m >= 1.
    """
    sigma = Fraction(-1, 2)
    pred = lambda s, k: k >= (2 if s else 1)  # noqa: E731
    m = make_model("trefoil0", 1, sigma, _window(Fraction(-3, 2), Fraction(1, 2)), _unit_span(pred))
    return require_valid(m)


def build_example_hyp() -> HFModel:
    """S^1 x S^2 # S^3_0(right-handed trefoil), with H_1 basis (alpha, beta).

    Generators per U-power: a = lambda_12 (grading 1), b = lambda_2, c = -lambda_1
    (grading 0), d = -lambda_0 (grading -1), so alpha: a -> b, c -> d and
    beta: a -> c, b -> -d. I^- holds U^m c, U^m d for m >= 1 and U^m a, U^m b for m >= 2.
    """
    sigma = Fraction(-1)

    def pred(s, k):
        return k >= (2 if 2 in s else 1)

    m = make_model("example-hyp", 2, sigma, _window(Fraction(-2), Fraction(1)), _unit_span(pred))
    return require_valid(m)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    builder: Callable
    params: dict = field(default_factory=dict)
    note: str = ""

    def build(self, **kw) -> HFModel:
        args = {**self.params, **kw}
        return self.builder(**args)


CATALOG = {
    "s1s2": CatalogEntry(
        "s1s2", build_s1s2, {"n": 2},
        "#^n S^1 x S^2: top generator in grading n/2, I^- = U * HF^inf; d = n/2 - rank V",
    ),
    "trefoil0": CatalogEntry(
        "trefoil0", build_trefoil_surgery, {},
        "0-surgery on the right-handed trefoil: d_bot = -1/2, d_top = -3/2",
    ),
    "example-hyp": CatalogEntry(
        "example-hyp", build_example_hyp, {},
        "S^1 x S^2 # S^3_0(trefoil): d_bot = d_top = -1, d<p alpha + q beta> = 0 iff p = 0",
    ),
}


def build(name: str, **kw) -> HFModel:
    if name not in CATALOG:
        raise KeyError(f"unknown catalog model {name!r}; choose from {', '.join(CATALOG)}")
    return CATALOG[name].build(**kw)


def catalog_models(max_n: int = 2) -> list[HFModel]:
    """The standard test battery: S_n for n <= max_n plus the two trefoil models."""
    return [build_s1s2(n) for n in range(max_n + 1)] + [build_trefoil_surgery(), build_example_hyp()]
