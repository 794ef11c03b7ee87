"""JSON encoding of models, d-tables and reports. Rationals travel as "p/q" strings."""
from __future__ import annotations

import hashlib
import json
import re
from fractions import Fraction
from importlib import resources

from .errors import InputError
from .functors import Subspace
from .hfmodel import HFModel, WindowModule
from .intlinalg import SubgroupPresentation, as_matrix

FORMAT = "hfd-model/1"
_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")


def rat(x) -> str:
    return str(Fraction(x))


def parse_rat(s, what="value") -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise InputError(f"{what}: expected a rational string like \"-3/2\", got {s!r}")
    if isinstance(s, str) and not _RATIONAL.match(s.strip()):
        raise InputError(f"{what}: malformed rational {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{what}: {exc}") from None


def _mat(m) -> list:
    return [list(r) for r in m]


def _label(x):
    if isinstance(x, tuple):
        return [_label(y) for y in x]
    return x


def _unlabel(x):
    if isinstance(x, list):
        return tuple(_unlabel(y) for y in x)
    return x


def model_to_doc(m: HFModel) -> dict:
    mod = m.hf_inf
    gs = mod.gradings
    doc = {
        "format": FORMAT,
        "name": m.name,
        "b1": m.n,
        "sigma": rat(m.sigma),
        "window": {"lo": rat(mod.lo), "hi": rat(mod.hi)},
        "hf_inf": {
            "ranks": {rat(g): mod.rank(g) for g in gs},
            "U": {rat(g): _mat(mod.u[g]) for g in gs if g in mod.u},
            "A": {rat(g): [_mat(a) for a in mod.actions[g]] for g in gs if g in mod.actions},
        },
        "iminus": {rat(g): _mat(m.iminus[g].basis) for g in gs},
        "promises": {"full_below": rat(m.full_below)},
        "torsion_label": _label(m.torsion_label),
    }
    if m.identification is not None:
        doc["identification"] = {rat(g): _mat(m.identification[g]) for g in gs}
    return doc


def compact_json(obj) -> str:
    """Indented JSON with innermost integer arrays kept on one line."""
    text = json.dumps(obj, indent=2)
    return re.sub(r"\[\s*((?:-?\d+,\s*)*-?\d+)\s*\]",
                  lambda mt: "[" + ", ".join(x.strip() for x in mt.group(1).split(",")) + "]", text)


def dumps_model(m: HFModel) -> str:
    return compact_json(model_to_doc(m)) + "\n"


def _get(doc, key, what="model"):
    if key not in doc:
        raise InputError(f"{what}: missing field {key!r}")
    return doc[key]


def _graded(d, what):
    if not isinstance(d, dict):
        raise InputError(f"{what}: expected an object keyed by grading")
    return {parse_rat(k, f"{what} grading"): v for k, v in d.items()}


def _check_matrix(x, rows, cols, what):
    if not isinstance(x, list) or len(x) != rows or any(
            not isinstance(r, list) or len(r) != cols or any(isinstance(c, bool) or not isinstance(c, int) for c in r)
            for r in x):
        raise InputError(f"{what}: expected a {rows} x {cols} integer matrix")
    return as_matrix(x) if rows else ()


def model_from_doc(doc) -> HFModel:
    if not isinstance(doc, dict):
        raise InputError("model: expected a JSON object")
    fmt = doc.get("format", FORMAT)
    if fmt != FORMAT:
        raise InputError(f"model: unsupported format {fmt!r}")
    name = _get(doc, "name")
    n = _get(doc, "b1")
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise InputError("model: b1 must be a non-negative integer")
    sigma = parse_rat(_get(doc, "sigma"), "sigma")
    win = _get(doc, "window")
    lo, hi = parse_rat(_get(win, "lo", "window"), "window.lo"), parse_rat(_get(win, "hi", "window.hi"), "window.hi")
    if hi < lo or (hi - lo).denominator != 1:
        raise InputError("window: hi - lo must be a non-negative integer")
    hf = _get(doc, "hf_inf")
    ranks = {g: r for g, r in _graded(_get(hf, "ranks", "hf_inf"), "ranks").items()}
    gs = [lo + k for k in range(int(hi - lo) + 1)]
    if set(ranks) != set(gs):
        raise InputError("hf_inf.ranks must list every grading of the window")
    for g, r in ranks.items():
        if isinstance(r, bool) or not isinstance(r, int) or r < 0:
            raise InputError(f"ranks: bad rank at grading {g}")
    u = {}
    for g, x in _graded(hf.get("U", {}), "U").items():
        if g not in ranks or g - 2 not in ranks:
            raise InputError(f"U: grading {g} has no target in the window")
        u[g] = _check_matrix(x, ranks[g - 2], ranks[g], f"U at {g}")
    actions = {}
    for g, mats in _graded(hf.get("A", {}), "A").items():
        if g not in ranks or g - 1 not in ranks:
            raise InputError(f"A: grading {g} has no target in the window")
        if not isinstance(mats, list) or len(mats) != n:
            raise InputError(f"A at {g}: expected {n} matrices")
        actions[g] = tuple(_check_matrix(x, ranks[g - 1], ranks[g], f"A{i + 1} at {g}") for i, x in enumerate(mats))
    iminus = {}
    for g, gens in _graded(_get(doc, "iminus"), "iminus").items():
        if g not in ranks:
            raise InputError(f"iminus: grading {g} outside the window")
        if not isinstance(gens, list):
            raise InputError(f"iminus at {g}: expected a list of vectors")
        vecs = _check_matrix(gens, len(gens), ranks[g], f"iminus at {g}")
        iminus[g] = SubgroupPresentation.span(vecs, ranks[g])
    if set(iminus) != set(gs):
        raise InputError("iminus must list every grading of the window")
    ident = None
    if "identification" in doc:
        ident = {g: _check_matrix(x, ranks[g], ranks[g], f"identification at {g}")
                 for g, x in _graded(doc["identification"], "identification").items()}
    prom = _get(doc, "promises")
    fb = parse_rat(_get(prom, "full_below", "promises"), "promises.full_below")
    mod = WindowModule(n, lo, hi, ranks, actions, u)
    return HFModel(name, n, sigma, mod, iminus, fb, _unlabel(doc.get("torsion_label", "0")), ident)


def loads_model(text: str) -> HFModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None
    return model_from_doc(doc)


def subspace_from_text(text: str, n: int) -> Subspace:
    """Parse "a1,..,an;b1,..,bn" (one vector per ';'); "" or "0" is the zero subspace, "H" all of H."""
    text = text.strip()
    if text in ("", "0"):
        return Subspace.zero(n)
    if text.upper() == "H":
        return Subspace.full(n)
    vecs = []
    for part in text.split(";"):
        try:
            v = tuple(int(x) for x in part.split(","))
        except ValueError:
            raise InputError(f"bad subspace vector {part!r}") from None
        if len(v) != n:
            raise InputError(f"vector {part!r} has {len(v)} entries, expected {n}")
        vecs.append(v)
    return Subspace.of(n, vecs)


def subspace_to_doc(v: Subspace) -> list:
    return [list(x) for x in v.basis]


def dvalue_doc(x) -> dict:
    return {"value": None if x.value is None else rat(x.value), "certified": x.certified, "note": x.note}


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def schema(name: str) -> dict:
    return json.loads(resources.files("hfd").joinpath("schemas", f"{name}.schema.json").read_text())
