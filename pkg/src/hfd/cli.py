"""Command-line interface: ``hfd <command> ...``.

Exit status: 0 success, 1 usage, 2 invalid input or model, 3 uncertified
result, 4 a property check failed.
"""
from __future__ import annotations

import argparse
import json
import random
import sys

from . import catalog, dinv, obstruct
from .errors import HFDError, InputError, InvariantViolation, UncertifiedError, ValidationError
from .functors import all_primitive_subspaces, dual_swap_report, rank1, tower_report
from .hfmodel import connected_sum, reverse_orientation, validate
from .modelio import (
    compact_json,
    digest,
    dumps_model,
    dvalue_doc,
    loads_model,
    parse_rat,
    rat,
    subspace_from_text,
    subspace_to_doc,
)

EXIT_USAGE, EXIT_INPUT, EXIT_UNCERTIFIED, EXIT_PROPERTY = 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Context:
    def __init__(self, args, stdin=None, stdout=None):
        self.args = args
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout
        self.inputs = {}

    def read(self, path: str) -> str:
        if path == "-":
            text = self.stdin.read()
        else:
            try:
                with open(path, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise InputError(f"cannot read {path}: {exc.strerror}") from None
        self.inputs[path] = digest(text.encode())
        return text

    def model(self, path: str):
        return loads_model(self.read(path))

    def json(self, path: str):
        try:
            return json.loads(self.read(path))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: malformed JSON: {exc}") from None

    def write(self, text: str, path: str | None = None):
        if path in (None, "-"):
            self.stdout.write(text)
        else:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)

    def report(self, results, certified=True, failures=(), text=None):
        if self.args.json:
            doc = {
                "command": self.args.command,
                "argv": self.args.argv,
                "inputs": dict(sorted(self.inputs.items())),
                "results": results,
                "certified": certified,
                "failures": list(failures),
            }
            self.write(compact_json(doc) + "\n")
        elif text is not None:
            self.write(text if text.endswith("\n") else text + "\n")


def _require_valid(m):
    rep = validate(m)
    if not rep.ok:
        raise ValidationError(rep)
    return m


def _entry_doc(e) -> dict:
    doc = {"subspace": subspace_to_doc(e.subspace), "rank": e.subspace.rank,
           "d": dvalue_doc(e.d), "d_star": dvalue_doc(e.d_star)}
    if e.d_minus is not None:
        doc["d_minus"] = dvalue_doc(e.d_minus)
        doc["d_star_minus"] = dvalue_doc(e.d_star_minus)
    return doc


def _fmt(x) -> str:
    return "-" if x is None or x.value is None else str(x.value) + ("" if x.certified else "?")


def cmd_catalog(ctx):
    kw = {"n": ctx.args.n} if ctx.args.name == "s1s2" and ctx.args.n is not None else {}
    try:
        m = catalog.build(ctx.args.name, **kw)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    ctx.write(dumps_model(m))
    return 0


def cmd_validate(ctx):
    m = ctx.model(ctx.args.file)
    rep = validate(m)
    ctx.report({"model": m.name, "valid": rep.ok}, rep.ok, rep.failures,
               f"{m.name}: ok" if rep.ok else "\n".join([f"{m.name}: INVALID"] + rep.failures))
    return 0 if rep.ok else EXIT_INPUT


def cmd_d(ctx):
    m = _require_valid(ctx.model(ctx.args.file))
    v = subspace_from_text(ctx.args.subspace, m.n)
    e = dinv.entry_for(m, v, minus=ctx.args.minus)
    lines = [f"V = {e.subspace}", f"d  = {_fmt(e.d)}", f"d* = {_fmt(e.d_star)}"]
    if ctx.args.minus:
        lines += [f"d-  = {_fmt(e.d_minus)}", f"d*- = {_fmt(e.d_star_minus)}"]
    certified = e.certified and (not ctx.args.minus or (e.d_minus.certified and e.d_star_minus.certified))
    ctx.report({"model": m.name, "entry": _entry_doc(e)}, certified, [], "\n".join(lines))
    return 0 if certified else EXIT_UNCERTIFIED


def _table(ctx, m):
    a = ctx.args
    if a.rank_all:
        subs = all_primitive_subspaces(m.n, a.bound)
    elif a.rank is not None:
        from .functors import enumerate_primitive_subspaces
        subs = enumerate_primitive_subspaces(m.n, a.rank, a.bound)
    else:
        subs = rank1(m.n, a.bound) if m.n else all_primitive_subspaces(0, a.bound)
    return dinv.d_table(m, a.bound, minus=a.minus, jobs=ctx.args.jobs, subspaces=subs)


def cmd_d_table(ctx):
    m = _require_valid(ctx.model(ctx.args.file))
    t = _table(ctx, m)
    rows = [("V", "rank", "d", "d*") + (("d-", "d*-") if ctx.args.minus else ())]
    for e in t.entries:
        row = (str(e.subspace), str(e.subspace.rank), _fmt(e.d), _fmt(e.d_star))
        if ctx.args.minus:
            row += (_fmt(e.d_minus), _fmt(e.d_star_minus))
        rows.append(row)
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    text = "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows)
    results = {"model": m.name, "b1": m.n, "bound": ctx.args.bound,
               "entries": [_entry_doc(e) for e in t.entries]}
    if ctx.args.candidates:
        cands = obstruct.intform_kernel_candidates(t)
        results["kernel_candidates"] = [{"subspace": subspace_to_doc(c.subspace), "d": rat(c.d), "tight": c.tight}
                                        for c in cands]
        text += "\n\nintersection-form kernel candidates (d >= b1/2 - rank V):\n" + "\n".join(
            f"  {c.subspace}  d = {c.d}" + ("  tight: form is diagonalizable" if c.tight else "") for c in cands)
    ctx.report(results, t.certified, [], text)
    return 0 if t.certified else EXIT_UNCERTIFIED


def cmd_connsum(ctx):
    a = _require_valid(ctx.model(ctx.args.a))
    b = _require_valid(ctx.model(ctx.args.b))
    ctx.write(dumps_model(_require_valid(connected_sum(a, b))), ctx.args.output)
    return 0


def cmd_reverse(ctx):
    a = _require_valid(ctx.model(ctx.args.a))
    ctx.write(dumps_model(_require_valid(reverse_orientation(a))), ctx.args.output)
    return 0


def cmd_props(ctx):
    a = ctx.args
    m = _require_valid(ctx.model(a.file))
    rng = random.Random(a.seed)
    chosen = [k for k in ("duality", "additivity", "rank", "simple", "tower", "minus", "basis") if getattr(a, k)]
    if not chosen:
        chosen = ["duality", "rank", "simple", "tower", "minus"]
    results, failures = {}, []

    def record(name, rep_failures, checked=None, **extra):
        results[name] = {"ok": not rep_failures, "failures": list(rep_failures), **extra}
        if checked is not None:
            results[name]["checked"] = checked
        failures.extend(f"{name}: {f}" for f in rep_failures)

    for name in chosen:
        if name == "duality":
            rep = dinv.check_duality(m, reverse_orientation(m), a.bound)
            record(name, rep.failures, rep.checked)
        elif name == "additivity":
            other = ctx.model(a.with_model) if a.with_model else catalog.build_s1s2(1)
            other = _require_valid(other)
            rep = dinv.check_additivity(m, other, connected_sum(m, other), 1)
            record(name, rep.failures, rep.checked, partner=other.name)
        elif name == "rank":
            rep = dinv.PropertyReport("rank")
            for _ in range(a.chains):
                small, big = dinv.random_chain(m.n, rng)
                dinv.check_rank_inequality(m, small, big, rep)
            record(name, rep.failures, rep.checked)
        elif name == "simple":
            simple, rep = dinv.check_simple(m, a.bound)
            record(name, rep.failures, rep.checked, simple=simple)
        elif name == "tower":
            fails = []
            for v in all_primitive_subspaces(m.n, a.bound):
                fails += tower_report(m.hf_inf, v) + dual_swap_report(m.hf_inf, v)
            record(name, fails)
        elif name == "minus":
            rep = dinv.check_minus(m, a.bound)
            record(name, rep.failures, rep.checked)
        elif name == "basis":
            rep = dinv.check_basis_change(m, dinv.random_unimodular(m.n, rng), a.bound)
            record(name, rep.failures, rep.checked)
    text = "\n".join(f"{k}: {'ok' if v['ok'] else 'FAIL'}" + (f" (simple={v['simple']})" if "simple" in v else "")
                     for k, v in results.items())
    if failures:
        text += "\n" + "\n".join(failures)
    ctx.report({"model": m.name, "checks": results}, True, failures, text)
    return EXIT_PROPERTY if failures else 0


def _form(doc) -> obstruct.LinkingForm:
    try:
        return obstruct.LinkingForm(tuple(doc["factors"]),
                                    tuple(tuple(parse_rat(x, "pairing") for x in row) for row in doc["pairing"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"linking form: missing or malformed field {exc}") from None


def _gens_doc(gens):
    return [list(g) for g in gens]


def cmd_metabolizers(ctx):
    f = _form(ctx.json(ctx.args.form))
    mets = obstruct.enumerate_metabolizers(f)
    text = "\n".join(f"<{'; '.join(','.join(map(str, g)) for g in gens)}>" for gens in mets.subgroups)
    text = text or f"no metabolizers ({mets.reason or 'none isotropic of the right order'})"
    ctx.report({"order": f.order, "metabolizers": [_gens_doc(g) for g in mets.subgroups], "reason": mets.reason},
               True, [], text)
    return 0


def cmd_slice_check(ctx):
    f = _form(ctx.json(ctx.args.form))
    doc = ctx.json(ctx.args.table)
    try:
        entries = {tuple(e["t"]): (parse_rat(e["d_bot"], "d_bot"), parse_rat(e["d_top"], "d_top"))
                   for e in doc["entries"]}
        table = obstruct.DInvariantTable(int(doc["b1"]), tuple(doc["factors"]), entries)
    except (KeyError, TypeError) as exc:
        raise InputError(f"d-invariant table: missing or malformed field {exc}") from None
    verdict = obstruct.slice_obstruction(table, f, ctx.args.components)
    ctx.report({"verdict": verdict.label, "reason": verdict.reason,
                "surviving_metabolizers": [_gens_doc(g) for g in verdict.surviving]},
               True, [], f"{verdict.label}: {verdict.reason}")
    return 0


def cmd_lattice(ctx):
    doc = ctx.json(ctx.args.gram)
    gram = doc["gram"] if isinstance(doc, dict) and "gram" in doc else doc
    if not isinstance(gram, list) or any(not isinstance(r, list) for r in gram) or any(
            isinstance(x, bool) or not isinstance(x, int) for r in gram for x in r):
        raise InputError("gram: expected a square integer matrix")
    if ctx.args.bound is not None and ctx.args.bound < 0:
        raise InputError("--bound must be non-negative")
    lat = obstruct.Lattice(tuple(tuple(r) for r in gram))
    res = obstruct.char_vector_max(lat, ctx.args.bound)
    witness = None if res.witness is None else list(res.witness)
    text = (f"max(c^2 + rank) = {res.value}  witness c = {witness}\n"
            f"search bound {res.bound}, required {res.required_bound}: "
            f"{'certified' if res.certified else 'UNCERTIFIED'}\n"
            + ("diagonalizable (value 0)" if res.value == 0 else "not diagonalizable" if res.certified else ""))
    ctx.report({"rank": lat.rank, "max": res.value, "witness": witness, "bound": res.bound,
                "required_bound": res.required_bound}, res.certified, [], text.rstrip())
    return 0 if res.certified else EXIT_UNCERTIFIED


def build_parser() -> argparse.ArgumentParser:
    def globals_(default):
        # subcommands accept the global flags too, without clobbering values given before them
        g = _Parser(add_help=False)
        g.add_argument("--json", action="store_true", default=default(False), help="emit a JSON report")
        g.add_argument("--seed", type=int, default=default(0), help="seed for randomized checks")
        g.add_argument("--jobs", type=int, default=default(1), help="worker processes for d-table entries")
        return g

    common = globals_(lambda x: argparse.SUPPRESS)
    p = _Parser(prog="hfd", description="Generalized correction terms d(Y, s, V) from finite models.",
                parents=[globals_(lambda x: x)])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(fn=fn)
        return sp

    sp = add("catalog", cmd_catalog, "emit a catalog model as JSON")
    sp.add_argument("name", help=", ".join(catalog.CATALOG))
    sp.add_argument("--n", type=int, default=None, help="number of S^1 x S^2 summands (s1s2 only)")

    sp = add("validate", cmd_validate, "check a model file")
    sp.add_argument("file")

    sp = add("d", cmd_d, "d and d* for one subspace")
    sp.add_argument("file")
    sp.add_argument("--subspace", default="0", help='basis vectors "a1,..,an;b1,..,bn"; "0" or "H"')
    sp.add_argument("--minus", action="store_true", help="also report d- and d*-")

    sp = add("d-table", cmd_d_table, "d and d* over enumerated subspaces")
    sp.add_argument("file")
    sp.add_argument("--bound", type=int, default=dinv.DEFAULT_BOUND)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--rank-all", action="store_true", help="all ranks (default: rank 1)")
    g.add_argument("--rank", type=int, default=None)
    sp.add_argument("--minus", action="store_true")
    sp.add_argument("--candidates", action="store_true", help="list intersection-form kernel candidates")

    for name, fn, help_ in (("connsum", cmd_connsum, "connected sum of two models"),):
        sp = add(name, fn, help_)
        sp.add_argument("a")
        sp.add_argument("b")
        sp.add_argument("-o", "--output", default="-")
    sp = add("reverse", cmd_reverse, "orientation reversal of a model")
    sp.add_argument("a")
    sp.add_argument("-o", "--output", default="-")

    sp = add("props", cmd_props, "property checks on a model")
    sp.add_argument("file")
    for flag in ("duality", "additivity", "rank", "simple", "tower", "minus", "basis"):
        sp.add_argument(f"--{flag}", action="store_true")
    sp.add_argument("--with", dest="with_model", default=None, help="second summand for --additivity")
    sp.add_argument("--bound", type=int, default=2)
    sp.add_argument("--chains", type=int, default=20, help="random nested pairs for --rank")

    sp = add("metabolizers", cmd_metabolizers, "metabolizers of a linking form")
    sp.add_argument("--form", required=True)

    sp = add("slice-check", cmd_slice_check, "slice obstruction from a d-invariant table")
    sp.add_argument("--table", required=True)
    sp.add_argument("--form", required=True)
    sp.add_argument("--components", type=int, required=True)

    sp = add("lattice", cmd_lattice, "characteristic-vector maximum of a definite unimodular lattice")
    sp.add_argument("--gram", required=True)
    sp.add_argument("--bound", type=int, default=None, help="coefficient bound (default: certified radius)")
    return p


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    args.argv = argv
    ctx = Context(args, stdin, stdout)
    try:
        return args.fn(ctx)
    except ValidationError as exc:
        print(f"hfd: invalid model {exc.report.model}:", file=stderr)
        for f in exc.report.failures:
            print(f"  {f}", file=stderr)
        return EXIT_INPUT
    except UncertifiedError as exc:
        print(f"hfd: uncertified: {exc}", file=stderr)
        return EXIT_UNCERTIFIED
    except InvariantViolation as exc:
        print(f"hfd: property violated: {exc}", file=stderr)
        return EXIT_PROPERTY
    except HFDError as exc:
        print(f"hfd: {exc}", file=stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
