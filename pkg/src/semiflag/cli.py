"""Command-line entry point: ``semiflag <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .based import BasisMismatch, ValidationError
from .cartan import CatalogError, cartan, parse_weight_key, weight_key
from .datagen import CATALOG, EquivarianceError, PositivityViolation, generate, get_store
from .explorer import conjecture_check, enumerate_one, fiber_sample, point_from_supports
from .flags import (
    DEFAULT_DEPTH, AmbiguousSolution, DepthError, FlagPoint, InvariantError, NoSolution, act, basepoint,
    check_consistency, map_semifield, normalize, verify,
)
from .monoid import RELATIONS, parse_word, relation_check
from .semifield import (
    CIRC, CIRC_TEXT, ONE, TROPICAL, DomainMismatch, get_semifield, identity_hom, to_one_hom, tropical_scaling_hom,
)
from .semiring import HeightBoundError, MElem, char_from_point, m_mul

log = logging.getLogger("semiflag")

# Options whose values may legitimately start with "-" (words, negative ranges).
_DASHY = ("--word", "--params", "--target", "--lambda")

VALIDATION_ERRORS = (ValidationError, BasisMismatch, DomainMismatch, NoSolution, AmbiguousSolution,
                     InvariantError, DepthError, HeightBoundError, PositivityViolation, EquivarianceError,
                     CatalogError, ValueError, KeyError, OSError, json.JSONDecodeError)


class Failure(Exception):
    """A check ran and reported a negative result (exit code 1)."""


def _glue_dashy(argv):
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _DASHY:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _index_list(text):
    if not text:
        return frozenset()
    return frozenset(int(x) for x in text.replace(" ", "").split(",") if x)


def _emit(args, text_lines, payload):
    if args.json:
        sys.stdout.write(json.dumps(payload, indent=1) + "\n")
    else:
        for line in text_lines:
            print(line)


def _write_or_print(args, text):
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _load_point(args, source=None) -> FlagPoint:
    source = source if source is not None else args.point
    if source in (None, "base"):
        return basepoint(args.type, _index_list(args.J), get_semifield(args.semifield), args.data_dir,
                         verify_depth=args.depth)
    with open(source) as f:
        return FlagPoint.from_dict(json.load(f), args.data_dir)


def _load_melem(path, args) -> MElem:
    with open(path) as f:
        d = json.load(f)
    d.setdefault("cartan", args.type)
    d.setdefault("semifield", args.semifield)
    d.setdefault("J", sorted(_index_list(args.J)))
    return MElem.from_dict(d, args.data_dir)


# ---------------------------------------------------------------------------
# subcommands

def cmd_generate(args):
    c = cartan(args.type)
    extra = [parse_weight_key(args.__dict__["lambda"])] if args.__dict__["lambda"] else []
    depth = args.depth
    if CATALOG[c.label] is not None:
        depth = min(depth, CATALOG[c.label])
    modules, tables = generate(c, depth, args.out, extra=extra, store=get_store(c, args.data_dir))
    lines = [f"{c.label}: {len(modules)} modules, {len(tables)} Gamma tables (height <= {depth})"]
    lines += [f"  V{m.lam}: dim {m.dim}" for m in modules]
    if args.out:
        lines.append(f"written to {args.out}")
    _emit(args, lines, {"type": c.label, "depth": depth,
                        "modules": {weight_key(m.lam): m.dim for m in modules},
                        "gamma_tables": [[weight_key(t.lam), weight_key(t.lam2)] for t in tables]})


def cmd_act(args):
    p = _load_point(args)
    w = parse_word(args.word or "", p.sf, p.cartan.index_set)
    q = act(w, p)
    _write_or_print(args, q.dumps())


def cmd_check(args):
    p = _load_point(args)
    res = check_consistency(p, args.depth)
    lines = [f"consistent up to height {args.depth}" if res else
             f"FAILS at {res.witness}: {res.message}"]
    _emit(args, lines, {"ok": res.ok, "depth": args.depth,
                        "witness": [list(w) for w in (res.witness or ())], "message": res.message})
    if not res:
        raise Failure("consistency check failed")


def cmd_normalize(args):
    _write_or_print(args, normalize(_load_point(args)).dumps())


def _parse_hom(source, sf):
    source = (source or "one").strip()
    if source in ("one", "collapse"):
        return to_one_hom(sf)
    if source in ("id", "identity"):
        return identity_hom(sf)
    if source.startswith("scale:"):
        if sf is not TROPICAL:
            raise ValueError("scale:N is a hom of the tropical semifield only")
        return tropical_scaling_hom(int(source.split(":", 1)[1]))
    raise ValueError(f"unknown hom {source!r}; use one, id or scale:N")


def cmd_map(args):
    p = _load_point(args)
    q = map_semifield(p, _parse_hom(args.hom, p.sf), recheck=bool(p.verified_depth))
    _write_or_print(args, q.dumps())


def _support_text(p):
    return "  ".join(f"{i}:{{{','.join(sorted(v.coeffs, key=v.basis.index.__getitem__))}}}"
                     for i, v in sorted(p.components.items()))


def cmd_enumerate(args):
    J = _index_list(args.J)
    pts = enumerate_one(args.type, J, args.depth, data_dir=args.data_dir)
    lines = [f"{len(pts)} points of P^J({{1}}) for {args.type}, J={sorted(J)}, depth {args.depth}"]
    lines += ["  " + _support_text(p) for p in pts]
    _emit(args, lines, {"type": args.type, "J": sorted(J), "depth": args.depth, "count": len(pts),
                        "points": [{str(i): sorted(v.coeffs, key=v.basis.index.__getitem__)
                                    for i, v in sorted(p.components.items())} for p in pts]})


def cmd_conjecture(args):
    rep = conjecture_check(args.type, args.depth, data_dir=args.data_dir)
    _emit(args, rep.lines(), rep.to_dict())


def _parse_target(text, c, data_dir):
    supports = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        i, labels = part.split(":", 1)
        supports[int(i)] = [b.strip() for b in labels.split(",") if b.strip()]
    return point_from_supports(c, supports, ONE, data_dir)


def _parse_range(text):
    lo, hi = text.split("..")
    return range(int(lo), int(hi) + 1)


def cmd_fiber(args):
    c = cartan(args.type)
    target = _parse_target(args.target, c, args.data_dir)
    rep = fiber_sample(c, target, _parse_range(args.params), args.length, args.data_dir)
    lines = [f"fiber over {_support_text(target)}: {rep.count} distinct tropical points "
             f"({rep.sampled} sampled)"]
    lines += ["  " + repr({i: v for i, v in sorted(p.components.items())}) for p in rep.points]
    _emit(args, lines, {"target": target.to_dict()["components"], "count": rep.count,
                        "sampled": rep.sampled, "points": [p.to_dict()["components"] for p in rep.points]})


def cmd_mmul(args):
    a, b = _load_melem(args.a, args), _load_melem(args.b, args)
    _write_or_print(args, m_mul(a, b).dumps())


def cmd_mchar(args):
    p = _load_point(args)
    if p.verified_depth < args.depth:
        p = verify(p, args.depth)
    m = _load_melem(args.m, args)
    chi = char_from_point(p, args.depth)
    val = chi(m)
    text = CIRC_TEXT if val is CIRC else p.sf.format(val.value)
    _emit(args, [text], {"value": text})


def _relation_modules(types):
    mods = []
    for label in types:
        c = cartan(label)
        st = get_store(c)
        for lam in c.dominant_weights(2):
            if any(lam) and st.supports(lam):
                mods.append(st.module(lam))
    return mods


def cmd_verify_relations(args):
    types = [args.type] if args.type_given else ["A1", "A1xA1", "A2", "A3"]
    names = [args.semifield] if args.semifield_given else ["rational", "tropical", "one"]
    sfs = [get_semifield(s) for s in names]
    mods = _relation_modules(types)
    log.info("relation suite seed %d on %d modules", args.seed, len(mods))
    reports = [relation_check(r, args.trials, args.seed, mods, sfs) for r in RELATIONS]
    lines = [rep.line() for rep in reports]
    _emit(args, lines, {"seed": args.seed, "trials": args.trials, "types": types,
                        "semifields": [s.name for s in sfs],
                        "relations": {rep.relation: {"ok": rep.ok, "passed": rep.passed,
                                                     "failures": [list(map(str, f)) for f in rep.failures]}
                                      for rep in reports}})
    if not all(rep.ok for rep in reports):
        raise Failure("relation suite failed")


# ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--type", default=None, help="Cartan type: A1, A1xA1, A2, A3 (default A1)")
    common.add_argument("--semifield", default=None, choices=["rational", "tropical", "one"],
                        help="semifield K (default rational)")
    common.add_argument("--J", default="", help="comma-separated subset J of I (default empty)")
    common.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="height bound d (default 4)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--data-dir", default=None, help="directory of generated module/Gamma JSON")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="semiflag", description="Partial flag manifolds over semifields.")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    p = add("generate", cmd_generate, "build module data and Gamma tables")
    p.add_argument("--lambda", default=None, help="extra weight, e.g. 1,1")
    p.add_argument("--out", default=None, help="output directory")

    p = add("act", cmd_act, "apply a monoid word to a point")
    p.add_argument("--point", default="base", help="'base' or a point JSON file")
    p.add_argument("--word", default="", help='e.g. "-1:2/3 +2:5 t1:1/2"')
    p.add_argument("--out", default=None)

    p = add("check", cmd_check, "verify the defining equations up to --depth")
    p.add_argument("--point", default="base")

    p = add("normalize", cmd_normalize, "normalize a point")
    p.add_argument("--point", default="base")
    p.add_argument("--out", default=None)

    p = add("map", cmd_map, "push a point along a semifield homomorphism")
    p.add_argument("--point", default="base")
    p.add_argument("--hom", default="one", help="one | id | scale:N (tropical)")
    p.add_argument("--out", default=None)

    add("enumerate", cmd_enumerate, "all points over {1} up to --depth")
    add("conjecture", cmd_conjecture, "compare |P({1})| with the number of Bruhat pairs")

    p = add("fiber", cmd_fiber, "sample tropical points over a {1}-point")
    p.add_argument("--target", required=True, help='supports, e.g. "1:b0,b1;2:b0"')
    p.add_argument("--params", default="-5..5", help="parameter range lo..hi")
    p.add_argument("--length", type=int, default=1, help="word length of the grid")

    p = add("mmul", cmd_mmul, "product of two elements of M(K)")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", default=None)

    p = add("mchar", cmd_mchar, "evaluate the character of a point on an element of M(K)")
    p.add_argument("--point", default="base")
    p.add_argument("--m", required=True, help="element JSON file")

    p = add("verify-relations", cmd_verify_relations, "run the monoid relation suite")
    p.add_argument("--trials", type=int, default=200)
    return ap


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    try:
        args = ap.parse_args(_glue_dashy(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    args.type_given = args.type is not None
    args.semifield_given = args.semifield is not None
    args.type = args.type or "A1"
    args.semifield = args.semifield or "rational"
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        args.fn(args)
    except Failure as exc:
        print(f"semiflag: {exc}", file=sys.stderr)
        return 1
    except VALIDATION_ERRORS as exc:
        print(f"semiflag: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
