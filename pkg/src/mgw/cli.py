"""Command line front end: ``mgw <subcommand> [options]``.

Settings resolve as command-line flags, then the ``--config`` TOML file, then
the ``MGW_CACHE`` environment variable (cache directory only), then defaults.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import bmsheaf, characters
from .affine import AffineWeylGroup
from .cache import DEFAULT_DIR, Cache
from .hecke import KLTable
from .linalg import FieldError, parse_field
from .momentgraph import build_affine_graph, gkm_check
from .periodic import PeriodicSystem
from .rootdata import RootDataError, build_root_datum

SCHEMA_VERSION = 1
EXIT_USAGE = 64

log = logging.getLogger("mgw")


@dataclass
class RunConfig:
    type: str = "A1"
    field: str = "Q"
    max_length: int = 4
    height: int = 10
    radius: int = 2
    degree_multiplier: int = 1
    cache_dir: str = DEFAULT_DIR
    format: str = "json"
    workers: int = 1

    def validate(self):
        for name in ("max_length", "height", "radius"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.degree_multiplier < 1:
            raise ValueError("degree multiplier must be at least 1")
        if self.format not in ("json", "csv", "dot", "table"):
            raise ValueError(f"unknown format {self.format!r}")
        parse_field(self.field)
        build_root_datum(self.type)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _common(p: argparse.ArgumentParser, *names):
    p.add_argument("--type", dest="type", default=None, help="root system, e.g. A2")
    p.add_argument("--config", default=None, help="TOML file with run settings")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv", "dot", "table"), default=None)
    p.add_argument("--cache-dir", dest="cache_dir", default=None)
    p.add_argument("--json", nargs="?", const="-", default=None, metavar="PATH",
                   help="write JSON (to PATH, or stdout)")
    for n in names:
        if n == "field":
            p.add_argument("--field", default=None, help="Q or Fp:<prime>")
        elif n == "max_length":
            p.add_argument("--max-length", dest="max_length", type=int, default=None)
        elif n == "height":
            p.add_argument("--height", type=int, default=None)
        elif n == "radius":
            p.add_argument("--radius", type=int, default=None)
        elif n == "degree_multiplier":
            p.add_argument("--degree-multiplier", dest="degree_multiplier", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mgw", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("rootdata", help="root datum summary")
    _common(p)

    p = sub.add_parser("weyl", help="affine Weyl group elements and intervals")
    _common(p)
    p.add_argument("--list-interval", dest="list_interval", default=None, metavar="WORD",
                   help="list the Bruhat interval [e, WORD]")
    p.add_argument("--from", dest="lower", default=None, metavar="WORD", help="lower end of the interval")
    p.add_argument("--box", action="store_true", help="list the restricted sets")

    p = sub.add_parser("kl", help="Kazhdan-Lusztig polynomials h_{x,w}")
    _common(p, "max_length")
    p.add_argument("--out", default=None)
    p.add_argument("--no-cache", action="store_true")

    p = sub.add_parser("periodic", help="generic and periodic polynomials with identity checks")
    _common(p, "radius")
    p.add_argument("--reference", default="e", metavar="WORD")
    p.add_argument("--verify", default="inversion,kato,h-eq-p")

    p = sub.add_parser("chars", help="characters")
    _common(p, "height")
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--weyl", default=None, metavar="WEIGHT")
    p.add_argument("--kostant", default=None, metavar="WEIGHT")
    p.add_argument("--baby-verma", dest="baby_verma", default=None, metavar="WEIGHT")
    p.add_argument("--lusztig", default=None, metavar="WORD")

    p = sub.add_parser("graph", help="affine moment graph")
    _common(p, "field")
    p.add_argument("--upto", required=True, metavar="WORD")
    p.add_argument("--dot", default=None, metavar="PATH")
    p.add_argument("--gkm", action="store_true")

    p = sub.add_parser("bm", help="Braden-MacPherson sheaf stalks")
    _common(p, "field", "degree_multiplier")
    p.add_argument("--w", required=True, metavar="WORD")

    p = sub.add_parser("verify", help="run a verifier")
    vsub = p.add_subparsers(dest="check", parser_class=_Parser)
    vsub.required = True
    q = vsub.add_parser("star")
    _common(q, "height")
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--w", default="e", metavar="WORD")
    for name in ("momconj", "mult-one"):
        q = vsub.add_parser(name)
        _common(q, "field", "max_length", "degree_multiplier")

    p = sub.add_parser("cache", help="inspect or clear the result cache")
    _common(p)
    p.add_argument("action", choices=("list", "clear"))
    return parser


def resolve_config(args: argparse.Namespace, env=None) -> RunConfig:
    env = os.environ if env is None else env
    cfg = RunConfig()
    if env.get("MGW_CACHE"):
        cfg = replace(cfg, cache_dir=env["MGW_CACHE"])
    if getattr(args, "config", None):
        with open(args.config, "rb") as fh:
            data = tomllib.load(fh)
        data = data.get("run", data)
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = replace(cfg, **data)
    overrides = {f.name: getattr(args, f.name) for f in fields(RunConfig)
                 if getattr(args, f.name, None) is not None}
    cfg = replace(cfg, **overrides)
    try:
        cfg.validate()
    except (ValueError, FieldError, RootDataError) as exc:
        raise UsageError(str(exc)) from exc
    return cfg


def _weight(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(",", " ").split())


def _emit(obj, args, cfg, table_rows=None, out=None):
    """Write ``obj`` as JSON, or ``table_rows`` as CSV / plain text."""
    obj = {"schema_version": SCHEMA_VERSION, **obj}
    target = getattr(args, "json", None) or out
    if cfg.format == "json" or target:
        text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
        if target and target != "-":
            Path(target).write_text(text)
        else:
            sys.stdout.write(text)
        return
    rows = table_rows or []
    if cfg.format == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        for r in rows:
            sys.stdout.write("  ".join(str(c) for c in r) + "\n")


def _group(cfg) -> AffineWeylGroup:
    return AffineWeylGroup.of_type(cfg.type)


def _kl_table(cfg, use_cache=True) -> KLTable:
    cache = Cache(cfg.cache_dir) if use_cache else None
    return KLTable.of_type(cfg.type, cache)


def cmd_rootdata(args, cfg):
    d = build_root_datum(cfg.type)
    rows = [["field", "value"]] + [[k, v] for k, v in d.as_dict().items()]
    _emit(d.as_dict(), args, cfg, rows)
    return 0


def cmd_weyl(args, cfg):
    G = _group(cfg)
    out = {"type": cfg.type}
    rows = [["element", "length"]]
    if args.box:
        b = G.box_sets()
        out["box"] = {
            "res_plus": [G.render(x) for x in b.res_plus],
            "res_minus": [G.render(x) for x in b.res_minus],
            "w0_hat": G.render(b.w0_hat),
            "circ": [G.render(x) for x in b.circ],
            "circ_plus": [G.render(x) for x in b.circ_plus],
        }
        rows += [[G.render(x), G.length(x)] for x in b.circ]
    if args.list_interval is not None:
        top = G.parse(args.list_interval)
        low = G.parse(args.lower) if args.lower else G.identity
        elts = G.interval(low, top)
        out["interval"] = [{"element": G.render(x), "length": G.length(x)} for x in elts]
        rows += [[G.render(x), G.length(x)] for x in elts]
    _emit(out, args, cfg, rows)
    return 0


def cmd_kl(args, cfg):
    table = _kl_table(cfg, not args.no_cache)
    G = table.group
    elts = table.build_up_to(cfg.max_length, workers=cfg.workers)
    table.save()
    entries = []
    rows = [["w", "x", "h"]]
    for w in elts:
        col = table.column(w)
        for x in sorted(col, key=G.sort_key):
            entries.append({"w": G.render(w), "x": G.render(x), "h": col[x].to_pairs()})
            rows.append([G.render(w), G.render(x), str(col[x])])
    _emit({"type": cfg.type, "entries": entries}, args, cfg, rows, out=args.out)
    return 0


def cmd_periodic(args, cfg):
    P = PeriodicSystem(_kl_table(cfg))
    G = P.group
    ref = G.parse(args.reference)
    window = P.window(ref, cfg.radius)
    wanted = [c.strip() for c in args.verify.split(",") if c.strip()]
    checks = []
    for name in wanted:
        if name == "inversion":
            rep = P.verify_inversion(window)
        elif name == "kato":
            rep = P.verify_kato(ref, cfg.radius)
        elif name == "h-eq-p":
            boxes = G.box_sets()
            pairs = [(x, w) for w in boxes.res_plus for x in sorted(set(P.window(w, cfg.radius)) | set(boxes.circ), key=G.sort_key)]
            rep = P.verify_h_equals_p_at_one(pairs)
        else:
            raise UsageError(f"unknown check {name!r}; choose from inversion, kato, h-eq-p")
        checks.append(rep)
    P.kl.save()
    out = {
        "window": {"reference": G.render(ref), "radius": cfg.radius, "alcoves": [G.render(a) for a in window]},
        "checks": [{"name": r.name, "pass": r.passed, "mismatches": r.mismatches} for r in checks],
    }
    _emit(out, args, cfg, [["check", "pass", "checked"]] + [[r.name, r.passed, r.checked] for r in checks])
    return 0 if all(r.passed for r in checks) else 1


def cmd_chars(args, cfg):
    G = _group(cfg)
    R = characters.CharacterRing(G)
    out = {"type": cfg.type}
    rows = [["character", "weight", "coeff"]]

    def record(name, ch):
        out[name] = [{"weight": list(k), "coeff": c} for k, c in sorted(ch.terms.items())]
        rows.extend([name, " ".join(map(str, k)), c] for k, c in sorted(ch.terms.items()))

    if args.weyl is not None:
        record("weyl", R.weyl_character(_weight(args.weyl)))
    if args.kostant is not None:
        record("kostant", R.kostant_expansion(_weight(args.kostant), cfg.height).char)
    if args.baby_verma is not None:
        if args.p is None:
            raise UsageError("--baby-verma needs --p")
        record("baby_verma", R.baby_verma_character(_weight(args.baby_verma), args.p))
    if args.lusztig is not None:
        if args.p is None:
            raise UsageError("--lusztig needs --p")
        P = PeriodicSystem(_kl_table(cfg))
        record("lusztig", characters.lusztig_sum(P, R, G.parse(args.lusztig), args.p))
    _emit(out, args, cfg, rows)
    return 0


def cmd_graph(args, cfg):
    G = _group(cfg)
    g = build_affine_graph(G, G.parse(args.upto), parse_field(cfg.field))
    out = {"type": cfg.type, **g.as_dict()}
    code = 0
    if args.gkm:
        rep = gkm_check(g)
        out["gkm"] = rep.as_dict()
        code = 0 if rep.passed else 1
    if args.dot:
        Path(args.dot).write_text(g.to_dot())
    if cfg.format == "dot" and not args.json:
        sys.stdout.write(g.to_dot())
        return code
    rows = [["lower", "upper", "label"]] + [[e["lower"], e["upper"], e["label"]] for e in out["edges"]]
    _emit(out, args, cfg, rows)
    return code


def cmd_bm(args, cfg):
    G = _group(cfg)
    policy = bmsheaf.DegreePolicy(cfg.degree_multiplier)
    try:
        sheaf = bmsheaf.build_bm_sheaf(G, G.parse(args.w), parse_field(cfg.field), policy, workers=cfg.workers)
    except bmsheaf.GKMError as exc:
        print(f"mgw: {exc}", file=sys.stderr)
        return 1
    out = {"type": cfg.type, **sheaf.as_dict()}
    rows = [["x", "generator_degrees", "flagged"]] + [
        [s["x"], " ".join(map(str, s["generator_degrees"])), s["flagged"]] for s in out["stalks"]
    ]
    _emit(out, args, cfg, rows)
    return 2 if any(s["flagged"] for s in out["stalks"]) else 0


def _status(reports) -> int:
    if any(r.mismatches for r in reports):
        return 1
    if any(r.indeterminate for r in reports):
        return 2
    return 0


def cmd_verify(args, cfg):
    G = _group(cfg)
    reports = []
    if args.check == "star":
        P = PeriodicSystem(_kl_table(cfg))
        R = characters.CharacterRing(G)
        reports.append(characters.verify_star(P, R, G.parse(args.w), args.p, cfg.height))
        P.kl.save()
    else:
        fld = parse_field(cfg.field)
        kl = _kl_table(cfg)
        policy = bmsheaf.DegreePolicy(cfg.degree_multiplier)
        skipped = []
        for w in G.elements_up_to_length(cfg.max_length):
            try:
                sheaf = bmsheaf.build_bm_sheaf(G, w, fld, policy, workers=cfg.workers)
            except bmsheaf.GKMError:
                skipped.append(G.render(w))
                continue
            fn = bmsheaf.verify_momconj if args.check == "momconj" else bmsheaf.verify_multiplicity_one
            reports.append(fn(sheaf, kl))
        kl.save()
        if skipped:
            log.info("skipped %d non-GKM intervals: %s", len(skipped), ", ".join(skipped))
    for r in reports:
        if args.verbose or not r.passed:
            print(r.line(), file=sys.stderr)
    out = {"check": args.check, "type": cfg.type, "reports": [r.as_dict() for r in reports]}
    code = _status(reports)
    out["exit_code"] = code
    if args.json or cfg.format != "json":
        _emit(out, args, cfg, [["name", "pass", "checked"]] + [[r.name, r.passed, r.checked] for r in reports])
    else:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "check": args.check, "pass": code == 0,
                          "exit_code": code, "reports": len(reports)}))
    return code


def cmd_cache(args, cfg):
    c = Cache(cfg.cache_dir)
    if args.action == "clear":
        n = c.clear()
        _emit({"cleared": n, "dir": str(c.root)}, args, cfg, [["cleared", n]])
    else:
        names = [p.name for p in c.entries()]
        _emit({"dir": str(c.root), "entries": names}, args, cfg, [[n] for n in names])
    return 0


COMMANDS = {
    "rootdata": cmd_rootdata,
    "weyl": cmd_weyl,
    "kl": cmd_kl,
    "periodic": cmd_periodic,
    "chars": cmd_chars,
    "graph": cmd_graph,
    "bm": cmd_bm,
    "verify": cmd_verify,
    "cache": cmd_cache,
}


def run(argv=None, env=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = resolve_config(args, env)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (RootDataError, FieldError, ValueError) as exc:
        print(f"mgw: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
