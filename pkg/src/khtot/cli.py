"""Command-line front end.

Subcommands: homology, s, verify, reduce, moves and family.  Every command
prints one JSON document (``"schema": 1``) or, with ``--format tsv``, a
tab-separated table.  Exit codes: 0 success, 1 verification failure,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence

from . import corpus
from .algebra import (
    complex_to_json,
    gauss_reduce,
    homology_f2,
    homology_localized,
    homology_pid,
    pid_totals,
    total_rank,
)
from .complex import (
    THEORIES,
    build_total,
    d_squared_ok,
    is_subcomplex,
    reduced_split,
    specialize,
    verify_d_squared,
)
from .contrib import classify, family_tag, rule_violations
from .diagram import DiagramError, LinkDiagram, apply_move, from_json, mirror_diagram, parse_pd
from .invariants import genus_bound, parse_upright, s_invariant
from .planar import LabeledConfiguration, configuration

SCHEMA = 1
VARIANTS = {"o": "o", "minus-o": "-o", "pair": "o,-o"}


class UsageError(Exception):
    pass


def threads() -> int:
    try:
        return max(1, int(os.environ.get("KHTOT_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Input


def load_diagram(source: str, decorations: Optional[str] = None, basepoint: Optional[int] = None,
                 mirror: bool = False) -> LinkDiagram:
    """A JSON file, a PD text file, inline PD text or a bundled corpus name."""
    text = None
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    try:
        if text is not None:
            stripped = text.strip()
            d = from_json(json.loads(stripped)) if stripped.startswith("{") else parse_pd(stripped)
        elif source.strip().startswith(("PD", "X", "U")):
            d = parse_pd(source)
        else:
            try:
                d = corpus.get(source)
            except KeyError:
                raise UsageError(f"no such file or bundled diagram: {source}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {source}: {exc}") from None
    except DiagramError as exc:
        raise UsageError(f"invalid diagram in {source}: {exc}") from None
    if mirror:
        d = mirror_diagram(d)
    if decorations is not None:
        bits = [int(b) for b in decorations.replace(",", "")]
        if len(bits) != d.n:
            raise UsageError(f"decoration length {len(bits)} != crossing count {d.n}")
        d = d.with_decorations(bits)
    if basepoint is not None:
        d = d.with_basepoint(basepoint)
    return d


def _load(args) -> LinkDiagram:
    return load_diagram(args.input, args.decorations, args.basepoint, args.mirror)


def digest(d: LinkDiagram) -> str:
    blob = json.dumps(d.to_json(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Commands


def _table_rows(table: Dict[tuple, object], names: Sequence[str]) -> List[dict]:
    rows = []
    for key, val in sorted(table.items()):
        row = dict(zip(names, key))
        if isinstance(val, tuple):
            row["free"], row["torsion"] = val[0], list(val[1])
        else:
            row["rank"] = val
        rows.append(row)
    return rows


def homology_report(d: LinkDiagram, theory: str) -> dict:
    C = specialize(build_total(d), *THEORIES[theory])
    names = {"hq": ("gr_h", "gr_q"), "h": ("gr_h",), "": ()}[C.gradings]
    if C.ring == "F2":
        table = homology_f2(C)
        return {"theory": theory, "ring": C.ring, "rows": _table_rows(table, names),
                "total_rank": total_rank(table)}
    table = homology_localized(C) if theory == "loc" else homology_pid(C)
    free, tors = pid_totals(table)
    return {"theory": theory, "ring": C.ring, "rows": _table_rows(table, names),
            "free_rank": free, "torsion": sorted(tors)}


def cmd_homology(args) -> dict:
    d = _load(args)
    return homology_report(d, args.theory)


def _s_task(payload):
    dj, spec, variant = payload
    d = from_json(dj)
    return s_invariant(d, parse_upright(spec), VARIANTS[variant])


def cmd_s(args) -> dict:
    d = _load(args)
    if d.l != 1:
        raise UsageError("s-invariants are defined for knots only")
    specs = args.upright or ["t=1"]
    for spec in specs:
        try:
            U = parse_upright(spec)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if U.shift:
            raise UsageError("s needs a centered upright set (no [n] suffix)")
    variants = args.variant or ["o"]
    tasks = [(d.to_json(), spec, v) for spec in specs for v in variants]
    if threads() > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(threads()) as pool:
            values = list(pool.map(_s_task, tasks))
    else:
        values = [_s_task(t) for t in tasks]
    rows = [{"upright": spec, "variant": v, "s": val} for (_, spec, v), val in zip(tasks, values)]
    out = {"rows": rows}
    if args.genus:
        out["genus_bound"] = str(genus_bound(d))
    return out


def _sweep_task(payload):
    dj, decs = payload
    d = from_json(dj)
    return [(dec, d_squared_ok(d, dec)) for dec in decs]


def verify_report(d: LinkDiagram, d_squared=True, all_decorations=False, axioms=True, reduced=True,
                  samples: int = 2000, seed: int = 0) -> dict:
    checks = []
    if d_squared:
        cells = verify_d_squared(build_total(d))
        checks.append({"check": "d-squared", "ok": not cells, "failing_cells": [list(c) for c in cells[:50]]})
        if all_decorations and d.n:
            decs = list(range(1 << d.n))
            chunks = [decs[k::threads()] for k in range(threads())]
            dj = d.to_json()
            if threads() > 1:
                with ProcessPoolExecutor(threads()) as pool:
                    results = [r for part in pool.map(_sweep_task, [(dj, c) for c in chunks]) for r in part]
            else:
                results = _sweep_task((dj, decs))
            bad = sorted(dec for dec, ok in results if not ok)
            checks.append({"check": "decoration-sweep", "ok": not bad, "decorations": len(decs),
                           "failing_decorations": bad[:50]})
    if axioms:
        rng = random.Random(seed)
        bad: Dict[str, int] = {}
        for _ in range(samples if d.n else 0):
            u = rng.getrandbits(d.n)
            v = u | rng.getrandbits(d.n)
            cfg = configuration(d, u, v).config
            x = rng.getrandbits(len(cfg.circles))
            y = rng.getrandbits(len(cfg.ending.circles))
            if cfg.n_arcs and len(cfg.components) == 1 and rng.random() < 0.6:
                opts = classify(cfg)
                if opts:
                    o = rng.choice(opts)
                    x, y = o.x, o.y
                    cfg = cfg.flip_arcs(o.val)
            lc = LabeledConfiguration(cfg, x, y)
            for name in rule_violations(lc, rng.getrandbits(max(cfg.n_arcs, 1))):
                bad[name] = bad.get(name, 0) + 1
        checks.append({"check": "contribution-rules", "ok": not bad, "samples": samples if d.n else 0,
                       "failures": dict(sorted(bad.items()))})
    if reduced:
        dd = d if d.basepoint is not None else d.with_basepoint(min(list(d.slots) + list(d.loops)))
        C = build_total(dd)
        bpc = C.meta["basepoint_circles"]
        minus = [k for k, g in enumerate(C.gens) if g.x >> bpc[g.u] & 1]
        ok = is_subcomplex(C, minus)
        Cm, Cp = reduced_split(C)
        ok = ok and len(Cm.gens) + len(Cp.gens) == len(C.gens)
        checks.append({"check": "reduced-subcomplex", "ok": ok, "minus": len(Cm.gens), "plus": len(Cp.gens)})
    return {"ok": all(c["ok"] for c in checks), "checks": checks}


def cmd_verify(args) -> dict:
    d = _load(args)
    chosen = args.d_squared or args.axioms or args.reduced or args.all_decorations
    return verify_report(
        d,
        d_squared=args.d_squared or args.all_decorations or not chosen,
        all_decorations=args.all_decorations,
        axioms=args.axioms or not chosen,
        reduced=args.reduced or not chosen,
        samples=args.samples,
        seed=args.seed,
    )


def cmd_reduce(args) -> dict:
    d = _load(args)
    C = build_total(d)
    R = gauss_reduce(C)
    out = complex_to_json(R)
    out["generators_before"] = len(C.gens)
    return {"complex": out}


def parse_move(text: str):
    """``R1+:edge=3:side=left``, ``R2:over=1:under=4[:face=2]``, ``R3:face=5``; ``dec=01`` sets bits."""
    parts = text.strip().split(":")
    move, site, dec = parts[0], {}, None
    for p in parts[1:]:
        if "=" not in p:
            raise UsageError(f"bad move argument {p!r} in {text!r}")
        k, v = p.split("=", 1)
        if k == "dec":
            dec = [int(b) for b in v]
        elif k == "side":
            site[k] = v
        elif k == "edges":
            site[k] = [int(e) for e in v.split("/")]
        else:
            try:
                site[k] = int(v)
            except ValueError:
                raise UsageError(f"bad move argument {p!r}") from None
    return move, site, dec


def homology_signature(d: LinkDiagram) -> dict:
    C = build_total(d)
    return {
        "kh": sorted(homology_f2(specialize(C, "0", "0")).items()),
        "bn": sorted(homology_pid(specialize(C, "keep", "0")).items()),
        "sz": sorted(homology_pid(specialize(C, "0", "keep")).items()),
        "ftot": total_rank(homology_f2(specialize(C, "1", "1"))),
    }


def cmd_moves(args) -> dict:
    d = _load(args)
    moved = d
    applied = []
    for item in [m for chunk in args.apply for m in chunk.split(",") if m.strip()]:
        move, site, dec = parse_move(item)
        try:
            moved = apply_move(moved, move, site, dec)
        except DiagramError as exc:
            raise UsageError(f"cannot apply {item}: {exc}") from None
        applied.append(item.strip())
    before, after = homology_signature(d), homology_signature(moved)
    same = {k: before[k] == after[k] for k in before}
    return {"ok": all(same.values()), "applied": applied, "diagram": moved.to_json(),
            "pd": moved.pd_string(), "homology_unchanged": same}


def cmd_family(args) -> dict:
    d = _load(args)
    cc = configuration(d, args.u, args.v)
    lc = cc.labeled(args.x, args.y)
    return {"u": args.u, "v": args.v, "x": args.x, "y": args.y, "family": family_tag(lc),
            "dump": cc.config.dump().splitlines()}


# ---------------------------------------------------------------------------
# Output


def to_tsv(command: str, report: dict) -> str:
    lines = []
    if command == "homology":
        rows = report["rows"]
        cols = list(rows[0].keys()) if rows else ["rank"]
        lines.append("\t".join(cols))
        for r in rows:
            lines.append("\t".join(",".join(map(str, v)) if isinstance(v, list) else str(v) for v in r.values()))
    elif command == "s":
        lines.append("upright\tvariant\ts")
        lines += [f"{r['upright']}\t{r['variant']}\t{r['s']}" for r in report["rows"]]
    elif command == "verify":
        lines.append("check\tok")
        lines += [f"{c['check']}\t{int(c['ok'])}" for c in report["checks"]]
    elif command == "moves":
        lines.append("theory\tunchanged")
        lines += [f"{k}\t{int(v)}" for k, v in report["homology_unchanged"].items()]
    elif command == "family":
        lines.append(f"family\t{report['family']}")
    else:
        lines.append("src\ttgt\tterms")
        for e in report["complex"]["entries"]:
            lines.append(f"{e['src']}\t{e['tgt']}\t{e['terms']}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="khtot", description="Perturbed link homology over F2[H,W].")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("input", help="JSON or PD file, inline PD text, or a bundled diagram name")
        sp.add_argument("--decorations", help="decoration bits, e.g. 010")
        sp.add_argument("--basepoint", type=int, help="basepoint edge id")
        sp.add_argument("--mirror", action="store_true", help="use the mirror diagram")
        sp.add_argument("--format", choices=("json", "tsv"), default="json")
        sp.add_argument("--timing", action="store_true", help="report wall time on stderr")

    sp = sub.add_parser("homology", help="homology tables of a specialization")
    common(sp)
    sp.add_argument("--theory", choices=sorted(THEORIES), default="kh")

    sp = sub.add_parser("s", help="s^U invariants of a knot")
    common(sp)
    sp.add_argument("--upright", action="append", help="upright set spec (repeatable); default t=1")
    sp.add_argument("--variant", action="append", choices=sorted(VARIANTS), help="repeatable; default o")
    sp.add_argument("--genus", action="store_true", help="also report the four-ball genus bound")

    sp = sub.add_parser("verify", help="d^2 = 0, decoration sweep, contribution rules, reduced split")
    common(sp)
    sp.add_argument("--d-squared", action="store_true", help="check delta^2 = 0 cell by cell")
    sp.add_argument("--all-decorations", action="store_true",
                    help="repeat the d^2 check for every decoration")
    sp.add_argument("--axioms", action="store_true", help="sample the contribution rules")
    sp.add_argument("--reduced", action="store_true", help="check the basepoint subcomplex")
    sp.add_argument("--samples", type=int, default=2000, help="rule samples (default 2000)")
    sp.add_argument("--seed", type=int, default=0, help="sampling seed")

    sp = sub.add_parser("reduce", help="export the unit-cancelled complex over F2[H,W]")
    common(sp)

    sp = sub.add_parser("moves", help="apply Reidemeister moves and compare homology")
    common(sp)
    sp.add_argument("--apply", action="append", required=True,
                    help="comma-separated moves, e.g. R1+:edge=3:side=left,R2:over=1:under=4")

    sp = sub.add_parser("family", help="family tag of the configuration D_u^v with labels")
    common(sp)
    for name in ("u", "v", "x", "y"):
        sp.add_argument(f"--{name}", type=int, default=0, help=f"{name} as a bitmask")
    return p


COMMANDS = {"homology": cmd_homology, "s": cmd_s, "verify": cmd_verify, "reduce": cmd_reduce,
            "moves": cmd_moves, "family": cmd_family}


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        report = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"khtot: error: {exc}", file=sys.stderr)
        return 2
    doc = {"schema": SCHEMA, "command": args.command, "input": digest(_load(args))}
    doc.update(report)
    if args.format == "tsv":
        out.write(to_tsv(args.command, report))
    else:
        out.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    if args.timing:
        print(f"wall time: {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return 1 if report.get("ok") is False else 0


def main() -> None:
    sys.exit(run())
