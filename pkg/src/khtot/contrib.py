"""Contribution functions c_k, c_b, c_d and c_h.

Each connected configuration with at least one arc is classified into the
families it can belong to.  A family fixes the labels completely, so the
classifier returns a short list of :class:`Option` records: the starting and
ending flags, the kind of contribution, and the arc orientations it needs.

Orientation requirements are stored as ``(mask, val)``: reversing the arcs in
a set ``F`` (as a bitmask over arcs) gives a contributing configuration iff
``F & mask`` is ``val`` or ``val ^ mask``.  The two choices are the family
and its reverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from .planar import (
    L,
    Config,
    LabeledConfiguration,
    circle_of_mark,
    decompose,
)

# Orientation conventions of the Type C and Type E families.  LINK_BIT is the
# common linking bit of inside/outside arc pairs in Type C; EAR_TAIL says
# whether the dual of a self-arc in Type E starts on the special ending circle.
LINK_BIT = 1
EAR_TAIL = 1

TAGS = ("MergeA", "MergeB", "SplitA", "SplitB", "MergeC", "SplitC",
        "SzA", "SzB", "SzC", "SzD", "SzE", "Forest", "None")


@dataclass(frozen=True)
class Option:
    kind: str  # 'k', 'b', 'd' or 'h'
    tag: str
    x: int
    y: int
    mask: int = 0
    val: int = 0

    def accepts(self, flips: int = 0) -> bool:
        f = flips & self.mask
        return f == self.val or f == self.val ^ self.mask


def _full(n: int) -> int:
    return (1 << n) - 1


def _self_arcs(cfg: Config) -> List[int]:
    return [j for j in range(cfg.n_arcs) if cfg.ends[2 * j][0] == cfg.ends[2 * j + 1][0]]


def _parallel_pattern(cfg: Config) -> Optional[Tuple[int, int]]:
    """Two circles joined by arcs that all start on the same circle."""
    if len(cfg.circles) != 2 or _self_arcs(cfg):
        return None
    val = 0
    for j in range(cfg.n_arcs):
        if cfg.ends[2 * j][0] == 1:
            val |= 1 << j
    return _full(cfg.n_arcs), val


def _link_pattern(cfg: Config, beta: int) -> Optional[Tuple[int, int]]:
    """Orientation pattern for Type C on a one-circle configuration, or None."""
    if len(cfg.circles) != 1 or cfg.n_arcs < 2:
        return None
    circ = cfg.circles[0]
    n = len(circ)
    pos = {m: k for k, (m, _) in enumerate(circ)}
    side = {}
    for j in range(cfg.n_arcs):
        s0, s1 = circ[pos[2 * j]][1], circ[pos[2 * j + 1]][1]
        if s0 != s1:
            return None
        side[j] = s0
    left = [j for j in side if side[j] == L]
    right = [j for j in side if side[j] != L]
    if not left or not right:
        return None
    bit: Dict[Tuple[int, int], int] = {}
    for a in left:
        t = pos[2 * a]
        span = (pos[2 * a + 1] - t) % n
        for b in right:
            inside = [m for m in (2 * b, 2 * b + 1) if 0 < (pos[m] - t) % n < span]
            if len(inside) != 1:
                return None
            bit[a, b] = 1 if inside[0] == 2 * b else 0
    a0, b0 = left[0], right[0]
    r = {a0: 0}
    for b in right:
        r[b] = bit[a0, b] ^ beta
    for a in left[1:]:
        r[a] = bit[a, b0] ^ beta ^ r[b0]
    if any(bit[a, b] ^ r[a] ^ r[b] != beta for a in left for b in right):
        return None
    val = 0
    for j, f in r.items():
        val |= f << j
    return _full(cfg.n_arcs), val


def _distinct_arcs(circ) -> int:
    return len({m // 2 for m, _ in circ})


def _type_e(cfg: Config, ear: int) -> List[Option]:
    out = []
    ns = len(cfg.circles)
    end = cfg.ending
    end_owner = circle_of_mark(end)
    ne = len(end.circles)
    full = _full(cfg.n_arcs)
    for S in range(ns):
        ok = True
        base = 0
        selfs = []
        for j in range(cfg.n_arcs):
            ct, ch = cfg.ends[2 * j][0], cfg.ends[2 * j + 1][0]
            if ct == S and ch == S:
                selfs.append(j)
            elif ct == S or ch == S:
                if ct == S:
                    base |= 1 << j  # must be reversed to run into S
            else:
                ok = False
                break
        if not ok:
            continue
        if any(len(cfg.circles[c]) != 1 for c in range(ns) if c != S):
            continue
        for T in range(ne):
            if any(_distinct_arcs(end.circles[e]) != 1 for e in range(ne) if e != T):
                continue
            val = base
            good = True
            for j in selfs:
                et, eh = end_owner[2 * j], end_owner[2 * j + 1]
                if (et == T) == (eh == T):
                    good = False
                    break
                if (et == T) != bool(ear):
                    val |= 1 << j
            if good:
                out.append(Option("d", "SzE", _full(ns) & ~(1 << S), 1 << T, full, val))
    return out


@lru_cache(maxsize=200000)
def classify(cfg: Config, beta: Optional[int] = None, ear: Optional[int] = None) -> Tuple[Option, ...]:
    """All label/orientation options under which a connected configuration contributes."""
    beta = LINK_BIT if beta is None else beta
    ear = EAR_TAIL if ear is None else ear
    k = cfg.n_arcs
    if k == 0:
        return ()
    ns = len(cfg.circles)
    end = cfg.ending
    ne = len(end.circles)
    xs, ys = _full(ns), _full(ne)
    out: List[Option] = []
    if k == 1:
        if ns == 2:
            out += [Option("k", "MergeA", 0, 0), Option("k", "MergeB", 1, 1),
                    Option("k", "MergeB", 2, 1), Option("b", "MergeC", 3, 1)]
        else:
            out += [Option("k", "SplitA", 1, 3), Option("k", "SplitB", 0, 1),
                    Option("k", "SplitB", 0, 2), Option("b", "SplitC", 0, 0)]
    # trees and dual trees
    if ns == k + 1:
        out.append(Option("h", "Forest", xs, ys))
    elif ns == 1 and ne == k + 1:
        out.append(Option("h", "Forest", 0, 0))
    # Szabo families; at index one they coincide with Merge/Split A and B
    if k >= 2:
        pat = _parallel_pattern(cfg)
        if pat:
            out.append(Option("d", "SzA", 0, 0, *pat))
        pat = _parallel_pattern(end)
        if pat:
            out.append(Option("d", "SzB", xs, ys, *pat))
        pat = _link_pattern(cfg, beta)
        if pat:
            out.append(Option("d", "SzC", 0, 0, *pat))
        pat = _link_pattern(end.mirror(), beta) if ne == 1 else None
        if pat:
            out.append(Option("d", "SzD", xs, ys, *pat))
        out += _type_e(cfg, ear)
    return tuple(out)


def _passive_ok(lc: LabeledConfiguration, dec) -> bool:
    return all((lc.x >> s & 1) == (lc.y >> e & 1) for s, e in dec.passive)


def _single(lc: LabeledConfiguration, kinds: str, beta=None, ear=None) -> Optional[str]:
    dec = decompose(lc)
    if len(dec.active) != 1 or not _passive_ok(lc, dec):
        return None
    comp = dec.active[0]
    for opt in classify(comp.config, beta, ear):
        if opt.kind in kinds and opt.x == comp.x and opt.y == comp.y and opt.accepts(0):
            return opt.tag
    return None


def family_tag(lc: LabeledConfiguration, beta=None, ear=None) -> str:
    """FamilyTag of a labeled configuration (first matching family)."""
    if eval_h(lc):
        return "Forest"
    tag = _single(lc, "kbd", beta, ear)
    return tag or "None"


def eval_k(lc: LabeledConfiguration) -> int:
    return int(_single(lc, "k") is not None)


def eval_b(lc: LabeledConfiguration) -> int:
    return int(_single(lc, "b") is not None)


def eval_d(lc: LabeledConfiguration, beta=None, ear=None) -> int:
    """Index one is Khovanov's c_k; higher index uses the Type A-E families."""
    return int(_single(lc, "k" if lc.index == 1 else "d", beta, ear) is not None)


def eval_h(lc: LabeledConfiguration) -> int:
    if lc.index < 1:
        return 0
    dec = decompose(lc)
    if not _passive_ok(lc, dec):
        return 0
    for comp in dec.active:
        if not any(o.kind == "h" and o.x == comp.x and o.y == comp.y for o in classify(comp.config)):
            return 0
    return 1


EVALUATORS = {"k": eval_k, "b": eval_b, "d": eval_d, "h": eval_h}


def with_passive(lc: LabeledConfiguration, p: int, q: int) -> LabeledConfiguration:
    """Add a free circle flagged ``p`` at the start and ``q`` at the end."""
    cfg = Config(lc.config.circles + ((),), lc.config.n_arcs)
    return LabeledConfiguration(cfg, lc.x | p << lc.n_start, lc.y | q << lc.n_end)


def rule_violations(lc: LabeledConfiguration, flips: int = 0) -> List[str]:
    """Names of the contribution-rule checks that fail on ``lc``.

    ``flips`` is the arc set re-oriented for the disoriented rule.
    """
    from .planar import dual_config, transform

    bad = []
    base = {k: f(lc) for k, f in EVALUATORS.items()}
    moved = LabeledConfiguration(lc.config.flip_arcs(flips), lc.x, lc.y)
    for k in "kbh":
        if EVALUATORS[k](moved) != base[k]:
            bad.append(f"disoriented:{k}")
    if eval_d(transform(lc, "reverse")) != base["d"]:
        bad.append("conjugation:d")
    md = transform(dual_config(lc), "mirror")
    for k, f in EVALUATORS.items():
        if f(md) != base[k]:
            bad.append(f"duality:{k}")
    for p in (0, 1):
        for q in (0, 1):
            ext = with_passive(lc, p, q)
            for k, f in EVALUATORS.items():
                if f(ext) != (base[k] if p == q else 0):
                    bad.append(f"extension:{k}")
    cfg = lc.config
    for ci, circ in enumerate(cfg.circles):
        if not lc.x >> ci & 1:
            continue
        for pos in range(max(len(circ), 1)):
            if not lc.y >> cfg.segment_end(ci, pos) & 1 and any(base.values()):
                bad.append("filtration")
    return sorted(set(bad))
