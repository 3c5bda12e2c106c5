"""Orientation generators, upright sets and the s^U invariants.

The knot invariants here live in the filtered complex C_ftot = (C, d + h).
For an orientation ``o`` the Bar-Natan generator g_BN(o) sits over the
oriented resolution; :func:`lift_to_ftot` corrects it, one homological
degree at a time, into a cycle of C_ftot.  The s^U invariants then ask for
the largest translate U[n] whose span still carries a homologous cycle.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import solve_f2
from .complex import CubeData, compile_cube, decoration_mask, popcount
from .diagram import LinkDiagram, reorient
from .planar import resolve

# ---------------------------------------------------------------------------
# Upright sets


def _sgn(v) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class UprightSet:
    """An upward-closed subset of Z x (2Z + 1).

    ``kind`` is ``"min"``, ``"max"`` or ``"line"``.  A line set keeps the
    points strictly above the line a*t + b*(1 - t) = s*(1 - t); points on
    the line are decided by ``r``, which defaults to the sign of ``b``.
    ``shift`` is the translate n of U[n].
    """

    kind: str = "line"
    t: Fraction = Fraction(1)
    s: Fraction = Fraction(0)
    r: Tuple[Tuple[Tuple[int, int], int], ...] = ()
    shift: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("min", "max", "line"):
            raise ValueError(f"unknown upright kind {self.kind!r}")
        if self.shift % 2:
            raise ValueError("translates must be even")
        if self.kind == "line":
            if not 0 <= self.t <= 1 or not -1 <= self.s <= 1:
                raise ValueError("need t in [0, 1] and s in [-1, 1]")
            for (a, b), v in self.r:
                if v not in (1, -1):
                    raise ValueError("boundary values must be +1 or -1")
                if a == 0 and v != _sgn(b):
                    raise ValueError("r(0, b) must equal sgn(b)")

    @classmethod
    def minimal(cls) -> "UprightSet":
        return cls("min")

    @classmethod
    def maximal(cls) -> "UprightSet":
        return cls("max")

    @classmethod
    def projective(cls, t) -> "UprightSet":
        return cls("line", Fraction(t))

    def translate(self, n: int) -> "UprightSet":
        return UprightSet(self.kind, self.t, self.s, self.r, self.shift + n)

    def __contains__(self, point) -> bool:
        a, b = point
        return upright_member(self, a, b)

    @property
    def centered(self) -> bool:
        return self.shift == 0

    def __str__(self) -> str:
        if self.kind in ("min", "max"):
            body = self.kind
        else:
            body = f"t={self.t}"
            if self.s or self.r:
                body += f",s={self.s}"
            if self.r:
                body += ",r=[" + ",".join(f"({a},{b}):{v:+d}" for (a, b), v in self.r) + "]"
        return body + (f"[{self.shift}]" if self.shift else "")


def upright_member(U: UprightSet, a: int, b: int) -> bool:
    if b % 2 == 0:
        raise ValueError("quantum coordinate must be odd")
    b -= U.shift
    if U.kind == "min":
        return a >= 0 and b > 0
    if U.kind == "max":
        return a > 0 or b > 0
    val = a * U.t + (b - U.s) * (1 - U.t)
    if val != 0:
        return val > 0
    return dict(U.r).get((a, b), _sgn(b)) > 0


_SPEC_RE = re.compile(r"^\s*(?P<body>.*?)\s*(?:\[\s*(?P<shift>-?\d+)\s*\])?\s*$")
_PAIR_RE = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*:\s*([+-]?1)")


def parse_upright(text: str) -> UprightSet:
    """Parse ``min``, ``max``, ``t=p/q`` or ``t=..,s=..,r=[(a,b):+1,...]``, with an optional ``[n]``."""
    m = _SPEC_RE.match(text)
    body = m.group("body")
    shift = int(m.group("shift") or 0)
    if body in ("min", "max"):
        return UprightSet(body, shift=shift)
    fields: Dict[str, str] = {}
    rest = body
    r_match = re.search(r"r\s*=\s*\[(.*?)\]", rest)
    pairs: List[Tuple[Tuple[int, int], int]] = []
    if r_match:
        inner = r_match.group(1)
        for a, b, v in _PAIR_RE.findall(inner):
            pairs.append(((int(a), int(b)), int(v)))
        if _PAIR_RE.sub("", inner).replace(",", "").strip():
            raise ValueError(f"bad boundary list in {text!r}")
        rest = rest[: r_match.start()] + rest[r_match.end():]
    for part in rest.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"bad upright spec {text!r}")
        k, v = (p.strip() for p in part.split("=", 1))
        if k not in ("t", "s") or k in fields:
            raise ValueError(f"bad upright spec {text!r}")
        fields[k] = v
    if "t" not in fields:
        raise ValueError(f"bad upright spec {text!r}")
    try:
        t = Fraction(fields["t"])
        s = Fraction(fields.get("s", "0"))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad number in {text!r}") from exc
    return UprightSet("line", t, s, tuple(sorted(pairs)), shift)


STANDARD_UPRIGHTS = ("min", "max", "t=0", "t=1/2", "t=1")


# ---------------------------------------------------------------------------
# Orientations and the Bar-Natan generator


def _orientation(d: LinkDiagram, o) -> Tuple[int, ...]:
    """Normalize ``o`` to one sign per component (+1 keeps the diagram's direction)."""
    if o is None or o == "o" or o == 1:
        return (1,) * d.l
    if o == "-o" or o == -1:
        return (-1,) * d.l
    o = tuple(int(v) for v in o)
    if len(o) != d.l or any(v not in (1, -1) for v in o):
        raise ValueError("orientation needs one sign (+1/-1) per component")
    return o


def oriented_resolution(d: LinkDiagram, o=None) -> int:
    """Bitmask of the crossings that are negative for ``o``; their 1-smoothing is the oriented one."""
    o = _orientation(d, o)
    signs = d.signs if all(v == 1 for v in o) else reorient(d, list(o)).signs
    return sum(1 << c for c, s in enumerate(signs) if s < 0)


def _graph_pieces(d: LinkDiagram) -> List[int]:
    parent = list(range(d.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (c1, _), (c2, _) in d.slots.values():
        parent[find(c1)] = find(c2)
    return [find(c) for c in range(d.n)]


def checkerboard(d: LinkDiagram) -> Dict[Tuple[int, int], int]:
    """Colour (1 black, 0 white) of the face to the left of each edge, per direction.

    Keys are ``(edge, along)`` with ``along`` true when walking the edge in
    the diagram's direction.  In every connected piece the largest face is
    taken as the unbounded one and coloured white.
    """
    faces = d.faces
    left: Dict[Tuple[int, int], int] = {}
    for k, face in enumerate(faces):
        for s in face:
            left[s.edge, s.along] = k
    piece = _graph_pieces(d)
    adj: Dict[int, List[int]] = {k: [] for k in range(len(faces))}
    for e in d.slots:
        a, b = left[e, True], left[e, False]
        adj[a].append(b)
        adj[b].append(a)
    colour: Dict[int, int] = {}
    by_piece: Dict[int, List[int]] = {}
    for k, face in enumerate(faces):
        by_piece.setdefault(piece[face[0].start[0]], []).append(k)
    for ks in by_piece.values():
        outer = max(ks, key=lambda k: (len(faces[k]), -k))
        colour[outer] = 0
        todo = [outer]
        while todo:
            k = todo.pop()
            for j in adj[k]:
                if j not in colour:
                    colour[j] = 1 - colour[k]
                    todo.append(j)
                elif colour[j] == colour[k]:
                    raise ValueError("face graph is not bipartite")
    return {key: colour[k] for key, k in left.items()}


def _circle_factors(d: LinkDiagram, o) -> Tuple[int, List[int]]:
    """(u_o, black) with black[i] = 1 when circle i bounds a black region on its left."""
    o = _orientation(d, o)
    u = oriented_resolution(d, o)
    res = resolve(d, u)
    colours = checkerboard(d) if d.n else {}
    comp = d.edge_component
    black = []
    for ci, es in enumerate(res.edges):
        e = min(es)
        along = o[comp[e]] == 1
        if e in d.loops:
            # a free loop is drawn counterclockwise around a black disc
            black.append(1 if along else 0)
        else:
            black.append(colours[e, along])
    return u, black


def bn_generator_chain(d: LinkDiagram, o=None) -> Dict[Tuple[int, int], int]:
    """Product of x_i (black) and H + x_i (white) over the oriented resolution.

    Returned as ``{(u, x): H-exponent}``; at H = 1 the keys alone form a
    cycle for d_1 + h_1.
    """
    u, black = _circle_factors(d, o)
    base = sum(1 << i for i, b in enumerate(black) if b)
    white = [i for i, b in enumerate(black) if not b]
    out: Dict[Tuple[int, int], int] = {}
    for pick in range(1 << len(white)):
        x = base
        for k, i in enumerate(white):
            if not pick >> k & 1:
                x |= 1 << i
        out[u, x] = popcount(pick)
    return out


def linking_number(d: LinkDiagram, a: Sequence[int], b: Sequence[int]) -> int:
    """Linking number of the sublinks with component indices ``a`` and ``b``."""
    comp = d.edge_component
    total = 0
    for c, X in enumerate(d.crossings):
        ks = {comp[e] for e in X}
        if len(ks) != 2:
            continue
        k1, k2 = sorted(ks)
        if (k1 in a and k2 in b) or (k1 in b and k2 in a):
            total += d.signs[c]
    return total // 2


# ---------------------------------------------------------------------------
# The filtered complex C_ftot


@dataclass
class FtotSystem:
    """C_ftot of one decorated diagram as F2 column bitsets, split as f + g."""

    diagram: LinkDiagram
    cube: CubeData
    f_cols: List[int]
    g_cols: List[int]
    gr_h: np.ndarray
    gr_q: np.ndarray
    _cache: dict = field(default_factory=dict)

    @classmethod
    def build(cls, d: LinkDiagram) -> "FtotSystem":
        cube = compile_cube(d)
        ok = cube.accepted(decoration_mask(d))
        n = len(cube.gens)
        f_cols, g_cols = [0] * n, [0] * n
        for s, t, w in zip(cube.src[ok], cube.tgt[ok], cube.power[ok]):
            if w == 0:
                f_cols[s] ^= 1 << int(t)
            else:
                g_cols[s] ^= 1 << int(t)
        gr_h = np.array([g.gr_h for g in cube.gens])
        gr_q = np.array([g.gr_q for g in cube.gens])
        return cls(d, cube, f_cols, g_cols, gr_h, gr_q)

    @cached_property
    def cols(self) -> List[int]:
        return [a ^ b for a, b in zip(self.f_cols, self.g_cols)]

    def __len__(self) -> int:
        return len(self.cols)

    def apply(self, vec: int, which: str = "fg") -> int:
        cols = {"f": self.f_cols, "g": self.g_cols, "fg": self.cols}[which]
        out = 0
        while vec:
            low = vec & -vec
            out ^= cols[low.bit_length() - 1]
            vec ^= low
        return out

    def level_mask(self, h: int) -> int:
        key = ("level", h)
        if key not in self._cache:
            m = 0
            for j in np.flatnonzero(self.gr_h == h):
                m |= 1 << int(j)
            self._cache[key] = m
        return self._cache[key]

    def vector(self, chain: Iterable[Tuple[int, int]]) -> int:
        v = 0
        for key in chain:
            v ^= 1 << self.cube.index[key]
        return v

    def support(self, vec: int) -> List[int]:
        return [j for j in range(vec.bit_length()) if vec >> j & 1]


def _bits(vec: int) -> List[int]:
    return [j for j in range(vec.bit_length()) if vec >> j & 1]


def lift_to_ftot(d: LinkDiagram, o=None, system: Optional[FtotSystem] = None) -> int:
    """A cycle of C_ftot whose homological-degree-zero part is g_BN(o) at H = 1.

    Returned as a bitset over the generators of ``compile_cube(d)``.
    """
    S = system or FtotSystem.build(d)
    z = S.vector(bn_generator_chain(d, o))
    if S.apply(z, "f"):
        raise ArithmeticError("Bar-Natan generator is not a cycle; orientation data is inconsistent")
    r = S.apply(z)
    top = int(S.gr_h.max()) if len(S) else 0
    while r:
        m = min(int(S.gr_h[j]) for j in _bits(r))
        rm = r & S.level_mask(m)
        cols_idx = _bits(S.level_mask(m - 1))
        sol = solve_f2([S.f_cols[j] for j in cols_idx], rm)
        if sol is None:
            raise ArithmeticError(f"no lift through homological degree {m}")
        for k in sol:
            z ^= 1 << cols_idx[k]
        r = S.apply(z)
        if m > top + 1:
            raise ArithmeticError("lift did not terminate")
    return z


def _orientation_cycles(d: LinkDiagram, variant: str, S: FtotSystem) -> int:
    if variant == "o":
        return lift_to_ftot(d, "o", S)
    if variant in ("-o", "minus-o"):
        return lift_to_ftot(d, "-o", S)
    if variant in ("o,-o", "pair"):
        return lift_to_ftot(d, "o", S) ^ lift_to_ftot(d, "-o", S)
    raise ValueError(f"unknown variant {variant!r}")


def has_representative(S: FtotSystem, z: int, U: UprightSet) -> bool:
    """Whether z + (d + h)(a) lies in the span of U for some chain a."""
    outside = 0
    for j, (a, b) in enumerate(zip(S.gr_h.tolist(), S.gr_q.tolist())):
        if not upright_member(U, a, b):
            outside |= 1 << j
    target = z & outside
    if not target:
        return True
    return solve_f2([c & outside for c in S.cols], target) is not None


def s_invariant(d: LinkDiagram, U, variant: str = "o", system: Optional[FtotSystem] = None) -> int:
    """s^U for a knot diagram; ``variant`` is ``o``, ``-o`` or ``o,-o``."""
    if d.l != 1:
        raise ValueError("s-invariants are defined for knots only")
    if isinstance(U, str):
        U = parse_upright(U)
    if U.shift:
        raise ValueError("s^U needs a centered upright set")
    S = system or FtotSystem.build(d)
    z = _orientation_cycles(d, variant, S)
    return max_translate(S, z, U) + (0 if variant in ("o,-o", "pair") else 2)


def max_translate(S, z: int, U: UprightSet) -> int:
    """Largest even n such that z is homologous to a chain supported in U[n].

    ``S`` only needs ``cols`` (column bitsets of d + h) and the ``gr_h`` and
    ``gr_q`` arrays, so hand-built model complexes work too.
    """

    def ok(n: int) -> bool:
        return has_representative(S, z, U.translate(n))

    # membership is monotone in n; bracket it, then bisect over even translates
    span = 2 * (int(np.abs(S.gr_q).max()) + int(np.abs(S.gr_h).max()) + 2)
    lo, hi = -2, 0
    while not ok(lo):
        lo -= 2 * (hi - lo)
        if lo < -4 * span:
            raise ArithmeticError("no representative in any translate")
    while ok(hi):
        lo, hi = hi, hi + 2 * (hi - lo)
        if hi > 4 * span:
            raise ArithmeticError("representative in every translate")
    while hi - lo > 2:
        mid = (lo + hi) // 2
        mid -= mid % 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def s_table(d: LinkDiagram, uprights: Sequence[str] = STANDARD_UPRIGHTS,
            variants: Sequence[str] = ("o", "-o", "o,-o")) -> Dict[Tuple[str, str], int]:
    S = FtotSystem.build(d)
    return {(u, v): s_invariant(d, parse_upright(u), v, S) for u in uprights for v in variants}


def genus_bound(d: LinkDiagram, uprights: Sequence[str] = STANDARD_UPRIGHTS) -> Fraction:
    """Largest |s^U| / 2 over the given upright sets and all three variants."""
    if d.l != 1:
        raise ValueError("genus bounds are for knots")
    table = s_table(d, uprights)
    return max(Fraction(abs(v), 2) for v in table.values())
