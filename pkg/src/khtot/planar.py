"""Resolutions and resolution configurations as combinatorial data.

A configuration is stored circle by circle.  Each circle is the cyclic
sequence of arc endpoints met while walking along it, and each endpoint
records on which side of the walking direction its arc leaves (``L`` or
``R``).  Arc ``j`` has tail mark ``2j`` and head mark ``2j + 1``.  For a
connected configuration this determines the embedding in the sphere up to
orientation preserving homeomorphism, which is all the contribution
functions look at.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Sequence, Tuple

if TYPE_CHECKING:  # pragma: no cover
    from .diagram import LinkDiagram

L, R = 1, -1

Mark = Tuple[int, int]  # (mark id, side)
Stub = Tuple[int, int, int]  # (circle, position, 0 = before / 1 = after)


class CombMap:
    """Darts with a fixed-point-free pairing and a counterclockwise rotation."""

    def __init__(self, darts: Iterable, pairing: Dict, rotation: Dict):
        self.darts = list(darts)
        self.pairing = dict(pairing)
        self.rotation = dict(rotation)
        for d in self.darts:
            p = self.pairing.get(d)
            if p is None or p == d or self.pairing.get(p) != d:
                raise ValueError("pairing must be a fixed-point-free involution")
        if sorted(self.rotation.values()) != sorted(self.darts):
            raise ValueError("rotation must permute the darts")

    def _orbits(self, step) -> List[List]:
        seen = set()
        out = []
        for d in self.darts:
            if d in seen:
                continue
            orbit = []
            while d not in seen:
                seen.add(d)
                orbit.append(d)
                d = step(d)
            out.append(orbit)
        return out

    def faces(self) -> List[List]:
        """Orbits of rotation after pairing; each keeps its face on the right."""
        return self._orbits(lambda d: self.rotation[self.pairing[d]])

    def vertices(self) -> List[List]:
        return self._orbits(lambda d: self.rotation[d])

    def euler_characteristic(self) -> int:
        return len(self.vertices()) - len(self.darts) // 2 + len(self.faces())


# ---------------------------------------------------------------------------
# Configurations


@dataclass(frozen=True)
class Config:
    circles: Tuple[Tuple[Mark, ...], ...]
    n_arcs: int

    @cached_property
    def ends(self) -> Dict[int, Tuple[int, int, int]]:
        """mark -> (circle, position, side)"""
        out = {}
        for ci, circ in enumerate(self.circles):
            for k, (m, s) in enumerate(circ):
                out[m] = (ci, k, s)
        return out

    @property
    def index(self) -> int:
        return self.n_arcs

    def arc_circles(self, j: int) -> Tuple[int, int]:
        return self.ends[2 * j][0], self.ends[2 * j + 1][0]

    def is_passive(self, ci: int) -> bool:
        return not self.circles[ci]

    @cached_property
    def components(self) -> Tuple[Tuple[int, ...], ...]:
        """Circle sets of the connected components of circles and arcs."""
        parent = list(range(len(self.circles)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for j in range(self.n_arcs):
            a, b = self.arc_circles(j)
            parent[find(a)] = find(b)
        groups: Dict[int, List[int]] = {}
        for ci in range(len(self.circles)):
            groups.setdefault(find(ci), []).append(ci)
        return tuple(tuple(g) for g in sorted(groups.values()))

    def restrict(self, cids: Sequence[int]) -> Tuple["Config", Dict[int, int]]:
        """Sub-configuration on the given circles (which must be a union of components)."""
        arcs = sorted({m // 2 for ci in cids for m, _ in self.circles[ci]})
        amap = {a: k for k, a in enumerate(arcs)}
        circles = tuple(
            tuple((2 * amap[m // 2] + (m & 1), s) for m, s in self.circles[ci]) for ci in cids
        )
        return Config(circles, len(arcs)), amap

    def mirror(self) -> "Config":
        return Config(tuple(tuple((m, -s) for m, s in c) for c in self.circles), self.n_arcs)

    def flip_arcs(self, mask: int) -> "Config":
        """Reverse the arcs whose bit is set in ``mask``."""
        return Config(
            tuple(tuple((m ^ 1 if mask >> (m // 2) & 1 else m, s) for m, s in c) for c in self.circles),
            self.n_arcs,
        )

    def reverse(self) -> "Config":
        return self.flip_arcs((1 << self.n_arcs) - 1)

    @property
    def surgery(self) -> Tuple["Config", Tuple[int, ...]]:
        """Ending circles with dual arcs, and start index -> end index for passive circles.

        Active ending circles come first, in the order their first stub is
        met; passive circles follow in their original order.
        """
        return self._trace[0], self._trace[1]

    def segment_end(self, ci: int, k: int) -> int:
        """Ending circle containing the stretch of circle ``ci`` just after its k-th mark."""
        if not self.circles[ci]:
            return self._trace[1][ci]
        return self._trace[2][ci, k % len(self.circles[ci])]

    @cached_property
    def _trace(self):
        circles = self.circles
        band: Dict[Stub, Tuple[Stub, Mark]] = {}
        for j in range(self.n_arcs):
            ct, kt, st = self.ends[2 * j]
            ch, kh, sh = self.ends[2 * j + 1]
            lt = (ct, kt, 0 if st == L else 1)
            rt = (ct, kt, 1 if st == L else 0)
            lh = (ch, kh, 1 if sh == L else 0)
            rh = (ch, kh, 0 if sh == L else 1)
            # the dual arc runs from the right side of the band to the left side
            band[lt] = (lh, (2 * j + 1, R))
            band[lh] = (lt, (2 * j + 1, L))
            band[rt] = (rh, (2 * j, L))
            band[rh] = (rt, (2 * j, R))

        def seg(s: Stub) -> Stub:
            ci, k, e = s
            n = len(circles[ci])
            return (ci, (k + 1) % n, 0) if e else (ci, (k - 1) % n, 1)

        seen = set()
        owner: Dict[Tuple[int, int], int] = {}
        out: List[Tuple[Mark, ...]] = []
        for s0 in sorted(band):
            if s0 in seen:
                continue
            marks = []
            s = s0
            while True:
                seen.add(s)
                s1 = seg(s)
                seen.add(s1)
                # the stretch between marks k and k + 1 of a circle
                lo = s if s[2] else s1
                owner[lo[0], lo[1]] = len(out)
                s, mk = band[s1]
                marks.append(mk)
                if s == s0:
                    break
            out.append(tuple(marks))
        passive = []
        for ci, c in enumerate(circles):
            if not c:
                passive.append((ci, len(out)))
                out.append(())
        pmap = [-1] * len(circles)
        for ci, e in passive:
            pmap[ci] = e
        return Config(tuple(out), self.n_arcs), tuple(pmap), owner

    @property
    def ending(self) -> "Config":
        return self.surgery[0]

    def dump(self) -> str:
        """Text form: one cyclic word per circle, then the arcs."""
        lines = []
        for ci, c in enumerate(self.circles):
            word = " ".join(f"{m // 2}{'th'[m & 1]}{'L' if s == L else 'R'}" for m, s in c)
            lines.append(f"circle {ci}: [{word}]")
        for j in range(self.n_arcs):
            a, b = self.arc_circles(j)
            lines.append(f"arc {j}: {a} -> {b}")
        return "\n".join(lines)


def circle_of_mark(cfg: Config) -> Dict[int, int]:
    return {m: ci for ci, c in enumerate(cfg.circles) for m, _ in c}


@dataclass(frozen=True)
class LabeledConfiguration:
    """A configuration with flag bitmasks on starting (x) and ending (y) circles."""

    config: Config
    x: int = 0
    y: int = 0

    @property
    def n_start(self) -> int:
        return len(self.config.circles)

    @property
    def ending(self) -> Config:
        return self.config.ending

    @property
    def n_end(self) -> int:
        return len(self.ending.circles)

    @property
    def index(self) -> int:
        return self.config.n_arcs

    def x_flags(self) -> List[int]:
        return [self.x >> i & 1 for i in range(self.n_start)]

    def y_flags(self) -> List[int]:
        return [self.y >> i & 1 for i in range(self.n_end)]


def end_to_start_map(cfg: Config) -> List[int]:
    """For the dual's ending circles: index of the matching starting circle of ``cfg``.

    The ending circles of the dual carry the marks of the original arcs with
    tail and head exchanged; passive circles are matched through both
    surgeries.
    """
    end, pmap = cfg.surgery
    end2, pmap2 = end.surgery
    owner = circle_of_mark(cfg)
    out = [-1] * len(end2.circles)
    for ci, c in enumerate(end2.circles):
        if c:
            out[ci] = owner[c[0][0] ^ 1]
    for ci, e in enumerate(pmap):
        if e >= 0:
            out[pmap2[e]] = ci
    return out


def dual_config(c: LabeledConfiguration) -> LabeledConfiguration:
    """Surger all arcs; the new arcs are the old ones turned a quarter counterclockwise.

    A starting circle of the dual is flagged iff the ending circle was not;
    an ending circle of the dual is flagged iff its starting circle was not.
    """
    cfg = c.config
    end = cfg.ending
    back = end_to_start_map(cfg)
    new_x = ((1 << len(end.circles)) - 1) & ~c.y
    new_y = 0
    for i, ci in enumerate(back):
        if not c.x >> ci & 1:
            new_y |= 1 << i
    return LabeledConfiguration(end, new_x, new_y)


def transform(c: LabeledConfiguration, kind: str) -> LabeledConfiguration:
    """``mirror`` reverses the orientation of the sphere; ``reverse`` flips every arc."""
    if kind == "mirror":
        return LabeledConfiguration(c.config.mirror(), c.x, c.y)
    if kind == "reverse":
        return LabeledConfiguration(c.config.reverse(), c.x, c.y)
    raise ValueError(f"unknown transform {kind!r}")


def _submask(mask: int, idx: Sequence[int]) -> int:
    out = 0
    for k, i in enumerate(idx):
        if mask >> i & 1:
            out |= 1 << k
    return out


@dataclass(frozen=True)
class Decomposition:
    active: List[LabeledConfiguration]  # one per component carrying arcs
    active_start: List[Tuple[int, ...]]
    active_end: List[Tuple[int, ...]]
    passive: List[Tuple[int, int]] = field(default_factory=list)  # (start circle, end circle)


def decompose(c: LabeledConfiguration) -> Decomposition:
    """Split into connected components; passive circles are matched start to end."""
    cfg = c.config
    end, pmap = cfg.surgery
    end_owner = circle_of_mark(end)
    active, a_start, a_end, passive = [], [], [], []
    for comp in cfg.components:
        if len(comp) == 1 and cfg.is_passive(comp[0]):
            passive.append((comp[0], pmap[comp[0]]))
            continue
        if len(comp) == len(cfg.circles):
            sub, amap = cfg, {a: a for a in range(cfg.n_arcs)}
        else:
            sub, amap = cfg.restrict(comp)
        sub_end = sub.ending
        # identify ending circles of the sub-configuration with those of cfg
        inv = {2 * k + b: 2 * a + b for a, k in amap.items() for b in (0, 1)}
        order = [end_owner[inv[c2[0][0]]] for c2 in sub_end.circles]
        x = _submask(c.x, comp)
        y = _submask(c.y, order)
        active.append(LabeledConfiguration(sub, x, y))
        a_start.append(tuple(comp))
        a_end.append(tuple(order))
    return Decomposition(active, a_start, a_end, passive)


def canonical_form(c: LabeledConfiguration) -> tuple:
    """A complete invariant of labeled configurations up to isotopy of the sphere."""
    cfg = c.config
    end = cfg.ending
    end_owner = circle_of_mark(end)
    parts = []
    for comp in cfg.components:
        if len(comp) == 1 and cfg.is_passive(comp[0]):
            ci = comp[0]
            parts.append(("passive", c.x >> ci & 1, c.y >> cfg.surgery[1][ci] & 1))
            continue
        best = None
        for c0 in comp:
            for k0 in range(len(cfg.circles[c0])):
                code = _bfs_code(cfg, c0, k0)
                if best is None or code[0] < best[0]:
                    best = code
        code, visit, arc_names = best
        xs = tuple(c.x >> ci & 1 for ci in visit)
        ys = []
        for ei in sorted({end_owner[2 * a + b] for a in arc_names for b in (0, 1)}):
            marks = tuple(sorted(2 * arc_names[m // 2] + (m & 1) for m, _ in end.circles[ei]))
            ys.append((marks, c.y >> ei & 1))
        parts.append(("active", code, xs, tuple(sorted(ys))))
    return tuple(sorted(parts))


def _bfs_code(cfg: Config, c0: int, k0: int):
    ends = cfg.ends
    names: Dict[int, int] = {}
    visit: List[int] = []
    queue = [(c0, k0)]
    queued = {c0}
    code = []
    while queue:
        ci, k = queue.pop(0)
        visit.append(ci)
        circ = cfg.circles[ci]
        n = len(circ)
        fwd = circ[k][1] == L
        word = []
        for t in range(n):
            m, s = circ[(k + t) % n] if fwd else circ[(k - t) % n]
            a = m // 2
            if a not in names:
                names[a] = len(names)
            word.append((names[a], m & 1, s if fwd else -s))
            oc, ok, _ = ends[m ^ 1]
            if oc not in queued:
                queued.add(oc)
                queue.append((oc, ok))
        code.append(tuple(word))
    return (tuple(code), tuple(visit), dict(names))


def equivalent(a: LabeledConfiguration, b: LabeledConfiguration) -> bool:
    return canonical_form(a) == canonical_form(b)


# ---------------------------------------------------------------------------
# Resolutions of diagrams

SMOOTH = (
    {0: 1, 1: 0, 2: 3, 3: 2},  # 0-resolution
    {1: 2, 2: 1, 3: 0, 0: 3},  # 1-resolution
)


@dataclass(frozen=True)
class Passage:
    crossing: int
    p_in: int
    p_out: int


@dataclass(frozen=True)
class Resolution:
    u: int
    circles: Tuple[Tuple[Passage, ...], ...]
    edges: Tuple[frozenset, ...]
    slot_circle: Dict[Tuple[int, int], int]
    basepoint_circle: Optional[int] = None

    def __len__(self) -> int:
        return len(self.circles)

    def circle_of_edge(self, e: int) -> int:
        for ci, es in enumerate(self.edges):
            if e in es:
                return ci
        raise KeyError(e)


def resolve(d: "LinkDiagram", u: int) -> Resolution:
    """Complete resolution at crossing bitmask ``u``; free loops come last."""
    X = d.crossings
    slot_circle: Dict[Tuple[int, int], int] = {}
    circles: List[Tuple[Passage, ...]] = []
    edges: List[frozenset] = []
    for c in range(d.n):
        for p in range(4):
            if (c, p) in slot_circle:
                continue
            ci = len(circles)
            start = (c, p)
            s = start
            walk = []
            es = set()
            while True:
                slot_circle[s] = ci
                e = X[s[0]][s[1]]
                es.add(e)
                arr = d.other_slot(e, s)
                slot_circle[arr] = ci
                q = SMOOTH[u >> arr[0] & 1][arr[1]]
                walk.append(Passage(arr[0], arr[1], q))
                s = (arr[0], q)
                if s == start:
                    break
            circles.append(tuple(walk))
            edges.append(frozenset(es))
    for e in d.loops:
        circles.append(())
        edges.append(frozenset([e]))
    bp = None
    if d.basepoint is not None:
        bp = next(ci for ci, es in enumerate(edges) if d.basepoint in es)
    return Resolution(u, tuple(circles), tuple(edges), slot_circle, bp)


@dataclass(frozen=True)
class CubeConfiguration:
    """The configuration D_u^v with its circles identified inside the diagram."""

    u: int
    v: int
    arcs: Tuple[int, ...]  # crossing carrying arc j
    config: Config  # arcs oriented by the diagram's decorations
    start: Resolution
    end: Resolution
    end_map: Tuple[int, ...]  # ending circle of config -> circle of resolve(v)

    def labeled(self, x: int, y: int) -> LabeledConfiguration:
        """Labels given as bitmasks over resolve(u) and resolve(v) circles."""
        yy = 0
        for i, ei in enumerate(self.end_map):
            if y >> ei & 1:
                yy |= 1 << i
        return LabeledConfiguration(self.config, x, yy)


def configuration(d: "LinkDiagram", u: int, v: int, oriented: bool = True,
                  start: Optional[Resolution] = None, end: Optional[Resolution] = None) -> CubeConfiguration:
    """Starting circles resolve(d, u) and one arc per crossing of v minus u.

    With ``oriented=False`` every arc gets the bit-0 orientation, running from
    the strand through positions 0, 1 to the strand through positions 2, 3.
    """
    if u & ~v:
        raise ValueError("u must be a subset of v")
    start = start or resolve(d, u)
    end = end or resolve(d, v)
    arcs = tuple(c for c in range(d.n) if (v & ~u) >> c & 1)
    arc_of = {c: j for j, c in enumerate(arcs)}
    flips = [d.decorations[c] if oriented else 0 for c in arcs]
    circles = []
    for walk in start.circles:
        marks = []
        for ps in walk:
            j = arc_of.get(ps.crossing)
            if j is None:
                continue
            head = 0 if {ps.p_in, ps.p_out} == {0, 1} else 1
            side = L if ps.p_out == (ps.p_in + 1) % 4 else R
            marks.append((2 * j + (head ^ flips[j]), side))
        circles.append(tuple(marks))
    cfg = Config(tuple(circles), len(arcs))
    ending, pmap = cfg.surgery
    end_map = [-1] * len(ending.circles)
    for ei, circ in enumerate(ending.circles):
        if not circ:
            continue
        m = circ[0][0]
        j = m // 2
        is_head = (m & 1) ^ flips[j]
        end_map[ei] = end.slot_circle[(arcs[j], 3 if is_head else 1)]
    for ci, ei in enumerate(pmap):
        if ei < 0:
            continue
        walk = start.circles[ci]
        if walk:
            end_map[ei] = end.slot_circle[(walk[0].crossing, walk[0].p_in)]
        else:
            (e,) = start.edges[ci]
            end_map[ei] = end.circle_of_edge(e)
    return CubeConfiguration(u, v, arcs, cfg, start, end, tuple(end_map))
