"""The chain complex C_tot over F2[H,W] and its specializations.

Building a complex happens in two steps.  :func:`compile_cube` walks all
pairs ``u <= v`` of crossing subsets once, classifies the configurations
D_u^v and records every potential matrix entry together with the arc
orientations it needs.  Assembling the differential for a particular
decoration is then a vectorized filter over that table, which keeps
decoration sweeps cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from . import contrib
from .algebra import (
    F2,
    F2HW,
    BigradedComplex,
    Generator,
    RingElement,
    SparseMatrix,
    specialized_ring,
)
from .diagram import DiagramError, LinkDiagram, from_pd
from .planar import (
    LabeledConfiguration,
    Resolution,
    configuration,
    decompose,
    resolve,
)

KIND_D, KIND_H = 0, 1


def popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass
class CubeData:
    """Decoration-free description of C_tot for one diagram."""

    n: int
    n_plus: int
    n_minus: int
    resolutions: List[Resolution]
    gens: List[Generator]
    index: Dict[Tuple[int, int], int]
    src: np.ndarray
    tgt: np.ndarray
    kind: np.ndarray
    power: np.ndarray  # W exponent, |v - u| - 1
    mask: np.ndarray
    val: np.ndarray
    meta: dict = field(default_factory=dict)

    def accepted(self, decoration: int) -> np.ndarray:
        f = decoration & self.mask
        return (f == self.val) | (f == (self.val ^ self.mask))

    def f2_parts(self, decoration: int) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
        """The endomorphisms d and h as F2 matrices (rows are targets)."""
        ok = self.accepted(decoration)
        n = len(self.gens)
        out = []
        for k in (KIND_D, KIND_H):
            sel = ok & (self.kind == k)
            m = sp.csr_matrix(
                (np.ones(int(sel.sum()), dtype=np.int64), (self.tgt[sel], self.src[sel])), shape=(n, n)
            )
            m.data %= 2
            m.eliminate_zeros()
            out.append(m)
        return out[0], out[1]


def _generators(d: LinkDiagram, res: List[Resolution]):
    order = sorted(range(1 << d.n), key=lambda u: (popcount(u), u))
    gens, index = [], {}
    for u in order:
        m = len(res[u])
        for x in range(1 << m):
            index[u, x] = len(gens)
            gens.append(Generator(u, x, -d.n_minus + popcount(u),
                                  d.n_plus - 2 * d.n_minus + popcount(u) + m - 2 * popcount(x)))
    return gens, index


def _cube_key(d: LinkDiagram):
    return (d.crossings, d.signs, d.loops, d.basepoint)


_CUBE_CACHE: Dict[tuple, CubeData] = {}


def compile_cube(d: LinkDiagram, beta: Optional[int] = None, ear: Optional[int] = None) -> CubeData:
    key = _cube_key(d) + (beta, ear, contrib.LINK_BIT, contrib.EAR_TAIL)
    hit = _CUBE_CACHE.get(key)
    if hit is not None:
        return hit
    n = d.n
    res = [resolve(d, u) for u in range(1 << n)]
    gens, index = _generators(d, res)
    rows: List[Tuple[int, int, int, int, int, int]] = []
    for u in range(1 << n):
        free = ((1 << n) - 1) & ~u
        s = free
        while s:
            v = u | s
            _pair_entries(d, u, v, res, index, rows, beta, ear)
            s = (s - 1) & free
    arr = np.array(rows, dtype=np.int64).reshape(-1, 6)
    cube = CubeData(
        n, d.n_plus, d.n_minus, res, gens, index,
        arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4], arr[:, 5],
        meta={"basepoint_circles": [r.basepoint_circle for r in res]},
    )
    if len(_CUBE_CACHE) > 64:
        _CUBE_CACHE.clear()
    _CUBE_CACHE[key] = cube
    return cube


def _pair_entries(d, u, v, res, index, rows, beta, ear) -> None:
    cc = configuration(d, u, v, oriented=False, start=res[u], end=res[v])
    cfg = cc.config
    dec = decompose(LabeledConfiguration(cfg))
    i = popcount(v & ~u)
    comps = []
    for lc, starts, ends in zip(dec.active, dec.active_start, dec.active_end):
        arcs = sorted({m // 2 for ci in starts for m, _ in cfg.circles[ci]})
        comps.append((classify_cached(lc.config, beta, ear), starts, ends, arcs))
    options = []  # (kind, x over u-circles, y over ending circles, mask, val) in crossings
    if len(comps) == 1:
        opts, starts, ends, arcs = comps[0]
        want = "k" if i == 1 else "d"
        for o in opts:
            if o.kind == want:
                options.append((KIND_D,) + _lift(o, starts, ends, arcs, cc.arcs))
    forest_x = forest_y = 0
    forest = bool(comps)
    for opts, starts, ends, arcs in comps:
        h = [o for o in opts if o.kind == "h"]
        if not h:
            forest = False
            break
        x, y, _, _ = _lift(h[0], starts, ends, arcs, cc.arcs)
        forest_x |= x
        forest_y |= y
    if forest:
        options.append((KIND_H, forest_x, forest_y, 0, 0))
    if not options:
        return
    passive = dec.passive
    end_map = cc.end_map
    for p in range(1 << len(passive)):
        px = py = 0
        for t, (sc, ec) in enumerate(passive):
            if p >> t & 1:
                px |= 1 << sc
                py |= 1 << ec
        for kind, x, y, mask, val in options:
            yy = 0
            yall = y | py
            e = 0
            while yall:
                if yall & 1:
                    yy |= 1 << end_map[e]
                yall >>= 1
                e += 1
            rows.append((index[u, x | px], index[v, yy], kind, i - 1, mask, val))


def _lift(o, starts, ends, arcs, crossings):
    x = 0
    for k, ci in enumerate(starts):
        if o.x >> k & 1:
            x |= 1 << ci
    y = 0
    for k, ei in enumerate(ends):
        if o.y >> k & 1:
            y |= 1 << ei
    mask = val = 0
    for k, a in enumerate(arcs):
        c = crossings[a]
        if o.mask >> k & 1:
            mask |= 1 << c
        if o.val >> k & 1:
            val |= 1 << c
    return x, y, mask, val


def classify_cached(cfg, beta, ear):
    return contrib.classify(cfg, beta, ear)


def decoration_mask(d: LinkDiagram) -> int:
    out = 0
    for c, b in enumerate(d.decorations):
        out |= b << c
    return out


def h_block(d: LinkDiagram, s: int) -> sp.csr_matrix:
    """F2 matrix of the part of h that adds exactly the crossings in ``s``."""
    cube = compile_cube(d)
    us = np.array([g.u for g in cube.gens], dtype=np.int64)
    sel = cube.accepted(decoration_mask(d)) & (cube.kind == KIND_H) & ((us[cube.tgt] ^ us[cube.src]) == s)
    n = len(cube.gens)
    m = sp.csr_matrix((np.ones(int(sel.sum()), dtype=np.int64), (cube.tgt[sel], cube.src[sel])), shape=(n, n))
    m.data %= 2
    m.eliminate_zeros()
    return m


# ---------------------------------------------------------------------------
# Complexes


def build_total(d: LinkDiagram, beta: Optional[int] = None, ear: Optional[int] = None) -> BigradedComplex:
    """C_tot over F2[H,W] for the decorated diagram ``d``."""
    cube = compile_cube(d, beta, ear)
    ok = cube.accepted(decoration_mask(d))
    diff = SparseMatrix(len(cube.gens), len(cube.gens), F2HW)
    terms: Dict[Tuple[int, int], set] = {}
    for s, t, k, w in zip(cube.src[ok], cube.tgt[ok], cube.kind[ok], cube.power[ok]):
        terms.setdefault((int(t), int(s)), set()).symmetric_difference_update({(int(k), int(w))})
    for (t, s), tm in terms.items():
        if tm:
            diff[t, s] = RingElement(F2HW, tm)
    return BigradedComplex(
        F2HW, list(cube.gens), diff, gradings="hq", spec=("keep", "keep"),
        meta={"basepoint_circles": cube.meta["basepoint_circles"], "n": d.n,
              "decorations": list(d.decorations)},
    )


def verify_d_squared(C) -> List[Tuple[int, int]]:
    """Nonzero cells (source, target) of the square of the differential."""
    if isinstance(C, tuple):  # (d, h) pair of F2 matrices
        return _f2_square_cells(*C)
    sq = C.d_squared()
    return sorted((j, i) for i, j, _ in sq.entries())


def _f2_square_cells(dm: sp.csr_matrix, hm: sp.csr_matrix) -> List[Tuple[int, int]]:
    bad = set()
    for prod in (dm @ dm, dm @ hm + hm @ dm, hm @ hm):
        prod = prod.tocoo()
        for i, j, v in zip(prod.row, prod.col, prod.data):
            if v % 2:
                bad.add((int(j), int(i)))
    return sorted(bad)


def d_squared_ok(d: LinkDiagram, decoration: Optional[int] = None, beta=None, ear=None) -> bool:
    """Fast check that d^2, dh + hd and h^2 vanish; equivalent to delta_tot^2 = 0."""
    cube = compile_cube(d, beta, ear)
    dec = decoration_mask(d) if decoration is None else decoration
    return not _f2_square_cells(*cube.f2_parts(dec))


_GRADINGS = {
    ("keep", "keep"): "hq", ("invert", "keep"): "hq",
    ("0", "0"): "hq", ("0", "keep"): "hq", ("keep", "0"): "hq",
    ("1", "0"): "h", ("1", "keep"): "h",
    ("0", "1"): "", ("1", "1"): "", ("keep", "1"): "",
}


def specialize(C: BigradedComplex, h: str, w: str) -> BigradedComplex:
    """Substitute H -> {0, 1, keep, invert} and W -> {0, 1, keep} in C_tot."""
    ring = specialized_ring(h, w)
    if C.spec != ("keep", "keep"):
        raise ValueError("specialize expects the full complex over F2[H,W]")
    diff = SparseMatrix(C.diff.n_rows, C.diff.n_cols, ring)
    for i, j, e in C.diff.entries():
        v = e.specialize(h, w, ring)
        if v:
            diff[i, j] = v
    return BigradedComplex(ring, list(C.gens), diff, gradings=_GRADINGS[(h, w)], spec=(h, w),
                           q_shift=C.q_shift, meta=dict(C.meta))


THEORIES = {
    "kh": ("0", "0"),
    "bn": ("keep", "0"),
    "sz": ("0", "keep"),
    "tot-fH": ("1", "keep"),
    "ftot": ("1", "1"),
    "loc": ("invert", "keep"),
    "fbn": ("1", "0"),
    "fsz": ("0", "1"),
}


def theory_complex(d: LinkDiagram, theory: str) -> BigradedComplex:
    if theory not in THEORIES:
        raise ValueError(f"unknown theory {theory!r}")
    return specialize(build_total(d), *THEORIES[theory])


def subcomplex(C: BigradedComplex, keep: Sequence[int], q_shift: int = 0) -> BigradedComplex:
    """Restriction of C to the generators ``keep`` (their span must be closed or a quotient)."""
    idx = {g: k for k, g in enumerate(keep)}
    diff = SparseMatrix(len(keep), len(keep), C.ring)
    for i, j, e in C.diff.entries():
        if i in idx and j in idx:
            diff[idx[i], idx[j]] = e
    gens = [Generator(C.gens[g].u, C.gens[g].x, C.gens[g].gr_h, C.gens[g].gr_q + q_shift) for g in keep]
    return BigradedComplex(C.ring, gens, diff, C.gradings, C.spec, C.q_shift + q_shift, dict(C.meta))


def reduced_split(C: BigradedComplex, basepoint_circles: Optional[Sequence[Optional[int]]] = None):
    """(C^-, C^+): the span of monomials containing the basepoint circle, and the quotient.

    Quantum gradings are shifted by +1 on C^- and -1 on C^+, so that the
    unknot gives F2 in degree 0 on each side.
    """
    bpc = basepoint_circles if basepoint_circles is not None else C.meta.get("basepoint_circles")
    if bpc is None or any(b is None for b in bpc):
        raise ValueError("reduced complexes need a basepoint")
    minus = [k for k, g in enumerate(C.gens) if g.x >> bpc[g.u] & 1]
    plus = [k for k, g in enumerate(C.gens) if not g.x >> bpc[g.u] & 1]
    return subcomplex(C, minus, 1), subcomplex(C, plus, -1)


def is_subcomplex(C: BigradedComplex, keep: Sequence[int]) -> bool:
    ks = set(keep)
    return all(i in ks for i, j, _ in C.diff.entries() if j in ks)


# ---------------------------------------------------------------------------
# Cobordism maps


@dataclass
class ChainMap:
    source: BigradedComplex
    target: BigradedComplex
    matrix: SparseMatrix  # rows: target generators, columns: source generators
    q_shift: int

    def commutes(self) -> bool:
        lhs = self.target.diff @ self.matrix
        rhs = self.matrix @ self.source.diff
        return (lhs + rhs).is_zero()


def add_unknot(d: LinkDiagram) -> LinkDiagram:
    """The split union of ``d`` with a crossingless circle."""
    e = d.max_edge() + 1
    return LinkDiagram(d.crossings, d.signs, d.decorations, d.basepoint, d.loops + (e,))


def _loop_circle(res: Resolution, e: int) -> int:
    return res.circle_of_edge(e)


def cobordism_map(kind: str, d: LinkDiagram, site: Optional[int] = None) -> ChainMap:
    """Birth and death between ``d`` and ``d`` plus an unknot; saddle at crossing ``site``.

    Birth sends (u, x) to (u, x) with the new circle unflagged; death sends
    (u, x a) to (u, x) and kills generators without the new circle.  The
    saddle is the block of delta_tot of ``d`` from generators with the
    crossing 0-resolved to those with it 1-resolved.
    """
    if kind in ("birth", "death"):
        big = add_unknot(d)
        Cs, Cb = build_total(d), build_total(big)
        cs, cb = compile_cube(d), compile_cube(big)
        e = big.loops[-1]
        if kind == "birth":
            M = SparseMatrix(len(Cb.gens), len(Cs.gens), F2HW)
            for k, g in enumerate(Cs.gens):
                M[cb.index[g.u, _embed(cs, cb, d, big, g.u, g.x)], k] = RingElement.one(F2HW)
            return ChainMap(Cs, Cb, M, 1)
        M = SparseMatrix(len(Cs.gens), len(Cb.gens), F2HW)
        for k, g in enumerate(Cs.gens):
            a = _loop_circle(cb.resolutions[g.u], e)
            x = _embed(cs, cb, d, big, g.u, g.x) | 1 << a
            M[k, cb.index[g.u, x]] = RingElement.one(F2HW)
        return ChainMap(Cb, Cs, M, 1)
    if kind == "saddle":
        if site is None or not 0 <= site < d.n:
            raise DiagramError("saddle needs a crossing index of the parent diagram")
        C = build_total(d)
        src = [k for k, g in enumerate(C.gens) if not g.u >> site & 1]
        tgt = [k for k, g in enumerate(C.gens) if g.u >> site & 1]
        C0, C1 = subcomplex(C, src), subcomplex(C, tgt)
        ti = {g: k for k, g in enumerate(tgt)}
        si = {g: k for k, g in enumerate(src)}
        M = SparseMatrix(len(tgt), len(src), F2HW)
        for i, j, e in C.diff.entries():
            if j in si and i in ti:
                M[ti[i], si[j]] = e
        return ChainMap(C0, C1, M, -1)
    raise ValueError(f"unknown cobordism {kind!r}")


def _embed(cs: CubeData, cb: CubeData, d, big, u: int, x: int) -> int:
    """Translate a circle bitmask of d's resolution into the bigger diagram's."""
    rs, rb = cs.resolutions[u], cb.resolutions[u]
    out = 0
    for ci in range(len(rs)):
        if x >> ci & 1:
            e = next(iter(rs.edges[ci]))
            out |= 1 << rb.circle_of_edge(e)
    return out


def smooth_crossing(d: LinkDiagram, c: int, r: int) -> LinkDiagram:
    """Diagram obtained by replacing crossing ``c`` with its r-resolution.

    Edge ids of each joined pair collapse to the smaller one; orientations
    are re-derived, so components may be reversed.
    """
    X = [list(x) for x in d.crossings]
    a, b, cc, dd = X[c]
    pairs = ((a, b), (cc, dd)) if r == 0 else ((b, cc), (dd, a))
    rename: Dict[int, int] = {}

    def find(e):
        while e in rename:
            e = rename[e]
        return e

    loops = list(d.loops)
    for e, f in pairs:
        e, f = find(e), find(f)
        if e == f:
            loops.append(e)
        else:
            lo, hi = min(e, f), max(e, f)
            rename[hi] = lo
    rest = [[find(e) for e in x] for k, x in enumerate(X) if k != c]
    used = {e for x in rest for e in x}
    loops = [e for e in dict.fromkeys(find(e) for e in loops) if e not in used]
    dec = [b for k, b in enumerate(d.decorations) if k != c]
    bp = None if d.basepoint is None else find(d.basepoint)
    return from_pd(rest, decorations=dec, basepoint=bp, loops=loops)

