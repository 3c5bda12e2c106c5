"""Coefficient rings, sparse matrices and linear algebra over F2 and F2[t].

Ring elements are sparse polynomials in H and W with F2 coefficients, so an
element is just the set of exponent pairs ``(h, w)`` that occur.  The
Laurent ring allows negative H-exponents.

Homology over F2 uses Python integers as packed bit vectors.  Homology over
the principal ideal domains F2[H] and F2[W] is computed by the persistence
column reduction, which is the graded Smith normal form for complexes whose
entries are monomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

F2 = "F2"
F2H = "F2[H]"
F2W = "F2[W]"
F2HW = "F2[H,W]"
LAURENT = "F2[H,H^-1,W]"
RINGS = (F2, F2H, F2W, F2HW, LAURENT)

_HAS_H = {F2: False, F2H: True, F2W: False, F2HW: True, LAURENT: True}
_HAS_W = {F2: False, F2H: False, F2W: True, F2HW: True, LAURENT: True}


class RingElement:
    """A polynomial over F2 in H and W; ``terms`` holds the exponent pairs."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: str, terms: Iterable[Tuple[int, int]] = ()):
        if ring not in RINGS:
            raise ValueError(f"unknown ring {ring!r}")
        terms = frozenset(terms)
        for h, w in terms:
            if (h and not _HAS_H[ring]) or (w and not _HAS_W[ring]):
                raise ValueError(f"term H^{h}W^{w} not in {ring}")
            if w < 0 or (h < 0 and ring != LAURENT):
                raise ValueError(f"negative exponent in {ring}")
        self.ring = ring
        self.terms = terms

    @classmethod
    def zero(cls, ring: str) -> "RingElement":
        return cls(ring)

    @classmethod
    def one(cls, ring: str) -> "RingElement":
        return cls(ring, [(0, 0)])

    @classmethod
    def monomial(cls, ring: str, h: int = 0, w: int = 0) -> "RingElement":
        return cls(ring, [(h, w)])

    def _check(self, other: "RingElement") -> None:
        if other.ring != self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        return RingElement(self.ring, self.terms ^ other.terms)

    __sub__ = __add__

    def __mul__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        acc: set = set()
        for h1, w1 in self.terms:
            for h2, w2 in other.terms:
                acc ^= {(h1 + h2, w1 + w2)}
        return RingElement(self.ring, acc)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, RingElement)
            and other.ring == self.ring
            and other.terms == self.terms
        )

    def __hash__(self) -> int:
        return hash((self.ring, self.terms))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_unit(self) -> bool:
        if len(self.terms) != 1:
            return False
        (h, w), = self.terms
        if self.ring == LAURENT:
            return w == 0
        return h == 0 and w == 0

    def inverse(self) -> "RingElement":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self} is not a unit in {self.ring}")
        (h, _), = self.terms
        return RingElement(self.ring, [(-h, 0)])

    def exponents(self) -> Tuple[int, int]:
        """Exponents of a monomial."""
        if len(self.terms) != 1:
            raise ValueError("not a monomial")
        return next(iter(self.terms))

    def specialize(self, h_mode: str, w_mode: str, ring: str) -> "RingElement":
        """Substitute H and W; modes are '0', '1', 'keep' or 'invert'."""
        acc: set = set()
        for h, w in self.terms:
            if (h_mode == "0" and h) or (w_mode == "0" and w):
                continue
            acc ^= {(0 if h_mode in ("0", "1") else h, 0 if w_mode in ("0", "1") else w)}
        return RingElement(ring, acc)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for h, w in sorted(self.terms):
            s = ""
            if h:
                s += "H" if h == 1 else f"H^{h}"
            if w:
                s += "W" if w == 1 else f"W^{w}"
            parts.append(s or "1")
        return " + ".join(parts)


def specialized_ring(h_mode: str, w_mode: str) -> str:
    """Coefficient ring obtained from F2[H,W] by the given substitution."""
    if h_mode not in ("0", "1", "keep", "invert") or w_mode not in ("0", "1", "keep"):
        raise ValueError(f"invalid specialization H->{h_mode}, W->{w_mode}")
    if h_mode == "invert":
        if w_mode != "keep":
            raise ValueError("H may only be inverted while W is kept")
        return LAURENT
    hk, wk = h_mode == "keep", w_mode == "keep"
    return {(False, False): F2, (True, False): F2H, (False, True): F2W, (True, True): F2HW}[(hk, wk)]


class SparseMatrix:
    """Square-or-not sparse matrix stored by columns: ``cols[j][i]`` is entry (i, j)."""

    def __init__(self, n_rows: int, n_cols: int, ring: str):
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.ring = ring
        self.cols: Dict[int, Dict[int, RingElement]] = {}

    def __getitem__(self, key: Tuple[int, int]) -> RingElement:
        i, j = key
        return self.cols.get(j, {}).get(i, RingElement.zero(self.ring))

    def __setitem__(self, key: Tuple[int, int], value: RingElement) -> None:
        i, j = key
        if not (0 <= i < self.n_rows and 0 <= j < self.n_cols):
            raise IndexError(key)
        col = self.cols.setdefault(j, {})
        if value:
            col[i] = value
        else:
            col.pop(i, None)
            if not col:
                del self.cols[j]

    def add_to(self, i: int, j: int, value: RingElement) -> None:
        self[i, j] = self[i, j] + value

    def entries(self) -> Iterator[Tuple[int, int, RingElement]]:
        for j in sorted(self.cols):
            col = self.cols[j]
            for i in sorted(col):
                yield i, j, col[i]

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols.values())

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.n_cols != other.n_rows or self.ring != other.ring:
            raise ValueError("shape or ring mismatch")
        out = SparseMatrix(self.n_rows, other.n_cols, self.ring)
        for j, col in other.cols.items():
            acc: Dict[int, RingElement] = {}
            for k, v in col.items():
                for i, w in self.cols.get(k, {}).items():
                    prod = w * v
                    acc[i] = acc[i] + prod if i in acc else prod
            for i, v in acc.items():
                if v:
                    out[i, j] = v
        return out

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        out = self.copy()
        for i, j, v in other.entries():
            out.add_to(i, j, v)
        return out

    def copy(self) -> "SparseMatrix":
        out = SparseMatrix(self.n_rows, self.n_cols, self.ring)
        out.cols = {j: dict(c) for j, c in self.cols.items()}
        return out

    def is_zero(self) -> bool:
        return not any(self.cols.values())

    def column_bits(self) -> List[int]:
        """Support of each column as an int bitset over row indices."""
        bits = [0] * self.n_cols
        for j, col in self.cols.items():
            b = 0
            for i in col:
                b |= 1 << i
            bits[j] = b
        return bits


@dataclass(frozen=True)
class Generator:
    """A Khovanov generator (u, x): crossing bitmask u and circle bitmask x."""

    u: int
    x: int
    gr_h: int
    gr_q: int

    @property
    def gr_delta(self) -> float:
        return self.gr_h - self.gr_q / 2


@dataclass
class BigradedComplex:
    """Free complex over ``ring`` on ``gens``; ``diff`` has columns indexed by sources.

    ``gradings`` records which gradings the differential preserves: "hq"
    for both, "h" for the homological grading only and "" for none.
    ``spec`` records the substitution (H mode, W mode) applied to C_tot.
    """

    ring: str
    gens: List[Generator]
    diff: SparseMatrix
    gradings: str = "hq"
    spec: Tuple[str, str] = ("keep", "keep")
    q_shift: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.gens)

    def targets(self, j: int) -> Dict[int, RingElement]:
        return self.diff.cols.get(j, {})

    def d_squared(self) -> SparseMatrix:
        return self.diff @ self.diff


# ---------------------------------------------------------------------------
# F2 linear algebra on packed bit vectors


def _reduce(vec: int, basis: Dict[int, int]) -> int:
    while vec:
        top = vec.bit_length() - 1
        piv = basis.get(top)
        if piv is None:
            return vec
        vec ^= piv
    return 0


def rank_f2(vectors: Iterable[int]) -> int:
    """Rank over F2 of a family of bitset vectors."""
    basis: Dict[int, int] = {}
    for v in vectors:
        v = _reduce(v, basis)
        if v:
            basis[v.bit_length() - 1] = v
    return len(basis)


def solve_f2(A, b) -> Optional[List[int]]:
    """Return column indices j with sum of A[:, j] equal to b, or None.

    ``A`` is a SparseMatrix over F2 or a sequence of column bitsets; ``b`` is
    an int bitset or an iterable of row indices.
    """
    cols = A.column_bits() if isinstance(A, SparseMatrix) else list(A)
    if not isinstance(b, int):
        bb = 0
        for i in b:
            bb ^= 1 << i
        b = bb
    basis: Dict[int, Tuple[int, int]] = {}
    for j, v in enumerate(cols):
        combo = 1 << j
        while v:
            top = v.bit_length() - 1
            hit = basis.get(top)
            if hit is None:
                basis[top] = (v, combo)
                break
            v ^= hit[0]
            combo ^= hit[1]
    combo = 0
    while b:
        top = b.bit_length() - 1
        hit = basis.get(top)
        if hit is None:
            return None
        b ^= hit[0]
        combo ^= hit[1]
    return [j for j in range(combo.bit_length()) if combo >> j & 1]


def _grading_key(g: Generator, gradings: str) -> tuple:
    if gradings == "hq":
        return (g.gr_h, g.gr_q)
    if gradings == "h":
        return (g.gr_h,)
    return ()


def homology_f2(C: BigradedComplex) -> Dict[tuple, int]:
    """Betti numbers over F2 keyed by the retained grading tuple."""
    if C.ring != F2:
        raise ValueError(f"homology_f2 needs an F2 complex, got {C.ring}")
    bits = C.diff.column_bits()
    groups: Dict[tuple, List[int]] = {}
    for j, g in enumerate(C.gens):
        groups.setdefault(_grading_key(g, C.gradings), []).append(j)
    rank_out = {key: rank_f2(bits[j] for j in js) for key, js in groups.items()}
    # rank of the incoming map into each grading group
    rank_in: Dict[tuple, int] = {key: 0 for key in groups}
    if C.gradings:
        for key, js in groups.items():
            if rank_out[key] == 0:
                continue
            tgt = None
            for j in js:
                for i in C.diff.cols.get(j, {}):
                    tgt = _grading_key(C.gens[i], C.gradings)
                    break
                if tgt is not None:
                    break
            rank_in[tgt] += rank_out[key]
    else:
        rank_in[()] = rank_out.get((), 0)
    out = {}
    for key, js in sorted(groups.items()):
        r = len(js) - rank_out[key] - rank_in[key]
        if r:
            out[key] = r
    return out


def total_rank(table: Dict[tuple, int]) -> int:
    return sum(table.values())


# ---------------------------------------------------------------------------
# Homology over F2[t] via persistence


def _levels(C: BigradedComplex) -> Tuple[List[int], int]:
    """Level function lam and offset c with entry exponent lam(b)-lam(a)-c."""
    h_mode, w_mode = C.spec
    if C.ring == F2W:
        return [g.gr_h for g in C.gens], 1
    if C.ring == F2H and w_mode == "0":
        return [g.gr_q // 2 for g in C.gens], 0
    raise ValueError(f"no PID grading available for ring {C.ring} with spec {C.spec}")


@dataclass(frozen=True)
class PIDSummand:
    grading: tuple
    exponent: Optional[int]  # None for a free summand


def homology_pid(C: BigradedComplex) -> Dict[tuple, Tuple[int, List[int]]]:
    """Decompose H(C) over F2[t]; returns grading -> (free rank, torsion exponents)."""
    lam, c = _levels(C)
    var = 0 if C.ring == F2H else 1
    n = len(C.gens)
    order = sorted(range(n), key=lambda j: (-lam[j], -C.gens[j].gr_h, j))
    pos = [0] * n
    for p, j in enumerate(order):
        pos[j] = p
    cols: List[int] = [0] * n
    for j, col in C.diff.cols.items():
        v = 0
        for i, e in col.items():
            ex = e.exponents()[var]
            if ex != lam[i] - lam[j] - c:
                raise ValueError("entry exponent does not match the level function")
            if pos[i] >= pos[j]:
                raise ValueError("differential not compatible with the level order")
            v |= 1 << pos[i]
        cols[pos[j]] = v
    pivots: Dict[int, int] = {}
    paired = set()
    for p in range(n):
        v = cols[p]
        while v:
            low = v.bit_length() - 1
            q = pivots.get(low)
            if q is None:
                break
            v ^= cols[q]
        cols[p] = v
        if v:
            low = v.bit_length() - 1
            pivots[low] = p
            paired.add(low)
            paired.add(p)
    out: Dict[tuple, Tuple[int, List[int]]] = {}

    def bump(key: tuple, free: int, tors: Optional[int]) -> None:
        f, t = out.get(key, (0, []))
        if tors is not None:
            t = t + [tors]
        out[key] = (f + free, t)

    for low, p in pivots.items():
        b, a = order[low], order[p]
        e = lam[b] - lam[a] - c
        if e < 0:
            raise ValueError("negative torsion exponent; levels inconsistent")
        if e > 0:
            bump(_grading_key(C.gens[b], C.gradings), 0, e)
    for p in range(n):
        if p not in paired:
            bump(_grading_key(C.gens[order[p]], C.gradings), 1, None)
    return {k: (f, sorted(t)) for k, (f, t) in sorted(out.items())}


def pid_totals(table: Dict[tuple, Tuple[int, List[int]]]) -> Tuple[int, List[int]]:
    free = sum(f for f, _ in table.values())
    tors = sorted(e for _, t in table.values() for e in t)
    return free, tors


# ---------------------------------------------------------------------------
# Gaussian cancellation


def gauss_reduce(C: BigradedComplex) -> BigradedComplex:
    """Cancel unit entries with the zigzag update until none remain.

    Each cancellation of a unit entry a -> b removes a and b and adds
    (in-arrows of b) * unit^-1 * (out-arrows of a) to the differential.
    Pivots are taken in order of the fill-in cost (row population minus one)
    times (column population minus one), ties broken by index.
    """
    ring = C.ring
    out: Dict[int, Dict[int, RingElement]] = {j: dict(col) for j, col in C.diff.cols.items()}
    inn: Dict[int, set] = {}
    for j, col in out.items():
        for i in col:
            inn.setdefault(i, set()).add(j)
    alive = set(range(len(C.gens)))
    while True:
        cands = []
        for a in sorted(out):
            for b, e in out[a].items():
                if e.is_unit():
                    cost = (len(out[a]) - 1) * (len(inn.get(b, ())) - 1)
                    cands.append((cost, a, b))
        if not cands:
            break
        cands.sort()
        touched: set = set()
        for _, a, b in cands:
            if a in touched or b in touched or a not in alive or b not in alive:
                continue
            e = out.get(a, {}).get(b)
            if e is None or not e.is_unit():
                continue
            inv = e.inverse()
            srcs = [s for s in inn.get(b, ()) if s != a]
            tgts = [(t, v) for t, v in out[a].items() if t != b]
            for s in srcs:
                coef = out[s][b] * inv
                row = out[s]
                for t, v in tgts:
                    new = row.get(t, RingElement.zero(ring)) + coef * v
                    if new:
                        if t not in row:
                            inn.setdefault(t, set()).add(s)
                        row[t] = new
                    elif t in row:
                        del row[t]
                        inn[t].discard(s)
            for g in (a, b):
                for t in out.pop(g, {}):
                    inn[t].discard(g)
                for s in inn.pop(g, set()):
                    if s in out:
                        out[s].pop(g, None)
                alive.discard(g)
            touched.update(srcs)
            touched.update(t for t, _ in tgts)
            touched.update((a, b))
    keep = sorted(alive)
    index = {g: k for k, g in enumerate(keep)}
    diff = SparseMatrix(len(keep), len(keep), ring)
    for a in keep:
        for b, e in out.get(a, {}).items():
            if e:
                diff[index[b], index[a]] = e
    return BigradedComplex(
        ring=ring,
        gens=[C.gens[g] for g in keep],
        diff=diff,
        gradings=C.gradings,
        spec=C.spec,
        q_shift=C.q_shift,
        meta=dict(C.meta, reduced_from=len(C.gens)),
    )


def homology_localized(C: BigradedComplex) -> Dict[tuple, Tuple[int, List[int]]]:
    """Homology over F2[H,H^-1,W] when unit cancellation leaves a zero differential.

    Every surviving generator is then a free summand.  A residual non-unit
    entry would need a genuine two-variable module computation, which is
    not attempted; that case raises.
    """
    if C.ring != LAURENT:
        raise ValueError("localized homology needs a complex over F2[H,H^-1,W]")
    R = gauss_reduce(C)
    if not R.diff.is_zero():
        raise ValueError("reduced localized complex still has non-unit entries")
    out: Dict[tuple, Tuple[int, List[int]]] = {}
    for g in R.gens:
        key = _grading_key(g, R.gradings)
        out[key] = (out.get(key, (0, []))[0] + 1, [])
    return dict(sorted(out.items()))


def complex_to_json(C: BigradedComplex) -> dict:
    """Plain-data export of a complex (schema 1)."""
    return {
        "schema": 1,
        "ring": C.ring,
        "gradings": C.gradings,
        "q_shift": C.q_shift,
        "generators": [
            {"id": k, "u": g.u, "x": g.x, "gr_h": g.gr_h, "gr_q": g.gr_q}
            for k, g in enumerate(C.gens)
        ],
        "entries": [
            {"src": j, "tgt": i, "terms": sorted([list(t) for t in e.terms])}
            for i, j, e in C.diff.entries()
        ],
    }


def complex_from_json(data: dict) -> BigradedComplex:
    ring = data["ring"]
    gens = [Generator(g["u"], g["x"], g["gr_h"], g["gr_q"]) for g in data["generators"]]
    diff = SparseMatrix(len(gens), len(gens), ring)
    for e in data["entries"]:
        diff[e["tgt"], e["src"]] = RingElement(ring, [tuple(t) for t in e["terms"]])
    return BigradedComplex(ring, gens, diff, gradings=data.get("gradings", "hq"),
                           q_shift=data.get("q_shift", 0))


def f2_complex(gens: Sequence[Generator], arrows: Iterable[Tuple[int, int]], gradings: str = "hq") -> BigradedComplex:
    """Convenience constructor for an F2 complex from (source, target) pairs."""
    diff = SparseMatrix(len(gens), len(gens), F2)
    one = RingElement.one(F2)
    for a, b in arrows:
        diff.add_to(b, a, one)
    return BigradedComplex(F2, list(gens), diff, gradings=gradings, spec=("0", "0"))
