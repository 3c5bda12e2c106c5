"""The trefoil differential from the worked example, and a matcher.

Generators are written ``(vertex, labels)`` where ``vertex`` is a string
such as ``"101"`` and ``labels`` the circle numbers in the monomial.
Coefficients are sets of ``(h, w)`` exponent pairs.
"""

from itertools import permutations, product

ONE = {(0, 0)}


def _g(vertex, *labels):
    return (vertex, frozenset(labels))


def _table():
    t = {}

    def put(src, *terms):
        row = t.setdefault(src, {})
        for coef, tgt in terms:
            row[tgt] = row.get(tgt, set()) ^ coef

    singles = ("100", "010", "001")
    doubles = {"100": "011", "010": "101", "001": "110"}
    put(_g("000"), *[(ONE, _g(v)) for v in singles],
        *[({(0, 1)}, _g(v)) for v in ("110", "101", "011")], ({(0, 2)}, _g("111")))
    put(_g("000", 1, 2), *[({(1, 0)}, _g(v, 1)) for v in singles])
    for c in (1, 2):
        put(_g("000", c), *[(ONE, _g(v, 1)) for v in singles])
    for v in singles:
        others = [w for w in ("110", "101", "011") if w != doubles[v]]
        put(_g(v), *[(ONE, _g(w, i)) for w in others for i in (1, 2)],
            *[({(1, 0)}, _g(w)) for w in others], ({(1, 1)}, _g("111")))
        put(_g(v, 1), *[(ONE, _g(w, 1, 2)) for w in others])
    # index one out of the 2-circle vertices
    missing = {"110": 2, "101": 1, "011": 3}
    for v, m in missing.items():
        put(_g(v), *[(ONE, _g("111", i)) for i in (1, 2, 3) if i != m], ({(1, 0)}, _g("111")))
    for v, pair in {"110": (1, 3), "101": (2, 3), "011": (1, 2)}.items():
        put(_g(v, 1 if v != "101" else 2), (ONE, _g("111", *pair)))
    u = {(1, 2), (1, 3), (2, 3)}
    for v, (c, own, hx) in {"110": (2, (1, 3), 2), "101": (1, (2, 3), 1), "011": (2, (1, 2), 3)}.items():
        put(_g(v, c), *[(ONE, _g("111", *p)) for p in sorted(u - {own})], ({(1, 0)}, _g("111", hx)))
    for v in ("110", "101", "011"):
        put(_g(v, 1, 2), (ONE, _g("111", 1, 2, 3)))
    return {s: {k: c for k, c in row.items() if c} for s, row in t.items()}


TABLE = _table()

CIRCLES = {"000": 2, "100": 1, "010": 1, "001": 1, "110": 2, "101": 2, "011": 2, "111": 3}


def all_generators():
    out = []
    for v, m in CIRCLES.items():
        for r in range(m + 1):
            for combo in _subsets(range(1, m + 1), r):
                out.append(_g(v, *combo))
    return out


def _subsets(items, r):
    from itertools import combinations
    return combinations(items, r)


def complex_table(C, perm, labelings):
    """Translate a built complex into table form.

    ``perm[i]`` is the crossing of ``C`` playing the role of c_{i+1};
    ``labelings[vertex][k]`` is the circle index used for label ``k+1``.
    """
    n = len(perm)

    def vertex(u):
        return "".join("1" if u >> perm[i] & 1 else "0" for i in range(n))

    def labels(v, x):
        lab = labelings[v]
        return frozenset(k + 1 for k, ci in enumerate(lab) if x >> ci & 1)

    out = {}
    for i, j, e in C.diff.entries():
        s, t = C.gens[j], C.gens[i]
        vs, vt = vertex(s.u), vertex(t.u)
        out.setdefault((vs, labels(vs, s.x)), {})[(vt, labels(vt, t.x))] = set(e.terms)
    return out


def match(C):
    """Crossing order and circle numbering reproducing TABLE, or None."""
    for perm in permutations(range(3)):
        opts = {v: list(permutations(range(m))) for v, m in CIRCLES.items()}
        keys = list(opts)
        for choice in product(*(opts[k] for k in keys)):
            lab = dict(zip(keys, choice))
            if complex_table(C, perm, lab) == TABLE:
                return perm, lab
    return None
