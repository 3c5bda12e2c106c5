"""Small bundled diagrams, built as braid closures."""

from __future__ import annotations

from typing import Dict, List, Sequence

from .diagram import LinkDiagram, from_pd, unknot


def braid_closure(word: Sequence[int], strands: int) -> LinkDiagram:
    """PD diagram of the closure of a braid word (``i`` is sigma_i, ``-i`` its inverse)."""
    next_id = 0

    def fresh() -> int:
        nonlocal next_id
        next_id += 1
        return next_id

    start = [fresh() for _ in range(strands)]
    pos = list(start)
    touched = set()
    pd: List[List[int]] = []
    for g in word:
        i = abs(g) - 1
        if not 0 <= i < strands - 1:
            raise ValueError(f"generator {g} out of range for {strands} strands")
        touched.update((i, i + 1))
        a_in, b_in = pos[i], pos[i + 1]
        a_out, b_out = fresh(), fresh()
        if g > 0:
            pd.append([b_in, a_out, b_out, a_in])
        else:
            pd.append([a_in, b_in, a_out, b_out])
        pos[i], pos[i + 1] = b_out, a_out
    rename = {pos[p]: start[p] for p in range(strands) if p in touched}
    pd = [[rename.get(e, e) for e in x] for x in pd]
    used = sorted({e for x in pd for e in x})
    compact = {e: k + 1 for k, e in enumerate(used)}
    pd = [[compact[e] for e in x] for x in pd]
    loops = [len(used) + 1 + k for k, p in enumerate(p for p in range(strands) if p not in touched)]
    return from_pd(pd, loops=loops)


BRAIDS: Dict[str, tuple] = {
    "unknot1": ((1,), 2),
    "unknot2": ((1, 2), 3),
    "trefoil": ((1, 1, 1), 2),
    "hopf": ((1, 1), 2),
    "figure8": ((1, -2, 1, -2), 3),
    "5_1": ((1, 1, 1, 1, 1), 2),
    "5_2": ((1, 1, 1, 2, -1, 2), 3),
    "6_1": ((1, 1, 2, -1, -3, 2, -3), 4),
    "6_2": ((1, 1, 1, -2, 1, -2), 3),
    "6_3": ((1, 1, -2, 1, -2, -2), 3),
    "T(2,4)": ((1,) * 4, 2),
    "T(2,6)": ((1,) * 6, 2),
    "T(2,7)": ((1,) * 7, 2),
    "unlink2": ((1, -1), 2),
    "unlink3": ((1, -1, 2, -2), 3),
}

# knot determinants, for sanity checks of the braid words
DETERMINANTS = {"trefoil": 3, "figure8": 5, "5_1": 5, "5_2": 7, "6_1": 9, "6_2": 11, "6_3": 13,
                "T(2,7)": 7, "unknot1": 1, "unknot2": 1}

# Rasmussen invariants of the braid closures above (mirrors have the opposite sign)
S_VALUES = {"unknot0": 0, "unknot1": 0, "unknot2": 0, "trefoil": 2, "figure8": 0, "5_1": 4,
            "5_2": 2, "6_1": 0, "6_2": 2, "6_3": 0, "T(2,7)": 6}


def get(name: str) -> LinkDiagram:
    if name == "unknot0":
        return unknot()
    if name in BRAIDS:
        word, strands = BRAIDS[name]
        return braid_closure(word, strands)
    if name == "unlink2-free":
        return unknot(2)
    raise KeyError(name)


def names(max_crossings: int = 99) -> List[str]:
    return ["unknot0"] + [k for k, (w, _) in BRAIDS.items() if len(w) <= max_crossings]


KNOTS = ["unknot0", "unknot1", "unknot2", "trefoil", "figure8", "5_1", "5_2", "6_1", "6_2", "6_3", "T(2,7)"]
