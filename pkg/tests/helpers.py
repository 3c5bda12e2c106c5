"""Shared helpers for the test modules."""

from khtot.algebra import homology_f2, homology_pid, total_rank
from khtot.complex import build_total, specialize
from khtot.diagram import apply_move, triangle_faces


def signature(d):
    """Homology tables that the invariance checks compare."""
    C = build_total(d)
    return (
        homology_f2(specialize(C, "0", "0")),
        homology_pid(specialize(C, "keep", "0")),
        homology_pid(specialize(C, "0", "keep")),
        total_rank(homology_f2(specialize(C, "1", "1"))),
    )


def random_move(d, rng):
    """One random R1, R2 or R3 move with random decoration bits for new crossings."""
    faces = [f for f in d.faces if len({s.edge for s in f}) >= 2]
    kinds = ["R1+", "R1-"] + (["R2"] if faces else []) + (["R3"] if triangle_faces(d) else [])
    k = rng.choice(kinds)
    if k.startswith("R1"):
        e = rng.choice(list(d.slots) + list(d.loops))
        site = {"edge": e, "side": rng.choice(["left", "right"])}
        return apply_move(d, k, site, [rng.getrandbits(1)]), k
    if k == "R2":
        f = rng.choice(faces)
        over, under = rng.sample(sorted({s.edge for s in f}), 2)
        site = {"over": over, "under": under, "face": d.faces.index(f)}
        return apply_move(d, "R2", site, [rng.getrandbits(1), rng.getrandbits(1)]), k
    return apply_move(d, "R3", {"face": rng.choice(triangle_faces(d))}), k


def bits(mask, n):
    return [mask >> i & 1 for i in range(n)]
