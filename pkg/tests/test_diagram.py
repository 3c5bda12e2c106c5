import json
import random

import pytest

from helpers import random_move
from khtot import corpus
from khtot.diagram import (
    DiagramError,
    LinkDiagram,
    apply_move,
    from_json,
    mirror_diagram,
    parse_pd,
    reorient,
    triangle_faces,
    unknot,
)

SMALL = ["unknot1", "unknot2", "trefoil", "hopf", "figure8", "5_1", "5_2", "6_1", "T(2,4)", "unlink2", "unlink3"]


def recomputed_sign(d, c):
    a, b, cc, dd = d.crossings[c]
    # over-strand runs d -> b exactly when b is the outgoing end
    return 1 if d.tail_slot[b] == (c, 1) else -1


def test_trefoil_pd_text_parses_as_negative(pd_trefoil):
    d = pd_trefoil
    assert d.n == 3
    assert len(d.edges) == 6
    assert d.component_count == 1
    # under the X(a,b,c,d) convention this text is the left-handed trefoil
    assert (d.n_plus, d.n_minus) == (0, 3)
    assert mirror_diagram(d).n_plus == 3


def test_unknot_token():
    d = parse_pd("U")
    assert d.n == 0 and d.component_count == 1
    assert parse_pd("U U").component_count == 2


def test_kink_parses_and_edges_once_fail():
    d = parse_pd("PD[X(1,1,2,2)]")
    assert d.n == 1 and d.component_count == 1
    with pytest.raises(DiagramError, match="exactly twice"):
        parse_pd("PD[X(1,2,3,4)]")


@pytest.mark.parametrize("text", ["PD[X(1,2,3)]", "PD[Y(1,2,3,4)]", "", "PD[X(1,4,2,5),,]"])
def test_malformed_text(text):
    with pytest.raises(DiagramError):
        parse_pd(text)


def test_non_spherical():
    with pytest.raises(DiagramError, match="spherical"):
        parse_pd("PD[X(1,2,1,2)]")


def test_decoration_length_mismatch():
    with pytest.raises(DiagramError, match="decoration length"):
        parse_pd("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]", decorations=[0, 1])


def test_bad_basepoint():
    with pytest.raises(DiagramError):
        parse_pd("PD[X(1,1,2,2)]", basepoint=7)


@pytest.mark.parametrize("name", SMALL)
def test_signs_and_components(name):
    d = corpus.get(name)
    assert d.n_plus + d.n_minus == d.n
    assert sum(recomputed_sign(d, c) for c in range(d.n)) == d.n_plus - d.n_minus
    edges = sorted(e for comp in d.components for e in comp)
    assert edges == sorted(list(d.edges) + list(d.loops))
    if d.n:
        assert d.comb_map.euler_characteristic() == 2 * len(set(_pieces(d)))


def _pieces(d):
    seen = {}
    for comp_id, comp in enumerate(d.components):
        for e in comp:
            seen[e] = comp_id
    # pieces of the underlying 4-valent graph: components joined by crossings
    parent = list(range(d.component_count))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for X in d.crossings:
        for e in X[1:]:
            parent[find(seen[e])] = find(seen[X[0]])
    return [find(seen[X[0]]) for X in d.crossings]


def test_component_counts():
    assert corpus.get("hopf").component_count == 2
    assert corpus.get("unlink3").component_count == 3
    assert corpus.get("T(2,6)").component_count == 2


def test_json_round_trip(trefoil):
    d = trefoil.with_decorations([1, 0, 1]).with_basepoint(trefoil.edges[0])
    again = from_json(json.dumps(d.to_json()))
    assert again == d


def test_json_loops():
    d = from_json({"pd": [], "loops": 2})
    assert d.component_count == 2 and d.n == 0
    with pytest.raises(DiagramError):
        from_json({"crossings": []})


@pytest.mark.parametrize("name", ["trefoil", "figure8", "hopf", "5_2"])
def test_mirror_involution(name):
    d = corpus.get(name)
    m = mirror_diagram(d)
    assert (m.n_plus, m.n_minus) == (d.n_minus, d.n_plus)
    assert mirror_diagram(m) == d


def test_mirror_of_unknot():
    assert mirror_diagram(unknot()) == unknot()


def test_reorient_changes_linking_signs():
    d = corpus.get("hopf")
    r = reorient(d, [1, -1])
    assert r.signs == tuple(-s for s in d.signs)
    assert reorient(corpus.get("trefoil"), [-1]).signs == corpus.get("trefoil").signs


def test_r1_on_unknot():
    d = unknot()
    pos = apply_move(d, "R1+", {"edge": 1, "side": "left"})
    neg = apply_move(d, "R1-", {"edge": 1, "side": "right"})
    assert (pos.n, pos.n_plus, pos.writhe) == (1, 1, 1)
    assert (neg.n, neg.n_minus, neg.writhe) == (1, 1, -1)
    assert pos.decorations == (0,)


def test_r2_adds_cancelling_pair(trefoil):
    d = apply_move(trefoil, "R2", {"over": 1, "under": 2}, [1, 0])
    assert d.n == trefoil.n + 2
    assert d.n_plus == trefoil.n_plus + 1 and d.n_minus == trefoil.n_minus + 1
    assert d.component_count == 1
    assert d.decorations[-2:] == (1, 0)


def test_r2_needs_shared_face(trefoil):
    with pytest.raises(DiagramError, match="share a face"):
        apply_move(trefoil, "R2", {"over": 2, "under": 4})


def test_r3_on_non_triangle(trefoil):
    square = next(k for k, f in enumerate(trefoil.faces) if len(f) != 3 or k not in triangle_faces(trefoil))
    with pytest.raises(DiagramError):
        apply_move(trefoil, "R3", {"face": square})


def test_r3_keeps_writhe_and_components():
    d = corpus.get("6_1")
    for f in triangle_faces(d):
        e = apply_move(d, "R3", {"face": f})
        assert e.n == d.n and e.writhe == d.writhe
        assert e.component_count == d.component_count
        assert e.crossings != d.crossings


def test_r3_refuses_basepoint():
    d = corpus.get("5_2")
    f = triangle_faces(d)[0]
    e = d.faces[f][0].edge
    with pytest.raises(DiagramError, match="basepoint"):
        apply_move(d.with_basepoint(e), "R3", {"face": f})


def test_unknown_move(trefoil):
    with pytest.raises(DiagramError, match="unknown move"):
        apply_move(trefoil, "R4", {})


@pytest.mark.parametrize("name", ["unknot1", "trefoil", "hopf", "5_2"])
def test_random_moves_preserve_structure(name):
    rng = random.Random(name)
    d0 = corpus.get(name)
    for _ in range(15):
        d, kind = random_move(d0, rng)
        assert d.component_count == d0.component_count
        if kind == "R1+":
            assert d.writhe == d0.writhe + 1
        elif kind == "R1-":
            assert d.writhe == d0.writhe - 1
        else:
            assert d.writhe == d0.writhe
        assert sum(recomputed_sign(d, c) for c in range(d.n)) == d.writhe


def test_immutable(trefoil):
    with pytest.raises(Exception):
        trefoil.signs = (1, 1, 1)
    assert isinstance(trefoil, LinkDiagram)
