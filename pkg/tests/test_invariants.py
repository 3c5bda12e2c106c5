import itertools
import random
from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest

from khtot import corpus
from khtot.algebra import rank_f2
from khtot.diagram import mirror_diagram, unknot
from khtot.invariants import (
    STANDARD_UPRIGHTS,
    FtotSystem,
    UprightSet,
    bn_generator_chain,
    checkerboard,
    genus_bound,
    lift_to_ftot,
    linking_number,
    max_translate,
    oriented_resolution,
    parse_upright,
    s_invariant,
    s_table,
    upright_member,
)
from khtot.planar import resolve

WINDOW = [(a, b) for a in range(-6, 7) for b in range(-9, 10, 2)]
SPECS = ["min", "max", "t=0", "t=1/2", "t=1", "t=1/3", "t=2/3,s=1/2", "t=1/2,s=-1,r=[(1,-1):-1]"]


def test_named_points():
    assert (0, 1) in UprightSet.minimal() and (0, -1) not in UprightSet.minimal()
    assert (1, -1) not in UprightSet.minimal() and (1, -1) in UprightSet.maximal()
    U1 = UprightSet.projective(1)
    assert (1, -99) in U1 and (0, -1) not in U1 and (0, 1) in U1


def test_even_quantum_rejected():
    with pytest.raises(ValueError):
        upright_member(UprightSet.minimal(), 0, 2)


@pytest.mark.parametrize("spec", SPECS)
def test_upward_closed_and_centered(spec):
    U = parse_upright(spec)
    assert U.centered
    assert (0, 1) in U and (0, -1) not in U
    for a, b in WINDOW:
        if (a, b) in U:
            assert (a + 1, b) in U and (a, b + 2) in U


@pytest.mark.parametrize("spec", SPECS)
def test_translate(spec):
    U = parse_upright(spec)
    rng = random.Random(spec)
    for _ in range(200):
        n = 2 * rng.randint(-5, 5)
        a, b = rng.randint(-8, 8), 2 * rng.randint(-8, 8) + 1
        assert ((a, b) in U.translate(n)) == ((a, b - n) in U)


@pytest.mark.parametrize("spec", SPECS)
def test_min_max_bounds(spec):
    U = parse_upright(spec)
    for p in WINDOW:
        if p in UprightSet.minimal():
            assert p in U
        if p in U:
            assert p in UprightSet.maximal()


def test_parse_round_trip():
    for spec in SPECS + ["t=1/2[4]", "min[-2]"]:
        U = parse_upright(spec)
        assert parse_upright(str(U)) == U
    assert parse_upright("t=1/2[4]").shift == 4
    assert parse_upright("t=1").t == Fraction(1)


@pytest.mark.parametrize("bad", ["", "t", "t=2", "t=1/2,s=3", "u=1", "t=1/2,r=[(0,1):-1]", "t=1[3]", "t=1,t=0"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_upright(bad)


def test_oriented_resolution(trefoil):
    assert oriented_resolution(trefoil, "o") == 0
    assert oriented_resolution(trefoil, "-o") == 0
    m = mirror_diagram(trefoil)
    u = oriented_resolution(m)
    assert u == 0b111
    # the oriented smoothing gives the Seifert circles
    assert len(resolve(m, u)) == 2


@pytest.mark.parametrize("name", ["hopf", "T(2,4)", "T(2,6)"])
def test_oriented_resolution_grading_is_linking(name):
    d = corpus.get(name)
    u = oriented_resolution(d, (1, -1))
    gr_h = -d.n_minus + bin(u).count("1")
    assert gr_h == 2 * linking_number(d, [0], [1])
    assert linking_number(d, [0], [1]) == d.n // 2


def test_checkerboard_two_colours(figure8):
    col = checkerboard(figure8)
    for e in figure8.slots:
        assert col[e, True] != col[e, False]


def test_trefoil_generator(trefoil):
    chain = bn_generator_chain(trefoil)
    keys = set(chain)
    assert {u for u, _ in keys} == {0}
    assert keys in ({(0, 0b01), (0, 0b11)}, {(0, 0b10), (0, 0b11)})
    assert sorted(chain.values()) == [0, 1]


def test_unknot_generator():
    d = unknot()
    for o in ("o", "-o"):
        chain = bn_generator_chain(d, o)
        assert set(chain) <= {(0, 0), (0, 1)}
    assert bn_generator_chain(d, "o") != bn_generator_chain(d, "-o")


def test_unlink_generators_independent():
    d = corpus.get("unlink2")
    S = FtotSystem.build(d)
    vecs = [S.vector(bn_generator_chain(d, o)) for o in itertools.product((1, -1), repeat=2)]
    assert all(S.apply(v, "f") == 0 for v in vecs)
    assert rank_f2(vecs) == 4


@pytest.mark.parametrize("name", ["unknot0", "trefoil", "figure8", "5_2", "hopf"])
def test_lift_is_cycle(name):
    d = corpus.get(name)
    S = FtotSystem.build(d)
    for o in ("o", "-o"):
        z = lift_to_ftot(d, o, S)
        assert S.apply(z) == 0
        c0 = S.vector(bn_generator_chain(d, o))
        deg0 = S.level_mask(int(S.gr_h[c0.bit_length() - 1]))
        assert z & deg0 == c0


def test_trefoil_lift_is_c0(trefoil):
    S = FtotSystem.build(trefoil)
    assert lift_to_ftot(trefoil, "o", S) == S.vector(bn_generator_chain(trefoil, "o"))


def test_trefoil_s_values(trefoil):
    table = s_table(trefoil)
    assert set(table.values()) == {2}
    assert genus_bound(trefoil) == 1


@pytest.mark.parametrize("name", ["unknot0", "unknot1", "unknot2"])
def test_unknot_s_values(name):
    d = corpus.get(name)
    assert set(s_table(d).values()) == {0}
    assert genus_bound(d) == 0


def test_mirror_trefoil(trefoil):
    assert s_invariant(mirror_diagram(trefoil), "t=1") == -2


def test_figure_eight_genus(figure8):
    assert genus_bound(figure8) == 0


@pytest.mark.parametrize("name", ["trefoil", "figure8", "5_1", "5_2"])
def test_monotone_and_symmetric(name):
    for d in (corpus.get(name), mirror_diagram(corpus.get(name))):
        S = FtotSystem.build(d)
        vals = {(u, v): s_invariant(d, parse_upright(u), v, S) for u in SPECS for v in ("o", "-o", "o,-o")}
        for u in SPECS:
            assert vals[u, "o"] == vals[u, "-o"]
            assert vals[u, "o,-o"] + 2 >= vals[u, "o"]
            for v in ("o", "-o", "o,-o"):
                assert vals["min", v] <= vals[u, v] <= vals["max", v]


def test_s_rejects_links_and_translates(trefoil):
    with pytest.raises(ValueError):
        s_invariant(corpus.get("hopf"), "t=1")
    with pytest.raises(ValueError):
        s_invariant(trefoil, "t=1[2]")
    with pytest.raises(ValueError):
        s_invariant(trefoil, "t=1", "sideways")


def test_standard_uprights_parse():
    assert [str(parse_upright(s)) for s in STANDARD_UPRIGHTS] == ["min", "max", "t=0", "t=1/2", "t=1"]


# Model summands where the new invariants move away from Rasmussen's s.
# Generators carry (gr_h, gr_q); d_i raises the bigrading by (i, 2i - 2) and
# h_i by (i, 2i).  Take s = 2, so b sits at (0, 1).

def model(arrows, gradings):
    names = sorted(gradings)
    idx = {k: i for i, k in enumerate(names)}
    cols = [0] * len(names)
    for src, tgt in arrows:
        cols[idx[src]] |= 1 << idx[tgt]
    S = SimpleNamespace(
        cols=cols,
        gr_h=np.array([gradings[k][0] for k in names]),
        gr_q=np.array([gradings[k][1] for k in names]),
    )
    return S, idx


def test_model_one():
    # b -d2-> a, c -d1-> d, c -h1-> a, e -h1-> d; unique representative b + c + e
    S, idx = model(
        [("b", "a"), ("c", "d"), ("c", "a"), ("e", "d")],
        {"b": (0, 1), "a": (2, 3), "c": (1, 1), "d": (2, 1), "e": (1, -1)},
    )
    z = sum(1 << idx[k] for k in "bce")
    assert S.cols[idx["b"]] ^ S.cols[idx["c"]] ^ S.cols[idx["e"]] == 0
    for spec in SPECS:
        U = parse_upright(spec)
        expect = 2 if (1, -1) in U else 0
        assert max_translate(S, z, U) + 2 == expect


def test_model_two():
    # a -d2-> b, a -h1-> c, d -d1-> c, d -h1-> e; b, c and e are homologous
    S, idx = model(
        [("a", "b"), ("a", "c"), ("d", "c"), ("d", "e")],
        {"b": (0, 1), "a": (-2, -1), "c": (-1, 1), "d": (-2, 1), "e": (-1, 3)},
    )
    z = 1 << idx["b"]
    assert S.cols[idx["b"]] == 0
    seen = set()
    for spec in SPECS + ["t=3/4", "t=2/3"]:
        U = parse_upright(spec)
        # e lands in U[s] exactly when (-1, 1) is in U
        expect = 4 if (-1, 1) in U else 2
        seen.add(expect)
        assert max_translate(S, z, U) + 2 == expect
    assert seen == {2, 4}
