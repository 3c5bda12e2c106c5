import random

import pytest

from khtot import corpus
from khtot.contrib import (
    EVALUATORS,
    TAGS,
    classify,
    eval_b,
    eval_d,
    eval_h,
    eval_k,
    family_tag,
    rule_violations,
    with_passive,
)
from khtot.planar import R, Config, LabeledConfiguration, configuration, dual_config, transform

from test_planar import MERGE, SPLIT, TYPE_C, forest

PARALLEL = Config((((2, R), (0, R)), ((3, R), (1, R))), 2)  # two parallel arcs between two circles


def lc(cfg, x=0, y=0):
    return LabeledConfiguration(cfg, x, y)


@pytest.mark.parametrize("x,y,tag", [(0, 0, "MergeA"), (1, 1, "MergeB"), (2, 1, "MergeB"), (3, 1, "MergeC")])
def test_merge_tags(x, y, tag):
    assert family_tag(lc(MERGE, x, y)) in (tag, "Forest")
    assert eval_k(lc(MERGE, x, y)) == (tag != "MergeC")
    assert eval_b(lc(MERGE, x, y)) == (tag == "MergeC")


@pytest.mark.parametrize("x,y,tag", [(1, 3, "SplitA"), (0, 1, "SplitB"), (0, 2, "SplitB"), (0, 0, "SplitC")])
def test_split_tags(x, y, tag):
    assert family_tag(lc(SPLIT, x, y)) in (tag, "Forest")
    assert eval_k(lc(SPLIT, x, y)) == (tag != "SplitC")
    assert eval_b(lc(SPLIT, x, y)) == (tag == "SplitC")


def test_non_contributing_merge():
    assert family_tag(lc(MERGE, 1, 0)) == "None"
    assert all(f(lc(MERGE, 1, 0)) == 0 for f in EVALUATORS.values())


def test_index_two_is_not_khovanov():
    assert eval_k(lc(PARALLEL)) == 0
    assert eval_b(lc(PARALLEL, 3, 3)) == 0


def test_type_a():
    assert eval_d(lc(PARALLEL)) == 1
    assert eval_d(lc(PARALLEL, 1, 0)) == 0
    # one arc reversed breaks the parallel orientation
    assert eval_d(lc(PARALLEL.flip_arcs(1))) == 0
    assert eval_d(lc(PARALLEL.reverse())) == 1


def test_type_b_is_dual_of_a():
    dual = transform(dual_config(lc(PARALLEL)), "mirror")
    assert family_tag(dual) == "SzB"
    assert eval_d(dual) == 1


def test_type_c_conjugation():
    assert eval_d(lc(TYPE_C)) == 1
    assert eval_d(transform(lc(TYPE_C), "reverse")) == 1
    assert eval_d(lc(TYPE_C.flip_arcs(1))) == 0


def test_trefoil_top_configuration(trefoil):
    # the W^2 term of the differential on 1 at the 000 vertex
    cfg = configuration(trefoil, 0b000, 0b111).config
    assert eval_d(lc(cfg)) == 1
    assert family_tag(lc(cfg)).startswith("Sz")


def test_forest():
    cfg = forest()
    # trees fully flagged, dual trees unflagged; component order: merge, split, tree, split
    x = 0b0111011
    ending = cfg.ending
    y = 0
    comp_end = {}
    for ei, circ in enumerate(ending.circles):
        comp_end[ei] = min(m // 2 for m, _ in circ)
    for ei, a in comp_end.items():
        if a in (0, 2, 3):
            y |= 1 << ei
    assert eval_h(lc(cfg, x, y)) == 1
    assert family_tag(lc(cfg, x, y)) == "Forest"
    assert eval_h(lc(cfg, x ^ 1, y)) == 0


def test_h_needs_index_one():
    assert eval_h(lc(Config(((),), 0), 1, 1)) == 0
    assert eval_h(lc(MERGE, 1, 1)) == 0
    assert eval_h(lc(MERGE, 3, 1)) == 1


def test_extension_rule():
    for p in (0, 1):
        for q in (0, 1):
            ext = with_passive(lc(MERGE, 0, 0), p, q)
            assert eval_k(ext) == (p == q)


def test_tags_are_known():
    rng = random.Random(0)
    d = corpus.get("5_2")
    for _ in range(300):
        u = rng.getrandbits(d.n)
        v = u | rng.getrandbits(d.n)
        cfg = configuration(d, u, v).config
        for o in classify(cfg) if len(cfg.components) == 1 else ():
            assert o.tag in TAGS
            assert EVALUATORS[o.kind](lc(cfg.flip_arcs(o.val), o.x, o.y)) == 1


@pytest.mark.parametrize("name", ["trefoil", "figure8", "5_2", "hopf", "unlink3"])
def test_rules_randomized(name):
    rng = random.Random(name)
    d = corpus.get(name)
    for _ in range(300):
        u = rng.getrandbits(d.n)
        v = u | rng.getrandbits(d.n)
        cfg = configuration(d, u, v).config
        x = rng.getrandbits(len(cfg.circles))
        y = rng.getrandbits(len(cfg.ending.circles))
        if cfg.n_arcs and len(cfg.components) == 1 and rng.random() < 0.6:
            opts = classify(cfg)
            if opts:
                o = rng.choice(opts)
                x, y = o.x, o.y
                cfg = cfg.flip_arcs(o.val)
        assert rule_violations(lc(cfg, x, y), rng.getrandbits(max(cfg.n_arcs, 1))) == []


def test_filtration_rule_catches_flag_loss():
    # a basepoint on the flagged start circle of a merge whose end is unflagged
    c = lc(MERGE, 1, 0)
    assert all(f(c) == 0 for f in EVALUATORS.values())
    assert rule_violations(c) == []
