import itertools
import math

import pytest
from hypothesis import given, strategies as st

from treetheta.trees import (ETA, PLANAR, SYMMETRIC, TreeSyntaxError, as_tree, canonical_form, corolla, graft,
                             left_comb, mirror_tree, operations_of_free_operad, parse_tree, planar_trees, render,
                             replanarizations, standard_tree, symmetric_trees, tree_automorphisms)

TREES = planar_trees(4, 3)
trees = st.sampled_from(TREES)
B3 = as_tree("((η η) η)")


def test_parse_examples():
    assert parse_tree("η") is ETA or parse_tree("η") == ETA
    assert parse_tree("((η η) η)") == left_comb(3)
    t = parse_tree("(η ())")
    assert t.n_vertices == 2 and t.arity(0) == 2
    assert t.subtree(t.inputs_of(0)[1]) == corolla(0)
    assert parse_tree("(e e)") == corolla(2)


@pytest.mark.parametrize("bad", ["", "(", "(η", "η)", "(x)", "ηη"])
def test_parse_errors(bad):
    with pytest.raises(TreeSyntaxError):
        parse_tree(bad)


def test_standard_trees():
    assert standard_tree("corolla", 2).literal == "(η η)"
    assert standard_tree("left_comb", 2) == corolla(2)
    assert standard_tree("left_comb", 3).literal == "((η η) η)"
    assert standard_tree("eta") == ETA


@given(trees)
def test_render_round_trip(t):
    assert parse_tree(render(t)) == t
    assert parse_tree(render(t, ascii=True)) == t


def test_edge_ids_reproducible():
    a, b = parse_tree("((η η) (η))"), parse_tree("((η η) (η))")
    assert a.edges == b.edges and a.vertices == b.vertices and a.leaves == b.leaves
    assert a.vertices[0] == 0


def test_canonical_examples():
    assert canonical_form(B3) == canonical_form(mirror_tree(B3))
    assert canonical_form(corolla(3)) == corolla(3)


@given(trees)
def test_canonical_constant_on_replanarizations(t):
    c = canonical_form(t)
    assert canonical_form(c) == c
    for r in itertools.islice(replanarizations(t), 50):
        assert canonical_form(r) == c


def test_mirror_examples():
    assert mirror_tree(B3).literal == "(η (η η))"
    for n in range(5):
        assert mirror_tree(corolla(n)) == corolla(n)


@given(trees)
def test_mirror_involution(t):
    assert mirror_tree(mirror_tree(t)) == t
    assert canonical_form(mirror_tree(t)) == canonical_form(t)


def test_graft_examples():
    c2 = corolla(2)
    assert graft(c2, c2.leaves[0], c2) == B3
    assert graft(c2, c2.leaves[1], corolla(0)).literal == "(η ())"
    for t in TREES[:30]:
        for leaf in t.leaves:
            assert graft(t, leaf, ETA) == t


@given(trees, trees, trees)
def test_graft_disjoint_leaves_commute(t, s, u):
    if len(t.leaves) < 2:
        return
    l1, l2 = t.leaves[0], t.leaves[-1]
    a = graft(graft(t, l2, u), l1, s)
    # grafting at l1 first renumbers l2, which stays the last leaf
    b = graft(t, l1, s)
    assert graft(b, b.leaves[-1], u) == a


def test_free_operations_counts():
    assert len(operations_of_free_operad(ETA, SYMMETRIC)) == 1
    ops = operations_of_free_operad(corolla(2), SYMMETRIC)
    assert sum(o.is_identity for o in ops) == 3 and sum(not o.is_identity for o in ops) == 2
    ops = operations_of_free_operad(B3, PLANAR)
    assert sum(o.is_identity for o in ops) == 5 and sum(not o.is_identity for o in ops) == 3


@pytest.mark.parametrize("n", range(5))
def test_corolla_operation_counts(n):
    assert len(operations_of_free_operad(corolla(n), SYMMETRIC)) == n + 1 + math.factorial(n)
    assert len(operations_of_free_operad(corolla(n), PLANAR)) == n + 2
    assert len(tree_automorphisms(corolla(n))) == math.factorial(n)


def test_automorphism_examples():
    assert tree_automorphisms(ETA) == [(0,)]
    assert len(tree_automorphisms(corolla(2))) == 2
    auts = tree_automorphisms(B3)
    assert len(auts) == 2
    swap = next(a for a in auts if a != tuple(range(B3.n_edges)))
    top = B3.inputs_of(B3.inputs_of(0)[0])
    assert swap[top[0]] == top[1]


def test_symmetric_trees_are_canonical_and_distinct():
    ts = symmetric_trees(3, 3)
    assert all(canonical_form(t) == t for t in ts)
    assert len(set(ts)) == len(ts)
    assert len(symmetric_trees(3, 2)) == 28 and len(planar_trees(3, 2)) == 49
