import json

import pytest
from hypothesis import given, strategies as st

from treetheta import finop
from treetheta.finop import (FinOperad, OperadFormatError, classify_operad, compose_maps, corpus, eta_operad,
                             free_operad, internal_hom_category, is_rigid, j_operad, locality, mirror_operad,
                             mirror_permutation, nerve_at, operad_maps, underlying_category, unit_name,
                             validate_operad)
from treetheta.trees import ETA, PLANAR, SYMMETRIC, as_tree, corolla, mirror_tree, planar_trees, symmetric_trees

B3 = as_tree("((η η) η)")
SMALL = symmetric_trees(3, 2)
CORPUS = corpus()


def z3_monoid(mutate=False):
    comps = [("t", 0, "t", "u"), ("t", 0, "u", unit_name("x")), ("u", 0, "t", unit_name("x")), ("u", 0, "u", "t")]
    if mutate:
        comps[1] = ("t", 0, "u", "t")
    return FinOperad.build(SYMMETRIC, ["x"], [("t", ["x"], "x"), ("u", ["x"], "x")], comps, name="Z/3")


def test_eta_and_free_valid():
    assert validate_operad(eta_operad()) == []
    assert validate_operad(free_operad(corolla(2))) == []
    assert validate_operad(z3_monoid()) == []


@pytest.mark.parametrize("t", SMALL + [corolla(3)], ids=lambda t: t.literal)
def test_free_operads_valid(t):
    for flavour in (SYMMETRIC, PLANAR):
        assert validate_operad(free_operad(t, flavour)) == []


def test_mutated_composition_reported():
    bad = validate_operad(z3_monoid(mutate=True))
    assert bad and any(v.axiom == "associativity" for v in bad)


def test_mutated_action_reported():
    p = CORPUS["pseudo_corolla_free"]
    action = dict(p.action)
    action[("m", (1, 0))] = "m"
    q = FinOperad(p.flavour, p.colours, p.ops, p.units, p.circ, action)
    assert validate_operad(q)


def test_free_operad_shapes():
    p = free_operad(ETA)
    assert len(p.colours) == 1 and p.non_unit_ops == []
    p = free_operad(corolla(2))
    assert len(p.colours) == 3 and len(p.non_unit_ops) == 2
    a, b = p.non_unit_ops
    assert p.act(a, (1, 0)) == b
    p = free_operad(B3, PLANAR)
    assert len(p.colours) == 5 and len(p.non_unit_ops) == 3
    whole = next(x for x in p.non_unit_ops if p.arity(x) == 3)
    low, high = sorted((x for x in p.non_unit_ops if p.arity(x) == 2), key=lambda x: p.sig(x).output)
    assert p.compose(low, 0, high) == whole


def test_underlying_categories():
    j = underlying_category(j_operad())
    assert len(j.objects) == 2 and len(j.arrows) == 4 and j.validate() == []
    c2 = underlying_category(free_operad(corolla(2)))
    assert c2.is_discrete() and len(c2.objects) == 3
    c1 = underlying_category(free_operad(corolla(1)))
    assert len(c1.objects) == 2 and len(c1.arrows) == 3


def test_rigidity_examples():
    assert is_rigid(eta_operad())
    assert not is_rigid(j_operad())
    assert all(is_rigid(free_operad(t)) for t in SMALL)
    assert not is_rigid(CORPUS["z2_monoid"]) and is_rigid(CORPUS["idempotent"])


def test_locality_examples():
    assert locality(j_operad()) is False
    assert locality(free_operad(corolla(2))) is True
    assert locality(eta_operad(), corolla(2)) is True


@pytest.mark.parametrize("key", sorted(k for k, p in CORPUS.items() if p.flavour == SYMMETRIC))
def test_rigid_iff_local_iff_rigid_internal_homs(key):
    p = CORPUS[key]
    homs = [internal_hom_category(free_operad(as_tree(t)), p) for t in ("η", "(η)", "(η η)", B3.literal)]
    assert is_rigid(p) == locality(p) == all(h.is_rigid() for h in homs)


def test_classification_examples():
    c = classify_operad(eta_operad())
    assert c.is_category and c.is_discrete and not c.is_pseudo_corolla
    c = classify_operad(CORPUS["pseudo_corolla_trivial"])
    assert c.is_pseudo_corolla and c.corolla_arity is None
    for n in range(4):
        assert classify_operad(free_operad(corolla(n))).corolla_arity == n


@pytest.mark.parametrize("key", sorted(CORPUS))
def test_pseudo_corolla_double_enumeration(key):
    p = CORPUS[key]
    assert classify_operad(p).is_pseudo_corolla == finop.is_pseudo_corolla_by_definition(p)


def test_operad_map_examples():
    for p in CORPUS.values():
        assert len(operad_maps(eta_operad(p.flavour), p)) == len(p.colours)
    assert len(operad_maps(free_operad(corolla(2)), free_operad(corolla(2)))) == 2
    assert len(operad_maps(free_operad(corolla(2), PLANAR), free_operad(corolla(2), PLANAR))) == 1
    assert operad_maps(free_operad(B3, PLANAR), free_operad(mirror_tree(B3), PLANAR)) == []


@given(st.sampled_from(SMALL), st.sampled_from(SMALL), st.sampled_from(SMALL))
def test_operad_map_composition_closed(s, t, u):
    p, q, r = (free_operad(x) for x in (s, t, u))
    targets = {(m.colours, m.ops) for m in operad_maps(p, r)}
    for f in operad_maps(p, q)[:5]:
        for g in operad_maps(q, r)[:5]:
            h = compose_maps(g, f)
            assert (h.colours, h.ops) in targets
            assert finop.check_operad_map(h) == []


def test_internal_hom_examples():
    p = CORPUS["split_idempotent"]
    h = internal_hom_category(eta_operad(), p)
    u = underlying_category(p)
    assert len(h.objects) == len(u.objects) and len(h.arrows) == len(u.arrows)
    h = internal_hom_category(free_operad(corolla(1)), j_operad())
    assert len(h.objects) == 4 and h.is_contractible_groupoid()
    assert internal_hom_category(free_operad(corolla(2)), eta_operad()).objects == []


def test_mirror_operad():
    assert mirror_permutation(3) == (3, 2, 1)
    for t in planar_trees(3, 2):
        p = free_operad(t, PLANAR)
        m = mirror_operad(p)
        assert validate_operad(m) == []
        assert finop.is_isomorphic(m, free_operad(mirror_tree(t), PLANAR))
        mm = mirror_operad(m)
        assert mm.ops == p.ops and mm.circ == p.circ
    for key in ("planar_binary", "planar_j", "planar_free_c2"):
        p = CORPUS[key]
        a, b = classify_operad(p), classify_operad(mirror_operad(p))
        assert (a.is_category, a.is_discrete, a.is_pseudo_corolla) == (b.is_category, b.is_discrete, b.is_pseudo_corolla)
        assert is_rigid(p) == is_rigid(mirror_operad(p))


def test_nerve_at():
    assert len(nerve_at(eta_operad(), ETA).maps) == 1
    assert len(nerve_at(eta_operad(), corolla(2)).maps) == 0
    assert len(nerve_at(free_operad(corolla(2)), corolla(2)).maps) == 2


def test_size_bound():
    with pytest.raises(finop.SizeBoundExceeded):
        operad_maps(free_operad(corolla(1)), free_operad(as_tree("(((η)))")), max_maps=2)


@pytest.mark.parametrize("key", sorted(CORPUS))
def test_json_round_trip(key, tmp_path):
    p = CORPUS[key]
    path = tmp_path / "op.json"
    finop.save_operad(p, path)
    q = finop.load_operad(path)
    assert q.ops == p.ops and q.circ == p.circ and q.action == p.action and q.colours == p.colours


def test_corpus_bounds():
    for p in CORPUS.values():
        assert len(p.colours) <= 3 and len(p.non_unit_ops) <= 4


def test_json_rejects_bad_input():
    with pytest.raises(OperadFormatError):
        finop.operad_from_json({"schema": "other"})
    data = finop.operad_to_json(z3_monoid())
    data["compositions"][1] = ["t", 0, "u", "t"]
    with pytest.raises(OperadFormatError, match="associativity"):
        finop.operad_from_json(data)
    data = json.loads(json.dumps(finop.operad_to_json(j_operad())))
    del data["colours"]
    with pytest.raises(OperadFormatError):
        finop.operad_from_json(data)
