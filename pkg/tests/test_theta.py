import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from treetheta import theta
from treetheta.theta import POINT, TableError, disk, parse_table, table_leveltree

PAPER_TABLE = "2 2 2 3 2 1 / 1 0 1 1 0"
OBJS3 = theta.level_trees(3, 4)
OBJS2 = theta.level_trees(2, 3)


def test_table_examples():
    t = parse_table(PAPER_TABLE, 3)
    assert t.height == 3 and t.m == 6
    d = parse_table("1 /")
    assert table_leveltree(d) == disk(1)
    with pytest.raises(TableError) as e:
        parse_table("1 2 / 1")
    assert e.value.index == 1
    with pytest.raises(TableError):
        parse_table("3", n=2)
    with pytest.raises(TableError):
        parse_table("1 x")


def test_leveltree_examples():
    for k in range(4):
        assert table_leveltree(parse_table(str(k))) == disk(k)
        assert theta.height(disk(k)) == k and theta.n_columns(disk(k)) == 1
    assert table_leveltree(parse_table("1 1 / 0")) == (POINT, POINT)
    s = table_leveltree(parse_table(PAPER_TABLE))
    assert theta.leaf_depths(s) == [2, 2, 2, 3, 2, 1]


def meet_depths(s):
    """Depth of the meet of consecutive leaves, from root-to-leaf paths."""
    paths = []

    def walk(x, path):
        if x == POINT:
            paths.append(path)
        for i, c in enumerate(x):
            walk(c, path + (i,))

    walk(s, ())
    out = []
    for p, q in zip(paths, paths[1:]):
        out.append(next(i for i, (a, b) in enumerate(zip(p, q)) if a != b))
    return out


@given(st.sampled_from(OBJS3))
def test_round_trip(s):
    tab = theta.leveltree_table(s)
    assert table_leveltree(tab) == s
    assert theta.as_object(theta.table_literal(s)) == s
    assert list(tab.top) == theta.leaf_depths(s) or s == POINT
    assert list(tab.bottom) == meet_depths(s)


def test_sizes():
    assert len(theta.level_trees(2, 3)) == 21
    assert len(theta.level_trees(3, 3)) == 88
    assert len(OBJS3) == 441


def brute_monotone(m, k):
    return sum(all(f[i] <= f[i + 1] for i in range(m)) for f in itertools.product(range(k + 1), repeat=m + 1))


@pytest.mark.parametrize("m,k", [(m, k) for m in range(5) for k in range(5)])
def test_theta1_monotone_oracle(m, k):
    assert len(theta.hom_tables((POINT,) * m, (POINT,) * k)) == brute_monotone(m, k)


def two_functors(s, t):
    """Strict 2-functors between free 2-categories on pastings of height ≤ 2, by brute force."""
    def hom_poset(t, o, o2):
        return list(itertools.product(*(range(len(t[j - 1]) + 1) for j in range(o + 1, o2 + 1))))

    n = 0
    for o in itertools.product(range(len(t) + 1), repeat=len(s) + 1):
        if any(o[i] > o[i + 1] for i in range(len(s))):
            continue
        ways = 1
        for i, col in enumerate(s, start=1):
            cells = hom_poset(t, o[i - 1], o[i])
            good = 0
            for f in itertools.product(cells, repeat=len(col) + 1):
                if all(all(a <= b for a, b in zip(f[r], f[r + 1])) for r in range(len(col))):
                    good += 1
            ways *= good
        n += ways
    return n


@pytest.mark.parametrize("s", theta.level_trees(2, 2), ids=theta.table_literal)
def test_theta2_strict_functor_oracle(s):
    for t in theta.level_trees(2, 2):
        assert len(theta.hom_tables(s, t)) == two_functors(s, t)
    assert len(theta.hom_tables(disk(2), disk(2))) == 5


def test_identity_and_composition_laws():
    rng = random.Random(3)
    for _ in range(300):
        a, b, c, d = (rng.choice(OBJS2) for _ in range(4))
        hs = [theta.hom_tables(x, y) for x, y in ((a, b), (b, c), (c, d))]
        if not all(hs):
            continue
        f, g, h = (rng.choice(x) for x in hs)
        assert theta.compose(h, theta.compose(g, f)) == theta.compose(theta.compose(h, g), f)
        assert theta.compose(f, theta.identity(a)) == f == theta.compose(theta.identity(b), f)


def test_vectorized_composer_matches(theta2):
    rng = random.Random(7)
    n = len(theta2)
    for _ in range(40):
        a, b, c = (rng.randrange(n) for _ in range(3))
        tab = theta2.comp(a, b, c)
        F, G = theta2.hom(a, b), theta2.hom(b, c)
        H = theta2.hom(a, c)
        for _ in range(10):
            if not F or not G:
                break
            i, j = rng.randrange(len(F)), rng.randrange(len(G))
            assert H[int(tab[i, j])] == theta.compose(G[j], F[i])


def test_disk_monos():
    assert len(theta.disk_monos(0, 1)) == 2
    assert len(theta.disk_monos(1, 3)) == 2
    for k in range(4):
        assert theta.disk_monos(k, k) == [theta.identity(disk(k))]
    s, t = theta.sigma(1), theta.tau(1)
    assert s != t and {s, t} == set(theta.disk_monos(0, 1))


def test_faces_glue():
    # incl_i ∘ (target face) = incl_{i+1} ∘ (source face) on the paper's table
    s = table_leveltree(parse_table(PAPER_TABLE))
    sp = theta.spine_table(s)
    assert sp.table.top == (2, 2, 2, 3, 2, 1) and sp.glue == (1, 0, 1, 1, 0)
    for i, (lf, rf) in enumerate(zip(sp.left_faces, sp.right_faces)):
        assert theta.compose(sp.inclusions[i], lf) == theta.compose(sp.inclusions[i + 1], rf)


def test_spine_descriptions():
    assert theta.spine_table(parse_table("1 1 / 0")).describe() == "D1 ⨿_D0 D1"
    sp = theta.spine_table(disk(2))
    assert len(sp.inclusions) == 1 and sp.inclusions[0] == theta.identity(disk(2))


def test_inert_count_matches_graph_maps():
    for s in OBJS2:
        for t in OBJS2:
            inert = sum(theta.is_inert(f) for f in theta.hom_tables(s, t))
            assert inert == theta.graph_maps_count(s, t)


def test_active_iff_not_factoring():
    for s in OBJS2[:10]:
        for t in OBJS2[:10]:
            for f in theta.hom_tables(s, t):
                assert theta.is_active(f) != theta.factors_through_nontrivial_inert(f, OBJS2)


def test_factor_examples():
    p, one = disk(0), disk(1)
    top = next(f for f in theta.hom_tables(p, one) if f.phi == (1,))
    a, i = theta.factor_active_inert(top)
    assert a == theta.identity(p) and i == top and theta.is_inert(i)
    idf = theta.identity(one)
    assert theta.factor_active_inert(idf) == (idf, idf)
    two = (POINT, POINT)
    surj = next(f for f in theta.hom_tables(two, one) if f.phi == (0, 1, 1))
    assert theta.factor_active_inert(surj) == (surj, idf)


def test_op_delta_examples(theta2):
    f = theta2.hom(3, 5)[0]
    assert theta.apply_op_delta((0, 0), f) == f
    assert theta.op_delta_object((1, 0), table_leveltree(parse_table("1 2 / 0"))) == \
        table_leveltree(parse_table("2 1 / 0"))
    rng = random.Random(1)
    deltas = theta.all_deltas(2)
    for _ in range(200):
        a, b = rng.randrange(len(theta2)), rng.randrange(len(theta2))
        hs = theta2.hom(a, b)
        if not hs:
            continue
        f = rng.choice(hs)
        d, e = rng.choice(deltas), rng.choice(deltas)
        de = tuple((x + y) % 2 for x, y in zip(d, e))
        assert theta.apply_op_delta(d, theta.apply_op_delta(e, f)) == theta.apply_op_delta(de, f)


def test_op_delta_object_map_is_an_involution():
    for d in theta.all_deltas(3):
        for s in OBJS3:
            t = theta.op_delta_object(d, s)
            assert theta.op_delta_object(d, t) == s
            assert theta.height(t) == theta.height(s) and theta.n_columns(t) == theta.n_columns(s)


def test_delta_extraction(theta2):
    from treetheta.skeleton import identity_functor

    assert theta.delta_of_functor(identity_functor(theta2), 2) == (0, 0)
    for d in [(1, 0), (1, 1), (0, 1)]:
        assert theta.delta_of_functor(theta.op_delta_functor(theta2, d), 2) == d


def test_disk_characterization():
    objs = theta.level_trees(2, 3)
    for k in range(3):
        hits = [s for s in objs if theta.satisfies_disk_characterization(s, k, objs)]
        assert hits == [disk(k)]
