import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from treetheta import omega
from treetheta.skeleton import FunctorData, enumerate_nat_transfs, validate_functor
from treetheta.trees import ETA, PLANAR, SYMMETRIC, as_tree, corolla, mirror_tree, planar_trees, symmetric_trees

B3 = as_tree("((η η) η)")
C2 = corolla(2)
SMALL = symmetric_trees(3, 2)


def test_hom_examples():
    assert len(omega.hom_trees(ETA, C2)) == 3
    assert len(omega.hom_trees(C2, C2, SYMMETRIC)) == 2
    assert len(omega.hom_trees(C2, C2, PLANAR)) == 1
    assert omega.hom_trees(B3, mirror_tree(B3), PLANAR) == []
    assert omega.hom_trees(mirror_tree(B3), B3, PLANAR) == []


def test_omega0_restriction():
    # the ternary operation of B3 is the whole tree, not a single vertex
    assert len(omega.hom_trees(corolla(3), B3)) == 6
    assert omega.hom_trees(corolla(3), B3, restrict=omega.OMEGA0) == []
    assert len(omega.hom_trees(C2, B3, restrict=omega.OMEGA0)) == 4


@pytest.mark.parametrize("s", SMALL, ids=lambda t: t.literal)
def test_planar_counts_bounded_by_symmetric(s):
    for t in SMALL:
        a, b = len(omega.hom_trees(s, t, PLANAR)), len(omega.hom_trees(s, t, SYMMETRIC))
        assert a <= b
        if all(s.arity(v) <= 1 for v in s.vertices) and all(t.arity(v) <= 1 for v in t.vertices):
            assert a == b


def test_compose_example():
    top = next(v for v in B3.vertices if v != 0)
    inc = omega.corolla_inclusion(B3, top)
    leaf = omega.colour_map(C2, 1)
    assert omega.compose(inc, leaf) == omega.colour_map(B3, B3.inputs_of(top)[0])


triples = st.tuples(st.sampled_from(SMALL), st.sampled_from(SMALL), st.sampled_from(SMALL), st.sampled_from(SMALL))


@given(triples, st.integers(0, 10 ** 6))
def test_compose_associative(objs, seed):
    a, b, c, d = objs
    homs = [omega.hom_trees(x, y) for x, y in ((a, b), (b, c), (c, d))]
    if not all(homs):
        return
    f, g, h = (hs[seed % len(hs)] for hs in homs)
    assert omega.compose(h, omega.compose(g, f)) == omega.compose(omega.compose(h, g), f)
    assert omega.compose(f, omega.identity(a)) == f == omega.compose(omega.identity(b), f)


def test_cor_slice_sizes():
    assert len(omega.cor_slice(ETA).colours) + len(omega.cor_slice(ETA).operations) == 1
    for n in range(4):
        sl = omega.cor_slice(corolla(n))
        assert len(sl.colours) + len(sl.operations) == n + 2
    sl = omega.cor_slice(B3)
    assert (len(sl.colours), len(sl.operations)) == (5, 2)


def test_cone_bijection_and_corruption():
    assert omega.check_cone_bijection(B3, B3).ok
    fams = omega.cone_families(B3, B3)
    assert not omega.check_cone_bijection(B3, B3, families=fams[1:]).ok
    assert not omega.check_cone_bijection(B3, B3, families=fams + fams[:1]).ok


def test_free_map_agrees_with_edges():
    for f in omega.hom_trees(C2, B3):
        m = omega.free_map(f)
        assert m.colours == f.edges


def swap_c2():
    return omega.SigmaOmega.from_dict({C2: (0, 2, 1)})


def test_apply_f_sigma():
    f = omega.colour_map(C2, 1)
    assert omega.apply_F_sigma(omega.SigmaOmega(), f) == f
    assert omega.apply_F_sigma(swap_c2(), f) == omega.colour_map(C2, 2)
    for g in omega.hom_trees(C2, B3):
        out = omega.apply_F_sigma(swap_c2(), g)
        assert out.edges == tuple(g.edges[i] for i in (0, 2, 1))


def test_sigma_group_laws():
    s = swap_c2()
    assert (s * s).is_identity() and (s * s.inverse()).is_identity()
    with pytest.raises(ValueError):
        omega.SigmaOmega.from_dict({C2: (0, 1, 1)})


@pytest.fixture(scope="module")
def tiny():
    return omega.omega_skeleton([ETA, corolla(0), corolla(1), C2, B3])


def test_sigma_retraction_and_functoriality(tiny):
    for s in omega.all_sigmas(tiny.objects):
        F = omega.F_sigma_functor(tiny, s)
        assert validate_functor(F) == []
        assert omega.sigma_of_functor(F) == s
    assert omega.sigma_of_functor(omega.F_sigma_functor(tiny, omega.SigmaOmega())).is_identity()


def test_sigma_extraction_rejects_inconsistent_colours(tiny):
    F = omega.F_sigma_functor(tiny, omega.SigmaOmega())
    g = tiny.global_tables()
    ie, ic = tiny.index[ETA], tiny.index[C2]
    mor = F.mor.copy()
    blk = g.block(ie, ic)
    mor[blk.start + 1] = mor[blk.start]        # two leaf maps now collide
    with pytest.raises(omega.SigmaExtractionError):
        omega.sigma_of_functor(FunctorData(tiny, F.obj, mor))


def test_nat_transfs_unique(tiny):
    fs = [omega.F_sigma_functor(tiny, s) for s in omega.all_sigmas(tiny.objects)]
    assert len(fs) == 4
    for F, G in itertools.product(fs, repeat=2):
        assert len(omega.natural_transformations(F, G)) == 1


def test_planar_mirror(planar_sk):
    M = omega.mirror_functor(planar_sk)
    I = FunctorData(planar_sk, np.arange(len(planar_sk)), np.arange(planar_sk.global_tables().n_mor))
    assert validate_functor(M) == []
    sig = omega.planar_signature(M)
    assert all(sig.perms[n] == tuple(range(n, 0, -1)) for n in range(1, 6))
    assert sig.tilde == "compose-with-M"
    ident = omega.planar_signature(I)
    assert all(p == tuple(range(1, n + 1)) for n, p in ident.perms.items()) and ident.tilde == "keep"
    assert enumerate_nat_transfs(I, M) == [] and enumerate_nat_transfs(M, I) == []


def test_default_skeleta(sym_sk, planar_sk):
    assert len(sym_sk) == 22
    assert len(planar_sk) == 39
    for lit in ("(((η η) η) η)", "(η (η (η η)))", "(η η η)", "(η η η η η)"):
        assert as_tree(lit) in planar_sk.index
