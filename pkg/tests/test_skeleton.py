import itertools

import numpy as np
import pytest

from treetheta import omega, theta
from treetheta.skeleton import (FunctorData, check_naturality, compose_functors, enumerate_nat_transfs,
                                functor_from_json, identity_functor, validate_functor)
from treetheta.trees import ETA, as_tree, corolla


@pytest.fixture(scope="module")
def small():
    return omega.omega_skeleton([ETA, corolla(0), corolla(1), corolla(2), as_tree("((η η) η)"), as_tree("((η))")])


def test_comp_tables_agree_with_compose(small):
    n = len(small)
    for a, b, c in itertools.product(range(n), repeat=3):
        tab = small.comp(a, b, c)
        F, G, H = small.hom(a, b), small.hom(b, c), small.hom(a, c)
        for i, j in itertools.product(range(len(F)), range(len(G))):
            assert H[tab[i, j]] == omega.compose(G[j], F[i])


def test_identity_valid(small):
    assert validate_functor(identity_functor(small)) == []


def test_rewired_composite_reported(small):
    F = identity_functor(small)
    g = small.global_tables()
    a, c = small.index[ETA], small.index[corolla(2)]
    blk = g.block(a, c)
    mor = F.mor.copy()
    mor[blk.start], mor[blk.start + 1] = mor[blk.start + 1], mor[blk.start]
    bad = validate_functor(FunctorData(small, F.obj, mor))
    assert bad and all(v.law == "composition" for v in bad)
    assert any(v.witness[0][:2] == (a, c) or v.witness[1][:2] == (a, c) or v.witness[0][0] == a for v in bad)


def test_typing_and_totality_reported(small):
    F = identity_functor(small)
    obj = F.obj.copy()
    obj[0], obj[1] = obj[1], obj[0]
    assert validate_functor(FunctorData(small, obj, F.mor))[0].law == "typing"
    assert validate_functor(FunctorData(small, F.obj, F.mor[:-1]))[0].law == "totality"


def test_nat_transfs_identity(small):
    I = identity_functor(small)
    nts = enumerate_nat_transfs(I, I)
    assert len(nts) == 1
    assert all(c == small.identity_index(a) for a, c in enumerate(nts[0].components))
    assert check_naturality(I, I, nts[0].components)


def test_compose_and_json(theta2, tmp_path):
    F = theta.op_delta_functor(theta2, (1, 0))
    assert compose_functors(F, F) == identity_functor(theta2)
    G = functor_from_json(F.to_json(), theta2)
    assert G == F
    other = theta.theta_skeleton(2, 2)
    with pytest.raises(ValueError, match="different skeleton"):
        functor_from_json(F.to_json(), other)


def test_content_hash_stable():
    a = theta.theta_skeleton(2, 2)
    b = theta.theta_skeleton(2, 2, vectorized=False)
    assert a.content_hash() == b.content_hash()
    assert a.manifest() == [theta.table_literal(s) for s in a.objects]
    for x, y, z in itertools.product(range(len(a)), repeat=3):
        assert np.array_equal(a.comp(x, y, z), b.comp(x, y, z))
