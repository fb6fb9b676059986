import json

import numpy as np
import pytest

from treetheta import finop, omega, segal, theta
from treetheta.finop import corpus, free_operad
from treetheta.trees import ETA, PLANAR, SYMMETRIC, as_tree, corolla

CORPUS = corpus()
B3 = as_tree("((η η) η)")


@pytest.fixture(scope="module")
def chain_nerve(theta2):
    return segal.category_nerve(finop.underlying_category(CORPUS["chain"]), theta2)


def test_chain_nerve_at_pair(chain_nerve, theta2):
    t = table = theta.table_leveltree(theta.parse_table("1 1 / 0"))
    r = segal.segal_check(chain_nerve, t)
    # composable pairs in the free category on a -> b -> c
    assert r.ok and r.n_values == r.n_limit == 10
    assert chain_nerve.check_functoriality() == []


def test_deleted_pair_fails(chain_nerve, theta2):
    t = theta.table_leveltree(theta.parse_table("1 1 / 0"))
    a = theta2.index[t]
    y = next(k for k, (objs, arrs) in enumerate(chain_nerve.values[a]) if arrs == ("f", "g"))
    x = segal.delete_element(chain_nerve, a, y)
    assert x.check_functoriality() == []
    r = segal.segal_check(x, t)
    assert not r.ok and r.injective and r.missing is not None


def test_free_b3_nerve_at_b3(sym_sk):
    x = segal.nerve_presheaf(free_operad(B3), sym_sk)
    r = segal.segal_check(x, B3)
    assert r.ok and r.n_values == r.n_limit


def test_nerve_values():
    sk = omega.omega_skeleton([ETA, corolla(2)])
    x = segal.nerve_presheaf(free_operad(corolla(2)), sk)
    assert x.sizes() == [3, 2]


def test_eta_nerve_values(sym_sk):
    x = segal.nerve_presheaf(finop.eta_operad(), sym_sk)
    for t, v in zip(sym_sk.objects, x.values):
        linear = all(t.arity(u) == 1 for u in t.vertices)
        assert len(v) == (1 if linear else 0)


@pytest.mark.parametrize("key", sorted(CORPUS))
def test_corpus_nerves_segal(key, sym_sk, planar_sk):
    p = CORPUS[key]
    sk = planar_sk if p.flavour == PLANAR else sym_sk
    x = segal.nerve_presheaf(p, sk)
    assert x.check_functoriality() == []
    assert all(r.ok for r in segal.segal_all(x))


def test_mutants_fail(sym_sk):
    muts = segal.engineered_mutants(sym_sk)
    assert len(muts) >= 3
    for name, x in muts:
        assert x.check_functoriality() == [], name
        assert any(not r.ok for r in segal.segal_all(x)), name


def test_corollas_and_disks_always_pass(sym_sk, theta2):
    for name, x in segal.engineered_mutants(sym_sk):
        for n in range(3):
            assert segal.segal_check(x, corolla(n)).ok
    x = segal.category_nerve(finop.underlying_category(CORPUS["j"]), theta2)
    y = segal.duplicate_element(x, 4, 0)
    for k in range(3):
        assert segal.segal_check(y, theta.disk(k)).ok


def test_missing_spine_constituents():
    sk = omega.omega_skeleton([ETA, B3])
    x = segal.representable(sk, B3)
    with pytest.raises(segal.SpineError):
        segal.segal_check(x, B3)


def test_subpresheaf_must_be_closed(sym_sk):
    x = segal.representable(sym_sk, corolla(2))
    keep = [set() for _ in sym_sk.objects]
    keep[sym_sk.index[corolla(2)]] = {0}
    with pytest.raises(ValueError, match="closed"):
        segal.subpresheaf(x, keep)


def test_normality_examples(sym_sk):
    verdicts = [(segal.normality_check(m).normal, e) for _, m, e in segal.normality_examples(sym_sk)]
    assert verdicts == [(True, True), (False, False)]
    rep = segal.normality_check(segal.normality_examples(sym_sk)[1][1])
    assert rep.fixed_point[0] == "(η η)"


def test_planar_monos_normal(planar_sk):
    x = segal.nerve_presheaf(CORPUS["planar_binary"], planar_sk)
    for a in range(len(planar_sk)):
        for y in range(len(x.values[a])):
            m = segal.generated_subpresheaf(x, {a: [y]})
            assert m.check() == []
            assert segal.normality_check(m).normal


def test_presheaf_json_round_trip(sym_sk, tmp_path):
    x = segal.nerve_presheaf(CORPUS["j"], sym_sk)
    data = json.loads(json.dumps(segal.presheaf_to_json(x)))
    y = segal.presheaf_from_json(data)
    assert y.sizes() == x.sizes()
    for key, arr in x.action.items():
        assert np.array_equal(arr, y.action[key])
    k = next(k for k, e in enumerate(data["action"])
             if e["source"] == e["target"] and len(data["values"][e["target"]]) > 1)
    data["action"][k]["table"] = [[0 for _ in row] for row in data["action"][k]["table"]]
    with pytest.raises(ValueError):
        segal.presheaf_from_json(data)


def test_presheaf_loader_requires_spines():
    sk = omega.omega_skeleton([ETA, B3])
    data = segal.presheaf_to_json(segal.representable(sk, ETA))
    with pytest.raises(segal.SpineError):
        segal.presheaf_from_json(data)
