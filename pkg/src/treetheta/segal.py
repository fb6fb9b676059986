"""Finite presheaves on tree and table skeleta, Segal conditions, nerves and
normality of monomorphisms."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import omega, theta
from .finop import FinCategory, FinOperad, OperadMap, compose_maps, operad_maps, free_operad
from .skeleton import Skeleton
from .trees import ETA, PLANAR, SYMMETRIC, as_tree, corolla


class SpineError(ValueError):
    pass


def skeleton_family(sk: Skeleton) -> str:
    return "tables" if sk.kind.startswith("theta") else "trees"


class FinitePresheaf:
    """Contravariant functor from a skeleton to finite sets.

    ``values[a]`` lists the elements at object ``a``; ``action[(a, b)]`` is
    an array of shape ``(|hom(a,b)|, |X(b)|)`` whose entry ``[f, y]`` is the
    index of ``X(f)(y)`` in ``values[a]``.
    """

    def __init__(self, sk: Skeleton, values: Sequence[list], action: dict, name: str = ""):
        self.skeleton = sk
        self.values = [list(v) for v in values]
        self.action = action
        self.name = name

    def __repr__(self):
        return f"<FinitePresheaf {self.name} sizes={self.sizes()}>"

    def sizes(self) -> list[int]:
        return [len(v) for v in self.values]

    def act(self, a: int, b: int, f_local: int, y: int) -> int:
        return int(self.action[(a, b)][f_local, y])

    def act_mor(self, f, y: int) -> int:
        sk = self.skeleton
        a, b = sk.index[f.source], sk.index[f.target]
        return self.act(a, b, sk.hom_index(a, b, f), y)

    def check_functoriality(self, limit: int = 10) -> list[tuple]:
        sk = self.skeleton
        n = len(sk)
        out = []
        for a in range(n):
            ida = sk.identity_index(a)
            if not np.array_equal(self.action[(a, a)][ida], np.arange(len(self.values[a]))):
                out.append(("identity", a))
        for a in range(n):
            for b in range(n):
                if not sk.hom_size(a, b):
                    continue
                ab = self.action[(a, b)]
                for c in range(n):
                    if not sk.hom_size(b, c) or not len(self.values[c]):
                        continue
                    tab = sk.comp(a, b, c).astype(np.int64)
                    lhs = self.action[(a, c)][tab]               # X(g∘f)(y): (i, j, y)
                    rhs = ab[:, self.action[(b, c)]]             # X(f)(X(g)(y)): (i, j, y)
                    bad = np.argwhere(lhs != rhs)
                    for i, j, y in bad[:max(0, limit - len(out))]:
                        out.append(("composition", (a, b, int(i)), (b, c, int(j)), int(y)))
                    if len(out) >= limit:
                        return out
        return out


def presheaf_from_function(sk: Skeleton, values: Sequence[list], act: Callable, name: str = "") -> FinitePresheaf:
    """``act(f, y)`` returns the element ``X(f)(y)`` for f: a -> b and y in X(b)."""
    index = [{x: k for k, x in enumerate(v)} for v in values]
    action = {}
    n = len(sk)
    for a in range(n):
        for b in range(n):
            homs = sk.hom(a, b)
            arr = np.zeros((len(homs), len(values[b])), dtype=np.int64)
            for i, f in enumerate(homs):
                for y, el in enumerate(values[b]):
                    arr[i, y] = index[a][act(f, el)]
            action[(a, b)] = arr
    return FinitePresheaf(sk, values, action, name)


# -- standard presheaves ---------------------------------------------------------------

def representable(sk: Skeleton, t) -> FinitePresheaf:
    c = sk.index[t]
    n = len(sk)
    values = [sk.hom(a, c) for a in range(n)]
    action = {(a, b): sk.comp(a, b, c).astype(np.int64) for a in range(n) for b in range(n)}
    return FinitePresheaf(sk, values, action, name=f"Hom(-, {sk.label(t)})")


def nerve_presheaf(p: FinOperad, sk: Skeleton) -> FinitePresheaf:
    """T ↦ Oper(free(T), P), acting by precomposition."""
    flavour = PLANAR if sk.kind == "omega-planar" else SYMMETRIC
    if p.flavour != flavour:
        raise ValueError("operad and skeleton flavours differ")
    values = [operad_maps(free_operad(t, flavour), p) for t in sk.objects]
    index = [{(x.colours, x.ops): k for k, x in enumerate(v)} for v in values]
    action = {}
    n = len(sk)
    for a in range(n):
        for b in range(n):
            homs = sk.hom(a, b)
            arr = np.zeros((len(homs), len(values[b])), dtype=np.int64)
            for i, f in enumerate(homs):
                fm = omega.free_map(f, flavour)
                for y, x in enumerate(values[b]):
                    r = compose_maps(x, fm)
                    arr[i, y] = index[a][(r.colours, r.ops)]
            action[(a, b)] = arr
    return FinitePresheaf(sk, values, action, name=f"N({p.name})")


def category_nerve(cat: FinCategory, sk: Skeleton) -> FinitePresheaf:
    """Nerve of a category on a Θ skeleton: only the top-level simplicial shape matters."""
    if skeleton_family(sk) != "tables":
        raise ValueError("category nerves live on table skeleta")

    def chains(m):
        if m == 0:
            return [((o,), ()) for o in cat.objects]
        out = []
        for objs, arrs in chains(m - 1):
            for f, (s, t) in cat.arrows.items():
                if s == objs[-1]:
                    out.append((objs + (t,), arrs + (f,)))
        return out

    values = [chains(len(t)) for t in sk.objects]

    def act(f, y):
        objs, arrs = y
        phi = f.phi
        new_objs = tuple(objs[x] for x in phi)
        new_arrs = []
        for i in range(1, len(phi)):
            a = cat.identities[objs[phi[i - 1]]]
            for j in range(phi[i - 1] + 1, phi[i] + 1):
                a = cat.comp[(arrs[j - 1], a)]
            new_arrs.append(a)
        return new_objs, tuple(new_arrs)

    return presheaf_from_function(sk, values, act, name=f"N({cat.name})")


# -- sub-presheaves and monomorphisms ------------------------------------------------------

@dataclass
class PresheafMono:
    source: FinitePresheaf
    target: FinitePresheaf
    maps: list          # per object: array of indices into target values

    def check(self) -> list[tuple]:
        out = []
        sk = self.target.skeleton
        n = len(sk)
        for a in range(n):
            if len(set(self.maps[a].tolist())) != len(self.maps[a]):
                out.append(("not injective", a))
        for a in range(n):
            for b in range(n):
                if not sk.hom_size(a, b) or not len(self.maps[b]):
                    continue
                lhs = self.maps[a][self.source.action[(a, b)]]
                rhs = self.target.action[(a, b)][:, self.maps[b]]
                if not np.array_equal(lhs, rhs):
                    out.append(("not natural", a, b))
        return out


def subpresheaf(x: FinitePresheaf, keep: Sequence[set], name: str = "") -> PresheafMono:
    """The sub-presheaf on the given element sets (must be closed under the action)."""
    sk = x.skeleton
    n = len(sk)
    keep = [sorted(k) for k in keep]
    pos = [{y: i for i, y in enumerate(k)} for k in keep]
    values = [[x.values[a][y] for y in keep[a]] for a in range(n)]
    action = {}
    for a in range(n):
        for b in range(n):
            sub = x.action[(a, b)][:, keep[b]] if keep[b] else np.zeros((sk.hom_size(a, b), 0), dtype=np.int64)
            try:
                action[(a, b)] = np.vectorize(lambda v: pos[a][v], otypes=[np.int64])(sub) if sub.size else \
                    np.zeros(sub.shape, dtype=np.int64)
            except KeyError:
                raise ValueError("element set is not closed under the action") from None
    s = FinitePresheaf(sk, values, action, name or f"sub({x.name})")
    return PresheafMono(s, x, [np.array(k, dtype=np.int64) for k in keep])


def generated(x: FinitePresheaf, gens: dict) -> list[set]:
    """Element sets of the sub-presheaf generated by ``gens`` (object -> indices)."""
    sk = x.skeleton
    n = len(sk)
    keep = [set() for _ in range(n)]
    for b, ys in gens.items():
        for y in ys:
            for a in range(n):
                if sk.hom_size(a, b):
                    keep[a].update(int(v) for v in x.action[(a, b)][:, y])
    return keep


def generated_subpresheaf(x: FinitePresheaf, gens: dict, name: str = "") -> PresheafMono:
    return subpresheaf(x, generated(x, gens), name)


def colours_only(x: FinitePresheaf) -> PresheafMono:
    """The sub-presheaf generated by the elements at η (or at the point)."""
    sk = x.skeleton
    base = sk.index[ETA] if skeleton_family(sk) == "trees" else sk.index[theta.POINT]
    return generated_subpresheaf(x, {base: range(len(x.values[base]))}, name=f"colours({x.name})")


def spine_subpresheaf(sk: Skeleton, t) -> PresheafMono:
    """Maps into T that factor through one of its spine inclusions."""
    rep = representable(sk, t)
    c = sk.index[t]
    gens: dict = {}
    for f in spine_inclusions(sk, t):
        a = sk.index[f.source]
        gens.setdefault(a, []).append(sk.hom_index(a, c, f))
    mono = generated_subpresheaf(rep, gens, name=f"spine({sk.label(t)})")
    return mono


# -- mutants ----------------------------------------------------------------------------

def _upward_closure(x: FinitePresheaf, a: int, y: int) -> list[set]:
    """Everything that restricts to ``y`` along some morphism."""
    sk = x.skeleton
    n = len(sk)
    if not 0 <= y < len(x.values[a]):
        raise IndexError(f"no element {y} at object {a}")
    removed = [set() for _ in range(n)]
    removed[a].add(y)
    changed = True
    while changed:
        changed = False
        for b in range(n):
            for z in range(len(x.values[b])):
                if z in removed[b]:
                    continue
                for c in range(n):
                    if removed[c] and sk.hom_size(c, b) and \
                            any(int(v) in removed[c] for v in x.action[(c, b)][:, z]):
                        removed[b].add(z)
                        changed = True
                        break
    return removed


def delete_element(x: FinitePresheaf, a: int, y: int) -> FinitePresheaf:
    """Remove ``y`` from X(a) together with everything restricting to it."""
    removed = _upward_closure(x, a, y)
    keep = [set(range(len(v))) - r for v, r in zip(x.values, removed)]
    return subpresheaf(x, keep, name=f"{x.name} minus one element").source


def duplicate_element(x: FinitePresheaf, a: int, y: int) -> FinitePresheaf:
    """Glue two copies of X along the complement of the upward closure of ``y``."""
    sk = x.skeleton
    n = len(sk)
    removed = [sorted(r) for r in _upward_closure(x, a, y)]
    twin = [{z: len(x.values[b]) + k for k, z in enumerate(removed[b])} for b in range(n)]
    values = [list(x.values[b]) + [("twin", x.values[b][z]) for z in removed[b]] for b in range(n)]
    action = {}
    for c in range(n):
        for b in range(n):
            arr = x.action[(c, b)]
            if removed[b]:
                extra = arr[:, removed[b]].copy()
                for idx, v in np.ndenumerate(extra):
                    extra[idx] = twin[c].get(int(v), int(v))
                arr = np.concatenate([arr, extra], axis=1)
            action[(c, b)] = arr
    return FinitePresheaf(sk, values, action, name=f"{x.name} with a twin")


def automorphisms(sk: Skeleton, a: int) -> list[int]:
    """Local indices of the invertible endomorphisms of object ``a``."""
    tab = sk.comp(a, a, a)
    ida = sk.identity_index(a)
    return [i for i in range(sk.hom_size(a, a)) if np.any((tab[i, :] == ida) & (tab[:, i] == ida))]


# -- spines and Segal -----------------------------------------------------------------------

def spine_inclusions(sk: Skeleton, t) -> list:
    if skeleton_family(sk) == "trees":
        sl = omega.cor_slice(t)
        return list(sl.colours) + list(sl.operations)
    sp = theta.spine_table(t)
    return list(sp.inclusions)


def check_spine_closure(sk: Skeleton, objects: Sequence | None = None) -> list[str]:
    """Names of spine constituents missing from the skeleton."""
    missing = []
    for t in objects if objects is not None else sk.objects:
        if skeleton_family(sk) == "trees":
            need = [ETA] + [corolla(t.arity(v)) for v in t.vertices]
        else:
            sp = theta.spine_table(t)
            need = [theta.disk(k) for k in sp.table.top + sp.glue]
        for s in need:
            if s not in sk.index:
                missing.append(sk.label(s))
    return sorted(set(missing))


@dataclass
class SegalReport:
    object: str
    n_values: int
    n_limit: int
    injective: bool
    surjective: bool
    collision: tuple | None = None
    missing: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.injective and self.surjective


def _report(label, x_vals, segal_images, limit) -> SegalReport:
    seen: dict = {}
    collision = None
    for k, img in enumerate(segal_images):
        if img in seen and collision is None:
            collision = (seen[img], k)
        seen.setdefault(img, k)
    missing = next((fam for fam in limit if fam not in seen), None)
    return SegalReport(label, len(x_vals), len(limit), collision is None, missing is None, collision, missing)


def segal_check(x: FinitePresheaf, obj) -> SegalReport:
    sk = x.skeleton
    fam = skeleton_family(sk)
    t = as_tree(obj) if fam == "trees" and not isinstance(obj, tuple) else obj
    if fam == "tables" and not isinstance(obj, tuple):
        t = theta.as_object(obj)
    missing = check_spine_closure(sk, [t])
    if missing or t not in sk.index:
        raise SpineError(f"spine constituents missing from the skeleton: {missing or [sk.label(t)]}")
    c = sk.index[t]
    if fam == "trees":
        return _segal_tree(x, t, c)
    return _segal_table(x, t, c)


def _segal_tree(x: FinitePresheaf, t, c) -> SegalReport:
    sk = x.skeleton
    sl = omega.cor_slice(t)
    ie = sk.index[ETA]
    col_idx = [sk.hom_index(ie, c, m) for m in sl.colours]
    op_obj = [sk.index[m.source] for m in sl.operations]
    op_idx = [sk.hom_index(a, c, m) for a, m in zip(op_obj, sl.operations)]
    images = []
    for y in range(len(x.values[c])):
        cols = tuple(int(x.action[(ie, c)][i, y]) for i in col_idx)
        ops = tuple(int(x.action[(a, c)][i, y]) for a, i in zip(op_obj, op_idx))
        images.append((cols, ops))
    # compatible families: corolla values glued along shared colours
    edge_of = [[None] * (1 + t.arity(v)) for v in t.vertices]
    for e, v, j in sl.arrows:
        edge_of[t.vertices.index(v)][j] = e
    leaf_maps = []
    for a, v in zip(op_obj, t.vertices):
        n = t.arity(v)
        cor = corolla(n)
        leaf_maps.append([sk.hom_index(ie, a, omega.colour_map(cor, j)) for j in range(n + 1)])
    limit = []
    if not t.vertices:
        limit = [((z,), ()) for z in range(len(x.values[ie]))]
    else:
        cols = [None] * t.n_edges

        def go(k, chosen):
            if k == len(op_obj):
                limit.append((tuple(cols), tuple(chosen)))
                return
            a = op_obj[k]
            for z in range(len(x.values[a])):
                vals = [int(x.action[(ie, a)][leaf_maps[k][j], z]) for j in range(len(leaf_maps[k]))]
                edges = edge_of[k]
                saved = [cols[e] for e in edges]
                if all(cols[e] is None or cols[e] == w for e, w in zip(edges, vals)):
                    for e, w in zip(edges, vals):
                        cols[e] = w
                    go(k + 1, chosen + [z])
                for e, w in zip(edges, saved):
                    cols[e] = w

        go(0, [])
    return _report(sk.label(t), x.values[c], images, limit)


def _segal_table(x: FinitePresheaf, t, c) -> SegalReport:
    sk = x.skeleton
    sp = theta.spine_table(t)
    disks = [sk.index[f.source] for f in sp.inclusions]
    inc = [sk.hom_index(a, c, f) for a, f in zip(disks, sp.inclusions)]
    images = [tuple(int(x.action[(a, c)][i, y]) for a, i in zip(disks, inc)) for y in range(len(x.values[c]))]
    glue = [sk.index[theta.disk(k)] for k in sp.glue]
    lf = [sk.hom_index(g, disks[i], f) for i, (g, f) in enumerate(zip(glue, sp.left_faces))]
    rf = [sk.hom_index(g, disks[i + 1], f) for i, (g, f) in enumerate(zip(glue, sp.right_faces))]
    limit = []

    def go(i, chosen):
        if i == len(disks):
            limit.append(tuple(chosen))
            return
        for z in range(len(x.values[disks[i]])):
            if i:
                g = glue[i - 1]
                left = x.action[(g, disks[i - 1])][lf[i - 1], chosen[-1]]
                right = x.action[(g, disks[i])][rf[i - 1], z]
                if left != right:
                    continue
            go(i + 1, chosen + [z])

    go(0, [])
    return _report(sk.label(t), x.values[c], images, limit)


def segal_all(x: FinitePresheaf, objects=None) -> list[SegalReport]:
    sk = x.skeleton
    objs = objects if objects is not None else [t for t in sk.objects if not check_spine_closure(sk, [t])]
    return [segal_check(x, t) for t in objs]


# -- normality -----------------------------------------------------------------------------

@dataclass
class NormalityReport:
    normal: bool
    fixed_point: tuple | None = None   # (object label, automorphism index, element index)
    checked: list = field(default_factory=list)


def normality_check(m: PresheafMono) -> NormalityReport:
    """Automorphism groups act freely on the complement of the image."""
    x = m.target
    sk = x.skeleton
    rep = NormalityReport(True)
    for a in range(len(sk)):
        autos = [t for t in automorphisms(sk, a) if t != sk.identity_index(a)]
        image = set(m.maps[a].tolist())
        comp = [y for y in range(len(x.values[a])) if y not in image]
        rep.checked.append((sk.label(sk.objects[a]), len(autos) + 1, len(comp)))
        for t in autos:
            for y in comp:
                if int(x.action[(a, a)][t, y]) == y:
                    rep.normal = False
                    rep.fixed_point = (sk.label(sk.objects[a]), t, y)
                    return rep
    return rep


# -- serialization ------------------------------------------------------------------------------

def skeleton_from_manifest(kind: str, labels: Sequence[str]) -> Skeleton:
    if kind.startswith("omega-"):
        parts = kind.split("-")
        flavour = parts[1]
        restrict = parts[2] if len(parts) > 2 else omega.ALL
        return omega.omega_skeleton([as_tree(s) for s in labels], flavour, restrict)
    if kind.startswith("theta"):
        n = int(kind[len("theta"):])
        return theta.theta_skeleton(n, objects=labels)
    raise ValueError(f"unknown skeleton kind {kind!r}")


def presheaf_to_json(x: FinitePresheaf) -> dict:
    sk = x.skeleton
    n = len(sk)
    return {
        "schema": "treetheta.presheaf/1",
        "skeleton": {"kind": sk.kind, "hash": sk.content_hash(), "objects": sk.manifest()},
        "name": x.name,
        "values": [[repr(v) for v in vals] for vals in x.values],
        "action": [{"source": a, "target": b, "table": x.action[(a, b)].tolist()}
                   for a in range(n) for b in range(n) if sk.hom_size(a, b)],
    }


def presheaf_from_json(data: dict) -> FinitePresheaf:
    if data.get("schema") != "treetheta.presheaf/1":
        raise ValueError("unknown presheaf schema")
    sk = skeleton_from_manifest(data["skeleton"]["kind"], data["skeleton"]["objects"])
    missing = check_spine_closure(sk)
    if missing:
        raise SpineError(f"skeleton is not closed under spines; missing {missing}")
    n = len(sk)
    values = data["values"]
    action = {(a, b): np.zeros((sk.hom_size(a, b), len(values[b])), dtype=np.int64) for a in range(n) for b in range(n)}
    for entry in data["action"]:
        a, b = entry["source"], entry["target"]
        action[(a, b)] = np.array(entry["table"], dtype=np.int64).reshape(sk.hom_size(a, b), len(values[b]))
    x = FinitePresheaf(sk, values, action, data.get("name", ""))
    bad = x.check_functoriality()
    if bad:
        raise ValueError(f"presheaf is not functorial: {bad[:3]}")
    return x


# -- bundled examples -------------------------------------------------------------------------

def _find(x: FinitePresheaf, a: int, pred) -> int:
    for k, v in enumerate(x.values[a]):
        if pred(v):
            return k
    raise LookupError(f"no matching element at object {a}")


def _hits(*names):
    return lambda m: set(names) <= set(m.as_dicts()[1].values())


def engineered_mutants(sk: Skeleton) -> list[tuple[str, FinitePresheaf]]:
    """Presheaves close to nerves that must fail the Segal condition somewhere."""
    from .finop import corpus

    ops = corpus()
    flavour = "planar" if sk.kind == "omega-planar" else "symmetric"
    j = ops["j"] if flavour == "symmetric" else ops["planar_j"]
    nj = nerve_presheaf(j, sk)
    l2 = sk.index[as_tree("((η))")]
    return [
        ("delete a composite", delete_element(nj, l2, _find(nj, l2, _hits("f", "g")))),
        ("duplicate a composite", duplicate_element(nj, l2, _find(nj, l2, _hits("f", "g")))),
        ("spine of a linear tree", spine_subpresheaf(sk, as_tree("((η))")).source),
    ]


def normality_examples(sk: Skeleton) -> list[tuple[str, PresheafMono, bool]]:
    """Colour inclusions with known verdicts.

    Into the representable at C₂ the two binary elements form a free orbit;
    in the quotient identifying them (the nerve of the pseudo-corolla with
    trivial action) the remaining binary element is fixed by the swap.
    """
    from .finop import corpus

    rep = representable(sk, corolla(2))
    quotient = corpus()["pseudo_corolla_trivial"]
    return [
        ("representable at (η η)", colours_only(rep), True),
        (quotient.name, colours_only(nerve_presheaf(quotient, sk)), False),
    ]
