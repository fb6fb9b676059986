"""The categories Ω, planar Ω and Ω₀ on explicit trees.

A morphism S -> T is a map of free operads; it is determined by its edge
function, so ``OmegaMor`` stores that and recovers the image region of each
vertex on demand.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .finop import OperadMap, free_operad, operad_maps, unit_name, op_name
from .skeleton import FunctorData, Skeleton, enumerate_nat_transfs, functor_from_maps
from .trees import (ETA, PLANAR, SYMMETRIC, PlanarTree, SubtreeOp, as_tree, check_flavour, corolla,
                    invert_perm, left_comb, mirror_edge_map, mirror_tree, planar_trees, render,
                    rooted_regions, symmetric_trees, tree_automorphisms)

ALL = "all"
OMEGA0 = "omega0"


@dataclass(frozen=True)
class OmegaMor:
    source: PlanarTree
    target: PlanarTree
    edges: tuple

    def __repr__(self):
        return f"OmegaMor({self.source.literal} -> {self.target.literal}, {list(self.edges)})"

    def __call__(self, e: int) -> int:
        return self.edges[e]

    def vertex_image(self, v: int) -> SubtreeOp:
        """The region of the target assigned to the vertex ``v`` of the source."""
        root = self.edges[v]
        leaves = tuple(self.edges[e] for e in self.source.inputs_of(v))
        if leaves == (root,):
            return SubtreeOp(root, leaves, frozenset())
        verts = _region_vertices(self.target, root, frozenset(leaves))
        return SubtreeOp(root, leaves, verts)

    def is_identity(self) -> bool:
        return self.source == self.target and self.edges == tuple(range(self.source.n_edges))

    def to_text(self) -> str:
        em = ", ".join(f"{e}: {x}" for e, x in enumerate(self.edges))
        vs = []
        for v in self.source.vertices:
            r = self.vertex_image(v)
            region = "{" + ",".join(str(x) for x in sorted(r.vertices)) + "}"
            vs.append(f"{v}: {region} + ({' '.join(str(x) for x in r.leaves)})")
        return f"edge-map: {{{em}}}; vertices: {{{', '.join(vs)}}}"


def _region_vertices(t: PlanarTree, root: int, leaves: frozenset) -> frozenset:
    for ls, verts in _regions(t, root):
        if frozenset(ls) == leaves and verts:
            return verts
    raise ValueError("no region with the requested boundary")


@lru_cache(maxsize=None)
def _regions(t: PlanarTree, root: int) -> tuple:
    return tuple(rooted_regions(t, root))


def identity(t: PlanarTree) -> OmegaMor:
    return OmegaMor(t, t, tuple(range(t.n_edges)))


def colour_map(t: PlanarTree, e: int) -> OmegaMor:
    """The morphism η -> T picking the edge ``e``."""
    return OmegaMor(ETA, t, (e,))


def compose(g: OmegaMor, f: OmegaMor) -> OmegaMor:
    if f.target != g.source:
        raise ValueError("morphisms are not composable")
    return OmegaMor(f.source, g.target, tuple(g.edges[x] for x in f.edges))


def hom_trees(s, t, flavour: str = SYMMETRIC, restrict: str = ALL) -> list[OmegaMor]:
    """Every morphism s -> t, by backtracking from the root edge upwards."""
    s, t = as_tree(s), as_tree(t)
    check_flavour(flavour)
    if restrict not in (ALL, OMEGA0):
        raise ValueError(f"unknown restriction {restrict!r}")
    out = []
    f = [None] * s.n_edges
    order = s.vertices

    def go(k):
        if k == len(order):
            out.append(OmegaMor(s, t, tuple(f)))
            return
        v = order[k]
        ins = s.inputs_of(v)
        root = f[v]
        for leaves, verts in _regions(t, root):
            if len(leaves) != len(ins):
                continue
            if restrict == OMEGA0 and len(verts) != 1:
                continue
            if flavour == PLANAR or not verts:
                assignments = [leaves]
            else:
                assignments = itertools.permutations(leaves)
            for image in assignments:
                for e, x in zip(ins, image):
                    f[e] = x
                go(k + 1)
        for e in ins:
            f[e] = None

    for r in t.edges:
        f[0] = r
        go(0)
    out.sort(key=lambda m: m.edges)
    return out


def free_map(f: OmegaMor, flavour: str = SYMMETRIC) -> OperadMap:
    """The map of free operads induced by ``f``."""
    p, q = free_operad(f.source, flavour), free_operad(f.target, flavour)
    ops = []
    for name in p.ops:
        r = p.regions[name]
        leaves = tuple(f.edges[x] for x in r.leaves)
        ops.append(q.ops_with_signature(leaves, f.edges[r.root])[0])
    return OperadMap(tuple(f.edges), tuple(ops), p, q)


# -- Cor/T and the spine decomposition ------------------------------------------------

@dataclass(frozen=True)
class CorSlice:
    """Objects of Cor/T: colours η -> T and generating operations C_n -> T.

    ``arrows`` lists ``(e, v, j)``: the colour ``e`` is the edge ``j`` of the
    corolla at ``v`` (``j = 0`` is the root).
    """

    tree: PlanarTree
    colours: tuple
    operations: tuple
    arrows: tuple

    @property
    def n_objects(self) -> int:
        return len(self.colours) + len(self.operations)


def corolla_inclusion(t: PlanarTree, v: int) -> OmegaMor:
    ins = t.inputs_of(v)
    return OmegaMor(corolla(len(ins)), t, (v,) + ins)


def cor_slice(t) -> CorSlice:
    t = as_tree(t)
    colours = tuple(colour_map(t, e) for e in t.edges)
    ops = tuple(corolla_inclusion(t, v) for v in t.vertices)
    arrows = []
    for v, m in zip(t.vertices, ops):
        for j, e in enumerate(m.edges):
            arrows.append((e, v, j))
    return CorSlice(t, colours, ops, tuple(arrows))


def cone_families(t, u, flavour: str = SYMMETRIC) -> list[tuple]:
    """Compatible families over Cor/T with values in U.

    A family is ``(colour images, corolla maps)``; corolla maps come from the
    operad-map enumeration, independently of ``hom_trees``.
    """
    t, u = as_tree(t), as_tree(u)
    per_vertex = []
    for v in t.vertices:
        n = t.arity(v)
        maps = operad_maps(free_operad(corolla(n), flavour), free_operad(u, flavour))
        per_vertex.append([m.colours for m in maps])
    out = []
    col = [None] * t.n_edges

    def go(k, chosen):
        if k == len(per_vertex):
            if t.is_eta:
                for e in u.edges:
                    out.append(((e,), ()))
            else:
                out.append((tuple(col), tuple(chosen)))
            return
        v = t.vertices[k]
        edges = (v,) + t.inputs_of(v)
        for cm in per_vertex[k]:
            saved = [col[e] for e in edges]
            if all(col[e] is None or col[e] == x for e, x in zip(edges, cm)):
                for e, x in zip(edges, cm):
                    col[e] = x
                go(k + 1, chosen + [cm])
            for e, x in zip(edges, saved):
                col[e] = x

    go(0, [])
    return out


def restrict_to_slice(f: OmegaMor) -> tuple:
    """Image of ``f`` under the canonical map to compatible families."""
    sl = cor_slice(f.source)
    cols = tuple(compose(f, c).edges[0] for c in sl.colours)
    ops = tuple(compose(f, m).edges for m in sl.operations)
    return cols, ops


@dataclass
class ConeReport:
    tree: str
    target: str
    flavour: str
    n_morphisms: int
    n_families: int
    matching: list = field(default_factory=list)
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems and self.n_morphisms == self.n_families


def check_cone_bijection(t, u, flavour: str = SYMMETRIC, homs=None, families=None) -> ConeReport:
    """Restriction along Cor/T is a bijection from Ω(T, U) to compatible families."""
    t, u = as_tree(t), as_tree(u)
    homs = hom_trees(t, u, flavour) if homs is None else homs
    families = cone_families(t, u, flavour) if families is None else families
    rep = ConeReport(t.literal, u.literal, flavour, len(homs), len(families))
    index = {}
    for k, fam in enumerate(families):
        if fam in index:
            rep.problems.append(("duplicate family", k))
        index[fam] = k
    hit = set()
    for i, f in enumerate(homs):
        fam = restrict_to_slice(f)
        k = index.get(fam)
        if k is None:
            rep.problems.append(("not a listed family", i))
        elif k in hit:
            rep.problems.append(("not injective", i))
        else:
            hit.add(k)
            rep.matching.append((i, k))
    for k in range(len(families)):
        if k not in hit:
            rep.problems.append(("family without preimage", k))
    return rep


# -- skeleta ------------------------------------------------------------------------------

def default_trees(flavour: str = SYMMETRIC, max_vertices: int = 3, max_arity: int = 2,
                  max_edges: int | None = 5) -> list[PlanarTree]:
    """Default skeleton objects; the planar one also holds B₄, M(B₄) and C₃..C₅."""
    if flavour == SYMMETRIC:
        return symmetric_trees(max_vertices, max_arity, max_edges)
    trees = planar_trees(max_vertices, max_arity, max_edges)
    for extra in (left_comb(4), mirror_tree(left_comb(4)), corolla(3), corolla(4), corolla(5)):
        if extra not in trees:
            trees.append(extra)
    return trees


def omega_skeleton(trees, flavour: str = SYMMETRIC, restrict: str = ALL) -> Skeleton:
    trees = [as_tree(t) for t in trees]
    return Skeleton(
        trees,
        hom=lambda a, b: hom_trees(a, b, flavour, restrict),
        compose=compose,
        identity=identity,
        label=lambda t: t.literal,
        kind=f"omega-{flavour}" + ("" if restrict == ALL else f"-{restrict}"),
    )


# -- Σ_Ω ----------------------------------------------------------------------------------

@dataclass(frozen=True)
class SigmaOmega:
    """Finitely supported family T ↦ σ_T ∈ Aut(T); identity off the support."""

    support: tuple = ()   # sorted ((literal, edge permutation), ...)

    @classmethod
    def from_dict(cls, comps: dict) -> "SigmaOmega":
        items = []
        for t, perm in comps.items():
            t = as_tree(t)
            perm = tuple(perm)
            if perm != tuple(range(t.n_edges)):
                if perm not in tree_automorphisms(t):
                    raise ValueError(f"{perm} is not an automorphism of {t.literal}")
                items.append((t.literal, perm))
        return cls(tuple(sorted(items)))

    def at(self, t: PlanarTree) -> tuple:
        for lit, perm in self.support:
            if lit == t.literal:
                return perm
        return tuple(range(t.n_edges))

    def is_identity(self) -> bool:
        return not self.support

    def __mul__(self, other: "SigmaOmega") -> "SigmaOmega":
        lits = {lit for lit, _ in self.support} | {lit for lit, _ in other.support}
        comps = {}
        for lit in lits:
            t = as_tree(lit)
            a, b = self.at(t), other.at(t)
            comps[t] = tuple(a[x] for x in b)
        return SigmaOmega.from_dict(comps)

    def inverse(self) -> "SigmaOmega":
        return SigmaOmega(tuple((lit, invert_perm(p)) for lit, p in self.support))

    def describe(self) -> str:
        if not self.support:
            return "identity"
        return ", ".join(f"{lit}: {list(p)}" for lit, p in self.support)


def all_sigmas(trees) -> list[SigmaOmega]:
    """Every σ supported on the given trees."""
    groups = [(as_tree(t), tree_automorphisms(as_tree(t))) for t in trees]
    groups = [(t, g) for t, g in groups if len(g) > 1]
    out = []
    for choice in itertools.product(*(g for _, g in groups)):
        out.append(SigmaOmega.from_dict({t: p for (t, _), p in zip(groups, choice)}))
    return out


def apply_F_sigma(sigma: SigmaOmega, f: OmegaMor) -> OmegaMor:
    """F_σ(f) = σ_b f σ_a⁻¹."""
    sa_inv = invert_perm(sigma.at(f.source))
    sb = sigma.at(f.target)
    return OmegaMor(f.source, f.target, tuple(sb[f.edges[sa_inv[e]]] for e in range(f.source.n_edges)))


def F_sigma_functor(sk: Skeleton, sigma: SigmaOmega) -> FunctorData:
    return functor_from_maps(sk, lambda t: t, lambda f: apply_F_sigma(sigma, f), name=f"F_σ[{sigma.describe()}]")


def mirror_morphism(f: OmegaMor) -> OmegaMor:
    ms, mt = mirror_edge_map(f.source), mirror_edge_map(f.target)
    out = [0] * f.source.n_edges
    for e in range(f.source.n_edges):
        out[ms[e]] = mt[f.edges[e]]
    return OmegaMor(mirror_tree(f.source), mirror_tree(f.target), tuple(out))


def mirror_functor(sk: Skeleton) -> FunctorData:
    return functor_from_maps(sk, mirror_tree, mirror_morphism, name="mirror")


class SigmaExtractionError(ValueError):
    pass


def _colour_images(F: FunctorData, t_index: int) -> tuple:
    sk = F.skeleton
    t = sk.objects[t_index]
    if ETA not in sk.index:
        raise SigmaExtractionError("the skeleton does not contain η")
    ie = sk.index[ETA]
    if F.obj[ie] != ie or F.obj[t_index] != t_index:
        raise SigmaExtractionError("F is not the identity on η and " + t.literal)
    return tuple(F.image_of(ie, t_index, colour_map(t, e)).edges[0] for e in t.edges)


def sigma_of_functor(F: FunctorData) -> SigmaOmega:
    """The unique σ with σ_T ∘ c = F(c) for every colour c of every T."""
    comps = {}
    for k, t in enumerate(F.skeleton.objects):
        s = _colour_images(F, k)
        if s not in tree_automorphisms(t):
            raise SigmaExtractionError(f"colour action at {t.literal} is {list(s)}, not an automorphism")
        comps[t] = s
    return SigmaOmega.from_dict(comps)


def natural_transformations(F: FunctorData, G: FunctorData):
    return enumerate_nat_transfs(F, G)


@dataclass
class PlanarSignature:
    perms: dict           # arity -> permutation in 1-based one-line notation
    tilde: str            # "keep" or "compose-with-M"
    violations: list = field(default_factory=list)


def planar_signature(F: FunctorData) -> PlanarSignature:
    """σ(F)_n from the action on the leaf maps η -> C_n, for each corolla present."""
    sk = F.skeleton
    if ETA not in sk.index:
        raise SigmaExtractionError("the skeleton does not contain η")
    ie = sk.index[ETA]
    perms, violations = {}, []
    for k, t in enumerate(sk.objects):
        if t.is_eta or t != corolla(len(t.inputs)) or len(t.inputs) == 0:
            continue
        n = len(t.inputs)
        if F.obj[k] != k or F.obj[ie] != ie:
            violations.append(("corolla not preserved", t.literal))
            continue
        root = F.image_of(ie, k, colour_map(t, 0)).edges[0]
        if root != 0:
            violations.append(("root map not preserved", t.literal))
            continue
        perms[n] = tuple(F.image_of(ie, k, colour_map(t, i)).edges[0] for i in range(1, n + 1))
    tilde = "compose-with-M" if perms.get(2) == (2, 1) else "keep"
    return PlanarSignature(perms, tilde, violations)


def reference_trees_text(trees) -> str:
    return "\n".join(render(t) for t in trees)
