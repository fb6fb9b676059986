"""Operadic trees: parsing, rendering, canonical forms, surgery.

A tree is stored recursively.  ``PlanarTree(None)`` is the bare edge
``η``; ``PlanarTree((t1, ..., tk))`` is a root vertex whose ordered inputs
are the subtrees ``t1 ... tk``.  Every edge gets an integer identifier
from a leftmost depth-first (preorder) walk, so the root edge is ``0``.
A vertex is named by the identifier of its output edge.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

ETA_SYMBOLS = ("η", "e")

SYMMETRIC = "symmetric"
PLANAR = "planar"
FLAVOURS = (SYMMETRIC, PLANAR)


class TreeSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def check_flavour(flavour: str) -> str:
    if flavour not in FLAVOURS:
        raise ValueError(f"unknown flavour {flavour!r}, expected one of {FLAVOURS}")
    return flavour


class PlanarTree:
    __slots__ = ("inputs", "_hash", "_literal", "_layout")

    def __init__(self, inputs: Sequence[PlanarTree] | None = None):
        self.inputs = None if inputs is None else tuple(inputs)
        self._hash = None
        self._literal = None
        self._layout = None

    # -- identity -----------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, PlanarTree):
            return NotImplemented
        return self is other or self.literal == other.literal

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.literal)
        return self._hash

    def __lt__(self, other: PlanarTree) -> bool:
        return sort_key(self) < sort_key(other)

    def __repr__(self):
        return f"PlanarTree({self.literal!r})"

    def __str__(self):
        return self.literal

    @property
    def literal(self) -> str:
        if self._literal is None:
            self._literal = render(self)
        return self._literal

    @property
    def is_eta(self) -> bool:
        return self.inputs is None

    # -- layout -------------------------------------------------------------
    @property
    def layout(self) -> _Layout:
        if self._layout is None:
            self._layout = _Layout.build(self)
        return self._layout

    @property
    def n_edges(self) -> int:
        return len(self.layout.above)

    @property
    def edges(self) -> range:
        return range(self.n_edges)

    @property
    def vertices(self) -> tuple[int, ...]:
        """Vertices, named by their output edge, in preorder."""
        return self.layout.vertices

    @property
    def n_vertices(self) -> int:
        return len(self.layout.vertices)

    @property
    def leaves(self) -> tuple[int, ...]:
        return self.layout.leaves

    def inputs_of(self, vertex: int) -> tuple[int, ...]:
        ins = self.layout.above[vertex]
        if ins is None:
            raise KeyError(f"edge {vertex} carries no vertex")
        return ins

    def below(self, edge: int) -> int | None:
        """Output edge of the vertex that ``edge`` enters, None for the root."""
        return self.layout.below[edge]

    def subtree(self, edge: int) -> PlanarTree:
        return self.layout.subtrees[edge]

    def arity(self, vertex: int) -> int:
        return len(self.inputs_of(vertex))


@dataclass(frozen=True)
class _Layout:
    above: tuple  # edge -> tuple of input edges of the vertex on top, or None
    below: tuple  # edge -> output edge of the vertex it enters, or None
    subtrees: tuple
    vertices: tuple
    leaves: tuple

    @classmethod
    def build(cls, tree: PlanarTree) -> _Layout:
        above, below, subtrees = [], [], []

        def walk(t: PlanarTree, parent):
            e = len(above)
            above.append(None)
            below.append(parent)
            subtrees.append(t)
            if t.inputs is not None:
                above[e] = tuple(walk(c, e) for c in t.inputs)
            return e

        walk(tree, None)
        vertices = tuple(e for e, a in enumerate(above) if a is not None)
        leaves = tuple(e for e, a in enumerate(above) if a is None)
        return cls(tuple(above), tuple(below), tuple(subtrees), vertices, leaves)


ETA = PlanarTree(None)


def sort_key(t: PlanarTree):
    return (t.n_vertices, t.n_edges, t.literal)


# -- literals -----------------------------------------------------------------

def render(t: PlanarTree, ascii: bool = False) -> str:
    eta = "e" if ascii else "η"

    def go(s: PlanarTree) -> str:
        if s.inputs is None:
            return eta
        return "(" + " ".join(go(c) for c in s.inputs) + ")"

    return go(t)


def parse_tree(literal: str) -> PlanarTree:
    """Parse ``Tree := "η" | "(" Tree* ")"``; ``e`` is accepted for ``η``."""
    pos = 0
    n = len(literal)

    def skip():
        nonlocal pos
        while pos < n and literal[pos].isspace():
            pos += 1

    def parse_one() -> PlanarTree:
        nonlocal pos
        skip()
        if pos >= n:
            raise TreeSyntaxError("unexpected end of input", pos)
        ch = literal[pos]
        if ch in ETA_SYMBOLS:
            pos += 1
            if pos < n and not (literal[pos].isspace() or literal[pos] in "()"):
                raise TreeSyntaxError(f"unexpected character {literal[pos]!r}", pos)
            return ETA
        if ch == "(":
            pos += 1
            children = []
            while True:
                skip()
                if pos >= n:
                    raise TreeSyntaxError("unclosed '('", pos)
                if literal[pos] == ")":
                    pos += 1
                    return PlanarTree(tuple(children))
                children.append(parse_one())
        raise TreeSyntaxError(f"unexpected character {ch!r}", pos)

    tree = parse_one()
    skip()
    if pos != n:
        raise TreeSyntaxError(f"trailing input {literal[pos:]!r}", pos)
    return tree


def as_tree(t: PlanarTree | str) -> PlanarTree:
    return parse_tree(t) if isinstance(t, str) else t


# -- standard trees -----------------------------------------------------------

def corolla(n: int) -> PlanarTree:
    if n < 0:
        raise ValueError(f"corolla arity must be >= 0, got {n}")
    return PlanarTree((ETA,) * n)


def left_comb(n: int) -> PlanarTree:
    """B_n: the planar binary tree with n leaves growing to the left."""
    if n < 2:
        raise ValueError(f"left comb needs n >= 2, got {n}")
    t = corolla(2)
    for _ in range(n - 2):
        t = PlanarTree((t, ETA))
    return t


def standard_tree(kind: str, n: int = 0) -> PlanarTree:
    if kind == "eta":
        return ETA
    if kind == "corolla":
        return corolla(n)
    if kind == "left_comb":
        return left_comb(n)
    raise ValueError(f"unknown tree kind {kind!r}")


# -- canonical forms, mirror, grafting -----------------------------------------

def canonical_form(t: PlanarTree) -> PlanarTree:
    """AHU-style canonical representative: children sorted by their encoding."""
    if t.inputs is None:
        return ETA
    children = sorted((canonical_form(c) for c in t.inputs), key=lambda c: c.literal)
    return PlanarTree(children)


def is_canonical(t: PlanarTree) -> bool:
    return canonical_form(t) == t


def mirror_tree(t: PlanarTree) -> PlanarTree:
    if t.inputs is None:
        return ETA
    return PlanarTree(tuple(mirror_tree(c) for c in reversed(t.inputs)))


def mirror_edge_map(t: PlanarTree) -> tuple[int, ...]:
    """Edge of ``t`` -> corresponding edge of ``mirror_tree(t)``."""
    m = mirror_tree(t)
    out = [0] * t.n_edges

    def walk(e, f):
        out[e] = f
        ins = t.layout.above[e]
        if ins is not None:
            for a, b in zip(ins, reversed(m.layout.above[f])):
                walk(a, b)

    walk(0, 0)
    return tuple(out)


def graft(t: PlanarTree, leaf: int, s: PlanarTree) -> PlanarTree:
    """Identify the root of ``s`` with the leaf edge ``leaf`` of ``t``."""
    if leaf not in t.leaves:
        raise ValueError(f"edge {leaf} is not a leaf of {t.literal}")

    def rebuild(e: int) -> PlanarTree:
        if e == leaf:
            return s
        ins = t.layout.above[e]
        if ins is None:
            return ETA
        return PlanarTree(tuple(rebuild(c) for c in ins))

    return rebuild(0)


def replanarizations(t: PlanarTree) -> Iterator[PlanarTree]:
    """Every planar tree with the same underlying tree as ``t`` (with repeats)."""
    if t.inputs is None:
        yield ETA
        return
    for perm in itertools.permutations(t.inputs):
        for kids in itertools.product(*(list(replanarizations(c)) for c in perm)):
            yield PlanarTree(kids)


# -- free operad operations ----------------------------------------------------

@dataclass(frozen=True, order=True)
class SubtreeOp:
    """An operation of the free operad on a tree.

    ``leaves`` lists the input edges in the operation's input order; for the
    planar flavour this is always the left-to-right order.  ``vertices`` is
    the connected region between ``root`` and ``leaves`` (empty for an
    identity).
    """

    root: int
    leaves: tuple
    vertices: frozenset

    @property
    def arity(self) -> int:
        return len(self.leaves)

    @property
    def is_identity(self) -> bool:
        return not self.vertices


def rooted_regions(t: PlanarTree, root: int) -> list[tuple[tuple[int, ...], frozenset]]:
    """All connected regions with root edge ``root``, leaves in planar order."""
    memo: dict[int, list] = {}

    def go(e: int):
        if e in memo:
            return memo[e]
        out = [((e,), frozenset())]
        ins = t.layout.above[e]
        if ins is not None:
            for choice in itertools.product(*(go(c) for c in ins)):
                leaves = tuple(itertools.chain.from_iterable(c[0] for c in choice))
                verts = frozenset().union(*(c[1] for c in choice)) | {e}
                out.append((leaves, verts))
        memo[e] = out
        return out

    return go(root)


def operations_of_free_operad(t: PlanarTree, flavour: str = PLANAR) -> list[SubtreeOp]:
    check_flavour(flavour)
    ops = []
    for r in t.edges:
        for leaves, verts in rooted_regions(t, r):
            if flavour == PLANAR or not verts:
                ops.append(SubtreeOp(r, leaves, verts))
            else:
                for perm in itertools.permutations(leaves):
                    ops.append(SubtreeOp(r, perm, verts))
    return sorted(ops, key=lambda o: (o.root, len(o.vertices), o.leaves))


# -- automorphisms ------------------------------------------------------------

def isomorphisms(s: PlanarTree, t: PlanarTree) -> list[tuple[int, ...]]:
    """All isomorphisms of underlying non-planar trees, as edge maps s -> t."""
    if s.n_edges != t.n_edges:
        return []
    ls, lt = s.layout, t.layout
    canon_s = [canonical_form(x).literal for x in ls.subtrees]
    canon_t = [canonical_form(x).literal for x in lt.subtrees]

    def go(e: int, f: int) -> list[dict]:
        if canon_s[e] != canon_t[f]:
            return []
        a, b = ls.above[e], lt.above[f]
        if a is None:
            return [{e: f}]
        results = []
        for perm in itertools.permutations(b):
            if any(canon_s[x] != canon_t[y] for x, y in zip(a, perm)):
                continue
            parts = [go(x, y) for x, y in zip(a, perm)]
            for combo in itertools.product(*parts):
                m = {e: f}
                for c in combo:
                    m.update(c)
                results.append(m)
        return results

    maps = [tuple(m[e] for e in range(s.n_edges)) for m in go(0, 0)]
    return sorted(set(maps))


def tree_automorphisms(t: PlanarTree) -> list[tuple[int, ...]]:
    """Automorphisms of the underlying non-planar tree as edge permutations."""
    return isomorphisms(t, t)


def compose_perm(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """(p ∘ q)(i) = p[q[i]]."""
    return tuple(p[i] for i in q)


def invert_perm(p: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


# -- enumeration --------------------------------------------------------------

def planar_trees(max_vertices: int, max_arity: int, max_edges: int | None = None) -> list[PlanarTree]:
    """All planar trees within the bounds, sorted by (vertices, edges, literal)."""
    by_budget: dict[int, list[PlanarTree]] = {}

    def gen(budget: int) -> list[PlanarTree]:
        # trees using at most `budget` vertices
        if budget in by_budget:
            return by_budget[budget]
        out = [ETA]
        if budget > 0:
            for a in range(max_arity + 1):
                out.extend(_forests(a, budget - 1))
        by_budget[budget] = out
        return out

    def _forests(a: int, budget: int):
        def rec(k, left):
            if k == 0:
                yield ()
                return
            for c in gen(left):
                for rest in rec(k - 1, left - c.n_vertices):
                    yield (c,) + rest

        for kids in rec(a, budget):
            yield PlanarTree(kids)

    trees = {t for t in gen(max_vertices)}
    if max_edges is not None:
        trees = {t for t in trees if t.n_edges <= max_edges}
    return sorted(trees, key=sort_key)


def symmetric_trees(max_vertices: int, max_arity: int, max_edges: int | None = None) -> list[PlanarTree]:
    canon = {canonical_form(t) for t in planar_trees(max_vertices, max_arity, max_edges)}
    return sorted(canon, key=sort_key)
