"""Finite coloured operads, symmetric and planar.

Composition is stored as partial compositions ``p ∘_i q`` (0-based slot
``i``).  The symmetric group acts on the right: if ``p`` has inputs
``(c_0, ..., c_{n-1})`` then ``p·π`` has inputs ``(c_π(0), ..., c_π(n-1))``
and slot ``a`` of ``p·π`` feeds slot ``π(a)`` of ``p``.  With this
convention ``(p·π)·ρ = p·(π∘ρ)``.
"""
from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .trees import PLANAR, SYMMETRIC, PlanarTree, check_flavour, operations_of_free_operad


class SizeBoundExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Signature:
    inputs: tuple
    output: Hashable

    @property
    def arity(self) -> int:
        return len(self.inputs)


def unit_name(c) -> str:
    return f"1_{c}"


class FinOperad:
    """A finite coloured operad given by explicit tables.

    ``ops`` maps operation names to signatures and includes the units.
    ``circ[(p, i, q)]`` is ``p ∘_i q``; ``action[(p, perm)]`` is ``p·perm``
    (symmetric flavour only).  Instances are treated as immutable.
    """

    def __init__(self, flavour, colours, ops, units, circ, action=None, name=""):
        self.flavour = check_flavour(flavour)
        self.colours = tuple(colours)
        self.ops = dict(ops)
        self.units = dict(units)
        self.circ = dict(circ)
        self.action = dict(action or {})
        self.name = name
        self._unit_set = frozenset(self.units.values())
        self._by_sig = None

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return (f"<FinOperad{label} {self.flavour} colours={len(self.colours)} "
                f"ops={len(self.ops)}>")

    @classmethod
    def build(cls, flavour, colours, operations, compositions=(), symmetry=(), name=""):
        """Build from non-unit operations; unit laws are filled in.

        ``operations``: iterable of ``(name, inputs, output)``.
        ``compositions``: iterable of ``(p, i, q, r)`` meaning ``p ∘_i q = r``.
        ``symmetry``: iterable of ``(p, perm, q)`` meaning ``p·perm = q``;
        identity permutations are added automatically.
        """
        colours = tuple(colours)
        ops, units = {}, {}
        for c in colours:
            u = unit_name(c)
            ops[u] = Signature((c,), c)
            units[c] = u
        for nm, ins, out in operations:
            if nm in ops:
                raise ValueError(f"duplicate operation name {nm!r}")
            ops[nm] = Signature(tuple(ins), out)
        circ = {}
        for nm, sig in ops.items():
            circ[(units[sig.output], 0, nm)] = nm
            for i, c in enumerate(sig.inputs):
                circ[(nm, i, units[c])] = nm
        for p, i, q, r in compositions:
            circ[(p, i, q)] = r
        action = {}
        if flavour == SYMMETRIC:
            for nm, sig in ops.items():
                action[(nm, tuple(range(sig.arity)))] = nm
            for c in colours:
                action[(units[c], (0,))] = units[c]
            for p, perm, q in symmetry:
                action[(p, tuple(perm))] = q
        return cls(flavour, colours, ops, units, circ, action, name=name)

    # -- accessors -----------------------------------------------------------
    def sig(self, p) -> Signature:
        return self.ops[p]

    def arity(self, p) -> int:
        return self.ops[p].arity

    def is_unit(self, p) -> bool:
        return p in self._unit_set

    @property
    def non_unit_ops(self) -> list:
        return [p for p in self.ops if p not in self._unit_set]

    @property
    def unary_ops(self) -> list:
        return [p for p, s in self.ops.items() if s.arity == 1]

    def ops_with_signature(self, inputs, output) -> list:
        if self._by_sig is None:
            idx: dict = {}
            for p, s in self.ops.items():
                idx.setdefault((s.inputs, s.output), []).append(p)
            self._by_sig = idx
        return self._by_sig.get((tuple(inputs), output), [])

    def compose(self, p, i, q):
        return self.circ[(p, i, q)]

    def gamma(self, p, qs: Sequence):
        """Full composition ``γ(p; q_0, ..., q_{n-1})``."""
        if len(qs) != self.arity(p):
            raise ValueError("wrong number of arguments for γ")
        r = p
        for i in reversed(range(len(qs))):
            r = self.circ[(r, i, qs[i])]
        return r

    def act(self, p, perm):
        if self.flavour != SYMMETRIC:
            raise ValueError("planar operads carry no symmetric action")
        return self.action[(p, tuple(perm))]

    def sigma_orbit(self, p) -> set:
        if self.flavour != SYMMETRIC:
            return {p}
        return {self.action[(p, perm)] for perm in itertools.permutations(range(self.arity(p)))}


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple
    detail: str = ""


# -- validation ---------------------------------------------------------------

def _block_perm_left(perm, i, m):
    """π' with (p·π) ∘_i q = (p ∘_{π(i)} q)·π' for q of arity m."""
    n = len(perm)
    pi_i = perm[i]

    def off_r(b):
        return b if b < pi_i else b + m - 1

    out = []
    for a in range(n):
        if a == i:
            out.extend(pi_i + j for j in range(m))
        else:
            out.append(off_r(perm[a]))
    return tuple(out)


def _block_perm_right(n, i, rho):
    """ρ' with p ∘_i (q·ρ) = (p ∘_i q)·ρ'."""
    m = len(rho)
    return tuple(range(i)) + tuple(i + r for r in rho) + tuple(range(i + m, n + m - 1))


def validate_operad(p: FinOperad, limit: int | None = None) -> list[Violation]:
    """Check every operad axiom by finite iteration; [] means valid."""
    out: list[Violation] = []

    def add(v):
        out.append(v)
        return limit is not None and len(out) >= limit

    colours = set(p.colours)
    for nm, s in p.ops.items():
        if s.output not in colours or any(c not in colours for c in s.inputs):
            if add(Violation("typing", (nm,), "operation uses an unknown colour")):
                return out
    for c in p.colours:
        u = p.units.get(c)
        if u is None or p.ops.get(u) != Signature((c,), c):
            if add(Violation("typing", (c,), "missing or mistyped unit")):
                return out
    if out:
        return out

    by_output: dict = {}
    for nm, s in p.ops.items():
        by_output.setdefault(s.output, []).append(nm)

    def expected_sig(a, i, b):
        sa, sb = p.ops[a], p.ops[b]
        return Signature(sa.inputs[:i] + sb.inputs + sa.inputs[i + 1:], sa.output)

    # totality and typing of partial compositions
    for a, sa in p.ops.items():
        for i, c in enumerate(sa.inputs):
            for b in by_output.get(c, ()):
                r = p.circ.get((a, i, b))
                if r is None:
                    if add(Violation("totality", (a, i, b), "composite undefined")):
                        return out
                elif p.ops.get(r) != expected_sig(a, i, b):
                    if add(Violation("typing", (a, i, b, r), "composite has the wrong signature")):
                        return out
    for (a, i, b), r in p.circ.items():
        if a not in p.ops or b not in p.ops or not 0 <= i < p.arity(a) \
                or p.ops[b].output != p.ops[a].inputs[i]:
            if add(Violation("typing", (a, i, b, r), "composition entry for an incompatible pair")):
                return out
    if out:
        return out
    circ = p.circ

    # units
    for a, sa in p.ops.items():
        if circ[(p.units[sa.output], 0, a)] != a:
            if add(Violation("unit", (p.units[sa.output], 0, a), "left unit law")):
                return out
        for i, c in enumerate(sa.inputs):
            if circ[(a, i, p.units[c])] != a:
                if add(Violation("unit", (a, i, p.units[c]), "right unit law")):
                    return out

    # associativity
    for a, sa in p.ops.items():
        for i, c in enumerate(sa.inputs):
            for b in by_output.get(c, ()):
                ab = circ[(a, i, b)]
                sb = p.ops[b]
                for j, d in enumerate(sb.inputs):
                    for e in by_output.get(d, ()):
                        lhs = circ[(ab, i + j, e)]
                        rhs = circ[(a, i, circ[(b, j, e)])]
                        if lhs != rhs:
                            if add(Violation("associativity", (a, i, b, j, e),
                                             f"sequential: {lhs} != {rhs}")):
                                return out
                for k in range(i + 1, sa.arity):
                    for e in by_output.get(sa.inputs[k], ()):
                        lhs = circ[(ab, k + sb.arity - 1, e)]
                        rhs = circ[(circ[(a, k, e)], i, b)]
                        if lhs != rhs:
                            if add(Violation("associativity", (a, i, b, k, e),
                                             f"parallel: {lhs} != {rhs}")):
                                return out

    if p.flavour == SYMMETRIC:
        out.extend(_validate_action(p, by_output, limit, len(out)))
    return out if limit is None else out[:limit]


def _validate_action(p: FinOperad, by_output, limit, already) -> list[Violation]:
    out = []

    def add(v):
        out.append(v)
        return limit is not None and already + len(out) >= limit

    act = p.action
    for a, sa in p.ops.items():
        n = sa.arity
        perms = list(itertools.permutations(range(n)))
        for perm in perms:
            r = act.get((a, perm))
            want = Signature(tuple(sa.inputs[x] for x in perm), sa.output)
            if r is None:
                if add(Violation("action", (a, perm), "action undefined")):
                    return out
                continue
            if p.ops.get(r) != want:
                if add(Violation("action", (a, perm, r), "acted operation has the wrong signature")):
                    return out
        if out:
            continue
        if act[(a, tuple(range(n)))] != a:
            if add(Violation("action", (a,), "identity permutation acts non-trivially")):
                return out
        for pi in perms:
            for rho in perms:
                lhs = act[(act[(a, pi)], rho)]
                rhs = act[(a, tuple(pi[x] for x in rho))]
                if lhs != rhs:
                    if add(Violation("action", (a, pi, rho), "not a group action")):
                        return out
    if out:
        return out
    circ = p.circ
    for a, sa in p.ops.items():
        n = sa.arity
        perms = list(itertools.permutations(range(n)))
        for pi in perms:
            api = act[(a, pi)]
            for i in range(n):
                c = p.ops[api].inputs[i]
                for b in by_output.get(c, ()):
                    m = p.ops[b].arity
                    lhs = circ[(api, i, b)]
                    rhs = act[(circ[(a, pi[i], b)], _block_perm_left(pi, i, m))]
                    if lhs != rhs:
                        if add(Violation("equivariance", (a, pi, i, b), f"{lhs} != {rhs}")):
                            return out
        for i, c in enumerate(sa.inputs):
            for b in by_output.get(c, ()):
                for rho in itertools.permutations(range(p.ops[b].arity)):
                    lhs = circ[(a, i, act[(b, rho)])]
                    rhs = act[(circ[(a, i, b)], _block_perm_right(n, i, rho))]
                    if lhs != rhs:
                        if add(Violation("equivariance", (a, i, b, rho), f"{lhs} != {rhs}")):
                            return out
    return out


# -- standard operads -----------------------------------------------------------

def op_name(sub) -> str:
    if sub.is_identity:
        return unit_name(sub.root)
    return f"{sub.root}<" + ".".join(str(x) for x in sub.leaves)


@functools.lru_cache(maxsize=4096)
def free_operad(t: PlanarTree, flavour: str = SYMMETRIC) -> FinOperad:
    """The free operad on a tree: colours are edges, operations are regions."""
    check_flavour(flavour)
    subs = operations_of_free_operad(t, flavour)
    by_sig = {(s.leaves, s.root): s for s in subs}
    operations = [(op_name(s), s.leaves, s.root) for s in subs if not s.is_identity]
    comps = []
    for a in subs:
        for i, c in enumerate(a.leaves):
            for b in subs:
                if b.root != c or a.is_identity or b.is_identity:
                    continue
                leaves = a.leaves[:i] + b.leaves + a.leaves[i + 1:]
                comps.append((op_name(a), i, op_name(b), op_name(by_sig[(leaves, a.root)])))
    sym = []
    if flavour == SYMMETRIC:
        for a in subs:
            if a.is_identity:
                continue
            for perm in itertools.permutations(range(a.arity)):
                leaves = tuple(a.leaves[x] for x in perm)
                sym.append((op_name(a), perm, op_name(by_sig[(leaves, a.root)])))
    op = FinOperad.build(flavour, t.edges, operations, comps, sym, name=f"free{t.literal}")
    op.tree = t
    op.regions = {op_name(s): s for s in subs}
    return op


def eta_operad(flavour: str = SYMMETRIC) -> FinOperad:
    return FinOperad.build(flavour, ["*"], [], name="η")


def j_operad(flavour: str = SYMMETRIC) -> FinOperad:
    """J: the contractible groupoid on two objects, as an operad."""
    return FinOperad.build(
        flavour, ["a", "b"], [("f", ["a"], "b"), ("g", ["b"], "a")],
        [("f", 0, "g", unit_name("b")), ("g", 0, "f", unit_name("a"))],
        name="J",
    )


# -- categories -----------------------------------------------------------------

class FinCategory:
    """Finite category: ``arrows[name] = (src, tgt)``, ``comp[(g, f)] = g∘f``."""

    def __init__(self, objects, arrows, comp, identities, name=""):
        self.objects = list(objects)
        self.arrows = dict(arrows)
        self.comp = dict(comp)
        self.identities = dict(identities)
        self.name = name
        self._homs = None

    def __repr__(self):
        return f"<FinCategory {self.name} objects={len(self.objects)} arrows={len(self.arrows)}>"

    def hom(self, a, b) -> list:
        if self._homs is None:
            homs: dict = {}
            for nm, (s, t) in self.arrows.items():
                homs.setdefault((s, t), []).append(nm)
            self._homs = homs
        return self._homs.get((a, b), [])

    def validate(self) -> list[Violation]:
        out = []
        for a in self.objects:
            i = self.identities.get(a)
            if i is None or self.arrows.get(i) != (a, a):
                out.append(Violation("category", (a,), "missing identity"))
        for f, (a, b) in self.arrows.items():
            if self.comp.get((self.identities[b], f)) != f or self.comp.get((f, self.identities[a])) != f:
                out.append(Violation("category", (f,), "identity law"))
            for g in [g for g, (s, _) in self.arrows.items() if s == b]:
                gf = self.comp.get((g, f))
                if gf is None or self.arrows.get(gf) != (a, self.arrows[g][1]):
                    out.append(Violation("category", (g, f), "composite missing or mistyped"))
        if out:
            return out
        for f, (a, b) in self.arrows.items():
            for g in self.arrows:
                if self.arrows[g][0] != b:
                    continue
                for h in self.arrows:
                    if self.arrows[h][0] != self.arrows[g][1]:
                        continue
                    if self.comp[(h, self.comp[(g, f)])] != self.comp[(self.comp[(h, g)], f)]:
                        out.append(Violation("category", (h, g, f), "associativity"))
        return out

    def isomorphisms(self) -> list:
        out = []
        for f, (a, b) in self.arrows.items():
            for g in self.hom(b, a):
                if self.comp[(g, f)] == self.identities[a] and self.comp[(f, g)] == self.identities[b]:
                    out.append(f)
                    break
        return out

    def is_rigid(self) -> bool:
        ids = set(self.identities.values())
        return all(f in ids for f in self.isomorphisms())

    def is_discrete(self) -> bool:
        return set(self.arrows) == set(self.identities.values())

    def is_contractible_groupoid(self) -> bool:
        if not self.objects:
            return False
        return all(len(self.hom(a, b)) == 1 for a in self.objects for b in self.objects)


def underlying_category(p: FinOperad) -> FinCategory:
    arrows = {f: (p.ops[f].inputs[0], p.ops[f].output) for f in p.unary_ops}
    comp = {}
    for f, (a, b) in arrows.items():
        for g, (b2, c) in arrows.items():
            if b2 == b:
                comp[(g, f)] = p.circ[(g, 0, f)]
    return FinCategory(p.colours, arrows, comp, p.units, name=f"underlying({p.name})")


def category_as_operad(cat: FinCategory, flavour: str = SYMMETRIC) -> FinOperad:
    """View a finite category as an operad with only unary operations."""
    idx = {o: k for k, o in enumerate(cat.objects)}
    names = {f: f"a{k}" for k, f in enumerate(cat.arrows)}
    ids = set(cat.identities.values())

    def nm(f):
        return unit_name(idx[cat.arrows[f][0]]) if f in ids else names[f]

    operations = [(names[f], [idx[a]], idx[b]) for f, (a, b) in cat.arrows.items() if f not in ids]
    comps = [(nm(g), 0, nm(f), nm(h)) for (g, f), h in cat.comp.items()]
    op = FinOperad.build(flavour, range(len(cat.objects)), operations, comps, name=f"op({cat.name})")
    return op


def is_rigid(p: FinOperad) -> bool:
    return underlying_category(p).is_rigid()


# -- maps of operads ------------------------------------------------------------

@dataclass(frozen=True)
class OperadMap:
    """Colour images aligned with ``source.colours``; op images with ``source.ops``."""

    colours: tuple
    ops: tuple
    source: FinOperad = field(compare=False, repr=False, hash=False)
    target: FinOperad = field(compare=False, repr=False, hash=False)

    def colour(self, c):
        return self.colours[self.source.colours.index(c)]

    def op(self, name):
        return dict(zip(self.source.ops, self.ops))[name]

    def as_dicts(self) -> tuple[dict, dict]:
        return dict(zip(self.source.colours, self.colours)), dict(zip(self.source.ops, self.ops))

    def is_bijective(self) -> bool:
        return (len(set(self.colours)) == len(self.colours) == len(self.target.colours)
                and len(set(self.ops)) == len(self.ops) == len(self.target.ops))


def compose_maps(g: OperadMap, f: OperadMap) -> OperadMap:
    gc, go = g.as_dicts()
    return OperadMap(tuple(gc[c] for c in f.colours), tuple(go[x] for x in f.ops), f.source, g.target)


def identity_map(p: FinOperad) -> OperadMap:
    return OperadMap(p.colours, tuple(p.ops), p, p)


def check_operad_map(f: OperadMap) -> list[Violation]:
    p, q = f.source, f.target
    cm, om = f.as_dicts()
    out = []
    for x, s in p.ops.items():
        want = Signature(tuple(cm[c] for c in s.inputs), cm[s.output])
        if q.ops.get(om[x]) != want:
            out.append(Violation("map", (x,), "signature not preserved"))
    for c in p.colours:
        if om[p.units[c]] != q.units[cm[c]]:
            out.append(Violation("map", (c,), "unit not preserved"))
    if out:
        return out
    for (a, i, b), r in p.circ.items():
        if q.circ[(om[a], i, om[b])] != om[r]:
            out.append(Violation("map", (a, i, b), "composition not preserved"))
    if p.flavour == SYMMETRIC:
        for (a, perm), r in p.action.items():
            if q.action[(om[a], perm)] != om[r]:
                out.append(Violation("map", (a, perm), "action not preserved"))
    return out


def _decomposables(p: FinOperad) -> set:
    out = set()
    for (a, _, b), r in p.circ.items():
        if not p.is_unit(a) and not p.is_unit(b):
            out.add(r)
    return out


def operad_maps(p: FinOperad, q: FinOperad, max_maps: int = 200_000,
                max_nodes: int = 2_000_000) -> list[OperadMap]:
    """Every map of operads p -> q, by backtracking with propagation.

    Branches on operation images (generators first) and on the images of
    colours not touched by any operation; every composition, unit and
    symmetry constraint is propagated as soon as its inputs are known.
    """
    if p.flavour != q.flavour:
        raise ValueError("operads of different flavours")
    by_arity: dict = {}
    for x, s in q.ops.items():
        by_arity.setdefault(s.arity, []).append(x)

    comp_by_op: dict = {x: [] for x in p.ops}
    for (a, i, b), r in p.circ.items():
        entry = (a, i, b, r)
        comp_by_op[a].append(entry)
        if b != a:
            comp_by_op[b].append(entry)
        if r != a and r != b:
            comp_by_op[r].append(entry)
    act_by_op: dict = {x: [] for x in p.ops}
    if p.flavour == SYMMETRIC:
        for (a, perm), r in p.action.items():
            act_by_op[a].append((a, perm, r))
            if r != a:
                act_by_op[r].append((a, perm, r))
    inv = {perm: tuple(sorted(range(len(perm)), key=lambda k: perm[k]))
           for (_, perm) in p.action}

    decomposable = _decomposables(p)
    order = sorted(p.non_unit_ops, key=lambda x: (x in decomposable, -p.arity(x)))
    nodes = 0
    results = []

    def assign_op(cm, om, x, y, queue) -> bool:
        old = om.get(x)
        if old is not None:
            return old == y
        sx, sy = p.ops[x], q.ops[y]
        if sx.arity != sy.arity:
            return False
        for c, d in zip(sx.inputs + (sx.output,), sy.inputs + (sy.output,)):
            if not assign_colour(cm, om, c, d, queue):
                return False
        om[x] = y
        queue.append(x)
        return True

    def assign_colour(cm, om, c, d, queue) -> bool:
        old = cm.get(c)
        if old is not None:
            return old == d
        cm[c] = d
        return assign_op(cm, om, p.units[c], q.units[d], queue)

    def propagate(cm, om, queue) -> bool:
        while queue:
            x = queue.pop()
            for a, i, b, r in comp_by_op[x]:
                if a in om and b in om:
                    y = q.circ.get((om[a], i, om[b]))
                    if y is None or not assign_op(cm, om, r, y, queue):
                        return False
            for a, perm, r in act_by_op[x]:
                if a in om:
                    if not assign_op(cm, om, r, q.action[(om[a], perm)], queue):
                        return False
                elif r in om:
                    if not assign_op(cm, om, a, q.action[(om[r], inv[perm])], queue):
                        return False
        return True

    def search(cm, om):
        nonlocal nodes
        nodes += 1
        if nodes > max_nodes:
            raise SizeBoundExceeded(f"operad_maps explored more than {max_nodes} nodes")
        x = next((x for x in order if x not in om), None)
        if x is not None:
            s = p.ops[x]
            for y in by_arity.get(s.arity, ()):
                cm2, om2 = dict(cm), dict(om)
                queue = []
                if assign_op(cm2, om2, x, y, queue) and propagate(cm2, om2, queue):
                    search(cm2, om2)
            return
        c = next((c for c in p.colours if c not in cm), None)
        if c is not None:
            for d in q.colours:
                cm2, om2 = dict(cm), dict(om)
                queue = []
                if assign_colour(cm2, om2, c, d, queue) and propagate(cm2, om2, queue):
                    search(cm2, om2)
            return
        results.append(OperadMap(tuple(cm[c] for c in p.colours), tuple(om[x] for x in p.ops), p, q))
        if len(results) > max_maps:
            raise SizeBoundExceeded(f"more than {max_maps} operad maps")

    search({}, {})
    qc = {c: k for k, c in enumerate(q.colours)}
    qo = {x: k for k, x in enumerate(q.ops)}
    results.sort(key=lambda f: (tuple(qc[c] for c in f.colours), tuple(qo[x] for x in f.ops)))
    return results


def isomorphisms_between(p: FinOperad, q: FinOperad) -> list[OperadMap]:
    if len(p.colours) != len(q.colours) or len(p.ops) != len(q.ops):
        return []
    return [f for f in operad_maps(p, q) if f.is_bijective()]


def is_isomorphic(p: FinOperad, q: FinOperad) -> bool:
    return bool(isomorphisms_between(p, q))


# -- internal hom and locality ----------------------------------------------------

def internal_hom_category(p: FinOperad, q: FinOperad) -> FinCategory:
    """Underlying category of the internal hom: maps p -> q and their transformations."""
    maps = operad_maps(p, q)
    arrows, comp, ids = {}, {}, {}
    fams: dict = {}
    for fi, f in enumerate(maps):
        fc, fo = f.as_dicts()
        for gi, g in enumerate(maps):
            gc, go = g.as_dicts()
            choices = [q.ops_with_signature((fc[c],), gc[c]) for c in p.colours]
            for alpha in itertools.product(*choices):
                al = dict(zip(p.colours, alpha))
                ok = True
                for x, s in p.ops.items():
                    lhs = q.gamma(go[x], [al[c] for c in s.inputs])
                    rhs = q.circ[(al[s.output], 0, fo[x])]
                    if lhs != rhs:
                        ok = False
                        break
                if ok:
                    name = (fi, gi, alpha)
                    arrows[name] = (fi, gi)
                    fams.setdefault((fi, gi), []).append(name)
            if fi == gi:
                ids[fi] = (fi, fi, tuple(q.units[fc[c]] for c in p.colours))
    for (fi, gi), first in fams.items():
        for (gj, hi), second in fams.items():
            if gj != gi:
                continue
            for a in first:
                for b in second:
                    comp[(b, a)] = (fi, hi, tuple(q.circ[(y, 0, x)] for x, y in zip(a[2], b[2])))
    cat = FinCategory(range(len(maps)), arrows, comp, ids, name=f"Hom({p.name},{q.name})")
    cat.maps = maps
    return cat


def is_j_local(p: FinOperad) -> bool:
    """Precomposition with j: J -> η is a bijection Oper(η, P) -> Oper(J, P)."""
    eta, jop = eta_operad(p.flavour), j_operad(p.flavour)
    j = operad_maps(jop, eta)[0]
    colours = operad_maps(eta, p)
    image = {compose_maps(x, j) for x in colours}
    return len(image) == len(colours) and image == set(operad_maps(jop, p))


def locality(p: FinOperad, t: PlanarTree | None = None) -> bool:
    """j-locality (t absent) or j_T-locality via the internal hom from free(t)."""
    if t is None:
        return is_j_local(p)
    hom = internal_hom_category(free_operad(t, p.flavour), p)
    return is_j_local(category_as_operad(hom, p.flavour))


# -- suboperads and classification -------------------------------------------------

def closure(p: FinOperad, colours: Iterable, ops: Iterable) -> tuple[frozenset, frozenset]:
    cols = set(colours)
    members = set(ops)
    for x in members:
        s = p.ops[x]
        cols.update(s.inputs)
        cols.add(s.output)
    members.update(p.units[c] for c in cols)
    changed = True
    while changed:
        changed = False
        new = set()
        for (a, i, b), r in p.circ.items():
            if a in members and b in members and r not in members:
                new.add(r)
        if p.flavour == SYMMETRIC:
            for (a, _), r in p.action.items():
                if a in members and r not in members:
                    new.add(r)
        if new:
            members |= new
            changed = True
    return frozenset(cols), frozenset(members)


def suboperads(p: FinOperad, max_ops: int = 64, max_results: int = 100_000) -> list[tuple[frozenset, frozenset]]:
    """Every suboperad (colour set, operation set), the empty one included."""
    if len(p.non_unit_ops) > max_ops:
        raise SizeBoundExceeded(f"{len(p.non_unit_ops)} operations exceed the bound {max_ops}")
    seen = set()
    stack = []
    for k in range(len(p.colours) + 1):
        for cs in itertools.combinations(p.colours, k):
            sub = closure(p, cs, ())
            if sub[1] not in seen:
                seen.add(sub[1])
                stack.append(sub)
    found = []
    nonunit = p.non_unit_ops
    while stack:
        cols, members = stack.pop()
        found.append((cols, members))
        if len(found) > max_results:
            raise SizeBoundExceeded(f"more than {max_results} suboperads")
        for x in nonunit:
            if x in members:
                continue
            sub = closure(p, cols, members | {x})
            if sub[1] not in seen:
                seen.add(sub[1])
                stack.append(sub)
    found.sort(key=lambda s: (len(s[1]), sorted(map(str, s[1]))))
    return found


def is_discrete(p: FinOperad) -> bool:
    return not p.non_unit_ops


def is_pseudo_corolla_by_definition(p: FinOperad) -> bool:
    """Some non-trivial p0 is Σ-related to every non-trivial operation and
    its inputs and output exhaust the colours."""
    nonunit = p.non_unit_ops
    for p0 in nonunit:
        orbit = p.sigma_orbit(p0)
        s = p.ops[p0]
        if all(q in orbit for q in nonunit) and set(p.colours) == set(s.inputs) | {s.output}:
            return True
    return False


@dataclass
class OperadClass:
    is_category: bool
    is_discrete: bool
    is_pseudo_corolla: bool | None
    corolla_arity: int | None
    notes: list = field(default_factory=list)


def classify_operad(p: FinOperad, max_ops: int = 64) -> OperadClass:
    is_cat = bool(operad_maps(p, eta_operad(p.flavour)))
    disc = is_discrete(p)
    notes = ["the empty operad counts as a (discrete) proper suboperad"]
    pc = None
    try:
        whole = frozenset(p.ops)
        subs = suboperads(p, max_ops=max_ops)
        pc = (not disc) and all(
            not (set(members) - set(p.units.values()))
            for cols, members in subs if members != whole or cols != frozenset(p.colours)
        )
    except SizeBoundExceeded as exc:
        notes.append(f"pseudo-corolla test indeterminate: {exc}")
    arity = None
    if pc:
        s = p.ops[p.non_unit_ops[0]]
        cols = list(s.inputs) + [s.output]
        if len(set(cols)) == len(cols):
            arity = s.arity
    return OperadClass(is_cat, disc, pc, arity, notes)


# -- mirror -----------------------------------------------------------------------

def mirror_permutation(n: int) -> tuple[int, ...]:
    """μ_n in 1-based one-line notation: μ_n(i) = n - i + 1."""
    return tuple(n - i + 1 for i in range(1, n + 1))


def mirror_operad(p: FinOperad) -> FinOperad:
    if p.flavour != PLANAR:
        raise ValueError("the mirror is defined on planar operads")
    ops = {x: Signature(tuple(reversed(s.inputs)), s.output) for x, s in p.ops.items()}
    circ = {(a, p.arity(a) - 1 - i, b): r for (a, i, b), r in p.circ.items()}
    name = p.name[len("mirror "):] if p.name.startswith("mirror ") else f"mirror {p.name}"
    return FinOperad(PLANAR, p.colours, ops, p.units, circ, name=name)


# -- nerve -----------------------------------------------------------------------------

@dataclass(frozen=True)
class NerveValue:
    tree: PlanarTree
    maps: tuple


def nerve_at(p: FinOperad, t: PlanarTree) -> NerveValue:
    return NerveValue(t, tuple(operad_maps(free_operad(t, p.flavour), p)))


# -- serialization ---------------------------------------------------------------

SCHEMA = "treetheta.operad/1"


class OperadFormatError(ValueError):
    pass


def operad_to_json(p: FinOperad) -> dict:
    """Units and the laws they satisfy are implicit in the format."""
    ops = [{"name": q, "inputs": list(p.ops[q].inputs), "output": p.ops[q].output} for q in p.non_unit_ops]
    comps = [[a, i, b, r] for (a, i, b), r in p.circ.items() if not (p.is_unit(a) or p.is_unit(b))]
    sym = [[a, list(perm), r] for (a, perm), r in p.action.items()
           if not p.is_unit(a) and tuple(perm) != tuple(range(len(perm)))]
    return {"schema": SCHEMA, "name": p.name, "flavour": p.flavour, "colours": list(p.colours),
            "operations": ops, "compositions": comps, "symmetry": sym}


def operad_from_json(data: dict, validate: bool = True) -> FinOperad:
    if data.get("schema") != SCHEMA:
        raise OperadFormatError(f"expected schema {SCHEMA!r}, got {data.get('schema')!r}")
    try:
        p = FinOperad.build(
            data["flavour"], data["colours"],
            [(o["name"], o["inputs"], o["output"]) for o in data.get("operations", [])],
            [tuple(c) for c in data.get("compositions", [])],
            [(a, tuple(perm), r) for a, perm, r in data.get("symmetry", [])],
            name=data.get("name", ""),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise OperadFormatError(f"malformed operad: {e}") from None
    if validate:
        bad = validate_operad(p, limit=5)
        if bad:
            raise OperadFormatError("operad axioms fail: " + "; ".join(f"{v.axiom} at {v.witness}" for v in bad))
    return p


def load_operad(path) -> FinOperad:
    with open(path, encoding="utf-8") as fh:
        return operad_from_json(json.load(fh))


def save_operad(p: FinOperad, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(operad_to_json(p), fh, indent=1, ensure_ascii=False)
        fh.write("\n")


def corpus() -> dict[str, FinOperad]:
    """The bundled example operads, keyed by file stem."""
    from importlib import resources

    root = resources.files("treetheta") / "data" / "corpus"
    out = {}
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            out[entry.name[:-5]] = operad_from_json(json.loads(entry.read_text(encoding="utf-8")))
    return out
