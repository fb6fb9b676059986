"""Θ_n through tables of dimensions, level trees and the wreath recursion.

An object is a level tree written as nested tuples: ``()`` is the point
D₀ and ``(s_1, ..., s_m)`` is ``[m](s_1, ..., s_m)``.  A morphism
``[m](s) -> [k](t)`` is a monotone ``φ: [m] -> [k]`` together with, for
every ``i`` and every ``j`` in ``(φ(i-1), φ(i)]``, a morphism ``s_i -> t_j``
one level down.

Column ``i`` of a table holds the cells from object ``i-1`` to object ``i``;
σ picks sources and τ picks targets.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .skeleton import FunctorData, Skeleton, functor_from_maps

POINT = ()


class TableError(ValueError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class DimTable:
    top: tuple
    bottom: tuple
    n: int | None = None

    @property
    def m(self) -> int:
        return len(self.top)

    @property
    def height(self) -> int:
        return max(self.top)

    @property
    def literal(self) -> str:
        if not self.bottom:
            return " ".join(map(str, self.top))
        return " ".join(map(str, self.top)) + " / " + " ".join(map(str, self.bottom))

    def __str__(self):
        return self.literal


def validate_table(top: Sequence[int], bottom: Sequence[int], n: int | None = None) -> DimTable:
    top, bottom = tuple(int(x) for x in top), tuple(int(x) for x in bottom)
    if not top:
        raise TableError("a table has at least one column")
    if len(bottom) != len(top) - 1:
        raise TableError(f"expected {len(top) - 1} bottom entries, got {len(bottom)}")
    if any(x < 0 for x in top + bottom):
        raise TableError("entries must be non-negative")
    for i, kp in enumerate(bottom, start=1):
        if not top[i - 1] > kp:
            raise TableError(f"k_{i} = {top[i - 1]} must exceed k'_{i} = {kp}", i)
        if not top[i] > kp:
            raise TableError(f"k_{i + 1} = {top[i]} must exceed k'_{i} = {kp}", i)
    if n is not None and max(top) > n:
        raise TableError(f"height {max(top)} exceeds n = {n}")
    return DimTable(top, bottom, n)


def parse_table(literal: str, n: int | None = None) -> DimTable:
    """Parse ``"k1 k2 ... / k'1 ..."``; the slash is optional for one column."""
    if not re.fullmatch(r"[\d\s/]*", literal) or literal.count("/") > 1:
        raise TableError(f"malformed table literal {literal!r}")
    top, _, bottom = literal.partition("/")
    return validate_table(top.split(), bottom.split(), n)


def table_leveltree(t: DimTable) -> tuple:
    if t.m == 1 and t.top[0] == 0:
        return POINT
    children, start = [], 0
    for i in range(t.m):
        if i == t.m - 1 or t.bottom[i] == 0:
            tops = tuple(x - 1 for x in t.top[start:i + 1])
            bots = tuple(x - 1 for x in t.bottom[start:i])
            children.append(table_leveltree(DimTable(tops, bots)))
            start = i + 1
    return tuple(children)


def leveltree_table(s: tuple, n: int | None = None) -> DimTable:
    if s == POINT:
        return DimTable((0,), (), n)
    top, bottom = [], []
    for k, c in enumerate(s):
        sub = leveltree_table(c)
        if k:
            bottom.append(0)
        top.extend(x + 1 for x in sub.top)
        bottom.extend(x + 1 for x in sub.bottom)
    return DimTable(tuple(top), tuple(bottom), n)


def as_object(x) -> tuple:
    if isinstance(x, tuple):
        return x
    if isinstance(x, DimTable):
        return table_leveltree(x)
    return table_leveltree(parse_table(x))


def table_literal(s: tuple) -> str:
    return str(leveltree_table(s))


def height(s: tuple) -> int:
    return 0 if s == POINT else 1 + max(height(c) for c in s)


def n_columns(s: tuple) -> int:
    return 1 if s == POINT else sum(n_columns(c) for c in s)


def leaf_depths(s: tuple, d: int = 0) -> list:
    if s == POINT:
        return [d]
    return [x for c in s for x in leaf_depths(c, d + 1)]


def disk(k: int) -> tuple:
    s = POINT
    for _ in range(k):
        s = (s,)
    return s


def level_trees(max_height: int, max_columns: int) -> list[tuple]:
    """All objects of height ≤ max_height with ≤ max_columns columns."""

    @lru_cache(maxsize=None)
    def gen(h: int, budget: int) -> tuple:
        out = [POINT]
        if h > 0:
            subs = [c for c in gen(h - 1, budget)]

            def forests(b):
                if b <= 0:
                    return
                for c in subs:
                    w = n_columns(c)
                    if w > b:
                        continue
                    yield (c,)
                    for rest in forests(b - w):
                        yield (c,) + rest

            out.extend(forests(budget))
        return tuple(out)

    objs = set(gen(max_height, max_columns))
    return sorted(objs, key=lambda s: (n_columns(s), height(s), leveltree_table(s).top, leveltree_table(s).bottom))


# -- morphisms ------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaMor:
    source: tuple
    target: tuple
    phi: tuple
    fibres: tuple   # fibres[i-1] lists the maps s_i -> t_j for j in (φ(i-1), φ(i)]

    def fibre(self, i: int, j: int) -> "ThetaMor":
        return self.fibres[i - 1][j - self.phi[i - 1] - 1]

    def __repr__(self):
        return f"ThetaMor({table_literal(self.source)} -> {table_literal(self.target)}, {self.describe()})"

    def describe(self) -> str:
        if not any(self.fibres):
            return "φ=" + ",".join(map(str, self.phi))
        parts = []
        for i, fs in enumerate(self.fibres, start=1):
            for k, f in enumerate(fs):
                parts.append(f"{i}{self.phi[i - 1] + k + 1}:[{f.describe()}]")
        return "φ=" + ",".join(map(str, self.phi)) + " " + " ".join(parts)


def _monotone_maps(m: int, k: int):
    """Nondecreasing sequences (φ(0), ..., φ(m)) in [0, k]."""
    return itertools.combinations_with_replacement(range(k + 1), m + 1)


@lru_cache(maxsize=None)
def _hom(s: tuple, t: tuple) -> tuple:
    m, k = len(s), len(t)
    out = []
    for phi in _monotone_maps(m, k):
        per_i = []
        for i in range(1, m + 1):
            js = range(phi[i - 1] + 1, phi[i] + 1)
            per_i.append(list(itertools.product(*(_hom(s[i - 1], t[j - 1]) for j in js))))
        for fib in itertools.product(*per_i):
            out.append(ThetaMor(s, t, phi, tuple(fib)))
    return tuple(out)


def hom_tables(s, t, max_size: int | None = None) -> list[ThetaMor]:
    s, t = as_object(s), as_object(t)
    homs = _hom(s, t)
    if max_size is not None and len(homs) > max_size:
        raise OverflowError(f"hom-set of size {len(homs)} exceeds the bound {max_size}")
    return list(homs)


@lru_cache(maxsize=None)
def identity(s: tuple) -> ThetaMor:
    return ThetaMor(s, s, tuple(range(len(s) + 1)), tuple((identity(c),) for c in s))


@lru_cache(maxsize=1 << 18)
def compose(g: ThetaMor, f: ThetaMor) -> ThetaMor:
    if f.target != g.source:
        raise ValueError("morphisms are not composable")
    phi, psi = f.phi, g.phi
    chi = tuple(psi[x] for x in phi)
    fibres = []
    for i in range(1, len(f.source) + 1):
        row = []
        for j in range(phi[i - 1] + 1, phi[i] + 1):
            fij = f.fibre(i, j)
            for l in range(psi[j - 1] + 1, psi[j] + 1):
                row.append(compose(g.fibre(j, l), fij))
        fibres.append(tuple(row))
    return ThetaMor(f.source, g.target, chi, tuple(fibres))


# -- inert / active -------------------------------------------------------------------------

def is_inert(f: ThetaMor) -> bool:
    """Comes from a map of generating graphs: interval inclusion with inert fibres."""
    if not f.source:
        return True
    lo = f.phi[0]
    if any(x != lo + i for i, x in enumerate(f.phi)):
        return False
    return all(is_inert(fs[0]) for fs in f.fibres)


def is_active(f: ThetaMor) -> bool:
    if f.phi[0] != 0 or f.phi[-1] != len(f.target):
        return False
    return all(is_active(x) for fs in f.fibres for x in fs)


def factor_active_inert(f: ThetaMor) -> tuple[ThetaMor, ThetaMor]:
    """(a, i) with f = i ∘ a, a active and i inert."""
    lo, hi = f.phi[0], f.phi[-1]
    m = len(f.source)
    parts = {}
    for i in range(1, m + 1):
        for j in range(f.phi[i - 1] + 1, f.phi[i] + 1):
            parts[j] = (i, factor_active_inert(f.fibre(i, j)))
    mid = tuple(parts[j][1][0].target for j in range(lo + 1, hi + 1))
    a_fib = []
    for i in range(1, m + 1):
        a_fib.append(tuple(parts[j][1][0] for j in range(f.phi[i - 1] + 1, f.phi[i] + 1)))
    active = ThetaMor(f.source, mid, tuple(x - lo for x in f.phi), tuple(a_fib))
    inert = ThetaMor(mid, f.target, tuple(range(lo, hi + 1)),
                     tuple((parts[j][1][1],) for j in range(lo + 1, hi + 1)))
    return active, inert


def factors_through_nontrivial_inert(f: ThetaMor, objects: Sequence[tuple]) -> bool:
    """Definition of non-activeness: f = i∘g with i inert and not an identity."""
    for u in objects:
        for i in hom_tables(u, f.target):
            if not is_inert(i) or i == identity(f.target):
                continue
            if any(compose(i, g) == f for g in hom_tables(f.source, u)):
                return True
    return False


# -- underlying generating graph ----------------------------------------------------------

def generating_graph(s: tuple) -> dict:
    """Cells of the generating n-graph: dim -> list of (cell, source, target)."""
    cells: dict = {0: [(k, None, None) for k in range(len(s) + 1)]}
    for i, c in enumerate(s, start=1):
        sub = generating_graph(c)
        for d, lst in sub.items():
            for cell, src, tgt in lst:
                if d == 0:
                    entry = ((i, cell), i - 1, i)
                else:
                    entry = ((i, cell), (i, src), (i, tgt))
                cells.setdefault(d + 1, []).append(entry)
    return cells


def graph_maps_count(s: tuple, t: tuple) -> int:
    """Number of maps of globular sets between generating graphs (brute force)."""
    gs, gt = generating_graph(s), generating_graph(t)
    order = [(d, c) for d in sorted(gs) for c in gs[d]]
    tcells = {d: gt.get(d, []) for d in gs}
    assign: dict = {}
    count = 0

    def go(k):
        nonlocal count
        if k == len(order):
            count += 1
            return
        d, (cell, src, tgt) = order[k]
        for tc, ts, tt in tcells[d]:
            if d > 0 and (assign[(d - 1, src)] != ts or assign[(d - 1, tgt)] != tt):
                continue
            assign[(d, cell)] = tc
            go(k + 1)
        assign.pop((d, cell), None)

    go(0)
    return count


# -- disks and monomorphisms ----------------------------------------------------------------

@lru_cache(maxsize=None)
def sigma(k: int) -> ThetaMor:
    """σ: D_{k-1} -> D_k, the source inclusion."""
    if k == 1:
        return ThetaMor(POINT, disk(1), (0,), ())
    return ThetaMor(disk(k - 1), disk(k), (0, 1), ((sigma(k - 1),),))


@lru_cache(maxsize=None)
def tau(k: int) -> ThetaMor:
    """τ: D_{k-1} -> D_k, the target inclusion."""
    if k == 1:
        return ThetaMor(POINT, disk(1), (1,), ())
    return ThetaMor(disk(k - 1), disk(k), (0, 1), ((tau(k - 1),),))


def face(kp: int, k: int, which: str) -> ThetaMor:
    """The iterated source ('s') or target ('t') inclusion D_{k'} -> D_k."""
    f = identity(disk(kp))
    first = sigma if which == "s" else tau
    for l in range(kp + 1, k + 1):
        f = compose(first(l) if l == kp + 1 else sigma(l), f)
    return f


def is_mono(f: ThetaMor, tests: Sequence[tuple] | None = None) -> bool:
    """Left-cancellability against the test objects (default: disks up to the source height)."""
    if tests is None:
        tests = [disk(l) for l in range(height(f.source) + 1)]
    for y in tests:
        seen = set()
        for g in hom_tables(y, f.source):
            h = compose(f, g)
            if h in seen:
                return False
            seen.add(h)
    return True


def disk_monos(kp: int, k: int) -> list[ThetaMor]:
    if not 0 <= kp <= k:
        raise ValueError("need 0 <= k' <= k")
    return [f for f in hom_tables(disk(kp), disk(k)) if is_mono(f)]


def subobjects(t: tuple, objects: Sequence[tuple]) -> list[ThetaMor]:
    return list(_subobjects(t, tuple(objects)))


@lru_cache(maxsize=1024)
def _subobjects(t: tuple, objects: tuple) -> tuple:
    return tuple(f for u in objects for f in hom_tables(u, t) if is_mono(f))


def is_disk(s: tuple) -> bool:
    return n_columns(s) == 1


def satisfies_disk_characterization(t: tuple, k: int, objects: Sequence[tuple]) -> bool:
    """Proper subobjects are disks of dimension < k, and exactly two monos
    arrive from each D_l with l < k."""
    subs = subobjects(t, objects)
    for f in subs:
        if f.source == t:
            continue
        if not (is_disk(f.source) and height(f.source) < k):
            return False
    for l in range(k):
        d = disk(l)
        found = [f for f in subs if f.source == d] if d in objects else \
            [f for f in hom_tables(d, t) if is_mono(f)]
        if len(found) != 2:
            return False
    return True


# -- op_δ ---------------------------------------------------------------------------------------

def op_delta_object(delta: Sequence[int], s: tuple) -> tuple:
    if s == POINT:
        return s
    d = tuple(delta) or (0,)
    head, tail = d[0], d[1:]
    kids = tuple(op_delta_object(tail, c) for c in s)
    return tuple(reversed(kids)) if head else kids


def apply_op_delta(delta: Sequence[int], f: ThetaMor) -> ThetaMor:
    d = tuple(delta)
    if not any(d):
        return f
    head, tail = d[0], d[1:]
    src, tgt = op_delta_object(d, f.source), op_delta_object(d, f.target)
    m, k = len(f.source), len(f.target)
    if not head:
        fib = tuple(tuple(apply_op_delta(tail, x) for x in fs) for fs in f.fibres)
        return ThetaMor(src, tgt, f.phi, fib)
    phi = tuple(k - f.phi[m - i] for i in range(m + 1))
    fib = []
    for i2 in range(1, m + 1):
        i = m + 1 - i2
        row = []
        for j2 in range(phi[i2 - 1] + 1, phi[i2] + 1):
            row.append(apply_op_delta(tail, f.fibre(i, k + 1 - j2)))
        fib.append(tuple(row))
    return ThetaMor(src, tgt, phi, tuple(fib))


def all_deltas(n: int) -> list[tuple]:
    return list(itertools.product((0, 1), repeat=n))


def op_delta_functor(sk: Skeleton, delta: Sequence[int]) -> FunctorData:
    d = tuple(delta)
    return functor_from_maps(sk, lambda s: op_delta_object(d, s), lambda f: apply_op_delta(d, f),
                             name=f"op_{''.join(map(str, d))}")


class DeltaExtractionError(ValueError):
    pass


def delta_of_functor(F: FunctorData, n: int) -> tuple:
    """(δ_1, ..., δ_n) from the fix-or-swap behaviour on σ, τ: D_{l-1} -> D_l."""
    sk = F.skeleton
    out = []
    for l in range(1, n + 1):
        a, b = disk(l - 1), disk(l)
        if a not in sk.index or b not in sk.index:
            raise DeltaExtractionError(f"the skeleton lacks D_{l - 1} or D_{l}")
        ia, ib = sk.index[a], sk.index[b]
        if F.obj[ia] != ia or F.obj[ib] != ib:
            raise DeltaExtractionError(f"F does not preserve D_{l - 1} and D_{l}")
        img = (F.image_of(ia, ib, sigma(l)), F.image_of(ia, ib, tau(l)))
        if img == (sigma(l), tau(l)):
            out.append(0)
        elif img == (tau(l), sigma(l)):
            out.append(1)
        else:
            raise DeltaExtractionError(f"F sends σ, τ at level {l} to {img}")
    return tuple(out)


# -- spines ---------------------------------------------------------------------------------

def column_inclusion(s: tuple, col: int) -> ThetaMor:
    """The spine inclusion D_{k_col} -> T of the column ``col`` (0-based)."""
    if s == POINT:
        return identity(POINT)
    for c, child in enumerate(s, start=1):
        w = n_columns(child)
        if col < w:
            inner = column_inclusion(child, col)
            return ThetaMor((inner.source,), s, (c - 1, c), ((inner,),))
        col -= w
    raise IndexError("column out of range")


@dataclass(frozen=True)
class Spine:
    table: DimTable
    inclusions: tuple   # D_{k_i} -> T
    glue: tuple         # k'_i
    left_faces: tuple   # D_{k'_i} -> D_{k_i}   (target face)
    right_faces: tuple  # D_{k'_i} -> D_{k_{i+1}} (source face)

    def describe(self) -> str:
        parts = [f"D{self.table.top[0]}"]
        for kp, k in zip(self.glue, self.table.top[1:]):
            parts.append(f"⨿_D{kp} D{k}")
        return " ".join(parts)


def spine_table(t) -> Spine:
    s = as_object(t)
    tab = leveltree_table(s)
    incl = tuple(column_inclusion(s, i) for i in range(tab.m))
    left = tuple(face(kp, k, "t") for kp, k in zip(tab.bottom, tab.top[:-1]))
    right = tuple(face(kp, k, "s") for kp, k in zip(tab.bottom, tab.top[1:]))
    return Spine(tab, incl, tab.bottom, left, right)


# -- vectorized composition -----------------------------------------------------------------

class WreathComposer:
    """Composition tables computed level by level with numpy.

    A morphism ``[m](s) -> [k](t)`` is encoded by the index of φ and, for
    each target column ``j``, the local index of its fibre one level down.
    Composites are computed on whole hom-sets at once and looked up by key.
    """

    def __init__(self, objects: Sequence[tuple]):
        self.objects = list(objects)
        self.index = {o: k for k, o in enumerate(self.objects)}
        children = sorted({c for o in self.objects for c in o}, key=lambda s: (n_columns(s), s))
        self.lower = WreathComposer(children) if children else None
        self._data: dict = {}
        self._chi: dict = {}
        self._tables: dict = {}
        self._flat = None

    def _phis(self, m, k):
        return list(_monotone_maps(m, k))

    def data(self, a: tuple, b: tuple):
        key = (a, b)
        d = self._data.get(key)
        if d is not None:
            return d
        homs = hom_tables(a, b)
        m, k = len(a), len(b)
        code = {phi: c for c, phi in enumerate(self._phis(m, k))}
        lo = self.lower
        radix = [max([1] + [len(hom_tables(a[i], b[j])) for i in range(m)]) for j in range(k)]
        stride = [1] * k
        for j in range(k - 2, -1, -1):
            stride[j] = stride[j + 1] * radix[j + 1]
        top = stride[0] * radix[0] if k else 1
        n = len(homs)
        PHI = np.zeros(n, dtype=np.int64)
        COV = np.full((n, max(k, 1)), -1, dtype=np.int64)
        FIB = np.zeros((n, max(k, 1)), dtype=np.int64)
        for x, f in enumerate(homs):
            PHI[x] = code[f.phi]
            for i in range(1, m + 1):
                for j in range(f.phi[i - 1] + 1, f.phi[i] + 1):
                    COV[x, j - 1] = i - 1
                    FIB[x, j - 1] = lo.local_index(f.fibre(i, j))
        keys = PHI * top + (FIB[:, :k] * np.array(stride, dtype=np.int64)).sum(axis=1) if k else PHI.copy()
        order = np.argsort(keys, kind="stable")
        d = dict(PHI=PHI, COV=COV, FIB=FIB, stride=np.array(stride, dtype=np.int64), top=top,
                 sorted=keys[order], perm=order, low=np.array([lo.index[c] for c in a] if a else [], dtype=np.int64),
                 lowt=np.array([lo.index[c] for c in b] if b else [], dtype=np.int64))
        self._data[key] = d
        return d

    def local_index(self, f: ThetaMor) -> int:
        d = self.data(f.source, f.target)
        k = len(f.target)
        key = self._phis(len(f.source), k).index(f.phi) * d["top"]
        for i in range(1, len(f.source) + 1):
            for j in range(f.phi[i - 1] + 1, f.phi[i] + 1):
                key += self.lower.local_index(f.fibre(i, j)) * int(d["stride"][j - 1])
        pos = int(np.searchsorted(d["sorted"], key))
        return int(d["perm"][pos])

    def _chi_table(self, m, k, p):
        key = (m, k, p)
        t = self._chi.get(key)
        if t is None:
            out_code = {phi: c for c, phi in enumerate(self._phis(m, p))}
            phis, psis = self._phis(m, k), self._phis(k, p)
            t = np.array([[out_code[tuple(psi[x] for x in phi)] for psi in psis] for phi in phis], dtype=np.int64)
            self._chi[key] = t
        return t

    def flat(self):
        """All composition tables of this level, flattened with offsets."""
        if self._flat is None:
            n = len(self.objects)
            hs = np.array([[len(hom_tables(a, b)) for b in self.objects] for a in self.objects], dtype=np.int64)
            off = np.zeros((n, n, n), dtype=np.int64)
            chunks, pos = [], 0
            for x, a in enumerate(self.objects):
                for y, b in enumerate(self.objects):
                    for z, c in enumerate(self.objects):
                        tab = self.comp(a, b, c)
                        off[x, y, z] = pos
                        chunks.append(tab.ravel())
                        pos += tab.size
            self._flat = (off, hs, np.concatenate(chunks))
        return self._flat

    def comp(self, a: tuple, b: tuple, c: tuple) -> np.ndarray:
        key = (a, b, c)
        tab = self._tables.get(key)
        if tab is not None:
            return tab
        F, G, H = self.data(a, b), self.data(b, c), self.data(a, c)
        nF, nG = len(F["PHI"]), len(G["PHI"])
        if nF == 0 or nG == 0:
            tab = np.zeros((nF, nG), dtype=np.int64)
            self._tables[key] = tab
            return tab
        m, k, p = len(a), len(b), len(c)
        chi = self._chi_table(m, k, p)[F["PHI"][:, None], G["PHI"][None, :]]
        keys = chi * H["top"]
        if p and m and k:
            off, hs, flat = self.lower.flat()
            for l in range(p):
                jl = G["COV"][:, l]
                jc = np.maximum(jl, 0)
                i = F["COV"][:, jc]
                valid = (jl >= 0)[None, :] & (i >= 0)
                fib_f = F["FIB"][:, jc]
                fib_g = G["FIB"][:, l][None, :]
                s_low = F["low"][np.maximum(i, 0)]
                t_low = G["low"][jc][None, :]
                u_low = G["lowt"][l]
                val = flat[off[s_low, t_low, u_low] + fib_f * hs[t_low, u_low] + fib_g]
                keys = keys + np.where(valid, val, 0) * H["stride"][l]
        pos = np.searchsorted(H["sorted"], keys)
        tab = H["perm"][pos]
        self._tables[key] = tab
        return tab


# -- skeleta ---------------------------------------------------------------------------------

def theta_skeleton(n: int = 2, max_columns: int = 3, vectorized: bool = True, objects=None) -> Skeleton:
    objects = level_trees(n, max_columns) if objects is None else [as_object(o) for o in objects]
    comp_table = None
    if vectorized:
        composer = WreathComposer(objects)

        def comp_table(sk, a, b, c):
            return composer.comp(sk.objects[a], sk.objects[b], sk.objects[c])

    return Skeleton(
        objects,
        hom=hom_tables,
        compose=compose,
        identity=identity,
        label=table_literal,
        kind=f"theta{n}",
        comp_table=comp_table,
    )
