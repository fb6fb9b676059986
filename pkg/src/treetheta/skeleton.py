"""Finite full subcategories with explicit hom lists, functors and natural
transformations between them.

Morphisms get a global integer id (``hom_offset[a, b] + local index``).
Composition is tabulated lazily per object triple; a skeleton may plug in a
vectorized table builder.  Functor laws are checked triple by triple and
naturality squares through tables restricted to the triples they need.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


def _small_dtype(n: int):
    return np.uint16 if n < 65535 else np.int64


class Skeleton:
    """A finite category given by objects, a hom enumerator and composition.

    ``hom(a, b)`` returns the list of morphisms, ``compose(g, f)`` returns
    ``g∘f`` and ``identity(a)`` the identity; morphisms must be hashable.
    ``comp_table(sk, a, b, c)``, when given, returns the index table of
    ``comp(a, b, c)`` directly.
    """

    def __init__(self, objects: Sequence, hom: Callable, compose: Callable,
                 identity: Callable, label: Callable = str, kind: str = "",
                 comp_table: Callable | None = None):
        self.objects = list(objects)
        self.kind = kind
        self._hom_fn = hom
        self._compose_fn = compose
        self._identity_fn = identity
        self._comp_table_fn = comp_table
        self.label = label
        self.index = {o: k for k, o in enumerate(self.objects)}
        if len(self.index) != len(self.objects):
            raise ValueError("duplicate skeleton objects")
        self._homs: dict = {}
        self._hom_index: dict = {}
        self._comp: dict = {}
        self._global = None
        self._nat_cache: dict = {}

    def __len__(self):
        return len(self.objects)

    def manifest(self) -> list[str]:
        return [self.label(o) for o in self.objects]

    def content_hash(self) -> str:
        payload = json.dumps({"kind": self.kind, "objects": self.manifest()}, ensure_ascii=False)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    # -- homs --------------------------------------------------------------------
    def hom(self, a: int, b: int) -> list:
        key = (a, b)
        if key not in self._homs:
            homs = list(self._hom_fn(self.objects[a], self.objects[b]))
            self._homs[key] = homs
            self._hom_index[key] = {f: k for k, f in enumerate(homs)}
            if len(self._hom_index[key]) != len(homs):
                raise ValueError(f"hom enumeration returned duplicates for {key}")
        return self._homs[key]

    def hom_size(self, a: int, b: int) -> int:
        return len(self.hom(a, b))

    def hom_index(self, a: int, b: int, f) -> int:
        self.hom(a, b)
        return self._hom_index[(a, b)][f]

    def identity_index(self, a: int) -> int:
        return self.hom_index(a, a, self._identity_fn(self.objects[a]))

    def compose(self, g, f):
        return self._compose_fn(g, f)

    def comp(self, a: int, b: int, c: int) -> np.ndarray:
        """``comp(a,b,c)[i, j]`` is the index of ``hom(b,c)[j] ∘ hom(a,b)[i]``."""
        key = (a, b, c)
        tab = self._comp.get(key)
        if tab is None:
            if self._comp_table_fn is not None:
                tab = self._comp_table_fn(self, a, b, c)
            else:
                fs, gs = self.hom(a, b), self.hom(b, c)
                self.hom(a, c)
                idx = self._hom_index[(a, c)]
                tab = np.empty((len(fs), len(gs)), dtype=np.int64)
                for i, f in enumerate(fs):
                    for j, g in enumerate(gs):
                        tab[i, j] = idx[self._compose_fn(g, f)]
            tab = tab.astype(_small_dtype(self.hom_size(a, c)), copy=False)
            self._comp[key] = tab
        return tab

    def global_tables(self) -> "GlobalTables":
        if self._global is None:
            self._global = GlobalTables.build(self)
        return self._global

    def nat_tables(self, fobj: np.ndarray, gobj: np.ndarray) -> "NatTables":
        key = (tuple(int(x) for x in fobj), tuple(int(x) for x in gobj))
        nt = self._nat_cache.get(key)
        if nt is None:
            nt = NatTables.build(self, fobj, gobj)
            self._nat_cache[key] = nt
        return nt


@dataclass
class GlobalTables:
    n_obj: int
    hom_offset: np.ndarray   # (N, N) start of hom(a,b) in the global id space
    hom_size: np.ndarray     # (N, N)
    src: np.ndarray          # (M,)
    tgt: np.ndarray          # (M,)
    local: np.ndarray        # (M,)
    identity: np.ndarray     # (N,) global ids of identities

    @classmethod
    def build(cls, sk: Skeleton) -> "GlobalTables":
        n = len(sk)
        hom_offset = np.zeros((n, n), dtype=np.int64)
        hom_size = np.zeros((n, n), dtype=np.int64)
        src, tgt, local = [], [], []
        total = 0
        for a in range(n):
            for b in range(n):
                h = sk.hom_size(a, b)
                hom_offset[a, b], hom_size[a, b] = total, h
                src.append(np.full(h, a))
                tgt.append(np.full(h, b))
                local.append(np.arange(h))
                total += h
        identity = np.array([hom_offset[a, a] + sk.identity_index(a) for a in range(n)], dtype=np.int64)
        cat = (lambda xs: np.concatenate(xs).astype(np.int64) if xs else np.zeros(0, dtype=np.int64))
        return cls(n, hom_offset, hom_size, cat(src), cat(tgt), cat(local), identity)

    @property
    def n_mor(self) -> int:
        return len(self.src)

    def block(self, a: int, b: int) -> slice:
        o = int(self.hom_offset[a, b])
        return slice(o, o + int(self.hom_size[a, b]))


@dataclass
class NatTables:
    """Composition restricted to the triples met in naturality squares F ⇒ G.

    For ``f: a -> b`` and components ``α``:
    ``G(f)∘α_a = flat[left[a,b] + loc(α_a)*hom_size(Ga,Gb) + loc(G f)]`` and
    ``α_b∘F(f) = flat[right[a,b] + loc(F f)*hom_size(Fb,Gb) + loc(α_b)]``.
    """

    left: np.ndarray
    right: np.ndarray
    flat: np.ndarray

    @classmethod
    def build(cls, sk: Skeleton, fobj, gobj) -> "NatTables":
        n = len(sk)
        left = np.zeros((n, n), dtype=np.int64)
        right = np.zeros((n, n), dtype=np.int64)
        chunks, pos = [], 0
        seen: dict = {}
        for a in range(n):
            for b in range(n):
                for key, out in (((fobj[a], gobj[a], gobj[b]), left), ((fobj[a], fobj[b], gobj[b]), right)):
                    key = tuple(int(x) for x in key)
                    if key not in seen:
                        tab = sk.comp(*key)
                        seen[key] = pos
                        chunks.append(tab.ravel().astype(np.int64))
                        pos += tab.size
                    out[a, b] = seen[key]
        flat = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)
        return cls(left, right, flat)


# -- functors -------------------------------------------------------------------------

@dataclass
class FunctorData:
    """An endofunctor of a skeleton: object map and global morphism map."""

    skeleton: Skeleton
    obj: np.ndarray
    mor: np.ndarray
    name: str = ""

    def __eq__(self, other):
        return (isinstance(other, FunctorData) and self.skeleton is other.skeleton
                and np.array_equal(self.obj, other.obj) and np.array_equal(self.mor, other.mor))

    def image(self, a: int, b: int, i: int) -> tuple[int, int, int]:
        """Image of ``hom(a,b)[i]`` as (source, target, local index)."""
        g = self.skeleton.global_tables()
        x = self.mor[g.hom_offset[a, b] + i]
        return int(g.src[x]), int(g.tgt[x]), int(g.local[x])

    def image_of(self, a: int, b: int, f):
        sk = self.skeleton
        s, t, k = self.image(a, b, sk.hom_index(a, b, f))
        return sk.hom(s, t)[k]

    def local_map(self, a: int, b: int) -> np.ndarray:
        g = self.skeleton.global_tables()
        return g.local[self.mor[g.block(a, b)]]

    def to_json(self) -> dict:
        sk = self.skeleton
        g = sk.global_tables()
        return {
            "schema": "treetheta.functor/1",
            "skeleton": {"kind": sk.kind, "hash": sk.content_hash(), "objects": sk.manifest()},
            "name": self.name,
            "objects": [int(x) for x in self.obj],
            "morphisms": [[int(g.src[x]), int(g.tgt[x]), int(g.local[x])] for x in self.mor],
        }


def functor_from_json(data: dict, sk: Skeleton) -> FunctorData:
    if data.get("schema") != "treetheta.functor/1":
        raise ValueError("unknown functor schema")
    if data["skeleton"]["hash"] != sk.content_hash():
        raise ValueError("functor data refers to a different skeleton")
    g = sk.global_tables()
    mor = np.array([g.hom_offset[s, t] + k for s, t, k in data["morphisms"]], dtype=np.int64)
    return FunctorData(sk, np.array(data["objects"], dtype=np.int64), mor, data.get("name", ""))


def functor_from_maps(sk: Skeleton, obj_fn: Callable, mor_fn: Callable, name: str = "") -> FunctorData:
    """Tabulate a functor given on objects and morphisms (raises on values outside the skeleton)."""
    g = sk.global_tables()
    obj = np.array([sk.index[obj_fn(o)] for o in sk.objects], dtype=np.int64)
    mor = np.empty(g.n_mor, dtype=np.int64)
    for a in range(len(sk)):
        for b in range(len(sk)):
            fa, fb = obj[a], obj[b]
            base = g.hom_offset[a, b]
            tgt = g.hom_offset[fa, fb]
            for i, f in enumerate(sk.hom(a, b)):
                mor[base + i] = tgt + sk.hom_index(fa, fb, mor_fn(f))
    return FunctorData(sk, obj, mor, name)


def identity_functor(sk: Skeleton) -> FunctorData:
    g = sk.global_tables()
    return FunctorData(sk, np.arange(len(sk), dtype=np.int64), np.arange(g.n_mor, dtype=np.int64), "identity")


def compose_functors(G: FunctorData, F: FunctorData) -> FunctorData:
    if G.skeleton is not F.skeleton:
        raise ValueError("functors on different skeleta")
    return FunctorData(F.skeleton, G.obj[F.obj], G.mor[F.mor], f"{G.name}∘{F.name}")


@dataclass(frozen=True)
class FunctorViolation:
    law: str
    witness: tuple


def validate_functor(F: FunctorData, limit: int = 20) -> list[FunctorViolation]:
    """Typing, identities and every composite inside the skeleton."""
    sk = F.skeleton
    g = sk.global_tables()
    n = g.n_obj
    out: list[FunctorViolation] = []
    if len(F.obj) != n or len(F.mor) != g.n_mor:
        return [FunctorViolation("totality", ("table sizes",))]
    bad = np.nonzero((g.src[F.mor] != F.obj[g.src]) | (g.tgt[F.mor] != F.obj[g.tgt]))[0]
    for x in bad[:limit]:
        out.append(FunctorViolation("typing", (int(g.src[x]), int(g.tgt[x]), int(g.local[x]))))
    if out:
        return out
    bad = np.nonzero(F.mor[g.identity] != g.identity[F.obj])[0]
    for a in bad[:limit]:
        out.append(FunctorViolation("identity", (int(a),)))
    loc = [[F.local_map(a, b) for b in range(n)] for a in range(n)]
    for a in range(n):
        for b in range(n):
            if not g.hom_size[a, b]:
                continue
            for c in range(n):
                if not g.hom_size[b, c]:
                    continue
                tab = sk.comp(a, b, c)
                ftab = sk.comp(int(F.obj[a]), int(F.obj[b]), int(F.obj[c]))
                lhs = loc[a][c][tab.astype(np.int64)]
                rhs = ftab[loc[a][b][:, None], loc[b][c][None, :]]
                bad = np.argwhere(lhs != rhs)
                for i, j in bad[:max(0, limit - len(out))]:
                    out.append(FunctorViolation("composition", ((a, b, int(i)), (b, c, int(j)))))
                if len(out) >= limit:
                    return out
    return out


# -- natural transformations --------------------------------------------------------------

@dataclass(frozen=True)
class NatTransfData:
    """Components as local indices into hom(F a, G a), one per skeleton object."""

    components: tuple


def check_naturality(F: FunctorData, G: FunctorData, alpha: Sequence[int]) -> bool:
    sk = F.skeleton
    g = sk.global_tables()
    nt = sk.nat_tables(F.obj, G.obj)
    n = g.n_obj
    for a in range(n):
        for b in range(n):
            if not g.hom_size[a, b]:
                continue
            fa, ga, fb, gb = F.obj[a], G.obj[a], F.obj[b], G.obj[b]
            lhs = nt.flat[nt.left[a, b] + alpha[a] * g.hom_size[ga, gb] + G.local_map(a, b)]
            rhs = nt.flat[nt.right[a, b] + F.local_map(a, b) * g.hom_size[fb, gb] + alpha[b]]
            if not np.array_equal(lhs, rhs):
                return False
    return True


def enumerate_nat_transfs(F: FunctorData, G: FunctorData, limit: int | None = None) -> list[NatTransfData]:
    """Every natural transformation F ⇒ G on the skeleton, in lexicographic order."""
    if F.skeleton is not G.skeleton:
        raise ValueError("functors on different skeleta")
    sk = F.skeleton
    g = sk.global_tables()
    nt = sk.nat_tables(F.obj, G.obj)
    n = g.n_obj
    hs = g.hom_size
    size = [int(hs[F.obj[a], G.obj[a]]) for a in range(n)]
    order = sorted(range(n), key=lambda a: (size[a], a))
    Floc = [[F.local_map(a, b) for b in range(n)] for a in range(n)]
    Gloc = [[G.local_map(a, b) for b in range(n)] for a in range(n)]
    alpha = np.full(n, -1, dtype=np.int64)
    results: list[NatTransfData] = []

    def filt(a, placed):
        cand = np.arange(size[a])
        fa, ga = F.obj[a], G.obj[a]
        for b in placed + [a]:
            fb, gb = F.obj[b], G.obj[b]
            if len(cand) == 0:
                break
            if hs[a, b]:
                # G(f)∘α_a == α_b∘F(f) for f: a -> b
                lhs = nt.flat[nt.left[a, b] + cand[:, None] * hs[ga, gb] + Gloc[a][b][None, :]]
                ab = cand[:, None] if b == a else alpha[b]
                rhs = nt.flat[nt.right[a, b] + Floc[a][b][None, :] * hs[fb, gb] + ab]
                cand = cand[np.all(lhs == rhs, axis=1)]
            if b != a and hs[b, a] and len(cand):
                # G(f)∘α_b == α_a∘F(f) for f: b -> a
                lhs = nt.flat[nt.left[b, a] + alpha[b] * hs[gb, ga] + Gloc[b][a]]
                rhs = nt.flat[nt.right[b, a] + Floc[b][a][None, :] * hs[fa, ga] + cand[:, None]]
                cand = cand[np.all(rhs == lhs[None, :], axis=1)]
        return cand

    def search(k, placed):
        if limit is not None and len(results) >= limit:
            return
        if k == n:
            results.append(NatTransfData(tuple(int(x) for x in alpha)))
            return
        a = order[k]
        for c in filt(a, placed):
            alpha[a] = c
            search(k + 1, placed + [a])
        alpha[a] = -1

    search(0, [])
    results.sort(key=lambda t: t.components)
    return results
