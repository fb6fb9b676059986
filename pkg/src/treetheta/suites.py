"""Named verification suites with deterministic reports."""
from __future__ import annotations

import itertools
import json
import math
import time
import unicodedata
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import autocheck, finop, omega, segal, theta
from .skeleton import compose_functors, enumerate_nat_transfs, validate_functor
from .trees import ETA, PLANAR, SYMMETRIC, as_tree, corolla, mirror_tree, planar_trees, symmetric_trees

B3 = "((η η) η)"


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class Bounds:
    flavour: str | None = None      # None means both
    n: int = 2
    max_vertices: int = 3
    max_arity: int = 2
    max_columns: int = 3
    budget: float = 120.0

    def flavours(self) -> tuple:
        return (self.flavour,) if self.flavour else (SYMMETRIC, PLANAR)

    def as_dict(self) -> dict:
        return {"flavour": self.flavour or "both", "n": self.n, "max_vertices": self.max_vertices,
                "max_arity": self.max_arity, "max_columns": self.max_columns}


@dataclass
class Check:
    name: str
    passed: bool
    count: int = 0
    detail: str = ""
    counterexample: object = None


@dataclass
class SuiteReport:
    suite: str
    bounds: dict
    checks: list = field(default_factory=list)
    wall_time: float = 0.0
    aborted: str = ""

    @property
    def status(self) -> str:
        return "pass" if self.checks and all(c.passed for c in self.checks) and not self.aborted else "fail"

    @property
    def first_counterexample(self):
        return next((c.counterexample for c in self.checks if not c.passed), None)

    def as_json(self) -> dict:
        return {
            "suite": self.suite, "bounds": self.bounds, "status": self.status, "aborted": self.aborted,
            "checks": [{"name": c.name, "status": "pass" if c.passed else "fail", "count": c.count,
                        "detail": c.detail, "counterexample": _plain(c.counterexample)} for c in self.checks],
            "first_counterexample": _plain(self.first_counterexample),
        }

    def render(self, fmt: str = "text", ascii_only: bool = False) -> str:
        # wall time is left out so that reports are reproducible byte for byte
        if fmt == "json":
            out = json.dumps(self.as_json(), indent=1, ensure_ascii=False)
        else:
            lines = [f"suite {self.suite}",
                     "bounds " + " ".join(f"{k}={v}" for k, v in self.bounds.items())]
            for c in self.checks:
                line = f"[{'pass' if c.passed else 'FAIL'}] {c.name}: count={c.count}"
                if c.detail:
                    line += f"; {c.detail}"
                lines.append(line)
                if not c.passed and c.counterexample is not None:
                    lines.append(f"    counterexample: {_plain(c.counterexample)}")
            if self.aborted:
                lines.append(f"aborted: {self.aborted}")
            lines.append(f"verdict: {self.status}")
            out = "\n".join(lines)
        return to_ascii(out) if ascii_only else out


ASCII = {"η": "eta", "σ": "sigma", "τ": "tau", "δ": "delta", "Θ": "Theta", "Ω": "Omega", "Σ": "Sigma",
         "μ": "mu", "∘": "o", "⨿": "+", "→": "->", "≤": "<=", "≠": "!=", "×": "x", "₀": "0", "₁": "1",
         "₂": "2", "₃": "3", "₄": "4", "₅": "5", "⇔": "<=>", "∅": "{}",
         "↔": "<->", "⊔": "+", "∈": " in ", "⁻": "^-", "¹": "1", "·": "."}


def to_ascii(s: str) -> str:
    out = []
    for ch in s:
        if ch in ASCII:
            out.append(ASCII[ch])
        elif ord(ch) < 128:
            out.append(ch)
        else:
            out.append("<" + unicodedata.name(ch, "?").lower() + ">")
    return "".join(out)


def _plain(x):
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    return str(x)


class _Clock:
    def __init__(self, budget: float):
        self.start = time.perf_counter()
        self.budget = budget

    def tick(self):
        if time.perf_counter() - self.start > self.budget:
            raise BudgetExceeded(f"time budget of {self.budget:g} s exceeded")


def _trees(flavour, b: Bounds):
    gen = symmetric_trees if flavour == SYMMETRIC else planar_trees
    return gen(b.max_vertices, b.max_arity)


def _omega_skeleton(flavour, b: Bounds):
    return omega.omega_skeleton(omega.default_trees(flavour, b.max_vertices, b.max_arity), flavour)


# -- suites ----------------------------------------------------------------------------------------

def suite_hom_oracle(b: Bounds, clock: _Clock) -> list[Check]:
    checks = []
    for flavour in b.flavours():
        trees = _trees(flavour, b)
        bad, total = None, 0
        for s in trees:
            fs = finop.free_operad(s, flavour)
            for t in trees:
                homs = omega.hom_trees(s, t, flavour)
                maps = finop.operad_maps(fs, finop.free_operad(t, flavour))
                total += len(homs)
                a = Counter(f.edges for f in homs)
                o = Counter(m.colours for m in maps)
                if a != o and bad is None:
                    bad = (s.literal, t.literal, len(homs), len(maps))
            clock.tick()
        checks.append(Check(f"{flavour} hom_trees against operad maps", bad is None, len(trees) ** 2,
                            f"{len(trees)} trees, {total} morphisms", bad))
    return checks


def suite_spine(b: Bounds, clock: _Clock) -> list[Check]:
    checks = []
    for flavour in b.flavours():
        trees = _trees(flavour, b)
        bad = None
        for t in trees:
            for u in trees:
                r = omega.check_cone_bijection(t, u, flavour)
                if not r.ok and bad is None:
                    bad = (t.literal, u.literal, r.problems[:2])
            clock.tick()
        checks.append(Check(f"{flavour} restriction to Cor/T is bijective", bad is None, len(trees) ** 2,
                            f"{len(trees)} trees", bad))
    return checks


def suite_segal(b: Bounds, clock: _Clock) -> list[Check]:
    checks = []
    ops = finop.corpus()
    for flavour in b.flavours():
        sk = _omega_skeleton(flavour, b)
        bad, n = None, 0
        for key, p in ops.items():
            if p.flavour != flavour:
                continue
            x = segal.nerve_presheaf(p, sk)
            for r in segal.segal_all(x):
                n += 1
                if not r.ok and bad is None:
                    bad = (key, r.object, r.collision, r.missing)
            clock.tick()
        checks.append(Check(f"{flavour} nerves of the corpus are Segal", bad is None, n,
                            f"{len(sk)} skeleton objects", bad))
        caught = []
        for name, x in segal.engineered_mutants(sk):
            if any(not r.ok for r in segal.segal_all(x)):
                caught.append(name)
        checks.append(Check(f"{flavour} engineered mutants fail", len(caught) >= 3, len(caught), ", ".join(caught)))
        clock.tick()
    cats = [finop.underlying_category(ops[k]) for k in ("chain", "j")]
    tk = theta.theta_skeleton(b.n, b.max_columns)
    bad, n = None, 0
    for cat in cats:
        x = segal.category_nerve(cat, tk)
        for r in segal.segal_all(x):
            n += 1
            if not r.ok and bad is None:
                bad = (cat.name, r.object)
        clock.tick()
    checks.append(Check(f"category nerves on Θ{b.n} are Segal", bad is None, n, f"{len(tk)} tables", bad))
    return checks


def rigidity_probes(flavour):
    return [as_tree(x) for x in ("η", "(η)", "(η η)", B3)]


def suite_rigidity(b: Bounds, clock: _Clock) -> list[Check]:
    ops = [(k, p) for k, p in finop.corpus().items() if p.flavour == SYMMETRIC]
    ops += [(t.literal, finop.free_operad(t)) for t in symmetric_trees(b.max_vertices, b.max_arity)]
    bad, verdicts = None, Counter()
    probes = [finop.free_operad(t) for t in rigidity_probes(SYMMETRIC)]
    for key, p in ops:
        r, loc = finop.is_rigid(p), finop.locality(p)
        ih = [finop.internal_hom_category(q, p).is_rigid() for q in probes]
        verdicts[r] += 1
        if not (r == loc == all(ih)) and bad is None:
            bad = (key, r, loc, ih)
        clock.tick()
    j = finop.corpus()["j"]
    checks = [
        Check("is_rigid = locality = rigid internal homs", bad is None, len(ops),
              f"{verdicts[True]} rigid, {verdicts[False]} not rigid", bad),
        Check("J is not rigid", not finop.is_rigid(j) and not finop.locality(j), 1),
        Check("free operads are rigid", all(finop.is_rigid(p) for k, p in ops if k.startswith(("(", "η", "free"))),
              sum(1 for k, _ in ops if k.startswith(("(", "η", "free")))),
    ]
    return checks


def suite_sigma(b: Bounds, clock: _Clock) -> list[Check]:
    sk = _omega_skeleton(SYMMETRIC, b)
    sigmas = omega.all_sigmas(sk.objects)
    functors, bad_valid, bad_retract, bad_rebuild = [], None, None, None
    for s in sigmas:
        F = omega.F_sigma_functor(sk, s)
        if validate_functor(F, limit=1) and bad_valid is None:
            bad_valid = s.describe()
        t = omega.sigma_of_functor(F)
        if t != s and bad_retract is None:
            bad_retract = (s.describe(), t.describe())
        if omega.F_sigma_functor(sk, t) != F and bad_rebuild is None:
            bad_rebuild = s.describe()
        functors.append(F)
    clock.tick()
    bad_nat, pairs = None, 0
    for F in functors:
        for G in functors:
            k = len(enumerate_nat_transfs(F, G, limit=2))
            pairs += 1
            if k != 1 and bad_nat is None:
                bad_nat = (F.name, G.name, k)
        clock.tick()
    n = len(sigmas)
    return [
        Check("every F_σ is a functor", bad_valid is None, n, f"{len(sk)} trees", bad_valid),
        Check("σ(F_σ) = σ", bad_retract is None, n, counterexample=bad_retract),
        Check("F_σ(F) = F", bad_rebuild is None, n, counterexample=bad_rebuild),
        Check("|Nat(F_σ, F_σ')| = 1", bad_nat is None, pairs, counterexample=bad_nat),
    ]


def suite_mirror(b: Bounds, clock: _Clock) -> list[Check]:
    trees = planar_trees(6, 3)
    bad = next((t.literal for t in trees if mirror_tree(mirror_tree(t)) != t or
                mirror_tree(t).n_edges != t.n_edges), None)
    clock.tick()
    sk = _omega_skeleton(PLANAR, b)
    I = autocheck.build_reference_functor("identity", sk)
    M = autocheck.build_reference_functor("mirror", sk)
    sig = omega.planar_signature(M)
    mu_ok = all(sig.perms.get(n) == tuple(range(n, 0, -1)) for n in range(1, 6))
    b3 = as_tree(B3)
    h = (len(omega.hom_trees(b3, mirror_tree(b3), PLANAR)), len(omega.hom_trees(mirror_tree(b3), b3, PLANAR)))
    clock.tick()
    pattern = [[len(enumerate_nat_transfs(F, G)) for G in (I, M)] for F in (I, M)]
    return [
        Check("mirror is an involution on planar trees", bad is None, len(trees),
              "≤ 6 vertices, arity ≤ 3", bad),
        Check("M is a functor with M∘M = id", compose_functors(M, M) == I, len(sk)),
        Check("σ(M)_n = μ_n", mu_ok, 5, " ".join(f"{n}:{list(p)}" for n, p in sorted(sig.perms.items())),
              None if mu_ok else sig.perms),
        Check("no maps between B₃ and M(B₃)", h == (0, 0), 2, f"{h[0]} and {h[1]}", None if h == (0, 0) else h),
        Check("Nat pattern on {id, M}", pattern == [[1, 0], [0, 1]], 4, str(pattern)),
    ]


def monotone_count(m: int, k: int) -> int:
    """Order preserving maps [m] -> [k]."""
    return math.comb(m + k + 1, m + 1)


def strict_2_functor_count(s: tuple, t: tuple) -> int:
    """Brute force count of strict 2-functors between the free 2-categories on two pastings."""
    m, k = len(s), len(t)
    a, bt = [len(c) for c in s], [len(c) for c in t]
    total = 0
    for o in itertools.product(range(k + 1), repeat=m + 1):
        if any(o[i] > o[i + 1] for i in range(m)):
            continue
        prod = 1
        for i in range(1, m + 1):
            chains = [range(bt[j - 1] + 1) for j in range(o[i - 1] + 1, o[i] + 1)]
            points = list(itertools.product(*chains))
            n = 0
            for f in itertools.product(points, repeat=a[i - 1] + 1):
                if all(all(x <= y for x, y in zip(f[r], f[r + 1])) for r in range(a[i - 1])):
                    n += 1
            prod *= n
        total += prod
    return total


def suite_theta_structure(b: Bounds, clock: _Clock) -> list[Check]:
    objs = theta.level_trees(3, 4)
    bad_rt = next((s for s in objs if theta.table_leveltree(theta.leveltree_table(s)) != s or
                   theta.as_object(theta.table_literal(s)) != s), None)
    tables = set()
    for m in range(1, 5):
        for top in itertools.product(range(4), repeat=m):
            for bottom in itertools.product(range(4), repeat=m - 1):
                try:
                    tables.add(theta.validate_table(top, bottom))
                except theta.TableError:
                    pass
    images = {theta.table_leveltree(t) for t in tables}
    bij = len(images) == len(tables) == len(objs) and images == set(objs)
    clock.tick()
    bad1 = None
    for m in range(6):
        for k in range(6):
            s, t = (theta.POINT,) * m, (theta.POINT,) * k
            if len(theta.hom_tables(s, t)) != monotone_count(m, k) and bad1 is None:
                bad1 = (m, k, len(theta.hom_tables(s, t)), monotone_count(m, k))
    small = theta.level_trees(2, 2)
    bad2 = None
    for s in small:
        for t in small:
            if len(theta.hom_tables(s, t)) != strict_2_functor_count(s, t) and bad2 is None:
                bad2 = (theta.table_literal(s), theta.table_literal(t))
        clock.tick()
    d2 = len(theta.hom_tables(theta.disk(2), theta.disk(2)))
    return [
        Check("table ↔ level tree round trip", bad_rt is None and bij, len(objs),
              f"{len(tables)} tables, height ≤ 3, ≤ 4 columns", bad_rt),
        Check("Θ₁ homs against monotone maps", bad1 is None, 36, counterexample=bad1),
        Check("Θ₂ homs against strict 2-functors", bad2 is None, len(small) ** 2, counterexample=bad2),
        Check("|Θ₂(D₂, D₂)| = 5", d2 == 5, 1, str(d2)),
    ]


def suite_factorization(b: Bounds, clock: _Clock) -> list[Check]:
    sk = theta.theta_skeleton(b.n, b.max_columns)
    n = len(sk)
    flags = {}
    for a in range(n):
        for c in range(n):
            homs = sk.hom(a, c)
            flags[(a, c)] = (np.array([theta.is_active(f) for f in homs], dtype=bool),
                             np.array([theta.is_inert(f) for f in homs], dtype=bool))
    clock.tick()
    bad, total = None, 0
    for a in range(n):
        for c in range(n):
            size = sk.hom_size(a, c)
            if not size:
                continue
            counts = np.zeros(size, dtype=np.int64)
            for u in range(n):
                act, _ = flags[(a, u)]
                _, inert = flags[(u, c)]
                if not act.any() or not inert.any():
                    continue
                tab = sk.comp(a, u, c)[np.ix_(act, inert)]
                counts += np.bincount(tab.ravel().astype(np.int64), minlength=size)
            total += size
            if (counts != 1).any() and bad is None:
                i = int(np.nonzero(counts != 1)[0][0])
                bad = (sk.label(sk.objects[a]), sk.label(sk.objects[c]), i, int(counts[i]))
        clock.tick()
    bad_direct = None
    for a in range(n):
        for c in range(n):
            for f in sk.hom(a, c):
                act, ine = theta.factor_active_inert(f)
                if not (theta.is_active(act) and theta.is_inert(ine) and theta.compose(ine, act) == f):
                    bad_direct = bad_direct or f.describe()
    pairs = [(kp, k) for k in range(4) for kp in range(k)]
    monos = {p: len(theta.disk_monos(*p)) for p in pairs}
    return [
        Check("unique active-inert factorization", bad is None, total, f"{n} tables", bad),
        Check("factor_active_inert returns a factorization", bad_direct is None, total, counterexample=bad_direct),
        Check("two monos D_k' -> D_k for k' < k ≤ 3", all(v == 2 for v in monos.values()), len(pairs),
              " ".join(f"{kp}{k}:{v}" for (kp, k), v in monos.items())),
    ]


def suite_op_delta(b: Bounds, clock: _Clock) -> list[Check]:
    sk = theta.theta_skeleton(b.n, b.max_columns)
    deltas = theta.all_deltas(b.n)
    F = {d: autocheck.build_reference_functor("op_delta", sk, d) for d in deltas}
    clock.tick()
    monoid = all(compose_functors(F[d], F[e]) == F[tuple((x + y) % 2 for x, y in zip(d, e))]
                 for d in deltas for e in deltas)
    moved = {d: [sk.label(sk.objects[a]) for a in range(len(sk)) if F[d].obj[a] != a] for d in deltas}
    ident = [d for d in deltas if moved[d]]
    retract = all(theta.delta_of_functor(F[d], b.n) == d for d in deltas)
    clock.tick()
    pattern = [[len(enumerate_nat_transfs(F[d], F[e])) for e in deltas] for d in deltas]
    kron = pattern == [[int(d == e) for e in deltas] for d in deltas]
    clock.tick()
    objs3 = theta.level_trees(3, 3)
    bad_disk = None
    for t in objs3:
        for k in range(4):
            if theta.satisfies_disk_characterization(t, k, objs3) != (t == theta.disk(k)) and bad_disk is None:
                bad_disk = (theta.table_literal(t), k)
        clock.tick()
    first = next(iter(ident), None)
    return [
        Check("op_δ ∘ op_δ' = op_{δ+δ'}", monoid, len(deltas) ** 2),
        Check("op_δ is the identity on objects", not ident, len(deltas),
              ", ".join(f"{''.join(map(str, d))} moves {len(moved[d])}" for d in deltas),
              None if first is None else (list(first), moved[first][:2])),
        Check("δ(op_δ) = δ", retract, len(deltas)),
        Check("Nat(op_δ, op_δ') is a Kronecker delta", kron, len(deltas) ** 2, str(pattern)),
        Check("disks characterized by their subobjects", bad_disk is None, len(objs3) * 4,
              f"{len(objs3)} tables of height ≤ 3", bad_disk),
    ]


def suite_normality(b: Bounds, clock: _Clock) -> list[Check]:
    sk = _omega_skeleton(SYMMETRIC, b)
    ex = segal.normality_examples(sk)
    verdicts = [(name, segal.normality_check(m).normal, expected) for name, m, expected in ex]
    ok = all(v == e for _, v, e in verdicts)
    pk = _omega_skeleton(PLANAR, b)
    n, bad = 0, None
    for key, p in finop.corpus().items():
        if p.flavour != PLANAR:
            continue
        x = segal.nerve_presheaf(p, pk)
        monos = [segal.colours_only(x)]
        for a in range(len(pk)):
            for y in range(len(x.values[a])):
                monos.append(segal.generated_subpresheaf(x, {a: [y]}))
        for m in monos:
            n += 1
            if not segal.normality_check(m).normal and bad is None:
                bad = key
        clock.tick()
    return [
        Check("bundled examples classified", ok, len(verdicts),
              "; ".join(f"{name}: {'normal' if v else 'not normal'}" for name, v, _ in verdicts)),
        Check("planar monos are normal", bad is None, n, counterexample=bad),
    ]


SUITES = {
    "omega-hom-oracle": suite_hom_oracle,
    "omega-spine": suite_spine,
    "segal": suite_segal,
    "rigidity": suite_rigidity,
    "sigma-omega": suite_sigma,
    "planar-mirror": suite_mirror,
    "theta-structure": suite_theta_structure,
    "theta-factorization": suite_factorization,
    "op-delta": suite_op_delta,
    "normality": suite_normality,
}


class UnknownSuite(KeyError):
    def __str__(self):
        return f"unknown suite {self.args[0]!r}; available: {', '.join(SUITES)}"


def run_suite(name: str, bounds: Bounds | None = None) -> SuiteReport:
    if name not in SUITES:
        raise UnknownSuite(name)
    bounds = bounds or Bounds()
    clock = _Clock(bounds.budget)
    report = SuiteReport(name, bounds.as_dict())
    try:
        report.checks = SUITES[name](bounds, clock)
    except BudgetExceeded as e:
        report.aborted = str(e)
    report.wall_time = time.perf_counter() - clock.start
    return report
