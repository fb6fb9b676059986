"""Reference autoequivalences of finite skeleta and classification of functor data."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import omega, theta
from .skeleton import (FunctorData, NatTransfData, Skeleton, enumerate_nat_transfs, functor_from_json,
                       identity_functor, validate_functor)
from .trees import mirror_tree

__all__ = [
    "Classification", "build_reference_functor", "classify_autoequivalence", "enumerate_nat_transfs",
    "validate_functor", "first_difference", "load_functor", "save_functor", "NatTransfData",
]

KINDS = ("identity", "F_sigma", "op_delta", "mirror")


def _family(sk: Skeleton) -> str:
    if sk.kind.startswith("theta"):
        return "theta"
    return "planar" if sk.kind.startswith("omega-planar") else "omega"


def build_reference_functor(kind: str, sk: Skeleton, param=None) -> FunctorData:
    """Tabulate one of the standard autoequivalences on a skeleton and validate it."""
    fam = _family(sk)
    if kind == "identity":
        F = identity_functor(sk)
    elif kind == "F_sigma":
        if fam != "omega":
            raise ValueError("F_σ lives on symmetric tree skeleta")
        sigma = param if isinstance(param, omega.SigmaOmega) else omega.SigmaOmega.from_dict(param or {})
        F = omega.F_sigma_functor(sk, sigma)
    elif kind == "op_delta":
        if fam != "theta":
            raise ValueError("op_δ lives on table skeleta")
        n = int(sk.kind[len("theta"):])
        delta = tuple(param) if param is not None else (0,) * n
        if len(delta) != n or any(d not in (0, 1) for d in delta):
            raise ValueError(f"δ must be a 0/1 vector of length {n}")
        try:
            F = theta.op_delta_functor(sk, delta)
        except KeyError as e:
            raise ValueError(f"the skeleton is not closed under op_δ: {e}") from None
    elif kind == "mirror":
        if fam != "planar":
            raise ValueError("the mirror functor lives on planar tree skeleta")
        missing = [t.literal for t in sk.objects if mirror_tree(t) not in sk.index]
        if missing:
            raise ValueError(f"the skeleton is not closed under mirroring: {missing[:3]}")
        F = omega.mirror_functor(sk)
    else:
        raise ValueError(f"unknown functor kind {kind!r}; expected one of {', '.join(KINDS)}")
    bad = validate_functor(F, limit=1)
    if bad:
        raise ValueError(f"reference functor fails {bad[0].law} at {bad[0].witness}")
    return F


def first_difference(F: FunctorData, G: FunctorData):
    """The first object or morphism on which two functors disagree, or None."""
    sk = F.skeleton
    for a in range(len(sk)):
        if F.obj[a] != G.obj[a]:
            return ("object", sk.label(sk.objects[a]))
    g = sk.global_tables()
    diff = np.nonzero(F.mor != G.mor)[0]
    if not len(diff):
        return None
    x = int(diff[0])
    a, b, i = int(g.src[x]), int(g.tgt[x]), int(g.local[x])
    return ("morphism", sk.label(sk.objects[a]), sk.label(sk.objects[b]), i)


@dataclass
class Classification:
    verdict: str            # identity, F_sigma, op_delta, mirror, none or indeterminate
    parameter: object = None
    counterexample: object = None
    reason: str = ""

    def describe(self) -> str:
        if self.verdict == "F_sigma":
            return f"F_σ, σ = ({self.parameter.describe()})"
        if self.verdict == "op_delta":
            return f"op_δ, δ = ({','.join(map(str, self.parameter))})"
        if self.verdict in ("identity", "mirror"):
            return self.verdict
        if self.verdict == "indeterminate":
            return f"indeterminate: {self.reason}"
        out = f"not of the expected form: {self.reason}"
        if self.counterexample is not None:
            out += f" (first difference {self.counterexample})"
        return out


def classify_autoequivalence(F: FunctorData, flavour: str | None = None) -> Classification:
    sk = F.skeleton
    flavour = flavour or _family(sk)
    if flavour == "symmetric":
        flavour = "omega"
    if flavour != _family(sk):
        raise ValueError(f"flavour {flavour!r} does not match the skeleton kind {sk.kind!r}")
    bad = validate_functor(F, limit=1)
    if bad:
        raise ValueError(f"not a functor: {bad[0].law} at {bad[0].witness}")
    if flavour == "omega":
        return _classify_omega(F)
    if flavour == "theta":
        return _classify_theta(F)
    return _classify_planar(F)


def _classify_omega(F):
    sk = F.skeleton
    if omega.ETA not in sk.index:
        return Classification("indeterminate", reason="the skeleton does not contain η")
    try:
        sigma = omega.sigma_of_functor(F)
    except omega.SigmaExtractionError as e:
        return Classification("none", reason=f"not of Σ_Ω form on this skeleton: {e}")
    diff = first_difference(F, omega.F_sigma_functor(sk, sigma))
    if diff is not None:
        return Classification("none", sigma, diff, "not of Σ_Ω form on this skeleton")
    return Classification("F_sigma", sigma)


def _classify_theta(F):
    sk = F.skeleton
    n = int(sk.kind[len("theta"):])
    try:
        delta = theta.delta_of_functor(F, n)
    except theta.DeltaExtractionError as e:
        if "lacks" in str(e):
            return Classification("indeterminate", reason=str(e))
        return Classification("none", reason=str(e))
    try:
        ref = theta.op_delta_functor(sk, delta)
    except KeyError:
        return Classification("indeterminate", delta, reason="the skeleton is not closed under op_δ")
    diff = first_difference(F, ref)
    if diff is not None:
        return Classification("none", delta, diff, f"differs from op_δ with δ = {delta}")
    return Classification("op_delta", delta)


def _classify_planar(F):
    sk = F.skeleton
    cands = [("identity", identity_functor(sk))]
    if all(mirror_tree(t) in sk.index for t in sk.objects):
        cands.append(("mirror", omega.mirror_functor(sk)))
    hits = [name for name, G in cands if first_difference(F, G) is None]
    sig = omega.planar_signature(F) if omega.ETA in sk.index else None
    if len(hits) == 1:
        return Classification(hits[0], sig.perms if sig else None)
    if len(hits) > 1:
        return Classification("indeterminate", reason="identity and mirror agree on this skeleton")
    if len(cands) == 1:
        return Classification("indeterminate", reason="the skeleton is not closed under mirroring")
    return Classification("none", sig.perms if sig else None, first_difference(F, cands[0][1]),
                          "neither identity nor mirror")


# -- files ------------------------------------------------------------------------------------

def save_functor(F: FunctorData, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(F.to_json(), fh, ensure_ascii=False)
        fh.write("\n")


def load_functor(path, sk: Skeleton) -> FunctorData:
    """Load functor data; the file must name the skeleton by its content hash."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return functor_from_json(data, sk)
