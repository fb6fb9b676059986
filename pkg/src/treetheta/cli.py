"""Command line driver: ``treetheta <command> ...``."""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import autocheck, finop, omega, segal, suites, theta
from .trees import PLANAR, SYMMETRIC, TreeSyntaxError, as_tree, mirror_tree, render


class UsageError(Exception):
    pass


# -- input helpers ------------------------------------------------------------------------------

def load_operad_arg(arg: str, flavour: str | None = None) -> finop.FinOperad:
    """A corpus name, an operad JSON file, or a tree literal (its free operad)."""
    if os.path.exists(arg):
        return finop.load_operad(arg)
    ops = finop.corpus()
    if arg in ops:
        return ops[arg]
    try:
        return finop.free_operad(as_tree(arg), flavour or SYMMETRIC)
    except TreeSyntaxError:
        raise UsageError(f"{arg!r} is neither a file, a corpus operad ({', '.join(ops)}) nor a tree") from None


def is_table_literal(s: str) -> bool:
    return bool(s.strip()) and all(ch.isdigit() or ch.isspace() or ch == "/" for ch in s)


def _flavour(args) -> str:
    return args.flavour or SYMMETRIC


def _skeleton(args, family: str):
    if family == "theta":
        return theta.theta_skeleton(args.n, args.max_columns)
    fl = PLANAR if family == "planar" else SYMMETRIC
    return omega.omega_skeleton(omega.default_trees(fl, args.max_vertices, args.max_arity), fl)


# -- commands ------------------------------------------------------------------------------------

def cmd_hom(args):
    if is_table_literal(args.source) and is_table_literal(args.target):
        s, t = theta.as_object(args.source), theta.as_object(args.target)
        homs = theta.hom_tables(s, t)
        lines = [f"|Θ({theta.table_literal(s)}, {theta.table_literal(t)})| = {len(homs)}"]
        lines += [f"  {f.describe()}" for f in homs[:args.limit]]
        data = {"count": len(homs), "morphisms": [f.describe() for f in homs[:args.limit]]}
    else:
        fl = _flavour(args)
        s, t = as_tree(args.source), as_tree(args.target)
        homs = omega.hom_trees(s, t, fl)
        lines = [f"|Ω({render(s)}, {render(t)})| = {len(homs)} ({fl})"]
        lines += [f"  {f.to_text()}" for f in homs[:args.limit]]
        data = {"count": len(homs), "flavour": fl, "morphisms": [list(f.edges) for f in homs[:args.limit]]}
    if len(homs) > args.limit:
        lines.append(f"  ... {len(homs) - args.limit} more")
    return lines, data, 0


def cmd_table(args):
    try:
        tab = theta.parse_table(args.literal, args.n)
    except theta.TableError as e:
        where = "" if e.index is None else f" (column {e.index})"
        raise UsageError(f"invalid table{where}: {e}") from None
    s = theta.table_leveltree(tab)
    sp = theta.spine_table(s)
    lines = [f"table      {tab}", f"level tree {s!r}", f"height     {theta.height(s)}",
             f"columns    {tab.m}", f"spine      {sp.describe()}"]
    return lines, {"table": str(tab), "level_tree": repr(s), "height": theta.height(s), "spine": sp.describe()}, 0


def cmd_factor(args):
    s, t = theta.as_object(args.source), theta.as_object(args.target)
    lines, rows = [], []
    for i, f in enumerate(theta.hom_tables(s, t)[:args.limit]):
        a, j = theta.factor_active_inert(f)
        mid = theta.table_literal(a.target)
        lines.append(f"{i}: {f.describe()}  =  inert[{j.describe()}] ∘ active[{a.describe()}] via {mid}")
        rows.append({"morphism": f.describe(), "active": a.describe(), "inert": j.describe(), "middle": mid})
    return lines, {"factorizations": rows}, 0


def cmd_mirror(args):
    t = as_tree(args.tree)
    m = mirror_tree(t)
    lines = [f"tree   {render(t, args.ascii)}", f"mirror {render(m, args.ascii)}",
             f"maps T -> M(T): {len(omega.hom_trees(t, m, PLANAR))}",
             f"maps M(T) -> T: {len(omega.hom_trees(m, t, PLANAR))}"]
    return lines, {"tree": t.literal, "mirror": m.literal}, 0


def cmd_classify(args):
    p = load_operad_arg(args.operad, args.flavour)
    c = finop.classify_operad(p)
    lines = [f"operad {p.name} ({p.flavour}, {len(p.colours)} colours, {len(p.non_unit_ops)} operations)",
             f"category:       {c.is_category}", f"discrete:       {c.is_discrete}",
             f"pseudo-corolla: {c.is_pseudo_corolla}" + (f" (arity {c.corolla_arity})" if c.corolla_arity is not None else "")]
    lines += [f"note: {x}" for x in c.notes]
    data = {"name": p.name, "category": c.is_category, "discrete": c.is_discrete,
            "pseudo_corolla": c.is_pseudo_corolla, "arity": c.corolla_arity, "notes": c.notes}
    return lines, data, 0


def cmd_rigid(args):
    p = load_operad_arg(args.operad, args.flavour)
    rigid, local = finop.is_rigid(p), finop.locality(p)
    per = {}
    for lit in ("η", "(η)", "(η η)", suites.B3):
        per[lit] = finop.internal_hom_category(finop.free_operad(as_tree(lit), p.flavour), p).is_rigid()
    lines = [f"operad {p.name}", f"rigid:   {rigid}", f"j-local: {local}"]
    lines += [f"internal hom from free({lit}) rigid: {v}" for lit, v in per.items()]
    agree = rigid == local == all(per.values())
    lines.append(f"verdict: {'consistent' if agree else 'inconsistent'}")
    return lines, {"rigid": rigid, "local": local, "internal_homs": per, "consistent": agree}, 0 if agree else 1


def cmd_segal(args):
    if args.presheaf:
        with open(args.presheaf, encoding="utf-8") as fh:
            x = segal.presheaf_from_json(json.load(fh))
    else:
        if args.operad is None:
            raise UsageError("give an operad or --presheaf FILE")
        p = load_operad_arg(args.operad, args.flavour)
        if args.theta:
            x = segal.category_nerve(finop.underlying_category(p), _skeleton(args, "theta"))
        else:
            x = segal.nerve_presheaf(p, _skeleton(args, "planar" if p.flavour == PLANAR else "omega"))
    reports = segal.segal_all(x)
    lines = []
    for r in reports:
        state = "ok" if r.ok else "FAIL"
        lines.append(f"[{state}] {r.object}: |X| = {r.n_values}, |limit| = {r.n_limit}")
        if r.collision:
            lines.append(f"    not injective: elements {r.collision[0]} and {r.collision[1]}")
        if r.missing:
            lines.append(f"    family without preimage: {r.missing}")
    ok = all(r.ok for r in reports)
    lines.append(f"verdict: {'segal' if ok else 'not segal'}")
    data = {"segal": ok, "objects": [{"object": r.object, "ok": r.ok, "values": r.n_values, "limit": r.n_limit}
                                     for r in reports]}
    return lines, data, 0 if ok else 1


def cmd_aut(args):
    if args.functor:
        family = args.family or "omega"
        sk = _skeleton(args, family)
        try:
            F = autocheck.load_functor(args.functor, sk)
        except (ValueError, KeyError) as e:
            raise UsageError(f"cannot load functor data: {e}") from None
    else:
        kind = args.kind or ("op_delta" if args.delta else "F_sigma" if args.sigma else "identity")
        family = {"F_sigma": "omega", "op_delta": "theta", "mirror": "planar"}.get(kind, args.family or "omega")
        sk = _skeleton(args, family)
        param = None
        if kind == "op_delta":
            param = tuple(int(x) for x in (args.delta or "0" * args.n).replace(",", ""))
        elif kind == "F_sigma" and args.sigma:
            param = {}
            for item in args.sigma:
                lit, _, perm = item.partition(":")
                param[as_tree(lit)] = tuple(int(x) for x in perm.split(","))
        try:
            F = autocheck.build_reference_functor(kind, sk, param)
        except ValueError as e:
            raise UsageError(str(e)) from None
    if args.save:
        autocheck.save_functor(F, args.save)
    c = autocheck.classify_autoequivalence(F, family)
    lines = [f"skeleton {sk.kind} with {len(sk)} objects", f"classification: {c.describe()}"]
    return lines, {"verdict": c.verdict, "description": c.describe()}, 0 if c.verdict not in ("none",) else 1


def cmd_verify(args):
    names = list(suites.SUITES) if not args.suites or args.suites == ["all"] else args.suites
    bounds = suites.Bounds(args.flavour, args.n, args.max_vertices, args.max_arity, args.max_columns, args.budget)
    lines, data, status = [], [], 0
    for name in names:
        try:
            rep = suites.run_suite(name, bounds)
        except suites.UnknownSuite as e:
            raise UsageError(str(e)) from None
        lines.extend(rep.render("text").splitlines())
        data.append(rep.as_json())
        if rep.status != "pass":
            status = 1
    return lines, data if len(data) > 1 else data[0], status


# -- parser ------------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--flavour", choices=[SYMMETRIC, PLANAR])
    common.add_argument("--n", type=int, default=2, help="ambient dimension for tables")
    common.add_argument("--max-vertices", type=int, default=3)
    common.add_argument("--max-arity", type=int, default=2)
    common.add_argument("--max-columns", type=int, default=3)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--ascii", action="store_true", help="restrict output to ASCII")
    common.add_argument("--output", help="also write the output to this file")

    ap = argparse.ArgumentParser(prog="treetheta", description="Trees, operads and pasting shapes on finite skeleta.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hom", parents=[common], help="morphisms between two trees or two tables")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--limit", type=int, default=20)
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("table", parents=[common], help="parse a table of dimensions")
    p.add_argument("literal")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("factor", parents=[common], help="active-inert factorizations of table morphisms")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--limit", type=int, default=50)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("mirror", parents=[common], help="mirror image of a planar tree")
    p.add_argument("tree")
    p.set_defaults(func=cmd_mirror)

    p = sub.add_parser("classify", parents=[common], help="category / discrete / pseudo-corolla tests")
    p.add_argument("operad")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("rigid", parents=[common], help="rigidity and locality of an operad")
    p.add_argument("operad")
    p.set_defaults(func=cmd_rigid)

    p = sub.add_parser("segal", parents=[common], help="Segal condition for a nerve or a presheaf file")
    p.add_argument("operad", nargs="?")
    p.add_argument("--presheaf")
    p.add_argument("--theta", action="store_true", help="nerve of the underlying category on tables")
    p.set_defaults(func=cmd_segal)

    p = sub.add_parser("aut", parents=[common], help="build or load functor data and classify it")
    p.add_argument("--kind", choices=list(autocheck.KINDS),
                   help="defaults to op_delta with --delta, F_sigma with --sigma, else identity")
    p.add_argument("--family", choices=["omega", "planar", "theta"])
    p.add_argument("--delta", help="for op_delta, e.g. 10")
    p.add_argument("--sigma", action="append", help="for F_sigma, TREE:perm such as '(η η):0,2,1'")
    p.add_argument("--functor", help="functor data file to classify")
    p.add_argument("--save", help="write the functor data to this file")
    p.set_defaults(func=cmd_aut)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("suites", nargs="*", help=f"suite names or 'all': {', '.join(suites.SUITES)}")
    p.add_argument("--budget", type=float, default=120.0, help="seconds per suite")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        lines, data, status = args.func(args)
    except (UsageError, TreeSyntaxError, theta.TableError, finop.OperadFormatError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.format == "json":
        text = json.dumps(data, indent=1, ensure_ascii=args.ascii)
    else:
        text = "\n".join(lines)
        if args.ascii:
            text = suites.to_ascii(text)
    print(text)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
