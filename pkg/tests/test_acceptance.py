"""End-to-end acceptance suite: one test per criterion, each run at its time limit.

A summary line per criterion is printed and collected for the terminal summary.
"""
import pytest

import conftest
from treetheta.suites import Bounds, run_suite

CRITERIA = [
    (1, "omega-hom-oracle", 60, "hom-oracle equivalence on trees with at most 3 vertices"),
    (2, "omega-spine", 60, "spine decomposition of tree maps"),
    (3, "segal", 120, "Segal soundness for corpus nerves and failing mutants"),
    (4, "rigidity", 60, "rigidity agrees with locality and internal homs"),
    (5, "sigma-omega", 120, "F_sigma laws on the default tree skeleton"),
    (6, "planar-mirror", 60, "planar classification via the mirror functor"),
    (7, "theta-structure", 120, "table encodings and Theta hom oracles"),
    (8, "theta-factorization", 120, "active-inert factorization and disk monos"),
    (9, "op-delta", 120, "op_delta laws and the disk characterization"),
    (10, "normality", 10, "normal monomorphism examples"),
]


@pytest.mark.parametrize("num,suite,limit,title", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(num, suite, limit, title):
    rep = run_suite(suite, Bounds(budget=float(limit)))
    ok = rep.status == "pass" and rep.wall_time < limit
    failed = [c.name for c in rep.checks if not c.passed]
    line = (f"criterion {num:2d} [{suite}]: {'PASS' if ok else 'FAIL'} "
            f"({rep.wall_time:.1f} s of {limit} s; {title})")
    if failed:
        line += f"; failing checks: {', '.join(failed)}; first counterexample {rep.first_counterexample}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert not rep.aborted, f"{suite} exceeded its budget"
    assert rep.status == "pass", rep.render("text")
    assert rep.wall_time < limit
