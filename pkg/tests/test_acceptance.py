"""The twelve acceptance criteria, each at its exact tolerance and time budget.

Run ``pytest tests/test_acceptance.py -v`` (the PASS/FAIL lines appear in the
terminal summary) or ``python tests/test_acceptance.py``.
"""

import random
import sys
import time

import pytest

from hallconics.census import CHECKS, build_family, execute
from hallconics.conic import Conic, DegenerateConicError
from hallconics.field import field_for_q
from hallconics.inherited import (
    collinear_triples_bruteforce,
    per_point_line_distribution,
    secant_spectrum,
)
from hallconics.plane import HallPlane, check_affine_plane_axioms

REPORT: list[str] = []


def run(check, q, conics=None):
    return execute(CHECKS[check], field_for_q(q), conics)


def all_pass(results):
    return bool(results) and all(r.status == "pass" for r in results)


def nonsub(F):
    return [x for x in F.elements() if not F.in_subfield(x)]


def criterion_1():
    ok, notes = True, []
    for q in (3, 4):
        H = HallPlane.of(field_for_q(q))
        c = check_affine_plane_axioms(H)
        ok &= c["pairs_covered"] == c["total_pairs"] == c["pair_incidences"]
        ok &= c["new_lines"] == (q + 1) * q * q
        notes.append(f"q={q}: {c['new_lines']} new lines")
    return ok, "; ".join(notes)


def criterion_2():
    results = [r for q in (4, 8, 5, 7) for r in run("sk_triangles", q)]
    n = sum(r.actual["triples"] for r in results)
    return all_pass(results), f"{n} line triples checked"


def criterion_3():
    results = []
    for q in (3, 5, 7):
        F = field_for_q(q)
        fam = build_family(F, {"name": "parabola", "params": {"u": "nonsubfield", "v": [0, 1]}})
        results += run("a3_a4_parabola_odd", q, fam)
    a3 = sorted({r.actual["a3"] for r in results})
    return all_pass(results), f"{len(results)} parabolas, a3 in {a3}"


def criterion_4():
    results = run("lem_3secant_parabolas", 5) + run("lem_3secant_parabolas", 7)
    return all_pass(results), "canonical " + ", ".join(str(r.actual["canonical"]) for r in results)


def criterion_5():
    support = run("even_parabola_support", 4) + run("even_parabola_support", 8)
    F = field_for_q(8)
    conj = run("even_parabola_conjugate", 8)
    ok = all_pass(support) and all_pass(conj)
    u = nonsub(F)[0]
    K = build_family(F, {"name": "parabola", "params": {"u": [F.digits(u)], "v": [F.digits(F.conj(u))]}})[0]
    s = secant_spectrum(K)
    ok &= (s[0], s[1], s[4]) == (144, 384, 48)
    ok &= all(per_point_line_distribution(K, P) == {1: 6, 4: 3} for P in K.affine_points)
    return ok, f"{len(support)} parabolas, q=8 conjugate a0,a1,a4 = {s[0]},{s[1]},{s[4]}"


def criterion_6():
    results = run("lem_nbeta", 4) + run("lem_nbeta", 8)
    return all_pass(results), ", ".join(f"q={r.q}: {r.actual}/{r.expected}" for r in results)


def criterion_7():
    F5, F4 = field_for_q(5), field_for_q(4)
    xy1 = run("okp_xy1_not_arc", 5)
    arc = run("okp_complete_arc", 5)
    conj5 = run("conj_hyperbola_odd", 5)
    external = [r for r in conj5 if r.expected.get("D") == "all external"]
    conj4 = run("conj_hyperbola_even", 4)
    ok = all_pass(xy1) and all_pass(arc) and all_pass(conj5) and all_pass(conj4) and bool(external)
    del F5, F4
    return ok, (f"XY=1 arc={xy1[0].actual['is_arc']}, XY=-d size={arc[0].actual['size']}, "
                f"{len(external)} external conjugate hyperbolas")


def criterion_8():
    results = run("thm_hsz", 7)
    splits = sorted({tuple(r.actual["s_split"]) for r in results})
    return all_pass(results), f"{len(results)} hyperbolas, splits {splits}"


def criterion_9():
    results = run("thm_a3_even", 4) + run("thm_a3_even", 8)
    a3 = sorted({r.actual["a3"] for r in results})
    return all_pass(results), f"{len(results)} conics, a3 in {a3}"


def criterion_10():
    results = run("odd_ellipse_not_oval", 3) + run("odd_ellipse_not_oval", 5)
    return all_pass(results), f"{len(results)} ellipses, all with a 3-secant"


def criterion_11():
    results = run("normal_form", 4)
    return all_pass(results), f"{results[0].actual} admissible pairs verified"


def _random_conics(F, n, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        try:
            out.append(Conic(F, [rng.randrange(F.order) for _ in range(6)]))
        except DegenerateConicError:
            pass
    return out


def criterion_12():
    ok = True
    n_conics = 0
    for q in (3, 4, 5):
        F = field_for_q(q)
        conics = build_family(F, "representatives") + _random_conics(F, 6, q)
        for K in conics:
            ok &= secant_spectrum(K).triples == collinear_triples_bruteforce(K)
        n_conics += len(conics)
        ok &= all_pass(run("cross_oracle", q, conics))
    pairs = 0
    for q in (3, 4):
        F = field_for_q(q)
        conics = build_family(F, "representatives") + _random_conics(F, 40, 10 + q)
        r = run("cor_baer_intersection", q, conics)
        ok &= all_pass(r)
        pairs += sum(x.expected for x in r)
    return ok, f"{n_conics} conics cross-checked, {pairs} (B, K) pairs"


CRITERIA = [
    (1, "Hall plane axioms", criterion_1, 1.0),
    (2, "Segre-Korchmaros triangle counts", criterion_2, 30.0),
    (3, "odd parabola a3, a4", criterion_3, 10.0),
    (4, "3-secant parabola count", criterion_4, 10.0),
    (5, "even parabola spectra", criterion_5, 20.0),
    (6, "N_beta root counts", criterion_6, 5.0),
    (7, "hyperbola cases", criterion_7, 30.0),
    (8, "hyperbola with one point in D", criterion_8, 10.0),
    (9, "even ellipse/hyperbola a3 and witnesses", criterion_9, 60.0),
    (10, "odd ellipses are not ovals", criterion_10, 60.0),
    (11, "quadratic normal form", criterion_11, 5.0),
    (12, "cross-oracle consistency", criterion_12, 60.0),
]


def evaluate(number, title, fn, budget):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    in_time = elapsed < budget
    status = "PASS" if ok and in_time else "FAIL"
    timing = f"{elapsed:.2f}s < {budget:g}s" if in_time else f"{elapsed:.2f}s OVER {budget:g}s"
    line = f"criterion {number:2d} {status}  {title}: {detail} ({timing})"
    return ok and in_time, line


@pytest.mark.parametrize("number,title,fn,budget", CRITERIA, ids=[f"c{n:02d}" for n, *_ in CRITERIA])
def test_criterion(number, title, fn, budget):
    ok, line = evaluate(number, title, fn, budget)
    REPORT.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    failures = 0
    for crit in CRITERIA:
        ok, line = evaluate(*crit)
        print(line, flush=True)
        failures += not ok
    sys.exit(1 if failures else 0)
