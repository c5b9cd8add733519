"""Registered verifications, conic families, and the census runner.

Every check is keyed by a stable name and carries a hypothesis guard; when the
guard fails for a given q the check is reported as skipped with the reason.
Checks of the per-conic kind also carry an ``applies`` predicate so they can be
pointed at user-chosen conic families.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
import signal
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from itertools import combinations
from pathlib import Path
from typing import Any, Callable

from .conic import (
    Conic,
    DegenerateConicError,
    format_conic,
    hyperbola_xy,
    normalform,
    parabola,
    parse_conic,
    subconic_extension_check,
    subplane_lines,
)
from .field import FieldError, FieldSpec, get_field, parse_element, prime_power
from .inherited import (
    TheoremViolation,
    arc_report,
    collinear_triples_bruteforce,
    hall_infinite_points_of,
    internal_nucleus_set,
    new_line_counts,
    old_line_spectrum,
    per_point_line_distribution,
    secant_spectrum,
    spectrum_report,
    tangent_witnesses,
)
from .oracles import (
    HypothesisError,
    canonical_triple,
    count_inscribed_triangles,
    count_inscribed_triangles_bruteforce,
    count_rational_roots_nbeta,
    count_three_secant_parabolas,
    expected_triangle_count,
    kv_point_is_degenerate,
    nbeta_expected,
    normalize_quadratic,
    three_secant_parabola_sizes,
    verify_kv_rational_point,
)
from .plane import (
    HallPlane,
    check_affine_plane_axioms,
    incident,
    normalize,
    parallel_classes_partition,
    projective_points,
)

SCHEMA = 1
DEFAULT_TIMEOUT = 60.0

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_TIMEOUT = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


class CheckTimeout(Exception):
    pass


@dataclass
class CheckResult:
    check: str
    q: int
    conic: str | None
    expected: Any
    actual: Any
    status: str  # pass | fail | skip | timeout | error
    relation: str = "=="
    wall_time: float | None = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def sort_key(self):
        return (self.check, self.q, self.conic or "", self.note)


def compare(expected, actual, relation: str = "==") -> bool:
    if relation == "==":
        return expected == actual
    if relation == "<=":
        return actual <= expected
    if relation == ">=":
        return actual >= expected
    raise ValueError(f"unknown relation {relation!r}")


def _result(name, F, expected, actual, conic=None, relation="==", note="") -> CheckResult:
    status = "pass" if compare(expected, actual, relation) else "fail"
    literal = conic if isinstance(conic, (str, type(None))) else format_conic(conic)
    return CheckResult(name, F.q, literal, expected, actual, status, relation, note=note)


# -- guards ------------------------------------------------------------------

def _odd(F):
    return None if F.p != 2 else "needs odd q"


def _even(F):
    return None if F.p == 2 else "needs even q"


def _even4(F):
    return None if F.p == 2 and F.q >= 4 else "needs even q >= 4"


def _odd_gt3(F):
    return None if F.p != 2 and F.q > 3 else "needs odd q > 3"


def _odd_gt5(F):
    return None if F.p != 2 and F.q > 5 else "needs odd q > 5"


def _ge4(F):
    return None if F.q >= 4 else "needs q >= 4"


def _even_nonsquare4(F):
    if F.p != 2 or F.q < 4:
        return "needs even q >= 4"
    return None if F.k % 2 else "needs q a non-square"


def _upto(limit):
    def guard(F):
        return None if F.q <= limit else f"enumeration limited to q <= {limit}"

    return guard


def _all(*guards):
    def guard(F):
        for g in guards:
            reason = g(F)
            if reason:
                return reason
        return None

    return guard


# -- conic families -------------------------------------------------------------

def _nonsub(F):
    return [x for x in F.elements() if not F.in_subfield(x)]


def _nonsquare(F):
    return next(x for x in F.nonzero() if not F.is_square(x))


def _try(make, *args):
    try:
        return make(*args)
    except DegenerateConicError:
        return None


def _collect(items):
    return [K for K in items if K is not None]


def family_parabola_I_notin_D(F):
    u = _nonsub(F)[0]
    return [parabola(F, u, 0 if F.p != 2 else F.conj(u))]


def family_parabola_I_in_D(F):
    # Y = X^2, i.e. X^2 - YZ, and a translate
    return [Conic(F, [1, 0, 0, 0, F.neg(1), 0]), Conic(F, [1, 0, 0, 1, F.neg(1), 1])]


def family_even_parabola_outside_D(F):
    """Parabolas ``(X+uY)^2 + Z(X+vY)``, u != v both outside GF(q); all at q=4, a slice above."""
    ns = _nonsub(F)
    us = ns if F.q <= 4 else ns[:4]
    return [parabola(F, u, v) for u in us for v in ns if u != v]


def family_even_parabola_cases(F):
    """One parabola per (I in D?, N in D?) case, plus both flavours of the last."""
    u = _nonsub(F)[0]
    ub = F.conj(u)
    other = next(v for v in _nonsub(F) if v not in (u, ub))
    return [parabola(F, 0, 1), parabola(F, u, 0), parabola(F, 0, u),
            parabola(F, u, ub), parabola(F, u, other)]


def family_conjugate_hyperbola(F):
    """``(X - mY)(X - conj(m) Y) = e Z^2`` for every nonzero e."""
    m = _nonsub(F)[0]
    mb = F.conj(m)
    b, c = F.neg(F.add(m, mb)), F.mul(m, mb)
    return _collect(_try(Conic, F, [1, b, c, 0, 0, F.neg(e)]) for e in F.nonzero())


def family_hyperbola_one_in_D(F):
    """``X (X - mY) = e Z^2``: infinite points (0:1:0) in D and (m:1:0) outside."""
    m = _nonsub(F)[0]
    return _collect(_try(Conic, F, [1, F.neg(m), 0, 0, 0, F.neg(e)]) for e in F.nonzero())


def family_hyperbola_two_in_D(F):
    if F.p == 2:
        return [hyperbola_xy(F, 1), hyperbola_xy(F, _nonsub(F)[0])]
    return [hyperbola_xy(F, 1), hyperbola_xy(F, F.neg(_nonsquare(F)))]


def family_normalform_even(F):
    """``X^2+XY+cY^2+uX+vY+w``, c outside GF(q), u,v,w over a small range."""
    small = range(4) if F.q <= 4 else range(2)
    return _collect(
        _try(normalform, F, c, u, v, w)
        for c in _nonsub(F) for u in small for v in small for w in small
    )


def centered_conics(F, limit: int | None = None, seed: int = 0):
    """``X^2 + aXY + bY^2 = cZ^2`` with c in {1, non-square}.

    For odd q every ellipse, and every hyperbola with both infinite points off
    ``D``, is a translate of one of these up to a homothety; both moves are
    Hall-plane collineations.  ``limit`` samples that many ``(a, b)`` pairs.
    """
    pairs = [(a, b) for a in F.elements() for b in F.elements()]
    if limit is not None and limit < len(pairs):
        pairs = sorted(random.Random(seed).sample(pairs, limit))
    constants = [1] if F.p == 2 else [1, _nonsquare(F)]
    return _collect(_try(Conic, F, [1, a, b, 0, 0, F.neg(c)]) for a, b in pairs for c in constants)


def family_ellipse_odd(F):
    return [K for K in centered_conics(F, None if F.q <= 5 else 200) if K.kind == "ellipse"]


def family_ellhyp_odd(F):
    return [K for K in centered_conics(F, None if F.q <= 5 else 200) if _ellhyp(K)]


def family_representatives(F):
    """A few conics of each kind, for cross-checks."""
    u = _nonsub(F)[0]
    out = family_parabola_I_notin_D(F) + [parabola(F, u, 1, 1)] + family_parabola_I_in_D(F)
    out += family_hyperbola_two_in_D(F)[:1] + family_conjugate_hyperbola(F)[:2]
    out += family_hyperbola_one_in_D(F)[:2]
    if F.p == 2:
        out += family_normalform_even(F)[:3]
    else:
        out += [K for K in centered_conics(F, 30, seed=F.q) if K.kind == "ellipse"][:3]
    return out


FAMILY_REGISTRY: dict[str, Callable[[FieldSpec], list[Conic]]] = {
    "parabola_I_notin_D": family_parabola_I_notin_D,
    "parabola_I_in_D": family_parabola_I_in_D,
    "even_parabola_outside_D": family_even_parabola_outside_D,
    "even_parabola_cases": family_even_parabola_cases,
    "conjugate_hyperbola": family_conjugate_hyperbola,
    "hyperbola_one_in_D": family_hyperbola_one_in_D,
    "hyperbola_two_in_D": family_hyperbola_two_in_D,
    "normalform_even": family_normalform_even,
    "ellipse_odd": family_ellipse_odd,
    "ellhyp_odd": family_ellhyp_odd,
    "representatives": family_representatives,
}

_KEYWORD_RANGES = {
    "all": lambda F: list(F.elements()),
    "nonzero": lambda F: list(F.nonzero()),
    "subfield": lambda F: list(F.subfield),
    "nonsubfield": _nonsub,
    "square": lambda F: [x for x in F.nonzero() if F.is_square(x)],
    "nonsquare": lambda F: [x for x in F.nonzero() if not F.is_square(x)],
}

_PARAMETRIC = {
    "parabola": (parabola, ("u", "v", "w")),
    "hyperbola_xy": (hyperbola_xy, ("d",)),
    "normalform": (normalform, ("c", "u", "v", "w")),
}


def _param_range(F, spec) -> list[int]:
    if isinstance(spec, str):
        try:
            return _KEYWORD_RANGES[spec](F)
        except KeyError:
            raise ConfigError(f"unknown parameter range {spec!r}") from None
    if isinstance(spec, list):
        return [parse_element(F, v) for v in spec]
    return [parse_element(F, spec)]


def build_family(F: FieldSpec, spec) -> list[Conic]:
    """Conics of a family spec: a registered name, a parametric family, or a literal."""
    if isinstance(spec, str):
        spec = {"name": spec}
    name = spec.get("name")
    if name == "literal":
        return [parse_conic(F, lit) for lit in spec.get("conics", [])]
    if name in FAMILY_REGISTRY:
        return FAMILY_REGISTRY[name](F)
    if name in _PARAMETRIC:
        make, keys = _PARAMETRIC[name]
        params = spec.get("params", {})
        ranges = [_param_range(F, params.get(k, [0])) for k in keys]
        out = []

        def rec(i, args):
            if i == len(ranges):
                K = _try(make, F, *args)
                if K is not None:
                    out.append(K)
                return
            for v in ranges[i]:
                rec(i + 1, args + [v])

        rec(0, [])
        return out
    raise ConfigError(f"unknown conic family {name!r}")


# -- conic predicates ----------------------------------------------------------------

def _cls(K):
    return K.classify()


def _ellhyp(K):
    """Ellipse, or hyperbola with non-conjugate infinite points outside D."""
    c = _cls(K)
    if c.kind == "ellipse":
        return True
    return c.kind == "hyperbola" and not c.conjugate and not any(c.in_derivation_set)


def _parabola_I_notin_D(K):
    c = _cls(K)
    return c.kind == "parabola" and not c.in_derivation_set[0]


def _even_parabola_IN_outside(K):
    c = _cls(K)
    return c.kind == "parabola" and not c.in_derivation_set[0] and not c.nucleus_in_derivation_set


def _even_parabola_conjugate(K):
    if not _even_parabola_IN_outside(K):
        return False
    c = _cls(K)
    I, N = c.infinite_points[0], c.nucleus
    return normalize(K.F, tuple(K.F.conj(v) for v in I)) == N


def _hyperbola_one_in_D(K):
    c = _cls(K)
    return c.kind == "hyperbola" and sum(c.in_derivation_set) == 1


def _hyperbola_conjugate(K):
    c = _cls(K)
    return c.kind == "hyperbola" and c.conjugate


def _hyperbola_two_in_D(K):
    c = _cls(K)
    return c.kind == "hyperbola" and all(c.in_derivation_set)


def _parabola_I_in_D(K):
    c = _cls(K)
    return c.kind == "parabola" and c.in_derivation_set[0]


def _any(K):
    return True


# -- field-level checks ---------------------------------------------------------------

def check_hall_axioms(F):
    H = HallPlane.of(F)
    q = F.q
    census = check_affine_plane_axioms(H)
    expected = {
        "new_lines": (q + 1) * q * q,
        "old_lines": q * q * (q * q - q),
        "pairs_covered": census["total_pairs"],
        "pair_incidences": census["total_pairs"],
        "new_lines_per_point": [q + 1],
        "parallel_classes_partition": True,
    }
    actual = {k: census[k] for k in expected if k in census}
    actual["parallel_classes_partition"] = parallel_classes_partition(H)
    return [_result("hall_axioms", F, expected, actual)]


def _triangle_conics(F):
    std = Conic(F, [0, 0, 1, F.neg(1), 0, 0], subplane=True)  # Y^2 = XZ
    rng = random.Random(F.q)
    sub = list(F.subfield)
    while True:
        coeffs = [rng.choice(sub) for _ in range(6)]
        if any(coeffs):
            K = _try(Conic, F, coeffs, True)
            if K is not None:
                return [std, K]


def check_sk_triangles(F):
    """Every triple on every line of PG(2,q), against the predicted triangle count."""
    out = []
    sub_points = projective_points(F, subplane=True)
    for K in _triangle_conics(F):
        checked = matched = brute_mismatch = 0
        for r in subplane_lines(F):
            off = [P for P in sub_points if incident(F, r, P) and not K.contains(P)]
            for T in combinations(off, 3):
                exp = expected_triangle_count(K, r, T)
                if exp is None:
                    continue
                got = count_inscribed_triangles(K, r, T).count
                checked += 1
                matched += got == exp
                if F.q <= 5 and got != count_inscribed_triangles_bruteforce(K, r, T):
                    brute_mismatch += 1
        out.append(_result("sk_triangles", F, {"triples": checked, "walk_vs_brute_mismatch": 0},
                           {"triples": matched, "walk_vs_brute_mismatch": brute_mismatch},
                           conic=format_conic(K) + " [PG(2,q)]"))
    return out


def check_3secant_parabolas(F):
    H = HallPlane.of(F)
    q = F.q
    L, T = canonical_triple(F)
    canonical = count_three_secant_parabolas(H, L, *T)
    sizes = set(three_secant_parabola_sizes(H, L, *T))
    rng = random.Random(1000 + q)
    counts = []
    while len(counts) < 20:
        lam = rng.randrange(1, F.order)
        base = (rng.randrange(F.order), rng.randrange(F.order))
        L = H.new_line(base, lam)
        pts = rng.sample(H.points_on(L), 3)
        try:
            counts.append(count_three_secant_parabolas(H, L, *pts))
        except ValueError:  # collinear in AG(2,q^2)
            continue
    expected = {"canonical": 3 * (q - 1), "random": [3 * (q - 1)] * 20, "sizes_in_3_4": True}
    actual = {"canonical": canonical, "random": counts, "sizes_in_3_4": sizes <= {3, 4}}
    return [_result("lem_3secant_parabolas", F, expected, actual)]


def check_kv_point(F):
    ok = degenerate_match = 0
    us = _nonsub(F)
    canonical = {(0, 0), (F.neg(1), 0), (0, F.neg(1))}
    for u in us:
        try:
            P = verify_kv_rational_point(F, u)
        except TheoremViolation:
            continue
        ok += 1
        degenerate_match += (P in canonical) == kv_point_is_degenerate(F, u)
    return [_result("lem_kv_point", F, {"rational_on_K": len(us), "degeneracy_rule": len(us)},
                    {"rational_on_K": ok, "degeneracy_rule": degenerate_match})]


def check_nbeta(F):
    agree = sum(count_rational_roots_nbeta(F, b) == nbeta_expected(F, b) for b in F.nonzero())
    branch = "q square" if F.k % 2 == 0 else "q non-square"
    return [_result("lem_nbeta", F, F.order - 1, agree, note=branch)]


def check_normal_form(F):
    admissible = verified = 0
    for beta in F.elements():
        for gamma in F.elements():
            try:
                M, w = normalize_quadratic(F, beta, gamma)
            except HypothesisError:
                continue
            admissible += 1
            if M.transform_quadratic(beta, gamma) == (1, w) and not F.in_subfield(w):
                verified += 1
    return [_result("normal_form", F, admissible, verified)]


def check_okp_xy1(F):
    H = HallPlane.of(F)
    K = hyperbola_xy(F, 1)
    rep = arc_report(K.affine_points, H)
    return [_result("okp_xy1_not_arc", F, {"is_arc": False, "max_collinear": F.q - 1},
                    {"is_arc": rep.is_arc, "max_collinear": rep.max_collinear}, conic=K)]


def check_okp_complete_arc(F):
    H = HallPlane.of(F)
    K = hyperbola_xy(F, F.neg(_nonsquare(F)))
    rep = arc_report(K.affine_points, H)
    return [_result("okp_complete_arc", F,
                    {"size": F.q**2 - 1, "is_arc": True, "is_complete": True},
                    {"size": rep.size, "is_arc": rep.is_arc, "is_complete": rep.is_complete},
                    conic=K)]


def check_subconic_extension(F):
    """Tangent lines stay tangent and other lines become secants, over GF(q) conics."""
    sub = list(F.subfield)
    if F.q <= 3:
        coeff_sets = [c for c in _product(sub, 6) if any(c)]
    else:
        rng = random.Random(F.q)
        coeff_sets = [[rng.choice(sub) for _ in range(6)] for _ in range(60)]
    lines = subplane_lines(F)
    total = good = 0
    for coeffs in coeff_sets:
        K = _try(Conic, F, coeffs, True)
        if K is None:
            continue
        for r in lines:
            total += 1
            good += subconic_extension_check(K, r).relation != "violation"
    return [_result("prop_subconic_extension", F, total, good)]


def _product(values, n):
    if n == 0:
        yield []
        return
    for v in values:
        for rest in _product(values, n - 1):
            yield [v] + rest


def pc_baer_intersection(K):
    """``|B cap K| <= 4`` or ``B cap K`` is a conic of B, for every new line B."""
    F = K.F
    H = HallPlane.of(F)
    pts = K.point_set
    total = good = 0
    for L in H.new_lines():
        total += 1
        inter = [P for P in H.baer_subplane_points(L) if P in pts]
        if len(inter) <= 4:
            good += 1
            continue
        # pull back to coordinates where B is PG(2,q) and test rationality
        lam, (a, b) = L.direction, L.base
        Kb = K.substitute([[lam, 0, a], [0, lam, b], [0, 0, 1]])
        rational = all(F.in_subfield(c) for c in Kb.normalized_coeffs())
        good += rational and len(inter) == F.q + 1
    return total, good


def check_open_question_bound(F):
    """s <= q/2 + 1 + sqrt(q) and the triple formula for every sampled ellipse/hyperbola."""
    rows = open_question_rows(F)
    bound = F.q / 2 + 1 + math.sqrt(F.q)
    worst = max(r["s"] for r in rows) if rows else 0
    formula_ok = all(r["triples"] == r["triple_formula"] for r in rows)
    return [
        _result("open_question", F, bound, worst, relation="<=", note="max s <= q/2 + 1 + sqrt(q)"),
        _result("open_question", F, True, formula_ok, note="triples match 2s C(q+1-s,2) + 2 C(s,3)"),
    ]


# -- per-conic checks ---------------------------------------------------------------

def pc_a3_a4_parabola_odd(K):
    q = K.F.q
    s = secant_spectrum(K)
    expected = {"a3": (q * q - 1) // 2, "a4": (q - 3) * (q * q - 1) // 24,
                "a3+4a4": math.comb(q + 1, 3), "max_line<=4": True}
    actual = {"a3": s[3], "a4": s[4], "a3+4a4": s[3] + 4 * s[4], "max_line<=4": s.max_line <= 4}
    return expected, actual


def pc_even_parabola_support(K):
    s = secant_spectrum(K)
    return {"support_in_0_1_2_4": True}, {"support_in_0_1_2_4": s.support <= {0, 1, 2, 4}}


def pc_even_parabola_conjugate(K):
    q = K.F.q
    s = secant_spectrum(K)
    n = q * q * (q + 1)
    per_point = {1: 2 * (q + 1) // 3, 4: (q + 1) // 3}
    uniform = all(per_point_line_distribution(K, P) == per_point for P in K.affine_points)
    expected = {"a0": n // 4, "a1": 2 * n // 3, "a4": n // 12, "others": 0, "per_point_uniform": True}
    actual = {"a0": s[0], "a1": s[1], "a4": s[4],
              "others": sum(v for i, v in enumerate(s.a) if i not in (0, 1, 4)),
              "per_point_uniform": uniform}
    return expected, actual


def pc_thm_a3_even(K):
    q = K.F.q
    lines = new_line_counts(K)
    a3 = sum(1 for c in lines.values() if c == 3)
    bad = 0
    for L, c in lines.items():
        if c < 3:
            continue
        _, wit = tangent_witnesses(K, L)
        if (c == 3 and len(wit) != 1) or (c >= 4 and wit):
            bad += 1
    return {"a3": q * (q - 1) // 2, "witness_violations": 0}, {"a3": a3, "witness_violations": bad}


def pc_even_ellhyp_triples(K):
    q = K.F.q
    s = secant_spectrum(K)
    return ({"triples": math.comb(q + 1, 3), "max_line<=4": True},
            {"triples": s.triples, "max_line<=4": s.max_line <= 4})


def pc_even_hyperbola_one_in_D(K):
    q = K.F.q
    s = secant_spectrum(K)
    return ({"triples": math.comb(q, 3), "max_line<=3": True},
            {"triples": s.triples, "max_line<=3": s.max_line <= 3})


def pc_hyperbola_two_in_D(K):
    q = K.F.q
    s = secant_spectrum(K)
    big = {i: v for i, v in enumerate(s.a) if i >= 3 and v}
    return {q - 1: 1}, big


def pc_even_conj_hyperbola(K):
    q = K.F.q
    s = secant_spectrum(K)
    big = {i: v for i, v in enumerate(s.a) if i >= 3 and v}
    return {q + 1: 1}, big


def pc_odd_conj_hyperbola(K):
    F = K.F
    q = F.q
    ext, internal, _ = K.classify_derivation_set()
    s = secant_spectrum(K)
    if internal == q + 1:
        H = HallPlane.of(F)
        oval = arc_report(K.affine_points, H, hall_infinite_points_of(K))
        return ({"D": "all internal", "inherited_oval": True, "size": q * q + 1},
                {"D": "all internal", "inherited_oval": oval.is_arc, "size": oval.size})
    return ({"D": "all external", "a_q+1": 2}, {"D": "all external" if ext == q + 1 else "mixed",
                                                "a_q+1": s[q + 1]})


def pc_hyp1_split(K):
    q = K.F.q
    ext, internal, on = K.classify_derivation_set()
    return [(q - 1) // 2, (q + 1) // 2, 1], sorted([ext, internal]) + [on]


def pc_thm_hsz(K):
    q = K.F.q
    ext, internal, _ = K.classify_derivation_set()
    s = secant_spectrum(K)
    formula = 2 * ext * math.comb(q - ext, 2) + 2 * math.comb(ext, 3)
    return ({"s_split": [(q - 1) // 2, (q + 1) // 2], "max_line<=3": True, "triples": formula},
            {"s_split": sorted([ext, internal]), "max_line<=3": s.max_line <= 3,
             "triples": s.triples})


def pc_parabola_external(K):
    q = K.F.q
    I = K.infinite_points[0]
    positions = {K.point_position((x, 1, 0)) for x in K.F.elements() if (x, 1, 0) != I}
    if (1, 0, 0) != I:
        positions.add(K.point_position((1, 0, 0)))
    return ({"s_external": q, "line_at_infinity": ["external"]},
            {"s_external": K.classify_derivation_set()[0], "line_at_infinity": sorted(positions)})


def pc_even_parabola_four_cases(K):
    """Arc behaviour of an even-order parabola in each (I in D, N in D) case."""
    F = K.F
    H = HallPlane.of(F)
    c = _cls(K)
    I_in, N_in = c.in_derivation_set[0], c.nucleus_in_derivation_set
    rep = arc_report(K.affine_points, H)
    if I_in and N_in:
        return {"is_arc": False}, {"is_arc": rep.is_arc}
    if I_in != N_in:
        return ({"is_arc": True, "hyperoval_reachable": True},
                {"is_arc": rep.is_arc, "hyperoval_reachable": rep.hyperoval_reachable})
    conj = _even_parabola_conjugate(K)
    with_I = arc_report(K.affine_points, H, hall_infinite_points_of(K))
    return ({"K+I is arc": F.k % 2 == 0 and conj}, {"K+I is arc": with_I.is_arc})


def pc_parallel_lines(K):
    """Even q, I and N in D: the affine points split over q parallel q-secants."""
    F = K.F
    q = F.q
    s = secant_spectrum(K)
    lines = [L for L, c in new_line_counts(K).items() if c >= 3]
    parallel = len({L.direction for L in lines}) == 1
    nuclei = internal_nucleus_set(K.affine_points, HallPlane.of(F))
    return ({"q-secants": q, "other_3plus": 0, "parallel": True, "internal_nuclei": 0},
            {"q-secants": s[q], "other_3plus": sum(v for i, v in enumerate(s.a) if i >= 3 and i != q),
             "parallel": parallel, "internal_nuclei": len(nuclei)})


def pc_odd_ellipse_not_oval(K):
    return {"has_3_secant": True}, {"has_3_secant": secant_spectrum(K).max_line >= 3}


def pc_ellhyp_bound(K):
    q = K.F.q
    _, internal, _ = K.classify_derivation_set()
    return q / 2 - 1 - math.sqrt(q), internal, ">="


def pc_odd_triples_formula(K):
    q = K.F.q
    ext = K.classify_derivation_set()[0]
    formula = 2 * ext * math.comb(q + 1 - ext, 2) + 2 * math.comb(ext, 3)
    return formula, secant_spectrum(K).triples


def pc_cross_oracle(K):
    """Spectrum, brute-force triples, triangle sums over D, and the pair identity."""
    F = K.F
    H = HallPlane.of(F)
    s = secant_spectrum(K)
    n = len(K.affine_points)
    brute = collinear_triples_bruteforce(K)
    D_off = [P for P in H.derivation_set if not K.contains(P)]
    line_inf = (0, 0, 1)
    tri = sum(count_inscribed_triangles(K, line_inf, T).count for T in combinations(D_off, 3))
    old = old_line_spectrum(K)
    pairs = sum(math.comb(i, 2) * v for i, v in enumerate(s.a))
    pairs += sum(math.comb(i, 2) * v for i, v in old.items())
    expected = {"triples": s.triples, "sk_triangles": s.triples, "pairs": math.comb(n, 2),
                "sum_a": (F.q + 1) * F.q**2, "incidences": (F.q + 1) * n, "old_max<=2": True}
    actual = {"triples": brute, "sk_triangles": tri, "pairs": pairs, "sum_a": sum(s.a),
              "incidences": sum(i * v for i, v in enumerate(s.a)),
              "old_max<=2": max(old, default=0) <= 2}
    return expected, actual


# -- registry -------------------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    summary: str
    guard: Callable[[FieldSpec], str | None] = lambda F: None
    run: Callable[[FieldSpec], list[CheckResult]] | None = None
    per_conic: Callable[[Conic], tuple] | None = None
    applies: Callable[[Conic], bool] | None = None
    family: Callable[[FieldSpec], list[Conic]] | None = None


CHECKS: dict[str, Check] = {}
ALIASES = {"a3_even": "thm_a3_even"}


def register(check: Check) -> Check:
    CHECKS[check.name] = check
    return check


for _c in [
    Check("hall_axioms", "Hall(q^2) is an affine plane with (q+1)q^2 new lines",
          guard=_upto(8), run=check_hall_axioms),
    Check("sk_triangles", "inscribed triangle counts on all triples of all lines of PG(2,q)",
          guard=_upto(9), run=check_sk_triangles),
    Check("prop_subconic_extension", "tangents extend to tangents, other lines to secants",
          run=check_subconic_extension),
    Check("cor_baer_intersection", "a Baer subplane meets a conic in <= 4 points or a subconic",
          guard=_upto(5), per_conic=pc_baer_intersection, applies=_any,
          family=family_representatives),
    Check("prop_parabola_external", "parabola with I in D: every other point of D is external",
          guard=_odd, per_conic=pc_parabola_external, applies=_parabola_I_in_D,
          family=family_parabola_I_in_D),
    Check("prop_hyp1_split", "hyperbola with one point in D: (q+1)/2 and (q-1)/2 split",
          guard=_odd, per_conic=pc_hyp1_split, applies=_hyperbola_one_in_D,
          family=family_hyperbola_one_in_D),
    Check("prop_ellhyp_bound", "internal points of D >= q/2 - 1 - sqrt(q)",
          guard=_odd, per_conic=pc_ellhyp_bound, applies=_ellhyp, family=family_ellhyp_odd),
    Check("prop_hypeven", "hyperbola with both points in D has one (q-1)-secant",
          guard=_even4, per_conic=pc_hyperbola_two_in_D, applies=_hyperbola_two_in_D,
          family=family_hyperbola_two_in_D),
    Check("even_ellhyp_triples", "even q: C(q+1,3) triples, lines meet K in <= 4 points",
          guard=_even4, per_conic=pc_even_ellhyp_triples, applies=_ellhyp,
          family=family_normalform_even),
    Check("even_hyperbola_one_in_D", "even q: C(q,3) triples, lines meet K in <= 3 points",
          guard=_even4, per_conic=pc_even_hyperbola_one_in_D, applies=_hyperbola_one_in_D,
          family=family_hyperbola_one_in_D),
    Check("a3_a4_parabola_odd", "odd parabola, I not in D: a3 = (q^2-1)/2, a4 = (q-3)(q^2-1)/24",
          guard=_odd, per_conic=pc_a3_a4_parabola_odd, applies=_parabola_I_notin_D,
          family=family_parabola_I_notin_D),
    Check("lem_3secant_parabolas", "exactly 3(q-1) parabolas through three points of a new line",
          guard=_odd, run=check_3secant_parabolas),
    Check("lem_kv_point", "closed-form fourth rational point of K_u",
          guard=_odd, run=check_kv_point),
    Check("even_parabola_support", "even q, I and N not in D: new lines meet K in 0,1,2,4 points",
          guard=_even4, per_conic=pc_even_parabola_support, applies=_even_parabola_IN_outside,
          family=family_even_parabola_outside_D),
    Check("even_parabola_conjugate", "q non-square, I and N conjugate: a0, a1, a4 and per-point counts",
          guard=_even_nonsquare4, per_conic=pc_even_parabola_conjugate,
          applies=_even_parabola_conjugate, family=family_even_parabola_outside_D),
    Check("four_case_parabola_even", "even parabola arcs and hyperovals by (I in D, N in D)",
          guard=_all(_even4, _upto(8)), per_conic=pc_even_parabola_four_cases,
          applies=lambda K: _cls(K).kind == "parabola", family=family_even_parabola_cases),
    Check("parabola_parallel_lines", "even q, I and N in D: q parallel q-secants, no internal nuclei",
          guard=_even4, per_conic=pc_parallel_lines,
          applies=lambda K: _parabola_I_in_D(K) and _cls(K).nucleus_in_derivation_set,
          family=lambda F: family_parabola_I_in_D(F)[:1]),
    Check("lem_nbeta", "rational roots of T^3 + N T + N Tr(beta) by the square/non-square table",
          guard=_even, run=check_nbeta),
    Check("okp_xy1_not_arc", "XY = 1 is not an inherited arc", guard=_ge4, run=check_okp_xy1),
    Check("okp_complete_arc", "XY = -d, d a non-square: complete (q^2-1)-arc",
          guard=_odd_gt3, run=check_okp_complete_arc),
    Check("conj_hyperbola_odd", "conjugate hyperbola: inherited oval or two (q+1)-secants",
          guard=_odd_gt3, per_conic=pc_odd_conj_hyperbola, applies=_hyperbola_conjugate,
          family=family_conjugate_hyperbola),
    Check("conj_hyperbola_even", "even q conjugate hyperbola: exactly one (q+1)-secant",
          guard=_even4, per_conic=pc_even_conj_hyperbola, applies=_hyperbola_conjugate,
          family=family_conjugate_hyperbola),
    Check("thm_hsz", "hyperbola with one point in D: s split, <= 3 per line, triple formula",
          guard=_odd_gt5, per_conic=pc_thm_hsz, applies=_hyperbola_one_in_D,
          family=family_hyperbola_one_in_D),
    Check("thm_a3_even", "even ellipse / non-conjugate hyperbola: a3 = q(q-1)/2, unique witnesses",
          guard=_even4, per_conic=pc_thm_a3_even, applies=_ellhyp, family=family_normalform_even),
    Check("odd_ellipse_not_oval", "odd q: every ellipse has a 3-secant new line",
          guard=_odd, per_conic=pc_odd_ellipse_not_oval, applies=lambda K: K.kind == "ellipse",
          family=family_ellipse_odd),
    Check("odd_triples_formula", "odd ellipse / hyperbola off D: 2s C(q+1-s,2) + 2 C(s,3) triples",
          guard=_odd, per_conic=pc_odd_triples_formula, applies=_ellhyp, family=family_ellhyp_odd),
    Check("normal_form", "Moebius normal form X^2 + X + w for every admissible quadratic",
          guard=_all(_even, _upto(8)), run=check_normal_form),
    Check("cross_oracle", "spectrum vs brute force, triangle sums and pair identities",
          guard=_upto(5), per_conic=pc_cross_oracle, applies=_any, family=family_representatives),
    Check("open_question", "empirical (q, s, a3) data: s bound and triple formula",
          guard=_all(_odd, _upto(7)), run=check_open_question_bound),
]:
    register(_c)


def resolve_check(name: str) -> Check:
    name = ALIASES.get(name, name)
    try:
        return CHECKS[name]
    except KeyError:
        raise ConfigError(f"unknown check {name!r}") from None


def execute(check: Check, F: FieldSpec, conics: list[Conic] | None = None) -> list[CheckResult]:
    """Run one check at one field, honouring its guard."""
    reason = check.guard(F)
    if reason:
        return [CheckResult(check.name, F.q, None, None, None, "skip", note=reason)]
    if check.per_conic is None:
        return check.run(F)
    pool = conics if conics is not None else check.family(F)
    chosen = [K for K in pool if K.F == F and check.applies(K)]
    if not chosen:
        return [CheckResult(check.name, F.q, None, None, None, "skip",
                            note="no conic satisfies the hypothesis")]
    out = []
    for K in chosen:
        res = check.per_conic(K)
        expected, actual = res[0], res[1]
        relation = res[2] if len(res) > 2 else "=="
        out.append(_result(check.name, F, expected, actual, conic=K, relation=relation))
    return out


# -- runner -----------------------------------------------------------------------------

@dataclass
class CensusConfig:
    fields: list[FieldSpec]
    checks: list[str]
    families: list = field(default_factory=list)
    out: str | None = None
    format: str = "json"
    jobs: int = 1
    timeout: float = DEFAULT_TIMEOUT
    timestamp: bool = True

    @classmethod
    def from_dict(cls, data: dict) -> "CensusConfig":
        known = {"q", "fields", "checks", "families", "out", "format", "jobs", "timeout",
                 "timestamp"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        try:
            fields = [get_field(*prime_power(int(q))) for q in data.get("q", [])]
            fields += [
                get_field(int(f["p"]), int(f["k"]),
                          tuple(f["modulus"]) if f.get("modulus") is not None else None)
                for f in data.get("fields", [])
            ]
        except (FieldError, KeyError, TypeError) as exc:
            raise ConfigError(f"bad field entry: {exc}") from None
        checks = list(data.get("checks", []))
        for name in checks:
            resolve_check(name)
        families = data.get("families", [])
        if isinstance(families, (str, dict)):
            families = [families]
        fmt = data.get("format", "json")
        if fmt not in ("json", "csv"):
            raise ConfigError(f"unknown format {fmt!r}")
        return cls(fields, checks, families, data.get("out"), fmt, int(data.get("jobs", 1)),
                   float(data.get("timeout", DEFAULT_TIMEOUT)), bool(data.get("timestamp", True)))

    @classmethod
    def load(cls, path) -> "CensusConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(data)


def _alarm(signum, frame):
    raise CheckTimeout()


def _run_task(task) -> list[dict]:
    """Worker entry point: ``(check, p, k, modulus, families, timeout)``."""
    name, p, k, modulus, families, timeout = task
    F = get_field(p, k, modulus)
    check = resolve_check(name)
    start = time.perf_counter()
    use_alarm = timeout and hasattr(signal, "setitimer")
    if use_alarm:
        old = signal.signal(signal.SIGALRM, _alarm)
        signal.setitimer(signal.ITIMER_REAL, timeout)
    try:
        conics = None
        if families and check.per_conic is not None:
            conics = [K for spec in families for K in build_family(F, spec)]
        results = execute(check, F, conics)
    except CheckTimeout:
        results = [CheckResult(check.name, F.q, None, None, None, "timeout",
                               note=f"exceeded {timeout:g} s")]
    except (TheoremViolation, ValueError, ArithmeticError) as exc:
        results = [CheckResult(check.name, F.q, None, None, None, "error", note=repr(exc))]
    finally:
        if use_alarm:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, old)
    elapsed = time.perf_counter() - start
    for r in results:
        r.wall_time = elapsed / len(results)
    return [asdict(r) for r in results]


def run_checks(fields, checks, families=(), jobs: int = 1,
               timeout: float = DEFAULT_TIMEOUT) -> list[CheckResult]:
    tasks = [
        (resolve_check(name).name, F.p, F.k, F.modulus, list(families), timeout)
        for F in fields for name in checks
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = [r for batch in pool.map(_run_task, tasks) for r in batch]
    else:
        raw = [r for t in tasks for r in _run_task(t)]
    results = [CheckResult(**r) for r in raw]
    results.sort(key=CheckResult.sort_key)
    return results


def exit_code(results) -> int:
    statuses = {r.status for r in results}
    if "timeout" in statuses:
        return EXIT_TIMEOUT
    if statuses & {"fail", "error"}:
        return EXIT_FAIL
    return EXIT_OK


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def result_records(results, timestamp: bool = True) -> list[dict]:
    recs = []
    for r in results:
        rec = _jsonable(asdict(r))
        rec["pass"] = r.passed
        if not timestamp:
            rec["wall_time"] = None
        recs.append(rec)
    return recs


def render_results(results, fmt: str = "json", timestamp: bool = True) -> str:
    recs = result_records(results, timestamp)
    if fmt == "json":
        doc = {"schema": SCHEMA}
        if timestamp:
            doc["generated"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        doc["results"] = recs
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    if timestamp:
        buf.write(f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    cols = ["check", "q", "conic", "status", "relation", "expected", "actual", "wall_time", "note"]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["schema"] + cols)
    for rec in recs:
        writer.writerow([SCHEMA] + [
            json.dumps(rec[c], sort_keys=True) if isinstance(rec[c], (dict, list)) else
            ("" if rec[c] is None else rec[c]) for c in cols
        ])
    return buf.getvalue()


def run_census(config: CensusConfig) -> tuple[list[CheckResult], int]:
    """Run the configured checks, persist results and family spectra, return the exit code."""
    for spec in config.families:
        for F in config.fields[:1]:
            build_family(F, spec)  # reject bad family specs before any work
    results = run_checks(config.fields, config.checks, config.families, config.jobs,
                         config.timeout)
    if config.out:
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"results.{config.format}").write_text(
            render_results(results, config.format, config.timestamp))
        if config.families:
            lines = []
            for F in config.fields:
                for spec in config.families:
                    for K in build_family(F, spec):
                        lines.append(json.dumps(spectrum_report(K), sort_keys=True))
            (out / "spectra.jsonl").write_text("".join(l + "\n" for l in lines))
    return results, exit_code(results)


def verify_all(q_list, jobs: int = 1, timeout: float = DEFAULT_TIMEOUT, stream=None):
    """Run every registered check for each q and print a pass/fail matrix."""
    fields = [get_field(*prime_power(int(q))) for q in q_list]
    results = run_checks(fields, list(CHECKS), (), jobs, timeout)
    summary = summarize(results)
    if stream is not None:
        stream.write(format_matrix(summary, [F.q for F in fields]))
    return summary, results


def summarize(results) -> dict[str, dict[int, str]]:
    """Collapse per-conic results to one status per (check, q)."""
    rank = {"pass": 0, "skip": 1, "fail": 2, "error": 3, "timeout": 4}
    summary: dict[str, dict[int, str]] = {}
    for r in results:
        row = summary.setdefault(r.check, {})
        cur = row.get(r.q)
        if cur is None or rank[r.status] > rank[cur]:
            row[r.q] = r.status
    return summary


def format_matrix(summary, qs) -> str:
    width = max(len(n) for n in summary) if summary else 10
    lines = ["check".ljust(width) + "".join(f"  q={q:<5}" for q in qs)]
    for name in summary:
        cells = "".join(f"  {summary[name].get(q, '-').upper():<7}" for q in qs)
        lines.append(name.ljust(width) + cells)
    return "\n".join(lines) + "\n"


def open_question_rows(F: FieldSpec) -> list[dict]:
    """One row per distinct (kind, s, a3, a4) over the centered ellipse/hyperbola sweep."""
    if F.p == 2:
        raise ValueError("the open question concerns odd q")
    limit = None if F.q <= 7 else 200
    rows: dict[tuple, dict] = {}
    for K in centered_conics(F, limit):
        if not _ellhyp(K):
            continue
        s = secant_spectrum(K)
        ext = K.classify_derivation_set()[0]
        key = (K.kind, ext, s[3], s[4])
        row = rows.get(key)
        if row is None:
            formula = 2 * ext * math.comb(F.q + 1 - ext, 2) + 2 * math.comb(ext, 3)
            row = rows[key] = {"q": F.q, "kind": K.kind, "s": ext, "a3": s[3], "a4": s[4],
                               "triples": s.triples, "triple_formula": formula, "conics": 0}
        row["conics"] += 1
    return [rows[k] for k in sorted(rows)]


def emit_open_question_table(q_list, stream=None) -> str:
    """CSV of empirical ``(q, kind, s, a3, a4)`` data for odd q."""
    buf = io.StringIO()
    cols = ["q", "kind", "s", "a3", "a4", "triples", "triple_formula", "conics"]
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    for q in q_list:
        F = get_field(*prime_power(int(q)))
        if F.p == 2:
            raise ConfigError(f"q={q} is even; the table is for odd q")
        for row in open_question_rows(F):
            writer.writerow(row)
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text
