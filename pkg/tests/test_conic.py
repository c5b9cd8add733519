import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hallconics.conic import (
    Conic,
    DegenerateConicError,
    conic_through_five,
    format_conic,
    hyperbola_xy,
    normalform,
    parabola,
    parse_conic,
    subconic_extension_check,
    subplane_lines,
)
from hallconics.field import FieldError, field_for_q
from hallconics.plane import HallPlane, incident, projective_points


def y_eq_x2(F):
    return Conic(F, [1, 0, 0, 0, F.neg(1), 0])


@pytest.mark.parametrize("q", [3, 4, 5, 8])
def test_parabola_y_eq_x2(q):
    F = field_for_q(q)
    K = y_eq_x2(F)
    c = K.classify()
    assert c.kind == "parabola"
    assert c.infinite_points == ((0, 1, 0),)
    assert c.in_derivation_set == (True,)
    if F.p == 2:
        assert c.nucleus == (1, 0, 0) and c.nucleus_in_derivation_set
    else:
        assert K.classify_derivation_set() == (q, 0, 1)
    assert K.tangent_at((0, 0, 1)) == (0, 1, 0)  # the line Y = 0


@pytest.mark.parametrize("q", [3, 4, 5])
def test_hyperbola_xy1(q):
    F = field_for_q(q)
    c = hyperbola_xy(F, 1).classify()
    assert c.kind == "hyperbola"
    assert set(c.infinite_points) == {(1, 0, 0), (0, 1, 0)}
    assert c.in_derivation_set == (True, True) and not c.conjugate


@pytest.mark.parametrize("q", [4, 8])
def test_normalform_kinds_avoid_D(q):
    F = field_for_q(q)
    seen = set()
    for c in (x for x in F.elements() if not F.in_subfield(x)):
        K = normalform(F, c, 0, 0, 1)
        cls = K.classify()
        assert cls.kind in ("ellipse", "hyperbola")
        assert not any(cls.in_derivation_set)
        assert not cls.conjugate
        seen.add(cls.kind)
    assert seen == {"ellipse", "hyperbola"}


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8])
def test_kind_agrees_with_quadratic_part(q):
    F = field_for_q(q)
    rng = random.Random(q)
    n = 0
    while n < 60:
        try:
            K = Conic(F, [rng.randrange(F.order) for _ in range(6)])
        except DegenerateConicError:
            continue
        n += 1
        assert K.kind == K.kind_from_quadratic_part()
        assert len(K.points) == F.order + 1


@pytest.mark.parametrize("q", [3, 5, 7])
def test_positions_by_tangents_and_character(q):
    F = field_for_q(q)
    rng = random.Random(q)
    pts = projective_points(F)
    for _ in range(5):
        while True:
            try:
                K = Conic(F, [rng.randrange(F.order) for _ in range(6)])
                break
            except DegenerateConicError:
                pass
        counts = {"on": 0, "external": 0, "internal": 0}
        for P in pts:
            pos = K.point_position(P)
            assert pos == K.position_by_character(P)
            counts[pos] += 1
        Q = F.order
        assert counts == {"on": Q + 1, "external": Q * (Q + 1) // 2, "internal": Q * (Q - 1) // 2}


@pytest.mark.parametrize("q", [4, 8])
def test_even_tangents_pass_through_nucleus(q):
    F = field_for_q(q)
    K = parabola(F, F.from_digits([0] * F.k + [1]), 1, 1)
    N = K.nucleus
    assert all(incident(F, t, N) for t in K.tangents.values())
    with pytest.raises(FieldError):
        K.point_position((0, 0, 1))


@pytest.mark.parametrize("q", [5, 7])
def test_hyperbola_nonsquare_internal(q):
    F = field_for_q(q)
    d = next(x for x in F.nonzero() if not F.is_square(x))
    K = hyperbola_xy(F, F.neg(d))
    ext, internal, on = K.classify_derivation_set()
    assert (ext, on) == (0, 2) and internal == q - 1


@pytest.mark.parametrize("q", [3, 5, 7])
def test_hyperbola_one_point_in_D_split(q):
    F = field_for_q(q)
    m = F.from_digits([0, 1])
    for e in list(F.nonzero())[:6]:
        K = Conic(F, [1, F.neg(m), 0, 0, 0, F.neg(e)])
        assert sum(K.classify().in_derivation_set) == 1
        ext, internal, on = K.classify_derivation_set()
        assert on == 1 and sorted([ext, internal]) == [(q - 1) // 2, (q + 1) // 2]


@pytest.mark.parametrize("q", [2, 3])
def test_subconic_extension_exhaustive(q):
    F = field_for_q(q)
    sub = list(F.subfield)
    import itertools

    n = 0
    for coeffs in itertools.product(sub, repeat=6):
        try:
            K = Conic(F, coeffs, subplane=True)
        except DegenerateConicError:
            continue
        n += 1
        for r in subplane_lines(F):
            assert subconic_extension_check(K, r).relation != "violation"
    assert n > 0


def test_subconic_extension_examples():
    F = field_for_q(5)
    K = Conic(F, [1, 0, 0, 0, F.neg(1), 0], subplane=True)  # subfield parabola
    assert subconic_extension_check(K, (0, 0, 1)).relation == "tangent->tangent"
    E = Conic(F, [1, 0, F.neg(2), 0, 0, F.neg(1)], subplane=True)  # X^2 - 2Y^2 = 1
    assert E.kind == "ellipse"
    assert subconic_extension_check(E, (0, 0, 1)).relation == "non-tangent->secant"
    assert Conic(F, E.coeffs).kind == "hyperbola"


def test_degenerate_rejected():
    F = field_for_q(3)
    with pytest.raises(DegenerateConicError):
        Conic(F, [1, 0, 0, 0, 0, 0])  # X^2
    with pytest.raises(DegenerateConicError):
        Conic(F, [0, 1, 0, 0, 0, 0])  # XY
    with pytest.raises(DegenerateConicError):
        parabola(F, 4, 4)  # u == v


def test_conic_through_five_recovers():
    F = field_for_q(5)
    K = hyperbola_xy(F, 2)
    again = conic_through_five(F, K.points[:5])
    assert again == K


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 4, 5]), st.integers(0, 2**30))
def test_literal_roundtrip(q, seed):
    F = field_for_q(q)
    rng = random.Random(seed)
    try:
        K = Conic(F, [rng.randrange(F.order) for _ in range(6)])
    except DegenerateConicError:
        return
    assert parse_conic(F, format_conic(K)).coeffs == K.coeffs


def test_family_literals():
    F = field_for_q(4)
    assert parse_conic(F, "hyperbola_xy(1)") == hyperbola_xy(F, 1)
    assert parse_conic(F, "parabola([0,1],[1,1],0)") == parabola(F, 2, 3, 0)
    with pytest.raises(ValueError):
        parse_conic(F, "circle(1)")


@pytest.mark.parametrize("q", [3, 4])
def test_second_intersection(q):
    F = field_for_q(q)
    K = y_eq_x2(F)
    P = next(P for P in projective_points(F) if not K.contains(P))
    for A in K.points:
        B = K.second_intersection(A, P)
        assert K.contains(B)
        if B == A:
            assert incident(F, K.tangent_at(A), P)


def test_substitute_translation():
    F = field_for_q(5)
    K = hyperbola_xy(F, 1)
    M = [[1, 0, 2], [0, 1, 3], [0, 0, 1]]  # (x, y) -> (x + 2, y + 3)
    T = K.substitute(M)
    assert {(F.sub(x, 2), F.sub(y, 3)) for x, y in K.affine_points} == set(T.affine_points)
    assert HallPlane.of(F) is HallPlane.of(F)
