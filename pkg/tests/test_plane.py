import io
import json
import random

import pytest

from hallconics.field import field_for_q
from hallconics.plane import (
    HallPlane,
    NewLine,
    OldLine,
    check_affine_plane_axioms,
    incident,
    line_through_points,
    normalize,
    parallel_classes_partition,
    projective_points,
)


@pytest.mark.parametrize("q,new_lines", [(2, 12), (3, 36), (4, 80), (5, 150)])
def test_new_line_count(q, new_lines):
    H = HallPlane.of(field_for_q(q))
    assert sum(1 for _ in H.new_lines()) == new_lines == (q + 1) * q * q


@pytest.mark.parametrize("q", [2, 3, 4])
def test_affine_plane_axioms(q):
    H = HallPlane.of(field_for_q(q))
    c = check_affine_plane_axioms(H)
    assert c["pairs_covered"] == c["total_pairs"] == c["pair_incidences"]
    assert c["new_lines_per_point"] == [q + 1]
    assert c["old_lines"] + c["new_lines"] == q**4 + q * q
    assert parallel_classes_partition(H)


def test_line_through_examples():
    F = field_for_q(3)
    H = HallPlane.of(F)
    assert H.line_through((0, 0), (1, 1)) == NewLine(1, (0, 0))
    m = F.from_digits([0, 1])
    assert H.line_through((0, 0), (1, m)) == OldLine(m, 0)
    assert set(H.points_on(NewLine(1, (0, 0)))) == {(u, v) for u in F.subfield for v in F.subfield}


def test_membership_examples():
    F = field_for_q(4)
    H = HallPlane.of(F)
    m = F.from_digits([0, 1, 1])
    L = OldLine(m, 5)
    for x in F.elements():
        assert H.contains(L, (x, F.add(F.mul(m, x), 5)))
    N = H.new_line((7, 3), m)
    assert H.contains(N, N.base)
    assert H.contains(N, (7, 3))


def test_derivation_set():
    F = field_for_q(2)
    H = HallPlane.of(F)
    w = F.from_digits([0, 1])
    assert H.in_derivation_set((1, 0, 0)) and H.in_derivation_set((0, 1, 0))
    assert not H.in_derivation_set((1, w, 0))
    assert len(H.derivation_set) == F.q + 1
    with pytest.raises(ValueError):
        H.in_derivation_set((0, 0, 1))


@pytest.mark.parametrize("q", [3, 4, 5])
def test_line_through_is_unique_and_symmetric(q):
    F = field_for_q(q)
    H = HallPlane.of(F)
    rng = random.Random(q)
    pts = list(H.affine_points())
    for _ in range(300):
        P, R = rng.sample(pts, 2)
        L = H.line_through(P, R)
        assert L == H.line_through(R, P)
        assert H.contains(L, P) and H.contains(L, R)
        assert P in H.points_on(L) and R in H.points_on(L)
        assert len(H.points_on(L)) == F.order


@pytest.mark.parametrize("q", [3, 4])
def test_lines_through_point(q):
    F = field_for_q(q)
    H = HallPlane.of(F)
    P = (5, 2)
    lines = H.lines_through(P)
    assert len(lines) == F.order + 1
    others = set()
    for L in lines:
        pts = set(H.points_on(L)) - {P}
        assert not (others & pts)
        others |= pts
    assert len(others) == F.order**2 - 1


@pytest.mark.parametrize("q", [3, 4])
def test_translations_are_collineations(q):
    """Translating every point of a line gives a line of the same kind."""
    F = field_for_q(q)
    H = HallPlane.of(F)
    rng = random.Random(7)
    lines = list(H.lines())
    for L in rng.sample(lines, 40):
        a, b = rng.randrange(F.order), rng.randrange(F.order)
        image = [(F.add(x, a), F.add(y, b)) for x, y in H.points_on(L)]
        M = H.line_through(image[0], image[1])
        assert type(M) is type(L)
        assert set(H.points_on(M)) == set(image)


def test_baer_subplane_and_hall_infinite_points():
    F = field_for_q(3)
    H = HallPlane.of(F)
    L = H.new_line((0, 0), 1)
    assert len(H.baer_subplane_points(L)) == F.q**2 + F.q + 1
    with pytest.raises(TypeError):
        H.baer_subplane_points(OldLine(F.from_digits([0, 1]), 0))
    with pytest.raises(ValueError):
        H.hall_infinite_point((1, 0, 0))
    m = F.from_digits([0, 1])
    c = H.hall_infinite_point((F.inv(m), 1, 0))  # direction (1, m)
    assert c == ("old", m)
    assert H.line_toward((0, 0), c) == OldLine(m, 0)
    assert len(H.infinite_points()) == F.order + 1


def test_projective_points_and_incidence():
    F = field_for_q(3)
    pts = projective_points(F)
    assert len(pts) == F.order**2 + F.order + 1
    assert len(projective_points(F, subplane=True)) == F.q**2 + F.q + 1
    P, R = pts[10], pts[40]
    ell = line_through_points(F, P, R)
    assert incident(F, ell, P) and incident(F, ell, R)
    t = F.from_digits([0, 1])
    assert normalize(F, (F.mul(t, 1), F.mul(t, 2), t)) == (1, 2, 1)


def test_dump_lines():
    F = field_for_q(2)
    H = HallPlane.of(F)
    buf = io.StringIO()
    n = H.dump_lines(buf, emit_points=True)
    recs = [json.loads(x) for x in buf.getvalue().splitlines()]
    assert n == len(recs) == F.order**2 + F.order
    assert {r["type"] for r in recs} == {"old", "new"}
    assert all(len(r["points"]) == F.order for r in recs)
    plain = io.StringIO()
    H.dump_lines(plain)
    assert "points" not in plain.getvalue()
