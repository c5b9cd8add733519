"""Conics of PG(2,q^2) (or of the Baer subplane PG(2,q)) and their classification.

A conic is ``Q = cxx X^2 + cxy XY + cyy Y^2 + cxz XZ + cyz YZ + czz Z^2`` with
int-encoded coefficients.  Passing ``subplane=True`` restricts the point set to
GF(q)-rational points, which is how conics of PG(2,q) are handled.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .field import FieldError, FieldSpec, format_element, parse_element
from .plane import HallPlane, Proj, incident, line_through_points, normalize, projective_points


class DegenerateConicError(ValueError):
    """The quadratic form does not define an irreducible conic."""


@dataclass(frozen=True)
class ConicClass:
    kind: str  # "parabola" | "hyperbola" | "ellipse"
    infinite_points: tuple[Proj, ...]
    in_derivation_set: tuple[bool, ...]
    conjugate: bool = False
    nucleus: Proj | None = None
    nucleus_in_derivation_set: bool | None = None


@dataclass(frozen=True)
class ExtensionRelation:
    """Outcome of extending a subplane conic and line to PG(2,q^2)."""

    points_in_subplane: int
    points_in_extension: int

    @property
    def relation(self) -> str:
        if self.points_in_subplane == 1 and self.points_in_extension == 1:
            return "tangent->tangent"
        if self.points_in_subplane != 1 and self.points_in_extension == 2:
            return "non-tangent->secant"
        return "violation"


class Conic:
    """An irreducible conic; construction raises :class:`DegenerateConicError` otherwise."""

    def __init__(self, F: FieldSpec, coeffs, subplane: bool = False):
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) != 6:
            raise ValueError("a conic needs six coefficients")
        if subplane and not all(F.in_subfield(c) for c in coeffs):
            raise FieldError("a subplane conic needs GF(q) coefficients")
        self.F = F
        self.coeffs = coeffs
        self.subplane = subplane
        self.plane_order = F.q if subplane else F.order
        self.points = self._find_points()
        if len(self.points) != self.plane_order + 1:
            raise DegenerateConicError(
                f"{len(self.points)} points instead of {self.plane_order + 1}"
            )
        for P in self.points:
            if self.gradient(P) == (0, 0, 0):
                raise DegenerateConicError(f"singular point {P}")

    def __repr__(self):
        tag = ", subplane=True" if self.subplane else ""
        return f"Conic({format_conic(self)!r}{tag})"

    def __eq__(self, other):
        return (
            isinstance(other, Conic)
            and self.F == other.F
            and self.subplane == other.subplane
            and self.normalized_coeffs() == other.normalized_coeffs()
        )

    def __hash__(self):
        return hash((self.normalized_coeffs(), self.subplane))

    def normalized_coeffs(self) -> tuple[int, ...]:
        """Coefficients scaled so the first nonzero one is 1."""
        F = self.F
        lead = next(c for c in self.coeffs if c)
        inv = F.inv(lead)
        return tuple(F.mul(c, inv) for c in self.coeffs)

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, P) -> int:
        F = self.F
        mul, add = F.mul, F.add
        x, y, z = P
        a, b, c, d, e, f = self.coeffs
        terms = (
            mul(a, mul(x, x)),
            mul(b, mul(x, y)),
            mul(c, mul(y, y)),
            mul(d, mul(x, z)),
            mul(e, mul(y, z)),
            mul(f, mul(z, z)),
        )
        total = 0
        for t in terms:
            total = add(total, t)
        return total

    def polar(self, P, R) -> int:
        """The bilinear form ``Q(P+R) - Q(P) - Q(R)``; valid in every characteristic."""
        F = self.F
        S = tuple(F.add(u, v) for u, v in zip(P, R))
        return F.sub(F.sub(self.evaluate(S), self.evaluate(P)), self.evaluate(R))

    def gradient(self, P) -> tuple[int, int, int]:
        F = self.F
        mul, add = F.mul, F.add
        x, y, z = P
        a, b, c, d, e, f = self.coeffs
        two = F.scalar(2)
        gx = add(add(mul(mul(two, a), x), mul(b, y)), mul(d, z))
        gy = add(add(mul(b, x), mul(mul(two, c), y)), mul(e, z))
        gz = add(add(mul(d, x), mul(e, y)), mul(mul(two, f), z))
        return (gx, gy, gz)

    def contains(self, P) -> bool:
        return self.evaluate(P) == 0

    def _affine_values(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        F = self.F
        elems = np.array(F.subfield if self.subplane else list(F.elements()), dtype=np.int64)
        a, b, c, d, e, f = self.coeffs
        X = elems[:, None]
        Y = elems[None, :]
        sq = F.vmul(elems, elems).astype(np.int64)
        vmul, vadd = F.vmul, F.vadd
        val = vadd(vmul(a, sq)[:, None], vmul(c, sq)[None, :])
        val = vadd(val, vmul(b, F.mul_table[X, Y]))
        val = vadd(val, vmul(d, elems)[:, None])
        val = vadd(val, vmul(e, elems)[None, :])
        val = vadd(val, f)
        return elems, val, sq

    def _find_points(self) -> list[Proj]:
        elems, val, _ = self._affine_values()
        ix, iy = np.nonzero(val == 0)
        pts: list[Proj] = [(int(elems[i]), int(elems[j]), 1) for i, j in zip(ix, iy)]
        if len(pts) > self.plane_order + 1:
            raise DegenerateConicError("too many points")
        pts += [P for P in self._infinite_candidates() if self.evaluate(P) == 0]
        return pts

    def _infinite_candidates(self) -> list[Proj]:
        elems = self.F.subfield if self.subplane else self.F.elements()
        return [(x, 1, 0) for x in elems] + [(1, 0, 0)]

    @cached_property
    def affine_points(self) -> list[tuple[int, int]]:
        return [(x, y) for x, y, z in self.points if z == 1]

    @cached_property
    def infinite_points(self) -> tuple[Proj, ...]:
        return tuple(P for P in self.points if P[2] == 0)

    @cached_property
    def point_set(self) -> frozenset[Proj]:
        return frozenset(self.points)

    # -- classification ---------------------------------------------------

    @property
    def kind(self) -> str:
        return {1: "parabola", 2: "hyperbola", 0: "ellipse"}[len(self.infinite_points)]

    @cached_property
    def nucleus(self) -> Proj:
        """Common point of all tangents (characteristic 2 only)."""
        if self.F.p != 2:
            raise FieldError("only conics of even order have a nucleus")
        _, b, _, d, e, _ = self.coeffs
        return normalize(self.F, (e, d, b))

    def classify(self) -> ConicClass:
        return self._classification

    @cached_property
    def _classification(self) -> ConicClass:
        H = HallPlane.of(self.F)
        inf = self.infinite_points
        in_d = tuple(H.in_derivation_set(P) for P in inf)
        conjugate = False
        if len(inf) == 2:
            P, R = inf
            conjugate = P != R and normalize(self.F, tuple(self.F.conj(c) for c in P)) == R
        nucleus = nucleus_in_d = None
        if self.F.p == 2:
            nucleus = self.nucleus
            nucleus_in_d = nucleus[2] == 0 and H.in_derivation_set(nucleus)
        return ConicClass(self.kind, inf, in_d, conjugate, nucleus, nucleus_in_d)

    def kind_from_quadratic_part(self) -> str:
        """Parabola/hyperbola/ellipse from how ``f = cxx X^2 + cxy XY + cyy Y^2`` factors.

        Uses the discriminant (odd q) or the absolute trace of
        ``cxx cyy / cxy^2`` (even q); independent of point enumeration.
        """
        F = self.F
        a, b, c = self.coeffs[:3]
        sub = self.subplane
        if F.p == 2:
            if b == 0:
                return "parabola"
            t = F.div(F.mul(a, c), F.mul(b, b))
            return "hyperbola" if F.abs_trace(t, in_subfield=sub) == 0 else "ellipse"
        disc = F.sub(F.mul(b, b), F.mul(F.scalar(4), F.mul(a, c)))
        if disc == 0:
            return "parabola"
        return "hyperbola" if F.is_square(disc, in_subfield=sub) else "ellipse"

    # -- tangents and positions --------------------------------------------

    def tangent_at(self, P) -> Proj:
        """Line coordinates of the tangent at the conic point ``P``."""
        P = normalize(self.F, P)
        if P not in self.point_set:
            raise ValueError(f"{P} is not on the conic")
        return normalize(self.F, self.gradient(P))

    @cached_property
    def tangents(self) -> dict[Proj, Proj]:
        return {P: self.tangent_at(P) for P in self.points}

    def points_on_line(self, line) -> list[Proj]:
        F = self.F
        return [P for P in self.points if incident(F, line, P)]

    def tangents_through(self, P) -> int:
        F = self.F
        return sum(1 for t in self.tangents.values() if incident(F, t, P))

    def _check_odd(self):
        if self.F.p == 2:
            raise FieldError("external/internal points need odd q")

    def point_position(self, P) -> str:
        """``"on"``, ``"external"`` (on two tangents) or ``"internal"`` (on none)."""
        self._check_odd()
        P = normalize(self.F, P)
        if self.contains(P):
            return "on"
        n = self.tangents_through(P)
        if n == 2:
            return "external"
        if n == 0:
            return "internal"
        raise AssertionError(f"{n} tangents through {P}")  # pragma: no cover

    @cached_property
    def _neg_det(self) -> int:
        F = self.F
        mul, sub, add = F.mul, F.sub, F.add
        half = F.inv(F.scalar(2))
        a, b, c, d, e, f = self.coeffs
        b2, d2, e2 = mul(b, half), mul(d, half), mul(e, half)
        det = sub(
            add(mul(a, sub(mul(c, f), mul(e2, e2))), mul(d2, sub(mul(b2, e2), mul(c, d2)))),
            mul(b2, sub(mul(b2, f), mul(e2, d2))),
        )
        return F.neg(det)

    def position_by_character(self, P) -> str:
        """Same answer as :meth:`point_position` via the character of ``-det(M) Q(P)``."""
        self._check_odd()
        F = self.F
        P = normalize(F, P)
        v = self.evaluate(P)
        if v == 0:
            return "on"
        return "external" if F.is_square(F.mul(self._neg_det, v), self.subplane) else "internal"

    def classify_derivation_set(self) -> tuple[int, int, int]:
        """Counts ``(external, internal, on)`` over the ``q+1`` points of ``D``."""
        self._check_odd()
        counts = {"external": 0, "internal": 0, "on": 0}
        for P in HallPlane.of(self.F).derivation_set:
            counts[self.point_position(P)] += 1
        return counts["external"], counts["internal"], counts["on"]

    def second_intersection(self, A: Proj, P: Proj) -> Proj:
        """Other meeting point of the line ``AP`` with the conic (``A`` on it, ``P`` off it).

        Returns ``A`` itself when ``AP`` is the tangent at ``A``.
        """
        F = self.F
        qp = self.evaluate(P)
        if qp == 0:
            raise ValueError("P must be off the conic")
        t = F.neg(F.div(self.polar(A, P), qp))
        return normalize(F, tuple(F.add(a, F.mul(t, p)) for a, p in zip(A, P)))

    def substitute(self, M) -> "Conic":
        """The conic ``Q(M v)`` for a 3x3 matrix ``M`` (rows give X, Y, Z)."""
        F = self.F
        mul, add = F.mul, F.add
        a, b, c, d, e, f = self.coeffs
        sym = [[a, b, d], [0, c, e], [0, 0, f]]  # upper triangular form
        new = {}
        keys = [(0, 0), (0, 1), (1, 1), (0, 2), (1, 2), (2, 2)]
        for r, s in keys:
            total = 0
            for i in range(3):
                for j in range(i, 3):
                    coef = sym[i][j]
                    if not coef:
                        continue
                    term = add(mul(M[i][r], M[j][s]), mul(M[i][s], M[j][r])) if r != s else mul(
                        M[i][r], M[j][r]
                    )
                    total = add(total, mul(coef, term))
            new[(r, s)] = total
        return Conic(F, [new[k] for k in keys], self.subplane)


def subconic_extension_check(K_sub: Conic, line) -> ExtensionRelation:
    """Compare how ``line`` meets a PG(2,q) conic and its extension to PG(2,q^2)."""
    if not K_sub.subplane:
        raise ValueError("expected a subplane conic")
    F = K_sub.F
    line = normalize(F, line)
    if not all(F.in_subfield(c) for c in line):
        raise FieldError("line is not a line of the subplane")
    K_ext = Conic(F, K_sub.coeffs)
    return ExtensionRelation(len(K_sub.points_on_line(line)), len(K_ext.points_on_line(line)))


def subplane_lines(F: FieldSpec) -> list[Proj]:
    """All ``q^2+q+1`` lines of PG(2,q), as coordinate triples."""
    return projective_points(F, subplane=True)


def conic_through_five(F: FieldSpec, points, subplane: bool = False) -> Conic:
    """The conic through five points in general position (Gaussian elimination)."""
    rows = []
    mul = F.mul
    for x, y, z in points:
        rows.append([mul(x, x), mul(x, y), mul(y, y), mul(x, z), mul(y, z), mul(z, z)])
    null = nullspace(F, rows)
    if len(null) != 1:
        raise DegenerateConicError("points do not determine a unique conic")
    return Conic(F, null[0], subplane)


def nullspace(F: FieldSpec, rows: list[list[int]]) -> list[list[int]]:
    """Basis of the right null space of a matrix over the field."""
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][col])
        rows[r] = [F.mul(v, inv) for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                factor = rows[i][col]
                rows[i] = [F.sub(v, F.mul(factor, w)) for v, w in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = F.neg(rows[i][fc])
        basis.append(vec)
    return basis


def solve(F: FieldSpec, A: list[list[int]], b: list[int]) -> list[int] | None:
    """Unique solution of ``A x = b`` or ``None`` if singular/inconsistent."""
    n = len(A[0])
    aug = [list(row) + [F.neg(v)] for row, v in zip(A, b)]
    null = nullspace(F, aug)
    if len(null) != 1 or null[0][n] == 0:
        return None
    inv = F.inv(null[0][n])
    return [F.mul(v, inv) for v in null[0][:n]]


# -- named families and literals ------------------------------------------------

def parabola(F: FieldSpec, u: int, v: int, w: int = 0) -> Conic:
    """``(X + uY)^2 + Z(X + vY) + w Z^2``: infinite point ``(-u:1:0)``.

    For even q the nucleus is ``(v:1:0)``; the conic is degenerate iff ``u == v``.
    """
    mul, s = F.mul, F.scalar
    return Conic(F, [1, mul(s(2), u), mul(u, u), 1, v, w])


def hyperbola_xy(F: FieldSpec, d: int) -> Conic:
    """``XY = d Z^2``, with infinite points ``(1:0:0)`` and ``(0:1:0)``."""
    return Conic(F, [0, 1, 0, 0, 0, F.neg(d)])


def normalform(F: FieldSpec, c: int, u: int, v: int, w: int) -> Conic:
    """``X^2 + XY + cY^2 + uXZ + vYZ + wZ^2``."""
    return Conic(F, [1, 1, c, u, v, w])


FAMILIES = {"parabola": parabola, "hyperbola_xy": hyperbola_xy, "normalform": normalform}

_FAMILY_RE = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$", re.S)


def parse_conic(F: FieldSpec, literal: str, subplane: bool = False) -> Conic:
    """Parse ``"Q: cxx,cxy,cyy,cxz,cyz,czz"`` or a family call like ``"hyperbola_xy(1)"``.

    Element literals are ints (prime field) or coordinate lists ``[c0,c1,...]``.
    """
    text = literal.strip()
    try:
        if text.startswith("Q:"):
            values = json.loads("[" + text[2:] + "]")
            return Conic(F, [parse_element(F, v) for v in values], subplane)
        m = _FAMILY_RE.match(text)
        if m and m.group(1) in FAMILIES:
            args = json.loads("[" + m.group(2) + "]")
            return FAMILIES[m.group(1)](F, *[parse_element(F, a) for a in args])
    except (json.JSONDecodeError, TypeError) as exc:
        raise ValueError(f"bad conic literal {literal!r}: {exc}") from None
    raise ValueError(f"bad conic literal {literal!r}")


def format_conic(K: Conic) -> str:
    return "Q: " + ",".join(json.dumps(format_element(K.F, c)) for c in K.coeffs)


def format_point(F: FieldSpec, P) -> list[list[int]]:
    return [format_element(F, c) for c in P]


def class_record(K: Conic) -> dict:
    """JSON-ready form of :meth:`Conic.classify`."""
    c = K.classify()
    F = K.F
    rec = {
        "kind": c.kind,
        "infinite_points": [format_point(F, P) for P in c.infinite_points],
        "in_D": list(c.in_derivation_set),
        "conjugate": c.conjugate,
    }
    if c.nucleus is not None:
        rec["nucleus"] = format_point(F, c.nucleus)
        rec["nucleus_in_D"] = c.nucleus_in_derivation_set
    return rec


def line_through(F: FieldSpec, P, R) -> Proj:
    return line_through_points(F, normalize(F, P), normalize(F, R))
