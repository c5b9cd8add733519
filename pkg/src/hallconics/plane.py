"""PG(2,q^2), the standard derivation set, and the affine Hall plane.

Points are plain tuples of int-encoded field elements: ``(x, y)`` for affine
points and normalised triples ``(x, y, z)`` for projective points.  Lines of
PG(2,q^2) use the same normalised-triple form for their coordinates
``(l0, l1, l2)`` meaning ``l0 X + l1 Y + l2 Z = 0``.

Hall lines are :class:`OldLine` (slope outside GF(q)) or :class:`NewLine`
(the affine part of a Baer subplane through the derivation set ``D``).  A new
line ``{(a + lam u, b + lam v) : u, v in GF(q)}`` is stored with ``lam`` the
least element of ``lam GF(q)*`` and ``(a, b)`` its least point, so dataclass
equality is point-set equality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterator, Union

import numpy as np

from .field import FieldSpec, format_element

Affine = tuple[int, int]
Proj = tuple[int, int, int]


@dataclass(frozen=True, order=True)
class OldLine:
    slope: int
    intercept: int

    kind = "old"


@dataclass(frozen=True, order=True)
class NewLine:
    direction: int
    base: Affine

    kind = "new"


HallLine = Union[OldLine, NewLine]

# Points at infinity of the projective Hall plane: one per parallel class.
# ("old", m) for old slope m; ("new", lam) for a new-line direction class.
HallInfinite = tuple[str, int]


def normalize(F: FieldSpec, pt) -> Proj:
    """Scale a homogeneous triple so its last nonzero coordinate is 1."""
    x, y, z = pt
    for c in (z, y, x):
        if c:
            inv = F.inv(c)
            return (F.mul(x, inv), F.mul(y, inv), F.mul(z, inv))
    raise ValueError("(0,0,0) is not a projective point")


def projective_points(F: FieldSpec, subplane: bool = False) -> list[Proj]:
    """All points of PG(2,q^2), or of the Baer subplane PG(2,q) if ``subplane``."""
    elems = list(F.subfield) if subplane else list(F.elements())
    pts = [(x, y, 1) for x in elems for y in elems]
    pts += [(x, 1, 0) for x in elems]
    pts.append((1, 0, 0))
    return pts


def line_through_points(F: FieldSpec, P: Proj, Q: Proj) -> Proj:
    """Coordinates of the PG(2,q^2) line through two distinct points (cross product)."""
    mul, sub = F.mul, F.sub
    l = (
        sub(mul(P[1], Q[2]), mul(P[2], Q[1])),
        sub(mul(P[2], Q[0]), mul(P[0], Q[2])),
        sub(mul(P[0], Q[1]), mul(P[1], Q[0])),
    )
    if l == (0, 0, 0):
        raise ValueError("points coincide")
    return normalize(F, l)


def incident(F: FieldSpec, line: Proj, P: Proj) -> bool:
    mul = F.mul
    return F.add(F.add(mul(line[0], P[0]), mul(line[1], P[1])), mul(line[2], P[2])) == 0


class HallPlane:
    """The affine Hall plane Hall(q^2) derived from AG(2,q^2) along the standard D.

    Build one per field with :meth:`of` (cached).
    """

    def __init__(self, F: FieldSpec):
        self.F = F
        self.q = F.q
        self.order = F.order  # q^2, the order of the Hall plane
        sub = list(F.subfield)
        sub_nonzero = [t for t in sub if t]
        # canonical direction of each nonzero element: least of x GF(q)*
        dir_of = [0] * F.order
        directions = []
        for x in F.nonzero():
            if dir_of[x]:
                continue
            directions.append(x)
            for t in sub_nonzero:
                dir_of[F.mul(x, t)] = x
        self.directions: tuple[int, ...] = tuple(directions)
        self._dir_of = dir_of
        self._dir_index = {lam: i for i, lam in enumerate(directions)}
        # rep[i][x]: least element of the additive coset x + lam_i GF(q)
        add = F.add_table if F.p != 2 else None
        ar = np.arange(F.order)
        reps = np.empty((len(directions), F.order), dtype=np.int64)
        for i, lam in enumerate(directions):
            shifts = np.array([F.mul(lam, t) for t in sub])
            if add is None:
                cand = np.bitwise_xor(ar[:, None], shifts[None, :])
            else:
                cand = add[ar[:, None], shifts[None, :]]
            reps[i] = cand.min(axis=1)
        self.coset_rep = reps
        self._rep_lists = reps.tolist()

    @staticmethod
    @lru_cache(maxsize=None)
    def of(F: FieldSpec) -> "HallPlane":
        return HallPlane(F)

    # -- derivation set ------------------------------------------------------

    @cached_property
    def derivation_set(self) -> tuple[Proj, ...]:
        """``D = {(x:y:0) : x, y in GF(q)}`` in normalised form."""
        return tuple([(m, 1, 0) for m in self.F.subfield] + [(1, 0, 0)])

    def in_derivation_set(self, P: Proj) -> bool:
        """True iff the point at infinity ``P`` lies in ``D``."""
        x, y, z = normalize(self.F, P)
        if z != 0:
            raise ValueError(f"{P} is not on the line at infinity")
        return self.F.in_subfield(x)  # (1:0:0) has x = 1

    # -- lines --------------------------------------------------------------

    def direction_of(self, x: int) -> int:
        if x == 0:
            raise ValueError("zero has no direction class")
        return self._dir_of[x]

    def new_line(self, P: Affine, lam: int) -> NewLine:
        """The new line through ``P`` with direction class of ``lam``."""
        lam = self._dir_of[lam]
        rep = self._rep_lists[self._dir_index[lam]]
        return NewLine(lam, (rep[P[0]], rep[P[1]]))

    def old_line(self, P: Affine, m: int) -> OldLine:
        F = self.F
        if F.in_subfield(m):
            raise ValueError("old lines need a slope outside GF(q)")
        return OldLine(m, F.sub(P[1], F.mul(m, P[0])))

    def line_through(self, P: Affine, Q: Affine) -> HallLine:
        """The unique Hall line through two distinct affine points."""
        if P == Q:
            raise ValueError("points coincide")
        F = self.F
        dx, dy = F.sub(Q[0], P[0]), F.sub(Q[1], P[1])
        if dx == 0:
            return self.new_line(P, dy)
        m = F.div(dy, dx)
        if F.in_subfield(m):
            return self.new_line(P, dx)
        return OldLine(m, F.sub(P[1], F.mul(m, P[0])))

    def contains(self, L: HallLine, P: Affine) -> bool:
        F = self.F
        if isinstance(L, OldLine):
            return F.add(F.mul(L.slope, P[0]), L.intercept) == P[1]
        inv = F.inv(L.direction)
        a, b = L.base
        return F.in_subfield(F.mul(F.sub(P[0], a), inv)) and F.in_subfield(
            F.mul(F.sub(P[1], b), inv)
        )

    def points_on(self, L: HallLine) -> list[Affine]:
        F = self.F
        if isinstance(L, OldLine):
            return [(x, F.add(F.mul(L.slope, x), L.intercept)) for x in F.elements()]
        lam = L.direction
        a, b = L.base
        steps = [F.mul(lam, t) for t in F.subfield]
        return [(F.add(a, s), F.add(b, t)) for s in steps for t in steps]

    def new_lines(self) -> Iterator[NewLine]:
        """All ``(q+1) q^2`` new lines, in a deterministic order."""
        for i, lam in enumerate(self.directions):
            reps = sorted(set(self._rep_lists[i]))
            for a in reps:
                for b in reps:
                    yield NewLine(lam, (a, b))

    def old_slopes(self) -> list[int]:
        F = self.F
        return [m for m in F.elements() if not F.in_subfield(m)]

    def old_lines(self) -> Iterator[OldLine]:
        for m in self.old_slopes():
            for b in self.F.elements():
                yield OldLine(m, b)

    def lines(self) -> Iterator[HallLine]:
        yield from self.old_lines()
        yield from self.new_lines()

    def lines_through(self, P: Affine) -> list[HallLine]:
        out: list[HallLine] = [self.new_line(P, lam) for lam in self.directions]
        out += [self.old_line(P, m) for m in self.old_slopes()]
        return out

    def affine_points(self) -> Iterator[Affine]:
        for x in self.F.elements():
            for y in self.F.elements():
                yield (x, y)

    # -- projective closure ---------------------------------------------------

    def infinite_point(self, L: HallLine) -> HallInfinite:
        if isinstance(L, OldLine):
            return ("old", L.slope)
        return ("new", L.direction)

    def infinite_points(self) -> list[HallInfinite]:
        return [("new", lam) for lam in self.directions] + [
            ("old", m) for m in self.old_slopes()
        ]

    def line_toward(self, P: Affine, c: HallInfinite) -> HallLine:
        """The Hall line through affine ``P`` and the point at infinity ``c``."""
        kind, v = c
        return self.new_line(P, v) if kind == "new" else self.old_line(P, v)

    def hall_infinite_point(self, P: Proj) -> HallInfinite:
        """The Hall point at infinity of a PG point at infinity outside ``D``.

        Points of ``D`` are not points of the derived plane; their role is taken
        by the ``q+1`` new parallel classes, so they raise ``ValueError``.
        """
        if self.in_derivation_set(P):
            raise ValueError(f"{P} lies in the derivation set")
        x, y, _ = normalize(self.F, P)
        return ("old", self.F.inv(x))  # (x:1:0) = (1 : 1/x : 0)

    def baer_subplane_points(self, L: NewLine) -> set[Proj]:
        """The ``q^2+q+1`` points of the Baer subplane whose affine part is ``L``."""
        if not isinstance(L, NewLine):
            raise TypeError("Baer subplanes exist only for new lines")
        pts = {(x, y, 1) for x, y in self.points_on(L)}
        pts.update(self.derivation_set)
        return pts

    # -- serialisation ---------------------------------------------------------

    def line_record(self, L: HallLine, emit_points: bool = False) -> dict:
        F = self.F
        if isinstance(L, OldLine):
            rec = {
                "type": "old",
                "slope": format_element(F, L.slope),
                "intercept": format_element(F, L.intercept),
            }
        else:
            rec = {
                "type": "new",
                "direction": format_element(F, L.direction),
                "base": [format_element(F, c) for c in L.base],
            }
        if emit_points:
            rec["points"] = [
                [format_element(F, x), format_element(F, y)] for x, y in self.points_on(L)
            ]
        return rec

    def dump_lines(self, fh, emit_points: bool = False) -> int:
        """Write every Hall line as one JSON object per line; return the count."""
        n = 0
        for L in self.lines():
            fh.write(json.dumps(self.line_record(L, emit_points)) + "\n")
            n += 1
        return n


def check_affine_plane_axioms(H: HallPlane) -> dict:
    """Brute-force incidence census of Hall(q^2) from explicit point sets.

    Returns counts used by the plane-axiom checks: every pair of affine points
    must be covered exactly once.
    """
    Q = H.order
    n_points = Q * Q
    pair_ids = []
    n_old = n_new = 0
    per_point_new = np.zeros(n_points, dtype=np.int64)
    for L in H.lines():
        idx = np.array(sorted(x * Q + y for x, y in H.points_on(L)), dtype=np.int64)
        if len(set(idx.tolist())) != Q:
            raise AssertionError(f"{L} does not have {Q} points")
        if isinstance(L, NewLine):
            n_new += 1
            per_point_new[idx] += 1
        else:
            n_old += 1
        i, j = np.triu_indices(Q, 1)
        pair_ids.append(idx[i] * n_points + idx[j])
    ids = np.concatenate(pair_ids)
    unique = np.unique(ids)
    total_pairs = n_points * (n_points - 1) // 2
    return {
        "old_lines": n_old,
        "new_lines": n_new,
        "pairs_covered": int(unique.size),
        "pair_incidences": int(ids.size),
        "total_pairs": total_pairs,
        "new_lines_per_point": sorted(set(per_point_new.tolist())),
    }


def parallel_classes_partition(H: HallPlane) -> bool:
    """Each parallel class of Hall lines partitions the affine points."""
    Q = H.order
    classes: dict[HallInfinite, list[HallLine]] = {}
    for L in H.lines():
        classes.setdefault(H.infinite_point(L), []).append(L)
    if len(classes) != Q + 1:
        return False
    for lines in classes.values():
        seen = set()
        for L in lines:
            pts = H.points_on(L)
            if seen.intersection(pts):
                return False
            seen.update(pts)
        if len(seen) != Q * Q:
            return False
    return True


def pairwise_collinear_triples(H: HallPlane, points) -> int:
    """Count collinear triples of affine points by direct enumeration."""
    pts = list(points)
    count = 0
    for P, Q, R in combinations(pts, 3):
        if H.contains(H.line_through(P, Q), R):
            count += 1
    return count
