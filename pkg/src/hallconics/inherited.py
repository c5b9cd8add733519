"""How a conic of PG(2,q^2) sits inside the Hall plane.

The central routine is :func:`secant_spectrum`, which sorts the affine points
of a conic into new lines.  New lines of one direction class are the cosets of
an additive subgroup, so a point's line is read off the coset-representative
table of :class:`~hallconics.plane.HallPlane` and the whole spectrum costs
``O((q+1) |K|)``.  Classes are independent; partial spectra add.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .conic import Conic, class_record, format_conic
from .plane import Affine, HallInfinite, HallLine, HallPlane, NewLine, normalize


class TheoremViolation(AssertionError):
    """An enumerated configuration contradicts a proven statement."""


@dataclass(frozen=True)
class SecantSpectrum:
    q: int
    a: tuple[int, ...]
    triples: int
    max_line: int
    n_affine: int

    def __getitem__(self, i: int) -> int:
        return self.a[i] if 0 <= i < len(self.a) else 0

    @property
    def support(self) -> set[int]:
        return {i for i, v in enumerate(self.a) if v}

    def as_list(self) -> list[int]:
        return list(self.a)


@dataclass
class ArcReport:
    size: int
    is_arc: bool
    is_complete: bool
    extension_points: list = field(default_factory=list)
    hyperoval_reachable: bool | None = None
    max_collinear: int = 0


def _affine_arrays(K: Conic) -> tuple[np.ndarray, np.ndarray]:
    pts = K.affine_points
    xs = np.fromiter((x for x, _ in pts), dtype=np.int64, count=len(pts))
    ys = np.fromiter((y for _, y in pts), dtype=np.int64, count=len(pts))
    return xs, ys


def new_line_counts(K: Conic, classes=None) -> Counter:
    """Map each new line meeting the affine part of ``K`` to its number of points."""
    H = HallPlane.of(K.F)
    xs, ys = _affine_arrays(K)
    out: Counter = Counter()
    indices = range(len(H.directions)) if classes is None else classes
    for i in indices:
        lam = H.directions[i]
        rep = H.coset_rep[i]
        keys = rep[xs] * H.order + rep[ys]
        vals, counts = np.unique(keys, return_counts=True)
        for key, c in zip(vals.tolist(), counts.tolist()):
            out[NewLine(lam, divmod(key, H.order))] = c
    return out


def secant_spectrum(K: Conic) -> SecantSpectrum:
    """Numbers ``a_i`` of new lines meeting the affine part of ``K`` in ``i`` points."""
    H = HallPlane.of(K.F)
    q, Q = H.q, H.order
    xs, ys = _affine_arrays(K)
    hist = np.zeros(q + 2, dtype=np.int64)
    for i in range(len(H.directions)):
        rep = H.coset_rep[i]
        keys = rep[xs] * Q + rep[ys]
        _, counts = np.unique(keys, return_counts=True)
        h = np.bincount(counts, minlength=q + 2)
        if h.size > hist.size:  # cannot happen for an irreducible conic
            hist = np.pad(hist, (0, h.size - hist.size))
        hist[: h.size] += h
        hist[0] += Q - counts.size  # Q lines per class
    a = tuple(int(v) for v in hist)
    triples = sum(comb(i, 3) * v for i, v in enumerate(a))
    max_line = max(i for i, v in enumerate(a) if v)
    return SecantSpectrum(q, a, triples, max_line, len(xs))


def old_line_spectrum(K: Conic) -> dict[int, int]:
    """Distribution of ``|L cap K|`` over old lines meeting the affine part of ``K``."""
    H = HallPlane.of(K.F)
    F = K.F
    xs, ys = _affine_arrays(K)
    hist: Counter = Counter()
    for m in H.old_slopes():
        b = F.vadd(ys, F.neg_array[F.vmul(m, xs)])
        _, counts = np.unique(b, return_counts=True)
        hist.update(counts.tolist())
    return dict(hist)


def collinear_triples(K: Conic) -> int:
    """Collinear triples of affine points of ``K`` in Hall(q^2) (all on new lines)."""
    return secant_spectrum(K).triples


def collinear_triples_bruteforce(K: Conic) -> int:
    """Same count by testing every triple with ``line_through``/``contains``."""
    H = HallPlane.of(K.F)
    pts = K.affine_points
    count = 0
    for P, Q, R in combinations(pts, 3):
        if H.contains(H.line_through(P, Q), R):
            count += 1
    return count


def per_point_line_distribution(K: Conic, P: Affine) -> dict[int, int]:
    """For each ``i``, how many of the ``q+1`` new lines through ``P`` meet ``K`` in ``i`` points."""
    P = tuple(P)
    if P not in set(K.affine_points):
        raise ValueError(f"{P} is not an affine point of the conic")
    H = HallPlane.of(K.F)
    xs, ys = _affine_arrays(K)
    dist: Counter = Counter()
    for i in range(len(H.directions)):
        rep = H.coset_rep[i]
        on = np.count_nonzero((rep[xs] == rep[P[0]]) & (rep[ys] == rep[P[1]]))
        dist[int(on)] += 1
    return dict(sorted(dist.items()))


def tangent_meets_derivation_set(K: Conic, P: Affine) -> bool:
    H = HallPlane.of(K.F)
    l0, l1, _ = K.tangent_at((P[0], P[1], 1))
    return H.in_derivation_set(normalize(K.F, (l1, K.F.neg(l0), 0)))


def tangent_witnesses(K: Conic, L: NewLine) -> tuple[list[Affine], list[Affine]]:
    """Points of ``L cap K`` and those among them whose tangent meets ``D``."""
    H = HallPlane.of(K.F)
    on = [P for P in K.affine_points if H.contains(L, P)]
    return on, [P for P in on if tangent_meets_derivation_set(K, P)]


def three_secant_tangent_witness(K: Conic, L: NewLine) -> Affine | None:
    """The point of ``L cap K`` whose tangent meets ``D``, if any.

    Raises :class:`TheoremViolation` if a 3-secant has no or several such
    points, or if a line with four or more points has one.
    """
    if K.F.p != 2:
        raise ValueError("defined for even q")
    on, wit = tangent_witnesses(K, L)
    if len(on) == 3 and len(wit) != 1:
        raise TheoremViolation(f"3-secant {L} has {len(wit)} tangent witnesses")
    if len(on) >= 4 and wit:
        raise TheoremViolation(f"{len(on)}-secant {L} has a tangent meeting D")
    return wit[0] if wit else None


# -- arcs -------------------------------------------------------------------

def _line_members(H: HallPlane, pts, inf) -> dict[HallLine, set]:
    members: dict[HallLine, set] = {}
    for P, Q in combinations(pts, 2):
        members.setdefault(H.line_through(P, Q), set()).update((P, Q))
    for P in pts:
        for c in inf:
            members.setdefault(H.line_toward(P, c), set()).add(P)
    return members


def arc_report(S, H: HallPlane, infinite=()) -> ArcReport:
    """Arc, completeness and (even q) hyperoval tests for a set in projective Hall(q^2).

    ``S`` holds affine points; ``infinite`` holds Hall points at infinity, see
    :meth:`HallPlane.hall_infinite_point`.  Candidates for extension are all
    ``q^4`` affine points and all ``q^2+1`` points at infinity.
    """
    pts = sorted(set(map(tuple, S)))
    inf = sorted(set(infinite))
    members = _line_members(H, pts, inf)
    counts = {L: len(m) + (H.infinite_point(L) in inf) for L, m in members.items()}
    max_col = max([len(inf)] + list(counts.values()) + [min(len(pts), 1)])
    report = ArcReport(len(pts) + len(inf), is_arc=max_col <= 2, is_complete=False,
                       max_collinear=max_col)
    if not report.is_arc:
        return report

    Q = H.order
    covered = np.zeros((Q, Q), dtype=bool)
    covered_inf: set[HallInfinite] = set()
    for L, c in counts.items():
        if c == 2:
            for x, y in H.points_on(L):
                covered[x, y] = True
            covered_inf.add(H.infinite_point(L))
    if len(inf) == 2:
        covered_inf.update(H.infinite_points())
    for x, y in pts:
        covered[x, y] = True
    ext: list = [(int(x), int(y)) for x, y in zip(*np.nonzero(~covered))]
    ext += [c for c in H.infinite_points() if c not in covered_inf and c not in inf]
    report.extension_points = ext
    report.is_complete = not ext

    if H.F.p == 2:
        report.hyperoval_reachable = _hyperoval_reachable(H, pts, inf, ext)
    return report


def _line_free_of(H: HallPlane, X, Y, pts, inf) -> bool:
    """The line through the extension points ``X`` and ``Y`` misses the set."""
    x_inf, y_inf = isinstance(X[0], str), isinstance(Y[0], str)
    if x_inf and y_inf:
        return not inf
    if x_inf:
        X, Y = Y, X
    L = H.line_toward(X, Y) if isinstance(Y[0], str) else H.line_through(X, Y)
    if H.infinite_point(L) in inf:
        return False
    return not any(H.contains(L, P) for P in pts)


def _hyperoval_reachable(H: HallPlane, pts, inf, ext) -> bool:
    missing = H.order + 2 - len(pts) - len(inf)
    if missing == 0:
        return True
    if missing == 1:
        return bool(ext)
    if missing == 2:
        return any(_line_free_of(H, X, Y, pts, inf) for X, Y in combinations(ext, 2))
    return False


def internal_nucleus_set(S, H: HallPlane) -> list[Affine]:
    """Points ``P`` of ``S`` such that every Hall line through ``P`` holds at most one other point."""
    pts = sorted(set(map(tuple, S)))
    out = []
    for P in pts:
        seen: set[HallLine] = set()
        for R in pts:
            if R == P:
                continue
            L = H.line_through(P, R)
            if L in seen:
                break
            seen.add(L)
        else:
            out.append(P)
    return out


def hall_infinite_points_of(K: Conic) -> list[HallInfinite]:
    """Infinite points of ``K`` as Hall points; those in ``D`` have no Hall image and raise."""
    H = HallPlane.of(K.F)
    return [H.hall_infinite_point(P) for P in K.infinite_points]


def spectrum_report(K: Conic, checks=()) -> dict:
    """JSON-ready spectrum report of a conic."""
    F = K.F
    spec = secant_spectrum(K)
    s_ext = K.classify_derivation_set()[0] if F.p != 2 else None
    return {
        "q": F.q,
        "p": F.p,
        "conic": format_conic(K),
        "class": class_record(K),
        "spectrum": spec.as_list(),
        "triples": spec.triples,
        "s_external": s_ext,
        "checks": list(checks),
    }
