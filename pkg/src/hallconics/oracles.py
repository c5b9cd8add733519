"""Brute-force counters for the counting lemmas, usable on their own or as cross-checks."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .conic import Conic, DegenerateConicError, solve
from .field import FieldError, FieldSpec, get_field
from .inherited import TheoremViolation
from .plane import Affine, HallPlane, NewLine, Proj, incident, line_through_points, normalize


class HypothesisError(ValueError):
    """Input violates a lemma's hypothesis; ``condition`` names the failed one."""

    def __init__(self, condition: str, message: str = ""):
        super().__init__(message or condition)
        self.condition = condition


# -- inscribed triangles -------------------------------------------------------

@dataclass(frozen=True)
class TriangleCount:
    conic: Conic
    line: Proj
    triple: tuple[Proj, Proj, Proj]
    count: int
    triangles: tuple[tuple[Proj, Proj, Proj], ...]


def _check_triple(K: Conic, r: Proj, T) -> tuple[Proj, Proj, Proj]:
    F = K.F
    T = tuple(normalize(F, P) for P in T)
    if len(set(T)) != 3:
        raise ValueError("triple points must be distinct")
    for P in T:
        if not incident(F, r, P):
            raise ValueError(f"{P} is not on the line")
        if K.contains(P):
            raise ValueError(f"{P} lies on the conic")
        if K.subplane and not all(F.in_subfield(c) for c in P):
            raise ValueError(f"{P} is not a subplane point")
    return T


def count_inscribed_triangles(K: Conic, r, T) -> TriangleCount:
    """Triangles ``A1 A2 A3`` on ``K`` off ``r`` with ``A_i A_j`` through ``P_k``.

    Walks chords: ``A2`` is the second point of ``A1 P3``, ``A3`` that of
    ``A2 P1``; the triangle closes when ``A3 A1`` passes through ``P2``.
    ``A1`` is determined by the triangle, so each is found once.
    """
    F = K.F
    r = normalize(F, r)
    P1, P2, P3 = _check_triple(K, r, T)
    found = []
    for A1 in K.points:
        if incident(F, r, A1):
            continue
        A2 = K.second_intersection(A1, P3)
        if A2 == A1:
            continue
        A3 = K.second_intersection(A2, P1)
        if A3 in (A1, A2):
            continue
        if incident(F, line_through_points(F, A3, A1), P2):
            found.append((A1, A2, A3))
    return TriangleCount(K, r, (P1, P2, P3), len(found), tuple(found))


def _meet(F: FieldSpec, l: Proj, m: Proj) -> Proj:
    return line_through_points(F, l, m)  # cross product is self-dual


def count_inscribed_triangles_bruteforce(K: Conic, r, T) -> int:
    """The same count over all 3-subsets of ``K \\ r``."""
    F = K.F
    r = normalize(F, r)
    P1, P2, P3 = _check_triple(K, r, T)
    target = Counter((P1, P2, P3))
    off = [A for A in K.points if not incident(F, r, A)]
    count = 0
    for A, B, C in combinations(off, 3):
        meets = Counter(
            _meet(F, line_through_points(F, X, Y), r) for X, Y in ((A, B), (B, C), (C, A))
        )
        if meets == target:
            count += 1
    return count


def expected_triangle_count(K: Conic, r, T) -> int | None:
    """The count predicted for ``(K, r, T)``, or ``None`` where no exact value is known."""
    F = K.F
    r = normalize(F, r)
    tangent = len(K.points_on_line(r)) == 1
    if F.p == 2:
        return None if tangent else 1
    if tangent:
        return 1
    n_ext = sum(K.point_position(P) == "external" for P in T)
    return 2 if n_ext in (1, 3) else 0


# -- parabolas through three points of a new line ------------------------------

def _parabola_sizes(H: HallPlane, L: NewLine, pts) -> tuple[Counter, int]:
    F = H.F
    pts = [tuple(P) for P in pts]
    if len(set(pts)) != 3 or not all(H.contains(L, P) for P in pts):
        raise ValueError("need three distinct affine points of the line")
    rows = [[x, y, 1] for x, y in pts]
    line_pts = H.points_on(L)
    sizes: Counter = Counter()
    exact = 0
    for u in F.elements():
        if F.in_subfield(u):
            continue
        rhs = [F.neg(F.mul(F.add(x, F.mul(u, y)), F.add(x, F.mul(u, y)))) for x, y in pts]
        sol = solve(F, rows, rhs)
        if sol is None:
            raise ValueError("points are collinear in AG(2,q^2)")
        alpha, beta, gamma = sol
        try:
            K = Conic(F, [1, F.mul(F.scalar(2), u), F.mul(u, u), alpha, beta, gamma])
        except DegenerateConicError:
            sizes["degenerate"] += 1
            continue
        on = {P for P in line_pts if K.contains((P[0], P[1], 1))}
        sizes[len(on)] += 1
        if on == set(pts):
            exact += 1
    return sizes, exact


def count_three_secant_parabolas(H: HallPlane, L: NewLine, P1, P2, P3) -> int:
    """Parabolas with infinite point ``(-u:1:0)``, ``u`` outside GF(q), meeting ``L`` exactly in the triple."""
    if H.F.p == 2:
        raise FieldError("the lemma is for odd q")
    return _parabola_sizes(H, L, (P1, P2, P3))[1]


def three_secant_parabola_sizes(H: HallPlane, L: NewLine, P1, P2, P3) -> Counter:
    """Distribution of ``|L cap K_u|`` over the parabolas counted above."""
    return _parabola_sizes(H, L, (P1, P2, P3))[0]


def canonical_triple(F: FieldSpec) -> tuple[NewLine, tuple[Affine, Affine, Affine]]:
    """The standard new line ``GF(q) x GF(q)`` and the points ``(0,0), (-1,0), (0,-1)``."""
    H = HallPlane.of(F)
    m1 = F.neg(1)
    return H.new_line((0, 0), 1), ((0, 0), (m1, 0), (0, m1))


def verify_kv_rational_point(F: FieldSpec, u: int) -> Affine:
    """The fourth GF(q)-rational point of ``K_u: (X+uY)^2 + X + u^2 Y = 0``.

    Raises :class:`TheoremViolation` if the closed form is not rational or not on ``K_u``.
    """
    if F.p == 2:
        raise FieldError("needs odd q")
    if F.in_subfield(u):
        raise ValueError("u must lie outside GF(q)")
    ub = F.conj(u)
    s = F.add(u, ub)
    d = F.sub(u, ub)
    d2inv = F.inv(F.mul(d, d))
    two = F.scalar(2)
    x = F.mul(F.mul(s, F.sub(F.mul(two, F.mul(u, ub)), s)), d2inv)
    y = F.mul(F.mul(s, F.sub(two, s)), d2inv)
    if not (F.in_subfield(x) and F.in_subfield(y)):
        raise TheoremViolation(f"point {(x, y)} is not GF(q)-rational")
    lin = F.add(x, F.mul(u, y))
    val = F.add(F.add(F.mul(lin, lin), x), F.mul(F.mul(u, u), y))
    if val != 0:
        raise TheoremViolation(f"point {(x, y)} is not on K_u")
    return (x, y)


def kv_point_is_degenerate(F: FieldSpec, u: int) -> bool:
    """``u + conj(u)`` in ``{0, 2}`` or ``1/u + 1/conj(u) == 2``."""
    ub = F.conj(u)
    s = F.add(u, ub)
    return s in (0, F.scalar(2)) or F.add(F.inv(u), F.inv(ub)) == F.scalar(2)


# -- N_beta --------------------------------------------------------------------

def _eval_poly(F: FieldSpec, coeffs, t: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = F.add(F.mul(acc, t), c)
    return acc


def _deflate(F: FieldSpec, coeffs, t: int) -> list[int]:
    """Divide by ``(T - t)``; coefficients lowest degree first."""
    n = len(coeffs) - 1
    out = [0] * n
    acc = 0
    for i in range(n, 0, -1):
        acc = F.add(F.mul(acc, t), coeffs[i])
        out[i - 1] = acc
    return out


def rational_roots_with_multiplicity(F: FieldSpec, coeffs) -> int:
    """Number of roots in GF(q), counted with multiplicity."""
    total = 0
    for t in F.subfield:
        poly = list(coeffs)
        while len(poly) > 1 and _eval_poly(F, poly, t) == 0:
            poly = _deflate(F, poly, t)
            total += 1
    return total


def nbeta_polynomial(F: FieldSpec, beta: int) -> list[int]:
    """Coefficients of ``T^3 + N T + N (beta + conj(beta))``, ``N = beta conj(beta)``."""
    nb = F.norm(beta)
    return [F.mul(nb, F.trace(beta)), nb, 0, 1]


def count_rational_roots_nbeta(F: FieldSpec, beta: int) -> int:
    if F.p != 2:
        raise FieldError("defined for even q")
    if beta == 0:
        raise ValueError("beta must be nonzero")
    return rational_roots_with_multiplicity(F, nbeta_polynomial(F, beta))


def nbeta_expected(F: FieldSpec, beta: int) -> int:
    """Root count predicted by the square / non-square case split."""
    if F.k % 2 == 0:
        return 3 if F.in_subfield(beta) else 1
    return 3 if F.is_cube(beta) else 0


# -- Moebius normal form of X^2 + beta X + gamma (even q) -----------------------

@dataclass(frozen=True)
class MoebiusMap:
    """``z -> (a z + b) / (c z + d)`` with GF(q) coefficients."""

    F: FieldSpec
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        F = self.F
        if not all(F.in_subfield(v) for v in (self.a, self.b, self.c, self.d)):
            raise ValueError("Moebius coefficients must lie in GF(q)")
        if F.sub(F.mul(self.a, self.d), F.mul(self.b, self.c)) == 0:
            raise ValueError("Moebius map is not invertible")

    def __call__(self, z: int) -> int:
        F = self.F
        return F.div(F.add(F.mul(self.a, z), self.b), F.add(F.mul(self.c, z), self.d))

    def transform_quadratic(self, beta: int, gamma: int) -> tuple[int, int]:
        """Monic ``(beta', gamma')`` with ``(cz+d)^2 f(map(z))`` proportional to ``z^2 + beta' z + gamma'``."""
        F = self.F
        num = [self.b, self.a]  # b + a z
        den = [self.d, self.c]
        poly = _padd(F, _padd(F, _pmul(F, num, num), _pscale(F, beta, _pmul(F, num, den))),
                     _pscale(F, gamma, _pmul(F, den, den)))
        if poly[2] == 0:
            raise ValueError("transformed polynomial is not quadratic")
        inv = F.inv(poly[2])
        return F.mul(poly[1], inv), F.mul(poly[0], inv)

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """``self(other(z))``."""
        F = self.F
        m, n = self, other
        return MoebiusMap(
            F,
            F.add(F.mul(m.a, n.a), F.mul(m.b, n.c)),
            F.add(F.mul(m.a, n.b), F.mul(m.b, n.d)),
            F.add(F.mul(m.c, n.a), F.mul(m.d, n.c)),
            F.add(F.mul(m.c, n.b), F.mul(m.d, n.d)),
        )


def _pmul(F, f, g):
    out = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        for j, y in enumerate(g):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return out


def _padd(F, f, g):
    n = max(len(f), len(g))
    f = list(f) + [0] * (n - len(f))
    g = list(g) + [0] * (n - len(g))
    return [F.add(x, y) for x, y in zip(f, g)]


def _pscale(F, s, f):
    return [F.mul(s, x) for x in f]


@dataclass(frozen=True)
class _Tower:
    big: FieldSpec
    embed: tuple[int, ...]  # image of each GF(q^2) element in GF(q^4)


@lru_cache(maxsize=None)
def quartic_extension(F: FieldSpec) -> _Tower:
    """GF(q^4) together with an embedding of ``F = GF(q^2)``."""
    big = get_field(F.p, 2 * F.k)
    mod = list(F.modulus)
    theta = next(x for x in big.elements() if _eval_poly(big, mod, x) == 0)
    powers = [1]
    for _ in range(F.n - 1):
        powers.append(big.mul(powers[-1], theta))
    embed = []
    for a in F.elements():
        acc = 0
        for c, tp in zip(F.digits(a), powers):
            acc = big.add(acc, big.mul(c, tp))
        embed.append(acc)
    return _Tower(big, tuple(embed))


@lru_cache(maxsize=None)
def _artin_schreier_table(big: FieldSpec) -> dict[int, int]:
    """``z^2 + z -> z`` (least preimage) over a field of characteristic 2."""
    table: dict[int, int] = {}
    for z in big.elements():
        table.setdefault(big.add(big.mul(z, z), z), z)
    return table


def quadratic_roots_quartic(F: FieldSpec, beta: int, gamma: int) -> tuple[int, int]:
    """Roots in GF(q^4) of ``X^2 + beta X + gamma`` (even q), as GF(q^4) elements."""
    if F.p != 2:
        raise FieldError("defined for even q")
    T = quartic_extension(F)
    big = T.big
    b, g = T.embed[beta], T.embed[gamma]
    if b == 0:
        r = big.sqrt(g)
        return r, r
    # X = b Z turns the equation into Z^2 + Z = g / b^2
    z = _artin_schreier_table(big).get(big.div(g, big.mul(b, b)))
    if z is None:  # pragma: no cover - quadratics over GF(q^2) split in GF(q^4)
        raise AssertionError("quadratic did not split in GF(q^4)")
    return big.mul(b, z), big.mul(b, big.add(z, 1))


def check_normal_form_hypothesis(F: FieldSpec, beta: int, gamma: int) -> None:
    """Raise :class:`HypothesisError` unless the roots satisfy ``u_i not in {u_i^q, u_j, u_j^q}``."""
    big = quartic_extension(F).big
    u1, u2 = quadratic_roots_quartic(F, beta, gamma)
    if u1 == u2:
        raise HypothesisError("u1 == u2", "repeated root")
    f1, f2 = big.pow(u1, F.q), big.pow(u2, F.q)
    if u1 == f1 or u2 == f2:
        raise HypothesisError("u_i == u_i^q", "a root lies in GF(q)")
    if u1 == f2 or u2 == f1:
        raise HypothesisError("u_i == u_j^q", "roots are conjugate over GF(q)")


def _solve_subfield_basis(F: FieldSpec, beta: int, gamma: int) -> tuple[int, int]:
    """``t1, t2`` in GF(q) with ``1 = t1 beta + t2 gamma``."""
    for t1 in F.subfield:
        t2 = F.div(F.sub(1, F.mul(t1, beta)), gamma)
        if F.in_subfield(t2):
            return t1, t2
    raise ValueError("beta, gamma do not span GF(q^2) over GF(q)")


def normalize_quadratic(F: FieldSpec, beta: int, gamma: int) -> tuple[MoebiusMap, int]:
    """A GF(q)-rational Moebius map taking ``X^2 + beta X + gamma`` to ``X^2 + X + w``, w outside GF(q)."""
    if F.p != 2:
        raise FieldError("defined for even q")
    check_normal_form_hypothesis(F, beta, gamma)
    if F.in_subfield(beta):
        M = MoebiusMap(F, beta, 0, 0, 1)
        w = F.div(gamma, F.mul(beta, beta))
    elif F.in_subfield(F.div(gamma, beta)):
        t = F.div(gamma, beta)
        M = MoebiusMap(F, 0, t, 1, 0)
        w = F.div(t, beta)
    else:
        t1, t2 = _solve_subfield_basis(F, beta, gamma)
        c = F.sqrt(t2)
        s = F.add(t1, c)
        if s == 0:  # c would be a GF(q) root of f
            raise HypothesisError("u_i == u_i^q", "a root lies in GF(q)")
        beta0 = F.inv(s)
        first = MoebiusMap(F, 1, 1, c, F.add(1, c))
        M = first.compose(MoebiusMap(F, beta0, 0, 0, 1))
        w = F.div(F.mul(F.add(F.mul(beta, F.add(1, s)), gamma), s), beta)
    if F.in_subfield(w):
        raise TheoremViolation("normal form constant landed in GF(q)")
    return M, w
