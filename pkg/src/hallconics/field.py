"""Arithmetic in GF(q^2) = GF(p^(2k)) with the subfield GF(q) singled out.

Elements are stored as integers ``0 <= i < q^2`` whose base-``p`` digits are
the coordinates of the element in the polynomial basis ``1, t, t^2, ...``
(little endian).  Integer order is the canonical element order used for every
"least element" choice elsewhere in the package; it is lexicographic on the
coordinate vector read from the top coordinate down.

Hot loops work on the integer encoding directly through :class:`FieldSpec`
methods and numpy tables.  :class:`FieldElement` is a thin operator-friendly
wrapper for interactive use and tests.
"""

from __future__ import annotations

import json
import math
from functools import cached_property, lru_cache
from itertools import product
from pathlib import Path

import numpy as np

# Least monic primitive polynomial of each even degree n with p^n <= 4096,
# coefficients c_0 .. c_n.  "Least" is by the integer encoding of c_0 .. c_{n-1}.
DEFAULT_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (2, 10): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1),
    (2, 12): (1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1),
    (3, 2): (2, 1, 1),
    (3, 4): (2, 1, 0, 0, 1),
    (3, 6): (2, 1, 0, 0, 0, 0, 1),
    (5, 2): (2, 1, 1),
    (5, 4): (2, 2, 1, 0, 1),
    (7, 2): (3, 1, 1),
    (7, 4): (5, 3, 1, 0, 1),
    (11, 2): (7, 1, 1),
    (13, 2): (2, 1, 1),
    (17, 2): (3, 1, 1),
    (19, 2): (2, 1, 1),
    (23, 2): (7, 1, 1),
    (29, 2): (3, 1, 1),
    (31, 2): (12, 1, 1),
    (37, 2): (5, 1, 1),
    (41, 2): (12, 1, 1),
    (43, 2): (3, 1, 1),
    (47, 2): (13, 1, 1),
    (53, 2): (5, 1, 1),
    (59, 2): (2, 1, 1),
    (61, 2): (2, 1, 1),
}

# Above this order the odd-characteristic addition table is not materialised
# as Python lists.
_LIST_TABLE_LIMIT = 1024


class FieldError(ValueError):
    """Invalid field parameters or an operation outside its domain."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, k)`` with ``q == p**k``; raise if ``q`` is not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            if r != 1:
                raise FieldError(f"{q} is not a prime power")
            return p, k
    raise FieldError(f"{q} is not a prime power")  # pragma: no cover


# --- polynomials over Z_p as coefficient lists, lowest degree first ---------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_rem(a: list[int], f: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    inv_lead = pow(f[-1], -1, p)
    while len(a) >= len(f):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(f)
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def is_irreducible(f: list[int] | tuple[int, ...], p: int) -> bool:
    """Trial division of ``f`` by every monic polynomial of degree <= deg(f)/2."""
    f = _trim(list(f))
    n = len(f) - 1
    if n < 1:
        return False
    for d in range(1, n // 2 + 1):
        for low in product(range(p), repeat=d):
            if not _poly_rem(f, list(low) + [1], p):
                return False
    return True


class FieldSpec:
    """The field GF(q^2), q = p^k, given by a degree-2k modulus over Z_p.

    Parameters
    ----------
    p, k:
        Characteristic and subfield degree; ``q = p**k``.
    modulus:
        Coefficients ``c_0 .. c_{2k}`` of a monic irreducible polynomial.
        Defaults to the entry of :data:`DEFAULT_MODULI`.
    """

    def __init__(self, p: int, k: int, modulus=None):
        if not is_prime(p):
            raise FieldError(f"p={p} is not prime")
        if k < 1:
            raise FieldError(f"k={k} must be positive")
        n = 2 * k
        if modulus is None:
            try:
                modulus = DEFAULT_MODULI[(p, n)]
            except KeyError:
                raise FieldError(
                    f"no default modulus for GF({p}^{n}); pass one explicitly"
                ) from None
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != n + 1 or modulus[-1] != 1:
            raise FieldError(f"modulus must be monic of degree {n}: {modulus}")
        if not is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is reducible over Z_{p}")
        self.p = p
        self.k = k
        self.n = n
        self.q = p**k
        self.order = self.q * self.q
        self.modulus = modulus
        self._build_log_tables()
        if p != 2 and self.order <= _LIST_TABLE_LIMIT:
            self._add_list = self.add_table.tolist()
        else:
            self._add_list = None
        self._neg = [self._neg_slow(a) for a in range(self.order)]
        q = self.q
        self._conj = [self.pow(a, q) for a in range(self.order)]
        self.subfield = tuple(a for a in range(self.order) if self._conj[a] == a)
        self._subfield_set = frozenset(self.subfield)

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_q(cls, q: int, modulus=None) -> "FieldSpec":
        p, k = prime_power(q)
        return cls(p, k, modulus)

    @classmethod
    def from_dict(cls, data: dict) -> "FieldSpec":
        try:
            return cls(int(data["p"]), int(data["k"]), data.get("modulus"))
        except KeyError as exc:
            raise FieldError(f"field spec missing key {exc}") from None

    @classmethod
    def load(cls, path) -> "FieldSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    def __repr__(self):
        return f"FieldSpec(p={self.p}, k={self.k}, modulus={list(self.modulus)})"

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (
            (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __reduce__(self):
        return (get_field, (self.p, self.k, self.modulus))

    def _poly_mul(self, a: int, b: int) -> int:
        """Multiply by polynomial reduction; used to seed the log tables."""
        p, n = self.p, self.n
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        return self.from_digits(_poly_rem(prod, list(self.modulus), p))

    def _build_log_tables(self):
        Q = self.order
        for g in range(2, Q):
            exp = [1]
            x = g
            while x != 1:
                exp.append(x)
                x = self._poly_mul(x, g)
            if len(exp) == Q - 1:
                break
        else:  # pragma: no cover - GF(p^n)* is cyclic
            raise FieldError("no primitive element found")
        self.generator = g
        self._exp = exp + exp
        log = [-1] * Q
        for i, x in enumerate(exp):
            log[x] = i
        self._log = log

    # -- encoding --------------------------------------------------------

    def digits(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.n):
            a, r = divmod(a, p)
            out.append(r)
        return out

    def from_digits(self, coords) -> int:
        p = self.p
        coords = list(coords)
        if len(coords) > self.n:
            raise FieldError(f"too many coordinates: {coords}")
        value = 0
        for c in reversed(coords):
            value = value * p + int(c) % p
        return value

    def element(self, value) -> "FieldElement":
        """Wrap an int index or a coordinate list as a :class:`FieldElement`."""
        if isinstance(value, FieldElement):
            self._check(value)
            return value
        if isinstance(value, (list, tuple)):
            return FieldElement(self, self.from_digits(value))
        value = int(value)
        if not 0 <= value < self.order:
            raise FieldError(f"element index {value} out of range")
        return FieldElement(self, value)

    def _check(self, x: "FieldElement"):
        if x.field != self:
            raise FieldError("elements belong to different fields")

    def elements(self) -> range:
        return range(self.order)

    def nonzero(self) -> range:
        return range(1, self.order)

    # -- arithmetic on int encodings ------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self._add_list is not None:
            return self._add_list[a][b]
        p = self.p
        out, scale = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * scale
            a //= p
            b //= p
            scale *= p
        return out

    def _neg_slow(self, a: int) -> int:
        return self.from_digits([(-c) % self.p for c in self.digits(a)])

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        """Square-and-multiply exponentiation."""
        if e < 0:
            a, e = self.inv(a), -e
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def sum(self, values) -> int:
        total = 0
        for v in values:
            total = self.add(total, v)
        return total

    def scalar(self, n: int) -> int:
        """The image of the integer ``n`` in the prime field."""
        return n % self.p

    def log(self, a: int) -> int:
        if a == 0:
            raise FieldError("log of zero")
        return self._log[a]

    def exp(self, e: int) -> int:
        return self._exp[e % (self.order - 1)]

    # -- Frobenius, subfield, characters --------------------------------------

    def conj(self, a: int) -> int:
        """``a**q``, the involutory automorphism fixing GF(q)."""
        return self._conj[a]

    def in_subfield(self, a: int) -> bool:
        return a in self._subfield_set

    def norm(self, a: int) -> int:
        return self.mul(a, self._conj[a])

    def trace(self, a: int) -> int:
        """Relative trace GF(q^2) -> GF(q)."""
        return self.add(a, self._conj[a])

    def is_square(self, a: int, in_subfield: bool = False) -> bool:
        """Quadratic character test in GF(q^2), or in GF(q) if ``in_subfield``.

        Zero counts as a square; in characteristic 2 everything is a square.
        """
        if in_subfield and not self.in_subfield(a):
            raise FieldError("element is not in the subfield GF(q)")
        if a == 0 or self.p == 2:
            return True
        size = self.q if in_subfield else self.order
        return self.pow(a, (size - 1) // 2) == 1

    def abs_trace(self, a: int, in_subfield: bool = False) -> int:
        """Absolute trace to Z_p, from GF(q^2) or (``in_subfield``) from GF(q)."""
        if in_subfield and not self.in_subfield(a):
            raise FieldError("element is not in the subfield GF(q)")
        terms = self.k if in_subfield else self.n
        total, x = 0, a
        for _ in range(terms):
            total = self.add(total, x)
            x = self.pow(x, self.p)
        if total >= self.p:  # pragma: no cover - trace lies in the prime field
            raise FieldError("trace left the prime field")
        return total

    def is_cube(self, a: int) -> bool:
        if a == 0:
            raise FieldError("is_cube is undefined for zero")
        Q1 = self.order - 1
        return self.pow(a, Q1 // math.gcd(3, Q1)) == 1

    def sqrt(self, a: int) -> int | None:
        """A square root of ``a`` (the least one), or ``None``."""
        return self._sqrt_table.get(a)

    @cached_property
    def _sqrt_table(self) -> dict[int, int]:
        table: dict[int, int] = {}
        for x in range(self.order):
            table.setdefault(self.mul(x, x), x)
        return table

    # -- numpy tables for vectorised kernels ----------------------------------

    @cached_property
    def mul_table(self) -> np.ndarray:
        Q = self.order
        log = np.array(self._log, dtype=np.int64)
        exp = np.array(self._exp, dtype=np.int64)
        idx = log[:, None] + log[None, :]
        table = exp[np.where(idx >= 0, idx, 0)]
        table[0, :] = 0
        table[:, 0] = 0
        dtype = np.int16 if Q <= 2**15 else np.int32
        return table.astype(dtype)

    @cached_property
    def add_table(self) -> np.ndarray:
        Q, p = self.order, self.p
        a = np.arange(Q)
        out = np.zeros((Q, Q), dtype=np.int64)
        scale = 1
        for _ in range(self.n):
            da = (a // scale) % p
            out += ((da[:, None] + da[None, :]) % p) * scale
            scale *= p
        dtype = np.int16 if Q <= 2**15 else np.int32
        return out.astype(dtype)

    def vadd(self, a, b):
        """Elementwise sum of integer arrays (broadcasting)."""
        if self.p == 2:
            return np.bitwise_xor(a, b)
        return self.add_table[a, b]

    def vmul(self, a, b):
        return self.mul_table[a, b]

    @cached_property
    def neg_array(self) -> np.ndarray:
        return np.array(self._neg, dtype=np.int64)

    @cached_property
    def conj_array(self) -> np.ndarray:
        return np.array(self._conj, dtype=np.int64)

    @cached_property
    def subfield_mask(self) -> np.ndarray:
        mask = np.zeros(self.order, dtype=bool)
        mask[list(self.subfield)] = True
        return mask

    @cached_property
    def square_mask(self) -> np.ndarray:
        return np.array([self.is_square(a) for a in range(self.order)], dtype=bool)


@lru_cache(maxsize=None)
def get_field(p: int, k: int, modulus: tuple[int, ...] | None = None) -> FieldSpec:
    """Cached :class:`FieldSpec` constructor."""
    return FieldSpec(p, k, modulus)


def field_for_q(q: int) -> FieldSpec:
    """The default GF(q^2) for a prime power ``q``."""
    p, k = prime_power(q)
    return get_field(p, k)


class FieldElement:
    """An element of a :class:`FieldSpec` supporting Python operators."""

    __slots__ = ("field", "value")

    def __init__(self, field: FieldSpec, value: int):
        self.field = field
        self.value = value

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            self.field._check(other)
            return other.value
        if isinstance(other, int):
            return self.field.scalar(other)
        return NotImplemented

    def _wrap(self, v: int) -> "FieldElement":
        return FieldElement(self.field, v)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.field.sub(o, self.value))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.field.div(self.value, o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.field.div(o, self.value))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.value, e))

    def inverse(self) -> "FieldElement":
        return self._wrap(self.field.inv(self.value))

    def conj(self) -> "FieldElement":
        return self._wrap(self.field.conj(self.value))

    def in_subfield(self) -> bool:
        return self.field.in_subfield(self.value)

    def is_square(self, in_subfield: bool = False) -> bool:
        return self.field.is_square(self.value, in_subfield)

    def is_cube(self) -> bool:
        return self.field.is_cube(self.value)

    def abs_trace(self, in_subfield: bool = False) -> int:
        return self.field.abs_trace(self.value, in_subfield)

    @property
    def coords(self) -> list[int]:
        return self.field.digits(self.value)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.scalar(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.value))

    def __lt__(self, other: "FieldElement"):
        return self.value < other.value

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FieldElement({self.coords})"


# element literals: an int (prime-field element) or a coordinate list

def parse_element(F: FieldSpec, literal) -> int:
    """Parse a JSON-style element literal into the int encoding.

    ``[c0, c1, ...]`` is a coordinate list; a bare integer is a prime-field
    element.
    """
    if isinstance(literal, str):
        try:
            literal = json.loads(literal)
        except json.JSONDecodeError:
            raise FieldError(f"bad element literal {literal!r}") from None
    if isinstance(literal, (list, tuple)):
        return F.from_digits(literal)
    if isinstance(literal, int):
        return F.scalar(literal)
    raise FieldError(f"bad element literal {literal!r}")


def format_element(F: FieldSpec, a: int) -> list[int]:
    """Little-endian coordinate list, the serialised form of an element."""
    return F.digits(a)
