import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hallconics.field import (
    DEFAULT_MODULI,
    FieldError,
    FieldSpec,
    field_for_q,
    get_field,
    is_irreducible,
    parse_element,
    prime_power,
)

SMALL = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (3, 2)]  # q^2 <= 81


def _poly_mul_mod(a, b, mod, p):
    """Schoolbook product of coefficient lists reduced by a monic modulus."""
    n = len(mod) - 1
    prod = [0] * (2 * n)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, n - 1, -1):
        c = prod[d]
        if c:
            for i in range(n + 1):
                prod[d - n + i] = (prod[d - n + i] - c * mod[i]) % p
    return prod[:n]


@pytest.mark.parametrize("p,k", SMALL)
def test_field_axioms_exhaustive(p, k):
    F = get_field(p, k)
    els = list(F.elements())
    for a in els:
        assert F.add(a, 0) == a
        assert F.mul(a, 1) == a
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
    for a, b in itertools.product(els, repeat=2):
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
        expected = F.from_digits(_poly_mul_mod(F.digits(a), F.digits(b), F.modulus, p))
        assert F.mul(a, b) == expected


@pytest.mark.parametrize("p,k", [(2, 1), (3, 1), (2, 2)])
def test_associativity_and_distributivity(p, k):
    F = get_field(p, k)
    for a, b, c in itertools.product(F.elements(), repeat=3):
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))


def test_gf9_addition_example():
    F = get_field(3, 1)
    one_t, two_t = F.from_digits([1, 1]), F.from_digits([2, 1])
    assert F.digits(F.add(one_t, two_t)) == [0, 2]


def test_gf4_omega():
    F = get_field(2, 1)
    w = F.from_digits([0, 1])
    assert F.digits(F.mul(w, w)) == [1, 1]
    assert F.conj(w) == F.add(w, 1)
    assert not F.in_subfield(w)
    assert F.trace(w) == 1
    assert F.add(w, w) == 0


@pytest.mark.parametrize("p,k", SMALL + [(2, 3), (5, 2)])
def test_conjugation(p, k):
    F = get_field(p, k)
    for x in F.elements():
        assert F.conj(F.conj(x)) == x
        assert F.in_subfield(x) == (F.conj(x) == x)
        assert F.in_subfield(F.norm(x))
        assert F.in_subfield(F.trace(x))
    assert sorted(F.subfield) == sorted(x for x in F.elements() if F.conj(x) == x)
    assert len(F.subfield) == F.q


@pytest.mark.parametrize("p,k", SMALL + [(2, 3)])
def test_squares_and_cubes(p, k):
    F = get_field(p, k)
    squares = {F.mul(x, x) for x in F.elements()}
    cubes = {F.pow(x, 3) for x in F.elements()}
    for x in F.elements():
        assert F.is_square(x) == (x in squares)
        if x:
            assert F.is_cube(x) == (x in cubes)
        if x in squares:
            r = F.sqrt(x)
            assert F.mul(r, r) == x
    assert F.is_square(0) and F.is_square(1)
    if p != 2:
        assert not F.is_square(F.generator)


def test_cubing_bijective_when_3_does_not_divide():
    F = get_field(3, 1)  # q^2 - 1 = 8
    assert all(F.is_cube(x) for x in F.nonzero())
    G = get_field(2, 1)  # q^2 - 1 = 3
    assert sum(G.is_cube(x) for x in G.nonzero()) == 1
    with pytest.raises(FieldError):
        G.is_cube(0)


def test_subfield_square_character():
    F = get_field(3, 1)
    # in GF(3) only 1 is a nonzero square
    assert [F.is_square(c, in_subfield=True) for c in (1, 2)] == [True, False]
    assert all(F.is_square(c) for c in F.subfield)  # every GF(q) element is a GF(q^2) square


def test_absolute_trace_even():
    F = get_field(2, 2)  # GF(16) over GF(4)
    traces = [F.abs_trace(c, in_subfield=True) for c in F.subfield]
    assert sorted(traces) == [0, 0, 1, 1]
    assert sum(F.abs_trace(x) for x in F.elements()) == F.order // 2


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([(2, 3), (3, 2), (5, 2), (7, 1), (2, 4)]), st.data())
def test_inverse_and_pow_properties(pk, data):
    F = get_field(*pk)
    a = data.draw(st.integers(1, F.order - 1))
    b = data.draw(st.integers(0, F.order - 1))
    e = data.draw(st.integers(0, 3 * F.order))
    assert F.mul(a, F.inv(a)) == 1
    assert F.div(F.mul(a, b), a) == b
    assert F.pow(a, e) == F.pow(a, e % (F.order - 1))
    assert F.conj(F.mul(a, b)) == F.mul(F.conj(a), F.conj(b))


@pytest.mark.parametrize("key", sorted(DEFAULT_MODULI))
def test_default_moduli_irreducible(key):
    p, n = key
    assert is_irreducible(list(DEFAULT_MODULI[key]), p)


def test_prime_power():
    assert prime_power(9) == (3, 2)
    assert prime_power(8) == (2, 3)
    with pytest.raises(FieldError):
        prime_power(6)


def test_custom_modulus_and_serialization(tmp_path):
    F = FieldSpec(3, 1, modulus=(1, 0, 1))  # t^2 + 1 over GF(3)
    assert F.modulus == (1, 0, 1)
    path = tmp_path / "f.json"
    F.dump(path)
    G = FieldSpec.load(path)
    assert G == F and json.loads(path.read_text())["modulus"] == [1, 0, 1]
    with pytest.raises(FieldError):
        FieldSpec(3, 1, modulus=(2, 0, 1))  # t^2 + 2 = (t-1)(t+1)


def test_element_literals():
    F = field_for_q(4)
    assert parse_element(F, [0, 1]) == F.from_digits([0, 1])
    assert parse_element(F, "[1,1]") == F.from_digits([1, 1])
    assert parse_element(F, 1) == 1
    with pytest.raises(FieldError):
        parse_element(F, "x")


def test_field_element_wrapper():
    F = get_field(3, 1)
    t = F.element([0, 1])
    one = F.element(1)
    assert (t + one) - one == t
    assert t * t.inverse() == one
    assert (t ** 8) == one
    assert t.conj().conj() == t
    assert one.in_subfield() and not t.in_subfield()
