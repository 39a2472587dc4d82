import pytest
from hypothesis import given, strategies as st

from cardsec.core import ParameterError
from cardsec.gf import (NonPrimePower, field, is_irreducible, prime_power,
                        smallest_irreducible, subfield_elements)

SMALL = [q for q in range(2, 17) if prime_power(q)]


def test_prime_field_spec():
    f = field(7)
    assert (f.p, f.k, f.modulus) == (7, 1, (0, 1))


def test_gf4_modulus_and_square():
    f = field(4)
    assert (f.p, f.k) == (2, 2)
    assert f.modulus == (1, 1, 1)  # x^2 + x + 1
    x = f.element((0, 1))
    assert x * x == x + 1


def test_rejects_bad_orders():
    with pytest.raises(NonPrimePower):
        field(6)
    with pytest.raises(ParameterError):
        field(1)
    with pytest.raises(ParameterError):
        field(2**17)


def test_gf7_inverse():
    f = field(7)
    assert f.inv(3) == 5
    with pytest.raises(ZeroDivisionError):
        f.inv(0)


def test_modulus_is_smallest_irreducible():
    for q in [4, 8, 9, 16, 25, 27, 32, 49, 64, 81, 125]:
        p, k = prime_power(q)
        mod = field(q).modulus
        assert is_irreducible(mod, p)
        # no lexicographically smaller monic degree-k polynomial is irreducible
        from itertools import product
        for low in product(range(p), repeat=k):
            if tuple(low) == mod[:-1]:
                break
            assert not is_irreducible(list(low) + [1], p)


def test_field_is_deterministic():
    field.cache_clear()
    a = field(9)
    field.cache_clear()
    assert field(9) == a
    assert smallest_irreducible(3, 2) == a.modulus


@pytest.mark.parametrize("q", SMALL)
def test_field_axioms_exhaustive(q):
    f = field(q)
    els = range(q)
    for x in els:
        assert f.add(x, 0) == x and f.mul(x, 1) == x
        assert f.add(x, f.neg(x)) == 0
        if x:
            assert f.mul(x, f.inv(x)) == 1
        for y in els:
            assert f.add(x, y) == f.add(y, x)
            assert f.mul(x, y) == f.mul(y, x)
            for z in els:
                assert f.add(f.add(x, y), z) == f.add(x, f.add(y, z))
                assert f.mul(f.mul(x, y), z) == f.mul(x, f.mul(y, z))
                assert f.mul(x, f.add(y, z)) == f.add(f.mul(x, y), f.mul(x, z))


def test_multiplication_matches_polynomial_reduction():
    for q in [4, 8, 9, 16, 27]:
        f = field(q)
        for x in range(q):
            for y in range(q):
                assert f.mul(x, y) == f._slow_mul(x, y)


def test_lagrange_up_to_64():
    for q in range(2, 65):
        if prime_power(q) is None:
            continue
        f = field(q)
        assert all(f.pow(g, q - 1) == 1 for g in range(1, q))


def test_subfield_examples():
    assert {e.value for e in subfield_elements(field(9), 3)} == {0, 1, 2}
    assert {e.value for e in subfield_elements(field(4), 2)} == {0, 1}
    for q in [2, 3, 4, 5]:
        assert len(subfield_elements(field(q * q), q)) == q
    with pytest.raises(ParameterError):
        subfield_elements(field(8), 2)


@given(st.sampled_from([2, 3, 4]), st.data())
def test_subfield_closed(q, data):
    f = field(q * q)
    sub = sorted(e.value for e in subfield_elements(f, q))
    x = data.draw(st.sampled_from(sub))
    y = data.draw(st.sampled_from(sub))
    assert f.add(x, y) in sub and f.mul(x, y) in sub


@given(st.sampled_from(SMALL), st.data())
def test_element_operators(q, data):
    f = field(q)
    x = f.element(data.draw(st.integers(0, q - 1)))
    y = f.element(data.draw(st.integers(1, q - 1)))
    assert (x / y) * y == x
    assert x - x == f.zero
    assert x ** 0 == f.one
    assert len(x.coeffs) == f.k
