from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import SEMIFIELDS, elements
from semiflag.semifield import (
    CIRC, ONE, RATIONAL, TROPICAL, DomainMismatch, Val, ext_add, ext_mul, format_ext, get_semifield,
    hom_apply, identity_hom, nat_scale, parse_ext, to_one_hom, tropical_scaling_hom,
)


def test_circ_is_neutral_for_addition():
    a = Val(RATIONAL, Fraction(3, 4))
    assert ext_add(CIRC, a) == a
    assert ext_add(a, CIRC) == a
    assert ext_add(CIRC, CIRC) is CIRC


def test_additions_in_each_instance():
    assert ext_add(Val(TROPICAL, 2), Val(TROPICAL, 3)) == Val(TROPICAL, 2)
    assert ext_add(Val(RATIONAL, Fraction(1, 2)), Val(RATIONAL, Fraction(1, 3))) == Val(RATIONAL, Fraction(5, 6))


def test_products_and_absorption():
    assert ext_mul(CIRC, Val(TROPICAL, 4)) is CIRC
    assert ext_mul(Val(TROPICAL, 2), Val(TROPICAL, 3)) == Val(TROPICAL, 5)
    assert ext_mul(Val(ONE, 1), Val(ONE, 1)) == Val(ONE, 1)


def test_natural_scaling_examples():
    assert nat_scale(0, Val(RATIONAL, Fraction(2))) is CIRC
    assert nat_scale(3, Val(TROPICAL, 7)) == Val(TROPICAL, 7)
    assert nat_scale(2, Val(RATIONAL, Fraction(1, 3))) == Val(RATIONAL, Fraction(2, 3))


def test_mixing_semifields_is_rejected():
    with pytest.raises(DomainMismatch):
        ext_add(Val(TROPICAL, 1), Val(RATIONAL, Fraction(1)))


def test_val_rejects_non_members():
    with pytest.raises(ValueError):
        Val(RATIONAL, Fraction(-1, 2))
    with pytest.raises(ValueError):
        Val(ONE, 2)


@pytest.mark.parametrize("sf,text", [(RATIONAL, "3/7"), (TROPICAL, "-12"), (ONE, "1"), (TROPICAL, "o")])
def test_parse_format_round_trip(sf, text):
    assert format_ext(parse_ext(sf, text)) == text


def test_semifield_lookup_aliases():
    assert get_semifield("rational") is RATIONAL
    assert get_semifield("tropical") is TROPICAL
    assert get_semifield("one") is ONE


def test_homomorphism_examples():
    assert hom_apply(to_one_hom(TROPICAL), Val(TROPICAL, 5)) == Val(ONE, 1)
    assert hom_apply(identity_hom(RATIONAL), Val(RATIONAL, Fraction(2, 9))) == Val(RATIONAL, Fraction(2, 9))
    for h in (to_one_hom(RATIONAL), identity_hom(TROPICAL), tropical_scaling_hom(3)):
        assert hom_apply(h, CIRC) is CIRC


def _ext(sf):
    return st.one_of(st.just(CIRC), elements(sf).map(lambda x: Val(sf, x)))


@pytest.mark.parametrize("sf", SEMIFIELDS, ids=lambda s: s.name)
def test_ext_axioms(sf):
    @given(_ext(sf), _ext(sf), _ext(sf))
    def check(a, b, c):
        assert ext_add(a, b) == ext_add(b, a)
        assert ext_mul(a, b) == ext_mul(b, a)
        assert ext_add(ext_add(a, b), c) == ext_add(a, ext_add(b, c))
        assert ext_mul(ext_mul(a, b), c) == ext_mul(a, ext_mul(b, c))
        assert ext_mul(a, ext_add(b, c)) == ext_add(ext_mul(a, b), ext_mul(a, c))

    check()


@pytest.mark.parametrize("sf", SEMIFIELDS, ids=lambda s: s.name)
def test_inverse_and_scaling_additivity(sf):
    @given(elements(sf), st.integers(0, 6), st.integers(0, 6))
    def check(x, c, c2):
        assert sf.mul(sf.inv(x), x) == sf.one
        k = Val(sf, x)
        assert nat_scale(c + c2, k) == ext_add(nat_scale(c, k), nat_scale(c2, k))

    check()


@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(1, 5))
def test_scaling_hom_preserves_operations(x, y, n):
    h = tropical_scaling_hom(n)
    assert h(TROPICAL.add(x, y)) == TROPICAL.add(h(x), h(y))
    assert h(TROPICAL.mul(x, y)) == TROPICAL.mul(h(x), h(y))
    assert h(TROPICAL.one) == TROPICAL.one
