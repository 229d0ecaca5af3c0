import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import elements
from semiflag.based import E_K, SemiVector, TensorBasis
from semiflag.datagen import get_store
from semiflag.monoid import (
    NEG, POS, RELATIONS, TORUS, Gen, MonoidWord, gen_apply, parse_word, random_vector, random_word,
    relation_check, tensor_gen_apply, tensor_word_apply, word_apply,
)
from semiflag.semifield import ONE, RATIONAL, TROPICAL


def test_parse_word_tokens():
    w = parse_word("+1:2/3 -2:5 t1:1/2 t,2:3", RATIONAL)
    assert [g.kind for g in w] == [POS, NEG, TORUS, TORUS]
    assert w[0].k == Fraction(2, 3) and w[3].i == 2
    assert parse_word(w.format(RATIONAL), RATIONAL) == w
    with pytest.raises(ValueError):
        parse_word("*1:2", RATIONAL)
    with pytest.raises(ValueError):
        parse_word("+4:1", RATIONAL, (1, 2))


def test_torus_one_is_identity(a2):
    m = a2.module((1, 1))
    v = random_vector(m, RATIONAL, random.Random(0))
    assert gen_apply(Gen(TORUS, 1, Fraction(1)), m, v) == v


def test_pos_on_lowest_vector_of_v2():
    m = get_store("A1").module((2,))
    k = Fraction(3, 5)
    out = gen_apply(Gen(POS, 1, k), m, SemiVector(m, RATIONAL, {"b2": Fraction(1)}))
    assert out.coeffs == {"b2": 1, "b1": k, "b0": k * k}


def test_pos_fixes_highest_vector(a2):
    m = a2.module((2, 1))
    hw = SemiVector(m, TROPICAL, {m.highest: 0})
    for i in (1, 2):
        assert gen_apply(Gen(POS, i, 7), m, hw) == hw


def test_tropical_neg_zero_on_fundamental():
    m = get_store("A1").module((1,))
    out = gen_apply(Gen(NEG, 1, 0), m, SemiVector(m, TROPICAL, {"b0": 0}))
    assert out.coeffs == {"b0": 0, "b1": 0}


def test_empty_word_and_order(a1):
    m = a1.module((1,))
    v = SemiVector(m, RATIONAL, {"b0": Fraction(1)})
    assert word_apply(MonoidWord(), m, v) == v
    # rightmost generator acts first: -1 then +1 differs from +1 then -1
    w = parse_word("+1:1 -1:1", RATIONAL)
    assert word_apply(w, m, v) == gen_apply(w[0], m, gen_apply(w[1], m, v))


def _r1_q_side(m, k, k2, v):
    """sum over n of (k+k')^n e^(n) v, written with the binomial expansion."""
    out = dict(v.coeffs)
    for n, M in m.E[1].items():
        coeff = sum(comb(n, a) * k ** a * k2 ** (n - a) for a in range(n + 1))
        assert coeff == (k + k2) ** n
        for col, rows in M.cols.items():
            if col in v.coeffs:
                for r, c in rows:
                    out[r] = out.get(r, 0) + coeff * c * v.coeffs[col]
    return out


def test_r1_matches_binomial_identity_on_v2():
    m = get_store("A1").module((2,))
    rng = random.Random(11)
    for _ in range(100):
        v = random_vector(m, RATIONAL, rng, density=0.8)
        k, k2 = RATIONAL.random_element(rng), RATIONAL.random_element(rng)
        lhs = word_apply(MonoidWord([Gen(POS, 1, k), Gen(POS, 1, k2)]), m, v)
        assert lhs.coeffs == _r1_q_side(m, k, k2, v)


@pytest.mark.parametrize("rel", RELATIONS)
def test_relations_small_suite(rel, a1, a2):
    mods = [a1.module((2,)), a2.module((1, 1)), get_store("A1xA1").module((1, 1))]
    rep = relation_check(rel, 40, 5, mods, [RATIONAL, TROPICAL, ONE])
    assert rep.ok, rep.failures[:2]


def test_r5_on_a1xa1_applies():
    mods = [get_store("A1xA1").module((2, 1))]
    rep = relation_check("R5", 30, 1, mods, [RATIONAL])
    assert rep.ok and rep.passed == 30


def test_relations_detect_a_broken_module(a1):
    # swap e and f: R4 (torus conjugation) must now fail
    m = a1.module((2,))
    broken = type(m)(m.cartan, m.lam, m.labels, m.highest, m.F, m.E, m.weights)
    rep = relation_check("R4", 30, 2, [broken], [RATIONAL])
    assert not rep.ok


def test_tensor_action_torus_weights_add(a2):
    L, R = a2.module((1, 0)), a2.module((0, 1))
    tb = TensorBasis(L, R)
    x = SemiVector(tb, RATIONAL, {(b, b2): Fraction(1) for b in L.labels for b2 in R.labels})
    k = Fraction(2)
    out = tensor_gen_apply(Gen(TORUS, 1, k), tb, x)
    for (b, b2), val in out.coeffs.items():
        assert val == k ** (L.weights[1][b] + R.weights[1][b2])


def test_tensor_action_fixes_top_under_pos(a2):
    L, R = a2.module((1, 0)), a2.module((1, 1))
    tb = TensorBasis(L, R)
    top = SemiVector(tb, ONE, {(L.highest, R.highest): 1})
    assert tensor_gen_apply(Gen(POS, 2, 1), tb, top) == top


@given(st.randoms(use_true_random=False), st.sampled_from([RATIONAL, TROPICAL, ONE]))
def test_tensor_action_is_compatible_with_E(rnd, sf):
    st_ = get_store("A2")
    L, R = st_.module((1, 0)), st_.module((1, 1))
    tb = TensorBasis(L, R)
    rng = random.Random(rnd.random())
    v, v2 = random_vector(L, sf, rng), random_vector(R, sf, rng)
    w = random_word((1, 2), sf, rng)
    assert tensor_word_apply(w, tb, E_K(v, v2, tb)) == E_K(word_apply(w, L, v), word_apply(w, R, v2), tb)
