from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import nonzero_scalars, polys, scalars, words
from qsg.dsl import parse_expression
from qsg.ncpoly import (
    ONE,
    ZERO,
    Alphabet,
    NCPoly,
    Scalar,
    TensorPoly,
    ZeroPolynomial,
    deglex_compare,
)

AB = Alphabet.of(["alpha", "beta", "gamma"])
MIXED = Alphabet.of(["x", ("p", True), "y"])


def g(name, star=False, alph=AB):
    return NCPoly.gen(alph, name, star)


def sym(c: Scalar):
    return sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(c.im.numerator, c.im.denominator)


# -- scalars ---------------------------------------------------------------


def test_scalar_lowest_terms():
    s = Scalar(Fraction(4, 6), Fraction(-3, -9))
    assert (s.re, s.im) == (Fraction(2, 3), Fraction(1, 3))
    assert s.re.denominator > 0


@given(scalars, scalars)
def test_scalar_arith_matches_sympy(a, b):
    assert sym(a + b) == sympy.expand(sym(a) + sym(b))
    assert sym(a * b) == sympy.expand(sym(a) * sym(b))
    assert sym(a - b) == sympy.expand(sym(a) - sym(b))


@given(scalars, nonzero_scalars)
def test_scalar_division(a, b):
    assert (a / b) * b == a


@given(scalars)
def test_conjugation_involution(a):
    assert a.conjugate().conjugate() == a
    assert (a * a.conjugate()).is_real()


@pytest.mark.parametrize(
    "s, text",
    [(Scalar(1, 0), "1"), (Scalar(Fraction(1, 2), Fraction(1, 3)), "1/2+1/3 i"), (Scalar(0, -1), "-1 i")],
)
def test_scalar_text(s, text):
    assert s.text() == text


# -- words and order --------------------------------------------------------


@pytest.mark.parametrize(
    "u, v, expected",
    [
        ((), (0,), -1),  # degree 0 < 1
        ((0, 2), (0, 0), 1),  # lexicographic tie-break, alpha < beta
        ((1, 0), (2, 3), -1),  # alpha*.alpha < beta.beta* with alpha < alpha* < beta < beta*
        ((0, 1), (0, 1), 0),
    ],
)
def test_deglex_compare(u, v, expected):
    assert deglex_compare(u, v) == expected


@given(words(AB), words(AB), words(AB))
def test_deglex_compatible_with_multiplication(u, v, w):
    c = deglex_compare(u, v)
    assert deglex_compare(w + u, w + v) == c
    assert deglex_compare(u + w, v + w) == c


@given(words(AB), words(AB))
def test_deglex_total_and_antisymmetric(u, v):
    assert deglex_compare(u, v) == -deglex_compare(v, u)
    assert (deglex_compare(u, v) == 0) == (u == v)


@given(words(AB))
def test_star_word_involution(w):
    assert AB.star_word(AB.star_word(w)) == w


def test_self_adjoint_letters_are_star_free():
    assert g("p", True, MIXED) == g("p", False, MIXED)
    assert MIXED.letters() == [0, 1, 2, 4, 5]


# -- polynomial arithmetic -------------------------------------------------


def test_unit_is_neutral():
    p = g("alpha") * g("beta") + g("gamma", True)
    assert NCPoly.one(AB) * p == p == p * NCPoly.one(AB)


def test_distributive_expansion_of_XY():
    X = g("alpha") + g("alpha", True)
    Y = g("beta") + g("gamma")
    a, b, c = g("alpha"), g("beta"), g("gamma")
    ast = g("alpha", True)
    assert X * Y == a * b + a * c + ast * b + ast * c


def test_star_reverses_and_stars():
    assert (g("alpha") * g("beta")).star() == g("beta", True) * g("alpha", True)


def test_star_is_conjugate_linear():
    p = g("alpha").scale(Scalar(1, 2))
    assert p.star() == g("alpha", True).scale(Scalar(1, -2))


@pytest.mark.parametrize(
    "text, lead",
    [
        ("alpha + alpha* - 1", ((1,), ONE)),
        ("1", ((), ONE)),
        ("3 beta.gamma - alpha.alpha", ((2, 4), Scalar(3))),
    ],
)
def test_leading_term(text, lead):
    assert parse_expression(text, AB).leading_term() == lead


def test_leading_term_of_quadratic_relation():
    p = parse_expression("alpha^2 + beta.gamma", AB)
    # default order alpha < beta: beta.gamma leads
    assert p.leading_term()[0] == (2, 4)
    # reversing the generator order makes alpha.alpha the leader
    rev = {0: 5, 1: 4, 2: 3, 3: 2, 4: 1, 5: 0}
    assert p.leading_term(rev)[0] == (0, 0)


def test_leading_term_zero_raises():
    with pytest.raises(ZeroPolynomial):
        NCPoly.zero(AB).leading_term()


def _naive_mul(p, q):
    out = {}
    for u, a in p.terms.items():
        for v, b in q.terms.items():
            out[u + v] = out.get(u + v, ZERO) + a * b
    return {w: c for w, c in out.items() if c}


@settings(max_examples=60)
@given(polys(MIXED), polys(MIXED))
def test_product_matches_naive_convolution(p, q):
    assert (p * q).terms == _naive_mul(p, q)


@settings(max_examples=60)
@given(polys(AB), polys(AB), polys(AB))
def test_ring_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p + q) * r == p * r + q * r


@settings(max_examples=60)
@given(polys(MIXED), polys(MIXED))
def test_star_axioms(p, q):
    assert (p * q).star() == q.star() * p.star()
    assert (p + q).star() == p.star() + q.star()
    assert p.star().star() == p


@given(polys(AB))
def test_no_zero_coefficients_stored(p):
    assert all(c for c in (p - p).terms.values())
    assert not (p - p)


@settings(max_examples=80)
@given(polys(MIXED))
def test_text_round_trip(p):
    assert parse_expression(p.text(), MIXED) == p


def test_canonical_text_example():
    p = g("alpha") * g("beta") - NCPoly.constant(AB, Fraction(1, 2))
    assert p.text() == "alpha.beta - (1/2)1"


def test_commutator():
    a, b = g("alpha"), g("beta")
    assert a.commutator(b) == a * b - b * a


@given(st.integers(min_value=0, max_value=5))
def test_power(k):
    a = g("alpha")
    expected = NCPoly.one(AB)
    for _ in range(k):
        expected = expected * a
    assert a**k == expected


# -- tensors ---------------------------------------------------------------


def test_tensor_legs_commute():
    legs = (AB, AB)
    x1 = TensorPoly.embed(g("alpha"), 0, legs)
    y2 = TensorPoly.embed(g("beta"), 1, legs)
    assert x1 * y2 == y2 * x1 == TensorPoly.pure(g("alpha"), g("beta"))


def test_tensor_star_is_legwise():
    t = TensorPoly.pure(g("alpha") * g("beta"), g("gamma"))
    assert t.star() == TensorPoly.pure((g("alpha") * g("beta")).star(), g("gamma", True))


def test_tensor_single_factor_embeds_identically():
    p = g("alpha") * g("beta") + NCPoly.one(AB)
    t = TensorPoly.embed(p, 0, (AB,))
    assert set(ws[0] for ws in t.terms) == set(p.terms)
