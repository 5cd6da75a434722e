from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsg import dsl
from qsg.builtins import m2_commutant_phi
from qsg.ncpoly import Alphabet, NCPoly, Scalar, TensorPoly
from qsg.presentation import Presentation
from qsg.semigroup import QuantumSemigroup, verify_all

SMALL = """
algebra "small"
generators { a; b; c; }
relations { a^2 + b.c = 0; }
"""


def test_parse_relation_block():
    P = dsl.parse(SMALL)
    assert isinstance(P, Presentation)
    a, b, c = P.gen("a"), P.gen("b"), P.gen("c")
    assert P.relations[0] == a * a + b * c


def test_malformed_relation_points_at_semicolon():
    text = 'algebra "x"\ngenerators { a; }\nrelations { a + ; }\n'
    with pytest.raises(dsl.ParseError) as e:
        dsl.parse(text)
    assert (e.value.line, e.value.col) == (3, 17)


def test_unknown_generator_is_located():
    text = 'algebra "x"\ngenerators { a; }\nrelations { a.q = 0; }\n'
    with pytest.raises(dsl.SemanticError) as e:
        dsl.parse(text)
    assert e.value.line == 3 and "q" in e.value.message


def test_unexpected_character():
    with pytest.raises(dsl.ParseError) as e:
        dsl.tokenize("a $ b")
    assert e.value.col == 3


ALPH = Alphabet.of(["x", ("s", True)])


@pytest.mark.parametrize(
    "text, expected",
    [
        ("x x*", lambda x, xs, s: x * xs),
        ("x.x* - 1/2", lambda x, xs, s: x * xs - NCPoly.constant(ALPH, Fraction(1, 2))),
        ("(x + s)^2", lambda x, xs, s: (x + s) * (x + s)),
        ("i x - 2 s*", lambda x, xs, s: x.scale(Scalar(0, 1)) - s.scale(2)),
        ("(x s)*", lambda x, xs, s: s * xs),
        ("2^3 x", lambda x, xs, s: x.scale(8)),
        ("1^1", lambda x, xs, s: NCPoly.one(ALPH)),
    ],
)
def test_expressions(text, expected):
    x, xs, s = NCPoly.gen(ALPH, "x"), NCPoly.gen(ALPH, "x", True), NCPoly.gen(ALPH, "s")
    assert dsl.parse_expression(text, ALPH) == expected(x, xs, s)


@pytest.mark.parametrize("sep", ["(*)", "⊗"])
def test_tensor_aliases(sep):
    t = dsl.parse_expression(f"x {sep} s + 1 {sep} x*", (ALPH, ALPH))
    x, s = NCPoly.gen(ALPH, "x"), NCPoly.gen(ALPH, "s")
    one = NCPoly.one(ALPH)
    assert t == TensorPoly.pure(x, s) + TensorPoly.pure(one, x.star())


def test_semigroup_file():
    S = m2_commutant_phi()
    text = dsl.print_semigroup(S)
    T = dsl.parse(text)
    assert isinstance(T, QuantumSemigroup)
    assert T.defined_by_action
    assert verify_all(T, 8).ok


def test_presentation_round_trip():
    P = dsl.parse(SMALL)
    Q = dsl.parse(dsl.print_presentation(P))
    assert Q.hash == P.hash


TOKENS = ["algebra", '"n"', "generators", "relations", "delta", "counit", "closures", "partition", "action",
          "functions", "m2", "{", "}", ";", "=", "+", "-", ".", "*", "^", "(", ")", "(*)", "[", "]", ",",
          "a", "b", "i", "1", "2", "/", "sa", "defining", "\n"]


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(TOKENS), max_size=30))
def test_fuzz_never_crashes(toks):
    text = " ".join(toks)
    try:
        dsl.parse(text)
    except dsl.DSLError as e:
        assert e.line >= 1 and e.col >= 1


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet='ab*.+-()^12/ i;=', max_size=25))
def test_fuzz_expressions(text):
    try:
        dsl.parse_expression(text, Alphabet.of(["a", "b"]))
    except dsl.DSLError as e:
        assert e.line >= 1
