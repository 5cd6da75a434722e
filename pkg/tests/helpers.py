"""Shared hypothesis strategies and small oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from qsg.ncpoly import NCPoly, Scalar

small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
scalars = st.builds(Scalar, small_fracs, small_fracs)
nonzero_scalars = scalars.filter(bool)


def words(alphabet, max_len=4):
    return st.lists(st.sampled_from(alphabet.letters()), max_size=max_len).map(tuple)


def polys(alphabet, max_len=4, max_terms=6):
    return st.dictionaries(words(alphabet, max_len), scalars, max_size=max_terms).map(
        lambda d: NCPoly(alphabet, {w: c for w, c in d.items()})
    )


def random_poly(alphabet, rng: random.Random, max_len=4, max_terms=5) -> NCPoly:
    """Seeded random polynomial with small rational coefficients."""
    letters = alphabet.letters()
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        w = tuple(rng.choice(letters) for _ in range(rng.randint(0, max_len)))
        terms[w] = Scalar(Fraction(rng.randint(-4, 4), rng.randint(1, 3)), Fraction(rng.randint(-1, 1), 2))
    return NCPoly(alphabet, terms)
