"""Exact arithmetic in free *-algebras.

Words are tuples of integer letter codes.  A generator with index ``g`` owns
the codes ``2*g`` (plain) and ``2*g + 1`` (starred); self-adjoint generators
only ever use the plain code.  Comparing codes therefore orders letters by
declaration order with each starred letter right after its generator, and
deglex on words is plain ``(len(w), w)`` tuple comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

Word = tuple  # tuple[int, ...]
ONE_WORD: Word = ()


class ZeroPolynomial(ValueError):
    pass


class AlphabetMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

_F0 = Fraction(0)
_F1 = Fraction(1)


def _frac(x) -> Fraction:
    if type(x) is Fraction:
        return x
    return Fraction(x)


class Scalar:
    """Gaussian rational ``re + im*i`` with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @staticmethod
    def coerce(x) -> "Scalar":
        if type(x) is Scalar:
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact scalars")
        return Scalar(x)

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "Scalar":
        s = object.__new__(cls)
        s.re = re
        s.im = im
        return s

    def __add__(self, other):
        if type(other) is not Scalar:
            if isinstance(other, (int, Fraction)):
                return Scalar._raw(self.re + other, self.im)
            return NotImplemented
        return Scalar._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is not Scalar:
            if isinstance(other, (int, Fraction)):
                return Scalar._raw(self.re - other, self.im)
            return NotImplemented
        return Scalar._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Scalar._raw(-self.re, -self.im)

    def __mul__(self, other):
        if type(other) is not Scalar:
            if isinstance(other, (int, Fraction)):
                return Scalar._raw(self.re * other, self.im * other)
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return Scalar._raw(a * c, _F0)
        return Scalar._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Scalar.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def inverse(self) -> "Scalar":
        a, b = self.re, self.im
        n = a * a + b * b
        if not n:
            raise ZeroDivisionError("inverse of zero scalar")
        return Scalar._raw(a / n, -b / n)

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    # scalars are their own 0-leg algebra; star is complex conjugation
    star = conjugate

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_zero(self) -> bool:
        return not self

    def __eq__(self, other):
        if type(other) is Scalar:
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"Scalar({self.text()})"

    def text(self) -> str:
        """Coefficient text without surrounding parentheses, e.g. ``1/2+1/3 i``."""
        re, im = self.re, self.im
        if not im:
            return _ftext(re)
        imt = _ftext(abs(im)) + " i"
        if not re:
            return ("-" if im < 0 else "") + imt
        return _ftext(re) + ("-" if im < 0 else "+") + imt


def _ftext(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


# ---------------------------------------------------------------------------
# Alphabets and words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Alphabet:
    names: tuple
    self_adjoint: tuple

    def __post_init__(self):
        if len(self.names) != len(self.self_adjoint):
            raise ValueError("names and self_adjoint flags differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator names")
        object.__setattr__(self, "_index", {n: k for k, n in enumerate(self.names)})

    @classmethod
    def of(cls, gens: Iterable) -> "Alphabet":
        """Build from names or ``(name, self_adjoint)`` pairs."""
        names, flags = [], []
        for g in gens:
            if isinstance(g, str):
                names.append(g)
                flags.append(False)
            else:
                names.append(g[0])
                flags.append(bool(g[1]))
        return cls(tuple(names), tuple(flags))

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def letter(self, gen, starred: bool = False) -> int:
        g = gen if isinstance(gen, int) else self.index(gen)
        if starred and not self.self_adjoint[g]:
            return 2 * g + 1
        return 2 * g

    def star_letter(self, code: int) -> int:
        if self.self_adjoint[code >> 1]:
            return code
        return code ^ 1

    def star_word(self, w: Word) -> Word:
        sa = self.self_adjoint
        return tuple(c if sa[c >> 1] else c ^ 1 for c in reversed(w))

    def normalize_letter(self, code: int) -> int:
        return code & ~1 if self.self_adjoint[code >> 1] else code

    def letters(self) -> list:
        out = []
        for g, sa in enumerate(self.self_adjoint):
            out.append(2 * g)
            if not sa:
                out.append(2 * g + 1)
        return out

    def letter_name(self, code: int) -> str:
        name = self.names[code >> 1]
        return name + "*" if code & 1 else name

    def word_text(self, w: Word) -> str:
        if not w:
            return "1"
        return ".".join(self.letter_name(c) for c in w)

    def with_self_adjoint(self, flags) -> "Alphabet":
        return Alphabet(self.names, tuple(flags))


def deglex_key(w: Word):
    return (len(w), w)


def deglex_compare(u: Word, v: Word, gen_order: Mapping[int, int] | None = None) -> int:
    """Return -1, 0 or 1 as ``u`` is below, equal to or above ``v``.

    Shorter words come first; equal lengths compare letter by letter, by
    ``gen_order`` rank when given, else by letter code.
    """
    if len(u) != len(v):
        return -1 if len(u) < len(v) else 1
    if gen_order is not None:
        u = tuple(gen_order[c] for c in u)
        v = tuple(gen_order[c] for c in v)
    if u == v:
        return 0
    return -1 if u < v else 1


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

Coeff = Union[Scalar, int, Fraction]


class NCPoly:
    """Noncommutative *-polynomial with Gaussian-rational coefficients.

    ``terms`` maps words to nonzero Scalars.  Instances are treated as
    immutable; every operation returns a new polynomial.
    """

    __slots__ = ("alphabet", "terms", "_hash")

    def __init__(self, alphabet: Alphabet, terms: Mapping | None = None, *, _trusted=False):
        self.alphabet = alphabet
        self._hash = None
        if _trusted:
            self.terms = terms
            return
        clean = {}
        for w, c in (terms or {}).items():
            c = Scalar.coerce(c)
            if not c:
                continue
            w = tuple(alphabet.normalize_letter(x) for x in w)
            prev = clean.get(w)
            if prev is not None:
                c = prev + c
                if not c:
                    del clean[w]
                    continue
            clean[w] = c
        self.terms = clean

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, alphabet: Alphabet) -> "NCPoly":
        return cls(alphabet, {}, _trusted=True)

    @classmethod
    def one(cls, alphabet: Alphabet) -> "NCPoly":
        return cls(alphabet, {(): ONE}, _trusted=True)

    @classmethod
    def constant(cls, alphabet: Alphabet, c: Coeff) -> "NCPoly":
        c = Scalar.coerce(c)
        return cls(alphabet, {(): c} if c else {}, _trusted=True)

    @classmethod
    def gen(cls, alphabet: Alphabet, name, starred: bool = False) -> "NCPoly":
        return cls(alphabet, {(alphabet.letter(name, starred),): ONE}, _trusted=True)

    @classmethod
    def monomial(cls, alphabet: Alphabet, word: Sequence[int], coeff: Coeff = 1) -> "NCPoly":
        return cls(alphabet, {tuple(word): coeff})

    # basic queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(len(w) for w in self.terms)

    def words(self) -> list:
        return sorted(self.terms, key=deglex_key, reverse=True)

    def leading_term(self, gen_order: Mapping[int, int] | None = None):
        if not self.terms:
            raise ZeroPolynomial("leading term of the zero polynomial")
        if gen_order is None:
            w = max(self.terms, key=deglex_key)
        else:
            w = max(self.terms, key=lambda u: (len(u), tuple(gen_order[c] for c in u)))
        return w, self.terms[w]

    def constant_term(self) -> Scalar:
        return self.terms.get((), ZERO)

    def is_constant(self) -> bool:
        return all(not w for w in self.terms)

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "NCPoly"):
        if other.alphabet is not self.alphabet and other.alphabet != self.alphabet:
            raise AlphabetMismatch("polynomials over different alphabets")

    def _lift(self, other):
        if isinstance(other, NCPoly):
            self._check(other)
            return other
        if isinstance(other, (Scalar, int, Fraction)):
            return NCPoly.constant(self.alphabet, other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        _accumulate(out, other.terms, ONE)
        return NCPoly(self.alphabet, out, _trusted=True)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        _accumulate(out, other.terms, -ONE)
        return NCPoly(self.alphabet, out, _trusted=True)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return NCPoly(self.alphabet, {w: -c for w, c in self.terms.items()}, _trusted=True)

    def scale(self, c: Coeff) -> "NCPoly":
        c = Scalar.coerce(c)
        if not c:
            return NCPoly.zero(self.alphabet)
        return NCPoly(self.alphabet, {w: c * v for w, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        if not isinstance(other, NCPoly):
            return NotImplemented
        self._check(other)
        out: dict = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                w = u + v
                c = a * b
                prev = out.get(w)
                if prev is None:
                    out[w] = c
                else:
                    c = prev + c
                    if c:
                        out[w] = c
                    else:
                        del out[w]
        return NCPoly(self.alphabet, out, _trusted=True)

    def __rmul__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = NCPoly.one(self.alphabet)
        for _ in range(k):
            out = out * self
        return out

    def star(self) -> "NCPoly":
        sw = self.alphabet.star_word
        return NCPoly(self.alphabet, {sw(w): c.conjugate() for w, c in self.terms.items()}, _trusted=True)

    def lr_mul(self, left: Word, right: Word, c: Coeff = 1) -> "NCPoly":
        """Return ``c * left * self * right`` for words ``left``/``right``."""
        c = Scalar.coerce(c)
        return NCPoly(self.alphabet, {left + w + right: c * v for w, v in self.terms.items()}, _trusted=True)

    def monic(self) -> "NCPoly":
        _, c = self.leading_term()
        return self.scale(c.inverse())

    def commutator(self, other: "NCPoly") -> "NCPoly":
        return self * other - other * self

    # comparison / hashing --------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return self.alphabet == other.alphabet and self.terms == other.terms
        if isinstance(other, (Scalar, int, Fraction)):
            c = Scalar.coerce(other)
            return self.terms == ({(): c} if c else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.alphabet, frozenset(self.terms.items())))
        return self._hash

    # text -------------------------------------------------------------------
    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"NCPoly({self.text()!r})"

    def text(self) -> str:
        """Canonical text: terms in descending deglex order."""
        return terms_text(self.terms, self.alphabet.word_text)


def _accumulate(out: dict, terms: Mapping, factor: Scalar):
    one = factor == ONE
    for w, c in terms.items():
        if not one:
            c = c * factor
        prev = out.get(w)
        if prev is None:
            out[w] = c
        else:
            c = prev + c
            if c:
                out[w] = c
            else:
                del out[w]


def coeff_text(c: Scalar) -> tuple:
    """Split a coefficient into (negative?, text-or-None-for-unit)."""
    if not c.im:
        neg = c.re < 0
        mag = -c.re if neg else c.re
        return neg, (None if mag == 1 else f"({_ftext(mag)})")
    if not c.re:
        neg = c.im < 0
        mag = -c.im if neg else c.im
        return neg, ("(i)" if mag == 1 else f"({_ftext(mag)} i)")
    return False, f"({c.text()})"


def terms_text(terms: Mapping, word_text: Callable, key=None) -> str:
    if not terms:
        return "0"
    order = sorted(terms, key=key or deglex_key, reverse=True)
    parts = []
    for k, w in enumerate(order):
        neg, ct = coeff_text(terms[w])
        wt = word_text(w)
        if ct is None:
            body = wt
        else:
            body = ct + wt
        if k == 0:
            parts.append(("- " if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


# ---------------------------------------------------------------------------
# Tensor products
# ---------------------------------------------------------------------------


def _tensor_key(ws):
    return tuple(deglex_key(w) for w in ws)


class TensorPoly:
    """Element of an algebraic tensor product of free *-algebras.

    Terms map a tuple of words (one per leg) to a coefficient.  Letters in
    different legs commute, so leg-sorted blocks are the canonical word form.
    """

    __slots__ = ("legs", "terms")

    def __init__(self, legs: tuple, terms: Mapping | None = None, *, _trusted=False):
        self.legs = tuple(legs)
        if _trusted:
            self.terms = terms
            return
        clean: dict = {}
        for ws, c in (terms or {}).items():
            _accumulate(clean, {tuple(tuple(w) for w in ws): Scalar.coerce(c)}, ONE)
        self.terms = clean

    @classmethod
    def zero(cls, legs) -> "TensorPoly":
        return cls(legs, {}, _trusted=True)

    @classmethod
    def one(cls, legs) -> "TensorPoly":
        legs = tuple(legs)
        return cls(legs, {tuple(() for _ in legs): ONE}, _trusted=True)

    @classmethod
    def constant(cls, legs, c: Coeff) -> "TensorPoly":
        legs = tuple(legs)
        c = Scalar.coerce(c)
        return cls(legs, {tuple(() for _ in legs): c} if c else {}, _trusted=True)

    @classmethod
    def pure(cls, *factors: NCPoly) -> "TensorPoly":
        """``f1 ⊗ f2 ⊗ ...`` for plain polynomials."""
        legs = tuple(f.alphabet for f in factors)
        terms = {(): ONE}
        for f in factors:
            nxt: dict = {}
            for ws, a in terms.items():
                for w, b in f.terms.items():
                    nxt[ws + (w,)] = a * b
            terms = nxt
        return cls(legs, {k: v for k, v in terms.items() if v}, _trusted=True)

    @classmethod
    def embed(cls, p: NCPoly, leg: int, legs) -> "TensorPoly":
        legs = tuple(legs)
        if legs[leg] != p.alphabet:
            raise AlphabetMismatch("leg alphabet differs from polynomial alphabet")
        blank = [()] * len(legs)
        out = {}
        for w, c in p.terms.items():
            key = list(blank)
            key[leg] = w
            out[tuple(key)] = c
        return cls(legs, out, _trusted=True)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(max((len(w) for w in ws), default=0) for ws in self.terms)

    def _lift(self, other):
        if isinstance(other, TensorPoly):
            if other.legs != self.legs:
                raise AlphabetMismatch("tensor legs differ")
            return other
        if isinstance(other, (Scalar, int, Fraction)):
            return TensorPoly.constant(self.legs, other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        _accumulate(out, other.terms, ONE)
        return TensorPoly(self.legs, out, _trusted=True)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        _accumulate(out, other.terms, -ONE)
        return TensorPoly(self.legs, out, _trusted=True)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return TensorPoly(self.legs, {k: -c for k, c in self.terms.items()}, _trusted=True)

    def scale(self, c: Coeff) -> "TensorPoly":
        c = Scalar.coerce(c)
        if not c:
            return TensorPoly.zero(self.legs)
        return TensorPoly(self.legs, {k: c * v for k, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        if not isinstance(other, TensorPoly):
            return NotImplemented
        if other.legs != self.legs:
            raise AlphabetMismatch("tensor legs differ")
        out: dict = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                w = tuple(x + y for x, y in zip(u, v))
                _accumulate(out, {w: a * b}, ONE)
        return TensorPoly(self.legs, out, _trusted=True)

    def __rmul__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def star(self) -> "TensorPoly":
        sws = [a.star_word for a in self.legs]
        return TensorPoly(
            self.legs,
            {tuple(f(w) for f, w in zip(sws, ws)): c.conjugate() for ws, c in self.terms.items()},
            _trusted=True,
        )

    def __eq__(self, other):
        if isinstance(other, TensorPoly):
            return self.legs == other.legs and self.terms == other.terms
        return NotImplemented

    __hash__ = None

    def text(self) -> str:
        fns = [a.word_text for a in self.legs]

        def wt(ws):
            return " (*) ".join(f(w) for f, w in zip(fns, ws))

        return terms_text(self.terms, wt, key=_tensor_key)

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"TensorPoly({self.text()!r})"

    def leg_words(self, leg: int) -> set:
        return {ws[leg] for ws in self.terms}

    def contract_leg(self, leg: int, fn: Callable[[Word], Scalar]) -> "TensorPoly | NCPoly":
        """Apply a scalar-valued linear map to one leg, removing that leg."""
        legs = self.legs[:leg] + self.legs[leg + 1:]
        out: dict = {}
        for ws, c in self.terms.items():
            s = fn(ws[leg])
            if not s:
                continue
            key = ws[:leg] + ws[leg + 1:]
            _accumulate(out, {key: c * s}, ONE)
        if len(legs) == 1:
            return NCPoly(legs[0], {k[0]: v for k, v in out.items()}, _trusted=True)
        return TensorPoly(legs, out, _trusted=True)

    def expand_leg(self, leg: int, fn: Callable[[Word], "TensorPoly"]) -> "TensorPoly":
        """Replace one leg by the legs of ``fn(word)`` (linear in that leg)."""
        new_legs = None
        out: dict = {}
        for ws, c in self.terms.items():
            img = fn(ws[leg])
            if new_legs is None:
                new_legs = self.legs[:leg] + img.legs + self.legs[leg + 1:]
            for vs, d in img.terms.items():
                key = ws[:leg] + vs + ws[leg + 1:]
                _accumulate(out, {key: c * d}, ONE)
        if new_legs is None:
            return TensorPoly.zero(self.legs)  # zero element: leg structure unknown
        return TensorPoly(new_legs, out, _trusted=True)


def as_tensor(p: NCPoly) -> TensorPoly:
    return TensorPoly((p.alphabet,), {(w,): c for w, c in p.terms.items()}, _trusted=True)


# ---------------------------------------------------------------------------
# Homomorphic extension
# ---------------------------------------------------------------------------


def evaluate(p: NCPoly, images: Mapping[int, object], one, reduce: Callable | None = None):
    """Evaluate ``p`` under a letter -> element assignment in any *-ring.

    ``images`` maps letter codes (plain and starred) to elements supporting
    ``*``, ``+`` and scalar multiplication; ``one`` is the target unit.
    ``reduce`` is applied after every product to keep intermediates small.
    """
    cache: dict = {(): one}

    def word_value(w):
        v = cache.get(w)
        if v is None:
            v = word_value(w[:-1]) * images[w[-1]]
            if reduce is not None:
                v = reduce(v)
            cache[w] = v
        return v

    total = None
    for w in sorted(p.terms, key=deglex_key):
        term = word_value(w) * p.terms[w]
        total = term if total is None else total + term
    if total is None:
        total = one * 0
    return reduce(total) if reduce is not None else total


def star_closed_images(alphabet: Alphabet, gen_images: Mapping[str, object]) -> dict:
    """Letter-code image table from per-generator images (stars via ``.star()``)."""
    out = {}
    for name, img in gen_images.items():
        g = alphabet.index(name)
        out[2 * g] = img
        if not alphabet.self_adjoint[g]:
            out[2 * g + 1] = img.star()
    return out
