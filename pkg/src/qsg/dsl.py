"""Text format for presentations and quantum semigroups.

A file looks like::

    algebra "QMap(X_2)"
    generators { a11; a12; a21; a22; }
    relations { a11.a21 = a21.a11; }
    closures { partition a11 a12; partition a21 a22; }
    delta { a11 = a11 (*) a11 + a12 (*) a21; ... }
    counit { a11 = 1; a12 = 0; ... }
    action functions 2 defining { e1 = [a11, a21]; e2 = [a12, a22]; }

Expressions use postfix ``*`` for the adjoint, ``.`` or whitespace for the
product, ``^k`` for powers, rationals like ``1/2``, ``i`` for the imaginary
unit and ``(*)`` (or ``⊗``) between tensor legs.  ``action`` images list the
coefficients over the basis of the acted-on algebra: ``e1..eN`` for
``functions N`` and ``n.n*, n, n*, n*.n`` for ``m2``.  The ``defining``
keyword marks algebras whose relations are the matrix relations of the action.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .ncpoly import I, ONE, Alphabet, NCPoly, Scalar, TensorPoly


class DSLError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}" if line else message)


class ParseError(DSLError):
    """Malformed input (syntax)."""


class SemanticError(DSLError):
    """Well-formed input that names something undeclared or mistyped."""


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<tensor>\(\*\)|⊗)
  | (?P<string>"[^"\n]*")
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[{}();=+\-.*^/\[\],])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list:
    out = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                out.append(Token(kind, s, line, col))
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


class _Expr:
    """Recursive-descent evaluator over a token list.

    Values are Scalar, NCPoly or TensorPoly.  ``legs`` is None for plain
    polynomials, else the tensor leg alphabets.
    """

    def __init__(self, tokens, pos, alphabet: Alphabet, legs=None):
        self.toks = tokens
        self.pos = pos
        self.alphabet = alphabet
        self.legs = legs

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def _err(self, msg, tok=None, cls=ParseError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col)

    def expect(self, text):
        if self.tok.text != text or self.tok.kind in ("string",):
            shown = self.tok.text or "end of input"
            raise self._err(f"expected {text!r}, found {shown!r}")
        self.pos += 1

    def expr(self):
        tok = self.tok
        return self._finish(self.expr_raw(), tok)

    def _finish(self, v, tok):
        if self.legs is None:
            if isinstance(v, TensorPoly):
                raise self._err("tensor product not allowed here", tok, SemanticError)
            return v
        if isinstance(v, NCPoly):
            if v.is_constant():
                return TensorPoly.constant(self.legs, v.constant_term())
            raise self._err(f"expected {len(self.legs)} tensor legs", tok, SemanticError)
        return v

    def _add(self, a, b, tok):
        a, b = self._unify(a, b, tok)
        return a + b

    def _unify(self, a, b, tok):
        if isinstance(a, Scalar) and isinstance(b, Scalar):
            return a, b
        if isinstance(a, TensorPoly) or isinstance(b, TensorPoly):
            a = self._as_tensor(a, tok)
            b = self._as_tensor(b, tok)
            return a, b
        if isinstance(a, Scalar):
            a = NCPoly.constant(self.alphabet, a)
        if isinstance(b, Scalar):
            b = NCPoly.constant(self.alphabet, b)
        return a, b

    def _as_tensor(self, v, tok):
        if isinstance(v, TensorPoly):
            return v
        if self.legs is None:
            raise self._err("tensor product not allowed here", tok, SemanticError)
        if isinstance(v, Scalar):
            return TensorPoly.constant(self.legs, v)
        if v.is_constant():
            return TensorPoly.constant(self.legs, v.constant_term())
        raise self._err(f"expected {len(self.legs)} tensor legs", tok, SemanticError)

    def term(self):
        start = self.tok
        factors = [self.product()]
        while self.tok.kind == "tensor":
            if self.legs is None:
                raise self._err("tensor product not allowed here", cls=SemanticError)
            self.pos += 1
            factors.append(self.product())
        if len(factors) == 1:
            return factors[0]
        if len(factors) != len(self.legs):
            raise self._err(f"expected {len(self.legs)} tensor legs, found {len(factors)}", start, SemanticError)
        polys = []
        for f, leg in zip(factors, self.legs):
            if isinstance(f, TensorPoly):
                raise self._err("nested tensor product", start, SemanticError)
            if isinstance(f, Scalar):
                f = NCPoly.constant(leg, f)
            polys.append(f)
        return TensorPoly.pure(*polys)

    def _starts_atom(self) -> bool:
        t = self.tok
        return t.kind in ("num", "ident") or (t.kind == "op" and t.text == "(")

    def product(self):
        start = self.tok
        v = self.unary()
        while True:
            if self.tok.kind == "op" and self.tok.text == ".":
                self.pos += 1
                rhs = self.unary()
            elif self._starts_atom():
                rhs = self.unary()
            else:
                return v
            v = self._mul(v, rhs, start)

    def _mul(self, a, b, tok):
        if isinstance(a, Scalar) and not isinstance(b, Scalar):
            return b * a
        if isinstance(b, Scalar):
            return a * b
        a, b = self._unify(a, b, tok)
        return a * b

    def unary(self):
        if self.tok.kind == "op" and self.tok.text in ("-", "+"):
            neg = self.tok.text == "-"
            self.pos += 1
            v = self.unary()
            return -v if neg else v
        return self.postfix()

    def postfix(self):
        v = self.atom()
        while self.tok.kind == "op" and self.tok.text in ("*", "^"):
            if self.tok.text == "*":
                self.pos += 1
                v = v.star()
            else:
                self.pos += 1
                if self.tok.kind != "num":
                    raise self._err("expected an exponent")
                k = int(self.tok.text)
                self.pos += 1
                v = self._power(v, k)
        return v

    def _power(self, v, k):
        if isinstance(v, Scalar):
            out = ONE
        elif isinstance(v, NCPoly):
            out = NCPoly.one(v.alphabet)
        else:
            out = TensorPoly.one(v.legs)
        for _ in range(k):
            out = out * v
        return out

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.pos += 1
            num = Fraction(int(t.text))
            if self.tok.kind == "op" and self.tok.text == "/":
                self.pos += 1
                if self.tok.kind != "num":
                    raise self._err("expected a denominator")
                den = int(self.tok.text)
                if den == 0:
                    raise self._err("zero denominator", cls=SemanticError)
                self.pos += 1
                num = num / den
            return Scalar(num)
        if t.kind == "ident":
            self.pos += 1
            if t.text == "i":
                return I
            try:
                return NCPoly.gen(self.alphabet, t.text)
            except KeyError:
                raise self._err(f"unknown generator {t.text!r}", t, SemanticError) from None
        if t.kind == "op" and t.text == "(":
            self.pos += 1
            v = self.expr_raw()
            self.expect(")")
            return v
        shown = t.text or "end of input"
        raise self._err(f"unexpected {shown!r}")

    def expr_raw(self):
        total = None
        sign = 1
        if self.tok.kind == "op" and self.tok.text in ("+", "-"):
            sign = -1 if self.tok.text == "-" else 1
            self.pos += 1
        while True:
            start = self.tok
            t = self.term()
            if sign < 0:
                t = -t
            total = t if total is None else self._add(total, t, start)
            if self.tok.kind == "op" and self.tok.text in ("+", "-"):
                sign = -1 if self.tok.text == "-" else 1
                self.pos += 1
                continue
            return total


def _coerce_result(v, alphabet, legs):
    if legs is None:
        if isinstance(v, Scalar):
            return NCPoly.constant(alphabet, v)
        return v
    return v


def _context(target):
    if isinstance(target, Alphabet):
        return target, None
    legs = tuple(target)
    return legs[0], legs


def parse_expression(text: str, target):
    """Parse an NCPoly (``target`` an Alphabet) or TensorPoly (a leg tuple)."""
    alphabet, legs = _context(target)
    toks = tokenize(text)
    p = _Expr(toks, 0, alphabet, legs)
    v = p.expr()
    if p.tok.kind != "eof":
        raise p._err(f"unexpected {p.tok.text!r}")
    return _coerce_result(v, alphabet, legs)


def parse_relation(text: str, alphabet: Alphabet) -> NCPoly:
    """``lhs = rhs`` (or a bare expression meaning ``expr = 0``)."""
    toks = tokenize(text)
    p = _Expr(toks, 0, alphabet)
    lhs = _coerce_result(p.expr(), alphabet, None)
    if p.tok.kind == "op" and p.tok.text == "=":
        p.pos += 1
        rhs = _coerce_result(p.expr(), alphabet, None)
        lhs = lhs - rhs
    if p.tok.kind != "eof":
        raise p._err(f"unexpected {p.tok.text!r}")
    return lhs


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------


@dataclass
class _Stmt:
    name: Token | None
    start: int  # token index of the expression
    end: int  # index of the terminating ';'


class _FileParser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def err(self, msg, tok=None, cls=ParseError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col)

    def expect(self, text, kind=None):
        t = self.tok
        if t.text != text or (kind and t.kind != kind) or t.kind == "string":
            shown = t.text or "end of input"
            raise self.err(f"expected {text!r}, found {shown!r}")
        self.pos += 1
        return t

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "ident":
            raise self.err(f"expected a name, found {t.text or 'end of input'!r}")
        self.pos += 1
        return t

    def keyword(self, word) -> bool:
        return self.tok.kind == "ident" and self.tok.text == word

    def statements(self, named: bool) -> list:
        """``{ [name =] tokens ; ... }`` with expressions left unparsed."""
        self.expect("{")
        out = []
        while not (self.tok.kind == "op" and self.tok.text == "}"):
            if self.tok.kind == "eof":
                raise self.err("unterminated block")
            name = None
            if named:
                name = self.ident()
                self.expect("=")
            start = self.pos
            depth = 0
            while True:
                t = self.tok
                if t.kind == "eof":
                    raise self.err("missing ';'")
                if t.kind == "op" and t.text in "([":
                    depth += 1
                elif t.kind == "op" and t.text in ")]":
                    depth -= 1
                elif t.kind == "op" and t.text in ";}" and depth <= 0:
                    break
                self.pos += 1
            if self.tok.text == "}":
                raise self.err("expected ';'")
            out.append(_Stmt(name, start, self.pos))
            self.pos += 1
        self.pos += 1
        return out

    def sub(self, stmt: _Stmt, alphabet, legs=None, relation=False):
        toks = self.toks[stmt.start:stmt.end] + [Token("eof", ";", *self._loc(stmt.end))]
        if stmt.start == stmt.end:
            t = self.toks[stmt.end]
            raise ParseError("empty expression", t.line, t.col)
        p = _Expr(toks, 0, alphabet, legs)
        v = p.expr()
        if relation and p.tok.kind == "op" and p.tok.text == "=":
            p.pos += 1
            v = _coerce_result(v, alphabet, None) - _coerce_result(p.expr(), alphabet, None)
        if p.tok.kind != "eof":
            raise p._err(f"unexpected {p.tok.text!r}")
        return _coerce_result(v, alphabet, legs)

    def _loc(self, idx):
        t = self.toks[idx]
        return t.line, t.col

    def parse(self):
        from .presentation import ClosureAnnotation, make_presentation
        from .semigroup import QuantumFamily, QuantumSemigroup, functions_on_points, matrix_algebra_2

        self.expect("algebra")
        if self.tok.kind != "string":
            raise self.err("expected a quoted algebra name")
        name = self.tok.text[1:-1]
        self.pos += 1

        self.expect("generators")
        self.expect("{")
        gens, seen = [], {}
        while not (self.tok.kind == "op" and self.tok.text == "}"):
            t = self.ident()
            if t.text == "i":
                raise self.err("'i' is reserved for the imaginary unit", t, SemanticError)
            if t.text in seen:
                raise self.err(f"duplicate generator {t.text!r}", t, SemanticError)
            sa = False
            if self.keyword("sa"):
                self.pos += 1
                sa = True
            self.expect(";")
            seen[t.text] = t
            gens.append((t.text, sa))
        self.pos += 1

        rel_stmts = []
        if self.keyword("relations"):
            self.pos += 1
            rel_stmts = self.statements(named=False)

        closures = []
        if self.keyword("closures"):
            self.pos += 1
            self.expect("{")
            while not (self.tok.kind == "op" and self.tok.text == "}"):
                self.expect("partition")
                members = []
                while self.tok.kind == "ident":
                    t = self.ident()
                    if t.text not in seen:
                        raise self.err(f"unknown generator {t.text!r}", t, SemanticError)
                    members.append(t.text)
                if not members:
                    raise self.err("empty partition")
                self.expect(";")
                closures.append(ClosureAnnotation.partition(members))
            self.pos += 1

        delta_stmts = counit_stmts = None
        if self.keyword("delta"):
            self.pos += 1
            delta_stmts = self.statements(named=True)
        if self.keyword("counit"):
            self.pos += 1
            counit_stmts = self.statements(named=True)

        action = None
        if self.keyword("action"):
            self.pos += 1
            kind_tok = self.ident()
            if kind_tok.text == "functions":
                if self.tok.kind != "num":
                    raise self.err("expected the number of points")
                size = int(self.tok.text)
                if size < 1:
                    raise self.err("need at least one point", cls=SemanticError)
                self.pos += 1
                space = functions_on_points(size)
            elif kind_tok.text == "m2":
                space = matrix_algebra_2()
            else:
                raise self.err(f"unknown acted-on algebra {kind_tok.text!r}", kind_tok, SemanticError)
            defining = False
            if self.keyword("defining"):
                self.pos += 1
                defining = True
            action = (space, defining, self.statements(named=True))

        if self.tok.kind != "eof":
            raise self.err(f"unexpected {self.tok.text!r}")

        # second phase: the alphabet (with partition members self-adjoint) is known
        flags = dict(gens)
        for c in closures:
            for m in c.members:
                flags[m] = True
        alphabet = Alphabet(tuple(n for n, _ in gens), tuple(flags[n] for n, _ in gens))
        rels = [self.sub(s, alphabet, relation=True) for s in rel_stmts]
        pres = make_presentation([(n, flags[n]) for n, _ in gens], rels, closures, name)
        alphabet = pres.alphabet

        if delta_stmts is None:
            if counit_stmts is not None or action is not None:
                raise self.err("counit and action need a delta block", cls=SemanticError)
            return pres
        if counit_stmts is None:
            raise self.err("a delta block needs a counit block", cls=SemanticError)
        legs = (alphabet, alphabet)
        delta = self._named(delta_stmts, seen, "delta", lambda s: self.sub(s, alphabet, legs))
        counit = self._named(counit_stmts, seen, "counit", lambda s: self._scalar(s, alphabet))
        fam = None
        defining = False
        if action is not None:
            space, defining, stmts = action
            images = {}
            known = set(space.presentation.alphabet.names)
            for s in stmts:
                if s.name.text not in known:
                    raise self.err(f"{s.name.text!r} is not a generator of {space.descriptor()}", s.name, SemanticError)
                images[s.name.text] = self._vector(s, alphabet, space.dim)
            for g in known - set(images):
                raise self.err(f"action lacks an image for {g!r}", cls=SemanticError)
            fam = QuantumFamily(space, pres, images)
        return QuantumSemigroup(pres, delta, counit, fam, name, defining)

    def _named(self, stmts, declared, block, fn):
        out = {}
        for s in stmts:
            if s.name.text not in declared:
                raise self.err(f"unknown generator {s.name.text!r}", s.name, SemanticError)
            if s.name.text in out:
                raise self.err(f"second {block} image for {s.name.text!r}", s.name, SemanticError)
            out[s.name.text] = fn(s)
        missing = [g for g in declared if g not in out]
        if missing:
            raise self.err(f"{block} lacks images for {', '.join(missing)}", cls=SemanticError)
        return out

    def _scalar(self, stmt, alphabet):
        v = self.sub(stmt, alphabet)
        if not v.is_constant():
            t = self.toks[stmt.start]
            raise SemanticError("counit values must be scalars", t.line, t.col)
        return v.constant_term()

    def _vector(self, stmt, alphabet, dim):
        t0 = self.toks[stmt.start]
        if not (t0.kind == "op" and t0.text == "["):
            raise ParseError("expected '[' starting a coefficient list", t0.line, t0.col)
        parts, depth, start = [], 0, stmt.start + 1
        for k in range(stmt.start + 1, stmt.end):
            t = self.toks[k]
            if t.kind == "op" and t.text in "([":
                depth += 1
            elif t.kind == "op" and t.text in ")]":
                if depth == 0:
                    if k != stmt.end - 1:
                        raise ParseError("text after ']'", t.line, t.col)
                    parts.append((start, k))
                    break
                depth -= 1
            elif t.kind == "op" and t.text == "," and depth == 0:
                parts.append((start, k))
                start = k + 1
        else:
            t = self.toks[stmt.end]
            raise ParseError("expected ']'", t.line, t.col)
        if len(parts) != dim:
            raise SemanticError(f"expected {dim} coefficients, found {len(parts)}", t0.line, t0.col)
        return [self.sub(_Stmt(None, a, b), alphabet) for a, b in parts]


def parse(text: str):
    """Parse a file into a Presentation, or a QuantumSemigroup when it has a delta block."""
    return _FileParser(text).parse()


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def print_presentation(P, header=True) -> str:
    lines = [f'algebra "{P.name}"'] if header else []
    lines.append("generators {")
    for n, sa in P.generators:
        lines.append(f"  {n}{' sa' if sa else ''};")
    lines.append("}")
    rels = P.user_relations()
    if rels:
        lines.append("relations {")
        for r in rels:
            lines.append(f"  {r.text()} = 0;")
        lines.append("}")
    if P.closures:
        lines.append("closures {")
        for c in P.closures:
            lines.append(f"  partition {' '.join(c.members)};")
        lines.append("}")
    return "\n".join(lines) + "\n"


def print_semigroup(S) -> str:
    out = [print_presentation(S.algebra).rstrip("\n")]
    out.append("delta {")
    for g in S.algebra.alphabet.names:
        out.append(f"  {g} = {S.delta.images[g].text()};")
    out.append("}")
    out.append("counit {")
    for g in S.algebra.alphabet.names:
        out.append(f"  {g} = {S.counit.images[g].text()};")
    out.append("}")
    if S.action is not None:
        space = S.action.space
        head = f"action {space.descriptor()}" + (" defining" if S.defined_by_action else "")
        out.append(head + " {")
        for g, coeffs in S.action.images.items():
            out.append(f"  {g} = [{', '.join(_coeff_text(c) for c in coeffs)}];")
        out.append("}")
    return "\n".join(out) + "\n"


def _coeff_text(c) -> str:
    return c.text()
