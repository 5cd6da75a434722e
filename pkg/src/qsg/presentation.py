"""Finitely presented *-algebras, tensor products, quotients and morphisms."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .ncpoly import ONE, Alphabet, NCPoly, Scalar, TensorPoly, evaluate, star_closed_images
from .rewrite import (
    DEFAULT_CAP,
    RewriteSystem,
    TensorReducer,
    complete,
)


class UnknownLetter(KeyError):
    pass


class DuplicateGenerator(ValueError):
    pass


PARTITION_NOTE = (
    "projections summing to 1 in a C*-algebra are pairwise orthogonal; "
    "orthogonality is added explicitly"
)


@dataclass(frozen=True)
class ClosureAnnotation:
    kind: str
    members: tuple
    justification: str = PARTITION_NOTE

    @classmethod
    def partition(cls, members: Iterable[str]) -> "ClosureAnnotation":
        return cls("ProjectionPartition", tuple(members))

    def text(self) -> str:
        return f"partition({', '.join(self.members)})"


def transfer(p: NCPoly, alphabet: Alphabet) -> NCPoly:
    """Re-encode ``p`` over another alphabet, matching generators by name."""
    if p.alphabet is alphabet or p.alphabet == alphabet:
        return p
    src = p.alphabet
    out = {}
    for w, c in p.terms.items():
        try:
            nw = tuple(alphabet.letter(src.names[x >> 1], bool(x & 1)) for x in w)
        except KeyError as e:
            raise UnknownLetter(str(e)) from None
        out[nw] = out.get(nw, Scalar(0)) + c
    return NCPoly(alphabet, out)


class Presentation:
    """Generators, relations (with provenance) and closure annotations.

    Completions are cached per degree cap; treat instances as immutable.
    """

    def __init__(self, alphabet: Alphabet, relations, provenance, closures=(), name: str = ""):
        self.alphabet = alphabet
        self.relations = tuple(relations)
        self.provenance = tuple(provenance)
        self.closures = tuple(closures)
        self.name = name
        self._systems: dict = {}
        self.hash = _digest(alphabet, self.relations)

    @property
    def generators(self) -> list:
        return list(zip(self.alphabet.names, self.alphabet.self_adjoint))

    def gen(self, name: str, starred: bool = False) -> NCPoly:
        return NCPoly.gen(self.alphabet, name, starred)

    def gens(self) -> dict:
        return {n: self.gen(n) for n in self.alphabet.names}

    def one(self) -> NCPoly:
        return NCPoly.one(self.alphabet)

    def poly(self, text: str) -> NCPoly:
        from .dsl import parse_expression

        return parse_expression(text, self.alphabet)

    def user_relations(self) -> list:
        return [r for r, p in zip(self.relations, self.provenance) if not p.startswith("closure")]

    def system(self, cap: int = DEFAULT_CAP, allow_inconsistent: bool = False) -> RewriteSystem:
        key = (cap, allow_inconsistent)
        rs = self._systems.get(key)
        if rs is None:
            rs = complete(self, cap, allow_inconsistent=allow_inconsistent)
            self._systems[key] = rs
            if rs.inconsistent:
                self._systems[(cap, True)] = rs
        return rs

    def adopt_system(self, rs: RewriteSystem):
        self._systems[(rs.degree_cap, False)] = rs

    def canonical_text(self) -> str:
        return _canonical(self.alphabet, self.relations)

    def __repr__(self):
        return f"Presentation({self.name or self.hash[:12]}, {len(self.alphabet)} gens, {len(self.relations)} rels)"


def _canonical(alphabet: Alphabet, relations) -> str:
    lines = ["gen " + n + (" sa" if sa else "") for n, sa in zip(alphabet.names, alphabet.self_adjoint)]
    lines += sorted("rel " + r.text() for r in relations)
    return "\n".join(lines) + "\n"


def _digest(alphabet: Alphabet, relations) -> str:
    return hashlib.sha256(_canonical(alphabet, relations).encode()).hexdigest()


def _partition_relations(alphabet: Alphabet, members: Sequence[str]) -> list:
    ps = [NCPoly.gen(alphabet, m) for m in members]
    out = [p * p - p for p in ps]
    for i, p in enumerate(ps):
        for j, q in enumerate(ps):
            if i != j:
                out.append(p * q)
    total = NCPoly.zero(alphabet)
    for p in ps:
        total = total + p
    out.append(total - 1)
    return out


def make_presentation(gens, relations=(), closures=(), name: str = "") -> Presentation:
    """Build a presentation, expanding closure annotations into relations.

    ``gens`` holds names or ``(name, self_adjoint)`` pairs; ``relations`` holds
    NCPoly (matched by generator name) or expression strings.  Partition
    members are flagged self-adjoint, which realizes ``p* = p``.
    """
    names, flags = [], []
    for g in gens:
        n, sa = (g, False) if isinstance(g, str) else (g[0], bool(g[1]))
        if n in names:
            raise DuplicateGenerator(n)
        names.append(n)
        flags.append(sa)
    closures = [c if isinstance(c, ClosureAnnotation) else ClosureAnnotation.partition(c) for c in closures]
    for c in closures:
        for m in c.members:
            if m not in names:
                raise UnknownLetter(m)
            flags[names.index(m)] = True
    alphabet = Alphabet(tuple(names), tuple(flags))

    rels, prov, seen = [], [], set()

    def add(r: NCPoly, origin: str):
        if r.is_zero():
            return
        key = r.monic()
        if key in seen:
            return
        seen.add(key)
        rels.append(r)
        prov.append(origin)

    for r in relations:
        if isinstance(r, str):
            from .dsl import parse_relation

            r = parse_relation(r, alphabet)
        add(transfer(r, alphabet), "user")
    for c in closures:
        origin = f"closure:{c.text()}: {c.justification}"
        for r in _partition_relations(alphabet, c.members):
            add(r, origin)
    return Presentation(alphabet, rels, prov, closures, name)


def quotient(P: Presentation, extra: Iterable, name: str = "", origin: str = "quotient") -> Presentation:
    """``P`` with extra relations added (provenance recorded)."""
    rels, prov = list(P.relations), list(P.provenance)
    seen = {r.monic() for r in rels}
    for r in extra:
        if isinstance(r, str):
            from .dsl import parse_relation

            r = parse_relation(r, P.alphabet)
        r = transfer(r, P.alphabet)
        if r.is_zero():
            continue
        key = r.monic()
        if key in seen:
            continue
        seen.add(key)
        rels.append(r)
        prov.append(origin)
    return Presentation(P.alphabet, rels, prov, P.closures, name or P.name)


# ---------------------------------------------------------------------------
# Tensor products
# ---------------------------------------------------------------------------


@dataclass
class TensorPresentation:
    """Ordered factors; letters in different legs commute by construction."""

    factors: tuple

    @property
    def legs(self) -> tuple:
        return tuple(f.alphabet for f in self.factors)

    def reducer(self, cap: int = DEFAULT_CAP) -> TensorReducer:
        return TensorReducer([f.system(cap) for f in self.factors])

    def one(self) -> TensorPoly:
        return TensorPoly.one(self.legs)

    def embed(self, p: NCPoly, leg: int) -> TensorPoly:
        return TensorPoly.embed(p, leg, self.legs)

    def pure(self, *factors: NCPoly) -> TensorPoly:
        return TensorPoly.pure(*factors)


def tensor(*factors: Presentation) -> TensorPresentation:
    return TensorPresentation(tuple(factors))


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------

SCALARS = "scalars"


@dataclass
class MorphismReport:
    status: str  # Verified | Violations | Inconclusive
    violations: list = field(default_factory=list)  # (relation, residue)

    @property
    def verified(self) -> bool:
        return self.status == "Verified"


class GeneratorMap:
    """A *-homomorphism defined on generators (``f(g*) := f(g)*``)."""

    def __init__(self, source: Presentation, target, images: Mapping[str, object], name: str = ""):
        self.source = source
        self.target = target
        self.name = name
        self.images = {}
        for g in source.alphabet.names:
            if g not in images:
                raise UnknownLetter(f"no image for generator {g!r}")
            self.images[g] = _coerce_image(images[g], target)
        self.verified = False
        self._letter_images = star_closed_images(source.alphabet, self.images)

    def one(self):
        if self.target == SCALARS:
            return ONE
        if isinstance(self.target, TensorPresentation):
            return self.target.one()
        return self.target.one()

    def reducer(self, cap: int = DEFAULT_CAP):
        if self.target == SCALARS:
            return None
        if isinstance(self.target, TensorPresentation):
            return self.target.reducer(cap)
        return TensorReducer([self.target.system(cap)])

    def apply(self, p: NCPoly, cap: int = DEFAULT_CAP, reducer=None):
        if reducer is None:
            reducer = self.reducer(cap)
        return evaluate(transfer(p, self.source.alphabet), self._letter_images, self.one(), reducer)

    __call__ = apply

    def apply_word(self, w, reducer=None):
        return evaluate(NCPoly(self.source.alphabet, {w: ONE}, _trusted=True), self._letter_images, self.one(), reducer)


def _coerce_image(x, target):
    if target == SCALARS:
        return Scalar.coerce(x)
    if isinstance(x, (int, Fraction, Scalar)):
        if isinstance(target, TensorPresentation):
            return TensorPoly.constant(target.legs, x)
        return NCPoly.constant(target.alphabet, x)
    if isinstance(x, str):
        from .dsl import parse_expression

        legs = target.legs if isinstance(target, TensorPresentation) else target.alphabet
        return parse_expression(x, legs)
    if isinstance(x, NCPoly) and isinstance(target, Presentation):
        return transfer(x, target.alphabet)
    return x


def _is_zero(x) -> bool:
    return not x


def check_morphism(f: GeneratorMap, cap: int = DEFAULT_CAP) -> MorphismReport:
    """Verified iff every source relation maps to zero in the target.

    Self-adjoint source generators additionally need self-adjoint images.
    """
    red = f.reducer(cap)
    violations = []
    tests = list(f.source.relations)
    labels = [r for r in tests]
    for g, sa in f.source.generators:
        if sa:
            img = f.images[g]
            diff = img - img.star()
            if red is not None:
                diff = red(diff)
            if not _is_zero(diff):
                violations.append((f.source.gen(g), diff))
    for r, label in zip(tests, labels):
        img = f.apply(r, cap, red)
        if not _is_zero(img):
            violations.append((label, img))
    overflow = red is not None and red.overflow
    if not violations:
        f.verified = True
        return MorphismReport("Verified")
    if overflow:
        return MorphismReport("Inconclusive", violations)
    return MorphismReport("Violations", violations)


def identity_map(P: Presentation) -> GeneratorMap:
    return GeneratorMap(P, P, P.gens(), name="id")
