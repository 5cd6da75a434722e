"""Quantum semigroups (A, Δ, ε, Φ) and their axiom checks.

Elements of ``M ⊗ R`` for a finite-dimensional C*-algebra ``M`` are stored as
coefficient tuples over a fixed linear basis of ``M``; ``R`` can be any ring
of this package (NCPoly, TensorPoly, Scalar).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .ncpoly import ONE, ZERO, NCPoly, Scalar, TensorPoly, evaluate
from .presentation import (
    SCALARS,
    ClosureAnnotation,
    GeneratorMap,
    Presentation,
    TensorPresentation,
    check_morphism,
    make_presentation,
    tensor,
)
from .rewrite import DEFAULT_CAP, TensorReducer

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"


# ---------------------------------------------------------------------------
# Finite-dimensional C*-algebras
# ---------------------------------------------------------------------------


class FDCStar:
    """A finite-dimensional C*-algebra given by structure constants.

    ``mult[(i, j)]`` lists ``(k, c)`` with ``b_i b_j = Σ c b_k``;
    ``star[i]`` lists ``(k, c)`` with ``b_i* = Σ c b_k``.  ``presentation``
    describes the same algebra by generators and relations and
    ``basis_words[i]`` writes ``b_i`` as a polynomial in those generators.
    """

    def __init__(self, kind, basis, mult, star, unit, presentation: Presentation, gen_coords, basis_words, size):
        self.kind = kind
        self.basis = tuple(basis)
        self.mult = mult
        self.star = star
        self.unit = tuple(unit)
        self.presentation = presentation
        self.gen_coords = gen_coords
        self.basis_words = tuple(basis_words)
        self.size = size
        self._check()

    @property
    def dim(self) -> int:
        return len(self.basis)

    def descriptor(self) -> str:
        return f"functions {self.size}" if self.kind == "functions" else "m2"

    def _check(self):
        d = self.dim
        vec = [[ONE if k == i else ZERO for k in range(d)] for i in range(d)]
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    a = self.mul_scalar(self.mul_scalar(vec[i], vec[j]), vec[k])
                    b = self.mul_scalar(vec[i], self.mul_scalar(vec[j], vec[k]))
                    if a != b:
                        raise ValueError("structure constants are not associative")
                # (xy)* = y* x*
                lhs = self.star_scalar(self.mul_scalar(vec[i], vec[j]))
                rhs = self.mul_scalar(self.star_scalar(vec[j]), self.star_scalar(vec[i]))
                if lhs != rhs:
                    raise ValueError("involution is not anti-multiplicative")
            if self.mul_scalar(list(self.unit), vec[i]) != vec[i]:
                raise ValueError("unit is not a unit")

    def mul_scalar(self, x, y):
        out = [ZERO] * self.dim
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                for k, c in self.mult.get((i, j), ()):
                    out[k] = out[k] + a * b * c
        return out

    def star_scalar(self, x):
        out = [ZERO] * self.dim
        for i, a in enumerate(x):
            for k, c in self.star[i]:
                out[k] = out[k] + a.conjugate() * c
        return out

    def element(self, coeffs, ring_zero, reduce=None) -> "MTensor":
        return MTensor(self, tuple(coeffs), ring_zero, reduce)

    def embed(self, vec, one) -> "MTensor":
        """``m ⊗ 1`` for a scalar coordinate vector ``m``."""
        return MTensor(self, tuple(one * c for c in vec), one * 0)


class MTensor:
    """Element of ``M ⊗ R`` as basis coefficients in ``R``."""

    __slots__ = ("alg", "coeffs", "zero", "reduce_fn")

    def __init__(self, alg: FDCStar, coeffs, zero, reduce=None):
        self.alg = alg
        self.coeffs = tuple(coeffs)
        self.zero = zero
        self.reduce_fn = reduce

    def _new(self, coeffs):
        return MTensor(self.alg, coeffs, self.zero, self.reduce_fn)

    def _red(self, x):
        return self.reduce_fn(x) if self.reduce_fn is not None else x

    def __add__(self, other):
        if not isinstance(other, MTensor):
            if not other:
                return self
            return NotImplemented
        return self._new(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._new(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return self._new(tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if not isinstance(other, MTensor):
            return self._new(tuple(a * other for a in self.coeffs))
        out = [self.zero] * self.alg.dim
        for (i, j), prods in self.alg.mult.items():
            a, b = self.coeffs[i], other.coeffs[j]
            if not a or not b:
                continue
            ab = self._red(a * b)
            for k, c in prods:
                out[k] = out[k] + ab * c
        return self._new(tuple(out))

    def __rmul__(self, other):
        return self._new(tuple(a * other for a in self.coeffs))

    def star(self):
        out = [self.zero] * self.alg.dim
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            sa = a.star()
            for k, c in self.alg.star[i]:
                out[k] = out[k] + sa * c
        return self._new(tuple(out))

    def map(self, fn) -> "MTensor":
        return MTensor(self.alg, tuple(fn(a) for a in self.coeffs), fn(self.zero), None)

    def is_zero(self) -> bool:
        return all(not a for a in self.coeffs)

    def __bool__(self):
        return not self.is_zero()


def functions_on_points(n: int) -> FDCStar:
    """``C(X_n) = ℂⁿ`` with the standard basis of minimal projections."""
    basis = [f"e{j}" for j in range(1, n + 1)]
    mult = {(i, i): [(i, ONE)] for i in range(n)}
    star = [[(i, ONE)] for i in range(n)]
    pres = make_presentation(basis, closures=[ClosureAnnotation.partition(basis)], name=f"C(X_{n})")
    coords = {b: tuple(ONE if k == i else ZERO for k in range(n)) for i, b in enumerate(basis)}
    words = [pres.gen(b) for b in basis]
    return FDCStar("functions", basis, mult, star, [ONE] * n, pres, coords, words, n)


# M2 basis: nn* = E11, n = E12, n* = E21, n*n = E22 for n = [[0, 1], [0, 0]]
_M2_UNITS = [(0, 0), (0, 1), (1, 0), (1, 1)]


def matrix_algebra_2() -> FDCStar:
    basis = ["n.n*", "n", "n*", "n*.n"]
    idx = {u: k for k, u in enumerate(_M2_UNITS)}
    mult = {}
    for i, (a, b) in enumerate(_M2_UNITS):
        for j, (c, d) in enumerate(_M2_UNITS):
            if b == c:
                mult[(i, j)] = [(idx[(a, d)], ONE)]
    star = [[(idx[(b, a)], ONE)] for (a, b) in _M2_UNITS]
    pres = make_presentation(["n"], ["n.n = 0", "n.n* + n*.n = 1"], name="M2")
    n = pres.gen("n")
    ns = pres.gen("n", True)
    words = [n * ns, n, ns, ns * n]
    coords = {"n": (ZERO, ONE, ZERO, ZERO)}
    return FDCStar("matrix2", basis, mult, star, [ONE, ZERO, ZERO, ONE], pres, coords, words, 2)


def m2_unit_index(row: int, col: int) -> int:
    return _M2_UNITS.index((row, col))


# ---------------------------------------------------------------------------
# Quantum families of maps
# ---------------------------------------------------------------------------


class QuantumFamily:
    """A morphism ``Φ: M → M ⊗ R`` given on the generators of ``M``.

    ``images[g]`` is the coefficient tuple of ``Φ(g)`` over the basis of
    ``M``; ``labels`` is the presentation (or tensor presentation) of ``R``.
    """

    def __init__(self, space: FDCStar, labels, images: Mapping[str, Sequence]):
        self.space = space
        self.labels = labels
        self.images = {g: tuple(v) for g, v in images.items()}
        missing = set(space.presentation.alphabet.names) - set(self.images)
        if missing:
            raise ValueError(f"family lacks images for {sorted(missing)}")

    def ring_one(self):
        return self.labels.one()

    def reducer(self, cap=DEFAULT_CAP):
        if isinstance(self.labels, TensorPresentation):
            return self.labels.reducer(cap)
        return TensorReducer([self.labels.system(cap)])

    def generator_elements(self, reduce=None) -> dict:
        zero = self.ring_one() * 0
        return {g: MTensor(self.space, v, zero, reduce) for g, v in self.images.items()}

    def letter_images(self, reduce=None) -> dict:
        alph = self.space.presentation.alphabet
        out = {}
        for g, el in self.generator_elements(reduce).items():
            k = alph.index(g)
            out[2 * k] = el
            if not alph.self_adjoint[k]:
                out[2 * k + 1] = el.star()
        return out

    def apply(self, m: NCPoly, reduce=None) -> MTensor:
        """Φ on an element of ``M`` written in ``M``'s generators."""
        one = self.space.embed(self.space.unit, self.ring_one())
        one.reduce_fn = reduce
        return evaluate(m, self.letter_images(reduce), one, None)

    def on_basis(self, reduce=None) -> list:
        return [self.apply(w, reduce) for w in self.space.basis_words]


def trivial_family(space: FDCStar, labels: Presentation) -> QuantumFamily:
    one = labels.one()
    return QuantumFamily(space, labels, {g: tuple(one * c for c in v) for g, v in space.gen_coords.items()})


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""
    residues: list = field(default_factory=list)


@dataclass
class Report:
    title: str = ""
    checks: list = field(default_factory=list)

    def add(self, name, status, detail="", residues=()):
        self.checks.append(Check(name, status, detail, [_text(r) for r in residues]))

    def extend(self, other: "Report"):
        self.checks.extend(other.checks)
        return self

    @property
    def status(self) -> str:
        st = {c.status for c in self.checks}
        if FAIL in st:
            return FAIL
        if INCONCLUSIVE in st:
            return INCONCLUSIVE
        return PASS

    @property
    def ok(self) -> bool:
        return self.status == PASS

    @property
    def exit_code(self) -> int:
        return {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}[self.status]

    def render(self) -> str:
        lines = [f"# {self.title}"] if self.title else []
        for c in self.checks:
            line = f"{c.status} {c.name}"
            if c.detail:
                line += f": {c.detail}"
            lines.append(line)
            for r in c.residues:
                lines.append(f"    residue {r}")
        lines.append(f"RESULT {self.status}")
        return "\n".join(lines) + "\n"

    def machine(self) -> str:
        lines = []
        if self.title:
            lines.append(f"title={self.title}")
        for c in self.checks:
            lines.append(f"check.{c.name}={c.status}")
            if c.detail:
                lines.append(f"detail.{c.name}={c.detail}")
            for k, r in enumerate(c.residues):
                lines.append(f"residue.{c.name}.{k}={r}")
        lines.append(f"result={self.status}")
        return "\n".join(lines) + "\n"


def _text(x) -> str:
    if isinstance(x, MTensor):
        return "[" + ", ".join(_text(a) for a in x.coeffs) + "]"
    if isinstance(x, Scalar):
        return x.text()
    if hasattr(x, "text"):
        return x.text()
    return str(x)


# ---------------------------------------------------------------------------
# Quantum semigroups
# ---------------------------------------------------------------------------


class QuantumSemigroup:
    """Presentation with comultiplication, counit and optional action.

    ``defined_by_action`` marks algebras whose relations are exactly the
    relations of ``M`` evaluated on the action matrix; their comultiplication
    is then checked at matrix level.
    """

    def __init__(
        self,
        algebra: Presentation,
        delta: Mapping[str, object],
        counit: Mapping[str, object],
        action: QuantumFamily | None = None,
        name: str = "",
        defined_by_action: bool = False,
    ):
        self.algebra = algebra
        self.name = name or algebra.name
        self.tensor2 = tensor(algebra, algebra)
        self.tensor3 = tensor(algebra, algebra, algebra)
        self.delta = GeneratorMap(algebra, self.tensor2, delta, name="delta")
        self.counit = GeneratorMap(algebra, SCALARS, counit, name="counit")
        self.action = action
        self.defined_by_action = defined_by_action
        self.report: Report | None = None

    def gen(self, name, starred=False):
        return self.algebra.gen(name, starred)

    def with_algebra(self, algebra: Presentation, name: str = "") -> "QuantumSemigroup":
        """Same structure maps over a quotient with the same alphabet."""
        action = None
        if self.action is not None:
            action = QuantumFamily(self.action.space, algebra, self.action.images)
        return QuantumSemigroup(
            algebra, self.delta.images, self.counit.images, action, name or algebra.name, self.defined_by_action
        )

    def delta_of(self, p: NCPoly, cap=DEFAULT_CAP, reducer=None) -> TensorPoly:
        return self.delta.apply(p, cap, reducer or self.tensor2.reducer(cap))

    def counit_of(self, p: NCPoly) -> Scalar:
        return self.counit.apply(p)


def _word_cache(fn):
    cache = {}

    def get(w):
        v = cache.get(w)
        if v is None:
            v = fn(w)
            cache[w] = v
        return v

    return get


def _morphism_check(report: Report, name: str, f: GeneratorMap, cap: int):
    res = check_morphism(f, cap)
    if res.verified:
        report.add(name, PASS, f"{len(f.source.relations)} relations map to 0")
    else:
        st = FAIL if res.status == "Violations" else INCONCLUSIVE
        report.add(
            name,
            st,
            f"{len(res.violations)} relation images nonzero"
            + ("" if f.target == SCALARS or _finite(f) else " (at cap)"),
            [f"{_text(r)} |-> {_text(v)}" for r, v in res.violations],
        )


def _finite(f: GeneratorMap) -> bool:
    try:
        return all(x.system().finite_basis for x in f.target.factors)
    except AttributeError:
        return f.target.system().finite_basis


def _m_relations_check(report, name, family: QuantumFamily, reducer, one_ring):
    """M's defining relations (and self-adjointness) on the family's images."""
    space = family.space
    letters = family.letter_images(reducer)
    unit = space.embed(space.unit, one_ring)
    unit.reduce_fn = reducer
    bad = []
    for r in space.presentation.relations:
        val = evaluate(r, letters, unit, None)
        val = val.map(reducer) if reducer is not None else val
        if not val.is_zero():
            bad.append(f"{r.text()} |-> {_text(val)}")
    alph = space.presentation.alphabet
    for g, sa in zip(alph.names, alph.self_adjoint):
        if sa:
            el = letters[2 * alph.index(g)]
            diff = (el - el.star())
            diff = diff.map(reducer) if reducer is not None else diff
            if not diff.is_zero():
                bad.append(f"{g}* - {g} |-> {_text(diff)}")
    overflow = getattr(reducer, "overflow", False)
    if not bad:
        report.add(name, PASS, f"{len(space.presentation.relations)} relations of {space.descriptor()} hold")
    else:
        report.add(name, INCONCLUSIVE if overflow else FAIL, f"{len(bad)} matrix relations violated", bad)


def verify_comultiplication(S: QuantumSemigroup, cap: int = DEFAULT_CAP, matrix_level: bool | None = None) -> Report:
    report = Report(f"comultiplication of {S.name}")
    if matrix_level is None:
        matrix_level = S.defined_by_action and S.action is not None
    if not matrix_level:
        _morphism_check(report, "delta.homomorphism", S.delta, cap)
        return report
    # (id ⊗ Δ)Φ must satisfy M's relations in M ⊗ A ⊗ A
    red = S.tensor2.reducer(cap)
    dmap = {}
    for g, coeffs in S.action.images.items():
        dmap[g] = tuple(S.delta.apply(c, cap, red) for c in coeffs)
    fam = QuantumFamily(S.action.space, S.tensor2, dmap)
    _m_relations_check(report, "delta.matrix_relations", fam, red, S.tensor2.one())
    # self-adjoint generators are a relation of their own: Δ(g)* = Δ(g)
    bad = []
    for g, sa in S.algebra.generators:
        if sa:
            d = S.delta.images[g]
            diff = red(d - d.star())
            if diff:
                bad.append(f"{g}: {diff.text()}")
    if any(sa for _, sa in S.algebra.generators):
        report.add("delta.self_adjoint", PASS if not bad else FAIL, "Δ(g)* = Δ(g) for self-adjoint g", bad)
    return report


def verify_coassociativity(S: QuantumSemigroup, cap: int = DEFAULT_CAP) -> Report:
    report = Report(f"coassociativity of {S.name}")
    red2 = S.tensor2.reducer(cap)
    red3 = S.tensor3.reducer(cap)
    dword = _word_cache(lambda w: S.delta.apply_word(w, red2))
    bad = []
    for g in S.algebra.alphabet.names:
        d = S.delta.apply(S.gen(g), cap, red2)
        left = red3(d.expand_leg(0, dword))
        right = red3(d.expand_leg(1, dword))
        diff = left - right
        if diff:
            bad.append(f"{g}: {diff.text()}")
    if not bad:
        report.add("delta.coassociative", PASS, "(Δ⊗id)Δ = (id⊗Δ)Δ on generators")
    else:
        report.add("delta.coassociative", INCONCLUSIVE if red3.overflow else FAIL, f"{len(bad)} generators differ", bad)
    return report


def verify_counit(S: QuantumSemigroup, cap: int = DEFAULT_CAP) -> Report:
    report = Report(f"counit of {S.name}")
    _morphism_check(report, "counit.homomorphism", S.counit, cap)
    red2 = S.tensor2.reducer(cap)
    red1 = TensorReducer([S.algebra.system(cap)])
    eword = _word_cache(lambda w: S.counit.apply_word(w))
    for side, leg in (("left", 0), ("right", 1)):
        bad = []
        for g in S.algebra.alphabet.names:
            d = S.delta.apply(S.gen(g), cap, red2)
            val = d.contract_leg(leg, eword)
            diff = red1(val - S.gen(g))
            if diff:
                bad.append(f"{g}: {diff.text()}")
        name = f"counit.{side}_law"
        law = "(ε⊗id)Δ = id" if leg == 0 else "(id⊗ε)Δ = id"
        if not bad:
            report.add(name, PASS, law)
        else:
            report.add(name, INCONCLUSIVE if red1.overflow else FAIL, law, bad)
    return report


def verify_action(S: QuantumSemigroup, family: QuantumFamily | None = None, cap: int = DEFAULT_CAP) -> Report:
    """Relations of M on Φ, (Φ⊗id)Φ = (id⊗Δ)Φ and (id⊗ε)Φ = id."""
    family = family or S.action
    report = Report(f"action of {S.name}")
    if family is None:
        report.add("action", PASS, "no action installed")
        return report
    space = family.space
    red1 = TensorReducer([S.algebra.system(cap)])
    _m_relations_check(report, "action.relations", family, red1, S.algebra.one())

    red2 = S.tensor2.reducer(cap)
    on_basis = family.on_basis(red1)
    bad = []
    for g, coeffs in family.images.items():
        for c in range(space.dim):
            lhs = TensorPoly.zero(S.tensor2.legs)
            for b, x in enumerate(coeffs):
                if x:
                    lhs = lhs + TensorPoly.pure(_as_poly(on_basis[b].coeffs[c], S), _as_poly(x, S))
            rhs = S.delta.apply(_as_poly(coeffs[c], S), cap, red2)
            diff = red2(lhs) - rhs
            if diff:
                bad.append(f"{g}[{space.basis[c]}]: {diff.text()}")
    if not bad:
        report.add("action.compatible", PASS, "(Φ⊗id)Φ = (id⊗Δ)Φ")
    else:
        report.add("action.compatible", INCONCLUSIVE if red2.overflow else FAIL, "(Φ⊗id)Φ = (id⊗Δ)Φ", bad)

    bad = []
    for g, coeffs in family.images.items():
        got = [S.counit.apply(_as_poly(x, S)) for x in coeffs]
        want = list(space.gen_coords[g])
        if got != want:
            bad.append(f"{g}: {[s.text() for s in got]} != {[s.text() for s in want]}")
    report.add("action.counit", PASS if not bad else FAIL, "(id⊗ε)Φ = id", bad)
    return report


def _as_poly(x, S):
    if isinstance(x, NCPoly):
        return x
    return NCPoly.constant(S.algebra.alphabet, x)


def verify_all(S: QuantumSemigroup, cap: int = DEFAULT_CAP) -> Report:
    report = Report(f"quantum semigroup {S.name} at cap {cap}")
    rs = S.algebra.system(cap)
    report.add(
        "algebra.completion",
        PASS,
        f"{len(rs)} rules" + (", finite basis" if rs.finite_basis else f", {rs.skipped_overlaps} overlaps beyond cap"),
    )
    for part in (verify_comultiplication, verify_coassociativity, verify_counit):
        report.extend(part(S, cap))
    if S.action is not None:
        report.extend(verify_action(S, None, cap))
    S.report = report
    return report
