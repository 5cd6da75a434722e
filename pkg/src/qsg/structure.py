"""Structural questions about presented algebras.

Commutativity, finite linear bases, recognition of function algebras on
finite groups, abelianization with real character systems, and the fixed
catalog of added-relation scenarios for the commutant of φ.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .ncpoly import I, ONE, ZERO, NCPoly, Scalar, TensorPoly
from .presentation import Presentation, quotient
from .rewrite import DEFAULT_CAP, DegreeOverflow
from .semigroup import QuantumSemigroup

# ---------------------------------------------------------------------------
# Commutativity and bases
# ---------------------------------------------------------------------------


@dataclass
class Commutativity:
    status: str  # Yes | Unknown
    residues: list = field(default_factory=list)  # (letter pair text, residue)
    note: str = ""

    @property
    def yes(self) -> bool:
        return self.status == "Yes"


def is_commutative(P: Presentation, cap: int = DEFAULT_CAP) -> Commutativity:
    """Yes iff every commutator of letters (generators and their stars) reduces to 0."""
    rs = P.system(cap, allow_inconsistent=True)
    if rs.inconsistent:
        return Commutativity("Yes", note="the algebra is zero (its ideal contains 1)")
    alph = P.alphabet
    letters = alph.letters()
    residues = []
    for k, x in enumerate(letters):
        for y in letters[k + 1:]:
            px = NCPoly(alph, {(x,): ONE}, _trusted=True)
            py = NCPoly(alph, {(y,): ONE}, _trusted=True)
            r = rs.reduce(px * py - py * px)
            if r:
                residues.append((f"[{alph.letter_name(x)}, {alph.letter_name(y)}]", r))
    if residues:
        return Commutativity("Unknown", residues)
    return Commutativity("Yes")


def basis_up_to(P: Presentation, D: int, cap: int | None = None) -> tuple:
    """Irreducible words of degree <= D and whether the count has stabilized.

    Stabilized means no irreducible word has degree D; since subwords of
    irreducible words are irreducible, no longer word is irreducible either.
    """
    rs = P.system(cap if cap is not None else max(D, DEFAULT_CAP), allow_inconsistent=True)
    if rs.inconsistent:
        return [], True
    letters = P.alphabet.letters()
    words = [()]
    layer = [()]
    for _ in range(D):
        nxt = []
        for w in layer:
            for x in letters:
                v = w + (x,)
                if rs.is_irreducible(v):
                    nxt.append(v)
        words.extend(nxt)
        layer = nxt
        if not layer:
            break
    stabilized = not layer or D == 0 and not letters
    return words, bool(stabilized)


# ---------------------------------------------------------------------------
# Finite groups
# ---------------------------------------------------------------------------


class NotIdempotentBasis(ValueError):
    pass


@dataclass
class GroupTable:
    labels: list
    table: list  # table[j][k] = index of labels[j] * labels[k]
    identity: int

    @property
    def order(self) -> int:
        return len(self.labels)

    def is_associative(self) -> bool:
        t, n = self.table, self.order
        return all(t[t[a][b]][c] == t[a][t[b][c]] for a in range(n) for b in range(n) for c in range(n))

    def has_inverses(self) -> bool:
        e = self.identity
        return all(any(self.table[a][b] == e and self.table[b][a] == e for b in range(self.order)) for a in range(self.order))

    def is_identity(self, e: int) -> bool:
        return all(self.table[e][a] == a and self.table[a][e] == a for a in range(self.order))

    def is_abelian(self) -> bool:
        return all(self.table[a][b] == self.table[b][a] for a in range(self.order) for b in range(self.order))

    def element_order(self, a: int) -> int:
        x, k = a, 1
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def is_cyclic(self) -> bool:
        return any(self.element_order(a) == self.order for a in range(self.order))

    def matches_cyclic_labels(self) -> bool:
        """``labels[p] * labels[q] = labels[p + q mod n]`` (delta at p for label p)."""
        n = self.order
        return all(self.table[p][q] == (p + q) % n for p in range(n) for q in range(n))

    def name(self) -> str:
        if self.order == 1:
            return "trivial group"
        if self.is_cyclic():
            return f"Z_{self.order}"
        return f"{'abelian' if self.is_abelian() else 'nonabelian'} group of order {self.order}"

    def text(self) -> str:
        w = max(len(x) for x in self.labels)
        head = " " * (w + 3) + " ".join(x.rjust(w) for x in self.labels)
        rows = [head]
        for j, x in enumerate(self.labels):
            rows.append(x.rjust(w) + " | " + " ".join(self.labels[k].rjust(w) for k in self.table[j]))
        return "\n".join(rows)


def idempotent_basis(S: QuantumSemigroup, cap: int = DEFAULT_CAP):
    """Pairwise orthogonal idempotents summing to 1 that span the algebra.

    Taken from a partition closure of the presentation; returns
    ``(labels, elements)``.
    """
    P = S.algebra
    rs = P.system(cap)
    words, stable = basis_up_to(P, cap, cap)
    if not stable:
        raise NotIdempotentBasis("no finite linear basis up to the cap")
    dim = len(words)
    if dim == 1:
        return ["1"], [P.one()]
    for c in P.closures:
        elems, labels = [], []
        for m in c.members:
            x = rs.reduce(P.gen(m))
            if x and x not in elems:
                elems.append(x)
                labels.append(m)
        if len(elems) != dim:
            continue
        ok = all(
            rs.reduce(a * b) == (a if i == j else 0) for i, a in enumerate(elems) for j, b in enumerate(elems)
        )
        total = NCPoly.zero(P.alphabet)
        for a in elems:
            total = total + a
        if ok and rs.reduce(total) == P.one():
            return labels, elems
    raise NotIdempotentBasis(f"no partition closure gives {dim} orthogonal idempotents")


def recognize_finite_group(S: QuantumSemigroup, cap: int = DEFAULT_CAP) -> GroupTable | None:
    """Read a group law from ``Δ(e_i) = Σ_{jk = i} e_j ⊗ e_k`` on an idempotent basis.

    Returns None when the coproduct is not of that form or the table is not
    a group whose identity is picked by the counit.
    """
    if not is_commutative(S.algebra, cap).yes:
        raise NotIdempotentBasis("the algebra is not known to be commutative")
    labels, elems = idempotent_basis(S, cap)
    n = len(elems)
    red = S.tensor2.reducer(cap)
    pure = [[red(TensorPoly.pure(a, b)) for b in elems] for a in elems]
    table = [[None] * n for _ in range(n)]
    for i, x in enumerate(elems):
        d = S.delta_of(x, cap, red)
        rebuilt = TensorPoly.zero(S.tensor2.legs)
        for j in range(n):
            for k in range(n):
                prod = red(pure[j][k] * d)
                if not prod:
                    continue
                c = _ratio(prod, pure[j][k])
                if c is None or c != ONE:
                    return None
                if table[j][k] is not None:
                    return None
                table[j][k] = i
                rebuilt = rebuilt + pure[j][k]
        if red(rebuilt - d):
            return None
    if any(v is None for row in table for v in row):
        return None
    units = [i for i, x in enumerate(elems) if S.counit_of(x) == ONE]
    zeros = [i for i, x in enumerate(elems) if S.counit_of(x) == ZERO]
    if len(units) != 1 or len(zeros) != n - 1:
        return None
    g = GroupTable(labels, table, units[0])
    if not (g.is_identity(g.identity) and g.is_associative() and g.has_inverses()):
        return None
    return g


def _ratio(t: TensorPoly, base: TensorPoly):
    """``c`` with ``t = c * base``, or None."""
    if not base:
        return None
    key = next(iter(base.terms))
    c = t.terms.get(key, ZERO) / base.terms[key]
    return c if t == base.scale(c) else None


# ---------------------------------------------------------------------------
# Commutative real polynomials for character systems
# ---------------------------------------------------------------------------


class RealPoly:
    """Commutative polynomial with Gaussian-rational coefficients.

    Terms map exponent tuples (one entry per variable) to Scalars.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars_, terms=None):
        self.vars = tuple(vars_)
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def const(cls, vars_, c) -> "RealPoly":
        return cls(vars_, {(0,) * len(vars_): Scalar.coerce(c)})

    @classmethod
    def var(cls, vars_, name) -> "RealPoly":
        e = [0] * len(vars_)
        e[vars_.index(name)] = 1
        return cls(vars_, {tuple(e): ONE})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return RealPoly(self.vars, out)

    def __sub__(self, other):
        return self + other.scale(-ONE)

    def scale(self, c) -> "RealPoly":
        c = Scalar.coerce(c)
        return RealPoly(self.vars, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        out: dict = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                k = tuple(p + q for p, q in zip(a, b))
                out[k] = out.get(k, ZERO) + x * y
        return RealPoly(self.vars, out)

    def real_part(self) -> "RealPoly":
        return RealPoly(self.vars, {k: Scalar(v.re) for k, v in self.terms.items()})

    def imag_part(self) -> "RealPoly":
        return RealPoly(self.vars, {k: Scalar(v.im) for k, v in self.terms.items()})

    def __bool__(self):
        return bool(self.terms)

    def is_real(self) -> bool:
        return all(v.is_real() for v in self.terms.values())

    def evaluate(self, values: dict):
        """Exact for Fraction values, floating for floats."""
        total = 0
        xs = [values[v] for v in self.vars]
        for k, c in self.terms.items():
            term = c.re if not c.im else complex(c)
            if isinstance(term, Fraction) and any(isinstance(x, float) for x in xs):
                term = float(term)
            for x, e in zip(xs, k):
                if e:
                    term = term * x**e
            total = total + term
        return total

    def monic_key(self):
        k = max(self.terms)
        c = self.terms[k]
        return frozenset((e, v / c) for e, v in self.terms.items())

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
            c = self.terms[k]
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in zip(self.vars, k) if e)
            if c.is_real():
                neg = c.re < 0
                mag = -c.re if neg else c.re
                coef = "" if mag == 1 and mono else _ftext(mag) + ("*" if mono else "")
            else:
                neg, coef = False, f"({c.text()})" + ("*" if mono else "")
            body = coef + mono
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)


def _ftext(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


@dataclass
class CharacterSystem:
    """Real polynomial equations whose solutions are the characters."""

    variables: tuple
    equations: list  # RealPoly, each meaning "= 0"
    generator_values: dict  # generator name -> (re var, im var or None)

    def residual(self, values: dict) -> float:
        """Max absolute equation value (exact zero stays exactly 0)."""
        best = 0
        for eq in self.equations:
            v = abs(eq.evaluate(values))
            if v > best:
                best = v
        return best

    def point_from_generators(self, gen_values: dict) -> dict:
        """Variable assignment from complex (or Scalar) generator values."""
        out = {}
        for g, (re_var, im_var) in self.generator_values.items():
            z = gen_values[g]
            if isinstance(z, Scalar):
                re, im = z.re, z.im
            else:
                z = complex(z)
                re, im = z.real, z.imag
            out[re_var] = re
            if im_var is not None:
                out[im_var] = im
        return out

    def text(self) -> str:
        head = "# variables: " + ", ".join(self.variables)
        return "\n".join([head] + [f"{e.text()} = 0" for e in self.equations]) + "\n"


def abelianize(P: Presentation, cap: int = DEFAULT_CAP) -> tuple:
    """Commutative quotient and the real character system of ``P``."""
    alph = P.alphabet
    letters = alph.letters()
    comms = []
    for k, x in enumerate(letters):
        for y in letters[k + 1:]:
            px = NCPoly(alph, {(x,): ONE}, _trusted=True)
            py = NCPoly(alph, {(y,): ONE}, _trusted=True)
            comms.append(px * py - py * px)
    Q = quotient(P, comms, f"{P.name} abelianized" if P.name else "", origin="abelianization")

    variables, gen_vars = [], {}
    for g, sa in P.generators:
        variables.append(f"{g}_re")
        if not sa:
            variables.append(f"{g}_im")
        gen_vars[g] = (f"{g}_re", None if sa else f"{g}_im")
    variables = tuple(variables)
    images = {}
    for g, sa in P.generators:
        k = alph.index(g)
        x = RealPoly.var(variables, f"{g}_re")
        if sa:
            images[2 * k] = x
        else:
            y = RealPoly.var(variables, f"{g}_im")
            images[2 * k] = x + y.scale(I)
            images[2 * k + 1] = x - y.scale(I)
    eqs, seen = [], set()
    for r in P.relations:
        val = RealPoly(variables)
        for w, c in r.terms.items():
            term = RealPoly.const(variables, c)
            for x in w:
                term = term * images[x]
            val = val + term
        for part in (val.real_part(), val.imag_part()):
            if part:
                key = part.monic_key()
                if key not in seen:
                    seen.add(key)
                    eqs.append(part)
    return Q, CharacterSystem(variables, eqs, gen_vars)


class UnknownParametrization(KeyError):
    pass


def _circle_point(m: Fraction) -> tuple:
    """Rational point ``((1 - m²)/(1 + m²), 2m/(1 + m²))`` of the unit circle."""
    d = 1 + m * m
    return (1 - m * m) / d, 2 * m / d


def two_circle_point(s: int, c, d) -> dict:
    """Character of the φ-commutant on the circle ``β + γ = s``.

    ``(c, d)`` is a point of the unit circle: ``β − γ = c``, ``2t = d``, ``α = i t``.
    """
    half = Fraction(1, 2) if isinstance(c, Fraction) else 0.5
    t = d * half
    return {"alpha": (0 * t, t), "beta": ((s + c) * half, 0 * t), "gamma": ((s - c) * half, 0 * t)}


def _two_circle(rng: random.Random, exact: bool) -> dict:
    s = rng.choice((1, -1))
    if exact:
        m = Fraction(rng.randint(-10**4, 10**4), rng.randint(1, 10**4))
        c, d = _circle_point(m)
    else:
        th = rng.uniform(0, 2 * math.pi)
        c, d = math.cos(th), math.sin(th)
    return two_circle_point(s, c, d)


PARAMETRIZATIONS: dict = {"two-circle": _two_circle}


def check_parametrized_solution(
    sys: CharacterSystem,
    param="two-circle",
    samples: int = 1000,
    seed: int = 0,
    exact: bool = True,
    perturb: float = 0.0,
    points: list | None = None,
):
    """Largest equation residual over sampled points of a parametrized curve.

    ``param`` is a built-in name or a callable ``(rng, exact) -> {gen: (re, im)}``.
    With ``perturb > 0`` every coordinate is shifted by a uniform amount of
    that size (floating evaluation).  ``points`` collects the sampled values.
    """
    if isinstance(param, str):
        try:
            fn = PARAMETRIZATIONS[param]
        except KeyError:
            raise UnknownParametrization(param) from None
    else:
        fn = param
    rng = random.Random(seed)
    worst = 0
    for _ in range(samples):
        pt = fn(rng, exact and not perturb)
        values = {}
        for g, (re_var, im_var) in sys.generator_values.items():
            re, im = pt[g]
            if perturb:
                re = float(re) + rng.uniform(-perturb, perturb)
                im = float(im) + (rng.uniform(-perturb, perturb) if im_var else 0.0)
            values[re_var] = re
            if im_var is not None:
                values[im_var] = im
        if points is not None:
            points.append(values)
        r = sys.residual(values)
        if r > worst:
            worst = r
    return worst


def distance_to_two_circles(beta: float, gamma: float, alpha: complex) -> float:
    """Euclidean distance in (Re α, Im α, β, γ) to the two-circle set."""
    best = math.inf
    for s in (1, -1):
        # nearest point of {β+γ = s, (β−γ)² + 4 t² = 1, Re α = 0, Im α = t}
        u, v = beta - gamma, 2 * alpha.imag
        r = math.hypot(u, v)
        c, d = (u / r, v / r) if r > 0 else (1.0, 0.0)
        pt = two_circle_point(s, c, d)
        diff = [
            alpha.real - pt["alpha"][0],
            alpha.imag - pt["alpha"][1],
            beta - pt["beta"][0],
            gamma - pt["gamma"][0],
        ]
        best = min(best, math.sqrt(sum(x * x for x in diff)))
    return best


# ---------------------------------------------------------------------------
# Scenario catalog for the commutant of φ
# ---------------------------------------------------------------------------

SELF_ADJOINT_NILPOTENT_NOTE = (
    "a self-adjoint element with square 0 vanishes in a C*-algebra (|x|^2 = |x*x| = |x^2|)"
)


@dataclass
class ScenarioResult:
    name: str
    presentation: Presentation
    checks: list = field(default_factory=list)  # (label, ok, detail)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def check(self, label: str) -> bool:
        for lab, ok, _ in self.checks:
            if lab == label:
                return ok
        raise KeyError(label)

    def lines(self) -> list:
        out = [f"scenario {self.name}"]
        out += [f"note: {n}" for n in self.notes]
        for label, ok, detail in self.checks:
            out.append(f"{label}{'' if ok else ' FAILED'}" + (f"  [{detail}]" if detail else ""))
        return out


def _nf_line(rs, p: NCPoly, label: str):
    try:
        r = rs.reduce(p) if not rs.inconsistent else NCPoly.zero(p.alphabet)
    except DegreeOverflow as e:  # pragma: no cover - reduce does not raise
        return (f"nf({label}) inconclusive", False, str(e))
    if not r:
        return (f"nf({label}) = 0", True, "")
    return (f"nf({label}) = {r.text()}", False, "nonzero at cap")


def _commutative_line(P, cap):
    c = is_commutative(P, cap)
    if c.yes:
        return ("commutative: yes", True, c.note)
    return ("commutative: unknown", False, "; ".join(f"{a} -> {r.text()}" for a, r in c.residues[:4]))


SCENARIOS = ("y-central", "y2-is-1", "reduced")


def run_scenario(name: str, cap: int = DEFAULT_CAP) -> ScenarioResult:
    """Added-relation scenarios for the commutant of φ (X = α + α*, Y = β + γ)."""
    from .builtins import m2_commutant_phi

    S = m2_commutant_phi()
    P = S.algebra
    a, b, g = P.gen("alpha"), P.gen("beta"), P.gen("gamma")
    X, Y = a + a.star(), b + g
    if name == "y-central":
        Q = quotient(P, [X * Y - Y * X], "A + [X, Y] = 0", origin="scenario")
        rs = Q.system(cap, allow_inconsistent=True)
        res = ScenarioResult(name, Q)
        res.checks.append(_nf_line(rs, X * Y, "X.Y"))
        res.checks.append(_nf_line(rs, Y**3 - Y, "Y^3 - Y"))
        res.checks.append(_nf_line(rs, Y**4 - Y**2, "(Y^2)^2 - Y^2"))
        return res
    if name == "y2-is-1":
        Q = quotient(P, [Y * Y - 1], "A + Y^2 = 1", origin="scenario")
        rs = Q.system(cap, allow_inconsistent=True)
        res = ScenarioResult(name, Q)
        sa = _nf_line(rs, X - X.star(), "X - X*")
        sq = _nf_line(rs, X * X, "X^2")
        res.checks += [sa, sq]
        direct = rs.reduce(X)
        if direct and sa[1] and sq[1]:
            # the step X^2 = 0 => X = 0 needs the C*-norm; record it as a closure
            res.notes.append(f"X added as a relation: {SELF_ADJOINT_NILPOTENT_NOTE}")
            Q = quotient(Q, [X], "A + Y^2 = 1 + X = 0", origin=f"closure:{SELF_ADJOINT_NILPOTENT_NOTE}")
            rs = Q.system(cap, allow_inconsistent=True)
            res.presentation = Q
        res.checks.append(_nf_line(rs, X, "X"))
        res.checks.append(_commutative_line(Q, cap))
        t = a.scale(-I)  # α = i t
        res.checks.append(_nf_line(rs, t * t * 2 + b * b + g * g - 1, "2t^2 + beta^2 + gamma^2 - 1"))
        res.checks.append(_nf_line(rs, t * t - b * g, "t^2 - beta.gamma"))
        return res
    if name == "reduced":
        Q = quotient(P, [a + a.star() - 1, b + g], "A + X = 1 + Y = 0", origin="scenario")
        rs = Q.system(cap, allow_inconsistent=True)
        res = ScenarioResult(name, Q)
        if rs.inconsistent:
            res.notes.append("the added relations put 1 in the ideal: the quotient is the zero algebra")
        res.checks.append(_commutative_line(Q, cap))
        return res
    raise KeyError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")


# ---------------------------------------------------------------------------
# Cyclic commutants and the n = 2 comparison
# ---------------------------------------------------------------------------


def cyclic_commutant(n: int, cap: int = DEFAULT_CAP):
    from .builtins import qmap_Xn
    from .commutant import PermFamily, build_commutant

    cyc = "(" + " ".join(str(k) for k in range(1, n + 1)) + ")" if n > 1 else "()"
    return build_commutant(qmap_Xn(n), PermFamily.of(n, [cyc]), cap)


def cyclic_delta_reference(S: QuantumSemigroup, n: int) -> dict:
    """``Δ(x_k) = Σ_p x_p ⊗ x_{k−p+1 mod n}`` with ``x_k = a_1k``."""
    from .builtins import entry_name

    x = [S.gen(entry_name(1, k, n)) for k in range(1, n + 1)]
    out = {}
    for k in range(1, n + 1):
        t = TensorPoly.zero(S.tensor2.legs)
        for p in range(1, n + 1):
            q = (k - p) % n + 1
            t = t + TensorPoly.pure(x[p - 1], x[q - 1])
        out[k] = t
    return out


def structure_lines(S: QuantumSemigroup, cap: int = DEFAULT_CAP) -> tuple:
    """Human-readable structure summary and the recognized group (or None)."""
    P = S.algebra
    words, stable = basis_up_to(P, cap, cap)
    comm = is_commutative(P, cap)
    shown = ", ".join(P.alphabet.word_text(w) for w in words[:12]) + (", ..." if len(words) > 12 else "")
    lines = [
        f"rewrite rules: {len(P.system(cap, allow_inconsistent=True))}",
        f"linear basis ({len(words)} words{', complete' if stable else ', not stabilized'}): {shown}",
        f"commutative: {'yes' if comm.yes else 'unknown'}",
    ]
    g = None
    if comm.yes and stable:
        try:
            g = recognize_finite_group(S, cap)
        except NotIdempotentBasis as e:
            lines.append(f"group: no idempotent basis ({e})")
        else:
            lines.append(f"group: {g.name()}" if g is not None else "group: coproduct is not of group type")
            if g is not None:
                lines.append(g.text())
    return lines, g


PUBLISHED_SMALL_CYCLIC = "trivial group"


def small_cyclic_report(cap: int = DEFAULT_CAP, result=None) -> list:
    """The n = 2 cyclic commutant computed here next to the published claim."""
    res = result or cyclic_commutant(2, cap)
    lines = ["commutant of the cyclic permutation (1 2) on X_2"]
    body, g = structure_lines(res.semigroup, cap)
    lines += body
    computed = g.name() if g is not None else "not recognized as a finite group"
    lines.append(f"published claim: {PUBLISHED_SMALL_CYCLIC}")
    verdict = "CONFIRMATION" if g is not None and g.order == 1 else "DISCREPANCY"
    lines.append(
        f"DISCREPANCY-OR-CONFIRMATION: {verdict} (engine: {computed}; published: {PUBLISHED_SMALL_CYCLIC})"
    )
    return lines
