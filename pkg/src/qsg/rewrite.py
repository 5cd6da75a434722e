"""Two-sided ideal reduction in free *-algebras.

Relations are oriented into rules ``lhs -> rhs`` under deglex and completed
by resolving overlap ambiguities (noncommutative Buchberger / diamond lemma)
up to a degree cap.  Rewriting never increases degree under deglex, so for
words of degree <= cap the normal form is strategy independent once every
overlap of combined degree <= cap resolves.

A nonzero normal form is only a statement about this cap: membership in the
ideal is semi-decidable and a residue is reported as inconclusive.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .ncpoly import ONE, Alphabet, NCPoly, Scalar, TensorPoly, Word, _accumulate, deglex_key

log = logging.getLogger(__name__)

DEFAULT_CAP = 8

COMPLETE = "CompleteUpToCap"
INCONSISTENT = "Inconsistent"


class InconsistentPresentation(ValueError):
    """The ideal contains the unit, so the algebra is zero."""


class DegreeOverflow(ValueError):
    """A polynomial exceeds the degree cap of the rewrite system."""


class CapExceeded(RuntimeError):
    """Completion ran out of its rule budget before resolving all overlaps."""


@dataclass(frozen=True)
class RewriteRule:
    lhs: Word
    rhs: NCPoly

    def as_poly(self) -> NCPoly:
        return NCPoly.monomial(self.rhs.alphabet, self.lhs) - self.rhs

    def text(self) -> str:
        return f"{self.rhs.alphabet.word_text(self.lhs)} -> {self.rhs.text()}"


@dataclass(frozen=True)
class ZeroResult:
    def __bool__(self):
        return True


@dataclass(frozen=True)
class NonzeroAtCap:
    residue: NCPoly

    def __bool__(self):
        return False


Zero = ZeroResult()


@dataclass
class RewriteSystem:
    alphabet: Alphabet
    rules: dict  # lhs word -> rhs terms (dict word -> Scalar)
    degree_cap: int
    status: str = COMPLETE
    # True when no overlap was skipped for exceeding the cap: the rule set is
    # then a genuine (finite) Groebner basis and residues certify non-membership.
    finite_basis: bool = True
    skipped_overlaps: int = 0
    presentation_hash: str = ""
    _lengths: tuple = field(default=(), repr=False)
    _nf_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._lengths = tuple(sorted({len(w) for w in self.rules}))

    # -- rule access --------------------------------------------------------
    def rule_list(self) -> list:
        return [
            RewriteRule(lhs, NCPoly(self.alphabet, dict(rhs), _trusted=True))
            for lhs, rhs in sorted(self.rules.items(), key=lambda kv: deglex_key(kv[0]))
        ]

    def __len__(self):
        return len(self.rules)

    @property
    def inconsistent(self) -> bool:
        return self.status == INCONSISTENT

    def find(self, w: Word, rightmost: bool = False):
        """Locate a reducible subword; return ``(position, lhs)`` or None."""
        rules = self.rules
        n = len(w)
        starts = range(n - 1, -1, -1) if rightmost else range(n)
        for i in starts:
            for L in self._lengths:
                if i + L > n:
                    break
                sub = w[i:i + L]
                if sub in rules:
                    return i, sub
        return None

    def is_irreducible(self, w: Word) -> bool:
        return self.find(w) is None

    # -- reduction ------------------------------------------------------------
    def _reduce_terms(self, terms: dict, rightmost=False, steps=None) -> dict:
        """Reduce by always rewriting the deglex-largest reducible word."""
        work = dict(terms)
        heap = [(-len(w), _neg(w), w) for w in work]
        heapq.heapify(heap)
        out: dict = {}
        rules = self.rules
        while heap:
            _, _, w = heapq.heappop(heap)
            c = work.pop(w, None)
            if c is None:
                continue
            hit = self.find(w, rightmost)
            if hit is None:
                out[w] = c
                continue
            i, lhs = hit
            left, right = w[:i], w[i + len(lhs):]
            if steps is not None:
                steps.append((c, left, lhs, right))
            for u, d in rules[lhs].items():
                v = left + u + right
                prev = work.get(v)
                if prev is None:
                    work[v] = c * d
                    heapq.heappush(heap, (-len(v), _neg(v), v))
                else:
                    s = prev + c * d
                    if s:
                        work[v] = s
                    else:
                        del work[v]
        return out

    def nf_word(self, w: Word) -> dict:
        cached = self._nf_cache.get(w)
        if cached is None:
            cached = self._reduce_terms({w: ONE})
            if len(self._nf_cache) < 500_000:
                self._nf_cache[w] = cached
        return cached

    def reduce_terms(self, terms: dict) -> dict:
        if self.status == INCONSISTENT:
            return {}
        out: dict = {}
        for w, c in terms.items():
            nf = self.nf_word(w)
            if len(nf) == 1 and w in nf:
                _accumulate(out, {w: c}, ONE)
            else:
                _accumulate(out, nf, c)
        return out

    def reduce(self, p: NCPoly) -> NCPoly:
        """Normal form without the degree-cap precondition check."""
        return NCPoly(p.alphabet, self.reduce_terms(p.terms), _trusted=True)


def _neg(w: Word):
    # heap is a min-heap; negate letters for descending deglex within a length
    return tuple(-c for c in w)


# ---------------------------------------------------------------------------
# Orientation
# ---------------------------------------------------------------------------


def star_closure(relations: Iterable[NCPoly]) -> list:
    out, seen = [], set()
    for r in relations:
        for q in (r, r.star()):
            if q.is_zero():
                continue
            key = q.monic()
            if key not in seen:
                seen.add(key)
                out.append(q)
    return out


def orient(relations: Sequence[NCPoly], order=None) -> list:
    """Turn relations into rules ``lhs -> lhs - r/lc(r)`` (star-closed).

    Rules are not inter-reduced here; ``complete`` does that.
    """
    rules = []
    for r in star_closure(relations):
        lhs, lc = r.leading_term(order)
        if not lhs:
            raise InconsistentPresentation(f"relation {r.text()} is a nonzero scalar")
        rhs = NCPoly.monomial(r.alphabet, lhs) - r.scale(lc.inverse())
        rules.append(RewriteRule(lhs, rhs))
    return rules


# ---------------------------------------------------------------------------
# Completion
# ---------------------------------------------------------------------------


def _overlaps(u: Word, v: Word):
    """Proper overlaps: suffix of ``u`` equal to a prefix of ``v``."""
    for k in range(1, min(len(u), len(v))):
        if u[len(u) - k:] == v[:k]:
            yield k


def _contains(w: Word, sub: Word) -> bool:
    n, m = len(w), len(sub)
    for i in range(n - m + 1):
        if w[i:i + m] == sub:
            return True
    return False


def complete(
    relations,
    degree_cap: int = DEFAULT_CAP,
    *,
    alphabet: Alphabet | None = None,
    allow_inconsistent: bool = False,
    max_rules: int = 50_000,
    presentation_hash: str = "",
) -> RewriteSystem:
    """Complete the relations of a presentation up to ``degree_cap``.

    ``relations`` may be a Presentation or a sequence of NCPoly.  Overlaps are
    processed in the order (combined degree, lhs pair, overlap length), so the
    output is deterministic.
    """
    if hasattr(relations, "relations"):
        presentation_hash = presentation_hash or relations.hash
        alphabet = relations.alphabet
        relations = relations.relations
    relations = list(relations)
    if alphabet is None:
        if not relations:
            raise ValueError("alphabet required for an empty relation list")
        alphabet = relations[0].alphabet
    if degree_cap < 1:
        raise ValueError("degree cap must be positive")

    rs = RewriteSystem(alphabet, {}, degree_cap, presentation_hash=presentation_hash)
    pending: list = []  # polys waiting to be reduced and inserted
    for r in star_closure(relations):
        pending.append(r.terms)
    heap: list = []
    skipped = 0

    def fail():
        if not allow_inconsistent:
            raise InconsistentPresentation("the ideal contains the unit")
        out = RewriteSystem(alphabet, {(): {}}, degree_cap, INCONSISTENT, True, 0, presentation_hash)
        return out

    def push_pairs(new_lhs):
        nonlocal skipped
        for other in list(rs.rules):
            pairs = [(new_lhs, other)] if other == new_lhs else [(new_lhs, other), (other, new_lhs)]
            for u, v in pairs:
                for k in _overlaps(u, v):
                    deg = len(u) + len(v) - k
                    if deg > degree_cap:
                        skipped += 1
                        continue
                    heapq.heappush(heap, (deg, u, v, k))

    def insert(terms) -> bool:
        """Reduce ``terms`` and add as a rule; False signals the unit."""
        red = rs._reduce_terms(terms)
        if not red:
            return True
        lhs = max(red, key=deglex_key)
        if not lhs:
            return False
        inv = red[lhs].inverse()
        rhs = {w: -(c * inv) for w, c in red.items() if w != lhs}
        # rules whose lhs now reduces are retired and re-queued
        for old in [w for w in rs.rules if _contains(w, lhs)]:
            old_rhs = rs.rules.pop(old)
            t = dict(old_rhs)
            t = {w: -c for w, c in t.items()}
            t[old] = ONE
            pending.append(t)
        rs.rules[lhs] = rhs
        rs._lengths = tuple(sorted({len(w) for w in rs.rules}))
        push_pairs(lhs)
        if len(rs.rules) > max_rules:
            raise CapExceeded(f"more than {max_rules} rules at cap {degree_cap}")
        return True

    def drain() -> bool:
        while pending:
            # smallest first keeps the retire/re-queue churn low
            pending.sort(key=lambda t: deglex_key(max(t, key=deglex_key)) if t else (0, ()), reverse=True)
            t = pending.pop()
            if not insert(t):
                return False
        return True

    if not drain():
        return fail()
    while heap:
        deg, u, v, k = heapq.heappop(heap)
        if u not in rs.rules or v not in rs.rules:
            continue
        a, b = u[: len(u) - k], v[k:]
        # S = (u - rhs_u) b - a (v - rhs_v) = a rhs_v - rhs_u b
        s: dict = {}
        _accumulate(s, {a + w: c for w, c in rs.rules[v].items()}, ONE)
        _accumulate(s, {w + b: c for w, c in rs.rules[u].items()}, -ONE)
        if s:
            pending.append(s)
            if not drain():
                return fail()

    # final inter-reduction of right-hand sides
    for lhs in sorted(rs.rules, key=deglex_key):
        rhs = rs.rules[lhs]
        rs.rules[lhs] = rs._reduce_terms(rhs)
    rs._nf_cache.clear()
    rs.skipped_overlaps = skipped
    rs.finite_basis = skipped == 0
    log.debug("completion: %d rules, %d overlaps beyond cap %d", len(rs.rules), skipped, degree_cap)
    return rs


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------


def normal_form(rs: RewriteSystem, p: NCPoly, strategy: str = "leftmost") -> NCPoly:
    """Irreducible representative of ``p`` modulo the ideal.

    ``strategy`` picks the occurrence rewritten at each step: ``leftmost``
    (memoized) or ``rightmost``.  Raises DegreeOverflow above the cap.
    """
    if p.degree() > rs.degree_cap:
        raise DegreeOverflow(f"degree {p.degree()} exceeds cap {rs.degree_cap}")
    if rs.inconsistent:
        return NCPoly.zero(p.alphabet)
    if strategy == "leftmost":
        return rs.reduce(p)
    if strategy == "rightmost":
        return NCPoly(p.alphabet, rs._reduce_terms(p.terms, rightmost=True), _trusted=True)
    raise ValueError(f"unknown strategy {strategy!r}")


def normal_form_with_log(rs: RewriteSystem, p: NCPoly):
    """Normal form plus the list of steps ``(coeff, left, lhs, right)``."""
    if p.degree() > rs.degree_cap:
        raise DegreeOverflow(f"degree {p.degree()} exceeds cap {rs.degree_cap}")
    steps: list = []
    out = rs._reduce_terms(p.terms, steps=steps)
    return NCPoly(p.alphabet, out, _trusted=True), steps


def replay(rs: RewriteSystem, p: NCPoly, steps) -> NCPoly:
    """Re-derive a normal form by subtracting the logged ideal multiples."""
    acc = dict(p.terms)
    for c, left, lhs, right in steps:
        m = {left + lhs + right: ONE}
        for w, d in rs.rules[lhs].items():
            _accumulate(m, {left + w + right: -d}, ONE)
        _accumulate(acc, m, -c)
    return NCPoly(p.alphabet, acc, _trusted=True)


def is_zero_mod_ideal(rs: RewriteSystem, p: NCPoly):
    """``Zero`` when ``p`` reduces to 0, else ``NonzeroAtCap(residue)``.

    Above the cap a zero reduction is still a valid membership proof; a
    nonzero one raises DegreeOverflow.
    """
    if rs.inconsistent:
        return Zero
    nf = rs.reduce(p)
    if nf.is_zero():
        return Zero
    if p.degree() > rs.degree_cap:
        raise DegreeOverflow(f"degree {p.degree()} exceeds cap {rs.degree_cap}")
    return NonzeroAtCap(nf)


class TensorReducer:
    """Leg-wise normal forms in a tensor product of presented algebras."""

    def __init__(self, systems: Sequence[RewriteSystem]):
        self.systems = tuple(systems)
        self.legs = tuple(s.alphabet for s in systems)
        self.cap = min(s.degree_cap for s in systems)
        self.overflow = False

    def reduce(self, t):
        if isinstance(t, NCPoly):
            if len(self.systems) != 1:
                raise ValueError("expected a tensor element")
            if t.degree() > self.cap:
                self.overflow = True
            return self.systems[0].reduce(t)
        if any(s.inconsistent for s in self.systems):
            return TensorPoly.zero(t.legs)
        out: dict = {}
        for ws, c in t.terms.items():
            acc = {(): c}
            for s, w in zip(self.systems, ws):
                if len(w) > s.degree_cap:
                    self.overflow = True
                nf = s.nf_word(w)
                nxt: dict = {}
                for key, a in acc.items():
                    for u, b in nf.items():
                        nxt[key + (u,)] = a * b
                acc = nxt
            _accumulate(out, acc, ONE)
        return TensorPoly(t.legs, out, _trusted=True)

    __call__ = reduce


def scalar_reduce(x: Scalar) -> Scalar:
    return x
