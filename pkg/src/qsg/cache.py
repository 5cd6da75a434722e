"""Plain-text persistence of completed rewrite systems.

Format::

    qsg-rewrite v1 <presentation hash> <cap>
    status <status> finite <0|1> skipped <count>
    <lhs> -> <rhs>
    ...
"""

from __future__ import annotations

import os
from pathlib import Path

from .dsl import DSLError, parse_expression
from .presentation import Presentation
from .rewrite import RewriteSystem

MAGIC = "qsg-rewrite v1"


class HashMismatch(ValueError):
    pass


class CorruptCache(ValueError):
    pass


def cache_dir() -> Path:
    return Path(os.environ.get("QSG_CACHE_DIR") or Path.home() / ".cache" / "qsg")


def cache_path(P: Presentation, cap: int) -> Path:
    return cache_dir() / f"{P.hash[:32]}-{cap}.rules"


def dumps(rs: RewriteSystem) -> str:
    lines = [
        f"{MAGIC} {rs.presentation_hash} {rs.degree_cap}",
        f"status {rs.status} finite {int(rs.finite_basis)} skipped {rs.skipped_overlaps}",
    ]
    lines += [r.text() for r in rs.rule_list()]
    return "\n".join(lines) + "\n"


def cache_save(rs: RewriteSystem, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(dumps(rs), encoding="utf-8")
    tmp.replace(path)


def loads(text: str, P: Presentation) -> RewriteSystem:
    if not text.endswith("\n"):
        raise CorruptCache("file does not end with a newline (truncated?)")
    lines = text.split("\n")[:-1]
    if len(lines) < 2:
        raise CorruptCache("missing header")
    head = lines[0].split(" ")
    if " ".join(head[:2]) != MAGIC or len(head) != 4:
        raise CorruptCache(f"bad header: {lines[0]!r}")
    digest, cap_text = head[2], head[3]
    if digest != P.hash:
        raise HashMismatch(f"cache is for presentation {digest[:12]}, not {P.hash[:12]}")
    meta = lines[1].split(" ")
    if len(meta) != 6 or meta[0] != "status" or meta[2] != "finite" or meta[4] != "skipped":
        raise CorruptCache(f"bad metadata line: {lines[1]!r}")
    try:
        cap, finite, skipped = int(cap_text), bool(int(meta[3])), int(meta[5])
    except ValueError as e:
        raise CorruptCache(str(e)) from None
    alph = P.alphabet
    rules = {}
    for k, line in enumerate(lines[2:], start=3):
        lhs_text, sep, rhs_text = line.partition(" -> ")
        if not sep:
            raise CorruptCache(f"line {k}: expected 'lhs -> rhs'")
        try:
            lhs = parse_expression(lhs_text, alph)
            rhs = parse_expression(rhs_text, alph)
        except DSLError as e:
            raise CorruptCache(f"line {k}: {e}") from None
        if len(lhs.terms) != 1 or next(iter(lhs.terms.values())) != 1:
            raise CorruptCache(f"line {k}: left side is not a monomial")
        word = next(iter(lhs.terms))
        if word in rules:
            raise CorruptCache(f"line {k}: duplicate left side")
        rules[word] = dict(rhs.terms)
    rs = RewriteSystem(alph, rules, cap, meta[1], finite, skipped, digest)
    for lhs in rules:
        # each left side may only contain itself as a rule occurrence
        for i in range(len(lhs)):
            for j in range(i + 1, len(lhs) + 1):
                if (i, j) != (0, len(lhs)) and lhs[i:j] in rules:
                    raise CorruptCache(f"left side {alph.word_text(lhs)} is reducible")
    if dumps(rs) != text:
        raise CorruptCache("content is not in canonical form")
    return rs


def cache_load(path, P: Presentation) -> RewriteSystem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise CorruptCache(str(e)) from None
    return loads(text, P)


def cached_system(P: Presentation, cap: int, use_cache: bool = True) -> RewriteSystem:
    """Completion at ``cap``, read from or written to the cache directory."""
    if use_cache:
        path = cache_path(P, cap)
        if path.exists():
            try:
                rs = cache_load(path, P)
                P.adopt_system(rs)
                return rs
            except (CorruptCache, HashMismatch):
                pass
    rs = P.system(cap)
    if use_cache:
        try:
            cache_save(rs, cache_path(P, cap))
        except OSError:
            pass
    return rs
