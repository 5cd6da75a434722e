"""Command line front end: ``qsg <command> ...``.

Exit codes: 0 all checks pass, 1 a violation was found, 2 inconclusive at
the degree cap, 64 usage error, 66 unreadable or malformed input file.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import builtins, dsl
from .cache import cached_system
from .commutant import M2Automorphism, PermFamily, build_commutant, parse_cycles
from .presentation import Presentation
from .rewrite import DEFAULT_CAP, InconsistentPresentation
from .semigroup import QuantumSemigroup, Report, verify_all

EX_OK, EX_VIOLATION, EX_INCONCLUSIVE = 0, 1, 2
EX_USAGE, EX_NOINPUT = 64, 66


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def load_source(name: str):
    """A file in the presentation language, or a builtin name such as ``qmap_x3``."""
    path = Path(name)
    if path.exists():
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise InputError(f"{name}: {e}") from None
        try:
            return dsl.parse(text)
        except dsl.DSLError as e:
            raise InputError(f"{name}:{e}") from None
    try:
        return builtins.lookup(name)
    except KeyError:
        raise InputError(f"{name}: no such file or builtin") from None


def _algebra(obj) -> Presentation:
    return obj.algebra if isinstance(obj, QuantumSemigroup) else obj


def _system(P: Presentation, cap: int):
    if not _use_cache():
        return P.system(cap, allow_inconsistent=True)
    try:
        return cached_system(P, cap)
    except InconsistentPresentation:
        return P.system(cap, allow_inconsistent=True)


def _use_cache() -> bool:
    return bool(os.environ.get("QSG_CACHE_DIR"))


def _kv(pairs) -> str:
    return "".join(f"{k}={v}\n" for k, v in pairs)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_verify(args, out) -> int:
    obj = load_source(args.file)
    if isinstance(obj, QuantumSemigroup):
        _system(obj.algebra, args.cap)
        report = verify_all(obj, args.cap)
    else:
        rs = _system(obj, args.cap)
        report = Report(f"presentation {obj.name or obj.hash[:12]} at cap {args.cap}")
        if rs.inconsistent:
            report.add("algebra.completion", "FAIL", "the ideal contains 1")
        elif rs.finite_basis:
            report.add("algebra.completion", "PASS", f"{len(rs)} rules, finite basis")
        else:
            report.add("algebra.completion", "INCONCLUSIVE", f"{rs.skipped_overlaps} overlaps beyond cap")
    out.write(report.machine() if args.machine else report.render().rstrip("\n") + "\n")
    return report.exit_code


def _family(args):
    if args.space == "Xn":
        if args.n is None:
            raise UsageError("--space Xn needs --n")
        if args.auto is not None:
            raise UsageError("--auto applies to --space M2")
        if not args.perm:
            raise UsageError("give at least one --perm")
        try:
            for p in args.perm:
                parse_cycles(p, args.n)
            return builtins.qmap_Xn(args.n), PermFamily.of(args.n, args.perm)
        except ValueError as e:
            raise UsageError(str(e)) from None
    if args.perm:
        raise UsageError("--perm applies to --space Xn")
    try:
        phi = M2Automorphism.parse(args.auto or "swap")
    except ValueError as e:
        raise UsageError(str(e)) from None
    return builtins.qmap_M2(), phi


def _is_small_cyclic(args, F) -> bool:
    return args.space == "Xn" and args.n == 2 and isinstance(F, PermFamily) and set(F.perms) == {(1, 0)}


def cmd_commutant(args, out) -> int:
    from .structure import small_cyclic_report, structure_lines

    S, F = _family(args)
    try:
        res = build_commutant(S, F, args.cap)
    except InconsistentPresentation as e:
        out.write(_kv([("result", "FAIL"), ("error", e)]) if args.machine else f"{e}\nRESULT FAIL\n")
        return EX_VIOLATION
    Q = res.semigroup
    extra = small_cyclic_report(args.cap, res) if _is_small_cyclic(args, F) else structure_lines(Q, args.cap)[0]
    if args.machine:
        body = res.report.machine()
        body += _kv([(f"ideal.{k}", p.text()) for k, p in enumerate(res.ideal)])
        body += _kv([(f"structure.{k}", line) for k, line in enumerate(extra)])
        out.write(body)
    else:
        out.write("ideal generators:\n" + "".join(f"  {p.text()}\n" for p in res.ideal))
        out.write(res.report.render().rstrip("\n") + "\n")
        out.write("\n".join(extra) + "\n")
    if args.out:
        try:
            Path(args.out).write_text(dsl.print_semigroup(Q), encoding="utf-8")
        except OSError as e:
            raise InputError(f"{args.out}: {e}") from None
    return res.report.exit_code


def cmd_nf(args, out) -> int:
    P = _algebra(load_source(args.file))
    try:
        p = dsl.parse_expression(args.expr, P.alphabet)
    except dsl.DSLError as e:
        raise UsageError(f"expression: {e}") from None
    rs = _system(P, args.cap)
    r = rs.reduce(p) if not rs.inconsistent else p.zero(P.alphabet)
    inconclusive = bool(r) and not rs.finite_basis
    if args.machine:
        out.write(_kv([("nf", r.text()), ("finite_basis", int(rs.finite_basis)), ("inconsistent", int(rs.inconsistent))]))
    else:
        out.write(f"nf({args.expr}) = {r.text()}\n")
        if inconclusive:
            out.write("note: completion skipped overlaps beyond the cap; a nonzero result is not a proof\n")
        if rs.inconsistent:
            out.write("note: the algebra is zero\n")
    return EX_INCONCLUSIVE if inconclusive else EX_OK


def cmd_basis(args, out) -> int:
    from .structure import basis_up_to

    P = _algebra(load_source(args.file))
    cap = max(args.cap, args.max_deg)
    _system(P, cap)
    words, stable = basis_up_to(P, args.max_deg, cap)
    texts = [P.alphabet.word_text(w) for w in words]
    if args.machine:
        out.write(_kv([("count", len(words)), ("stabilized", int(stable))] + [(f"word.{k}", t) for k, t in enumerate(texts)]))
    else:
        out.write("\n".join(texts) + "\n")
        out.write(f"{len(words)} words up to degree {args.max_deg}; {'stabilized' if stable else 'not stabilized'}\n")
    return EX_OK if stable else EX_INCONCLUSIVE


def cmd_abelianize(args, out) -> int:
    from .structure import abelianize

    P = _algebra(load_source(args.file))
    Q, cs = abelianize(P, args.cap)
    if args.machine:
        out.write(_kv([("variables", ",".join(cs.variables))] + [(f"eq.{k}", e.text()) for k, e in enumerate(cs.equations)]))
    else:
        out.write(cs.text())
    return EX_OK


def cmd_characters(args, out) -> int:
    from .structure import UnknownParametrization, abelianize, check_parametrized_solution

    P = _algebra(load_source(args.file))
    _, cs = abelianize(P, args.cap)
    pts: list = []
    try:
        worst = check_parametrized_solution(cs, args.param, args.samples, args.seed, exact=True, points=pts)
    except UnknownParametrization as e:
        raise UsageError(f"unknown parametrization {e}") from None
    except KeyError as e:
        raise UsageError(f"parametrization {args.param} does not fit this algebra (missing {e})") from None
    ok = worst == 0
    if args.machine:
        out.write(_kv([("samples", args.samples), ("max_residual", worst), ("result", "PASS" if ok else "FAIL")]))
    else:
        cols = list(cs.variables)
        w = 12
        out.write(" ".join(c.rjust(w) for c in cols) + "\n")
        for row in pts[: args.show]:
            out.write(" ".join(f"{float(row[c]):{w}.6f}" for c in cols) + "\n")
        out.write(f"{args.samples} sampled points of {args.param}; max residual {worst}\n")
        out.write(f"RESULT {'PASS' if ok else 'FAIL'}\n")
    return EX_OK if ok else EX_VIOLATION


def cmd_rep(args, out) -> int:
    from .repsearch import SearchConfig, certify_noncommuting_pair, search_rep

    P = _algebra(load_source(args.file))
    cfg = SearchConfig(restarts=args.restarts, seed=args.seed)
    if args.noncommute:
        g, h = args.noncommute
        try:
            gp, hp = P.poly(g), P.poly(h)
        except dsl.DSLError as e:
            raise UsageError(str(e)) from None
        cert = certify_noncommuting_pair(P, gp, hp, args.dim, cfg)
        if not cert:
            msg = f"NotFound: {cert.reason} (a budget statement, not a proof)"
            out.write(_kv([("result", "NotFound")]) if args.machine else msg + "\n")
            return EX_INCONCLUSIVE
        R = cert.point
        if args.machine:
            out.write(_kv([("result", "Found"), ("commutator_norm", repr(cert.commutator_norm)), ("residual", repr(R.residual))]))
        else:
            out.write(f"||[{g}, {h}]||_F = {cert.commutator_norm!r}\n" + R.export())
        return EX_OK
    R = search_rep(P, args.dim, cfg)
    ok = R.residual < cfg.tolerance
    if args.machine:
        out.write(_kv([("dim", R.d), ("residual", repr(R.residual)), ("result", "PASS" if ok else "INCONCLUSIVE")]))
    else:
        out.write(R.export())
    return EX_OK if ok else EX_INCONCLUSIVE


def cmd_scenario(args, out) -> int:
    from .structure import SCENARIOS, run_scenario

    if args.name not in SCENARIOS:
        raise UsageError(f"unknown scenario {args.name!r}; choose from {', '.join(SCENARIOS)}")
    res = run_scenario(args.name, args.cap)
    if args.machine:
        out.write(_kv([(f"check.{k}", f"{'PASS' if ok else 'FAIL'} {lab}") for k, (lab, ok, _) in enumerate(res.checks)]))
        out.write(_kv([(f"note.{k}", n) for k, n in enumerate(res.notes)] + [("result", "PASS" if res.ok else "FAIL")]))
    else:
        out.write("\n".join(res.lines()) + "\n")
    return EX_OK if res.ok else EX_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="degree cap for completion")
    common.add_argument("--machine", action="store_true", help="flat key=value output")

    p = _Parser(prog="qsg", description="Quantum semigroup presentations: verification, commutants, structure.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("verify", parents=[common], help="check all semigroup axioms")
    s.add_argument("file")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("commutant", parents=[common], help="quantum commutant of a classical family")
    s.add_argument("--space", choices=["Xn", "M2"], required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--perm", action="append", default=[], help='permutation in cycle notation, e.g. "(1 2 3)"')
    s.add_argument("--auto", help="M2 automorphism: swap, or u11,u12,u21,u22")
    s.add_argument("--out", help="write the commutant semigroup to this file")
    s.set_defaults(fn=cmd_commutant)

    s = sub.add_parser("nf", parents=[common], help="normal form of an expression")
    s.add_argument("file")
    s.add_argument("expr")
    s.set_defaults(fn=cmd_nf)

    s = sub.add_parser("basis", parents=[common], help="irreducible words up to a degree")
    s.add_argument("file")
    s.add_argument("--max-deg", type=int, required=True)
    s.set_defaults(fn=cmd_basis)

    s = sub.add_parser("abelianize", parents=[common], help="real character system")
    s.add_argument("file")
    s.set_defaults(fn=cmd_abelianize)

    s = sub.add_parser("characters", parents=[common], help="check a parametrized character family")
    s.add_argument("file")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--param", default="two-circle")
    s.add_argument("--show", type=int, default=10, help="sample rows to print")
    s.set_defaults(fn=cmd_characters)

    s = sub.add_parser("rep", parents=[common], help="numerical *-representation search")
    s.add_argument("file")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--restarts", type=int, default=8)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noncommute", nargs=2, metavar=("G", "H"))
    s.set_defaults(fn=cmd_rep)

    s = sub.add_parser("scenario", parents=[common], help="added-relation scenarios for the commutant of phi")
    s.add_argument("name")
    s.set_defaults(fn=cmd_scenario)
    return p


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.cap < 1:
            raise UsageError("--cap must be positive")
        return args.fn(args, out)
    except UsageError as e:
        sys.stderr.write(f"qsg: usage error: {e}\n")
        return EX_USAGE
    except InputError as e:
        sys.stderr.write(f"qsg: {e}\n")
        return EX_NOINPUT


def main() -> None:  # pragma: no cover - console entry point
    sys.exit(run())
