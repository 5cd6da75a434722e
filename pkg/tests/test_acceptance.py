"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``.
"""

import io
import random
import time

import numpy as np
import pytest

from qsg.builtins import commutant_XY, entry_name, m2_commutant_phi, qmap_M2, qmap_Xn
from qsg.cli import run
from qsg.commutant import (
    ClassicalFamily,
    M2Automorphism,
    PermFamily,
    build_commutant,
    commutant_ideal,
    group_closure,
    permutation_ideal_reference,
    phi_ideal_reference,
    same_normal_forms,
    transposition_checks,
)
from qsg.ncpoly import TensorPoly
from qsg.presentation import quotient
from qsg.repsearch import (
    Certificate,
    Layout,
    RepPoint,
    SearchConfig,
    certify_noncommuting_pair,
    commutator_norm,
    evaluate_poly,
    residual,
    residual_gradient,
    search_rep,
)
from qsg.semigroup import PASS, verify_all
from qsg.structure import (
    basis_up_to,
    check_parametrized_solution,
    abelianize,
    cyclic_commutant,
    cyclic_delta_reference,
    distance_to_two_circles,
    is_commutative,
    recognize_finite_group,
    run_scenario,
    small_cyclic_report,
)

CAP = 8


def _random_poly(alph, rng, max_len=3, max_terms=3):
    from helpers import random_poly

    return random_poly(alph, rng, max_len=max_len, max_terms=max_terms)


# -- criteria ------------------------------------------------------------------
# each returns a list of (label, ok, detail)


def crit_qmap_axioms():
    out = []
    for n in range(1, 6):
        S = qmap_Xn(n)
        r = verify_all(S, CAP)
        clean = all(not c.residues for c in r.checks)
        out.append((f"QMap(X_{n}) verifiers", r.status == PASS and clean, r.status))
        # Δ(a_ij) = Σ_k a_ik ⊗ a_kj written out independently
        bad = []
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                ref = TensorPoly.zero(S.tensor2.legs)
                for k in range(1, n + 1):
                    ref = ref + TensorPoly.pure(S.gen(entry_name(i, k, n)), S.gen(entry_name(k, j, n)))
                if S.delta.images[entry_name(i, j, n)] != ref:
                    bad.append(entry_name(i, j, n))
        out.append((f"QMap(X_{n}) matrix coproduct", not bad, ", ".join(bad)))
    return out


def crit_m2_axioms():
    S = qmap_M2()
    r = verify_all(S, CAP)
    names = {c.name: c.status for c in r.checks}
    out = [(f"check {k}", v == PASS, v) for k, v in sorted(names.items())]
    out.append(("no residues", all(not c.residues for c in r.checks), ""))
    # Δ from (Φ⊗id)Φ(n): entries of MM*, M, M*, M*M tensored with α, β, γ, δ
    a, b, g, d = (S.gen(x) for x in ("alpha", "beta", "gamma", "delta"))
    M = [[a, b], [g, d]]
    Ms = [[M[c][r].star() for c in range(2)] for r in range(2)]

    def mul(X, Y):
        return [[X[r][0] * Y[0][c] + X[r][1] * Y[1][c] for c in range(2)] for r in range(2)]

    blocks = [(mul(M, Ms), a), (M, b), (Ms, g), (mul(Ms, M), d)]
    red = S.tensor2.reducer(CAP)
    for name, (r_, c_) in (("alpha", (0, 0)), ("beta", (0, 1)), ("gamma", (1, 0)), ("delta", (1, 1))):
        ref = TensorPoly.zero(S.tensor2.legs)
        for X, y in blocks:
            ref = ref + TensorPoly.pure(X[r_][c_], y)
        out.append((f"Δ({name}) formula", not red(S.delta.images[name] - ref), ""))
    return out


def _same_rewriting(S, ideal, reference, seed):
    P, Q = quotient(S.algebra, ideal), quotient(S.algebra, reference)
    rng = random.Random(seed)
    polys = [_random_poly(S.algebra.alphabet, rng) for _ in range(200)]
    return same_normal_forms(P, Q, CAP, polys)


def crit_commutant_ideals():
    out = []
    for n, perms in [(3, ["(1 2 3)"]), (3, ["(2 3)"]), (4, ["(1 2)(3 4)"]), (4, ["(1 2 3 4)"])]:
        S = qmap_Xn(n)
        F = PermFamily.of(n, perms)
        ideal = commutant_ideal(S, ClassicalFamily.from_perms(F), CAP)
        ok = _same_rewriting(S, ideal, permutation_ideal_reference(S, F), seed=n)
        out.append((f"X_{n} {F.text()}", ok, f"{len(ideal)} generators"))
    S = qmap_M2()
    ideal = commutant_ideal(S, ClassicalFamily.from_automorphism(M2Automorphism.swap()), CAP)
    out.append(("M2 swap", _same_rewriting(S, ideal, phi_ideal_reference(S), seed=99), f"{len(ideal)} generators"))
    return out


def crit_cyclic():
    out = []
    for n in (3, 4, 5):
        S = cyclic_commutant(n, CAP).semigroup
        words, stable = basis_up_to(S.algebra, CAP)
        g = recognize_finite_group(S, CAP)
        red = S.tensor2.reducer(CAP)
        ref = cyclic_delta_reference(S, n)
        delta_ok = all(not red(S.delta_of(S.gen(entry_name(1, k, n)), CAP, red) - ref[k]) for k in range(1, n + 1))
        out.append((f"n={n} commutative", is_commutative(S.algebra, CAP).yes, ""))
        out.append((f"n={n} basis size", stable and len(words) == n, str(len(words))))
        out.append((f"n={n} group", g is not None and g.name() == f"Z_{n}", g.name() if g else "none"))
        out.append((f"n={n} coproduct", delta_ok, ""))
    return out


def crit_transposition():
    out = []
    for n in (3, 4):
        _, report = transposition_checks(n, CAP)
        for c in report.checks:
            out.append((f"n={n} {c.name}", c.status == PASS, c.status))
    return out


def crit_group_closure():
    S = qmap_Xn(3)
    F = PermFamily.of(3, ["(1 2)", "(1 2 3)"])
    small = build_commutant(S, F, CAP)
    full = build_commutant(S, group_closure(F), CAP)
    A = small.semigroup.algebra
    rs = A.system(CAP)
    scalars = all(rs.reduce(A.gen(x)).degree() <= 0 for x in A.alphabet.names)
    return [
        ("group has 6 elements", len(group_closure(F).perms) == 6, ""),
        ("same normal forms", same_normal_forms(A, full.semigroup.algebra, CAP), ""),
        ("closure check recorded", bool(small.closure_agrees), ""),
        ("collapses to scalars", scalars and basis_up_to(A, 4) == ([()], True), ""),
    ]


def crit_identity_suite():
    S = m2_commutant_phi()
    rs = S.algebra.system(CAP)
    red = S.tensor2.reducer(CAP)
    X, Y = commutant_XY(S)
    one = S.algebra.one()
    dX = S.delta_of(X, CAP, red) - TensorPoly.pure(one, X) - TensorPoly.pure(X, Y)
    dY = S.delta_of(Y, CAP, red) - TensorPoly.pure(Y, Y)
    return [
        ("XY + YX", not rs.reduce(X * Y + Y * X), ""),
        ("X^2 + Y^2 - 1", not rs.reduce(X * X + Y * Y - one), ""),
        ("Δ(X) - (1⊗X + X⊗Y)", not red(dX), ""),
        ("Δ(Y) - Y⊗Y", not red(dY), ""),
    ]


def crit_scenarios():
    a = run_scenario("y-central", CAP)
    b = run_scenario("y2-is-1", CAP)
    c = run_scenario("reduced", CAP)
    return [
        ("[X,Y]=0 gives nf(Y^3 - Y) = 0", a.check("nf(Y^3 - Y) = 0"), ""),
        ("Y^2=1 gives nf(X) = 0", b.check("nf(X) = 0"), "; ".join(b.notes)),
        ("Y^2=1 gives commutativity", b.check("commutative: yes"), ""),
        ("Y^2=1 gives nf(2t^2+beta^2+gamma^2-1) = 0", b.check("nf(2t^2 + beta^2 + gamma^2 - 1) = 0"), ""),
        ("Y^2=1 gives nf(t^2 - beta.gamma) = 0", b.check("nf(t^2 - beta.gamma) = 0"), ""),
        ("X=1, Y=0 gives commutativity", c.check("commutative: yes"), "; ".join(c.notes)),
    ]


def crit_characters():
    S = m2_commutant_phi()
    P = S.algebra
    _, cs = abelianize(P, CAP)
    exact = check_parametrized_solution(cs, "two-circle", samples=10**4, seed=0, exact=True)
    X, Y = commutant_XY(S)
    hits, worst_dist, worst_xy = 0, 0.0, 0.0
    for seed in range(100):
        R = search_rep(P, 1, SearchConfig(seed=seed))
        if R.residual >= 1e-10:
            continue
        hits += 1
        m = {g: complex(R.matrices[g][0, 0]) for g in ("alpha", "beta", "gamma")}
        worst_dist = max(worst_dist, distance_to_two_circles(m["beta"].real, m["gamma"].real, m["alpha"]))
        worst_xy = max(worst_xy, float(np.abs(evaluate_poly(P, R, X * Y)).max()))
    return [
        ("exact residual at 10^4 rational points", exact == 0, str(exact)),
        ("1-d search hits", hits > 0, f"{hits}/100"),
        ("hits within 1e-6 of two circles", hits > 0 and worst_dist < 1e-6, f"{worst_dist:.2e}"),
        ("hits have |XY| < 1e-8", hits > 0 and worst_xy < 1e-8, f"{worst_xy:.2e}"),
    ]


def crit_numerics():
    out = []
    worst = 0.0
    rng = np.random.default_rng(2024)
    h = 1e-6
    for k in range(20):
        P = [qmap_Xn(2).algebra, m2_commutant_phi().algebra][k % 2]
        L = Layout(P, 2)
        x = rng.normal(size=L.size) * 0.7
        g = residual_gradient(P, RepPoint(2, L.matrices(x)))
        fd = np.zeros_like(x)
        for i in range(len(x)):
            e = np.zeros_like(x)
            e[i] = h
            fd[i] = (residual(P, RepPoint(2, L.matrices(x + e))) - residual(P, RepPoint(2, L.matrices(x - e)))) / (2 * h)
        worst = max(worst, np.linalg.norm(g - fd) / np.linalg.norm(fd))
    out.append(("gradient vs finite differences", worst < 1e-6, f"max rel {worst:.1e}"))
    X2 = qmap_Xn(2).algebra
    cert = certify_noncommuting_pair(X2, "a11", "a21", 2, SearchConfig(seed=0))
    ok = isinstance(cert, Certificate) and cert.recomputed_residual < 1e-10 and cert.commutator_norm > 0.1
    detail = f"residual {cert.recomputed_residual:.1e}, norm {cert.commutator_norm:.3f}" if ok else repr(cert)
    out.append(("QMap(X_2) noncommuting witness at d=2", ok, detail))
    if ok:
        again = commutator_norm(X2, cert.point, "a11", "a21")
        out.append(("witness recomputed", abs(again - cert.commutator_norm) < 1e-12, ""))
    a = search_rep(m2_commutant_phi().algebra, 2, SearchConfig(restarts=4, seed=7))
    b = search_rep(m2_commutant_phi().algebra, 2, SearchConfig(restarts=4, seed=7))
    same = a.export() == b.export() and all(a.matrices[g].tobytes() == b.matrices[g].tobytes() for g in a.matrices)
    out.append(("bitwise-identical reruns", same, ""))
    return out


def crit_open_question():
    lines = small_cyclic_report(CAP)
    out_buf = io.StringIO()
    code = run(["commutant", "--space", "Xn", "--n", "2", "--perm", "(1 2)"], out_buf)
    flagged = [l for l in out_buf.getvalue().splitlines() if l.startswith("DISCREPANCY-OR-CONFIRMATION: ")]
    return [
        ("report emits computed structure", any(l.startswith("group: ") for l in lines), lines[-1]),
        ("report flags the published claim", lines[-1].startswith("DISCREPANCY-OR-CONFIRMATION: "), ""),
        ("CLI exit code 0", code == 0, str(code)),
        ("CLI output carries the flag", len(flagged) == 1, flagged[0] if flagged else ""),
    ]


CRITERIA = [
    (1, "QMap(X_n) axioms, n = 1..5", crit_qmap_axioms),
    (2, "QMap(M_2) axioms and coproduct formulas", crit_m2_axioms),
    (3, "commutant ideals match hand-written generator sets", crit_commutant_ideals),
    (4, "cyclic commutants are Z_n", crit_cyclic),
    (5, "transposition commutant structure", crit_transposition),
    (6, "group-closure invariance", crit_group_closure),
    (7, "identity suite for the commutant of the swap", crit_identity_suite),
    (8, "scenario catalog", crit_scenarios),
    (9, "character geometry", crit_characters),
    (10, "numerical layer", crit_numerics),
    (11, "n = 2 cyclic commutant report", crit_open_question),
]


def evaluate(number, title, fn):
    t0 = time.perf_counter()
    checks = fn()
    ok = bool(checks) and all(c[1] for c in checks)
    failed = [f"{label} ({detail})" if detail else label for label, good, detail in checks if not good]
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} [{time.perf_counter() - t0:.1f}s]"
    if failed:
        line += " -- failed: " + "; ".join(failed)
    return ok, line


@pytest.mark.parametrize("number, title, fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn, capsys):
    ok, line = evaluate(number, title, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    import sys
    from pathlib import Path

    sys.path.insert(0, str(Path(__file__).parent))
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
