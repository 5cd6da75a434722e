import random

import pytest

from helpers import random_poly
from qsg.builtins import entry_name, m2_commutant_phi, qmap_M2, qmap_Xn
from qsg.commutant import (
    ClassicalFamily,
    M2Automorphism,
    MismatchedSpace,
    PermFamily,
    build_commutant,
    commutant_ideal,
    compose,
    compose_families,
    cycles_text,
    group_closure,
    inverse,
    parse_cycles,
    permutation_ideal_reference,
    phi_ideal_reference,
    same_normal_forms,
    transposition_checks,
)
from qsg.ncpoly import ONE, Scalar, TensorPoly
from qsg.presentation import quotient
from qsg.semigroup import PASS, trivial_family, verify_action
from qsg.structure import basis_up_to

CAP = 8


@pytest.mark.parametrize(
    "text, n, image",
    [
        ("(1 2 3)", 3, (1, 2, 0)),
        ("(1 2)", 3, (1, 0, 2)),
        ("()", 4, (0, 1, 2, 3)),
        ("(1 2)(3 4)", 4, (1, 0, 3, 2)),
        ("(1,3)", 3, (2, 1, 0)),
    ],
)
def test_parse_cycles(text, n, image):
    assert parse_cycles(text, n) == image


@pytest.mark.parametrize("bad", ["(1 1)", "(1 5)", "1 2", "(a b)"])
def test_parse_cycles_rejects(bad):
    with pytest.raises(ValueError):
        parse_cycles(bad, 3)


def test_cycles_text_round_trip():
    for text in ["(1 2 3)", "(1 2)(3 4)", "()"]:
        assert cycles_text(parse_cycles(text, 4)) == text


def test_compose_and_inverse():
    p = parse_cycles("(1 2 3)", 3)
    assert compose(p, inverse(p)) == (0, 1, 2)
    assert compose(p, compose(p, p)) == (0, 1, 2)


@pytest.mark.parametrize(
    "perms, n, size",
    [
        (["(1 2 3)"], 3, 3),
        (["(1 2)", "(1 2 3)"], 3, 6),
        ([], 3, 1),
        (["(1 2)"], 2, 2),
        (["(1 2 3 4)"], 4, 4),
        (["(1 2)", "(3 4)"], 4, 4),
    ],
)
def test_group_closure_sizes(perms, n, size):
    G = group_closure(PermFamily.of(n, perms))
    assert len(G.perms) == size
    assert tuple(range(n)) in G.perms


def test_perm_family_rejects_non_bijection():
    with pytest.raises(ValueError):
        PermFamily.of(3, [(0, 0, 1)])


# -- composition of families ------------------------------------------------


def test_compose_with_trivial_family_is_identity_on_coefficients():
    S = qmap_Xn(3)
    F = ClassicalFamily.from_perms(PermFamily.of(3, ["(1 2 3)"]))
    triv = trivial_family(S.action.space, F.algebra)
    both = compose_families(triv, F.psi, CAP)
    # the first leg is scalars only, so coefficients are 1 ⊗ d_k
    for g in F.psi.images:
        for x, y in zip(both.images[g], F.psi.images[g]):
            assert bool(x) == bool(y)


def test_compose_families_rejects_mismatched_spaces():
    S = qmap_M2()
    F = ClassicalFamily.from_perms(PermFamily.of(4, ["(1 2)"]))
    with pytest.raises(MismatchedSpace):
        compose_families(S.action, F.psi, CAP)
    with pytest.raises(MismatchedSpace):
        commutant_ideal(S, F, CAP)


def test_classical_point_evaluation():
    F = ClassicalFamily.from_perms(PermFamily.of(3, ["(1 2 3)", "(1 2)"]))
    eta = F.point(1)
    assert eta((2, 2)) == ONE and eta((0,)) == 0 and eta(()) == ONE


# -- commutant ideals against hand-written references -----------------------


def _check_same_ideal(S, ideal, reference, seed):
    P = quotient(S.algebra, ideal)
    Q = quotient(S.algebra, reference)
    rng = random.Random(seed)
    polys = [random_poly(S.algebra.alphabet, rng, max_len=3, max_terms=3) for _ in range(200)]
    assert same_normal_forms(P, Q, CAP, polys)


@pytest.mark.parametrize(
    "n, perms",
    [
        (2, ["(1 2)"]),
        (3, ["(1 2 3)"]),
        (3, ["(2 3)"]),
        (4, ["(1 2)(3 4)"]),
    ],
)
def test_permutation_ideal_matches_reference(n, perms):
    S = qmap_Xn(n)
    F = PermFamily.of(n, perms)
    ideal = commutant_ideal(S, ClassicalFamily.from_perms(F), CAP)
    _check_same_ideal(S, ideal, permutation_ideal_reference(S, F), seed=n)


def test_swap_ideal_matches_reference():
    S = qmap_M2()
    ideal = commutant_ideal(S, ClassicalFamily.from_automorphism(M2Automorphism.swap()), CAP)
    _check_same_ideal(S, ideal, phi_ideal_reference(S), seed=17)


def test_identity_family_gives_empty_ideal():
    S = qmap_Xn(3)
    F = ClassicalFamily.from_perms(PermFamily.of(3, ["()"]))
    assert commutant_ideal(S, F, CAP) == []
    res = build_commutant(S, PermFamily.of(3, []), CAP)
    assert res.semigroup.algebra.hash == S.algebra.hash
    assert res.closure_agrees


def test_m2_identity_automorphism():
    u = ((ONE, Scalar(0)), (Scalar(0), ONE))
    S = qmap_M2()
    assert commutant_ideal(S, ClassicalFamily.from_automorphism(M2Automorphism(u)), CAP) == []


def test_non_unitary_rejected():
    with pytest.raises(ValueError):
        M2Automorphism(((ONE, ONE), (Scalar(0), ONE)))
    assert M2Automorphism.parse("0,1,1,0").matrix() == M2Automorphism.swap().matrix()


# -- the quotient semigroup -------------------------------------------------


@pytest.mark.parametrize("n, perms", [(3, ["(1 2 3)"]), (4, ["(1 2)"]), (3, ["(1 2)", "(1 2 3)"])])
def test_commutant_passes_verifiers(n, perms):
    res = build_commutant(qmap_Xn(n), PermFamily.of(n, perms), CAP)
    assert res.report.status == PASS, res.report.render()
    assert not res.semigroup.defined_by_action


def test_closure_invariance():
    # a generating set and the full group it generates give the same commutant
    S = qmap_Xn(3)
    small = build_commutant(S, PermFamily.of(3, ["(1 2 3)"]), CAP)
    full = build_commutant(S, group_closure(PermFamily.of(3, ["(1 2 3)"])), CAP)
    assert small.closure_agrees
    assert same_normal_forms(small.semigroup.algebra, full.semigroup.algebra, CAP)


def test_full_symmetric_group_commutant_is_scalars():
    res = build_commutant(qmap_Xn(3), PermFamily.of(3, ["(1 2)", "(1 2 3)"]), CAP)
    A = res.semigroup.algebra
    rs = A.system(CAP)
    # a_12 = a_13 are orthogonal self-adjoint idempotents, hence 0
    for i in range(1, 4):
        for j in range(1, 4):
            assert rs.reduce(A.gen(entry_name(i, j, 3))) == (A.one() if i == j else A.one() * 0)
    assert basis_up_to(A, 4) == ([()], True)


def test_push_through_counit_and_delta():
    S = qmap_Xn(3)
    res = build_commutant(S, PermFamily.of(3, ["(1 2 3)"]), CAP)
    Q = res.semigroup
    for i in range(1, 4):
        for j in range(1, 4):
            g = entry_name(i, j, 3)
            assert Q.counit_of(Q.gen(g)) == S.counit_of(S.gen(g))
            assert Q.delta.images[g].text() == S.delta.images[g].text()


def test_phi_commutant_action_verified():
    res = build_commutant(qmap_M2(), M2Automorphism.swap(), CAP)
    assert verify_action(res.semigroup, None, CAP).status == PASS
    assert res.closure_agrees is None


@pytest.mark.parametrize("n", [3, 4])
def test_transposition_structure(n):
    res, report = transposition_checks(n, CAP)
    assert report.status == PASS, report.render()
    names = {c.name for c in report.checks}
    assert {"transposition.identities", "transposition.b_block", "free_product.round_trips"} <= names


def test_transposition_needs_three_points():
    with pytest.raises(ValueError):
        transposition_checks(2, CAP)


def test_phi_builtin_agrees_with_reference_ideal():
    hand = m2_commutant_phi()
    rs = hand.algebra.system(CAP)
    # the hand presentation already satisfies the γ = γ* style relations
    assert rs.reduce(hand.gen("gamma") - hand.gen("gamma", True)).is_zero()


def test_compose_quantum_with_permutation_family():
    # (Φ △ Ψ_B)(e_j) has coefficient Σ_τ a_{k,τ(j)} ⊗ δ_τ at e_k
    n = 3
    S = qmap_Xn(n)
    F = ClassicalFamily.from_perms(PermFamily.of(n, ["(1 2 3)", "(1 2)"]))
    both = compose_families(S.action, F.psi, CAP)
    red = both.reducer(CAP)  # d1 + d2 = 1 in the labels
    for j in range(n):
        for k in range(n):
            ref = None
            for t, perm in enumerate(F.source.perms):
                term = TensorPoly.pure(S.gen(entry_name(k + 1, perm[j] + 1, n)), F.algebra.gen(f"d{t + 1}"))
                ref = term if ref is None else ref + term
            assert not red(both.images[f"e{j + 1}"][k] - ref)


def test_compose_two_classical_families():
    # the composite puts d_σ ⊗ d_τ on e_{σ(τ(j))}
    n = 3
    F1 = ClassicalFamily.from_perms(PermFamily.of(n, ["(1 2 3)", "(2 3)"]))
    F2 = ClassicalFamily.from_perms(PermFamily.of(n, ["(1 2)", "()"]))
    both = compose_families(F1.psi, F2.psi, CAP)
    red = both.reducer(CAP)
    for j in range(n):
        expected = [None] * n
        for s, sig in enumerate(F1.source.perms):
            for t, tau in enumerate(F2.source.perms):
                k = compose(sig, tau)[j]
                term = TensorPoly.pure(F1.algebra.gen(f"d{s + 1}"), F2.algebra.gen(f"d{t + 1}"))
                expected[k] = term if expected[k] is None else expected[k] + term
        for k in range(n):
            got = both.images[f"e{j + 1}"][k]
            assert not (red(got) if expected[k] is None else red(got - expected[k]))
