import itertools

import pytest

from qsg import dsl
from qsg.builtins import BUILTINS, entry_name, lookup, m2_commutant_phi, qmap_M2, qmap_Xn
from qsg.commutant import M2Automorphism, build_commutant, m2_commutant_map
from qsg.ncpoly import ONE, ZERO, TensorPoly
from qsg.structure import basis_up_to


def _enumerated_relation_count(n):
    # per row: n idempotents, n(n-1) ordered orthogonal pairs, one row sum
    count = 0
    for _ in range(n):
        count += n
        count += len(list(itertools.permutations(range(n), 2)))
        count += 1
    return count


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_qmap_counts(n):
    S = qmap_Xn(n)
    assert len(S.algebra.generators) == n * n
    assert len(S.algebra.relations) == _enumerated_relation_count(n)


def test_x1_is_scalars():
    P = qmap_Xn(1).algebra
    assert P.system(8).reduce(P.gen("a11")) == P.one()
    assert basis_up_to(P, 3) == ([()], True)


def test_x2_is_two_free_projections():
    P = qmap_Xn(2).algebra
    rs = P.system(8)
    assert rs.reduce(P.gen("a12")) == P.one() - P.gen("a11")
    assert rs.reduce(P.gen("a22")) == P.one() - P.gen("a21")
    words, stable = basis_up_to(P, 6)
    assert not stable
    assert len(words) == 1 + 2 * 6  # alternating words in two projections


def test_x3_counit():
    S = qmap_Xn(3)
    for i in range(1, 4):
        for j in range(1, 4):
            assert S.counit_of(S.gen(entry_name(i, j, 3))) == (ONE if i == j else ZERO)


def test_entry_names_for_large_n():
    assert entry_name(1, 2, 3) == "a12"
    assert entry_name(1, 12, 12) == "a1_12"


def test_m2_relations_present():
    P = qmap_M2().algebra
    texts = {r.monic() for r in P.relations}
    target = P.poly("alpha*.beta + gamma*.delta + alpha.gamma* + beta.delta*")
    assert target.monic() in texts
    assert len(P.user_relations()) == 7


def test_m2_counit_on_relation():
    S = qmap_M2()
    assert S.counit_of(S.algebra.poly("alpha^2 + beta.gamma")) == ZERO


def test_phi_relation_and_delta():
    S = m2_commutant_phi()
    P = S.algebra
    assert P.poly("alpha*.beta + gamma.alpha* + alpha.gamma + beta.alpha").monic() in {r.monic() for r in P.relations}
    a, b, g = S.gen("alpha"), S.gen("beta"), S.gen("gamma")
    expected = TensorPoly.pure(a * g + b * a, a - a.star()) + TensorPoly.pure(b, b) + TensorPoly.pure(g, g)
    assert S.delta.images["beta"] == expected


def test_phi_matches_derived_commutant():
    hand = m2_commutant_phi()
    derived = build_commutant(qmap_M2(), M2Automorphism.swap(), 8).semigroup
    report = m2_commutant_map(hand, derived, 8)
    assert report.ok, report.render()
    # delta := alpha* in the hand presentation matches the class of delta
    rs = derived.algebra.system(8)
    assert rs.reduce(derived.gen("delta") - derived.gen("alpha", True)).is_zero()


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_dsl_round_trip_hash(name):
    S = lookup(name)
    again = dsl.parse(dsl.print_semigroup(S))
    assert again.algebra.hash == S.algebra.hash
    assert dsl.print_semigroup(again) == dsl.print_semigroup(S)


def test_lookup_unknown():
    with pytest.raises(KeyError):
        lookup("qmap_m3")
    assert lookup("qmap_x7").algebra.name == "QMap(X_7)"
