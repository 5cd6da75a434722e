"""Named quantum semigroups: QMap(X_n), QMap(qs(M2)) and the commutant of φ."""

from __future__ import annotations

from .ncpoly import ONE, ZERO, TensorPoly
from .presentation import ClosureAnnotation, make_presentation
from .semigroup import QuantumFamily, QuantumSemigroup, functions_on_points, matrix_algebra_2


def entry_name(i: int, j: int, n: int, stem: str = "a") -> str:
    """``a12`` for small n, ``a1_12`` once indices can have two digits."""
    return f"{stem}{i}{j}" if n < 10 else f"{stem}{i}_{j}"


def qmap_Xn(n: int) -> QuantumSemigroup:
    """Quantum family of all maps of an n-point space.

    Generators ``a_ij`` with each row a partition of unity into projections,
    ``Δ(a_ij) = Σ_k a_ik ⊗ a_kj``, ``ε(a_ij) = δ_ij``, ``Φ(e_j) = Σ_i e_i ⊗ a_ij``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    names = [[entry_name(i, j, n) for j in range(1, n + 1)] for i in range(1, n + 1)]
    flat = [x for row in names for x in row]
    pres = make_presentation(flat, closures=[ClosureAnnotation.partition(row) for row in names], name=f"QMap(X_{n})")
    gen = {x: pres.gen(x) for x in flat}
    delta, counit = {}, {}
    for i in range(n):
        for j in range(n):
            d = TensorPoly.zero((pres.alphabet, pres.alphabet))
            for k in range(n):
                d = d + TensorPoly.pure(gen[names[i][k]], gen[names[k][j]])
            delta[names[i][j]] = d
            counit[names[i][j]] = ONE if i == j else ZERO
    space = functions_on_points(n)
    images = {f"e{j + 1}": [gen[names[i][j]] for i in range(n)] for j in range(n)}
    action = QuantumFamily(space, pres, images)
    return QuantumSemigroup(pres, delta, counit, action, pres.name, defined_by_action=True)


_M2_RELATIONS = [
    # n n* + n* n = 1, entrywise (the (2,1) entry is the star of (1,2))
    "alpha*.alpha + gamma*.gamma + alpha.alpha* + beta.beta* = 1",
    "alpha*.beta + gamma*.delta + alpha.gamma* + beta.delta* = 0",
    "beta*.beta + delta*.delta + gamma.gamma* + delta.delta* = 1",
    # n^2 = 0, entrywise
    "alpha^2 + beta.gamma = 0",
    "alpha.beta + beta.delta = 0",
    "gamma.alpha + delta.gamma = 0",
    "gamma.beta + delta^2 = 0",
]

_M2_DELTA = {
    "alpha": "alpha.alpha* (*) alpha + beta.beta* (*) alpha + alpha (*) beta + alpha* (*) gamma"
    " + alpha*.alpha (*) delta + gamma*.gamma (*) delta",
    "beta": "alpha.gamma* (*) alpha + beta.delta* (*) alpha + beta (*) beta + gamma* (*) gamma"
    " + alpha*.beta (*) delta + gamma*.delta (*) delta",
    "gamma": "gamma.alpha* (*) alpha + delta.beta* (*) alpha + gamma (*) beta + beta* (*) gamma"
    " + beta*.alpha (*) delta + delta*.gamma (*) delta",
    "delta": "gamma.gamma* (*) alpha + delta.delta* (*) alpha + delta (*) beta + delta* (*) gamma"
    " + beta*.beta (*) delta + delta*.delta (*) delta",
}


def qmap_M2() -> QuantumSemigroup:
    """Quantum family of all maps of qs(M2), acting by ``Φ(n) = [[α, β], [γ, δ]]``."""
    pres = make_presentation(["alpha", "beta", "gamma", "delta"], _M2_RELATIONS, name="QMap(qs(M2))")
    counit = {"alpha": 0, "beta": 1, "gamma": 0, "delta": 0}
    g = pres.gens()
    action = QuantumFamily(matrix_algebra_2(), pres, {"n": [g["alpha"], g["beta"], g["gamma"], g["delta"]]})
    return QuantumSemigroup(pres, dict(_M2_DELTA), counit, action, pres.name, defined_by_action=True)


_PHI_RELATIONS = [
    "alpha*.alpha + gamma^2 + alpha.alpha* + beta^2 = 1",
    "alpha*.beta + gamma.alpha* + alpha.gamma + beta.alpha = 0",
    "alpha^2 + beta.gamma = 0",
    "alpha.beta + beta.alpha* = 0",
    "gamma.alpha + alpha*.gamma = 0",
]

_PHI_DELTA = {
    "alpha": "1 (*) alpha + (alpha*.alpha + gamma^2) (*) (alpha* - alpha) + alpha (*) beta + alpha* (*) gamma",
    "beta": "(alpha.gamma + beta.alpha) (*) (alpha - alpha*) + beta (*) beta + gamma (*) gamma",
    "gamma": "(beta.alpha + alpha.gamma) (*) (alpha* - alpha) + gamma (*) beta + beta (*) gamma",
}


def m2_commutant_phi() -> QuantumSemigroup:
    """Commutant of the swap automorphism of M2, written out by hand.

    Generators α, β = β*, γ = γ*; the action is ``Φ(n) = [[α, β], [γ, α*]]``.
    """
    pres = make_presentation(
        ["alpha", ("beta", True), ("gamma", True)], _PHI_RELATIONS, name="QMap_phi(qs(M2))"
    )
    counit = {"alpha": 0, "beta": 1, "gamma": 0}
    g = pres.gens()
    action = QuantumFamily(
        matrix_algebra_2(), pres, {"n": [g["alpha"], g["beta"], g["gamma"], pres.gen("alpha", True)]}
    )
    return QuantumSemigroup(pres, dict(_PHI_DELTA), counit, action, pres.name, defined_by_action=True)


def commutant_XY(S: QuantumSemigroup) -> tuple:
    """``X = α + α*`` and ``Y = β + γ`` in the commutant of φ."""
    a = S.gen("alpha")
    return a + a.star(), S.gen("beta") + S.gen("gamma")


BUILTINS = {
    "qmap_x1": lambda: qmap_Xn(1),
    "qmap_x2": lambda: qmap_Xn(2),
    "qmap_x3": lambda: qmap_Xn(3),
    "qmap_x4": lambda: qmap_Xn(4),
    "qmap_x5": lambda: qmap_Xn(5),
    "qmap_m2": qmap_M2,
    "m2_commutant_phi": m2_commutant_phi,
}


def lookup(name: str) -> QuantumSemigroup:
    key = name.lower()
    if key.startswith("qmap_x") and key[6:].isdigit():
        return qmap_Xn(int(key[6:]))
    try:
        return BUILTINS[key]()
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}") from None
