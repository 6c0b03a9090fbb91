import random

import pytest

from oracle import compose_oracle, delta_squared, name_terms, oracle_for
from twk.errors import NotClosed
from twk.generate import closed_basis, random_closed_morphism, random_map, random_structure
from twk.kernel.algebra import strand_algebra_torus, torus_algebra, torus_iso, trivial_algebra
from twk.typed import (
    MapSpace, Morphism, TypeDStructure, check_structure, cone, direct_sum, equivalent,
    find_isomorphism, homotopy_check, homotopy_inverse, identity_morphism, idempotent_slice,
    is_contractible, is_homotopy_equivalence, reduce, solve_maps, split_cone_map, transport,
)

ALGEBRAS = [trivial_algebra(), strand_algebra_torus(), torus_algebra()]


def names_of(m):
    alg = m.algebra if isinstance(m, Morphism) else m.algebra
    coeffs = m.coeffs if isinstance(m, Morphism) else m.arrows
    return {k: set(name_terms(alg, c)) for k, c in coeffs.items() if c}


def random_arrows(alg, rng, n):
    """Arbitrary idempotent-compatible arrows, usually violating the square-zero relation."""
    gens = {f"g{i}": rng.choice(alg.vertices) for i in range(n)}
    N = TypeDStructure(alg, gens)
    return TypeDStructure(alg, gens, random_map(rng, N, N, 0.4).coeffs)


@pytest.mark.parametrize("alg", ALGEBRAS, ids=lambda a: a.name)
def test_check_structure_agrees_with_delta_squared_oracle(alg):
    rng = random.Random(5)
    agree_bad = 0
    for _ in range(80):
        N = random_arrows(alg, rng, rng.randint(1, 4))
        bad = delta_squared(N, oracle_for(alg))
        assert bool(check_structure(N)) == (not bad)
        agree_bad += bool(bad)
    for _ in range(40):
        N = random_structure(alg, rng)
        assert delta_squared(N, oracle_for(alg)) == []
        assert check_structure(N)
    if alg.name != "trivial":
        assert agree_bad > 0


@pytest.mark.parametrize("alg", ALGEBRAS[1:], ids=lambda a: a.name)
def test_composition_matches_oracle(alg):
    rng = random.Random(6)
    for _ in range(40):
        A, B, C = (random_structure(alg, rng, prefix=p) for p in "abc")
        phi, psi = random_map(rng, A, B, 0.5), random_map(rng, B, C, 0.5)
        got = names_of(phi.then(psi))
        want = compose_oracle(names_of(phi), names_of(psi), oracle_for(alg))
        assert got == want


def test_cone_of_closed_map_is_valid_and_open_map_rejected():
    A = strand_algebra_torus()
    rng = random.Random(7)
    for _ in range(30):
        N, P = random_structure(A, rng, prefix="n"), random_structure(A, rng, prefix="p")
        phi = random_closed_morphism(rng, N, P)
        C = cone(phi)
        assert check_structure(C)
        assert sorted(C.generators) == sorted([f"0:{g}" for g in N.generators] + [f"1:{g}" for g in P.generators])
    M0 = TypeDStructure(A, {"a": "j0"})
    M1 = TypeDStructure(A, {"b": "j0", "c": "j1"}, {("b", "c"): A.element("rho1")})
    open_map = Morphism(M0, M1, {("a", "b"): A.element("j0")})
    assert not open_map.is_closed()
    with pytest.raises(NotClosed):
        cone(open_map)


@pytest.mark.parametrize("alg", ALGEBRAS, ids=lambda a: a.name)
def test_reduction_identities(alg):
    rng = random.Random(8)
    for _ in range(40):
        N = random_structure(alg, rng, rng.randint(1, 6))
        red = reduce(N)
        assert red.reduced.is_reduced()
        assert check_structure(red.reduced)
        assert red.forward.is_closed() and red.backward.is_closed()
        assert red.backward.then(red.forward) == identity_morphism(red.reduced)
        assert homotopy_check(red.homotopy, red.forward.then(red.backward), identity_morphism(N))


def test_reduction_of_acyclic_pair():
    A = strand_algebra_torus()
    N = TypeDStructure(A, {"x": "j0", "y": "j0"}, {("x", "y"): A.element("j0")})
    assert is_contractible(N)
    assert len(reduce(N).reduced) == 0


def test_homotopy_inverse_on_identity_and_perturbed_maps():
    A = torus_algebra()
    rng = random.Random(9)
    for _ in range(30):
        N = random_structure(A, rng, prefix="x")
        K = random_map(rng, N, N)
        phi = identity_morphism(N) + K.differential()
        assert is_homotopy_equivalence(phi)
        inv = homotopy_inverse(phi)
        assert homotopy_check(inv.forward_homotopy, phi.then(inv.inverse), identity_morphism(N))
        assert homotopy_check(inv.backward_homotopy, inv.inverse.then(phi), identity_morphism(N))


def test_zero_map_is_not_an_equivalence():
    A = trivial_algebra()
    N = TypeDStructure(A, {"x": "e"})
    P = TypeDStructure(A, {"y": "e"})
    assert homotopy_inverse(Morphism.zero(N, P)) is None


def test_find_isomorphism_recovers_shuffles():
    rng = random.Random(10)
    for alg in ALGEBRAS:
        for _ in range(20):
            N = random_structure(alg, rng, rng.randint(1, 5))
            names = list(N.generators)
            perm = names[:]
            rng.shuffle(perm)
            P = N.relabel({g: "q" + h for g, h in zip(names, perm)})
            iso = find_isomorphism(N, P)
            assert iso is not None
            assert N.relabel(iso) == P


def test_equivalence_of_sum_with_contractible_piece():
    A = strand_algebra_torus()
    rng = random.Random(11)
    for _ in range(20):
        N = random_structure(A, rng, prefix="n")
        v = rng.choice(A.vertices)
        Z = TypeDStructure(A, {"z0": v, "z1": v}, {("z0", "z1"): A.unit(v)})
        assert equivalent(N, direct_sum(N, Z))


def test_idempotent_slice_by_hand():
    A = strand_algebra_torus()
    N = TypeDStructure(A, {"x": "j0", "y": "j0", "z": "j1"},
                       {("x", "y"): A.element("j0"), ("x", "z"): A.element("rho1")})
    s0 = idempotent_slice(N, 0)
    assert sorted(s0.generators) == ["x", "y"]
    assert list(s0.arrows) == [("x", "y")]
    assert sorted(idempotent_slice(N, 1).generators) == ["z"]


def test_transport_along_torus_iso():
    T, A = torus_algebra(), strand_algebra_torus()
    N = TypeDStructure(T, {"a": "i0", "b": "i1"}, {("a", "b"): T.element("f", "h")})
    P = transport(N, A, torus_iso())
    assert P.generators == {"a": "j0", "b": "j1"}
    assert P.arrows == {("a", "b"): A.element("rho1", "rho3")}


def test_solve_maps_finds_closed_map_only_when_one_exists():
    A = strand_algebra_torus()
    N = TypeDStructure(A, {"x": "j0"})
    P = TypeDStructure(A, {"y": "j1"})
    space = MapSpace({"phi": (N, P)})
    target = Morphism(N, P, {("x", "y"): A.element("rho1")})
    sol = solve_maps(space, lambda m: {"eq": m["phi"] + target})
    assert sol["phi"] == target
    assert len(closed_basis(N, P)) == 3  # rho1, rho3, rho123


def test_split_cone_map_round_trip():
    coeffs = {("0:a", "1:b"): frozenset({1}), ("1:c", "0:d"): frozenset({2})}
    blocks = split_cone_map(coeffs)
    assert blocks[(0, 1)] == {("a", "b"): frozenset({1})}
    assert blocks[(1, 0)] == {("c", "d"): frozenset({2})}
    assert blocks[(0, 0)] == {} and blocks[(1, 1)] == {}


def test_reduced_input_unchanged_and_equivalent_to_its_reduction():
    rng = random.Random(17)
    for alg in ALGEBRAS:
        for _ in range(20):
            N = random_structure(alg, rng, rng.randint(1, 5))
            R = reduce(N).reduced
            assert reduce(R).reduced == R
            assert equivalent(N, R)


def test_mixed_coefficient_is_cancelled():
    """An arrow labelled idempotent plus a path is invertible and gets cancelled too."""
    A = torus_algebra()
    N = TypeDStructure(A, {"x": "i0", "y": "i0"}, {("x", "y"): A.element("i0", "fg")})
    assert check_structure(N)
    assert is_contractible(N)


def test_flattened_cfdd_and_m_cr_are_not_trivial():
    from twk.models import cfdd_identity, model_m

    N = cfdd_identity()
    flat = TypeDStructure(N.algebra, N.generators, N.arrows)
    assert not is_contractible(flat)
    assert not is_homotopy_equivalence(model_m().carriage_return)


def test_zero_map_between_reduced_structures_is_not_an_equivalence():
    A = strand_algebra_torus()
    N = TypeDStructure(A, {"x": "j0"})
    P = TypeDStructure(A, {"y": "j0"})
    assert not is_homotopy_equivalence(Morphism.zero(N, P))
