import random

import pytest

from twk.cmdfunctor import (
    cmd_homotopy, cmd_morphism, cmd_object, dd_homotopy_check, departure_to_generalized, uncmd,
    uncmd_homotopy, uncmd_morphism,
)
from twk.ddcoeff import check_generalized
from twk.errors import EndpointMismatch, HomotopyIdentityFailed
from twk.generate import (
    departure_data, random_homotopy, random_map, random_partially_extendable, random_typewriter,
    random_typewriter_morphism,
)
from twk.kernel.algebra import strand_algebra_torus, trivial_algebra
from twk.models import identity_typewriter, model_m
from twk.typed import Morphism, identity_morphism
from twk.typewriter import (
    TypewriterMorphism, check_typewriter_morphism, compose_typewriter_morphisms,
    identity_typewriter_morphism,
)

ALGS = [trivial_algebra(), strand_algebra_torus()]


def test_cmd_of_m_by_hand():
    A = strand_algebra_torus()
    N = cmd_object(model_m())
    alg = N.algebra
    names = {k: sorted(alg.basis[i] for i in c) for k, c in N.arrows.items()}
    assert names == {("a", "b"): sorted([("rho1", "h"), ("rho3", "f"), ("rho123", "fgh")]),
                     ("b", "a"): [("rho2", "g")]}
    assert N.generators == {"a": ("j0", "i0"), "b": ("j1", "i1")}
    assert uncmd(N) == model_m()
    assert A is alg.left


@pytest.mark.parametrize("alg", ALGS, ids=lambda a: a.name)
def test_closedness_of_cmd_map_matches_typewriter_check(alg):
    """A random five-part map is a typewriter morphism exactly when its DD image is closed."""
    rng = random.Random(21)
    seen = {True: 0, False: 0}
    for _ in range(40):
        M, N = random_typewriter(alg, rng), random_typewriter(alg, rng)
        parts = {
            "t0": random_map(rng, M.M0, N.M0), "t1": random_map(rng, M.M1, N.M1),
            "t_f": random_map(rng, M.M0, N.M1), "t_h": random_map(rng, M.M0, N.M1),
            "t_cr": random_map(rng, M.cone_f, N.cone_h),
        }
        T = TypewriterMorphism(M, N, **parts)
        ok = check_typewriter_morphism(T).ok
        assert cmd_morphism(T).is_closed() == ok
        seen[ok] += 1
        V = random_typewriter_morphism(rng, M, N)
        assert cmd_morphism(V).is_closed()
        assert uncmd_morphism(cmd_morphism(V), M, N) == V
    assert seen[False] > 0


def test_identity_and_composition():
    rng = random.Random(22)
    for alg in ALGS:
        for _ in range(10):
            M, N, P = (random_typewriter(alg, rng) for _ in range(3))
            assert cmd_morphism(identity_typewriter_morphism(M)) == identity_morphism(cmd_object(M))
            T, U = random_typewriter_morphism(rng, M, N), random_typewriter_morphism(rng, N, P)
            assert cmd_morphism(compose_typewriter_morphisms(T, U)) == cmd_morphism(T).then(cmd_morphism(U))


def test_homotopies_transport_both_ways():
    rng = random.Random(23)
    for alg in ALGS:
        for _ in range(10):
            M, N = random_typewriter(alg, rng), random_typewriter(alg, rng)
            T = random_typewriter_morphism(rng, M, N)
            H, U = random_homotopy(rng, T)
            DH = cmd_homotopy(H)
            assert dd_homotopy_check(DH, cmd_morphism(T), cmd_morphism(U))
            assert uncmd_homotopy(DH, T, U).parts() == H.parts()


def test_uncmd_morphism_checks_endpoints():
    M = model_m()
    with pytest.raises(EndpointMismatch):
        uncmd_morphism(identity_morphism(cmd_object(identity_typewriter())), M, M)


def test_departure_gives_generalized_system():
    rng = random.Random(24)
    for alg in ALGS:
        for _ in range(10):
            M = random_partially_extendable(alg, rng)
            d_cd, h_fwd, h_bwd = departure_data(M)
            G = departure_to_generalized(M, d_cd, h_fwd, h_bwd)
            assert check_generalized(G)
            assert set(G.unchecked) == {"12301", "30123"}


def test_departure_rejects_bad_homotopy():
    M = identity_typewriter()
    d_cd, h_fwd, h_bwd = departure_data(M)
    e = trivial_algebra().element("e")
    # d of this map is the nonzero map 0:x0 -> 0:x0, so the identity relation breaks
    bump = Morphism(M.cone_f, M.cone_f, {("1:x1", "0:x0"): e})
    assert not bump.is_closed()
    with pytest.raises(HomotopyIdentityFailed):
        departure_to_generalized(M, d_cd, h_fwd + bump, h_bwd)


def test_departure_of_identity_typewriter_by_hand():
    """Both cones are contractible, so zero is a homotopy inverse and the contractions carry everything."""
    M = identity_typewriter()
    e = trivial_algebra().element("e")
    zero = Morphism.zero(M.cone_h, M.cone_f)
    k_f = Morphism(M.cone_f, M.cone_f, {("1:x1", "0:x0"): e})
    k_h = Morphism(M.cone_h, M.cone_h, {("1:x1", "0:x0"): e})
    G = departure_to_generalized(M, zero, k_f, k_h)
    assert check_generalized(G)
    assert G.extra["230"].coeffs == {("x1", "x0"): e}
    assert G.extra["012"].coeffs == {("x1", "x0"): e}
