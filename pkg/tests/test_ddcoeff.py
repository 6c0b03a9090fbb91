import random

import pytest

from oracle import STRANDS, TORUS, TRIVIAL, delta_squared
from twk.cmdfunctor import cmd_object
from twk.ddcoeff import (
    CoefficientSystem, DDBimodule, GeneralizedCoefficientSystem, check_coefficients,
    check_generalized, dd_check, dd_term, from_coefficients, interval_block, semi_extend,
    to_coefficients,
)
from twk.errors import CoefficientRelationViolated
from twk.generate import random_map, random_typewriter
from twk.kernel.algebra import strand_algebra_torus, tensor_algebra, torus_algebra, trivial_algebra
from twk.models import cfdd_identity, identity_typewriter, model_m
from twk.typed import Morphism, TypeDStructure, identity_morphism


def test_cfdd_identity_square_zero_by_oracle():
    N = cfdd_identity()
    assert delta_squared(N, STRANDS, TORUS) == []
    assert dd_check(N)


def test_cmd_of_m_square_zero_by_oracle():
    N = cmd_object(model_m())
    assert delta_squared(N, STRANDS, TORUS) == []
    assert dd_check(N)


def test_swapped_labels_fail():
    """Pairing rho1 with f and rho3 with h breaks the structure relation."""
    A = strand_algebra_torus()
    alg = tensor_algebra(A, torus_algebra())

    def term(left, right):
        return dd_term(alg, A.element(left), right)

    xy = term("rho1", "f") ^ term("rho3", "h") ^ term("rho123", "fgh")
    bad = DDBimodule(A, {"x": ("j0", "i0"), "y": ("j1", "i1")},
                     {("x", "y"): xy, ("y", "x"): term("rho2", "g")})
    assert delta_squared(bad, STRANDS, TORUS) != []
    assert not dd_check(bad)


def test_dd_check_rejects_plain_structure():
    N = TypeDStructure(torus_algebra(), {"x": "i0"})
    assert not dd_check(N)


def test_random_cmd_objects_satisfy_oracle():
    rng = random.Random(3)
    for alg, oracle in ((trivial_algebra(), TRIVIAL), (strand_algebra_torus(), STRANDS)):
        for _ in range(25):
            N = cmd_object(random_typewriter(alg, rng))
            assert delta_squared(N, oracle, TORUS) == []


def test_coefficient_round_trip():
    c = to_coefficients(cfdd_identity())
    assert c["f"].coeffs == {("x", "y"): strand_algebra_torus().element("rho3")}
    assert c["h"].coeffs == {("x", "y"): strand_algebra_torus().element("rho1")}
    assert from_coefficients(c) == cfdd_identity()


def test_broken_fg_is_named():
    A = trivial_algebra()
    e = A.element("e")
    M0 = TypeDStructure(A, {"a": "e"})
    M1 = TypeDStructure(A, {"b": "e"})
    D = Morphism(M0, M1, {("a", "b"): e})
    G = Morphism(M1, M0, {("b", "a"): e})
    c = CoefficientSystem(M0, M1, {"f": D, "g": G, "h": D})
    assert not check_coefficients(c)
    with pytest.raises(CoefficientRelationViolated) as err:
        from_coefficients(c)
    assert "fg" in err.value.relations
    assert "f" not in err.value.relations


@pytest.mark.parametrize("I,blocks", [
    ("0", (1, 0)), ("1", (0, 1)), ("2", (1, 0)), ("3", (0, 1)), ("01", (1, 1)), ("30", (0, 0)),
    ("012", (1, 0)), ("301", (0, 1)), ("0123", (1, 1)), ("1230", (0, 0)),
])
def test_interval_blocks(I, blocks):
    assert interval_block(I) == blocks


def test_zero_dd_has_no_semi_extension():
    """With every known map zero each identity relation reads 0 = id."""
    for left in (trivial_algebra(), strand_algebra_torus()):
        v = left.vertices[0]
        M = DDBimodule(left, {"x": (v, "i0"), "y": (v, "i1")})
        assert dd_check(M)
        assert semi_extend(M) is None


def test_identity_typewriter_hand_solution():
    tw = identity_typewriter()
    c = to_coefficients(cmd_object(tw))
    one0, one1 = identity_morphism(c.M0), identity_morphism(c.M1)
    hand = GeneralizedCoefficientSystem(c, {"01": one1, "30": one0})
    assert check_generalized(hand)
    solved = semi_extend(cmd_object(tw))
    assert solved is not None and check_generalized(solved)


def test_check_generalized_catches_perturbation():
    rng = random.Random(4)
    tw = identity_typewriter()
    G = semi_extend(cmd_object(tw))
    for I in ("01", "30", "0", "012"):
        m = G.extra[I]
        bumped = dict(G.extra)
        bumped[I] = m + random_map(rng, m.source, m.target, 1.0)
        assert not check_generalized(GeneralizedCoefficientSystem(G.base, bumped))


def test_semi_extend_none_for_m():
    assert semi_extend(cmd_object(model_m())) is None


def test_unchecked_maps_become_a_caveat():
    tw = identity_typewriter()
    G = semi_extend(cmd_object(tw))
    G2 = GeneralizedCoefficientSystem(G.base, G.extra, {"12301": G.extra["01"]})
    report = check_generalized(G2)
    assert report.ok and any("12301" in c for c in report.caveats)
