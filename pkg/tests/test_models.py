import random

import pytest

from twk.cmdfunctor import cmd_object
from twk.ddcoeff import dd_check, semi_extend
from twk.errors import CoefficientRelationViolated, InvalidFlipModule
from twk.generate import random_closed_morphism, random_flip_module, random_structure
from twk.kernel.algebra import strand_algebra_torus, torus_algebra, trivial_algebra
from twk.models import (
    FlipModule, bsd_infty, cfdd_identity, check_flip, div_functor, identity_typewriter, model_m,
    verify_m_is_cfdd,
)
from twk.typed import Morphism, TypeDStructure, check_structure, cone, identity_morphism
from twk.typewriter import Typewriter, check_typewriter


def test_m_is_cfdd():
    assert verify_m_is_cfdd()


def test_swapped_m_is_not_cfdd():
    m = model_m()
    swapped = Typewriter(m.M0, m.M1, d_f=m.d_h, d_h=m.d_f, d_g=m.d_g, d_fgh=m.d_fgh)
    assert not check_typewriter(swapped)
    with pytest.raises(CoefficientRelationViolated) as err:
        verify_m_is_cfdd(swapped)
    assert sorted(err.value.relations) == ["fg", "gh"]


def test_cfdd_identity_shape():
    N = cfdd_identity()
    assert N.generators == {"x": ("j0", "i0"), "y": ("j1", "i1")}
    assert dd_check(N)


def test_identity_typewriter_is_valid():
    assert check_typewriter(identity_typewriter())
    assert check_typewriter(identity_typewriter(strand_algebra_torus()))


def zero_flip(M):
    Z = Morphism.zero(M, M)
    C = cone(Z)
    return FlipModule(M, Z, Z, identity_morphism(C))


def expected_zero_flip(M):
    """Two copies of M at i0 and i1, an fg loop on each x_0 and a gh loop on each x_1."""
    T = torus_algebra()
    gens = {f"{g}_0": "i0" for g in M.generators}
    gens.update({f"{g}_1": "i1" for g in M.generators})
    arrows = {}
    for (s, t) in M.arrows:
        arrows[(f"{s}_0", f"{t}_0")] = T.element("i0")
        arrows[(f"{s}_1", f"{t}_1")] = T.element("i1")
    for g in M.generators:
        arrows[(f"{g}_0", f"{g}_0")] = T.element("fg")
        arrows[(f"{g}_1", f"{g}_1")] = T.element("gh")
    return TypeDStructure(T, gens, arrows)


def test_zero_flip_by_hand():
    rng = random.Random(41)
    for size in (1, 2, 3, 4):
        M = random_structure(trivial_algebra(), rng, size, "m")
        out = bsd_infty(zero_flip(M))
        assert len(out) == 2 * size
        assert out == expected_zero_flip(M)
        assert check_structure(out)


def test_random_flips():
    rng = random.Random(42)
    for _ in range(30):
        F = random_flip_module(rng)
        assert check_flip(F)
        assert check_typewriter(div_functor(F))
        assert check_structure(bsd_infty(F))


def test_invalid_flip_rejected():
    M = TypeDStructure(trivial_algebra(), {"m": "e"})
    U = identity_morphism(M)
    F = FlipModule(M, U, U, identity_morphism(cone(U)))
    report = check_flip(F)
    assert not report and "UV != 0" in report.violations
    with pytest.raises(InvalidFlipModule):
        div_functor(F)


def test_flip_over_wrong_algebra_rejected():
    A = strand_algebra_torus()
    M = TypeDStructure(A, {"m": "j0"})
    Z = Morphism.zero(M, M)
    assert not check_flip(FlipModule(M, Z, Z, identity_morphism(cone(Z))))


def test_bsd_of_zero_flip_matches_cmd():
    M = TypeDStructure(trivial_algebra(), {"m": "e"})
    F = zero_flip(M)
    assert len(cmd_object(div_functor(F))) == 2


def test_perturbed_m_is_not_cfdd():
    m = model_m()
    for drop in ("d_g", "d_fgh"):
        parts = {k: getattr(m, k) for k in ("d_f", "d_h", "d_g", "d_fgh")}
        del parts[drop]
        perturbed = Typewriter(m.M0, m.M1, **parts)
        assert check_typewriter(perturbed)
        assert not verify_m_is_cfdd(perturbed)


def test_relabelled_m_is_still_cfdd():
    assert verify_m_is_cfdd(model_m().relabel({"a": "p", "b": "q"}))


def test_semi_extend_of_cfdd_identity_is_none():
    assert semi_extend(cfdd_identity()) is None


def test_nilpotent_u_flip_is_valid():
    A = trivial_algebra()
    e = A.element("e")
    M = TypeDStructure(A, {"m0": "e", "m1": "e"})
    U = Morphism(M, M, {("m0", "m1"): e})
    V = Morphism.zero(M, M)
    rng = random.Random(43)
    for _ in range(10):
        flip = random_closed_morphism(rng, cone(U), cone(V))
        F = FlipModule(M, U, V, flip)
        assert check_flip(F)
        assert check_typewriter(div_functor(F))


def test_zero_module_flip():
    M = TypeDStructure(trivial_algebra(), {})
    out = bsd_infty(zero_flip(M))
    assert len(out) == 0 and not out.arrows


def test_bsd_reduced_iff_complex_has_no_differential():
    rng = random.Random(44)
    seen = set()
    for _ in range(60):
        F = random_flip_module(rng)
        reduced = bsd_infty(F).is_reduced()
        assert reduced == (not F.complex.arrows)
        seen.add(reduced)
    assert seen == {True, False}
