"""Random valid instances for property tests.

Structures are grown from single generators by direct sums and cones of
random closed morphisms, so every output satisfies its structure relation by
construction.  Random morphisms are drawn from the solution space of the
relevant linear closedness conditions.
"""

from __future__ import annotations

import random
from typing import Optional

from .kernel.algebra import Algebra
from .models import FlipModule
from .typed import (
    MapSpace, Morphism, TypeDStructure, cone, direct_sum, homotopy_inverse, identity_morphism,
    kernel_basis, split_cone_map, unit_components,
)
from .typewriter import (
    Typewriter, TypewriterHomotopy, TypewriterMorphism, compose_typewriter_morphisms,
    identity_typewriter_morphism,
)


def _combine(rng: random.Random, basis: list, src, tgt) -> Morphism:
    out = Morphism.zero(src, tgt)
    for b in basis:
        if rng.random() < 0.5:
            out = out + b
    return out


def random_map(rng: random.Random, source: TypeDStructure, target: TypeDStructure,
               density: float = 0.3) -> Morphism:
    """An arbitrary (not necessarily closed) idempotent-compatible map."""
    comps: dict = {}
    for s, t, k in unit_components(source, target):
        if rng.random() < density:
            comps[(s, t)] = comps.get((s, t), frozenset()) ^ {k}
    return Morphism(source, target, comps, check=False)


def closed_basis(source: TypeDStructure, target: TypeDStructure) -> list[Morphism]:
    space = MapSpace({"phi": (source, target)})
    return [v["phi"] for v in kernel_basis(space, lambda m: {"d": m["phi"].differential()})]


def random_closed_morphism(rng: random.Random, source: TypeDStructure,
                           target: TypeDStructure) -> Morphism:
    return _combine(rng, closed_basis(source, target), source, target)


def _piece(alg: Algebra, rng: random.Random, budget: int) -> TypeDStructure:
    if budget <= 1:
        return TypeDStructure(alg, {"g": rng.choice(alg.vertices)})
    left = rng.randint(1, budget - 1)
    A = _piece(alg, rng, left)
    B = _piece(alg, rng, budget - left)
    A = A.relabel({g: "l" + g for g in A.generators})
    B = B.relabel({g: "r" + g for g in B.generators})
    if rng.random() < 0.3:
        return direct_sum(A, B)
    C = cone(random_closed_morphism(rng, A, B), check=False)
    return C.relabel({g: g.replace(":", "") for g in C.generators})


def random_structure(alg: Algebra, rng: random.Random, size: Optional[int] = None,
                     prefix: str = "x") -> TypeDStructure:
    """A valid structure with ``size`` generators named ``prefix0``, ``prefix1``, ..."""
    size = size if size is not None else rng.randint(1, 4)
    if size == 0:
        return TypeDStructure(alg, {})
    N = _piece(alg, rng, size)
    names = list(N.generators)
    rng.shuffle(names)
    return N.relabel({g: f"{prefix}{i}" for i, g in enumerate(names)})


def random_typewriter(alg: Algebra, rng: random.Random, sizes: tuple[int, int] = (None, None),
                      M0: Optional[TypeDStructure] = None,
                      M1: Optional[TypeDStructure] = None) -> Typewriter:
    M0 = M0 if M0 is not None else random_structure(alg, rng, sizes[0] or rng.randint(1, 2), "a")
    M1 = M1 if M1 is not None else random_structure(alg, rng, sizes[1] or rng.randint(1, 2), "b")
    d_f = random_closed_morphism(rng, M0, M1)
    d_h = random_closed_morphism(rng, M0, M1)
    cf, ch = cone(d_f, check=False), cone(d_h, check=False)
    d_cr = random_closed_morphism(rng, cf, ch)
    return Typewriter.from_carriage_return(M0, M1, d_f, d_h, d_cr)


def _morphism_space(M: Typewriter, N: Typewriter) -> MapSpace:
    return MapSpace({
        "t0": (M.M0, N.M0), "t1": (M.M1, N.M1), "t_f": (M.M0, N.M1), "t_h": (M.M0, N.M1),
        "t_cr": (M.cone_f, N.cone_h),
    })


def typewriter_morphism_basis(M: Typewriter, N: Typewriter) -> list[TypewriterMorphism]:
    space = _morphism_space(M, N)

    def residual(v: dict) -> dict:
        T = TypewriterMorphism(M, N, **v)
        return {"t0": T.t0.differential(), "t1": T.t1.differential(),
                "f": T.cone_map("f").differential(), "h": T.cone_map("h").differential(),
                "cr": T.cr_cone_map().differential()}

    return [TypewriterMorphism(M, N, **v) for v in kernel_basis(space, residual)]


def random_typewriter_morphism(rng: random.Random, M: Typewriter, N: Typewriter) -> TypewriterMorphism:
    basis = typewriter_morphism_basis(M, N)
    out = TypewriterMorphism(M, N)
    for b in basis:
        if rng.random() < 0.5:
            out = _add_tw_morphisms(out, b)
    return out


def _add_tw_morphisms(T: TypewriterMorphism, U: TypewriterMorphism) -> TypewriterMorphism:
    return TypewriterMorphism(T.source, T.target, **{k: T.parts()[k] + U.parts()[k] for k in T.parts()})


def random_homotopy(rng: random.Random, T: TypewriterMorphism,
                    density: float = 0.3) -> tuple[TypewriterHomotopy, TypewriterMorphism]:
    """A random ``H`` together with the morphism ``T + dH`` it connects ``T`` to."""
    M, N = T.source, T.target
    parts = {
        "h0": random_map(rng, M.M0, N.M0, density), "h1": random_map(rng, M.M1, N.M1, density),
        "h_f": random_map(rng, M.M0, N.M1, density), "h_h": random_map(rng, M.M0, N.M1, density),
        "h_cr": random_map(rng, M.cone_f, N.cone_h, density),
    }
    probe = TypewriterHomotopy(T, T, **parts)
    d_f = split_cone_map(probe.cone_map("f").differential().coeffs)
    d_h = split_cone_map(probe.cone_map("h").differential().coeffs)
    d_cr = split_cone_map(probe.cr_cone_map().differential().coeffs)
    U = TypewriterMorphism(
        M, N,
        T.t0 + parts["h0"].differential(),
        T.t1 + parts["h1"].differential(),
        T.t_f + Morphism(M.M0, N.M1, d_f[(0, 1)], check=False),
        T.t_h + Morphism(M.M0, N.M1, d_h[(0, 1)], check=False),
        T.t_cr + Morphism(M.cone_f, N.cone_h, d_cr[(0, 1)], check=False),
    )
    return TypewriterHomotopy(T, U, **parts), U


def random_self_equivalence(rng: random.Random, M: Typewriter) -> TypewriterMorphism:
    """A morphism homotopic to the identity, hence a homotopy equivalence."""
    _H, U = random_homotopy(rng, identity_typewriter_morphism(M))
    if rng.random() < 0.5:
        _H2, V = random_homotopy(rng, identity_typewriter_morphism(M))
        U = compose_typewriter_morphisms(U, V)
    return U


def random_partially_extendable(alg: Algebra, rng: random.Random,
                                sizes: tuple[int, int] = (None, None)) -> Typewriter:
    """``D_h = D_f + dK`` and ``D_CR`` an isomorphism perturbed by a boundary."""
    M0 = random_structure(alg, rng, sizes[0] or rng.randint(1, 2), "a")
    M1 = random_structure(alg, rng, sizes[1] or rng.randint(1, 2), "b")
    d_f = random_closed_morphism(rng, M0, M1)
    K = random_map(rng, M0, M1)
    d_h = d_f + K.differential()
    cf, ch = cone(d_f, check=False), cone(d_h, check=False)
    iso = Typewriter(M0, M1, d_f, d_h, d_fg=identity_morphism(M0), d_gh=identity_morphism(M1),
                     d_fgh=K).carriage_return
    L = random_map(rng, cf, ch)
    return Typewriter.from_carriage_return(M0, M1, d_f, d_h, iso + L.differential())


def departure_data(M: Typewriter):
    """``(D_CD, H_fwd, H_bwd)`` for a typewriter whose carriage return is an equivalence."""
    inv = homotopy_inverse(M.carriage_return)
    if inv is None:
        return None
    return inv.inverse, inv.forward_homotopy, inv.backward_homotopy


def random_flip_module(rng: random.Random, size: Optional[int] = None) -> FlipModule:
    from .kernel.algebra import trivial_algebra

    M = random_structure(trivial_algebra(), rng, size if size is not None else rng.randint(1, 3), "m")
    U = random_closed_morphism(rng, M, M)
    space = MapSpace({"V": (M, M)})

    def residual(v):
        V = v["V"]
        return {"d": V.differential(), "uv": U.then(V), "vu": V.then(U)}

    basis = kernel_basis(space, residual)
    V = _combine(rng, [b["V"] for b in basis], M, M)
    if rng.random() < 0.5:
        U, V = V, U
    cu, cv = cone(U, check=False), cone(V, check=False)
    flip = random_closed_morphism(rng, cu, cv)
    return FlipModule(M, U, V, flip)


__all__ = [
    "random_map", "closed_basis", "random_closed_morphism", "random_structure",
    "random_typewriter", "typewriter_morphism_basis", "random_typewriter_morphism",
    "random_homotopy", "random_self_equivalence", "random_partially_extendable",
    "departure_data", "random_flip_module",
]
