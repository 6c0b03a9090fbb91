"""The functor from typewriters to DD bimodules over (A, torus) and its inverse.

Objects go through the coefficient-map dictionary of ``ddcoeff``.  Morphisms
and homotopies use the same dictionary: the ``M0``/``M1`` blocks carry the
idempotent right label, ``T_f``/``T_h`` the labels ``f``/``h``, and the four
blocks of ``T_CR`` the labels ``g``, ``fg``, ``gh``, ``fgh``.
"""

from __future__ import annotations

from typing import Mapping

from .ddcoeff import (
    RIGHT_VERTICES, CoefficientSystem, DDBimodule, GeneralizedCoefficientSystem,
    check_generalized, dd_term, from_coefficients, to_coefficients,
)
from .errors import (
    CoefficientRelationViolated, EndpointMismatch, ForeignElement, HomotopyIdentityFailed,
    NotClosed,
)
from .kernel.algebra import TensorAlgebra, torus_algebra
from .typed import Morphism, TypeDStructure, _add_into, homotopy_check, identity_morphism, split_cone_map
from .typewriter import (
    CR_BLOCKS, Typewriter, TypewriterHomotopy, TypewriterMorphism,
)


def cmd_object(M: Typewriter) -> DDBimodule:
    c = CoefficientSystem(M.M0, M.M1, {name: M.component(name) for name in
                                       ("f", "g", "h", "fg", "gh", "fgh")})
    return from_coefficients(c)


def uncmd(M: TypeDStructure) -> Typewriter:
    alg = M.algebra
    if not isinstance(alg, TensorAlgebra) or alg.right != torus_algebra():
        raise ForeignElement("uncmd needs a DD bimodule whose right algebra is the torus algebra")
    c = to_coefficients(M)
    return Typewriter(c.M0, c.M1, **{"d_" + k: v for k, v in c.maps.items()})


def _dd_map(source: DDBimodule, target: DDBimodule, parts: Mapping[str, Mapping]) -> Morphism:
    alg = source.algebra
    coeffs: dict = {}
    for right_name, comps in parts.items():
        for key, a in comps.items():
            _add_into(coeffs, key, dd_term(alg, a, right_name))
    return Morphism(source, target, coeffs, check=False)


def _labelled_parts(p0: Morphism, p1: Morphism, p_f: Morphism, p_h: Morphism,
                    p_cr: Morphism) -> dict:
    blocks = split_cone_map(p_cr.coeffs)
    parts = {RIGHT_VERTICES[0]: p0.coeffs, RIGHT_VERTICES[1]: p1.coeffs,
             "f": p_f.coeffs, "h": p_h.coeffs}
    for name, key in CR_BLOCKS.items():
        parts[name] = blocks[key]
    return parts


def cmd_morphism(T: TypewriterMorphism) -> Morphism:
    return _dd_map(cmd_object(T.source), cmd_object(T.target),
                   _labelled_parts(T.t0, T.t1, T.t_f, T.t_h, T.t_cr))


def cmd_homotopy(H: TypewriterHomotopy) -> Morphism:
    M, N = H.source.source, H.source.target
    return _dd_map(cmd_object(M), cmd_object(N),
                   _labelled_parts(H.h0, H.h1, H.h_f, H.h_h, H.h_cr))


def _split_dd_map(phi: Morphism, M: Typewriter, N: Typewriter) -> dict:
    """Components of a DD map sorted by right label, as maps between the blocks of M and N."""
    alg = phi.algebra
    T = alg.right
    parts: dict = {}
    for key, c in phi.coeffs.items():
        for k in c:
            i, j = alg.split(k)
            name = T.basis[j]
            _add_into(parts.setdefault(name, {}), key, frozenset({i}))
    out = {
        "0": Morphism(M.M0, N.M0, parts.get(RIGHT_VERTICES[0], {})),
        "1": Morphism(M.M1, N.M1, parts.get(RIGHT_VERTICES[1], {})),
        "f": Morphism(M.M0, N.M1, parts.get("f", {})),
        "h": Morphism(M.M0, N.M1, parts.get("h", {})),
    }
    cr = {}
    for name, (a, b) in CR_BLOCKS.items():
        src_slot, tgt_slot = a, b
        for (s, t), e in parts.get(name, {}).items():
            cr[(f"{src_slot}:{s}", f"{tgt_slot}:{t}")] = e
    out["cr"] = Morphism(M.cone_f, N.cone_h, cr)
    return out


def uncmd_morphism(phi: Morphism, M: Typewriter, N: Typewriter) -> TypewriterMorphism:
    if phi.source != cmd_object(M) or phi.target != cmd_object(N):
        raise EndpointMismatch("DD morphism does not run cmd(M) -> cmd(N)")
    p = _split_dd_map(phi, M, N)
    return TypewriterMorphism(M, N, p["0"], p["1"], p["f"], p["h"], p["cr"])


def uncmd_homotopy(H: Morphism, T: TypewriterMorphism, U: TypewriterMorphism) -> TypewriterHomotopy:
    p = _split_dd_map(H, T.source, T.target)
    return TypewriterHomotopy(T, U, p["0"], p["1"], p["f"], p["h"], p["cr"])


def dd_homotopy_check(H: Morphism, phi: Morphism, psi: Morphism) -> bool:
    return homotopy_check(H, phi, psi)


# ---------------------------------------------------------------- departures

# blocks of the departure D_CD: Cone(D_h) -> Cone(D_f), keyed by (source slot, target slot)
CD_BLOCKS = {"0": (1, 0), "30": (0, 0), "01": (1, 1), "301": (0, 1)}
# blocks of the homotopy on Cone(D_f) (first) and on Cone(D_h) (second)
HFWD_BLOCKS = {"1230": (0, 0), "230": (1, 0), "2301": (1, 1), "12301": (0, 1)}
HBWD_BLOCKS = {"3012": (0, 0), "012": (1, 0), "0123": (1, 1), "30123": (0, 1)}


def departure_to_generalized(M: Typewriter, d_cd: Morphism, h_fwd: Morphism,
                             h_bwd: Morphism) -> GeneralizedCoefficientSystem:
    """Generalized coefficient maps read off a homotopy inverse of the carriage return.

    ``h_fwd`` lives on ``Cone(D_f)`` with ``d h_fwd = D_CR D_CD + id`` and
    ``h_bwd`` on ``Cone(D_h)`` with ``d h_bwd = D_CD D_CR + id`` (application order).
    The length-five blocks are stored in ``unchecked``.
    """
    cr = M.carriage_return
    if d_cd.source != M.cone_h or d_cd.target != M.cone_f:
        raise EndpointMismatch("departure must run Cone(D_h) -> Cone(D_f)")
    if not d_cd.is_closed():
        raise NotClosed("departure is not closed")
    if not homotopy_check(h_fwd, cr.then(d_cd), identity_morphism(M.cone_f)):
        raise HomotopyIdentityFailed("forward homotopy does not contract D_CR D_CD + id")
    if not homotopy_check(h_bwd, d_cd.then(cr), identity_morphism(M.cone_h)):
        raise HomotopyIdentityFailed("backward homotopy does not contract D_CD D_CR + id")
    B = (M.M0, M.M1)
    extra, unchecked = {}, {}
    for table, phi in ((CD_BLOCKS, d_cd), (HFWD_BLOCKS, h_fwd), (HBWD_BLOCKS, h_bwd)):
        blocks = split_cone_map(phi.coeffs)
        for name, (i, j) in table.items():
            m = Morphism(B[i], B[j], blocks[(i, j)], check=False)
            (unchecked if len(name) == 5 else extra)[name] = m
    c = CoefficientSystem(M.M0, M.M1, {k: M.component(k) for k in ("f", "g", "h", "fg", "gh", "fgh")})
    G = GeneralizedCoefficientSystem(c, extra, unchecked)
    report = check_generalized(G)
    if not report:
        raise CoefficientRelationViolated(report.violations)
    return G


__all__ = [
    "cmd_object", "uncmd", "cmd_morphism", "uncmd_morphism", "cmd_homotopy", "uncmd_homotopy",
    "dd_homotopy_check", "departure_to_generalized",
]
