"""Built-in instances: the thickened-torus typewriter, CFDD of the identity, flip modules."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .cmdfunctor import cmd_object
from .ddcoeff import DDBimodule, dd_term
from .errors import ForeignElement, InvalidFlipModule
from .kernel.algebra import (
    TensorAlgebra, strand_algebra_torus, tensor_algebra, torus_algebra, trivial_algebra,
)
from .report import Report
from .typed import Morphism, TypeDStructure, cone, find_isomorphism, identity_morphism, split_cone_map
from .typewriter import CR_BLOCKS, Typewriter, TypewriterMorphism


def model_m() -> Typewriter:
    """Two one-generator structures over the strand algebra with the torus maps.

    ``D_f(a) = rho3 b`` and ``D_h(a) = rho1 b``; the carriage return has
    ``D_g(b) = rho2 a`` and ``D_fgh(a) = rho123 b``.
    """
    A = strand_algebra_torus()
    M0 = TypeDStructure(A, {"a": "j0"})
    M1 = TypeDStructure(A, {"b": "j1"})
    return Typewriter(
        M0, M1,
        d_f=Morphism(M0, M1, {("a", "b"): A.element("rho3")}),
        d_h=Morphism(M0, M1, {("a", "b"): A.element("rho1")}),
        d_g=Morphism(M1, M0, {("b", "a"): A.element("rho2")}),
        d_fgh=Morphism(M0, M1, {("a", "b"): A.element("rho123")}),
    )


def cfdd_identity() -> DDBimodule:
    """CFDD of the identity, with the right strand factors renamed into the torus algebra."""
    A = strand_algebra_torus()
    alg = tensor_algebra(A, torus_algebra())

    def term(left, right):
        return dd_term(alg, A.element(left), right)

    xy = term("rho1", "h") ^ term("rho3", "f") ^ term("rho123", "fgh")
    yx = term("rho2", "g")
    return DDBimodule(A, {"x": ("j0", "i0"), "y": ("j1", "i1")}, {("x", "y"): xy, ("y", "x"): yx})


def verify_m_is_cfdd(m: Optional[Typewriter] = None) -> bool:
    """Whether ``cmd(m)`` and CFDD of the identity agree up to renaming generators."""
    m = m if m is not None else model_m()
    return find_isomorphism(cmd_object(m), cfdd_identity()) is not None


def identity_typewriter(algebra=None) -> Typewriter:
    """One-generator complexes with ``D_f = D_h = id`` and ``D_CR`` the identity of the cone."""
    alg = algebra if algebra is not None else trivial_algebra()
    v = alg.vertices[0]
    M0 = TypeDStructure(alg, {"x0": v})
    M1 = TypeDStructure(alg, {"x1": v})
    e = alg.unit(v)
    return Typewriter(
        M0, M1,
        d_f=Morphism(M0, M1, {("x0", "x1"): e}),
        d_h=Morphism(M0, M1, {("x0", "x1"): e}),
        d_fg=identity_morphism(M0),
        d_gh=identity_morphism(M1),
    )


# ---------------------------------------------------------------- flip modules

@dataclass
class FlipModule:
    """A finite complex with chain maps ``U``, ``V`` (``UV = VU = 0``) and ``flip: Cone(U) -> Cone(V)``."""

    complex: TypeDStructure
    U: Morphism
    V: Morphism
    flip: Morphism
    inverse: Optional[Morphism] = None
    homotopy_fwd: Optional[Morphism] = None
    homotopy_bwd: Optional[Morphism] = None


def check_flip(F: FlipModule) -> Report:
    report = Report()
    M = F.complex
    if M.algebra != trivial_algebra():
        report.add("the underlying complex must be over the trivial algebra")
        return report
    for name, m in (("U", F.U), ("V", F.V)):
        if m.source != M or m.target != M:
            report.add(f"{name} is not an endomorphism of the complex")
    if not report.ok:
        return report
    from .typed import check_structure

    report.extend(check_structure(M), "complex: ")
    for name, m in (("U", F.U), ("V", F.V)):
        if not m.is_closed():
            report.add(f"{name} does not commute with the differential")
    if not F.U.then(F.V).is_zero():
        report.add("UV != 0")
    if not F.V.then(F.U).is_zero():
        report.add("VU != 0")
    if not report.ok:
        return report
    cu, cv = cone(F.U, check=False), cone(F.V, check=False)
    if F.flip.source != cu or F.flip.target != cv:
        report.add("flip does not run Cone(U) -> Cone(V)")
    elif not F.flip.is_closed():
        report.add("flip is not closed")
    if report.ok and F.inverse is not None:
        from .typed import homotopy_check

        ok = (F.homotopy_fwd is not None and F.homotopy_bwd is not None
              and homotopy_check(F.homotopy_fwd, F.flip.then(F.inverse), identity_morphism(cu))
              and homotopy_check(F.homotopy_bwd, F.inverse.then(F.flip), identity_morphism(cv)))
        if not ok:
            report.add("inverse data does not witness flip as a homotopy equivalence")
    return report


def _copy(M: TypeDStructure, slot: int) -> tuple[TypeDStructure, dict]:
    names = {g: f"{g}_{slot}" for g in M.generators}
    return M.relabel(names), names


def div_functor(F: FlipModule) -> Typewriter:
    """``(M, M; U, V; flip)`` with the two copies of ``M`` renamed ``x_0`` and ``x_1``."""
    report = check_flip(F)
    if not report:
        raise InvalidFlipModule("; ".join(report.violations))
    M0, n0 = _copy(F.complex, 0)
    M1, n1 = _copy(F.complex, 1)
    U = F.U.relabel(n0, n1, M0, M1)
    V = F.V.relabel(n0, n1, M0, M1)
    blocks = split_cone_map(F.flip.coeffs)
    parts = {}
    for name, (i, j) in CR_BLOCKS.items():
        src, sn = (M1, n1) if i else (M0, n0)
        tgt, tn = (M1, n1) if j else (M0, n0)
        parts["d_" + name] = Morphism(src, tgt, {(sn[s], tn[t]): c for (s, t), c in blocks[(i, j)].items()},
                                      check=False)
    return Typewriter(M0, M1, d_f=U, d_h=V, **parts)


def div_morphism(F: FlipModule, G: FlipModule, f: Morphism, H: Morphism) -> TypewriterMorphism:
    """The typewriter morphism ``(f, f; 0, 0; H)`` for an equivariant chain map ``f``."""
    A, B = div_functor(F), div_functor(G)
    _, a0 = _copy(F.complex, 0)
    _, a1 = _copy(F.complex, 1)
    _, b0 = _copy(G.complex, 0)
    _, b1 = _copy(G.complex, 1)
    t0 = f.relabel(a0, b0, A.M0, B.M0)
    t1 = f.relabel(a1, b1, A.M1, B.M1)
    slot_a = (a0, a1)
    slot_b = (b0, b1)
    cr = {}
    for (s, t), c in H.coeffs.items():
        i, s0 = s.split(":", 1)
        j, t0_ = t.split(":", 1)
        cr[(f"{i}:{slot_a[int(i)][s0]}", f"{j}:{slot_b[int(j)][t0_]}")] = c
    return TypewriterMorphism(A, B, t0, t1, t_cr=Morphism(A.cone_f, B.cone_h, cr))


def collapse_trivial_left(M: TypeDStructure) -> TypeDStructure:
    """View a DD bimodule with trivial left algebra as a type D structure over the right algebra."""
    alg = M.algebra
    if not isinstance(alg, TensorAlgebra) or alg.left != trivial_algebra():
        raise ForeignElement("left algebra is not the trivial algebra")
    right = alg.right
    gens = {g: rv for g, (_lv, rv) in M.generators.items()}
    arrows = {key: frozenset(alg.split(k)[1] for k in c) for key, c in M.arrows.items()}
    return TypeDStructure(right, gens, arrows, check=False)


def bsd_infty(F: FlipModule) -> TypeDStructure:
    return collapse_trivial_left(cmd_object(div_functor(F)))


def reserved_model(name: str):
    table = {"m": model_m, "cfdd-id": cfdd_identity}
    try:
        return table[name]()
    except KeyError:
        raise ForeignElement(f"unknown reserved model {name!r}") from None


__all__ = [
    "model_m", "cfdd_identity", "verify_m_is_cfdd", "identity_typewriter", "FlipModule",
    "check_flip", "div_functor", "div_morphism", "bsd_infty", "collapse_trivial_left",
    "reserved_model",
]
