"""Typewriters: a pair of structures joined by two maps and a carriage return.

A typewriter ``(M0, M1; D_f, D_h; D_CR)`` has ``D_CR: Cone(D_f) -> Cone(D_h)``.
With slot 0 holding ``M0`` and slot 1 holding ``M1`` in both cones, the four
blocks of ``D_CR`` are stored separately:

    slot 1 -> slot 0   d_g
    slot 0 -> slot 0   d_fg
    slot 1 -> slot 1   d_gh
    slot 0 -> slot 1   d_fgh
"""

from __future__ import annotations

from functools import cached_property
from typing import Optional

from .errors import EndpointMismatch, NotClosed
from .report import Report
from .typed import (
    Morphism, TypeDStructure, assemble_cone_map, check_structure, cone, identity_morphism,
    is_homotopy_equivalence, split_cone_map,
)

CR_BLOCKS = {"g": (1, 0), "fg": (0, 0), "gh": (1, 1), "fgh": (0, 1)}
COMPONENTS = ("f", "h", "g", "fg", "gh", "fgh")


def _zero_or(m: Optional[Morphism], src: TypeDStructure, tgt: TypeDStructure, name: str) -> Morphism:
    if m is None:
        return Morphism.zero(src, tgt)
    if m.source != src or m.target != tgt:
        raise EndpointMismatch(f"{name} does not run between the expected structures")
    return m


class Typewriter:
    def __init__(self, M0: TypeDStructure, M1: TypeDStructure, d_f: Optional[Morphism] = None,
                 d_h: Optional[Morphism] = None, d_g: Optional[Morphism] = None,
                 d_fg: Optional[Morphism] = None, d_gh: Optional[Morphism] = None,
                 d_fgh: Optional[Morphism] = None):
        if M0.algebra != M1.algebra:
            raise EndpointMismatch("M0 and M1 live over different algebras")
        clash = set(M0.generators) & set(M1.generators)
        if clash:
            raise ValueError(f"M0 and M1 share generator names {sorted(clash)}")
        self.M0, self.M1 = M0, M1
        self.d_f = _zero_or(d_f, M0, M1, "d_f")
        self.d_h = _zero_or(d_h, M0, M1, "d_h")
        self.d_g = _zero_or(d_g, M1, M0, "d_g")
        self.d_fg = _zero_or(d_fg, M0, M0, "d_fg")
        self.d_gh = _zero_or(d_gh, M1, M1, "d_gh")
        self.d_fgh = _zero_or(d_fgh, M0, M1, "d_fgh")
        self.report: Optional[Report] = None

    @classmethod
    def from_carriage_return(cls, M0, M1, d_f, d_h, d_cr: Morphism) -> "Typewriter":
        blocks = split_cone_map(d_cr.coeffs)
        parts = {}
        for name, (i, j) in CR_BLOCKS.items():
            src = M1 if i else M0
            tgt = M1 if j else M0
            parts["d_" + name] = Morphism(src, tgt, blocks[(i, j)], check=False)
        tw = cls(M0, M1, d_f, d_h, **parts)
        if tw.carriage_return != d_cr:
            raise EndpointMismatch("carriage return does not run Cone(d_f) -> Cone(d_h)")
        return tw

    @property
    def algebra(self):
        return self.M0.algebra

    def component(self, name: str) -> Morphism:
        return getattr(self, "d_" + name)

    def components(self) -> dict:
        return {name: self.component(name) for name in COMPONENTS}

    @cached_property
    def cone_f(self) -> TypeDStructure:
        return cone(self.d_f, check=False)

    @cached_property
    def cone_h(self) -> TypeDStructure:
        return cone(self.d_h, check=False)

    @cached_property
    def carriage_return(self) -> Morphism:
        blocks = {CR_BLOCKS[name]: self.component(name).coeffs for name in CR_BLOCKS}
        return assemble_cone_map(self.cone_f, self.cone_h, blocks)

    def cone(self, which: str) -> TypeDStructure:
        return {"f": self.cone_f, "h": self.cone_h}[which]

    def __eq__(self, other):
        return (isinstance(other, Typewriter) and self.M0 == other.M0 and self.M1 == other.M1
                and self.components() == other.components())

    def __repr__(self):
        return f"<Typewriter over {self.algebra.name}: {len(self.M0)}+{len(self.M1)} generators>"

    def relabel(self, mapping) -> "Typewriter":
        M0, M1 = self.M0.relabel(mapping), self.M1.relabel(mapping)
        blocks = {"M0": M0, "M1": M1}
        parts = {}
        for name, m in self.components().items():
            src = blocks["M0" if m.source == self.M0 else "M1"]
            tgt = blocks["M0" if m.target == self.M0 else "M1"]
            parts["d_" + name] = m.relabel(mapping, mapping, src, tgt)
        return Typewriter(M0, M1, **parts)


def zero_typewriter(M0: TypeDStructure, M1: TypeDStructure) -> Typewriter:
    return Typewriter(M0, M1)


def check_typewriter(M: Typewriter) -> Report:
    report = Report()
    report.extend(check_structure(M.M0), "M0: ")
    report.extend(check_structure(M.M1), "M1: ")
    if not report.ok:
        return report
    for name in ("f", "h"):
        if not M.component(name).is_closed():
            report.add(f"D_{name} is not closed")
    if report.ok and not M.carriage_return.is_closed():
        bad = split_cone_map(M.carriage_return.differential().coeffs)
        names = [n for n, key in CR_BLOCKS.items() if bad[key]]
        report.add("D_CR is not closed (blocks " + ", ".join(names) + ")")
    return report


def is_partially_extendable(M: Typewriter) -> bool:
    if not check_typewriter(M):
        raise NotClosed("is_partially_extendable needs a valid typewriter")
    return is_homotopy_equivalence(M.carriage_return)


# ---------------------------------------------------------------- morphisms

class TypewriterMorphism:
    """``(T0, T1; T_f, T_h; T_CR)`` with ``T_CR: Cone(D_f) -> Cone(D'_h)``."""

    def __init__(self, source: Typewriter, target: Typewriter, t0: Optional[Morphism] = None,
                 t1: Optional[Morphism] = None, t_f: Optional[Morphism] = None,
                 t_h: Optional[Morphism] = None, t_cr: Optional[Morphism] = None):
        if source.algebra != target.algebra:
            raise EndpointMismatch("typewriters live over different algebras")
        self.source, self.target = source, target
        self.t0 = _zero_or(t0, source.M0, target.M0, "T0")
        self.t1 = _zero_or(t1, source.M1, target.M1, "T1")
        self.t_f = _zero_or(t_f, source.M0, target.M1, "T_f")
        self.t_h = _zero_or(t_h, source.M0, target.M1, "T_h")
        self.t_cr = _zero_or(t_cr, source.cone_f, target.cone_h, "T_CR")

    def parts(self) -> dict:
        return {"t0": self.t0, "t1": self.t1, "t_f": self.t_f, "t_h": self.t_h, "t_cr": self.t_cr}

    def __eq__(self, other):
        return (isinstance(other, TypewriterMorphism) and self.source == other.source
                and self.target == other.target and self.parts() == other.parts())

    def __repr__(self):
        return f"<TypewriterMorphism {self.source!r} -> {self.target!r}>"

    def cone_map(self, which: str) -> Morphism:
        """The induced ``Cone(D_*) -> Cone(D'_*)`` with blocks ``T0``, ``T1``, ``T_*``."""
        t_star = self.t_f if which == "f" else self.t_h
        blocks = {(0, 0): self.t0.coeffs, (1, 1): self.t1.coeffs, (0, 1): t_star.coeffs}
        return assemble_cone_map(self.source.cone(which), self.target.cone(which), blocks)

    def cr_cone_map(self) -> Morphism:
        """The induced map of cones of carriage returns, with blocks ``T_f``-map, ``T_h``-map, ``T_CR``."""
        src = cone(self.source.carriage_return, check=False)
        tgt = cone(self.target.carriage_return, check=False)
        blocks = {(0, 0): self.cone_map("f").coeffs, (1, 1): self.cone_map("h").coeffs,
                  (0, 1): self.t_cr.coeffs}
        return assemble_cone_map(src, tgt, blocks)


def check_typewriter_morphism(T: TypewriterMorphism) -> Report:
    report = Report()
    for name, m in (("T0", T.t0), ("T1", T.t1)):
        if not m.is_closed():
            report.add(f"{name} is not closed")
    for which in ("f", "h"):
        if not T.cone_map(which).is_closed():
            report.add(f"T_{which} does not witness D_{which} T1 = T0 D'_{which} up to homotopy")
    if report.ok and not T.cr_cone_map().is_closed():
        report.add("T_CR does not witness the carriage-return square")
    return report


def identity_typewriter_morphism(M: Typewriter) -> TypewriterMorphism:
    return TypewriterMorphism(M, M, identity_morphism(M.M0), identity_morphism(M.M1))


def zero_typewriter_morphism(M: Typewriter, N: Typewriter) -> TypewriterMorphism:
    return TypewriterMorphism(M, N)


def compose_typewriter_morphisms(T: TypewriterMorphism, U: TypewriterMorphism) -> TypewriterMorphism:
    """``T`` followed by ``U``; components are read off the composite cone maps."""
    if T.target != U.source:
        raise EndpointMismatch("target of the first typewriter morphism is not the source of the second")
    t0 = T.t0.then(U.t0)
    t1 = T.t1.then(U.t1)
    t_f = T.t0.then(U.t_f) + T.t_f.then(U.t1)
    t_h = T.t0.then(U.t_h) + T.t_h.then(U.t1)
    t_cr = T.cone_map("f").then(U.t_cr) + T.t_cr.then(U.cone_map("h"))
    out = TypewriterMorphism(T.source, U.target, t0, t1, t_f, t_h, t_cr)
    for which in ("f", "h"):
        assert out.cone_map(which) == T.cone_map(which).then(U.cone_map(which))
    assert out.cr_cone_map() == T.cr_cone_map().then(U.cr_cone_map())
    return out


# ---------------------------------------------------------------- homotopies

class TypewriterHomotopy:
    """``(H0, H1; H_f, H_h; H_CR)`` between two morphisms with common endpoints."""

    def __init__(self, source: TypewriterMorphism, target: TypewriterMorphism,
                 h0: Optional[Morphism] = None, h1: Optional[Morphism] = None,
                 h_f: Optional[Morphism] = None, h_h: Optional[Morphism] = None,
                 h_cr: Optional[Morphism] = None):
        if source.source != target.source or source.target != target.target:
            raise EndpointMismatch("homotopy between morphisms with different endpoints")
        self.source, self.target = source, target
        M, N = source.source, source.target
        self.h0 = _zero_or(h0, M.M0, N.M0, "H0")
        self.h1 = _zero_or(h1, M.M1, N.M1, "H1")
        self.h_f = _zero_or(h_f, M.M0, N.M1, "H_f")
        self.h_h = _zero_or(h_h, M.M0, N.M1, "H_h")
        self.h_cr = _zero_or(h_cr, M.cone_f, N.cone_h, "H_CR")

    def parts(self) -> dict:
        return {"h0": self.h0, "h1": self.h1, "h_f": self.h_f, "h_h": self.h_h, "h_cr": self.h_cr}

    def cone_map(self, which: str) -> Morphism:
        M, N = self.source.source, self.source.target
        h_star = self.h_f if which == "f" else self.h_h
        blocks = {(0, 0): self.h0.coeffs, (1, 1): self.h1.coeffs, (0, 1): h_star.coeffs}
        return assemble_cone_map(M.cone(which), N.cone(which), blocks)

    def cr_cone_map(self) -> Morphism:
        M, N = self.source.source, self.source.target
        src = cone(M.carriage_return, check=False)
        tgt = cone(N.carriage_return, check=False)
        blocks = {(0, 0): self.cone_map("f").coeffs, (1, 1): self.cone_map("h").coeffs,
                  (0, 1): self.h_cr.coeffs}
        return assemble_cone_map(src, tgt, blocks)


def typewriter_homotopy_report(H: TypewriterHomotopy, T: TypewriterMorphism,
                               U: TypewriterMorphism) -> Report:
    if (H.source.source, H.source.target) != (T.source, T.target) or \
            (T.source, T.target) != (U.source, U.target):
        raise EndpointMismatch("homotopy and morphisms do not share endpoints")
    report = Report()
    for name, h, a, b in (("H0", H.h0, T.t0, U.t0), ("H1", H.h1, T.t1, U.t1)):
        if h.differential() != a + b:
            report.add(f"d{name} != T{name[1]} + T'{name[1]}")
    for which in ("f", "h"):
        if H.cone_map(which).differential() != T.cone_map(which) + U.cone_map(which):
            report.add(f"induced H_{which} is not a homotopy between the cone maps")
    if report.ok and H.cr_cone_map().differential() != T.cr_cone_map() + U.cr_cone_map():
        report.add("induced H_CR is not a homotopy between the carriage-return cone maps")
    return report


def check_typewriter_homotopy(H: TypewriterHomotopy, T: TypewriterMorphism,
                              U: TypewriterMorphism) -> bool:
    return typewriter_homotopy_report(H, T, U).ok


# ---------------------------------------------------------------- star product

def star(M: Typewriter, N: Typewriter) -> Typewriter:
    """Stack ``M = (M0, M1; ...)`` on ``N = (M1, M2; ...)``; the check report is attached."""
    if M.M1 != N.M0:
        raise EndpointMismatch("star needs M1 of the first typewriter to equal M0 of the second")
    out = Typewriter(
        M.M0, N.M1,
        d_f=M.d_f.then(N.d_f),
        d_h=M.d_h.then(N.d_h),
        d_g=N.d_g.then(M.d_g),
        d_fg=M.d_f.then(N.d_fg).then(M.d_g),
        d_gh=N.d_g.then(M.d_gh).then(N.d_h),
        d_fgh=M.d_f.then(N.d_fg).then(M.d_gh).then(N.d_h),
    )
    out.report = check_typewriter(out)
    return out


__all__ = [
    "Typewriter", "TypewriterMorphism", "TypewriterHomotopy", "CR_BLOCKS", "COMPONENTS",
    "check_typewriter", "check_typewriter_morphism", "check_typewriter_homotopy",
    "typewriter_homotopy_report", "compose_typewriter_morphisms", "identity_typewriter_morphism",
    "zero_typewriter_morphism", "zero_typewriter", "is_partially_extendable", "star",
]
