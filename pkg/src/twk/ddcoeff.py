"""DD bimodules over (A, torus) viewed as systems of coefficient maps.

The right torus label of an arrow sorts it into one of the maps ``D_t``.  The
structure relation of the bimodule becomes a handful of relations among those
maps, and semi-extendability becomes a linear system over F2 in the extra
maps indexed by cyclic intervals of {0, 1, 2, 3}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .errors import CoefficientRelationViolated, ForeignElement
from .kernel.algebra import Algebra, Element, TensorAlgebra, tensor_algebra, torus_algebra
from .kernel.linalg import solve_masks
from .report import Report
from .typed import (
    Morphism, TypeDStructure, _add_into, add_coeffs, check_structure, compose_coeffs,
    identity_morphism, unit_components,
)

LABELS = ("f", "g", "h", "fg", "gh", "fgh")
# (source block, target block) of each coefficient map, blocks being 0 or 1
LABEL_SHAPE = {"f": (0, 1), "g": (1, 0), "h": (0, 1), "fg": (0, 0), "gh": (1, 1), "fgh": (0, 1)}
INDEX_OF_LABEL = {"f": "1", "g": "2", "h": "3", "fg": "12", "gh": "23", "fgh": "123"}
LABEL_OF_INDEX = {v: k for k, v in INDEX_OF_LABEL.items()}
UNKNOWN_INTERVALS = ("0", "01", "30", "012", "230", "301", "0123", "1230", "2301", "3012")
PROPER_INTERVALS = ("0", "1", "2", "3", "01", "12", "23", "30", "012", "123", "230", "301")
FULL_INTERVALS = ("0123", "1230", "2301", "3012")
RIGHT_VERTICES = ("i0", "i1")


class DDBimodule(TypeDStructure):
    """A type D structure over ``left ⊗ right``; generators sit at vertex pairs."""

    def __init__(self, left: Algebra, generators, arrows=(), *, right: Optional[Algebra] = None,
                 check: bool = True):
        right = right if right is not None else torus_algebra()
        gens = dict(generators.items() if isinstance(generators, Mapping) else generators)
        gens = {g: tuple(v) for g, v in gens.items()}
        super().__init__(tensor_algebra(left, right), gens, arrows, check=check)

    @property
    def left(self) -> Algebra:
        return self.algebra.left

    @property
    def right(self) -> Algebra:
        return self.algebra.right

    @classmethod
    def from_structure(cls, N: TypeDStructure) -> "DDBimodule":
        if not isinstance(N.algebra, TensorAlgebra):
            raise ForeignElement("structure is not over a tensor product algebra")
        return cls(N.algebra.left, N.generators, N.arrows, right=N.algebra.right, check=False)

    def relabel(self, mapping: Mapping) -> "DDBimodule":
        return DDBimodule.from_structure(super().relabel(mapping))

    def right_block(self, g) -> int:
        return self.right.vertex_index(self.generators[g][1])


def dd_term(alg: TensorAlgebra, left_elem: Element, right_name) -> Element:
    return alg.tensor(left_elem, frozenset({alg.right.index(right_name)}))


def dd_check(M: TypeDStructure) -> Report:
    """Two-sided structure relation and idempotent compatibility."""
    if not isinstance(M.algebra, TensorAlgebra):
        r = Report()
        r.add("not a DD bimodule: algebra is not a tensor product")
        return r
    return check_structure(M)


@dataclass
class CoefficientSystem:
    """``M0``/``M1`` carry ``D_empty`` as their internal differentials."""

    M0: TypeDStructure
    M1: TypeDStructure
    maps: dict = field(default_factory=dict)  # label in LABELS -> Morphism

    def __post_init__(self):
        if self.M0.algebra != self.M1.algebra:
            raise ForeignElement("M0 and M1 live over different algebras")
        clash = set(self.M0.generators) & set(self.M1.generators)
        if clash:
            raise ValueError(f"M0 and M1 share generator names {sorted(clash)}")
        blocks = (self.M0, self.M1)
        full = {}
        for label in LABELS:
            src, tgt = (blocks[i] for i in LABEL_SHAPE[label])
            m = self.maps.get(label)
            if m is None:
                m = Morphism.zero(src, tgt)
            elif m.source != src or m.target != tgt:
                raise ForeignElement(f"D_{label} does not run between the expected blocks")
            full[label] = m
        self.maps = full

    @property
    def algebra(self) -> Algebra:
        return self.M0.algebra

    def __getitem__(self, label: str) -> Morphism:
        return self.maps[label]

    def __eq__(self, other):
        return (isinstance(other, CoefficientSystem) and self.M0 == other.M0
                and self.M1 == other.M1 and self.maps == other.maps)


def coefficient_relations(c: CoefficientSystem) -> dict:
    """Value of each coefficient relation; all vanish exactly when the DD is valid."""
    A = c.algebra
    m = {k: v.coeffs for k, v in c.maps.items()}
    d0, d1 = c.M0.arrows, c.M1.arrows
    dsrc = {"f": d0, "g": d1, "h": d0, "fg": d0, "gh": d1, "fgh": d0}
    dtgt = {"f": d1, "g": d0, "h": d1, "fg": d0, "gh": d1, "fgh": d1}

    def boundary(label):
        return add_coeffs(compose_coeffs(A, dsrc[label], m[label]),
                          compose_coeffs(A, m[label], dtgt[label]))

    return {
        "empty@M0": compose_coeffs(A, d0, d0),
        "empty@M1": compose_coeffs(A, d1, d1),
        "f": boundary("f"),
        "g": boundary("g"),
        "h": boundary("h"),
        "fg": add_coeffs(boundary("fg"), compose_coeffs(A, m["f"], m["g"])),
        "gh": add_coeffs(boundary("gh"), compose_coeffs(A, m["g"], m["h"])),
        "fgh": add_coeffs(boundary("fgh"), compose_coeffs(A, m["f"], m["gh"]),
                          compose_coeffs(A, m["fg"], m["h"])),
    }


def check_coefficients(c: CoefficientSystem) -> Report:
    report = Report()
    for name, value in coefficient_relations(c).items():
        if value:
            report.add(f"relation {name} fails on {len(value)} component(s)")
    return report


def from_coefficients(c: CoefficientSystem, *, right: Optional[Algebra] = None) -> DDBimodule:
    right = right if right is not None else torus_algebra()
    failing = [name for name, v in coefficient_relations(c).items() if v]
    if failing:
        raise CoefficientRelationViolated(failing)
    alg = tensor_algebra(c.algebra, right)
    gens = {g: (v, RIGHT_VERTICES[0]) for g, v in c.M0.generators.items()}
    gens.update({g: (v, RIGHT_VERTICES[1]) for g, v in c.M1.generators.items()})
    arrows: dict = {}
    for block, N in ((0, c.M0), (1, c.M1)):
        for key, a in N.arrows.items():
            _add_into(arrows, key, dd_term(alg, a, RIGHT_VERTICES[block]))
    for label in LABELS:
        for key, a in c.maps[label].coeffs.items():
            _add_into(arrows, key, dd_term(alg, a, label))
    return DDBimodule(c.algebra, gens, arrows, right=right, check=False)


def to_coefficients(M: TypeDStructure) -> CoefficientSystem:
    alg = M.algebra
    if not isinstance(alg, TensorAlgebra) or alg.right != torus_algebra():
        raise ForeignElement("to_coefficients needs a DD bimodule with right algebra the torus algebra")
    A, T = alg.left, alg.right
    blocks: list[dict] = [{}, {}]
    for g, (lv, rv) in M.generators.items():
        blocks[T.vertex_index(rv)][g] = lv
    parts: dict = {"": {}}
    parts.update({label: {} for label in LABELS})
    for key, c in M.arrows.items():
        for k in c:
            i, j = alg.split(k)
            name = T.basis[j]
            label = "" if T.is_idempotent(j) else name
            _add_into(parts[label], key, frozenset({i}))
    d0 = {k: v for k, v in parts[""].items() if k[0] in blocks[0]}
    d1 = {k: v for k, v in parts[""].items() if k[0] in blocks[1]}
    M0 = TypeDStructure(A, blocks[0], d0, check=False)
    M1 = TypeDStructure(A, blocks[1], d1, check=False)
    B = (M0, M1)
    maps = {}
    for label in LABELS:
        s, t = LABEL_SHAPE[label]
        maps[label] = Morphism(B[s], B[t], parts[label], check=False)
    return CoefficientSystem(M0, M1, maps)


# ---------------------------------------------------------------- generalized systems

def interval_block(I: str) -> tuple[int, int]:
    """Source and target blocks of ``D_I``; arrows 0 and 2 run from block 1 to block 0."""
    src = 1 if I[0] in "02" else 0
    tgt = 0 if I[-1] in "02" else 1
    return src, tgt


def _splits(I: str):
    for cut in range(1, len(I)):
        yield I[:cut], I[cut:]


@dataclass
class GeneralizedCoefficientSystem:
    """Coefficient maps for every cyclic interval; ``unchecked`` holds extra stored data."""

    base: CoefficientSystem
    extra: dict = field(default_factory=dict)  # interval name -> Morphism
    unchecked: dict = field(default_factory=dict)

    def __post_init__(self):
        B = (self.base.M0, self.base.M1)
        full = {}
        for I in UNKNOWN_INTERVALS:
            s, t = interval_block(I)
            m = self.extra.get(I)
            if m is None:
                m = Morphism.zero(B[s], B[t])
            elif m.source != B[s] or m.target != B[t]:
                raise ForeignElement(f"D_{I} does not run between the expected blocks")
            full[I] = m
        self.extra = full

    def __getitem__(self, I: str) -> Morphism:
        if I in LABEL_OF_INDEX:
            return self.base[LABEL_OF_INDEX[I]]
        return self.extra[I]

    def __eq__(self, other):
        return (isinstance(other, GeneralizedCoefficientSystem) and self.base == other.base
                and self.extra == other.extra and self.unchecked == other.unchecked)


def _relation_terms(I: str) -> list[tuple[str, str]]:
    """Terms ``(J, K)`` meaning ``D_J`` followed by ``D_K``; the empty name is ``D_empty``."""
    return [("", I), (I, "")] + list(_splits(I))


def _is_unknown(name: str) -> bool:
    return name in UNKNOWN_INTERVALS


def generalized_relations(G: GeneralizedCoefficientSystem) -> dict:
    """Value of every interval and identity relation (the identity is already added in)."""
    A = G.base.algebra
    B = (G.base.M0, G.base.M1)
    out = {}
    for I in PROPER_INTERVALS + FULL_INTERVALS:
        s, t = interval_block(I)
        acc: dict = {}
        for J, K in _relation_terms(I):
            first = B[s].arrows if J == "" else G[J].coeffs
            second = B[t].arrows if K == "" else G[K].coeffs
            acc = add_coeffs(acc, compose_coeffs(A, first, second))
        if len(I) == 4:
            acc = add_coeffs(acc, identity_morphism(B[s]).coeffs)
        out[I] = acc
    return out


def check_generalized(G: GeneralizedCoefficientSystem) -> Report:
    report = Report()
    base = check_coefficients(G.base)
    report.extend(base)
    for I, value in generalized_relations(G).items():
        if value:
            kind = "identity" if len(I) == 4 else "interval"
            report.add(f"{kind} relation {I} fails on {len(value)} component(s)")
    if G.unchecked:
        report.caveats.append("stored but unchecked maps: " + ", ".join(sorted(G.unchecked)))
    return report


@dataclass
class SemiExtensionSystem:
    """The assembled linear system, kept for audits and tests."""

    units: list  # (interval, source, target, basis index)
    rows: list
    rhs: list
    row_keys: list
    solution: Optional[list] = None


def assemble_semi_extension(c: CoefficientSystem) -> SemiExtensionSystem:
    A = c.algebra
    B = (c.M0, c.M1)

    def known_coeffs(name: str, block: int) -> dict:
        if name == "":
            return B[block].arrows
        return c.maps[LABEL_OF_INDEX[name]].coeffs

    units = []
    for I in UNKNOWN_INTERVALS:
        s, t = interval_block(I)
        units.extend((I, u, v, k) for u, v, k in unit_components(B[s], B[t]))
    unit_index_by_interval: dict = {}
    for n, (I, u, v, k) in enumerate(units):
        unit_index_by_interval.setdefault(I, []).append(n)

    row_index: dict = {}
    const: dict = {}
    columns = [0] * len(units)

    def coords(I: str, coeffs: Mapping) -> list:
        out = []
        for (u, v), e in coeffs.items():
            for k in e:
                key = (I, u, v, k)
                if key not in row_index:
                    row_index[key] = len(row_index)
                out.append(row_index[key])
        return out

    for I in PROPER_INTERVALS + FULL_INTERVALS:
        s, t = interval_block(I)
        constant: dict = {}
        if len(I) == 4:
            constant = dict(identity_morphism(B[s]).coeffs)
        for J, K in _relation_terms(I):
            unknowns = [x for x in (J, K) if _is_unknown(x)]
            # every summand carries at most one unknown map, so the system is linear
            assert len(unknowns) <= 1, f"relation {I} has a quadratic term {J}|{K}"
            if not unknowns:
                first = known_coeffs(J, s)
                second = known_coeffs(K, t)
                constant = add_coeffs(constant, compose_coeffs(A, first, second))
                continue
            X = unknowns[0]
            for n in unit_index_by_interval.get(X, ()):
                _I, u, v, k = units[n]
                e = {(u, v): frozenset({k})}
                if J == X:
                    val = compose_coeffs(A, e, known_coeffs(K, t))
                else:
                    val = compose_coeffs(A, known_coeffs(J, s), e)
                for r in coords(I, val):
                    columns[n] ^= 1 << r
        for r in coords(I, constant):
            const[r] = const.get(r, 0) ^ 1
    n_rows = len(row_index)
    rows = [0] * n_rows
    for j, col in enumerate(columns):
        r = 0
        while col:
            if col & 1:
                rows[r] |= 1 << j
            col >>= 1
            r += 1
    rhs = [const.get(r, 0) for r in range(n_rows)]
    keys = [None] * n_rows
    for key, r in row_index.items():
        keys[r] = key
    return SemiExtensionSystem(units, rows, rhs, keys)


def semi_extend(M: TypeDStructure) -> Optional[GeneralizedCoefficientSystem]:
    """Solve for generalized coefficient maps extending those of ``M``; ``None`` if impossible."""
    c = M if isinstance(M, CoefficientSystem) else to_coefficients(M)
    system = assemble_semi_extension(c)
    sol = solve_masks(system.rows, system.rhs, len(system.units))
    if sol is None:
        return None
    system.solution = sol
    comps: dict = {I: {} for I in UNKNOWN_INTERVALS}
    for n in sol:
        I, u, v, k = system.units[n]
        _add_into(comps[I], (u, v), frozenset({k}))
    B = (c.M0, c.M1)
    extra = {}
    for I in UNKNOWN_INTERVALS:
        s, t = interval_block(I)
        extra[I] = Morphism(B[s], B[t], comps[I], check=False)
    return GeneralizedCoefficientSystem(c, extra)


__all__ = [
    "DDBimodule", "CoefficientSystem", "GeneralizedCoefficientSystem", "LABELS", "LABEL_SHAPE",
    "UNKNOWN_INTERVALS", "PROPER_INTERVALS", "FULL_INTERVALS", "dd_term", "dd_check",
    "coefficient_relations", "check_coefficients", "from_coefficients", "to_coefficients",
    "interval_block", "generalized_relations", "check_generalized", "assemble_semi_extension",
    "semi_extend",
]
