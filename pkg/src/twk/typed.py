"""Type D structures over a path algebra, their morphisms, cones and reductions.

A structure is stored as a map ``generator -> vertex`` together with a sparse
map ``(source, target) -> coefficient``.  Morphisms use the same sparse
encoding, with rows indexed by source generators.  Composition is written in
application order throughout: ``phi.then(psi)`` applies ``phi`` first, and a
component ``x -a-> y -b-> z`` contributes ``a * b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

from .errors import EndpointMismatch, ForeignElement, NotClosed
from .kernel.algebra import Algebra, Element, ZERO
from .kernel.linalg import nullspace_masks, solve_masks
from .report import Report

Coeffs = dict  # (source name, target name) -> Element


def _add_into(out: dict, key, elem: Element) -> None:
    if not elem:
        return
    new = out.get(key, ZERO) ^ elem
    if new:
        out[key] = new
    else:
        out.pop(key, None)


def _by_source(coeffs: Mapping) -> dict:
    rows: dict = {}
    for (u, v), c in coeffs.items():
        rows.setdefault(u, []).append((v, c))
    return rows


def compose_coeffs(alg: Algebra, first: Mapping, second: Mapping) -> dict:
    """Sparse product of two coefficient matrices, ``first`` applied first."""
    rows = _by_source(second)
    out: dict = {}
    for (x, y), a in first.items():
        for z, b in rows.get(y, ()):
            _add_into(out, (x, z), alg.multiply(a, b))
    return out


def add_coeffs(*maps: Mapping) -> dict:
    out: dict = {}
    for m in maps:
        for key, c in m.items():
            _add_into(out, key, c)
    return out


class TypeDStructure:
    """Generators with vertex labels plus the arrows of the structure map."""

    def __init__(self, algebra: Algebra, generators, arrows=(), *, check: bool = True):
        self.algebra = algebra
        gens = dict(generators.items() if isinstance(generators, Mapping) else generators)
        self.generators: dict = {g: gens[g] for g in sorted(gens)}
        self.vindex = {g: algebra.vertex_index(v) for g, v in self.generators.items()}
        items = arrows.items() if isinstance(arrows, Mapping) else ((
            (s, t), c) for s, t, c in arrows)
        acc: dict = {}
        for (s, t), c in items:
            _add_into(acc, (s, t), frozenset(c))
        self.arrows: dict = {k: acc[k] for k in sorted(acc)}
        if check:
            _validate_coeffs(algebra, self.vindex, self.vindex, self.arrows, "arrow")

    def __repr__(self):
        return f"<TypeDStructure over {self.algebra.name}: {len(self.generators)} generators, {len(self.arrows)} arrows>"

    def __eq__(self, other):
        return (isinstance(other, TypeDStructure) and self.algebra == other.algebra
                and self.generators == other.generators and self.arrows == other.arrows)

    def __hash__(self):
        return hash((tuple(self.generators.items()), tuple(self.arrows.items())))

    def __len__(self):
        return len(self.generators)

    @property
    def names(self) -> list:
        return list(self.generators)

    def differential(self) -> "Morphism":
        return Morphism(self, self, self.arrows, check=False)

    def relabel(self, mapping: Mapping) -> "TypeDStructure":
        new = {mapping.get(g, g): v for g, v in self.generators.items()}
        if len(new) != len(self.generators):
            raise ValueError("relabeling is not injective")
        arrows = {(mapping.get(s, s), mapping.get(t, t)): c for (s, t), c in self.arrows.items()}
        return TypeDStructure(self.algebra, new, arrows, check=False)

    def is_reduced(self) -> bool:
        return not any(_idempotent_part(self.algebra, c) for c in self.arrows.values())

    def format(self) -> str:
        lines = [f"{g} @ {v}" for g, v in self.generators.items()]
        lines += [f"{s} -> {t}: {self.algebra.format(c)}" for (s, t), c in self.arrows.items()]
        return "\n".join(lines)


def _idempotent_part(alg: Algebra, c: Element) -> Element:
    return frozenset(k for k in c if alg.is_idempotent(k))


def _validate_coeffs(alg: Algebra, src_v: Mapping, tgt_v: Mapping, coeffs: Mapping, what: str):
    for (s, t), c in coeffs.items():
        if s not in src_v:
            raise ForeignElement(f"{what} source {s!r} is not a generator")
        if t not in tgt_v:
            raise ForeignElement(f"{what} target {t!r} is not a generator")
        alg.check_element(c)
        u, v = src_v[s], tgt_v[t]
        for k in c:
            if alg.source[k] != u or alg.target[k] != v:
                raise ValueError(
                    f"{what} {s}->{t}: coefficient {alg.basis[k]} does not run from "
                    f"{alg.vertices[u]} to {alg.vertices[v]}")


def check_structure(N: TypeDStructure) -> Report:
    """Every violated idempotent or square-zero constraint of ``N``."""
    alg = N.algebra
    report = Report()
    for (s, t), c in N.arrows.items():
        u, v = N.vindex[s], N.vindex[t]
        for k in c:
            if alg.source[k] != u or alg.target[k] != v:
                report.add(f"idempotent mismatch on {s}->{t}: {alg.basis[k]}")
    square = compose_coeffs(alg, N.arrows, N.arrows)
    for (x, z), c in sorted(square.items()):
        report.add(f"delta^2 nonzero on {x}->{z}: {alg.format(c)}")
    return report


class Morphism:
    """A sparse map of type D structures; also used for homotopies."""

    def __init__(self, source: TypeDStructure, target: TypeDStructure, coeffs=(), *,
                 check: bool = True):
        if source.algebra != target.algebra:
            raise EndpointMismatch("morphism endpoints live over different algebras")
        self.source = source
        self.target = target
        items = coeffs.items() if isinstance(coeffs, Mapping) else (((s, t), c) for s, t, c in coeffs)
        acc: dict = {}
        for key, c in items:
            _add_into(acc, key, frozenset(c))
        self.coeffs: dict = {k: acc[k] for k in sorted(acc)}
        if check:
            _validate_coeffs(source.algebra, source.vindex, target.vindex, self.coeffs, "component")

    @property
    def algebra(self) -> Algebra:
        return self.source.algebra

    def __repr__(self):
        return f"<Morphism {len(self.source)}->{len(self.target)} gens, {len(self.coeffs)} components>"

    def __eq__(self, other):
        return (isinstance(other, Morphism) and self.source == other.source
                and self.target == other.target and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def same_shape(self, other: "Morphism") -> None:
        if self.source != other.source or self.target != other.target:
            raise EndpointMismatch("morphisms do not share endpoints")

    def __add__(self, other: "Morphism") -> "Morphism":
        self.same_shape(other)
        return Morphism(self.source, self.target, add_coeffs(self.coeffs, other.coeffs), check=False)

    def then(self, other: "Morphism") -> "Morphism":
        if self.target != other.source:
            raise EndpointMismatch("target of the first morphism is not the source of the second")
        return Morphism(self.source, other.target,
                        compose_coeffs(self.algebra, self.coeffs, other.coeffs), check=False)

    def is_zero(self) -> bool:
        return not self.coeffs

    def differential(self) -> "Morphism":
        alg = self.algebra
        d = add_coeffs(compose_coeffs(alg, self.source.arrows, self.coeffs),
                       compose_coeffs(alg, self.coeffs, self.target.arrows))
        return Morphism(self.source, self.target, d, check=False)

    def is_closed(self) -> bool:
        return self.differential().is_zero()

    @classmethod
    def zero(cls, source: TypeDStructure, target: TypeDStructure) -> "Morphism":
        return cls(source, target, {}, check=False)

    def relabel(self, src_map: Mapping, tgt_map: Mapping, source=None, target=None) -> "Morphism":
        source = source if source is not None else self.source.relabel(src_map)
        target = target if target is not None else self.target.relabel(tgt_map)
        coeffs = {(src_map.get(s, s), tgt_map.get(t, t)): c for (s, t), c in self.coeffs.items()}
        return Morphism(source, target, coeffs, check=False)


def identity_morphism(N: TypeDStructure) -> Morphism:
    alg = N.algebra
    coeffs = {(g, g): frozenset({alg.idempotents[N.vindex[g]]}) for g in N.generators}
    return Morphism(N, N, coeffs, check=False)


def compose_morphisms(phi: Morphism, psi: Morphism) -> Morphism:
    """``phi`` followed by ``psi``."""
    return phi.then(psi)


def direct_sum(N: TypeDStructure, P: TypeDStructure) -> TypeDStructure:
    if N.algebra != P.algebra:
        raise EndpointMismatch("summands live over different algebras")
    clash = set(N.generators) & set(P.generators)
    if clash:
        raise ValueError(f"generator names collide: {sorted(clash)}")
    return TypeDStructure(N.algebra, {**N.generators, **P.generators},
                          {**N.arrows, **P.arrows}, check=False)


# ---------------------------------------------------------------- cones

def cone_name(slot: int, name) -> str:
    return f"{slot}:{name}"


def cone(phi: Morphism, *, check: bool = True) -> TypeDStructure:
    """Mapping cone: source in slot 0, target in slot 1, ``phi`` from slot 0 to slot 1."""
    if check and not phi.is_closed():
        raise NotClosed("cone of a morphism that is not closed")
    src, tgt = phi.source, phi.target
    gens = {cone_name(0, g): v for g, v in src.generators.items()}
    gens.update({cone_name(1, g): v for g, v in tgt.generators.items()})
    arrows = {}
    for (s, t), c in src.arrows.items():
        arrows[(cone_name(0, s), cone_name(0, t))] = c
    for (s, t), c in tgt.arrows.items():
        arrows[(cone_name(1, s), cone_name(1, t))] = c
    for (s, t), c in phi.coeffs.items():
        arrows[(cone_name(0, s), cone_name(1, t))] = c
    return TypeDStructure(src.algebra, gens, arrows, check=False)


def assemble_cone_map(source_cone: TypeDStructure, target_cone: TypeDStructure,
                      blocks: Mapping[tuple, Mapping]) -> Morphism:
    """Cone-level map from blocks keyed by (source slot, target slot)."""
    coeffs = {}
    for (i, j), block in blocks.items():
        for (s, t), c in block.items():
            coeffs[(cone_name(i, s), cone_name(j, t))] = c
    return Morphism(source_cone, target_cone, coeffs, check=False)


def split_cone_map(coeffs: Mapping) -> dict:
    """Inverse of ``assemble_cone_map``: blocks keyed by (source slot, target slot)."""
    blocks: dict = {(i, j): {} for i in (0, 1) for j in (0, 1)}
    for (s, t), c in coeffs.items():
        i, s0 = _unslot(s)
        j, t0 = _unslot(t)
        blocks[(i, j)][(s0, t0)] = c
    return blocks


def _unslot(name: str) -> tuple[int, str]:
    slot, _, rest = name.partition(":")
    return int(slot), rest


# ---------------------------------------------------------------- reduction

@dataclass(frozen=True)
class Reduction:
    """``forward: N -> reduced`` and ``backward: reduced -> N`` with
    ``forward.then(backward) = id + d(homotopy)`` and ``backward.then(forward) = id``."""

    original: TypeDStructure
    reduced: TypeDStructure
    forward: Morphism
    backward: Morphism
    homotopy: Morphism


def _cancellable(alg: Algebra, arrows: Mapping):
    for (s, t), c in arrows.items():  # arrows are kept sorted
        if s != t and _idempotent_part(alg, c):
            return s, t, c
    return None


def _cancel(alg: Algebra, gens: dict, arrows: dict, x, y, c):
    """One cancellation step; returns (gens, arrows, F, G, H) as raw coefficient maps."""
    k = alg.inverse(c)
    rest = {g: v for g, v in gens.items() if g not in (x, y)}
    into_y = [(u, a) for (u, t), a in arrows.items() if t == y and u in rest]
    out_of_x = [(v, b) for (s, v), b in arrows.items() if s == x and v in rest]
    new_arrows = {key: a for key, a in arrows.items() if key[0] in rest and key[1] in rest}
    k_out = [(v, alg.multiply(k, b)) for v, b in out_of_x]
    for u, a in into_y:
        for v, kb in k_out:
            _add_into(new_arrows, (u, v), alg.multiply(a, kb))
    ident = {(g, g): frozenset({alg.idempotents[alg.vertex_index(v)]}) for g, v in rest.items()}
    F = dict(ident)
    for v, kb in k_out:
        _add_into(F, (y, v), kb)
    G = dict(ident)
    for u, a in into_y:
        _add_into(G, (u, x), alg.multiply(a, k))
    H = {(y, x): k}
    return rest, new_arrows, F, G, H


def reduce(N: TypeDStructure) -> Reduction:
    """Cancel idempotent-bearing arrows until none remain.

    Each step picks the lexicographically first arrow ``x -> y`` whose
    coefficient has an idempotent component (hence is invertible in the local
    algebra) and applies the cancellation lemma.
    """
    alg = N.algebra
    gens, arrows = dict(N.generators), dict(sorted(N.arrows.items()))
    ident = identity_morphism(N).coeffs
    F_tot, G_tot, H_tot = dict(ident), dict(ident), {}
    while True:
        found = _cancellable(alg, arrows)
        if found is None:
            break
        x, y, c = found
        gens, new_arrows, F, G, H = _cancel(alg, gens, arrows, x, y, c)
        # homotopies compose as H_tot + F_tot ; H ; G_tot
        H_tot = add_coeffs(H_tot, compose_coeffs(alg, compose_coeffs(alg, F_tot, H), G_tot))
        F_tot = compose_coeffs(alg, F_tot, F)
        G_tot = compose_coeffs(alg, G, G_tot)
        arrows = dict(sorted(new_arrows.items()))
    reduced = TypeDStructure(alg, gens, arrows, check=False)
    return Reduction(N, reduced, Morphism(N, reduced, F_tot, check=False),
                     Morphism(reduced, N, G_tot, check=False), Morphism(N, N, H_tot, check=False))


def is_contractible(N: TypeDStructure) -> bool:
    return len(reduce(N).reduced.generators) == 0


def is_homotopy_equivalence(phi: Morphism) -> bool:
    if not phi.is_closed():
        raise NotClosed("is_homotopy_equivalence needs a closed morphism")
    return is_contractible(cone(phi, check=False))


def homotopy_check(H: Morphism, phi: Morphism, psi: Morphism) -> bool:
    """Whether ``dH = phi + psi`` holds exactly."""
    phi.same_shape(psi)
    H.same_shape(phi)
    return H.differential() == phi + psi


@dataclass(frozen=True)
class HomotopyInverse:
    """``inverse`` with ``phi;inverse = id + d(forward_homotopy)`` and
    ``inverse;phi = id + d(backward_homotopy)``."""

    inverse: Morphism
    forward_homotopy: Morphism
    backward_homotopy: Morphism


def homotopy_inverse(phi: Morphism) -> Optional[HomotopyInverse]:
    """A homotopy inverse read off from a contraction of the cone, or ``None``."""
    if not phi.is_closed():
        raise NotClosed("homotopy_inverse needs a closed morphism")
    C = cone(phi, check=False)
    red = reduce(C)
    if red.reduced.generators:
        return None
    # d K = id on the cone, where K is the emitted homotopy.
    blocks = split_cone_map(red.homotopy.coeffs)
    src, tgt = phi.source, phi.target
    return HomotopyInverse(Morphism(tgt, src, blocks[(1, 0)], check=False),
                           Morphism(src, src, blocks[(0, 0)], check=False),
                           Morphism(tgt, tgt, blocks[(1, 1)], check=False))


# ---------------------------------------------------------------- isomorphism search

def _signature(alg: Algebra, N: TypeDStructure, g) -> tuple:
    out = sorted(tuple(sorted(c)) for (s, _t), c in N.arrows.items() if s == g)
    inc = sorted(tuple(sorted(c)) for (_s, t), c in N.arrows.items() if t == g)
    loop = tuple(sorted(N.arrows.get((g, g), ())))
    return (N.vindex[g], tuple(out), tuple(inc), loop)


def find_isomorphism(N: TypeDStructure, P: TypeDStructure) -> Optional[dict]:
    """A vertex- and label-preserving bijection of generators carrying arrows to arrows."""
    if N.algebra != P.algebra or len(N.generators) != len(P.generators):
        return None
    if len(N.arrows) != len(P.arrows):
        return None
    alg = N.algebra
    sig_n = {g: _signature(alg, N, g) for g in N.generators}
    sig_p = {g: _signature(alg, P, g) for g in P.generators}
    if sorted(sig_n.values()) != sorted(sig_p.values()):
        return None
    order = sorted(N.generators, key=lambda g: (sum(1 for s in sig_p.values() if s == sig_n[g]), g))
    mapping: dict = {}
    used: set = set()

    def consistent(g, h) -> bool:
        for g2, h2 in list(mapping.items()) + [(g, h)]:
            if N.arrows.get((g, g2), ZERO) != P.arrows.get((h, h2), ZERO):
                return False
            if N.arrows.get((g2, g), ZERO) != P.arrows.get((h2, h), ZERO):
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        g = order[i]
        for h in P.generators:
            if h in used or sig_p[h] != sig_n[g] or not consistent(g, h):
                continue
            mapping[g] = h
            used.add(h)
            if search(i + 1):
                return True
            del mapping[g]
            used.discard(h)
        return False

    return dict(mapping) if search(0) else None


EQUIVALENCE_CAVEAT = ("decided by comparing reduced models up to generator bijection; "
                      "a non-isomorphic pair of reduced models is reported as inequivalent")


def equivalence_report(N: TypeDStructure, P: TypeDStructure) -> Report:
    report = Report(caveats=[EQUIVALENCE_CAVEAT])
    if N.algebra != P.algebra:
        report.add("structures live over different algebras")
        return report
    a, b = reduce(N).reduced, reduce(P).reduced
    if find_isomorphism(a, b) is None:
        report.add(f"reduced models differ ({len(a)} vs {len(b)} generators, "
                   f"{len(a.arrows)} vs {len(b.arrows)} arrows) and admit no isomorphism")
    return report


def equivalent(N: TypeDStructure, P: TypeDStructure) -> bool:
    return equivalence_report(N, P).ok


# ---------------------------------------------------------------- slices and transport

def idempotent_slice(N: TypeDStructure, i: int) -> TypeDStructure:
    """Generators at vertex ``i`` with their idempotent-labelled arrows, over the trivial algebra."""
    from .kernel.algebra import trivial_algebra

    alg = N.algebra
    if len(alg.vertices) < 2 or not 0 <= i < len(alg.vertices):
        raise ForeignElement(f"vertex index {i} is not available in {alg.name}")
    triv = trivial_algebra()
    e = frozenset({alg.idempotents[i]})
    unit = triv.element("e")
    keep = {g: "e" for g in N.generators if N.vindex[g] == i}
    arrows = {(s, t): unit for (s, t), c in N.arrows.items()
              if s in keep and t in keep and c & e}
    return TypeDStructure(triv, keep, arrows, check=False)


def transport(N: TypeDStructure, target: Algebra, name_map: Mapping,
              vertex_map: Optional[Mapping] = None) -> TypeDStructure:
    """Push ``N`` along an algebra isomorphism given as a basis-name map."""
    alg = N.algebra
    if vertex_map is None:
        vertex_map = {v: name_map[v] for v in alg.vertices}
    gens = {g: vertex_map[v] for g, v in N.generators.items()}
    arrows = {k: alg.transport(c, name_map, target) for k, c in N.arrows.items()}
    return TypeDStructure(target, gens, arrows)


def transport_morphism(phi: Morphism, source: TypeDStructure, target: TypeDStructure,
                       name_map: Mapping) -> Morphism:
    alg = phi.algebra
    return Morphism(source, target,
                    {k: alg.transport(c, name_map, source.algebra) for k, c in phi.coeffs.items()})


# ---------------------------------------------------------------- linear solving over maps

def unit_components(source: TypeDStructure, target: TypeDStructure) -> list[tuple]:
    """Every idempotent-compatible single-basis component ``(s, t, k)``."""
    alg = source.algebra
    out = []
    for s in source.generators:
        for t in target.generators:
            for k in alg.between(source.vindex[s], target.vindex[t]):
                out.append((s, t, k))
    return out


class MapSpace:
    """Coordinates for a tuple of labelled unknown maps, for linear solves over F2."""

    def __init__(self, shapes: Mapping[str, tuple[TypeDStructure, TypeDStructure]]):
        self.shapes = dict(shapes)
        self.units = [(label, s, t, k) for label, (src, tgt) in self.shapes.items()
                      for s, t, k in unit_components(src, tgt)]

    def __len__(self):
        return len(self.units)

    def zero(self) -> dict:
        return {label: Morphism.zero(src, tgt) for label, (src, tgt) in self.shapes.items()}

    def from_mask(self, mask: int) -> dict:
        comps: dict = {label: {} for label in self.shapes}
        i = 0
        while mask:
            if mask & 1:
                label, s, t, k = self.units[i]
                _add_into(comps[label], (s, t), frozenset({k}))
            mask >>= 1
            i += 1
        return {label: Morphism(src, tgt, comps[label], check=False)
                for label, (src, tgt) in self.shapes.items()}

    def unit(self, i: int) -> dict:
        return self.from_mask(1 << i)


def _flatten(values: Mapping[str, Morphism], index: dict) -> int:
    mask = 0
    for label in sorted(values):
        for (s, t), c in values[label].coeffs.items():
            for k in c:
                key = (label, s, t, k)
                if key not in index:
                    index[key] = len(index)
                mask ^= 1 << index[key]
    return mask


def linear_system(space: MapSpace, residual: Callable[[dict], Mapping[str, Morphism]]):
    """Columns of the linear part of an affine ``residual`` plus its constant term.

    ``residual`` must be affine in the unknown maps; the columns are obtained by
    evaluating it on each unit vector and subtracting the value at zero.
    """
    index: dict = {}
    const = _flatten(residual(space.zero()), index)
    cols = [_flatten(residual(space.unit(i)), index) ^ const for i in range(len(space))]
    n_rows = len(index)
    rows = [0] * n_rows
    for j, col in enumerate(cols):
        r = 0
        while col:
            if col & 1:
                rows[r] |= 1 << j
            col >>= 1
            r += 1
    rhs = [(const >> r) & 1 for r in range(n_rows)]
    return rows, rhs


def solve_maps(space: MapSpace, residual: Callable[[dict], Mapping[str, Morphism]]) -> Optional[dict]:
    """Unknown maps making ``residual`` vanish (free coordinates 0), or ``None``."""
    rows, rhs = linear_system(space, residual)
    sol = solve_masks(rows, rhs, len(space))
    if sol is None:
        return None
    mask = 0
    for j in sol:
        mask |= 1 << j
    return space.from_mask(mask)


def kernel_basis(space: MapSpace, residual: Callable[[dict], Mapping[str, Morphism]]) -> list[dict]:
    """Basis of the solutions of a *linear* ``residual``."""
    rows, rhs = linear_system(space, residual)
    if any(rhs):
        raise ValueError("kernel_basis needs a linear residual")
    return [space.from_mask(m) for m in nullspace_masks(rows, len(space))]


def closed_morphism_basis(source: TypeDStructure, target: TypeDStructure) -> list[Morphism]:
    space = MapSpace({"phi": (source, target)})
    return [v["phi"] for v in kernel_basis(space, lambda m: {"d": m["phi"].differential()})]


def sum_morphisms(source: TypeDStructure, target: TypeDStructure, ms: Iterable[Morphism]) -> Morphism:
    out = Morphism.zero(source, target)
    for m in ms:
        out = out + m
    return out


__all__ = [
    "TypeDStructure", "Morphism", "Reduction", "HomotopyInverse", "MapSpace",
    "check_structure", "identity_morphism", "compose_morphisms", "direct_sum", "cone",
    "cone_name", "assemble_cone_map", "split_cone_map", "reduce", "is_contractible",
    "is_homotopy_equivalence", "homotopy_check", "homotopy_inverse", "find_isomorphism",
    "equivalent", "equivalence_report", "idempotent_slice", "transport", "transport_morphism",
    "closed_morphism_basis", "solve_maps", "kernel_basis", "linear_system", "compose_coeffs",
    "add_coeffs", "sum_morphisms", "unit_components",
]
