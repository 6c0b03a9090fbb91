"""DA bimodules with finitely many actions and the box tensor product.

An action ``(p, (a1, ..., aj), c, q)`` reads input basis elements
``a1 ... aj`` of the input algebra and emits ``c ⊗ q`` with ``c`` in the
output algebra.  Pairing with a type D structure walks every path of the
structure map whose labels spell a prefix of some action's input word.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Optional

from .ddcoeff import DDBimodule
from .errors import ConeIdentificationFailed, ForeignElement, NonTerminatingBoxTensor
from .kernel.algebra import Algebra, Element, TensorAlgebra, iter_composable_chains, tensor_algebra, trivial_algebra
from .report import Report
from .typed import Morphism, TypeDStructure, _add_into, cone
from .typewriter import Typewriter

DEFAULT_CAP = 64


def default_cap() -> int:
    value = os.environ.get("TWK_CAP")
    return int(value) if value else DEFAULT_CAP


class DABimodule:
    def __init__(self, output: Algebra, input: Algebra, generators, actions=(), *, check: bool = True):
        self.output = output
        self.input = input
        gens = dict(generators.items() if isinstance(generators, Mapping) else generators)
        self.generators = {g: tuple(gens[g]) for g in sorted(gens)}
        self.left_index = {g: output.vertex_index(v[0]) for g, v in self.generators.items()}
        self.right_index = {g: input.vertex_index(v[1]) for g, v in self.generators.items()}
        items = actions.items() if isinstance(actions, Mapping) else (
            ((p, tuple(seq), q), c) for p, seq, c, q in actions)
        acc: dict = {}
        for (p, seq, q), c in items:
            _add_into(acc, (p, tuple(seq), q), frozenset(c))
        self.actions = {k: acc[k] for k in sorted(acc)}
        if check:
            self._validate()

    def _validate(self):
        A1, A2 = self.output, self.input
        for (p, seq, q), c in self.actions.items():
            if p not in self.generators or q not in self.generators:
                raise ForeignElement(f"action {p}->{q} references an unknown generator")
            A1.check_element(c)
            for k in c:
                if A1.source[k] != self.left_index[p] or A1.target[k] != self.left_index[q]:
                    raise ValueError(f"action {p}->{q}: output {A1.basis[k]} has the wrong idempotents")
            v = self.right_index[p]
            for k in seq:
                if not (isinstance(k, int) and 0 <= k < A2.dim):
                    raise ForeignElement(f"action input {k!r} is not a basis index of {A2.name}")
                if A2.source[k] != v:
                    raise ValueError(f"action {p}->{q}: input word is not composable")
                v = A2.target[k]
            if v != self.right_index[q]:
                raise ValueError(f"action {p}->{q}: input word ends at the wrong idempotent")

    @property
    def max_arity(self) -> int:
        return max((len(seq) for (_p, seq, _q) in self.actions), default=0)

    def __eq__(self, other):
        return (isinstance(other, DABimodule) and self.output == other.output
                and self.input == other.input and self.generators == other.generators
                and self.actions == other.actions)

    def __repr__(self):
        return f"<DABimodule {self.output.name} <- {self.input.name}: {len(self.generators)} generators, {len(self.actions)} actions>"

    def _trie(self) -> dict:
        """For each generator, the set of live prefixes and the completed words."""
        out: dict = {}
        for (p, seq, q), c in self.actions.items():
            prefixes, done = out.setdefault(p, (set(), {}))
            for n in range(len(seq) + 1):
                prefixes.add(seq[:n])
            done.setdefault(seq, []).append((q, c))
        return out


def check_da(P: DABimodule, max_len: Optional[int] = None) -> Report:
    """Structure relation on every composable input word up to ``max_len`` (default twice the arity)."""
    A1, A2 = P.output, P.input
    bound = max_len if max_len is not None else 2 * P.max_arity
    by_word: dict = {}
    for (p, seq, q), c in P.actions.items():
        by_word.setdefault((p, seq), []).append((q, c))
    report = Report()
    for p in P.generators:
        for n in range(bound + 1):
            for word in iter_composable_chains(A2, P.right_index[p], n):
                acc: dict = {}
                for i in range(n + 1):
                    for r, c1 in by_word.get((p, word[:i]), ()):
                        for q, c2 in by_word.get((r, word[i:]), ()):
                            _add_into(acc, q, A1.multiply(c1, c2))
                for k in range(n - 1):
                    prod = A2.table.get((word[k], word[k + 1]))
                    if prod is None:
                        continue
                    merged = word[:k] + (prod,) + word[k + 2:]
                    for q, c in by_word.get((p, merged), ()):
                        _add_into(acc, q, c)
                for q, c in sorted(acc.items()):
                    names = ",".join(A2.basis[k] for k in word)
                    report.add(f"relation fails at {p} on ({names}) -> {q}: {A1.format(c)}")
    return report


def identity_da(A: Algebra) -> DABimodule:
    gens = {v: (v, v) for v in A.vertices}
    actions = []
    for k in range(A.dim):
        u, v = A.vertices[A.source[k]], A.vertices[A.target[k]]
        actions.append((u, (k,), frozenset({k}), v))
    return DABimodule(A, A, gens, actions)


def elementary_module(A: Algebra, i: int) -> DABimodule:
    """One generator at vertex ``i`` of ``A`` whose only action reads the idempotent there."""
    triv = trivial_algebra()
    v = A.vertices[i]
    return DABimodule(triv, A, {"x": ("e", v)}, [("x", (A.idempotents[i],), triv.element("e"), "x")])


# ---------------------------------------------------------------- pairing

@dataclass(frozen=True)
class _Side:
    """How to read a structure's coefficients: input-algebra part plus an optional right label."""

    algebra: Algebra
    input: Algebra
    right: Optional[Algebra]

    @classmethod
    def of(cls, N: TypeDStructure, P: DABimodule) -> "_Side":
        alg = N.algebra
        if alg == P.input:
            return cls(alg, alg, None)
        if isinstance(alg, TensorAlgebra) and alg.left == P.input:
            return cls(alg, alg.left, alg.right)
        raise ForeignElement(f"structure over {alg.name} cannot be paired with a DA over {P.input.name}")

    def input_vertex(self, N: TypeDStructure, g) -> int:
        if self.right is None:
            return N.vindex[g]
        return self.input.vertex_index(N.generators[g][0])

    def right_vertex(self, N: TypeDStructure, g) -> Optional[int]:
        if self.right is None:
            return None
        return self.right.vertex_index(N.generators[g][1])

    def terms(self, c: Element):
        if self.right is None:
            for k in c:
                yield k, None
        else:
            for k in c:
                yield self.algebra.split(k)

    def rmul(self, r1: Optional[int], r2: Optional[int]) -> Optional[int]:
        if self.right is None:
            return None
        return self.right.table.get((r1, r2))


def box_name(p, x) -> str:
    return f"{p}*{x}"


def _box_generators(P: DABimodule, N: TypeDStructure, side: _Side) -> dict:
    gens = {}
    for p, (lv, _rv) in P.generators.items():
        for x in N.generators:
            if side.input_vertex(N, x) != P.right_index[p]:
                continue
            name = box_name(p, x)
            if name in gens:
                raise ValueError(f"box generator name {name!r} is ambiguous")
            gens[name] = lv if side.right is None else (lv, N.generators[x][1])
    return gens


def _out_algebra(P: DABimodule, side: _Side) -> Algebra:
    return P.output if side.right is None else tensor_algebra(P.output, side.right)


def _emit(P: DABimodule, side: _Side, out_alg: Algebra, c: Element, r) -> Element:
    if side.right is None:
        return c
    return frozenset(out_alg.pair(i, r) for i in c)


def _rows(arrows: Mapping) -> dict:
    out: dict = {}
    for (s, t), c in arrows.items():
        out.setdefault(s, []).append((t, c))
    return out


def _pair_structure(P: DABimodule, N: TypeDStructure, cap: Optional[int]) -> TypeDStructure:
    cap = default_cap() if cap is None else cap
    side = _Side.of(N, P)
    out_alg = _out_algebra(P, side)
    gens = _box_generators(P, N, side)
    trie = P._trie()
    table = _rows(N.arrows)
    arrows: dict = {}
    for p in P.generators:
        for x in N.generators:
            if side.input_vertex(N, x) != P.right_index[p]:
                continue
            start = None
            if side.right is not None:
                start = side.right.idempotents[side.right_vertex(N, x)]
            _walk_single(P, side, trie, p, start, x, table, cap, arrows, out_alg)
    return TypeDStructure(out_alg, gens, arrows, check=False)


def _walk_single(P, side, trie, p, start, x, table, cap, out, out_alg):
    prefixes, done = trie.get(p, (set(), {}))
    stack = [((), x, start)]
    while stack:
        word, y, r = stack.pop()
        for q, c in done.get(word, ()):
            _add_into(out, (box_name(p, x), box_name(q, y)), _emit(P, side, out_alg, c, r))
        for z, c in table.get(y, ()):
            for k, rk in side.terms(c):
                w = word + (k,)
                if w not in prefixes:
                    continue
                if len(w) > cap:
                    raise NonTerminatingBoxTensor(f"path expansion exceeded the cap of {cap}")
                r2 = side.rmul(r, rk)
                if side.right is not None and r2 is None:
                    continue
                stack.append((w, z, r2))


def box_type_d(P: DABimodule, N: TypeDStructure, cap: Optional[int] = None) -> TypeDStructure:
    if isinstance(N.algebra, TensorAlgebra) and N.algebra != P.input:
        raise ForeignElement("use box_dd for DD bimodules")
    return _pair_structure(P, N, cap)


def box_dd(P: DABimodule, M: TypeDStructure, cap: Optional[int] = None) -> DDBimodule:
    if not isinstance(M.algebra, TensorAlgebra):
        raise ForeignElement("box_dd needs a DD bimodule")
    return DDBimodule.from_structure(_pair_structure(P, M, cap))


def box(P: DABimodule, N: TypeDStructure, cap: Optional[int] = None) -> TypeDStructure:
    out = _pair_structure(P, N, cap)
    return DDBimodule.from_structure(out) if isinstance(out.algebra, TensorAlgebra) else out


def box_morphism(P: DABimodule, phi: Morphism, cap: Optional[int] = None,
                 source: Optional[TypeDStructure] = None,
                 target: Optional[TypeDStructure] = None) -> Morphism:
    """``id ⊠ phi``: sum over δ-paths that use a component of ``phi`` exactly once."""
    cap = default_cap() if cap is None else cap
    N, N2 = phi.source, phi.target
    side = _Side.of(N, P)
    out_alg = _out_algebra(P, side)
    src = source if source is not None else box(P, N, cap)
    tgt = target if target is not None else box(P, N2, cap)
    prefixes_done = P._trie()
    d1, f, d2 = _rows(N.arrows), _rows(phi.coeffs), _rows(N2.arrows)
    coeffs: dict = {}
    for p in P.generators:
        prefixes, done = prefixes_done.get(p, (set(), {}))
        for x in N.generators:
            if side.input_vertex(N, x) != P.right_index[p]:
                continue
            start = None
            if side.right is not None:
                start = side.right.idempotents[side.right_vertex(N, x)]
            # state: (word, generator, right label, used phi?)
            stack = [((), x, start, False)]
            while stack:
                word, y, r, used = stack.pop()
                if used:
                    for q, c in done.get(word, ()):
                        _add_into(coeffs, (box_name(p, x), box_name(q, y)),
                                  _emit(P, side, out_alg, c, r))
                steps = [(d2, True)] if used else [(d1, False), (f, True)]
                for table, now_used in steps:
                    for z, c in table.get(y, ()):
                        for k, rk in side.terms(c):
                            w = word + (k,)
                            if w not in prefixes:
                                continue
                            if len(w) > cap:
                                raise NonTerminatingBoxTensor(
                                    f"path expansion exceeded the cap of {cap}")
                            r2 = side.rmul(r, rk)
                            if side.right is not None and r2 is None:
                                continue
                            stack.append((w, z, r2, now_used))
    return Morphism(src, tgt, coeffs, check=False)


def _cone_relabel(P: DABimodule, N: TypeDStructure) -> dict:
    """Names ``p*i:x`` of the paired cone, mapped to the cone names ``i:p*x``."""
    out = {}
    for g in N.generators:
        slot, _, x = g.partition(":")
        for p in P.generators:
            out[box_name(p, g)] = f"{slot}:{box_name(p, x)}"
    return out


def box_cone_identification(P: DABimodule, phi: Morphism, cap: Optional[int] = None) -> dict:
    """Check ``box(cone(phi)) = cone(id ⊠ phi)`` exactly and return the renaming used."""
    C = cone(phi, check=False)
    boxed = box(P, C, cap)
    ren = _cone_relabel(P, C)
    lhs = boxed.relabel(ren)
    rhs = cone(box_morphism(P, phi, cap), check=False)
    if lhs.generators != rhs.generators or lhs.arrows != rhs.arrows:
        raise ConeIdentificationFailed("boxing the cone differs from the cone of the boxed map")
    return ren


def box_typewriter(P: DABimodule, M: Typewriter, cap: Optional[int] = None) -> Typewriter:
    M0, M1 = box(P, M.M0, cap), box(P, M.M1, cap)
    d_f = box_morphism(P, M.d_f, cap, M0, M1)
    d_h = box_morphism(P, M.d_h, cap, M0, M1)
    ren_f = box_cone_identification(P, M.d_f, cap)
    ren_h = box_cone_identification(P, M.d_h, cap)
    cr = box_morphism(P, M.carriage_return, cap)
    cone_f, cone_h = cone(d_f, check=False), cone(d_h, check=False)
    coeffs = {(ren_f[s], ren_h[t]): c for (s, t), c in cr.coeffs.items()}
    return Typewriter.from_carriage_return(M0, M1, d_f, d_h, Morphism(cone_f, cone_h, coeffs, check=False))


def unit_relabel(N: TypeDStructure) -> dict:
    """Renaming ``x -> v*x`` identifying ``N`` with ``identity_da ⊠ N``."""
    alg = N.algebra
    if isinstance(alg, TensorAlgebra):
        return {x: box_name(v[0], x) for x, v in N.generators.items()}
    return {x: box_name(v, x) for x, v in N.generators.items()}


def unit_law_holds(N: TypeDStructure, cap: Optional[int] = None) -> bool:
    alg = N.algebra
    A = alg.left if isinstance(alg, TensorAlgebra) else alg
    return box(identity_da(A), N, cap) == N.relabel(unit_relabel(N))


__all__ = [
    "DABimodule", "DEFAULT_CAP", "check_da", "identity_da", "elementary_module", "box_type_d",
    "box_dd", "box", "box_morphism", "box_typewriter", "box_cone_identification", "unit_relabel",
    "unit_law_holds", "box_name", "default_cap",
]
