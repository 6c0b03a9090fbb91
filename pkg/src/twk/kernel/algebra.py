"""Finite-dimensional path algebras over F2 and their tensor products.

Paths compose in application order: the path ``f g`` runs along ``f`` first
and then ``g``.  An algebra element is a ``frozenset`` of basis indices (its
support); addition is symmetric difference.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

from ..errors import ForeignElement, IllFormedRelation, NotFiniteAtBound

Element = frozenset
ZERO: Element = frozenset()


@dataclass(frozen=True)
class QuiverPresentation:
    vertices: tuple
    arrows: tuple  # (name, source vertex, target vertex)
    relations: tuple = ()  # sequences of arrow names, each declared zero

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arrows", tuple(tuple(a) for a in self.arrows))
        object.__setattr__(self, "relations", tuple(tuple(r) for r in self.relations))
        if len(set(self.vertices)) != len(self.vertices):
            raise IllFormedRelation("duplicate vertex names")
        names = [a[0] for a in self.arrows]
        if len(set(names)) != len(names):
            raise IllFormedRelation("duplicate arrow names")
        if set(names) & set(self.vertices):
            raise IllFormedRelation("arrow and vertex names must be distinct")
        for name, s, t in self.arrows:
            if s not in self.vertices or t not in self.vertices:
                raise IllFormedRelation(f"arrow {name!r} references an undeclared vertex")
        ends = {name: (s, t) for name, s, t in self.arrows}
        for rel in self.relations:
            if not rel:
                raise IllFormedRelation("empty relation")
            for a in rel:
                if a not in ends:
                    raise IllFormedRelation(f"relation {rel!r} uses unknown arrow {a!r}")
            for a, b in zip(rel, rel[1:]):
                if ends[a][1] != ends[b][0]:
                    raise IllFormedRelation(f"relation {rel!r} is not a composable path")


class Algebra:
    """A finite-dimensional algebra with a basis of "paths" between vertices.

    ``source[k]``/``target[k]`` give the vertex indices of basis element
    ``k``; ``table`` holds the nonzero products of basis elements.  Every
    vertex ``v`` has an idempotent basis element ``idempotents[v]``.
    """

    def __init__(self, name: str, vertices: Sequence[Hashable], basis: Sequence[Hashable],
                 source: Sequence[int], target: Sequence[int],
                 table: Mapping[tuple[int, int], int], idempotents: Sequence[int]):
        self.name = name
        self.vertices = tuple(vertices)
        self.basis = tuple(basis)
        self.source = tuple(source)
        self.target = tuple(target)
        self.table = dict(table)
        self.idempotents = tuple(idempotents)
        self._index = {b: i for i, b in enumerate(self.basis)}
        self._vertex_index = {v: i for i, v in enumerate(self.vertices)}
        if len(self._index) != len(self.basis):
            raise ValueError("duplicate basis names")

    def __repr__(self):
        return f"<Algebra {self.name} dim={self.dim}>"

    @cached_property
    def _key(self):
        return (self.vertices, self.basis, self.source, self.target,
                frozenset(self.table.items()), self.idempotents)

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Algebra) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def idempotent_set(self) -> frozenset:
        return frozenset(self.idempotents)

    def vertex_index(self, vertex) -> int:
        try:
            return self._vertex_index[vertex]
        except KeyError:
            raise ForeignElement(f"{vertex!r} is not a vertex of {self.name}") from None

    def index(self, name) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ForeignElement(f"{name!r} is not a basis element of {self.name}") from None

    def element(self, *names) -> Element:
        out = set()
        for n in names:
            out ^= {self.index(n)}
        return frozenset(out)

    def names(self, elem: Element) -> list:
        return [self.basis[k] for k in sorted(elem)]

    def format(self, elem: Element) -> str:
        if not elem:
            return "0"
        return " + ".join(_fmt(self.basis[k]) for k in sorted(elem))

    def unit(self, vertex) -> Element:
        return frozenset({self.idempotents[self.vertex_index(vertex)]})

    def check_element(self, elem: Element) -> Element:
        for k in elem:
            if not (isinstance(k, int) and 0 <= k < self.dim):
                raise ForeignElement(f"{k!r} is not a basis index of {self.name}")
        return elem

    @cached_property
    def _between(self) -> dict:
        out: dict = {}
        for k in range(self.dim):
            out.setdefault((self.source[k], self.target[k]), []).append(k)
        return {key: tuple(v) for key, v in out.items()}

    def between(self, u: int, v: int) -> tuple:
        """Basis indices running from vertex index ``u`` to vertex index ``v``."""
        return self._between.get((u, v), ())

    def is_idempotent(self, k: int) -> bool:
        return k in self.idempotent_set

    def mul_basis(self, i: int, j: int) -> Optional[int]:
        return self.table.get((i, j))

    def multiply(self, a: Element, b: Element) -> Element:
        out: set = set()
        table = self.table
        for i in a:
            for j in b:
                k = table.get((i, j))
                if k is not None:
                    out ^= {k}
        return frozenset(out)

    def inverse(self, c: Element) -> Element:
        """Inverse of ``e + n`` inside ``e A e`` where ``n`` is nilpotent."""
        idem = [k for k in c if self.is_idempotent(k)]
        if len(idem) != 1:
            raise ValueError("element has no single idempotent component")
        e = frozenset(idem)
        n = c ^ e
        result, term = e, e
        for _ in range(self.dim + 1):
            term = self.multiply(term, n)
            if not term:
                return result
            result = result ^ term
        raise ValueError("radical part is not nilpotent")

    def transport(self, elem: Element, name_map: Mapping, target: "Algebra") -> Element:
        out: set = set()
        for k in elem:
            out ^= {target.index(name_map[self.basis[k]])}
        return frozenset(out)


def _fmt(name) -> str:
    if isinstance(name, tuple):
        return "(" + ",".join(map(str, name)) + ")"
    return str(name)


class PathAlgebra(Algebra):
    def __init__(self, presentation: QuiverPresentation, max_path_len: int, paths: Sequence[tuple],
                 name: str, path_name: Callable[[tuple], str]):
        self.presentation = presentation
        self.max_path_len = max_path_len
        self.paths = tuple(paths)  # arrow-name tuple per basis element; () for idempotents
        self.path_name = path_name
        ends = {a: (s, t) for a, s, t in presentation.arrows}
        vindex = {v: i for i, v in enumerate(presentation.vertices)}
        basis, source, target = [], [], []
        for k, p in enumerate(self.paths):
            if not p:
                v = presentation.vertices[k]
                basis.append(v)
                source.append(vindex[v])
                target.append(vindex[v])
            else:
                basis.append(path_name(p))
                source.append(vindex[ends[p[0]][0]])
                target.append(vindex[ends[p[-1]][1]])
        path_index = {p: k for k, p in enumerate(self.paths) if p}
        relations = set(presentation.relations)
        table = {}
        n_vertices = len(presentation.vertices)
        for i, p in enumerate(self.paths):
            for j, q in enumerate(self.paths):
                if target[i] != source[j]:
                    continue
                if not p:
                    table[(i, j)] = j
                elif not q:
                    table[(i, j)] = i
                else:
                    pq = p + q
                    if _contains_relation(pq, relations):
                        continue
                    k = path_index.get(pq)
                    if k is not None:
                        table[(i, j)] = k
        super().__init__(name, presentation.vertices, basis, source, target, table,
                         list(range(n_vertices)))


def _contains_relation(path: tuple, relations) -> bool:
    for rel in relations:
        n = len(rel)
        for start in range(len(path) - n + 1):
            if path[start:start + n] == rel:
                return True
    return False


def _concat_names(path: tuple) -> str:
    return "".join(path)


def build_algebra(p: QuiverPresentation, max_path_len: int, *, name: str = "quiver",
                  path_name: Callable[[tuple], str] = _concat_names) -> PathAlgebra:
    """Enumerate the surviving paths of ``p`` and certify finite dimension."""
    if max_path_len < 1:
        raise ValueError("max_path_len must be at least 1")
    relations = set(p.relations)
    out_arrows: dict = {}
    for a, s, t in p.arrows:
        out_arrows.setdefault(s, []).append((a, t))
    ends = {a: t for a, _s, t in p.arrows}

    paths: list[tuple] = [()] * len(p.vertices)
    layer = [(a,) for a, _s, _t in p.arrows if not _contains_relation((a,), relations)]
    length = 1
    while layer:
        if length > max_path_len:
            raise NotFiniteAtBound(
                f"path {'.'.join(layer[0])} of length {length} survives past bound {max_path_len}")
        paths.extend(layer)
        nxt = []
        for path in layer:
            for a, _t in out_arrows.get(ends[path[-1]], ()):
                cand = path + (a,)
                # only the new suffixes can complete a relation
                if not _contains_relation(cand[-_max_rel(relations):], relations):
                    nxt.append(cand)
        layer = nxt
        length += 1
    # order: idempotents, then by length, then by arrow declaration order
    order = {a: i for i, (a, _s, _t) in enumerate(p.arrows)}
    head, tail = paths[:len(p.vertices)], paths[len(p.vertices):]
    tail.sort(key=lambda q: (len(q), [order[a] for a in q]))
    return PathAlgebra(p, max_path_len, head + tail, name, path_name)


def _max_rel(relations) -> int:
    return max((len(r) for r in relations), default=1)


def multiply(alg: Algebra, a: Element, b: Element) -> Element:
    alg.check_element(a)
    alg.check_element(b)
    return alg.multiply(a, b)


TORUS_PRESENTATION = QuiverPresentation(
    vertices=("i0", "i1"),
    arrows=(("f", "i0", "i1"), ("g", "i1", "i0"), ("h", "i0", "i1")),
    relations=(("g", "f"), ("h", "g")),
)

STRANDS_PRESENTATION = QuiverPresentation(
    vertices=("j0", "j1"),
    arrows=(("rho1", "j0", "j1"), ("rho2", "j1", "j0"), ("rho3", "j0", "j1")),
    relations=(("rho2", "rho1"), ("rho3", "rho2")),
)

TRIVIAL_PRESENTATION = QuiverPresentation(vertices=("e",), arrows=(), relations=())


def _rho_name(path: tuple) -> str:
    return "rho" + "".join(a[3:] for a in path)


@lru_cache(maxsize=None)
def torus_algebra() -> PathAlgebra:
    return build_algebra(TORUS_PRESENTATION, 8, name="torus")


@lru_cache(maxsize=None)
def strand_algebra_torus() -> PathAlgebra:
    return build_algebra(STRANDS_PRESENTATION, 8, name="strands-torus", path_name=_rho_name)


@lru_cache(maxsize=None)
def trivial_algebra() -> PathAlgebra:
    return build_algebra(TRIVIAL_PRESENTATION, 1, name="trivial")


def torus_iso() -> dict:
    """Name map from the torus algebra to the strand algebra (f, g, h to rho1, rho2, rho3)."""
    src, dst = torus_algebra(), strand_algebra_torus()
    letter = {"f": "rho1", "g": "rho2", "h": "rho3"}
    out = {}
    for k, path in enumerate(src.paths):
        if not path:
            out[src.basis[k]] = dst.basis[k]
        else:
            out[src.basis[k]] = _rho_name(tuple(letter[a] for a in path))
    return out


def invert_name_map(name_map: Mapping) -> dict:
    inv = {v: k for k, v in name_map.items()}
    if len(inv) != len(name_map):
        raise ValueError("name map is not injective")
    return inv


class TensorAlgebra(Algebra):
    """``left ⊗ right`` with componentwise multiplication; basis names are pairs."""

    def __init__(self, left: Algebra, right: Algebra):
        self.left = left
        self.right = right
        nl, nr = left.dim, right.dim
        vertices = [(u, v) for u in left.vertices for v in right.vertices]
        nv = len(right.vertices)
        basis, source, target = [], [], []
        for i in range(nl):
            for j in range(nr):
                basis.append((left.basis[i], right.basis[j]))
                source.append(left.source[i] * nv + right.source[j])
                target.append(left.target[i] * nv + right.target[j])
        table = {}
        for (i1, i2), i in left.table.items():
            for (j1, j2), j in right.table.items():
                table[(i1 * nr + j1, i2 * nr + j2)] = i * nr + j
        idempotents = [left.idempotents[u] * nr + right.idempotents[v]
                       for u in range(len(left.vertices)) for v in range(nv)]
        super().__init__(f"{left.name}⊗{right.name}", vertices, basis, source, target, table,
                         idempotents)

    def pair(self, i: int, j: int) -> int:
        return i * self.right.dim + j

    def split(self, k: int) -> tuple[int, int]:
        return divmod(k, self.right.dim)

    def tensor(self, a: Element, t: Element) -> Element:
        return frozenset(self.pair(i, j) for i in a for j in t)


@lru_cache(maxsize=None)
def tensor_algebra(left: Algebra, right: Algebra) -> TensorAlgebra:
    return TensorAlgebra(left, right)


def associativity_failures(alg: Algebra) -> list[tuple[int, int, int]]:
    """All basis triples where ``(ab)c != a(bc)``; exhaustive."""
    bad = []
    r = range(alg.dim)
    for a in r:
        for b in r:
            ab = alg.table.get((a, b))
            for c in r:
                left = alg.table.get((ab, c)) if ab is not None else None
                bc = alg.table.get((b, c))
                right = alg.table.get((a, bc)) if bc is not None else None
                if left != right:
                    bad.append((a, b, c))
    return bad


def reserved_algebra(name: str) -> Algebra:
    table = {"torus": torus_algebra, "strands-torus": strand_algebra_torus,
             "trivial": trivial_algebra}
    try:
        return table[name]()
    except KeyError:
        raise ForeignElement(f"unknown reserved algebra {name!r}") from None


def iter_composable_chains(alg: Algebra, start: int, length: int) -> Iterable[tuple]:
    """All sequences of basis indices ``b1..bn`` that are end-to-end composable from ``start``."""
    if length == 0:
        yield ()
        return
    for k in range(alg.dim):
        if alg.source[k] != start:
            continue
        for rest in iter_composable_chains(alg, alg.target[k], length - 1):
            yield (k,) + rest
