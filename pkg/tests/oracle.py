"""Independent reference computations used by the tests.

Nothing here touches the package's multiplication tables: paths are plain
tuples of arrow letters, products are concatenation followed by a substring
search for relations, and basis names are parsed back into letters.
"""

from collections import Counter
from itertools import product


class QuiverOracle:
    def __init__(self, vertices, arrows, relations, namer):
        self.vertices = tuple(vertices)
        self.arrows = {a: (s, t) for a, s, t in arrows}
        self.relations = [tuple(r) for r in relations]
        self.namer = namer

    def _ends(self, word):
        return self.arrows[word[0]][0], self.arrows[word[-1]][1]

    def _alive(self, word):
        for a, b in zip(word, word[1:]):
            if self.arrows[a][1] != self.arrows[b][0]:
                return False
        n = len(word)
        for r in self.relations:
            m = len(r)
            if any(word[i:i + m] == r for i in range(n - m + 1)):
                return False
        return True

    def paths(self, max_len=6):
        """All surviving words by brute force over every letter sequence."""
        out = {v: ("idem", v) for v in self.vertices}
        for n in range(1, max_len + 1):
            for word in product(sorted(self.arrows), repeat=n):
                if self._alive(word):
                    out[self.namer(word)] = word
        return out

    def word(self, name):
        if not hasattr(self, "_table"):
            self._table = self.paths()
        return self._table[name]

    def mul(self, a, b):
        """Name of the product ``a`` then ``b``, or ``None`` when it vanishes."""
        wa, wb = self.word(a), self.word(b)
        if wa[0] == "idem" and wb[0] == "idem":
            return a if a == b else None
        if wa[0] == "idem":
            return b if self._ends(wb)[0] == wa[1] else None
        if wb[0] == "idem":
            return a if self._ends(wa)[1] == wb[1] else None
        word = wa + wb
        return self.namer(word) if self._alive(word) else None

    def ends(self, name):
        w = self.word(name)
        if w[0] == "idem":
            return w[1], w[1]
        return self._ends(w)


TORUS = QuiverOracle(
    ("i0", "i1"),
    [("f", "i0", "i1"), ("g", "i1", "i0"), ("h", "i0", "i1")],
    [("g", "f"), ("h", "g")],
    lambda w: "".join(w),
)

STRANDS = QuiverOracle(
    ("j0", "j1"),
    [("rho1", "j0", "j1"), ("rho2", "j1", "j0"), ("rho3", "j0", "j1")],
    [("rho2", "rho1"), ("rho3", "rho2")],
    lambda w: "rho" + "".join(a[3:] for a in w),
)

TRIVIAL = QuiverOracle(("e",), [], [], lambda w: "".join(w))

BY_NAME = {"torus": TORUS, "strands-torus": STRANDS, "trivial": TRIVIAL}


def oracle_for(alg):
    return BY_NAME[alg.name]


def name_terms(alg, elem):
    """Basis names of an element, read through the public ``basis`` list only."""
    return [alg.basis[k] for k in elem]


def delta_squared(N, left=None, right=None):
    """Odd-count terms of the two-step composites, computed with the oracles.

    ``left``/``right`` are oracles for a DD structure whose basis names are
    pairs; for a plain structure pass only ``left``.
    """
    alg = N.algebra
    counts = Counter()
    arrows = [(s, t, name_terms(alg, c)) for (s, t), c in N.arrows.items()]
    for x, y, c1 in arrows:
        for y2, z, c2 in arrows:
            if y2 != y:
                continue
            for a, b in product(c1, c2):
                if right is None:
                    p = left.mul(a, b)
                else:
                    pl, pr = left.mul(a[0], b[0]), right.mul(a[1], b[1])
                    p = None if pl is None or pr is None else (pl, pr)
                if p is not None:
                    counts[(x, z, p)] += 1
    return sorted(k for k, v in counts.items() if v % 2)


def compose_oracle(first, second, oracle, pair=False):
    """Compose two name-level maps ``{(s, t): [names]}`` in application order."""
    counts = Counter()
    for (x, y), c1 in first.items():
        for (y2, z), c2 in second.items():
            if y != y2:
                continue
            for a, b in product(c1, c2):
                if pair:
                    pl, pr = oracle[0].mul(a[0], b[0]), oracle[1].mul(a[1], b[1])
                    p = None if pl is None or pr is None else (pl, pr)
                else:
                    p = oracle.mul(a, b)
                if p is not None:
                    counts[(x, z, p)] += 1
    out = {}
    for (x, z, p), v in counts.items():
        if v % 2:
            out.setdefault((x, z), set()).add(p)
    return out


def gf2_solve_bruteforce(rows, b):
    """Every solution of ``A x = b`` by enumeration (tiny systems only)."""
    n = len(rows[0]) if rows else 0
    sols = []
    for x in product((0, 1), repeat=n):
        if all(sum(r[i] * x[i] for i in range(n)) % 2 == bi for r, bi in zip(rows, b)):
            sols.append(x)
    return sols


def gf2_rank_bruteforce(rows):
    """Rank as log2 of the size of the row span."""
    span = {tuple(0 for _ in rows[0])} if rows else {()}
    for r in rows:
        span |= {tuple((a + b) % 2 for a, b in zip(v, r)) for v in span}
    return len(span).bit_length() - 1
