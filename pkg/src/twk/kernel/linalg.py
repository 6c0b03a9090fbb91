"""Sparse linear algebra over the two-element field.

Rows are packed into Python ints (bit ``c`` of a row is the entry in column
``c``), which keeps Gaussian elimination cheap for the few-thousand-column
systems that show up when solving for morphisms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ..errors import DimensionMismatch

BitVector = tuple  # tuple of 0/1 ints


@dataclass(frozen=True)
class BitMatrix:
    rows: int
    cols: int
    entries: frozenset = frozenset()

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatch("negative dimension")
        entries = frozenset(self.entries)
        for r, c in entries:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise DimensionMismatch(f"entry ({r}, {c}) outside {self.rows}x{self.cols}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zero(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, frozenset())

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, frozenset((i, i) for i in range(n)))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        n_rows = len(rows)
        n_cols = len(rows[0]) if rows else 0
        entries = set()
        for r, row in enumerate(rows):
            if len(row) != n_cols:
                raise DimensionMismatch("ragged rows")
            for c, bit in enumerate(row):
                if bit % 2:
                    entries.add((r, c))
        return cls(n_rows, n_cols, frozenset(entries))

    @classmethod
    def from_masks(cls, masks: Sequence[int], cols: int) -> "BitMatrix":
        entries = set()
        for r, mask in enumerate(masks):
            c = 0
            while mask:
                if mask & 1:
                    entries.add((r, c))
                mask >>= 1
                c += 1
        return cls(len(masks), cols, frozenset(entries))

    def row_masks(self) -> list[int]:
        masks = [0] * self.rows
        for r, c in self.entries:
            masks[r] |= 1 << c
        return masks

    def to_rows(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for r, c in self.entries:
            out[r][c] = 1
        return out

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shape mismatch in addition")
        return BitMatrix(self.rows, self.cols, self.entries ^ other.entries)

    def __matmul__(self, other):
        if isinstance(other, BitMatrix):
            if self.cols != other.rows:
                raise DimensionMismatch("shape mismatch in product")
            by_row: dict[int, list[int]] = {}
            for r, c in other.entries:
                by_row.setdefault(r, []).append(c)
            entries: set = set()
            for r, k in self.entries:
                for c in by_row.get(k, ()):
                    entries ^= {(r, c)}
            return BitMatrix(self.rows, other.cols, frozenset(entries))
        vec = tuple(other)
        if len(vec) != self.cols:
            raise DimensionMismatch("vector length does not match column count")
        out = [0] * self.rows
        for r, c in self.entries:
            if vec[c] % 2:
                out[r] ^= 1
        return tuple(out)

    def augmented(self, b: Sequence[int]) -> "BitMatrix":
        if len(b) != self.rows:
            raise DimensionMismatch("right-hand side length does not match row count")
        extra = {(r, self.cols) for r, bit in enumerate(b) if bit % 2}
        return BitMatrix(self.rows, self.cols + 1, self.entries | frozenset(extra))


def _eliminate(masks: list[int], n_cols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form in place; returns (rows, pivot columns)."""
    pivots: list[int] = []
    rank = 0
    for col in range(n_cols):
        bit = 1 << col
        pivot = None
        for r in range(rank, len(masks)):
            if masks[r] & bit:
                pivot = r
                break
        if pivot is None:
            continue
        masks[rank], masks[pivot] = masks[pivot], masks[rank]
        prow = masks[rank]
        for r in range(len(masks)):
            if r != rank and masks[r] & bit:
                masks[r] ^= prow
        pivots.append(col)
        rank += 1
        if rank == len(masks):
            break
    return masks[:rank], pivots


def rank(A: BitMatrix) -> int:
    _, pivots = _eliminate(A.row_masks(), A.cols)
    return len(pivots)


def solve_linear(A: BitMatrix, b: Sequence[int]) -> Optional[BitVector]:
    """Solve ``A x = b``; free variables are set to zero, so the answer is deterministic."""
    if len(b) != A.rows:
        raise DimensionMismatch(f"A has {A.rows} rows but b has {len(b)} entries")
    n = A.cols
    masks = A.row_masks()
    for r, bit in enumerate(b):
        if bit % 2:
            masks[r] |= 1 << n
    rows, pivots = _eliminate(masks, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = [0] * n
    for row, col in zip(rows, pivots):
        x[col] = (row >> n) & 1
    return tuple(x)


def nullspace(A: BitMatrix) -> list[BitVector]:
    """A basis of ``{x : A x = 0}``, one vector per free column, in column order."""
    rows, pivots = _eliminate(A.row_masks(), A.cols)
    pivot_set = set(pivots)
    basis = []
    for free in range(A.cols):
        if free in pivot_set:
            continue
        x = [0] * A.cols
        x[free] = 1
        for row, col in zip(rows, pivots):
            if (row >> free) & 1:
                x[col] = 1
        basis.append(tuple(x))
    return basis


def solve_masks(masks: Iterable[int], rhs: Iterable[int], n_cols: int) -> Optional[list[int]]:
    """Bitmask-level solver used by the larger internal systems.

    Returns the list of unknown indices set to 1, or ``None`` if inconsistent.
    """
    work = [m | ((r & 1) << n_cols) for m, r in zip(masks, rhs)]
    rows, pivots = _eliminate(work, n_cols + 1)
    if pivots and pivots[-1] == n_cols:
        return None
    return [col for row, col in zip(rows, pivots) if (row >> n_cols) & 1]


def nullspace_masks(masks: Iterable[int], n_cols: int) -> list[int]:
    """Nullspace basis as bitmasks over the unknowns."""
    rows, pivots = _eliminate(list(masks), n_cols)
    pivot_set = set(pivots)
    basis = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        x = 1 << free
        for row, col in zip(rows, pivots):
            if (row >> free) & 1:
                x |= 1 << col
        basis.append(x)
    return basis
