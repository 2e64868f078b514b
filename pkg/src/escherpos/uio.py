"""Unit interval orders encoded by area sequences.

An area sequence ``a`` of length ``n`` is nondecreasing with ``0 <= a[i] <= i``.
For ``i < j`` the intervals ``u_i`` and ``u_j`` intersect iff ``i >= a[j]``;
otherwise ``u_i`` lies strictly to the left of ``u_j``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import IndexOutOfRange, InvalidAreaSequence


class Relation(enum.IntEnum):
    LESS = 0
    GREATER = 1
    INTERSECT = 2


@dataclass(frozen=True)
class UnitIntervalOrder:
    area: tuple[int, ...]
    rel: tuple[tuple[Relation, ...], ...] = field(repr=False, compare=False)
    # arrow_out[x] is the bitmask of all y with x -> y
    arrow_out: tuple[int, ...] = field(repr=False, compare=False)
    # arrow_in[y] is the bitmask of all x with x -> y
    arrow_in: tuple[int, ...] = field(repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.area)

    def relation(self, i: int, j: int) -> Relation:
        return relation(self, i, j)

    def arrow(self, x: int, y: int) -> bool:
        return arrow(self, x, y)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.area)) + ")"


def _check_area(area: Sequence[int]) -> None:
    prev = 0
    for i, a in enumerate(area):
        if not isinstance(a, int) or isinstance(a, bool):
            raise InvalidAreaSequence(f"entry {i} is not an integer: {a!r}")
        if a < 0 or a > i:
            raise InvalidAreaSequence(f"a[{i}]={a} is outside [0, {i}]")
        if a < prev:
            raise InvalidAreaSequence(f"area sequence decreases at position {i}")
        prev = a


def uio_from_area(area: Iterable[int]) -> UnitIntervalOrder:
    """Build the UIO of an area sequence, deriving its full relation table."""
    area = tuple(area)
    _check_area(area)
    n = len(area)
    rel = [[Relation.INTERSECT] * n for _ in range(n)]
    for j in range(n):
        for i in range(j):
            if i < area[j]:
                rel[i][j] = Relation.LESS
                rel[j][i] = Relation.GREATER
    out = [0] * n
    inc = [0] * n
    for x in range(n):
        for y in range(n):
            if rel[x][y] != Relation.GREATER:
                out[x] |= 1 << y
                inc[y] |= 1 << x
    return UnitIntervalOrder(
        area=area,
        rel=tuple(tuple(r) for r in rel),
        arrow_out=tuple(out),
        arrow_in=tuple(inc),
    )


def _check_index(U: UnitIntervalOrder, i: int) -> None:
    if not 0 <= i < U.n:
        raise IndexOutOfRange(f"vertex {i} out of range for a UIO with {U.n} intervals")


def relation(U: UnitIntervalOrder, i: int, j: int) -> Relation:
    _check_index(U, i)
    _check_index(U, j)
    return U.rel[i][j]


def arrow(U: UnitIntervalOrder, x: int, y: int) -> bool:
    """``x -> y``: the intervals meet or ``x`` lies strictly left of ``y``."""
    _check_index(U, x)
    _check_index(U, y)
    return U.rel[x][y] != Relation.GREATER


def area_sequences(n: int) -> list[tuple[int, ...]]:
    """All area sequences of length ``n`` in lexicographic order."""
    if n < 1:
        raise ValueError("n must be positive")
    out: list[tuple[int, ...]] = []
    seq = [0] * n

    def extend(i: int) -> None:
        if i == n:
            out.append(tuple(seq))
            return
        for a in range(seq[i - 1] if i else 0, i + 1):
            seq[i] = a
            extend(i + 1)

    extend(0)
    return out


def generate_all_uios(n: int) -> list[UnitIntervalOrder]:
    """All UIOs with ``n`` intervals; the list position is the canonical UIO index."""
    return [uio_from_area(a) for a in area_sequences(n)]


def incomparability_edges(U: UnitIntervalOrder) -> list[tuple[int, int]]:
    return [(i, j) for j in range(U.n) for i in range(j) if U.rel[i][j] == Relation.INTERSECT]


def write_uio_file(path: str | Path, uios: Sequence[UnitIntervalOrder]) -> None:
    text = "".join(",".join(map(str, U.area)) + "\n" for U in uios)
    Path(path).write_text(text, encoding="utf-8")


def read_uio_file(path: str | Path) -> list[UnitIntervalOrder]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [uio_from_area(int(x) for x in line.split(",")) for line in lines if line.strip()]
