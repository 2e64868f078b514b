"""Condition graphs over core-vector slots, their predictions and scores.

A condition graph is an OR of rows; each row is an AND of directed slot
comparisons. An edge ``(src, dst, LESS)`` holds when ``core[src] <
core[dst]`` and ``(src, dst, GEQ)`` when ``core[src] >= core[dst]``.
Comparisons run on the doubled integer encoding, sentinels included.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cores import CoreTypeTable, CoreVector, layout
from .errors import LayoutMismatch, LengthMismatch, UnsupportedLength
from .symfunc import Partition, as_partition, format_partition, parse_partition


class EdgeType(enum.IntEnum):
    LESS = 0
    GEQ = 1
    IRRELEVANT = 2


Edge = tuple[int, int, EdgeType]
Row = tuple[Edge, ...]

TRIVIAL_EMPTY = "empty"
TRIVIAL_ACCEPTS_ALL = "accepts-all"


def _normalise_row(row: Mapping[tuple[int, int], EdgeType] | Iterable[Edge]) -> Row:
    items = row.items() if isinstance(row, Mapping) else (((s, d), t) for s, d, t in row)
    edges = {}
    for (s, d), t in items:
        t = EdgeType(t)
        if t != EdgeType.IRRELEVANT:
            edges[(int(s), int(d))] = t
    return tuple((s, d, t) for (s, d), t in sorted(edges.items()))


@dataclass(frozen=True)
class ConditionGraph:
    arity: int
    rows: tuple[Row, ...]
    lam: Partition | None = None

    def __post_init__(self) -> None:
        if not self.rows:
            raise ValueError("a condition graph needs at least one row")
        width = len(layout(self.arity))
        for row in self.rows:
            for s, d, _ in row:
                if not (0 <= s < width and 0 <= d < width):
                    raise LayoutMismatch(f"slot pair ({s}, {d}) outside a {width}-slot layout")

    @classmethod
    def from_rows(
        cls,
        arity: int,
        rows: Sequence[Mapping[tuple[int, int], EdgeType] | Iterable[Edge]],
        lam: Sequence[int] | None = None,
    ) -> "ConditionGraph":
        return cls(arity, tuple(_normalise_row(r) for r in rows), None if lam is None else as_partition(lam))

    @property
    def width(self) -> int:
        return len(layout(self.arity))

    @property
    def num_edges(self) -> int:
        return sum(len(r) for r in self.rows)

    def has_empty_row(self) -> bool:
        return any(not r for r in self.rows)

    def key(self) -> tuple:
        """Canonical encoding: row order does not change what a graph accepts."""
        return (self.arity, tuple(sorted(self.rows)))

    def with_row(self, row: Mapping[tuple[int, int], EdgeType] | Iterable[Edge]) -> "ConditionGraph":
        return ConditionGraph(self.arity, self.rows + (_normalise_row(row),), self.lam)

    def describe(self) -> str:
        names = layout(self.arity).names
        parts = []
        for row in self.rows:
            if not row:
                parts.append("[true]")
                continue
            conds = []
            for s, d, t in row:
                op = "<" if t == EdgeType.LESS else ">="
                conds.append(f"{names[s]} {op} {names[d]}")
            parts.append("[" + " AND ".join(conds) + "]")
        return " OR ".join(parts)


def _row_holds(core: Sequence[int], row: Row) -> bool:
    for s, d, t in row:
        if (core[s] < core[d]) != (t == EdgeType.LESS):
            return False
    return True


def satisfies(core: CoreVector, G: ConditionGraph) -> bool:
    if len(core) != G.width:
        raise LayoutMismatch(f"core of length {len(core)} used with a {G.width}-slot graph")
    return any(_row_holds(core, row) for row in G.rows)


@dataclass
class CompiledTable:
    """Dense arrays for fast repeated evaluation of many graphs on one table."""

    arity: int
    values: np.ndarray  # (types, slots) doubled core values
    counts: np.ndarray  # (types, uios) tuple counts
    cores: list[CoreVector] = field(repr=False)

    @classmethod
    def from_table(cls, table: CoreTypeTable, uio_subset: Sequence[int] | None = None) -> "CompiledTable":
        width = len(layout(table.arity))
        cores = sorted(table.entries)
        values = np.array(cores, dtype=np.int64).reshape(len(cores), width)
        counts = np.zeros((len(cores), table.num_uios), dtype=np.int64)
        for i, core in enumerate(cores):
            for idx, c in table.entries[core].items():
                counts[i, idx] = c
        if uio_subset is not None:
            counts = counts[:, list(uio_subset)]
        return cls(table.arity, values, counts, cores)

    @property
    def num_uios(self) -> int:
        return self.counts.shape[1]

    def accepted(self, G: ConditionGraph) -> np.ndarray:
        if G.arity != self.arity:
            raise LayoutMismatch(f"graph arity {G.arity} vs table arity {self.arity}")
        out = np.zeros(len(self.cores), dtype=bool)
        for row in G.rows:
            ok = np.ones(len(self.cores), dtype=bool)
            for s, d, t in row:
                less = self.values[:, s] < self.values[:, d]
                ok &= less if t == EdgeType.LESS else ~less
            out |= ok
        return out

    def predict(self, G: ConditionGraph) -> np.ndarray:
        return self.accepted(G).astype(np.int64) @ self.counts


def predicted_vector(G: ConditionGraph, table: CoreTypeTable) -> list[int]:
    """Per UIO, the number of tuples whose core satisfies ``G``."""
    if G.arity != table.arity:
        raise LayoutMismatch(f"graph arity {G.arity} vs table arity {table.arity}")
    out = [0] * table.num_uios
    for core, per in table.entries.items():
        if satisfies(core, G):
            for idx, c in per.items():
                out[idx] += c
    return out


@dataclass(frozen=True)
class ScoreConfig:
    edge_penalty: Fraction = Fraction(1, 10)
    trivial_row_penalty: int = 10000
    lower_bound_mode: bool = False
    lower_bound_penalty: int = 5000
    trivial_row: str = TRIVIAL_EMPTY

    def __post_init__(self) -> None:
        object.__setattr__(self, "edge_penalty", Fraction(str(self.edge_penalty)))
        if self.edge_penalty < 0 or self.trivial_row_penalty < 0 or self.lower_bound_penalty < 0:
            raise ValueError("penalties must be nonnegative")
        if self.trivial_row not in (TRIVIAL_EMPTY, TRIVIAL_ACCEPTS_ALL):
            raise ValueError(f"unknown trivial-row rule {self.trivial_row!r}")


def has_trivial_row(G: ConditionGraph, cfg: ScoreConfig, table: CompiledTable | None = None) -> bool:
    if cfg.trivial_row == TRIVIAL_EMPTY or table is None:
        return G.has_empty_row()
    single = [ConditionGraph(G.arity, (row,)) for row in G.rows]
    return any(bool(table.accepted(g).all()) for g in single)


def score(
    G: ConditionGraph,
    predicted: Sequence[int],
    truth: Sequence[int],
    cfg: ScoreConfig = ScoreConfig(),
    table: CompiledTable | None = None,
) -> Fraction:
    if len(predicted) != len(truth):
        raise LengthMismatch(f"{len(predicted)} predictions for {len(truth)} targets")
    if cfg.lower_bound_mode and any(x > y for x, y in zip(predicted, truth)):
        return Fraction(-cfg.lower_bound_penalty)
    l1 = sum(abs(int(x) - int(y)) for x, y in zip(predicted, truth))
    trivial = cfg.trivial_row_penalty if has_trivial_row(G, cfg, table) else 0
    return -Fraction(l1) - trivial - G.num_edges * cfg.edge_penalty


VARIANT_CANONICAL = "canonical"
VARIANT_LOWER = "lower_bound"


def canonical_model(lam: Sequence[int], variant: str = VARIANT_CANONICAL) -> ConditionGraph:
    """``SEEnd < FirstIns`` on every pair block; the lower-bound variant adds ``0 >= SEStart``."""
    lam = as_partition(lam)
    r = len(lam)
    if not 2 <= r <= 4:
        raise UnsupportedLength(f"canonical models exist for 2..4 parts, got {r}")
    if variant not in (VARIANT_CANONICAL, VARIANT_LOWER):
        raise ValueError(f"unknown variant {variant!r}")
    lay = layout(r)
    row: dict[tuple[int, int], EdgeType] = {}
    for i, j in lay.pairs:
        row[(lay.se_end(i, j), lay.first_ins(i, j))] = EdgeType.LESS
        if variant == VARIANT_LOWER:
            row[(0, lay.se_start(i, j))] = EdgeType.GEQ
    return ConditionGraph.from_rows(r, [row], lam)


def write_graph(path: str | Path, G: ConditionGraph) -> None:
    """Line-oriented graph file::

        lambda 3,2,1
        arity 3
        rows 2
        edge <row> <src> <dst> LESS|GEQ     (sorted by row, src, dst)
    """
    lam = format_partition(G.lam) if G.lam else "-"
    lines = [f"lambda {lam}", f"arity {G.arity}", f"rows {len(G.rows)}"]
    for r, row in enumerate(G.rows):
        for s, d, t in row:
            lines.append(f"edge {r} {s} {d} {t.name}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_graph(path: str | Path) -> ConditionGraph:
    lam = None
    arity = nrows = None
    edges: list[tuple[int, int, int, EdgeType]] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "lambda":
            lam = None if parts[1] == "-" else parse_partition(parts[1])
        elif parts[0] == "arity":
            arity = int(parts[1])
        elif parts[0] == "rows":
            nrows = int(parts[1])
        elif parts[0] == "edge":
            edges.append((int(parts[1]), int(parts[2]), int(parts[3]), EdgeType[parts[4]]))
        else:
            raise ValueError(f"unrecognised line in graph file: {line!r}")
    if arity is None or nrows is None:
        raise ValueError(f"{path} lacks an arity or rows line")
    rows: list[dict[tuple[int, int], EdgeType]] = [{} for _ in range(nrows)]
    for r, s, d, t in edges:
        rows[r][(s, d)] = t
    return ConditionGraph.from_rows(arity, rows, lam)


BOUND_EXACT = "exact"
BOUND_UNDER = "under"
BOUND_OVER = "over"
BOUND_MIXED = "mixed"


@dataclass(frozen=True)
class CellResult:
    """One table cell in both conventions plus its bound class."""

    abs_error: int
    total: int
    correct: int
    num_uios: int
    bound: str

    @property
    def error_text(self) -> str:
        return f"{self.abs_error}/{self.total}"

    @property
    def correct_text(self) -> str:
        return f"{self.correct}/{self.num_uios}"


def evaluate_cell(predicted: Sequence[int], truth: Sequence[int]) -> CellResult:
    if len(predicted) != len(truth):
        raise LengthMismatch(f"{len(predicted)} predictions for {len(truth)} targets")
    pairs = [(int(x), int(y)) for x, y in zip(predicted, truth)]
    over = any(x > y for x, y in pairs)
    under = any(x < y for x, y in pairs)
    bound = BOUND_MIXED if over and under else BOUND_OVER if over else BOUND_UNDER if under else BOUND_EXACT
    return CellResult(
        abs_error=sum(abs(x - y) for x, y in pairs),
        total=sum(y for _, y in pairs),
        correct=sum(x == y for x, y in pairs),
        num_uios=len(pairs),
        bound=bound,
    )
