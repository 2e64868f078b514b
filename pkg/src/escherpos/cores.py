"""Core vectors of Escher tuples and core-type tables.

Core coordinates are half-integers. They are stored doubled so that every
slot is an exact integer: ``0 -> 0``, ``-1 -> -2``, ``-0.5 -> -1``,
``1.5 -> 3``. SEStart/SEEnd slots are therefore even and FirstIns slots odd.

How the SEStart of a pair ``(u, v)`` is measured is set by a
:class:`CoreConvention`. The default measures the first splitting point on
the Escher that ``psi`` builds from the pair (``u +_FirstIns v``, restarted at
``v_k`` when FirstIns >= k) and reports positions counted from 1. Measuring on
``u`` itself with positions counted from 0 is available as
``SINGLE_ESCHER_CONVENTION``.

Slot layout for arity ``r``: slot 0 is the constant zero; then one
``(SEStart, SEEnd, FirstIns)`` block per pair ``i < j`` in lexicographic
order; then for each triple ``i < j < k`` the three reduced blocks
``(u_i u_j, u_k)``, ``(u_i u_k, u_j)``, ``(u_j u_k, u_i)``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from .errors import NotDisjoint, UnsupportedArity
from .escher import Escher, concat_at, first_insertion, iter_escher_tuples, se_start, start_at, support
from .symfunc import Partition, as_partition, format_partition, parse_partition
from .uio import UnitIntervalOrder, generate_all_uios, uio_from_area

CoreVector = tuple[int, ...]

GUARD_NONEMPTY = "nonempty"
GUARD_LITERAL = "literal"

SOURCE_ROTATED = "rotated"
SOURCE_CONCAT = "concat"
SOURCE_FIRST = "first"

NO_INSERTION_BLOCK = (-2, -2, -1)


@dataclass(frozen=True)
class CoreConvention:
    """Which Escher SEStart is read from, how the branch guard is tested,
    and whether positions are counted from 0 or 1.

    ``source``:
      ``"rotated"``  the Escher ``psi(u, v)``;
      ``"concat"``   ``u +_FirstIns v`` without the restart;
      ``"first"``    ``u`` itself.
    ``guard``: ``"nonempty"`` takes the SEStart branch whenever a splitting
    point exists; ``"literal"`` only when SEStart is positive.
    ``origin``: added to SEStart, SEEnd and FirstIns (never to sentinels).
    """

    source: str = SOURCE_ROTATED
    guard: str = GUARD_NONEMPTY
    origin: int = 1

    def __post_init__(self) -> None:
        if self.source not in (SOURCE_ROTATED, SOURCE_CONCAT, SOURCE_FIRST):
            raise ValueError(f"unknown source {self.source!r}")
        if self.guard not in (GUARD_NONEMPTY, GUARD_LITERAL):
            raise ValueError(f"unknown guard {self.guard!r}")
        if self.origin not in (0, 1):
            raise ValueError("origin must be 0 or 1")


DEFAULT_CONVENTION = CoreConvention()
SINGLE_ESCHER_CONVENTION = CoreConvention(SOURCE_FIRST, GUARD_NONEMPTY, 0)


def slot_count(r: int) -> int:
    """Core dimension: 4, 19, 55 for arity 2, 3, 4."""
    if r < 2:
        raise UnsupportedArity(f"arity {r} has no core vector")
    return 1 + 3 * (len(list(itertools.combinations(range(r), 2))) + 3 * len(list(itertools.combinations(range(r), 3))))


@dataclass(frozen=True)
class SlotLayout:
    arity: int
    names: tuple[str, ...] = field(init=False)
    # (i, j) pair -> index of its SEStart slot; SEEnd and FirstIns follow
    pair_offsets: dict[tuple[int, int], int] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not 2 <= self.arity <= 4:
            raise UnsupportedArity(f"arity {self.arity} is not supported (2..4)")
        names = ["zero"]
        offsets = {}
        for i, j in itertools.combinations(range(self.arity), 2):
            offsets[(i, j)] = len(names)
            a, b = f"u{i + 1}", f"u{j + 1}"
            names += [f"SEStart({a},{b})", f"SEEnd({a},{b})", f"FirstIns({a},{b})"]
        if self.arity > 2:
            for i, j, k in itertools.combinations(range(self.arity), 3):
                for x, y, z in ((i, j, k), (i, k, j), (j, k, i)):
                    a, b = f"u{x + 1}u{y + 1}", f"u{z + 1}"
                    names += [f"SEStart({a},{b})", f"SEEnd({a},{b})", f"FirstIns({a},{b})"]
        object.__setattr__(self, "names", tuple(names))
        object.__setattr__(self, "pair_offsets", offsets)

    def __len__(self) -> int:
        return len(self.names)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(self.pair_offsets)

    def se_start(self, i: int, j: int) -> int:
        return self.pair_offsets[(i, j)]

    def se_end(self, i: int, j: int) -> int:
        return self.pair_offsets[(i, j)] + 1

    def first_ins(self, i: int, j: int) -> int:
        return self.pair_offsets[(i, j)] + 2

    def index(self, name: str) -> int:
        return self.names.index(name)


@lru_cache(maxsize=None)
def layout(arity: int) -> SlotLayout:
    return SlotLayout(arity)


def decode(slots: Iterable[int]) -> tuple[Fraction, ...]:
    """Undo the doubling: ``(0, 2, 10, 3) -> (0, 1, 5, 3/2)``."""
    return tuple(Fraction(s, 2) for s in slots)


def _split_source(u: Sequence[int], v: Sequence[int], fi: int, source: str) -> Sequence[int]:
    if source == SOURCE_FIRST:
        return u
    w = concat_at(u, v, fi)
    if source == SOURCE_ROTATED and fi >= len(u):
        return start_at(w, v[len(u) % len(v)])
    return w


def _pair_block(
    U: UnitIntervalOrder, u: Sequence[int], v: Sequence[int], conv: CoreConvention
) -> tuple[int, int, int]:
    fi = first_insertion(U, u, v)
    if fi is None:
        return NO_INSERTION_BLOCK
    l = len(v)
    s = se_start(U, _split_source(u, v, fi, conv.source), l)
    use_split = s is not None and (conv.guard == GUARD_NONEMPTY or s > 0)
    o = conv.origin
    if use_split:
        return (2 * (s + o), 2 * (s + o + l), 2 * (fi + o) + 1)
    return (-2, -2, 2 * (fi + o) + 3)


def core_pair(
    U: UnitIntervalOrder, u: Sequence[int], v: Sequence[int], conv: CoreConvention = DEFAULT_CONVENTION
) -> CoreVector:
    """Four-slot core of a disjoint Escher pair."""
    if support(u) & support(v):
        raise NotDisjoint("core_pair needs disjoint Eschers")
    return (0,) + _pair_block(U, u, v, conv)


def core_pair_reduced(
    U: UnitIntervalOrder,
    u: Sequence[int],
    v: Sequence[int],
    w: Sequence[int],
    conv: CoreConvention = DEFAULT_CONVENTION,
) -> tuple[int, int, int]:
    """Three-slot block for ``(uv, w)``: the pair core of ``u +_FirstIns v`` against ``w``."""
    if support(u) & support(v) or support(u) & support(w) or support(v) & support(w):
        raise NotDisjoint("core_pair_reduced needs pairwise disjoint Eschers")
    return _reduced_block(U, u, v, w, conv)


def _reduced_block(U, u, v, w, conv) -> tuple[int, int, int]:
    fi = first_insertion(U, u, v)
    if fi is None:
        return NO_INSERTION_BLOCK
    return _pair_block(U, concat_at(u, v, fi), w, conv)


def core_tuple(U: UnitIntervalOrder, tup: Sequence[Sequence[int]], conv: CoreConvention = DEFAULT_CONVENTION) -> CoreVector:
    r = len(tup)
    if not 2 <= r <= 4:
        raise UnsupportedArity(f"core vectors are defined for 2..4 Eschers, got {r}")
    masks = [support(e) for e in tup]
    for a, b in itertools.combinations(masks, 2):
        if a & b:
            raise NotDisjoint("Escher tuple entries must be disjoint")
    return _core_unchecked(U, tup, conv)


def _core_unchecked(U, tup, conv) -> CoreVector:
    r = len(tup)
    slots = [0]
    for i, j in itertools.combinations(range(r), 2):
        slots += _pair_block(U, tup[i], tup[j], conv)
    if r > 2:
        for i, j, k in itertools.combinations(range(r), 3):
            for x, y, z in ((i, j, k), (i, k, j), (j, k, i)):
                slots += _reduced_block(U, tup[x], tup[y], tup[z], conv)
    return tuple(slots)


@dataclass
class CoreTypeTable:
    """Distinct core vectors of one ``(lambda, n)`` with per-UIO multiplicities."""

    lam: Partition
    n: int
    num_uios: int
    entries: dict[CoreVector, dict[int, int]] = field(default_factory=dict)
    convention: CoreConvention = DEFAULT_CONVENTION

    @property
    def arity(self) -> int:
        return len(self.lam)

    def add(self, core: CoreVector, uio_index: int, count: int = 1) -> None:
        per = self.entries.setdefault(core, {})
        per[uio_index] = per.get(uio_index, 0) + count

    def merge(self, other: "CoreTypeTable") -> None:
        for core, per in other.entries.items():
            for idx, c in per.items():
                self.add(core, idx, c)

    def totals(self) -> list[int]:
        """Per-UIO number of tuples (sum over core-types)."""
        out = [0] * self.num_uios
        for per in self.entries.values():
            for idx, c in per.items():
                out[idx] += c
        return out

    def __len__(self) -> int:
        return len(self.entries)


def core_counts_for_uio(
    U: UnitIntervalOrder, lam: Sequence[int], conv: CoreConvention = DEFAULT_CONVENTION
) -> dict[CoreVector, int]:
    """Tally the core vectors of every ``lam``-Escher tuple in ``U``."""
    r = len(lam)
    pairs = list(itertools.combinations(range(r), 2))
    triples = [
        (x, y, z)
        for i, j, k in itertools.combinations(range(r), 3)
        for x, y, z in ((i, j, k), (i, k, j), (j, k, i))
    ]
    # The same (u, v) pair recurs in many tuples, so blocks are memoised.
    blocks: dict[tuple, tuple[int, int, int]] = {}
    reduced: dict[tuple, tuple[int, int, int]] = {}
    counts: dict[CoreVector, int] = {}
    for tup in iter_escher_tuples(U, lam):
        slots = [0]
        for i, j in pairs:
            key = (tup[i], tup[j])
            b = blocks.get(key)
            if b is None:
                b = blocks[key] = _pair_block(U, tup[i], tup[j], conv)
            slots += b
        for x, y, z in triples:
            key = (tup[x], tup[y], tup[z])
            b = reduced.get(key)
            if b is None:
                b = reduced[key] = _reduced_block(U, tup[x], tup[y], tup[z], conv)
            slots += b
        core = tuple(slots)
        counts[core] = counts.get(core, 0) + 1
    return counts


def _counts_job(args):
    area, lam, conv = args
    return core_counts_for_uio(uio_from_area(area), lam, conv)


def build_core_table(
    lam: Sequence[int],
    n: int,
    uios: Sequence[UnitIntervalOrder] | None = None,
    conv: CoreConvention = DEFAULT_CONVENTION,
    workers: int = 1,
) -> CoreTypeTable:
    """Core-type table over ``uios`` (default: all UIOs of length ``n``).

    ``workers > 1`` spreads UIOs over a process pool; per-UIO tallies are
    merged in index order, so the result does not depend on scheduling.
    """
    lam = as_partition(lam)
    if not 2 <= len(lam) <= 4:
        raise UnsupportedArity(f"core tables need 2..4 parts, got {lam}")
    if uios is None:
        uios = generate_all_uios(n)
    table = CoreTypeTable(lam, n, len(uios), convention=conv)
    if sum(lam) > n:
        return table
    if workers > 1 and len(uios) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            jobs = [(U.area, lam, conv) for U in uios]
            results = pool.map(_counts_job, jobs, chunksize=max(1, len(jobs) // (8 * workers)))
            for idx, counts in enumerate(results):
                for core, c in counts.items():
                    table.add(core, idx, c)
        return table
    for idx, U in enumerate(uios):
        for core, c in core_counts_for_uio(U, lam, conv).items():
            table.add(core, idx, c)
    return table


def write_core_table(path: str | Path, table: CoreTypeTable) -> None:
    """One TSV record per core-type, sorted by slots:
    ``lambda  n  slots  counts`` with slots as comma-separated doubled
    integers and counts as space-separated ``uio_index:count``."""
    lam = format_partition(table.lam)
    c = table.convention
    lines = [
        f"# core-types lambda={lam} n={table.n} uios={table.num_uios} arity={table.arity}"
        f" source={c.source} guard={c.guard} origin={c.origin}\n"
    ]
    for core in sorted(table.entries):
        per = table.entries[core]
        counts = " ".join(f"{i}:{per[i]}" for i in sorted(per))
        lines.append(f"{lam}\t{table.n}\t{','.join(map(str, core))}\t{counts}\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


def read_core_table(path: str | Path) -> CoreTypeTable:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    header = dict(kv.split("=") for kv in text[0].lstrip("# ").split()[1:])
    conv = CoreConvention(
        header.get("source", SOURCE_ROTATED),
        header.get("guard", GUARD_NONEMPTY),
        int(header.get("origin", 1)),
    )
    table = CoreTypeTable(parse_partition(header["lambda"]), int(header["n"]), int(header["uios"]), convention=conv)
    for line in text[1:]:
        if not line.strip():
            continue
        _, _, slots, counts = line.split("\t")
        core = tuple(int(s) for s in slots.split(","))
        for pair in counts.split():
            i, c = pair.split(":")
            table.add(core, int(i), int(c))
    return table
