"""Eschers, correct sequences, Escher tuples and the concatenation calculus.

An Escher is stored as a plain tuple of vertex indices. Two Eschers that
differ only by rotation are different sequences and are counted separately.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import InvalidInsertionPoint, NoSplittingPoint, NotAnEscher, NotDisjoint
from .uio import Relation, UnitIntervalOrder

Escher = tuple[int, ...]


def support(seq: Sequence[int]) -> int:
    mask = 0
    for v in seq:
        mask |= 1 << v
    return mask


def _arrow(U: UnitIntervalOrder, x: int, y: int) -> bool:
    return bool(U.arrow_out[x] >> y & 1)


def is_escher(U: UnitIntervalOrder, seq: Sequence[int]) -> bool:
    k = len(seq)
    if k == 0 or len(set(seq)) != k:
        return False
    return all(_arrow(U, seq[i], seq[(i + 1) % k]) for i in range(k))


def as_escher(U: UnitIntervalOrder, seq: Sequence[int]) -> Escher:
    """Validate ``seq`` and return it as an Escher tuple."""
    seq = tuple(seq)
    if not all(0 <= v < U.n for v in seq) or not is_escher(U, seq):
        raise NotAnEscher(f"{list(seq)} is not an Escher in {U}")
    return seq


def rotate(seq: Sequence[int], steps: int = 1) -> tuple[int, ...]:
    """Cyclic shift: ``rotate([v0, v1, ..., vk-1]) == (v1, ..., vk-1, v0)``."""
    k = len(seq)
    s = steps % k
    return tuple(seq[s:]) + tuple(seq[:s])


def start_at(seq: Sequence[int], vertex: int) -> tuple[int, ...]:
    """The rotation of ``seq`` whose first entry is ``vertex``."""
    return rotate(seq, list(seq).index(vertex))


@lru_cache(maxsize=256)
def enumerate_eschers(U: UnitIntervalOrder, k: int) -> tuple[Escher, ...]:
    """Every length-``k`` Escher of ``U`` exactly once, in lexicographic order."""
    n = U.n
    if not 1 <= k <= n:
        return ()
    out_masks = U.arrow_out
    res: list[Escher] = []
    seq = [0] * k

    def extend(depth: int, used: int) -> None:
        last = seq[depth - 1]
        if depth == k:
            if out_masks[last] >> seq[0] & 1:
                res.append(tuple(seq))
            return
        cand = out_masks[last] & ~used
        while cand:
            low = cand & -cand
            y = low.bit_length() - 1
            seq[depth] = y
            extend(depth + 1, used | low)
            cand ^= low

    for s in range(n):
        seq[0] = s
        extend(1, 1 << s)
    return tuple(res)


@lru_cache(maxsize=256)
def escher_counts_by_support(U: UnitIntervalOrder, k: int) -> dict[int, int]:
    """Map support bitmask -> number of length-``k`` Eschers on exactly that support."""
    counts: dict[int, int] = {}
    for e in enumerate_eschers(U, k):
        m = support(e)
        counts[m] = counts.get(m, 0) + 1
    return counts


def count_escher_tuples(U: UnitIntervalOrder, shape: Sequence[int]) -> int:
    """Number of ordered, pairwise disjoint tuples with the given lengths."""
    ways = {0: 1}
    for k in shape:
        by_support = escher_counts_by_support(U, k)
        nxt: dict[int, int] = {}
        for used, w in ways.items():
            for m, c in by_support.items():
                if not m & used:
                    nxt[used | m] = nxt.get(used | m, 0) + w * c
        ways = nxt
        if not ways:
            return 0
    return sum(ways.values())


def iter_escher_tuples(U: UnitIntervalOrder, shape: Sequence[int]) -> Iterator[tuple[Escher, ...]]:
    """Yield every ordered tuple ``(e_1, ..., e_r)`` with ``len(e_i) == shape[i]`` and disjoint supports."""
    pools = [[(e, support(e)) for e in enumerate_eschers(U, k)] for k in shape]
    r = len(shape)
    chosen: list[Escher] = [()] * r

    def extend(i: int, used: int) -> Iterator[tuple[Escher, ...]]:
        if i == r:
            yield tuple(chosen)
            return
        for e, m in pools[i]:
            if not m & used:
                chosen[i] = e
                yield from extend(i + 1, used | m)

    if all(pools):
        yield from extend(0, 0)


def enumerate_escher_tuples(U: UnitIntervalOrder, shape: Sequence[int]) -> list[tuple[Escher, ...]]:
    return list(iter_escher_tuples(U, shape))


def is_correct_sequence(U: UnitIntervalOrder, seq: Sequence[int]) -> bool:
    """No step ``w_i > w_(i+1)``, and every later entry meets some earlier one."""
    k = len(seq)
    if len(set(seq)) != k:
        return False
    for i in range(k - 1):
        if U.rel[seq[i]][seq[i + 1]] == Relation.GREATER:
            return False
    for j in range(1, k):
        if not any(U.rel[seq[i]][seq[j]] == Relation.INTERSECT for i in range(j)):
            return False
    return True


def enumerate_correct_sequences(U: UnitIntervalOrder, k: int) -> list[tuple[int, ...]]:
    n = U.n
    if not 1 <= k <= n:
        return []
    meets = [0] * n
    for i in range(n):
        for j in range(n):
            if U.rel[i][j] == Relation.INTERSECT:
                meets[i] |= 1 << j
    res: list[tuple[int, ...]] = []
    seq = [0] * k

    def extend(depth: int, used: int, reach: int) -> None:
        if depth == k:
            res.append(tuple(seq))
            return
        cand = U.arrow_out[seq[depth - 1]] & reach & ~used
        while cand:
            low = cand & -cand
            y = low.bit_length() - 1
            seq[depth] = y
            extend(depth + 1, used | low, reach | meets[y])
            cand ^= low

    for s in range(n):
        seq[0] = s
        extend(1, 1 << s, meets[s])
    return res


def splitting_points(U: UnitIntervalOrder, v: Sequence[int], l: int) -> list[int]:
    """All ``m`` such that the cyclic window ``v[m+1 .. m+l]`` and its cyclic
    remainder ``v[m+l+1 .. m+k]`` are both Eschers (an empty remainder counts)."""
    k = len(v)
    if l < 1 or l > k:
        return []
    out = []
    for m in range(k):
        window = [v[(m + 1 + t) % k] for t in range(l)]
        rest = [v[(m + l + 1 + t) % k] for t in range(k - l)]
        if is_escher(U, window) and (not rest or is_escher(U, rest)):
            out.append(m)
    return out


def se_start(U: UnitIntervalOrder, v: Sequence[int], l: int) -> int | None:
    """First splitting point, or ``None`` when there is none."""
    k = len(v)
    if l < 1 or l > k:
        return None
    if l == k:
        return 0
    # Inlined form of splitting_points(...)[0]: with v an Escher, the window
    # and remainder only add the closing arrows checked here.
    out_masks = U.arrow_out
    for m in range(k):
        if out_masks[v[(m + l) % k]] >> v[(m + 1) % k] & 1 and out_masks[v[m]] >> v[(m + l + 1) % k] & 1:
            return m
    return None


def insertion_points(U: UnitIntervalOrder, u: Sequence[int], v: Sequence[int]) -> list[int]:
    """All ``i < lcm(k, l)`` with ``u_i -> v_(i+1)`` and ``v_i -> u_(i+1)``."""
    if support(u) & support(v):
        raise NotDisjoint("insertion points need disjoint Eschers")
    k, l = len(u), len(v)
    return [
        i
        for i in range(math.lcm(k, l))
        if _arrow(U, u[i % k], v[(i + 1) % l]) and _arrow(U, v[i % l], u[(i + 1) % k])
    ]


def first_insertion(U: UnitIntervalOrder, u: Sequence[int], v: Sequence[int]) -> int | None:
    k, l = len(u), len(v)
    out_masks = U.arrow_out
    for i in range(k * l // math.gcd(k, l)):
        if out_masks[u[i % k]] >> v[(i + 1) % l] & 1 and out_masks[v[i % l]] >> u[(i + 1) % k] & 1:
            return i
    return None


def concat_at(u: Sequence[int], v: Sequence[int], i: int) -> Escher:
    """``u +_i v`` without validating ``i``.

    The ``u`` block starts at a multiple of ``len(u)``, so only ``i mod k``
    matters on the ``u`` side while ``v`` is read from ``v_(i+1)`` onwards.
    """
    k, l = len(u), len(v)
    r = i % k
    return tuple(u[: r + 1]) + tuple(v[(i + 1 + t) % l] for t in range(l)) + tuple(u[r + 1 :])


def concat(U: UnitIntervalOrder, u: Sequence[int], v: Sequence[int], i: int) -> Escher:
    if i < 0 or i not in insertion_points(U, u, v):
        raise InvalidInsertionPoint(f"{i} is not an insertion point")
    return concat_at(u, v, i)


def phi(U: UnitIntervalOrder, w: Sequence[int], k: int) -> tuple[Escher, Escher]:
    """Split an ``(n+k)``-Escher into a rotated ``(n, k)`` pair at its first splitting point."""
    total = len(w)
    n = total - k
    L = se_start(U, w, k)
    if L is None or n < 1:
        raise NoSplittingPoint(f"{list(w)} has no valid {k}-subescher")
    v = [w[(L + 1 + t) % total] for t in range(k)]
    u = [w[(L + k + 1 + t) % total] for t in range(n)]
    u_rot = tuple(u[(i + n - L - 1) % n] for i in range(n))
    v_rot = tuple(v[(i + k - L - 1) % k] for i in range(k))
    return u_rot, v_rot


def psi(
    U: UnitIntervalOrder,
    u: Sequence[int],
    v: Sequence[int],
    n: int,
    k: int,
    dummy: Sequence[int],
) -> Escher:
    """Left inverse of :func:`phi`; pairs without insertion points map to ``dummy``."""
    fi = first_insertion(U, u, v)
    if fi is None:
        return tuple(dummy)
    w = concat_at(u, v, fi)
    if fi < n:
        return w
    return start_at(w, v[n % k])
