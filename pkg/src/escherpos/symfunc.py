"""Partitions, the monomial to power-sum basis change, and a coloring oracle.

Partitions are plain tuples of positive integers in nonincreasing order.
Symmetric polynomials are handled through their coefficients on
partition-shaped monomials ``x_1^mu_1 ... x_r^mu_r``, which determine a
homogeneous symmetric polynomial completely. All arithmetic is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import TooLarge, WeightTooLarge
from .linalg import solve_exact
from .uio import Relation, UnitIntervalOrder

Partition = tuple[int, ...]

MAX_POWERSUM_WEIGHT = 12
MAX_ORACLE_N = 8


def as_partition(parts: Iterable[int]) -> Partition:
    """Validate and sort parts into a partition."""
    parts = tuple(sorted((int(p) for p in parts), reverse=True))
    if not parts or parts[-1] < 1:
        raise ValueError(f"not a partition: {parts}")
    return parts


def parse_partition(text: str) -> Partition:
    return as_partition(int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip())


def format_partition(lam: Sequence[int]) -> str:
    return ",".join(map(str, lam))


@lru_cache(maxsize=None)
def partitions_of(n: int) -> tuple[Partition, ...]:
    """All partitions of ``n`` in descending lexicographic order."""
    if n < 1:
        raise ValueError("n must be positive")

    def gen(rest: int, cap: int):
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, cap), 0, -1):
            for tail in gen(rest - first, first):
                yield (first,) + tail

    return tuple(gen(n, n))


def multiplicity_factorial(lam: Sequence[int]) -> int:
    """Product of ``m_i!`` over the multiplicities of the parts of ``lam``."""
    out = 1
    for _, grp in itertools.groupby(sorted(lam)):
        out *= math.factorial(len(list(grp)))
    return out


@lru_cache(maxsize=None)
def _powersum_monomial_coeff(tau: Partition, mu: Partition) -> int:
    """Coefficient of ``x^mu`` in ``p_tau``.

    Counts the assignments of the parts of ``tau`` to variables so that
    variable ``i`` receives total degree ``mu[i]``.
    """

    @lru_cache(maxsize=None)
    def count(j: int, rest: tuple[int, ...]) -> int:
        if j == len(tau):
            return int(not any(rest))
        total = 0
        for i, r in enumerate(rest):
            if r >= tau[j]:
                total += count(j + 1, rest[:i] + (r - tau[j],) + rest[i + 1 :])
        return total

    return count(0, mu)


@lru_cache(maxsize=None)
def _elementary_monomial_coeff(lam: Partition, mu: Partition) -> int:
    """Coefficient of ``x^mu`` in ``e_lam``: 0/1 matrices with row sums lam, column sums mu."""

    @lru_cache(maxsize=None)
    def count(j: int, rest: tuple[int, ...]) -> int:
        if j == len(lam):
            return int(not any(rest))
        live = [i for i, r in enumerate(rest) if r > 0]
        total = 0
        for cols in itertools.combinations(live, lam[j]):
            nxt = list(rest)
            for c in cols:
                nxt[c] -= 1
            total += count(j + 1, tuple(nxt))
        return total

    return count(0, mu)


@dataclass(frozen=True)
class PowerSumExpansion:
    """``m_target = sum(coeffs[tau] * p_tau)`` with exact rational coefficients."""

    target: Partition
    coeffs: dict[Partition, Fraction]

    def nonzero(self) -> dict[Partition, Fraction]:
        return {t: c for t, c in self.coeffs.items() if c != 0}


@lru_cache(maxsize=None)
def _monomial_to_powersum(lam: Partition) -> tuple[tuple[Partition, Fraction], ...]:
    basis = partitions_of(sum(lam))
    A = [[_powersum_monomial_coeff(tau, mu) for tau in basis] for mu in basis]
    rhs = [int(mu == lam) for mu in basis]
    sol = solve_exact(A, rhs)
    return tuple((tau, c) for tau, c in zip(basis, sol) if c != 0)


def monomial_to_powersum(lam: Sequence[int]) -> PowerSumExpansion:
    """Expand ``m_lam`` in the power-sum basis by an exact linear solve."""
    lam = as_partition(lam)
    if sum(lam) > MAX_POWERSUM_WEIGHT:
        raise WeightTooLarge(f"|lambda|={sum(lam)} exceeds {MAX_POWERSUM_WEIGHT}")
    return PowerSumExpansion(lam, dict(_monomial_to_powersum(lam)))


@lru_cache(maxsize=None)
def _elementary_transition(n: int) -> tuple[tuple[int, ...], ...]:
    basis = partitions_of(n)
    return tuple(tuple(_elementary_monomial_coeff(lam, mu) for lam in basis) for mu in basis)


def evaluate_monomial(lam: Sequence[int], x: Sequence[int | Fraction]) -> int | Fraction:
    """Evaluate ``m_lam`` at the point ``x`` by summing over distinct exponent vectors."""
    k = len(x)
    if len(lam) > k:
        return 0
    exps = tuple(lam) + (0,) * (k - len(lam))
    total = 0
    for e in set(itertools.permutations(exps)):
        term = 1
        for xi, ei in zip(x, e):
            term *= xi**ei
        total += term
    return total


def evaluate_powersum(tau: Sequence[int], x: Sequence[int | Fraction]) -> int | Fraction:
    out = 1
    for t in tau:
        out *= sum(xi**t for xi in x)
    return out


def _independent_sets_by_size(U: UnitIntervalOrder) -> list[list[int]]:
    n = U.n
    adj = [0] * n
    for i in range(n):
        for j in range(n):
            if i != j and U.rel[i][j] == Relation.INTERSECT:
                adj[i] |= 1 << j
    by_size: list[list[int]] = [[] for _ in range(n + 1)]
    for mask in range(1 << n):
        ok = True
        m = mask
        while m:
            low = m & -m
            v = low.bit_length() - 1
            if adj[v] & mask:
                ok = False
                break
            m ^= low
        if ok:
            by_size[bin(mask).count("1")].append(mask)
    return by_size


def chromatic_monomial_coefficients(U: UnitIntervalOrder) -> dict[Partition, int]:
    """Coefficients of ``X_inc(U)`` on the monomial basis.

    The coefficient of ``m_mu`` is the number of proper colorings whose
    color ``i`` is used ``mu[i]`` times, i.e. the number of ordered
    sequences of disjoint independent sets of sizes ``mu`` covering all
    vertices.
    """
    n = U.n
    if n > MAX_ORACLE_N:
        raise TooLarge(f"coloring oracle is limited to n <= {MAX_ORACLE_N}")
    by_size = _independent_sets_by_size(U)
    full = (1 << n) - 1
    out: dict[Partition, int] = {}
    for mu in partitions_of(n):
        ways = {0: 1}
        for part in mu:
            nxt: dict[int, int] = {}
            for used, w in ways.items():
                for s in by_size[part]:
                    if not s & used:
                        nxt[used | s] = nxt.get(used | s, 0) + w
            ways = nxt
        out[mu] = ways.get(full, 0)
    return out


def chromatic_e_coefficients(U: UnitIntervalOrder) -> dict[Partition, int]:
    """Brute-force oracle: ``X_inc(U) = sum c_lam e_lam`` for every ``lam`` of ``n``."""
    mono = chromatic_monomial_coefficients(U)
    basis = partitions_of(U.n)
    A = _elementary_transition(U.n)
    sol = solve_exact(A, [mono[mu] for mu in basis])
    out = {}
    for lam, c in zip(basis, sol):
        if c.denominator != 1:
            raise ArithmeticError(f"non-integral e-coefficient {c} for {lam}")
        out[lam] = int(c)
    return out


def count_proper_colorings(U: UnitIntervalOrder, colors: int) -> int:
    """Number of proper colorings with ``colors`` colors, by literal enumeration."""
    edges = [(i, j) for j in range(U.n) for i in range(j) if U.rel[i][j] == Relation.INTERSECT]
    return sum(
        all(c[i] != c[j] for i, j in edges) for c in itertools.product(range(colors), repeat=U.n)
    )


def evaluate_e_expansion_at_ones(coeffs: dict[Partition, int], nvars: int) -> int:
    """Evaluate ``sum c_lam e_lam`` at ``x_1 = ... = x_nvars = 1``."""
    total = 0
    for lam, c in coeffs.items():
        term = c
        for part in lam:
            term *= math.comb(nvars, part)
        total += term
    return total
