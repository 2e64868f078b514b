"""Stanley coefficients from Escher-tuple counts, and coefficient datasets.

Two normalisations are exposed.

``stanley_coefficient`` is the true coefficient ``c_lam`` of ``e_lam``: the
sum of ``d_tau * #E_tau`` with the exact rational ``d_tau`` of the
monomial to power-sum expansion. For ``|lam| = n`` it agrees with the
coloring oracle.

``tuple_coefficient`` multiplies it by ``prod(m_i!)`` over the part
multiplicities of ``lam``. This is the count that the condition graphs
predict, because they count ordered tuples in which equal parts occupy
distinguishable role slots. Coefficient datasets store this form.

For ``|lam| < n`` both are sums of the same quantity over the induced
sub-orders on ``|lam|`` intervals, so they remain integers.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .errors import NonIntegralResult, TooLarge
from .escher import count_escher_tuples
from .symfunc import (
    Partition,
    as_partition,
    format_partition,
    monomial_to_powersum,
    multiplicity_factorial,
    parse_partition,
    partitions_of,
)
from .uio import UnitIntervalOrder, generate_all_uios

MAX_DATASET_N = 9


def _weighted_count(U: UnitIntervalOrder, lam: Partition) -> Fraction:
    if sum(lam) > U.n:
        return Fraction(0)
    expansion = monomial_to_powersum(lam)
    return sum(
        (c * count_escher_tuples(U, tau) for tau, c in expansion.coeffs.items()),
        Fraction(0),
    )


def stanley_coefficient(U: UnitIntervalOrder, lam: Sequence[int]) -> int:
    lam = as_partition(lam)
    if U.n > 12:
        raise TooLarge("Escher enumeration is limited to n <= 12")
    total = _weighted_count(U, lam)
    if total.denominator != 1:
        raise NonIntegralResult(f"c_{format_partition(lam)} of {U} came out as {total}")
    return int(total)


def tuple_coefficient(U: UnitIntervalOrder, lam: Sequence[int]) -> int:
    """``prod(m_i!) * c_lam``: the ordered-role count used by condition graphs."""
    lam = as_partition(lam)
    total = multiplicity_factorial(lam) * _weighted_count(U, lam)
    if total.denominator != 1:
        raise NonIntegralResult(f"tuple coefficient {total} is not an integer")
    return int(total)


def pair_coefficient(U: UnitIntervalOrder, kl: Sequence[int]) -> int:
    """``#E_(k,l) - #E_(k+l)`` with ordered disjoint pairs."""
    k, l = sorted(kl, reverse=True)
    return count_escher_tuples(U, (k, l)) - count_escher_tuples(U, (k + l,))


def triple_coefficient(U: UnitIntervalOrder, nkl: Sequence[int]) -> int:
    """Closed form for three distinct parts; repeated parts go through :func:`stanley_coefficient`."""
    a, b, c = sorted(nkl, reverse=True)
    if len({a, b, c}) != 3:
        raise ValueError("triple_coefficient needs three distinct parts")

    def E(*parts: int) -> int:
        return count_escher_tuples(U, tuple(sorted(parts, reverse=True)))

    return E(a, b, c) + 2 * E(a + b + c) - E(a + b, c) - E(a + c, b) - E(b + c, a)


def dataset_partitions(n: int, max_parts: int = 4, min_weight: int = 1) -> list[Partition]:
    """Every partition with ``min_weight <= |lam| <= n`` and at most ``max_parts`` parts."""
    out = []
    for m in range(min_weight, n + 1):
        out += [p for p in partitions_of(m) if len(p) <= max_parts]
    return out


def coefficient_vector(lam: Sequence[int], uios: Sequence[UnitIntervalOrder]) -> list[int]:
    lam = as_partition(lam)
    return [tuple_coefficient(U, lam) for U in uios]


def coefficient_dataset(
    n: int,
    partitions: Iterable[Sequence[int]] | None = None,
    uios: Sequence[UnitIntervalOrder] | None = None,
) -> dict[Partition, list[int]]:
    """Tuple coefficients for each partition, indexed by canonical UIO order."""
    if n > MAX_DATASET_N:
        raise TooLarge(f"datasets are limited to n <= {MAX_DATASET_N}")
    if uios is None:
        uios = generate_all_uios(n)
    parts = dataset_partitions(n) if partitions is None else [as_partition(p) for p in partitions]
    return {lam: coefficient_vector(lam, uios) for lam in parts}


def write_coefficient_dataset(path: str | Path, n: int, data: dict[Partition, list[int]]) -> None:
    """One tab-separated record per partition: ``n <TAB> lambda <TAB> c_0 c_1 ...``.

    ``lambda`` is comma-separated; the values follow canonical UIO order.
    Records are sorted by weight, then in descending lexicographic order.
    """
    keys = sorted(data, key=lambda p: (sum(p), tuple(-x for x in p)))
    lines = [f"{n}\t{format_partition(lam)}\t{' '.join(map(str, data[lam]))}\n" for lam in keys]
    Path(path).write_text("".join(lines), encoding="utf-8")


def read_coefficient_dataset(path: str | Path) -> tuple[int, dict[Partition, list[int]]]:
    n = None
    data: dict[Partition, list[int]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        n_text, lam_text, values = line.split("\t")
        n = int(n_text)
        data[parse_partition(lam_text)] = [int(x) for x in values.split()]
    if n is None:
        raise ValueError(f"{path} holds no records")
    return n, data
