import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from escherpos.cores import (
    DEFAULT_CONVENTION,
    SINGLE_ESCHER_CONVENTION,
    CoreConvention,
    build_core_table,
    core_counts_for_uio,
    core_pair,
    core_pair_reduced,
    core_tuple,
    decode,
    layout,
    read_core_table,
    slot_count,
    write_core_table,
)
from escherpos.errors import NotDisjoint, UnsupportedArity
from escherpos.escher import concat, count_escher_tuples, insertion_points, iter_escher_tuples, splitting_points, start_at
from escherpos.uio import generate_all_uios, uio_from_area
from strategies import uios

FIG1 = uio_from_area((0, 0, 1, 1, 2, 3, 3, 4, 6, 7, 9))
FIG_U = (4, 2, 8, 6, 10, 9, 7)
FIG_V = (0, 5, 3, 1)
K3 = uio_from_area((0, 0, 0))
K4 = uio_from_area((0, 0, 0, 0))


def slow_block(U, u, v, conv):
    """Half-integer block rebuilt from the full point lists, no shortcuts."""
    ins = insertion_points(U, u, v)
    if not ins:
        return (-1, -1, -0.5)
    fi, k, l = ins[0], len(u), len(v)
    if conv.source == "first":
        src = u
    else:
        src = concat(U, u, v, fi)
        if conv.source == "rotated" and fi >= k:
            src = start_at(src, v[k % l])
    pts = splitting_points(U, src, l)
    o = conv.origin
    if pts and (conv.guard == "nonempty" or pts[0] > 0):
        return (pts[0] + o, pts[0] + o + l, fi + o + 0.5)
    return (-1, -1, fi + o + 1.5)


def slow_core(U, tup, conv):
    out = [0.0]
    r = len(tup)
    for i, j in itertools.combinations(range(r), 2):
        out += slow_block(U, tup[i], tup[j], conv)
    for i, j, k in itertools.combinations(range(r), 3):
        for x, y, z in ((i, j, k), (i, k, j), (j, k, i)):
            ins = insertion_points(U, tup[x], tup[y])
            if not ins:
                out += (-1, -1, -0.5)
            else:
                out += slow_block(U, concat(U, tup[x], tup[y], ins[0]), tup[z], conv)
    return out


def test_figure_pair_core():
    assert core_pair(FIG1, FIG_U, FIG_V) == (0, 2, 10, 3)
    assert decode(core_pair(FIG1, FIG_U, FIG_V)) == (0, 1, 5, 1.5)
    # measured on u itself, positions from 0
    assert decode(core_pair(FIG1, FIG_U, FIG_V, SINGLE_ESCHER_CONVENTION)) == (0, 1, 5, 0.5)


def test_pair_without_insertion_points():
    U = uio_from_area((0, 0, 2, 2))
    for conv in (DEFAULT_CONVENTION, SINGLE_ESCHER_CONVENTION):
        assert core_pair(U, (0, 1), (2, 3), conv) == (0, -2, -2, -1)


def test_reduced_block_without_insertion():
    U = uio_from_area((0, 0, 2, 2, 2))
    assert core_pair_reduced(U, (0, 1), (2, 3), (4,)) == (-2, -2, -1)


def test_complete_graph_pair():
    assert decode(core_pair(K4, (0, 1), (2, 3), SINGLE_ESCHER_CONVENTION)) == (0, 0, 2, 0.5)
    assert decode(core_pair(K4, (0, 1), (2, 3))) == (0, 1, 3, 1.5)


def test_reduced_block_small():
    assert decode(core_pair_reduced(K3, (0,), (1,), (2,), SINGLE_ESCHER_CONVENTION)) == (0, 1, 0.5)
    assert len(core_pair_reduced(K3, (0,), (1,), (2,))) == 3


def test_singletons_core_vector():
    core = core_tuple(K3, ((0,), (1,), (2,)), SINGLE_ESCHER_CONVENTION)
    assert core == (0,) + (0, 2, 1) * 6
    assert list(core) == [2 * x for x in slow_core(K3, ((0,), (1,), (2,)), SINGLE_ESCHER_CONVENTION)]


def test_errors():
    with pytest.raises(NotDisjoint):
        core_pair(K3, (0, 1), (1,))
    with pytest.raises(NotDisjoint):
        core_pair_reduced(K3, (0,), (1,), (0,))
    with pytest.raises(UnsupportedArity):
        core_tuple(uio_from_area((0,) * 5), [(i,) for i in range(5)])
    with pytest.raises(ValueError):
        CoreConvention(source="elsewhere")


def test_layout_sizes_and_names():
    assert [slot_count(r) for r in (2, 3, 4)] == [4, 19, 55]
    assert [len(layout(r)) for r in (2, 3, 4)] == [4, 19, 55]
    lay = layout(3)
    assert lay.names[:4] == ("zero", "SEStart(u1,u2)", "SEEnd(u1,u2)", "FirstIns(u1,u2)")
    assert lay.index("SEStart(u1u2,u3)") == 10
    assert lay.names[-1] == "FirstIns(u2u3,u1)"
    assert lay.first_ins(1, 2) == 9


CONVENTIONS = st.sampled_from(
    [DEFAULT_CONVENTION, SINGLE_ESCHER_CONVENTION, CoreConvention("concat", "nonempty", 1), CoreConvention("first", "literal", 0)]
)


@settings(max_examples=40, deadline=None)
@given(uios(min_n=3, max_n=6), st.sampled_from([(1, 1), (2, 1), (3, 2), (2, 2), (1, 1, 1), (2, 1, 1), (1, 1, 1, 1)]), CONVENTIONS)
def test_cores_match_slow_oracle(U, lam, conv):
    for tup in itertools.islice(iter_escher_tuples(U, lam), 40):
        core = core_tuple(U, tup, conv)
        assert list(core) == [2 * x for x in slow_core(U, tup, conv)]


@settings(max_examples=40, deadline=None)
@given(uios(min_n=3, max_n=6), st.sampled_from([(2, 1), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1)]))
def test_slot_parity_and_widths(U, lam):
    lay = layout(len(lam))
    for tup in itertools.islice(iter_escher_tuples(U, lam), 40):
        core = core_tuple(U, tup)
        assert len(core) == len(lay) and core[0] == 0
        for i, name in enumerate(lay.names[1:], start=1):
            if name.startswith("FirstIns"):
                assert core[i] % 2 == 1
            else:
                assert core[i] % 2 == 0 and core[i] >= -2
        for i, j in lay.pairs:
            s, e = core[lay.se_start(i, j)], core[lay.se_end(i, j)]
            if s != -2:
                assert e == s + 2 * len(tup[j])
            else:
                assert e == -2


@settings(max_examples=15, deadline=None)
@given(st.integers(3, 6), st.sampled_from([(1, 1), (2, 1), (2, 2), (3, 1), (1, 1, 1), (2, 1, 1)]))
def test_table_totals_are_tuple_counts(n, lam):
    all_uios = generate_all_uios(n)
    table = build_core_table(lam, n)
    assert table.totals() == [count_escher_tuples(U, lam) for U in all_uios]
    assert len(table) <= max(1, sum(table.totals()))
    for idx, U in enumerate(all_uios[:5]):
        for core, c in core_counts_for_uio(U, lam).items():
            assert table.entries[core][idx] == c


def test_table_small_example():
    for conv, core in ((DEFAULT_CONVENTION, (0, 2, 6, 3)), (SINGLE_ESCHER_CONVENTION, (0, 0, 4, 1))):
        table = build_core_table((2, 2), 4, [K4, uio_from_area((0, 1, 2, 3))], conv)
        assert table.entries == {core: {0: 24}}


def test_table_file_round_trip(tmp_path):
    table = build_core_table((2, 1, 1), 5)
    path = tmp_path / "cores.tsv"
    write_core_table(path, table)
    back = read_core_table(path)
    assert back.entries == table.entries
    assert (back.lam, back.n, back.num_uios, back.convention) == (table.lam, table.n, table.num_uios, table.convention)
    write_core_table(tmp_path / "again.tsv", back)
    assert (tmp_path / "again.tsv").read_bytes() == path.read_bytes()


def test_worker_pool_matches_serial():
    serial = build_core_table((2, 1), 5)
    pooled = build_core_table((2, 1), 5, workers=2)
    assert serial.entries == pooled.entries


def test_core_types_far_fewer_than_tuples():
    table = build_core_table((3, 2, 1), 6)
    assert 10 * len(table) < sum(table.totals())
