import math

import pytest
from hypothesis import given

from escherpos.errors import IndexOutOfRange, InvalidAreaSequence
from escherpos.uio import (
    Relation,
    arrow,
    area_sequences,
    generate_all_uios,
    incomparability_edges,
    read_uio_file,
    relation,
    uio_from_area,
    write_uio_file,
)
from strategies import area_sequences as area_st

FIG1 = (0, 0, 1, 1, 2, 3, 3, 4, 6, 7, 9)


def test_figure_uio_has_eleven_intervals():
    assert uio_from_area(FIG1).n == 11


def test_chain_is_valid():
    U = uio_from_area((0, 1, 2))
    assert all(U.rel[i][j] == Relation.LESS for i in range(3) for j in range(i + 1, 3))


@pytest.mark.parametrize("bad", [(0, 2), (1,), (0, 1, 0), (0, -1), (0, 1.0)])
def test_invalid_area_sequences(bad):
    with pytest.raises(InvalidAreaSequence):
        uio_from_area(bad)


def test_relations_in_figure_uio():
    U = uio_from_area(FIG1)
    assert relation(U, 2, 3) == Relation.INTERSECT
    assert relation(U, 5, 8) == Relation.LESS
    assert arrow(U, 5, 8) and arrow(U, 2, 3)
    assert not arrow(U, 8, 5)


def test_two_chain():
    U = uio_from_area((0, 1))
    assert relation(U, 0, 1) == Relation.LESS
    assert relation(U, 1, 0) == Relation.GREATER
    assert arrow(U, 0, 1) and not arrow(U, 1, 0)


def test_index_checks():
    U = uio_from_area((0, 0))
    with pytest.raises(IndexOutOfRange):
        relation(U, 0, 2)
    with pytest.raises(IndexOutOfRange):
        arrow(U, -1, 0)


def test_small_generation_order():
    assert [U.area for U in generate_all_uios(2)] == [(0, 0), (0, 1)]
    assert area_sequences(3) == [(0, 0, 0), (0, 0, 1), (0, 0, 2), (0, 1, 1), (0, 1, 2)]


@pytest.mark.parametrize("n", range(1, 11))
def test_catalan_counts(n):
    seqs = area_sequences(n)
    assert len(seqs) == math.comb(2 * n, n) // (n + 1)
    assert seqs == sorted(seqs)


@given(area_st(max_n=10))
def test_relation_table_invariants(area):
    U = uio_from_area(area)
    for i in range(U.n):
        assert U.rel[i][i] == Relation.INTERSECT
        assert arrow(U, i, i)
        for j in range(i + 1, U.n):
            assert U.rel[i][j] in (Relation.LESS, Relation.INTERSECT)
            assert (U.rel[i][j] == Relation.INTERSECT) == (i >= area[j])
            assert (U.rel[i][j] == Relation.LESS) == (U.rel[j][i] == Relation.GREATER)
            assert arrow(U, i, j)


@given(area_st(max_n=9))
def test_rebuild_is_identical(area):
    U = uio_from_area(area)
    V = uio_from_area(U.area)
    assert U.rel == V.rel and U.arrow_out == V.arrow_out and U == V


def test_complete_graph_edges():
    assert len(incomparability_edges(uio_from_area((0, 0, 0, 0)))) == 6
    assert incomparability_edges(uio_from_area((0, 1, 2))) == []


def test_uio_file_round_trip(tmp_path):
    uios = generate_all_uios(4)
    p = tmp_path / "u.txt"
    write_uio_file(p, uios)
    text = p.read_text()
    assert text.count("\n") == 14 and text.endswith("\n")
    assert text.splitlines()[0] == "0,0,0,0"
    assert read_uio_file(p) == uios
