"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from escherpos.uio import uio_from_area


@st.composite
def area_sequences(draw, min_n=1, max_n=7):
    n = draw(st.integers(min_n, max_n))
    area = [0]
    for i in range(1, n):
        area.append(draw(st.integers(area[-1], i)))
    return tuple(area)


def uios(min_n=1, max_n=7):
    return area_sequences(min_n, max_n).map(uio_from_area)
