from hypothesis import given
from hypothesis import strategies as st

from irsim.intervals import contains, intersection, normalize, total_length, union


def test_union_merges_overlaps():
    assert union([(2, 3)], [(2.5, 4)]) == [(2, 4)]
    assert union([(0, 1)], [(1, 2)]) == [(0, 2)]
    assert union([], []) == []


def test_normalize_drops_empty():
    assert normalize([(3, 3), (5, 4), (0, 1)]) == [(0, 1)]


def test_intersection():
    assert intersection([(0, 2), (3, 5)], [(1, 4)]) == [(1, 2), (3, 4)]


def test_contains_half_open():
    tl = [(1.0, 2.0)]
    assert contains(tl, 1.0)
    assert contains(tl, 1.5)
    assert not contains(tl, 2.0)
    assert not contains(tl, 0.5)


intervals = st.lists(st.tuples(st.floats(0, 10), st.floats(0, 10)), max_size=8)


@given(intervals, intervals, st.floats(0, 10))
def test_union_pointwise(a, b, t):
    na, nb = normalize(a), normalize(b)
    assert contains(union(na, nb), t) == (contains(na, t) or contains(nb, t))
    assert contains(intersection(na, nb), t) == (contains(na, t) and contains(nb, t))


@given(intervals)
def test_normalized_is_sorted_disjoint(a):
    n = normalize(a)
    assert all(x[1] < y[0] for x, y in zip(n, n[1:]))
    assert total_length(n) <= sum(max(0, b - a) for a, b in a) + 1e-12
