import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import triangle
from planarflow import check_separator, find_cycle_separator, separator_for_terminals, triangulate
from planarflow.generators import grid_graph, random_triangulation


def side_weights(sep, w):
    return (sum(w[v] for v in sep.strict_inside), sum(w[v] for v in sep.strict_outside))


def test_single_triangle():
    g = triangle()
    sep = find_cycle_separator(g, [Fraction(1, 3)] * 3)
    assert sep.size <= 3
    assert check_separator(g, sep) == []


def test_grid_uniform_weights():
    for k in (4, 7, 12, 20):
        tg, _ = triangulate(grid_graph(k))
        w = [Fraction(1, tg.n)] * tg.n
        sep = find_cycle_separator(tg, w)
        a, b = side_weights(sep, w)
        assert sep.size <= 4 * k
        assert a <= Fraction(2, 3) and b <= Fraction(2, 3)
        assert check_separator(tg, sep) == []


def test_concentrated_weight():
    tg, _ = triangulate(grid_graph(6))
    for v in (0, 14, 35):
        w = [0] * tg.n
        w[v] = 1
        sep = find_cycle_separator(tg, w)
        a, b = side_weights(sep, w)
        assert v in sep.cycle or (a <= Fraction(2, 3) and b <= Fraction(2, 3))
        assert a <= Fraction(2, 3) and b <= Fraction(2, 3)


def test_weights_must_sum_to_one():
    tg, _ = triangulate(grid_graph(3))
    with pytest.raises(ValueError):
        find_cycle_separator(tg, [0.5] * tg.n)


def test_weights_within_tolerance_accepted():
    tg, _ = triangulate(grid_graph(3))
    w = [1 / tg.n] * tg.n
    w[0] += 5e-10
    find_cycle_separator(tg, w)


def test_terminal_balance_on_20x20_grid():
    tg, _ = triangulate(grid_graph(20))
    rng = np.random.default_rng(7)
    pick = rng.choice(tg.n, 100, replace=False).tolist()
    S, T = pick[:50], pick[50:]
    sep = separator_for_terminals(tg, S, T)
    terms = set(S) | set(T)
    inside = len(terms & sep.inside)
    outside = len(terms & sep.outside)
    assert inside <= 67 + sep.size and outside <= 67 + sep.size
    assert len(terms & sep.strict_inside) <= 66 and len(terms & sep.strict_outside) <= 66


def test_two_corner_terminals():
    tg, _ = triangulate(grid_graph(5))
    sep = separator_for_terminals(tg, [0], [24])
    assert check_separator(tg, sep) == []


def test_terminals_need_both_sides():
    tg, _ = triangulate(grid_graph(3))
    with pytest.raises(ValueError):
        separator_for_terminals(tg, [], [1])


def test_witness_darts_join_consecutive_vertices():
    tg, _ = triangulate(grid_graph(9))
    sep = find_cycle_separator(tg, [Fraction(1, tg.n)] * tg.n)
    r = sep.size
    for j, d in enumerate(sep.witness_darts):
        assert tg.tail[d] == sep.cycle[j] and tg.tail[d ^ 1] == sep.cycle[(j + 1) % r]


def test_certificate_detects_bad_separator():
    tg, _ = triangulate(grid_graph(5))
    sep = find_cycle_separator(tg, [Fraction(1, tg.n)] * tg.n)
    from dataclasses import replace
    moved = next(iter(sep.strict_inside))
    broken = replace(sep, inside=sep.inside - {moved}, outside=sep.outside | {moved})
    assert check_separator(tg, broken) != []


@given(st.integers(3, 400), st.integers(0, 10 ** 6))
def test_random_triangulation_separators(n, seed):
    g = random_triangulation(n, np.random.default_rng(seed))
    rng = np.random.default_rng(seed + 1)
    raw = rng.integers(0, 5, size=n)
    if raw.sum() == 0:
        raw[0] = 1
    total = int(raw.sum())
    w = [Fraction(int(x), total) for x in raw]
    sep = find_cycle_separator(g, w)
    a, b = side_weights(sep, w)
    assert a <= Fraction(2, 3) and b <= Fraction(2, 3)
    assert sep.size <= 4 * math.sqrt(n)
    assert check_separator(g, sep) == []
