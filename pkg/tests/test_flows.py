import numpy as np
import pytest
from hypothesis import given, strategies as st

from _harness import algebra_trial, summation_trial
from conftest import triangle
from planarflow import (FlowError, Pseudoflow, build_from_rotation, cancel_cycles, decompose, excess,
                        excesses, gen_random_planar, recompose, residual, return_excess, sum_flows,
                        total_capacity)
from planarflow.flows import is_acyclic, respects
from planarflow.generators import grid_graph


def path3():
    # 0 - 1 - 2; dart 0 is 0->1, dart 2 is 1->2
    return build_from_rotation([[1], [0, 2], [1]])


def test_residual_examples():
    g = path3()
    cap = np.full(4, 5)
    zero = Pseudoflow(g)
    assert residual(cap, zero, 0) == 5
    full = Pseudoflow(g, [5, 0])
    assert residual(cap, full, 0) == 0
    f = Pseudoflow(g, [3, 0])
    assert residual(cap, f, 0) == 2
    assert residual(cap, f, 1) == 5 + 3


def test_excess_examples():
    g = path3()
    assert all(excess(Pseudoflow(g), v) == 0 for v in range(3))
    f = Pseudoflow(g, [1, 1])
    assert [excess(f, v) for v in range(3)] == [-1, 0, 1]
    assert excesses(f).tolist() == [-1, 0, 1]


def test_sum_flows_examples():
    g = path3()
    cap = np.full(4, 4)
    f = Pseudoflow(g, [2, 1])
    assert sum_flows(cap, f, Pseudoflow(g)) == f
    assert sum_flows(cap, f, -f) == Pseudoflow(g)
    a = Pseudoflow(g, [1, 0])
    b = Pseudoflow(g, [-1, 0])
    assert sum_flows(cap, a, b).values.tolist() == [0, 0]


def test_sum_flows_rejects_overdraft():
    g = path3()
    cap = np.full(4, 2)
    with pytest.raises(FlowError):
        sum_flows(cap, Pseudoflow(g, [2, 0]), Pseudoflow(g, [1, 0]))


def test_sum_preserves_excess_sum():
    g = grid_graph(3)
    rng = np.random.default_rng(1)
    cap = np.full(g.num_darts, 10)
    f = Pseudoflow(g, rng.integers(-3, 4, g.num_edges))
    h = Pseudoflow(g, rng.integers(-3, 4, g.num_edges))
    s = sum_flows(cap, f, h)
    assert np.array_equal(excesses(s), excesses(f) + excesses(h))


def test_total_capacity_examples():
    assert total_capacity(np.zeros(6, dtype=int)) == 0
    assert total_capacity(np.ones(triangle().num_darts, dtype=int)) == 6
    assert total_capacity(np.ones(grid_graph(3).num_darts, dtype=int)) == 24


def test_total_capacity_overflow_guard():
    with pytest.raises(OverflowError):
        total_capacity(np.array([2 ** 61, 2 ** 61], dtype=np.int64))


def test_decompose_zero_flow():
    assert len(decompose(Pseudoflow(grid_graph(3)))) == 0


def test_decompose_single_path():
    g = path3()
    dec = decompose(Pseudoflow(g, [1, 1]))
    assert dec.paths == [((0, 2), 1)] and dec.cycles == []


def test_decompose_cycle_plus_path():
    # triangle 0,1,2 carries a 2-cycle; pendant 3 hangs off 2 and receives 1 from 0
    g = build_from_rotation([[1, 2], [2, 0], [3, 0, 1], [2]])
    # edge ids: 0:(0,1) 1:(0,2) 2:(1,2) 3:(2,3)
    vals = np.zeros(g.num_edges, dtype=np.int64)
    vals[0] = 2 + 1   # 0 -> 1 carries the cycle and the path
    vals[2] = 2 + 1   # 1 -> 2
    vals[1] = -2      # 2 -> 0 closes the cycle
    vals[3] = 1       # 2 -> 3
    f = Pseudoflow(g, vals)
    dec = decompose(f)
    assert [a for _, a in dec.cycles] == [2]
    assert [a for _, a in dec.paths] == [1]
    assert recompose(g, dec) == f


def test_cancel_cycles_examples():
    g = triangle()
    # edges: 0:(0,1) 1:(0,2) 2:(1,2); circulation 0->1->2->0
    circ = Pseudoflow(g, [4, -4, 4])
    assert cancel_cycles(circ) == Pseudoflow(g)
    acyclic = Pseudoflow(g, [1, 2, 1])
    assert cancel_cycles(acyclic) == acyclic
    path = Pseudoflow(g, [1, 0, 1])
    assert cancel_cycles(path + circ) == path


def test_return_excess_examples():
    g = path3()
    f = Pseudoflow(g, [3, 3])
    assert return_excess(f, 2, 0) == f
    assert return_excess(f, 2, 3) == Pseudoflow(g)


def test_return_excess_two_feeders():
    # s1=0 and s2=2 both feed v=1
    g = path3()
    f = Pseudoflow(g, [2, -3])
    before = excesses(f)
    r = return_excess(f, 1, 4)
    after = excesses(r)
    assert after[1] == before[1] - 4
    gain = after - before
    assert gain[0] + gain[2] == 4
    assert 0 <= gain[0] <= 2 and 0 <= gain[2] <= 3
    # lowest dart id first: edge 0 (into v from 0) is emptied before edge 1
    assert gain.tolist() == [2, -4, 2]


def test_return_excess_errors():
    g = path3()
    f = Pseudoflow(g, [1, 1])
    with pytest.raises(FlowError):
        return_excess(f, 2, 2)
    tri = triangle()
    with pytest.raises(FlowError):
        return_excess(Pseudoflow(tri, [4, -4, 5]), 2, 1)


@given(st.integers(0, 10 ** 9))
def test_flow_algebra_properties(seed):
    assert algebra_trial(seed) == []


@given(st.integers(0, 10 ** 9))
def test_sum_flows_is_associative(seed):
    rng = np.random.default_rng(seed)
    g = gen_random_planar(int(rng.integers(3, 30)), seed, 1, 1).graph
    cap = np.full(g.num_darts, 100)
    f, f1, f2 = (Pseudoflow(g, rng.integers(-10, 11, g.num_edges)) for _ in range(3))
    left = sum_flows(cap, sum_flows(cap, f, f1), f2)
    right = sum_flows(cap, f, sum_flows(cap - f.darts(), f1, f2))
    assert left == right
    assert respects(cap, left)


@given(st.integers(0, 10 ** 9))
def test_no_residual_path_survives_summation(seed):
    assert summation_trial(seed) == []


@given(st.integers(0, 10 ** 9))
def test_cancel_cycles_yields_acyclic(seed):
    rng = np.random.default_rng(seed)
    g = gen_random_planar(int(rng.integers(3, 30)), seed, 1, 1).graph
    f = Pseudoflow(g, rng.integers(-4, 5, g.num_edges))
    assert is_acyclic(cancel_cycles(f))
