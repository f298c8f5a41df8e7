import numpy as np

from planarflow import FlowNetwork, Pseudoflow, build_from_rotation, gen_grid, gen_random_planar, solve
from planarflow.side_to_side import SideToSideInstance, side_to_side
from planarflow.generators import grid_graph
from planarflow.verify import (check_cut, check_flow, check_max, cut_capacity, flow_value,
                               invariant_probe, oracle_compare)


def path_net():
    g = build_from_rotation([[1], [0, 2], [1]])
    return FlowNetwork(g, np.array([5, 0, 5, 0]), (0,), (2,))


def test_valid_flow_passes():
    net = path_net()
    f = Pseudoflow(net.graph, [5, 5])
    assert check_flow(net, f) and check_max(net, f)
    assert flow_value(net, f) == 5
    assert check_cut(net, f, [0])


def test_conservation_failure_detected():
    net = path_net()
    rep = check_flow(net, Pseudoflow(net.graph, [5, 3]))
    assert not rep and "conservation" in rep.first and "vertex 1" in rep.first


def test_capacity_failure_detected():
    net = path_net()
    rep = check_flow(net, Pseudoflow(net.graph, [6, 6]))
    assert not rep and "capacity" in rep.first


def test_reverse_flow_over_zero_capacity_detected():
    net = path_net()
    assert not check_flow(net, Pseudoflow(net.graph, [-1, -1]))


def test_wrong_length_detected():
    net = path_net()
    assert not check_flow(net, Pseudoflow(build_from_rotation([[1], [0]]), [1]))


def test_non_maximum_detected():
    net = path_net()
    rep = check_max(net, Pseudoflow(net.graph, [2, 2]))
    assert not rep and "sink 2" in rep.first


def test_bad_cut_detected():
    net = path_net()
    f = Pseudoflow(net.graph, [5, 5])
    assert cut_capacity(net, [0, 2]) == 10
    assert not check_cut(net, f, [0, 2])
    assert not check_cut(net, Pseudoflow(net.graph, [3, 3]), [0])


def test_solver_output_certifies_on_grid():
    inst = gen_grid(10, (0, 20), 4, "random", 6, 6)
    res = solve(inst.problem)
    net = inst.network
    assert check_flow(net, res.flow) and check_max(net, res.flow)
    assert check_cut(net, res.flow, res.cut)


def test_oracle_compare():
    cmp = oracle_compare(gen_random_planar(80, 1, 5, 5))
    assert cmp.equal and cmp.solver_value == cmp.oracle_value and cmp.details == ""
    lazy = oracle_compare(gen_random_planar(80, 1, 5, 5), solver=lambda p: _Zero(p))
    assert not lazy.equal and "!=" in lazy.details


class _Zero:
    def __init__(self, p):
        self.value = 0


def _column_trace():
    g = grid_graph(5)
    cap = np.random.default_rng(1).integers(1, 10, g.num_darts)
    cycle = [i * 5 + 2 for i in range(5)]
    left = [i * 5 + j for i in range(5) for j in range(2)]
    inst = SideToSideInstance.from_cycle(g, cap, [0, 10], [4, 19], cycle, left)
    return side_to_side(inst, keep_trace=True).trace


def test_probe_accepts_real_trace():
    rep = invariant_probe(_column_trace())
    assert rep.ok and rep.failures == []


def test_probe_catches_injected_violation():
    trace = _column_trace()
    # wipe the flow after the second step: every augmenting path reappears
    trace.snapshots[1] = np.zeros_like(trace.snapshots[1])
    rep = invariant_probe(trace)
    assert not rep.ok
    assert any(msg.startswith("after p_2") for msg in rep.failures)


def test_probe_catches_path_to_pending_vertex():
    trace = _column_trace()
    trace.snapshots[0] = np.zeros_like(trace.snapshots[0])
    rep = invariant_probe(trace)
    assert any("S -> P'" in msg for msg in rep.failures)
