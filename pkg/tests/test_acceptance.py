"""Acceptance run: one PASS/FAIL line per criterion, all at exact tolerance."""

import math
import statistics
import time
from fractions import Fraction

import numpy as np
import pytest

from _harness import (algebra_trial, grid_cases, hassin_trial, invariant_trial, staging_trial,
                      summation_trial, random_instance, solve_certified)
from planarflow import check_separator, find_cycle_separator, gen_grid, oracle_maxflow, solve, triangulate
from planarflow.generators import grid_graph, random_triangulation
from planarflow.solver import SolverConfig

N_RANDOM = 500
N_INVARIANT = 100
N_SUMMATION = 1000
N_STAGING = 200
N_HASSIN = 1000
N_ALGEBRA = 1000


def report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title} ({detail})")


@pytest.fixture(scope="module")
def harness():
    """Solve the random and grid corpora once; later criteria read the records."""
    runs = []
    t0 = time.perf_counter()
    for seed in range(N_RANDOM):
        inst = random_instance(seed)
        res, trace, bad = solve_certified(inst.problem)
        runs.append(("random", seed, inst, res, trace, bad, oracle_maxflow(inst.problem).value))
    random_seconds = time.perf_counter() - t0
    for k, inst in enumerate(grid_cases()):
        res, trace, bad = solve_certified(inst.problem)
        runs.append(("grid", k, inst, res, trace, bad, oracle_maxflow(inst.problem).value))
    # small base cases force deep recursion, which stresses the terminal bound
    deep = SolverConfig(k_single=1, k_pair=0.0)
    for seed in range(100):
        inst = random_instance(10_000 + seed, (30, 200), 10)
        res, trace, bad = solve_certified(inst.problem, deep)
        runs.append(("deep", seed, inst, res, trace, bad, oracle_maxflow(inst.problem).value))
    return runs, random_seconds


def test_criterion_01_random_oracle_equivalence(harness, capsys):
    runs, seconds = harness
    rows = [r for r in runs if r[0] == "random"]
    wrong = [r[1] for r in rows if r[3].value != r[6]]
    ok = len(rows) >= 500 and not wrong
    report(capsys, 1, "random planar instances match the oracle", ok,
           f"{len(rows) - len(wrong)}/{len(rows)} exact, {seconds:.1f}s")
    assert ok, f"mismatching seeds: {wrong[:10]}"


def test_criterion_02_grid_oracle_equivalence(harness, capsys):
    rows = [r for r in harness[0] if r[0] == "grid"]
    wrong = [r[1] for r in rows if r[3].value != r[6]]
    ok = len(rows) == 12 and not wrong
    report(capsys, 2, "grids k=4..32, three layouts, match the oracle", ok,
           f"{len(rows) - len(wrong)}/{len(rows)} exact")
    assert ok, f"mismatching grid cases: {wrong}"


def test_criterion_03_certificates(harness, capsys):
    rows = harness[0]
    bad = [(r[0], r[1], r[5]) for r in rows if r[5]]
    ok = not bad
    report(capsys, 3, "check_flow, check_max and cut capacity = value", ok,
           f"{len(rows) - len(bad)}/{len(rows)} certified")
    assert ok, bad[:5]


def test_criterion_04_invariant_replay(capsys):
    done, snapshots, bad = 0, 0, []
    seed = 0
    while done < N_INVARIANT:
        msgs, k = invariant_trial(seed)
        seed += 1
        if k == 0 and not msgs:
            continue
        done += 1
        snapshots += k
        bad.extend(msgs)
    ok = not bad
    report(capsys, 4, "reachability invariant after every cycle vertex", ok,
           f"{done} instances, {snapshots} steps replayed, {len(bad)} violations")
    assert ok, bad[:5]


def test_criterion_05_residual_unreachability_under_summation(capsys):
    bad = [m for seed in range(N_SUMMATION) for m in summation_trial(seed)]
    ok = not bad
    report(capsys, 5, "no residual A->B path after sum_flows", ok, f"{N_SUMMATION} trials, {len(bad)} violations")
    assert ok, bad[:5]


def test_criterion_06_staged_terminals(capsys):
    bad = [m for seed in range(N_STAGING) for m in staging_trial(seed)]
    ok = not bad
    report(capsys, 6, "two-phase flow over S' and S - S' (or T') is maximum", ok,
           f"{N_STAGING} trials, {len(bad)} mismatches")
    assert ok, bad[:5]


def separator_graphs():
    for k in (10, 32, 64, 100):
        yield f"grid {k}x{k}", triangulate(grid_graph(k))[0]
    for n, seed in ((100, 0), (1000, 1), (3000, 2), (10_000, 3)):
        yield f"triangulation n={n}", random_triangulation(n, np.random.default_rng(seed))


def test_criterion_07_separator_quality(capsys):
    bad, worst = [], 0.0
    count = 0
    for name, g in separator_graphs():
        rng = np.random.default_rng(g.n)
        raw = rng.integers(0, 4, g.n)
        raw[0] += 1
        for w in ([Fraction(1, g.n)] * g.n, [Fraction(int(x), int(raw.sum())) for x in raw]):
            sep = find_cycle_separator(g, w)
            count += 1
            a = sum(w[v] for v in sep.strict_inside)
            b = sum(w[v] for v in sep.strict_outside)
            worst = max(worst, sep.size / math.sqrt(g.n))
            if sep.size > 4 * math.sqrt(g.n):
                bad.append(f"{name}: |P| = {sep.size}")
            if a > Fraction(2, 3) or b > Fraction(2, 3):
                bad.append(f"{name}: side weights {float(a):.3f}, {float(b):.3f}")
            bad.extend(f"{name}: {m}" for m in check_separator(g, sep))
    ok = not bad
    report(capsys, 7, "|P| <= 4 sqrt(n), sides <= 2/3, certificate", ok,
           f"{count} separators up to n=10^4, max |P|/sqrt(n) = {worst:.2f}")
    assert ok, bad[:5]


def test_criterion_08_recursion_bound(harness, capsys):
    bad, calls, deepest = [], 0, 0
    for kind, seed, inst, res, trace, _, _ in harness[0]:
        terms = len(inst.sources) + len(inst.sinks)
        limit = math.ceil(math.log(terms, 1.5)) + 1 if terms > 1 else 1
        levels = trace.max_depth + 1
        deepest = max(deepest, trace.max_depth)
        if levels > limit:
            bad.append(f"{kind} {seed}: {levels} levels > {limit}")
        for lev in trace.levels:
            calls += 1
            if lev["parent"] is not None and 3 * (lev["sources"] + lev["sinks"]) > 2 * lev["parent"]:
                bad.append(f"{kind} {seed}: call with {lev['sources'] + lev['sinks']} of {lev['parent']}")
    ok = not bad
    report(capsys, 8, "each call has <= 2/3 of its parent's terminals", ok,
           f"{calls} calls, deepest level {deepest}")
    assert ok, bad[:5]


def test_criterion_09_hassin_cross_check(capsys):
    bad = [m for seed in range(N_HASSIN) for m in hassin_trial(seed)]
    ok = not bad
    report(capsys, 9, "same-face dual shortest paths match the oracle", ok,
           f"{N_HASSIN} trials, {len(bad)} mismatches")
    assert ok, bad[:5]


def test_criterion_10_flow_algebra(capsys):
    bad = [m for seed in range(N_ALGEBRA) for m in algebra_trial(seed)]
    ok = not bad
    report(capsys, 10, "decompose, cancel_cycles and return_excess", ok,
           f"{N_ALGEBRA} pseudoflows, {len(bad)} violations")
    assert ok, bad[:5]


def test_criterion_11_scaling(capsys):
    sizes, medians = [], []
    for k in (8, 16, 32, 64):
        inst = gen_grid(k, (0, 20), k, "random", 12, 12)
        times = []
        for _ in range(3):
            t0 = time.perf_counter()
            solve(inst.problem)
            times.append(time.perf_counter() - t0)
        sizes.append(k * k)
        medians.append(statistics.median(times))
    slope = float(np.polyfit(np.log(sizes), np.log(medians), 1)[0])
    ok = slope <= 3.0
    detail = ", ".join(f"n={n}: {t:.3f}s" for n, t in zip(sizes, medians))
    report(capsys, 11, "median grid solve time grows at most cubically", ok,
           f"log-log slope {slope:.2f}; {detail}")
    assert ok
