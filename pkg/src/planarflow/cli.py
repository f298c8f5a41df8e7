"""Command line: generate, solve, verify, separate, segment and benchmark."""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import engines, generators, io, verify
from .flows import Pseudoflow
from .planar import triangulate
from .separator import SeparatorError, find_cycle_separator, separator_for_terminals
from .side_to_side import SideToSideInstance, side_to_side
from .solver import SolverConfig, SolveTrace, extract_cut, solve


def _capacities(text: str):
    if text == "unit":
        return "unit"
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("capacity must be 'unit' or 'lo:hi'") from None
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError("need 0 <= lo <= hi")
    return (lo, hi)


def _emit_instance(inst, out):
    if out in (None, "-"):
        io.write_instance(inst, sys.stdout)
    else:
        io.write_instance(inst, out)


def cmd_gen_grid(a) -> int:
    inst = generators.gen_grid(a.k, a.capacity, a.seed, a.layout, a.sources, a.sinks)
    _emit_instance(inst, a.output)
    return 0


def cmd_gen_planar(a) -> int:
    inst = generators.gen_random_planar(a.n, a.seed, a.sources, a.sinks, a.capacity, a.delete)
    _emit_instance(inst, a.output)
    return 0


def _config(a) -> SolverConfig:
    return SolverConfig(k_single=a.k_single, k_pair=a.k_pair, debug=a.debug, parallel=a.parallel)


def _side_to_side_instance(inst, a):
    g = inst.graph
    if a.separator:
        cycle, side = io.parse_cycle_file(Path(a.separator).read_text())
        s2s = SideToSideInstance.from_cycle(g, inst.capacity, inst.sources, inst.sinks, cycle, side)
        return s2s, g
    tg, new = triangulate(g)
    cap = np.concatenate([inst.capacity, np.zeros(2 * len(new), dtype=np.int64)])
    sep = separator_for_terminals(tg, inst.sources, inst.sinks)
    for inside in (True, False):
        s2s = SideToSideInstance.from_separator(tg, cap, inst.sources, inst.sinks, sep, inside)
        if not s2s.check():
            return s2s, tg
    raise ValueError("the computed separator does not put the sources and sinks on "
                     "opposite sides; pass --separator")


def cmd_solve(a) -> int:
    inst = io.read_instance(a.instance)
    problem = inst.problem
    trace = SolveTrace()
    t0 = time.perf_counter()
    if a.mode == "side-to-side":
        s2s, g = _side_to_side_instance(inst, a)
        problems = s2s.check()
        if problems:
            print("error: " + "; ".join(problems), file=sys.stderr)
            return 2
        res = side_to_side(s2s, debug=a.debug)
        flow = Pseudoflow(inst.graph, res.flow.values[:inst.graph.num_edges])
        value = engines.flow_value(flow, inst.sinks)
    elif a.engine == "auto":
        res = solve(problem, _config(a), trace)
        flow, value = res.flow, res.value
    else:
        res = engines.ENGINES[a.engine](problem)
        flow, value = res.flow, res.value
    elapsed = time.perf_counter() - t0
    net = inst.network
    ok_flow = verify.check_flow(net, flow)
    ok_max = verify.check_max(net, flow)
    print(f"value {value}")
    print(f"time {elapsed:.4f}")
    print(f"check_flow {'pass' if ok_flow else 'FAIL ' + ok_flow.first}")
    print(f"check_max {'pass' if ok_max else 'FAIL ' + ok_max.first}")
    if ok_flow and ok_max:
        cut = extract_cut(net, flow)
        print(f"cut_darts {len(cut.darts)} cut_capacity {verify.cut_capacity(net, cut.darts)}")
    if a.trace and a.engine == "auto" and a.mode != "side-to-side":
        for lev in trace.levels:
            print("trace " + " ".join(f"{k}={_fmt(v)}" for k, v in lev.items()))
        print(f"trace max_depth={trace.max_depth} hassin={trace.log.hassin} "
              f"hassin_fallbacks={trace.log.fallback} "
              f"precondition_fallbacks={trace.precondition_fallbacks}")
    if a.output:
        io.write_flow(flow, value, a.output)
    return 0 if ok_flow and ok_max else 1


def _fmt(v):
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v) or "-"
    return str(v)


def cmd_verify(a) -> int:
    inst = io.read_instance(a.instance)
    flow, stated = io.read_flow(a.flow, inst.graph)
    net = inst.network
    rep_f = verify.check_flow(net, flow)
    rep_m = verify.check_max(net, flow)
    value = verify.flow_value(net, flow)
    ok = bool(rep_f) and bool(rep_m)
    print(f"value {value}")
    if stated is not None and stated != value:
        print(f"stated value {stated} does not match")
        ok = False
    for name, rep in (("check_flow", rep_f), ("check_max", rep_m)):
        print(f"{name} {'pass' if rep else 'FAIL ' + rep.first}")
    if a.oracle:
        ora = engines.oracle_maxflow(inst.problem).value
        print(f"oracle {ora}")
        ok = ok and ora == value
    print("OK" if ok else "FAILED")
    return 0 if ok else 1


def cmd_separate(a) -> int:
    inst = io.read_instance(a.instance)
    tg, new = triangulate(inst.graph)
    if a.uniform or not inst.sources or not inst.sinks:
        sep = find_cycle_separator(tg, [Fraction(1, tg.n)] * tg.n)
    else:
        sep = separator_for_terminals(tg, inst.sources, inst.sinks)
    print("cycle " + " ".join(str(v) for v in sep.cycle))
    print(f"size {sep.size}")
    print(f"inside_weight {float(sep.inside_weight):.6g}")
    print(f"outside_weight {float(sep.outside_weight):.6g}")
    print(f"size_over_sqrt_n {sep.size / math.sqrt(tg.n):.4f}")
    if new:
        print(f"added_edges {len(new)} added_vertices {tg.n - inst.graph.n}")
    return 0


def cmd_segment(a) -> int:
    from .segment import read_pgm, segment_image, write_pgm

    img = read_pgm(a.image)
    seg = segment_image(img, a.threshold, a.smoothness, a.sigma, a.data_weight)
    write_pgm(a.output, seg.mask)
    print(f"value {seg.value}")
    print(f"foreground {int(seg.mask.sum())} of {seg.mask.size}")
    return 0


def _bench_one(kind, size, seed, ns, nt):
    if kind == "grid":
        inst = generators.gen_grid(size, (0, 20), seed, "random", ns, nt)
    else:
        inst = generators.gen_random_planar(size, seed, ns, nt)
    trace = SolveTrace()
    t0 = time.perf_counter()
    res = solve(inst.problem, None, trace)
    dt = time.perf_counter() - t0
    seps = [lev["separator"] for lev in trace.levels if "separator" in lev]
    return {"n": inst.graph.n, "sources": ns, "sinks": nt, "seconds": f"{dt:.5f}",
            "depth": trace.max_depth, "separators": ";".join(map(str, seps)), "value": res.value}


def cmd_bench(a) -> int:
    sizes = [int(x) for x in a.sizes.split(",")]
    jobs = [(a.kind, s, a.seed + r, a.sources, a.sinks) for s in sizes for r in range(a.repeats)]
    if a.workers > 1:
        with ThreadPoolExecutor(max_workers=a.workers) as pool:
            rows = list(pool.map(lambda j: _bench_one(*j), jobs))
    else:
        rows = [_bench_one(*j) for j in jobs]
    out = open(a.output, "w", newline="") if a.output else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=list(rows[0].keys()) if rows else ["n"])
        w.writeheader()
        w.writerows(rows)
    finally:
        if a.output:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="planarflow",
                                description="Maximum flow in planar graphs with many sources and sinks.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("gen-grid", help="k x k grid instance")
    q.add_argument("k", type=int)
    q.add_argument("--capacity", type=_capacities, default="unit")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--layout", choices=["sides", "random", "face"], default="sides")
    q.add_argument("--sources", type=int)
    q.add_argument("--sinks", type=int)
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_gen_grid)

    q = sub.add_parser("gen-planar", help="random plane graph instance")
    q.add_argument("n", type=int)
    q.add_argument("--capacity", type=_capacities, default=(0, 20))
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--sources", type=int, default=2)
    q.add_argument("--sinks", type=int, default=2)
    q.add_argument("--delete", type=float, default=0.0, help="fraction of non-tree edges to drop")
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_gen_planar)

    q = sub.add_parser("solve", help="maximum flow of an instance")
    q.add_argument("instance")
    q.add_argument("-o", "--output", help="write the flow file here")
    q.add_argument("--engine", choices=["auto", "oracle", "hassin", "apex"], default="auto")
    q.add_argument("--mode", choices=["recursive", "side-to-side"], default="recursive")
    q.add_argument("--separator", help="cycle file for --mode side-to-side")
    q.add_argument("--trace", action="store_true")
    q.add_argument("--debug", action="store_true", help="check invariants while solving")
    q.add_argument("--parallel", action="store_true")
    q.add_argument("--k-single", type=int, default=2)
    q.add_argument("--k-pair", type=float, default=1.0)
    q.set_defaults(func=cmd_solve)

    q = sub.add_parser("verify", help="check a flow file against an instance")
    q.add_argument("instance")
    q.add_argument("flow")
    q.add_argument("--oracle", action="store_true", help="also compare with the oracle value")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("separate", help="print a cycle separator")
    q.add_argument("instance")
    q.add_argument("--uniform", action="store_true", help="weight all vertices equally")
    q.set_defaults(func=cmd_separate)

    q = sub.add_parser("segment", help="segment a PGM image by minimum cut")
    q.add_argument("image")
    q.add_argument("-o", "--output", required=True)
    q.add_argument("--threshold", type=float)
    q.add_argument("--smoothness", type=float, default=20.0)
    q.add_argument("--sigma", type=float, default=20.0)
    q.add_argument("--data-weight", type=float, default=1.0)
    q.set_defaults(func=cmd_segment)

    q = sub.add_parser("bench", help="time the solver, CSV on stdout")
    q.add_argument("--kind", choices=["grid", "planar"], default="grid")
    q.add_argument("--sizes", default="8,16,32")
    q.add_argument("--repeats", type=int, default=3)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--sources", type=int, default=6)
    q.add_argument("--sinks", type=int, default=6)
    q.add_argument("--workers", type=int, default=1)
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except io.FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, SeparatorError, engines.EngineError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
