"""Compare the compiled execution kernel with the pure-Python one.

Usage: python3 benchmarks/bench_engine.py [--repeat N]

Each case runs the same network on the same inputs under every schedule
policy with both kernels, checks that they agree, and reports the time.
"""
from __future__ import annotations

import argparse
import time

from abforge import kernel
from abforge.fixtures import fig5, fig6
from abforge.network import LOWEST, ROUND_ROBIN, Simulator, seeded
from abforge.pseudomin import pseudomin_zilep
from abforge.synth import synth_recurrent
from abforge.synth.rewrite import feedback_toppler


def cases():
    yield "fig5 x=2000", synth_recurrent(fig5()), [(2000,)]
    yield "fig6 grid 40x40", synth_recurrent(fig6()), [(a, b) for a in range(0, 40, 3) for b in range(0, 40, 3)]
    yield "pseudo-min n=3", synth_recurrent(pseudomin_zilep(3, (0, 0, 0))), [(50, 60, 70), (200, 10, 90)]
    yield "feedback 13-toppler x=5000", feedback_toppler(13), [(5000,)]


def timed(engine, net, inputs, schedule, repeat):
    best, outs = None, None
    for _ in range(repeat):
        sim = Simulator(net, engine=engine)
        t = time.perf_counter()
        outs = []
        for x in inputs:
            sim.reset()
            sim.feed(x)
            sim.settle(schedule)
            outs.append((sim.output(), tuple(sim.states)))
        dt = time.perf_counter() - t
        best = dt if best is None else min(best, dt)
    return best, outs


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if kernel.COMPILED is None:
        print("compiled kernel not built; run `python3 setup.py build_ext --inplace` first")
        return 1
    print(f"{'case':30} {'schedule':12} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for name, net, inputs in cases():
        for sched_name, sched in (("lowest", LOWEST), ("round-robin", ROUND_ROBIN), ("random", seeded(7))):
            tp, op = timed(kernel.PURE, net, inputs, sched, args.repeat)
            tc, oc = timed(kernel.COMPILED, net, inputs, sched, args.repeat)
            if op != oc:
                raise SystemExit(f"kernels disagree on {name} under {sched_name}")
            print(f"{name:30} {sched_name:12} {tp:10.4f} {tc:11.5f} {tp / max(tc, 1e-9):7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
