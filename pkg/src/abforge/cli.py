"""Command-line front end: check, compile, run, verify, export and fixture.

Exit codes: 0 success, 1 verification or validation failure, 2 usage
error, 3 step budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import fixtures
from .core import (AbelianProcessor, ProcessorError, ZilepError, ZilepFunction, check_abelian,
                   classify_recurrence, exponent, is_bounded)
from .gates import (DELAYER, PRESINK, GateError, adder, gate_processor, rotor_node, sandpile_node,
                    splitter, toppler)
from .network import (BudgetExceeded, NetworkError, Schedule, Simulator, check_halting,
                      default_budget, export_dot, export_json, from_dict)
from .verify import DEFAULT_FUZZ, VerifyConfig, verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_FAIL):
        super().__init__(message)
        self.code = code


def default_seed() -> int:
    raw = os.environ.get("ABFORGE_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"ABFORGE_SEED must be an integer, got {raw!r}", EXIT_USAGE)


# ---------------------------------------------------------------------------
# documents
# ---------------------------------------------------------------------------


def read_document(path: str):
    """Parse a JSON file into a processor, function or network (by its keys)."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise CliError(f"{path}: {e.strerror}", EXIT_USAGE)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CliError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    if not isinstance(doc, dict):
        raise CliError(f"{path}: expected a JSON object")
    try:
        if "edges" in doc:
            return "network", from_dict(doc)
        if "table" in doc:
            return "function", ZilepFunction.from_dict(doc)
        if "transitions" in doc:
            return "processor", AbelianProcessor.from_dict(doc)
    except (NetworkError, ZilepError, ProcessorError, GateError, TypeError, ValueError) as e:
        raise CliError(f"{path}: {e}")
    raise CliError(f"{path}: not a processor, function or network document")


def _expect(path: str, kind: str):
    got, obj = read_document(path)
    if got != kind:
        raise CliError(f"{path}: expected a {kind} document, found a {got}", EXIT_USAGE)
    return obj


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _emit(args, payload: dict, text: str):
    print(json.dumps(payload, sort_keys=True) if args.json else text)


def _vector(text: str, what: str) -> tuple:
    try:
        vals = tuple(int(v) for v in text.split(",") if v.strip() != "")
    except ValueError:
        raise CliError(f"{what} must be comma-separated integers, got {text!r}", EXIT_USAGE)
    if any(v < 0 for v in vals):
        raise CliError(f"{what} must be nonnegative", EXIT_USAGE)
    return vals


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    kind, obj = read_document(args.path)
    if kind == "processor":
        cx = check_abelian(obj)
        if cx is not None:
            _emit(args, {"kind": kind, "abelian": False, "counterexample": cx._asdict()},
                  f"not abelian: letters {cx.i},{cx.j} from state {cx.state} "
                  f"break the {cx.identity} identity")
            return EXIT_FAIL
        try:
            rec = classify_recurrence(obj)
        except ProcessorError as e:
            _emit(args, {"kind": kind, "abelian": True, "error": str(e)}, f"invalid: {e}")
            return EXIT_FAIL
        exp = exponent(obj)
        label = "recurrent" if rec.recurrent else "transient"
        _emit(args, {"kind": kind, "abelian": True, "recurrent": rec.recurrent, "exponent": exp,
                     "states": obj.n_states, "k": obj.k, "l": obj.l},
              f"{label}, exponent {exp}")
        return EXIT_OK
    if kind == "function":
        cls = "ZILP" if obj.is_zilp else "ZILEP"
        bounded = all(is_bounded(obj.component(j)).bounded for j in range(obj.l))
        text = f"{cls}, k={obj.k}"
        if obj.l > 1:
            text += f", l={obj.l}"
        if not obj.is_zilp:
            text += f", margins {','.join(map(str, obj.margins))}"
        if bounded:
            text += ", bounded"
        _emit(args, {"kind": kind, "class": cls, "k": obj.k, "l": obj.l, "bounded": bounded,
                     "periods": list(obj.periods), "margins": list(obj.margins)}, text)
        return EXIT_OK
    verdict = check_halting(obj)
    _emit(args, {"kind": kind, "nodes": len(obj.nodes), "edges": len(obj.edges),
                 "halting": verdict.verdict, "spectral_bound": verdict.spectral_bound},
          f"network, {len(obj.nodes)} nodes, {len(obj.edges)} edges, halting: {verdict}")
    return EXIT_OK


def cmd_compile(args) -> int:
    from .synth import ModeError, Options, SynthesisError, compile_function, report
    from .synth.rewrite import rewrite_feedback, rewrite_unprime

    f = _expect(args.path, "function")
    opts = Options(max_width=args.max_width)
    try:
        net, rep = compile_function(f, args.mode, opts)
    except ModeError as e:
        raise CliError(f"cannot compile in {args.mode} mode: {e}", EXIT_USAGE)
    except SynthesisError as e:
        raise CliError(f"synthesis failed: {e}")
    passes = dict(rep.passes)
    for rw in args.rewrite or []:
        net = rewrite_unprime(net) if rw == "unprime" else rewrite_feedback(net)
        passes[f"rewrite_{rw}"] = 1
    rep = report(net, passes)
    _write(args.output, export_json(net))
    halting = check_halting(net)
    payload = rep.to_dict()
    payload["halting"] = halting.verdict
    text = rep.summary() + f"\nhalting: {halting}"
    if args.output not in (None, "-"):
        _emit(args, payload, text)
    else:
        print(json.dumps(payload, sort_keys=True) if args.json else text, file=sys.stderr)
    return EXIT_OK


def cmd_run(args) -> int:
    net = _expect(args.path, "network")
    x = _vector(args.input, "--input") if args.input else (0,) * len(net.inputs)
    if len(x) != len(net.inputs):
        raise CliError(f"network has {len(net.inputs)} inputs, got {len(x)} counts", EXIT_USAGE)
    seed = default_seed() if args.seed is None else args.seed
    schedule = Schedule(args.schedule, seed)
    sim = Simulator(net, trace=args.trace)
    sim.feed(x)
    budget = args.budget if args.budget is not None else default_budget(net, sum(x))
    try:
        sim.settle(schedule, budget)
    except BudgetExceeded as e:
        pending = sum(c for c, edge in zip(e.state.counts, net.edges) if edge.dst is not None)
        _emit(args, {"halted": False, "budget": budget, "steps": e.state.steps,
                     "pending": pending},
              f"budget of {budget} steps exceeded with {pending} letters pending")
        return EXIT_BUDGET
    res = sim.result()
    payload = {"halted": True, "output": list(res.output), "trash": list(res.trash),
               "states": list(res.states), "steps": res.steps, "schedule": args.schedule,
               "seed": seed}
    lines = [f"output: {','.join(map(str, res.output))}",
             f"trash: {','.join(map(str, res.trash)) or '-'}",
             f"states: {','.join(map(str, res.states)) or '-'}",
             f"steps: {res.steps}"]
    if args.trace:
        # the kernel records array positions; report edge and node ids
        steps = [(net.edges[e].id, net.nodes[v].id, q) for e, v, q in sim.trace]
        payload["trace"] = [list(t) for t in steps]
        lines += [f"  edge {e} -> node {v} (state {q})" for e, v, q in steps]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_verify(args) -> int:
    f = _expect(args.function, "function")
    net = _expect(args.network, "network")
    seed = default_seed() if args.seed is None else args.seed
    bounds = _vector(args.bounds, "--bounds") if args.bounds else None
    try:
        config = VerifyConfig(bounds, args.fuzz, seed, args.budget_factor,
                              "json" if args.json else "text")
        rep = verify(f, net, config)
    except ValueError as e:
        raise CliError(str(e), EXIT_USAGE)
    text = rep.to_json() if args.json else rep.text()
    if args.report:
        _write(args.report, text)
    print(text)
    if rep.passed:
        return EXIT_OK
    if rep.budget_exceeded and not (rep.mismatch or rep.order_dependence or rep.monotonicity):
        return EXIT_BUDGET
    return EXIT_FAIL


def cmd_export(args) -> int:
    net = _expect(args.path, "network")
    text = export_dot(net) if args.format == "dot" else export_json(net)
    _write(args.output, text)
    return EXIT_OK


FUNCTION_FIXTURES = {
    "fig5": fixtures.fig5,
    "fig6": fixtures.fig6,
    "fig6-margins": fixtures.fig6_with_margins,
    "delayer-fn": fixtures.delayer_function,
    "presink-fn": fixtures.presink_function,
}


def _fixture(name: str):
    """A named fixture as (kind, object); gates accept parameters after colons."""
    if name in FUNCTION_FIXTURES:
        return "function", FUNCTION_FIXTURES[name]()
    head, *params = name.split(":")
    try:
        nums = [int(p) for p in params]
    except ValueError:
        raise CliError(f"fixture parameters must be integers: {name!r}", EXIT_USAGE)
    try:
        if head == "toppler" and len(nums) in (1, 2):
            return "processor", gate_processor(toppler(*nums))
        if head in ("adder", "splitter") and len(nums) <= 1:
            return "processor", gate_processor((adder if head == "adder" else splitter)(*nums))
        if head in ("delayer", "presink") and not nums:
            return "processor", gate_processor(DELAYER if head == "delayer" else PRESINK)
        if head == "floor" and len(nums) in (1, 2):
            return "function", fixtures.floor_function(*nums)
        if head == "rotor" and len(nums) == 1:
            return "network", rotor_node(nums[0])
        if head == "sandpile" and len(nums) in (1, 2):
            return "network", sandpile_node(*nums)
    except GateError as e:
        raise CliError(str(e), EXIT_USAGE)
    raise CliError(f"unknown fixture {name!r}; try: {', '.join(FIXTURE_HELP)}", EXIT_USAGE)


FIXTURE_HELP = list(FUNCTION_FIXTURES) + ["floor:L[:Q]", "toppler:L[:Q]", "adder[:N]",
                                          "splitter[:N]", "delayer", "presink", "rotor:D",
                                          "sandpile:D[:Q]"]


def cmd_fixture(args) -> int:
    kind, obj = _fixture(args.name)
    _write(args.output, export_json(obj) if kind == "network" else obj.to_json())
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="abforge",
                                description="Compile, run and verify abelian networks.")
    sub = p.add_subparsers(dest="command", required=True)

    def json_flag(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("check", help="validate a processor, function or network file")
    sp.add_argument("path")
    json_flag(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("compile", help="synthesize a gate network for a function file")
    sp.add_argument("path")
    sp.add_argument("--mode", choices=["auto", "recurrent", "bounded", "general"], default="auto")
    sp.add_argument("--rewrite", action="append", choices=["unprime", "feedback"],
                    help="apply a rewrite after synthesis (repeatable, applied in order)")
    sp.add_argument("--max-width", type=int, default=4,
                    help="largest interleave width accepted by the general compiler")
    sp.add_argument("-o", "--output", help="network JSON destination (default stdout)")
    json_flag(sp)
    sp.set_defaults(func=cmd_compile)

    sp = sub.add_parser("run", help="execute a network once")
    sp.add_argument("path")
    sp.add_argument("--input", help='letters per input edge, e.g. "3,1"')
    sp.add_argument("--schedule", choices=["lowest", "round-robin", "random"], default="lowest")
    sp.add_argument("--seed", type=int, help="seed for the random schedule (default $ABFORGE_SEED or 0)")
    sp.add_argument("--budget", type=int, help="step budget (default 1000 (1 + letters) nodes)")
    sp.add_argument("--trace", action="store_true", help="print every processing step")
    json_flag(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("verify", help="compare a network with a function")
    sp.add_argument("function")
    sp.add_argument("network")
    sp.add_argument("--bounds", help='largest coordinate per input, e.g. "13,15"')
    sp.add_argument("--fuzz", type=int, default=DEFAULT_FUZZ, help="random schedules to try")
    sp.add_argument("--seed", type=int, help="fuzzing seed (default $ABFORGE_SEED or 0)")
    sp.add_argument("--budget-factor", type=int, default=1, help="multiplier on the step budget")
    sp.add_argument("--report", help="also write the report to this file")
    json_flag(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("export", help="print a network as DOT or normalized JSON")
    sp.add_argument("path")
    sp.add_argument("--format", choices=["dot", "json"], default="dot")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("fixture", help="write a named example document",
                        description="Names: " + ", ".join(FIXTURE_HELP))
    sp.add_argument("name")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_fixture)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"abforge: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
