"""Abelian networks: structure, construction, execution and analysis.

A network is a directed multigraph whose nodes are gates or arbitrary
processors.  Every edge has an identity; input edges have no source node,
output and trash edges have no target node.  An output edge may also lack a
source, in which case it carries the constant zero.

Execution stores per-edge letter counts (letters are indistinguishable) and
per-node states; the inner loop lives in :mod:`abforge.kernel`.
"""
from __future__ import annotations

import itertools
import json
import math
from array import array
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import networkx as nx

from . import _kernel_py, kernel
from .core import AbelianProcessor, ProcessorError
from .gates import GateError, GateSpec, adder, gate_processor, splitter, toppler, DELAYER, PRESINK


class NetworkError(ValueError):
    """Malformed network structure or document."""


class StateCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Node:
    id: int
    gate: GateSpec | None = None
    processor: AbelianProcessor | None = None

    def __post_init__(self):
        if (self.gate is None) == (self.processor is None):
            raise NetworkError(f"node {self.id}: give exactly one of gate or processor")
        object.__setattr__(self, "_proc",
                           gate_processor(self.gate) if self.gate is not None else self.processor)

    @property
    def proc(self) -> AbelianProcessor:
        return self._proc

    @property
    def kind(self) -> str:
        return self.gate.kind if self.gate is not None else "processor"

    @property
    def label(self) -> str:
        return self.gate.label if self.gate is not None else "Proc"


@dataclass(frozen=True)
class Edge:
    id: int
    src: int | None
    src_port: int
    dst: int | None
    dst_port: int


@dataclass(frozen=True, eq=False)
class Network:
    nodes: tuple
    edges: tuple
    inputs: tuple
    outputs: tuple
    trash: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: e.id)))
        node_pos = {}
        for p, v in enumerate(self.nodes):
            if v.id in node_pos:
                raise NetworkError(f"duplicate node id {v.id}")
            node_pos[v.id] = p
        edge_pos = {}
        for p, e in enumerate(self.edges):
            if e.id in edge_pos:
                raise NetworkError(f"duplicate edge id {e.id}")
            edge_pos[e.id] = p
        object.__setattr__(self, "_node_pos", node_pos)
        object.__setattr__(self, "_edge_pos", edge_pos)
        self._validate()

    def _validate(self):
        ins, outs, trash = set(self.inputs), set(self.outputs), set(self.trash)
        for name, ids in (("input", self.inputs), ("output", self.outputs), ("trash", self.trash)):
            for eid in ids:
                if eid not in self._edge_pos:
                    raise NetworkError(f"{name} edge {eid} does not exist")
            if len(set(ids)) != len(ids):
                raise NetworkError(f"repeated {name} edge")
        if ins & outs or ins & trash or outs & trash:
            raise NetworkError("input, output and trash edge sets must be disjoint")
        in_slots, out_slots = {}, {}
        for e in self.edges:
            if e.src is None:
                if e.id not in ins and e.dst is None and e.id not in outs:
                    raise NetworkError(f"edge {e.id} connects nothing")
            else:
                if e.id in ins:
                    raise NetworkError(f"input edge {e.id} must not have a source node")
                if e.src not in self._node_pos:
                    raise NetworkError(f"edge {e.id}: unknown source node {e.src}")
                key = (e.src, e.src_port)
                if key in out_slots:
                    raise NetworkError(f"edges {out_slots[key]} and {e.id} share output port {key}")
                out_slots[key] = e.id
            if e.dst is None:
                if e.id not in outs and e.id not in trash:
                    raise NetworkError(f"edge {e.id} has no target but is neither output nor trash")
            else:
                if e.id in outs or e.id in trash:
                    raise NetworkError(f"edge {e.id} is output/trash but has a target node")
                if e.dst not in self._node_pos:
                    raise NetworkError(f"edge {e.id}: unknown target node {e.dst}")
                key = (e.dst, e.dst_port)
                if key in in_slots:
                    raise NetworkError(f"edges {in_slots[key]} and {e.id} share input port {key}")
                in_slots[key] = e.id
        arity = {v.id: (v.proc.k, v.proc.l) for v in self.nodes}
        for (nid, port), eid in in_slots.items():
            if port >= arity[nid][0]:
                raise NetworkError(f"edge {eid}: node {nid} has no input port {port}")
        for (nid, port), eid in out_slots.items():
            if port >= arity[nid][1]:
                raise NetworkError(f"edge {eid}: node {nid} has no output port {port}")
        for v in self.nodes:
            k, l = arity[v.id]
            for i in range(k):
                if (v.id, i) not in in_slots:
                    raise NetworkError(f"node {v.id} input port {i} is not connected")
            for j in range(l):
                if (v.id, j) not in out_slots:
                    raise NetworkError(f"node {v.id} output port {j} is not connected")
        object.__setattr__(self, "_in_slots", in_slots)
        object.__setattr__(self, "_out_slots", out_slots)

    # structure -----------------------------------------------------------

    def node(self, nid: int) -> Node:
        return self.nodes[self._node_pos[nid]]

    def edge(self, eid: int) -> Edge:
        return self.edges[self._edge_pos[eid]]

    def out_edge(self, nid: int, port: int) -> Edge:
        return self.edge(self._out_slots[(nid, port)])

    def in_edge(self, nid: int, port: int) -> Edge:
        return self.edge(self._in_slots[(nid, port)])

    def graph(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(v.id for v in self.nodes)
        for e in self.edges:
            if e.src is not None and e.dst is not None:
                g.add_edge(e.src, e.dst, key=e.id)
        return g

    def predecessors(self, nid: int) -> list:
        """Source nodes of the edges entering ``nid``, one per connected input port."""
        preds = []
        for i in range(self.node(nid).proc.k):
            src = self.edge(self._in_slots[(nid, i)]).src
            if src is not None:
                preds.append(src)
        return preds

    def topological_order(self) -> list | None:
        """Node ids in dependency order, or None when the network has a cycle."""
        if "_topo" not in self.__dict__:
            indeg = {v.id: 0 for v in self.nodes}
            succ = {v.id: [] for v in self.nodes}
            for e in self.edges:
                if e.src is not None and e.dst is not None:
                    indeg[e.dst] += 1
                    succ[e.src].append(e.dst)
            queue = deque(v.id for v in self.nodes if indeg[v.id] == 0)
            order = []
            while queue:
                nid = queue.popleft()
                order.append(nid)
                for t in succ[nid]:
                    indeg[t] -= 1
                    if indeg[t] == 0:
                        queue.append(t)
            object.__setattr__(self, "_topo", order if len(order) == len(self.nodes) else None)
        return self._topo

    @property
    def is_acyclic(self) -> bool:
        return self.topological_order() is not None

    def gate_counts(self) -> dict:
        counts = {}
        for v in self.nodes:
            counts[v.kind] = counts.get(v.kind, 0) + 1
        return counts

    def structurally_equal(self, other: Network) -> bool:
        return export_json(self) == export_json(other)

    def with_states(self, states: Sequence[int]) -> Network:
        """Same wiring, started from the given per-node states.

        Topplers keep their gate form with a new prime; any other node that
        leaves its initial state becomes an explicit processor.
        """
        nodes = []
        for v, q in zip(self.nodes, states):
            if q == v.proc.initial:
                nodes.append(v)
            elif v.gate is not None and v.gate.kind == "toppler":
                nodes.append(Node(v.id, gate=toppler(v.gate.lam, q)))
            else:
                nodes.append(Node(v.id, processor=v.proc.with_initial(q)))
        return Network(tuple(nodes), self.edges, self.inputs, self.outputs, self.trash)

    # compiled arrays -----------------------------------------------------

    @property
    def compiled(self) -> dict:
        c = self.__dict__.get("_compiled")
        if c is None:
            c = _compile(self)
            object.__setattr__(self, "_compiled", c)
        return c


def _flat_tables(p: AbelianProcessor) -> tuple:
    trans = array("q")
    for t in p.transitions:
        trans.extend(t)
    outv = array("q")
    for o in p.outputs:
        for vec in o:
            outv.extend(vec)
    return trans, outv


def _compile(net: Network) -> dict:
    trans, trans_off, nstates = array("q"), array("q"), array("q")
    outv, out_off, nout = array("q"), array("q"), array("q")
    out_edge, out_edge_off, init = array("q"), array("q"), array("q")
    flat = {}  # gate processors are shared, so flatten each one once
    slots, pos = net._out_slots, net._edge_pos
    for v in net.nodes:
        p = v.proc
        tabs = flat.get(id(p))
        if tabs is None:
            tabs = flat[id(p)] = _flat_tables(p)
        trans_off.append(len(trans))
        nstates.append(p.n_states)
        trans.extend(tabs[0])
        out_off.append(len(outv))
        nout.append(p.l)
        outv.extend(tabs[1])
        out_edge_off.append(len(out_edge))
        for j in range(p.l):
            out_edge.append(pos[slots[(v.id, j)]])
        init.append(p.initial)
    edge_dst, edge_port = array("q"), array("q")
    for e in net.edges:
        edge_dst.append(net._node_pos[e.dst] if e.dst is not None else -1)
        edge_port.append(e.dst_port if e.dst is not None else 0)
    return {
        "arrays": (trans, trans_off, nstates, outv, out_off, nout, out_edge, out_edge_off,
                   edge_dst, edge_port),
        "init": init,
        "in_pos": [net._edge_pos[e] for e in net.inputs],
        "out_pos": [net._edge_pos[e] for e in net.outputs],
        "trash_pos": [net._edge_pos[e] for e in net.trash],
        "step_coeffs": _step_coeffs(net) if net.is_acyclic else None,
    }


def _step_coeffs(net: Network) -> list:
    """Per input letter, an upper bound on letters it can ever place on consuming edges.

    One pass with a letter on every input at once; by linearity of the
    bound the total dominates each input's own coefficient.
    """
    amp = {}
    load = {eid: 1 for eid in net.inputs}
    total = 0
    for nid in net.topological_order():
        p = net.node(nid).proc
        a = amp.get(id(p))
        if a is None:
            a = amp[id(p)] = [max(vec[j] for o in p.outputs for vec in o) for j in range(p.l)]
        x = sum(load.get(net._in_slots[(nid, i)], 0) for i in range(p.k))
        total += x
        for j in range(p.l):
            load[net._out_slots[(nid, j)]] = x * a[j]
    return [total] * len(net.inputs)


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

POLICIES = {"lowest": 0, "round-robin": 1, "random": 2}


@dataclass(frozen=True)
class Schedule:
    policy: str = "lowest"
    seed: int = 0

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"unknown schedule policy {self.policy!r}")


LOWEST = Schedule("lowest")
ROUND_ROBIN = Schedule("round-robin")


def seeded(seed: int) -> Schedule:
    return Schedule("random", seed)


@dataclass(frozen=True)
class ExecState:
    states: tuple
    counts: tuple
    steps: int


@dataclass(frozen=True)
class RunResult:
    output: tuple
    trash: tuple
    states: tuple
    steps: int


class BudgetExceeded(RuntimeError):
    def __init__(self, state: ExecState, budget: int):
        super().__init__(f"step budget {budget} exhausted with letters still in flight")
        self.state = state
        self.budget = budget


def default_budget(net: Network, letters: int) -> int:
    return 1000 * (1 + letters) * max(1, len(net.nodes))


class Simulator:
    """Mutable execution state over one network.

    Feeding more letters after a halt continues a legal execution, so a
    grid can be evaluated incrementally.
    """

    def __init__(self, net: Network, engine=None, trace: bool = False):
        self.net = net
        c = net.compiled
        self._arrays = c["arrays"]
        self._init = c["init"]
        self._in_pos, self._out_pos, self._trash_pos = c["in_pos"], c["out_pos"], c["trash_pos"]
        self._coeffs = c["step_coeffs"]
        self.trace = [] if trace else None
        if engine is None:
            engine = _kernel_py.execute if trace else kernel.execute
        self._engine = engine
        self.reset()

    def reset(self, states: Sequence[int] | None = None):
        self.states = array("q", self._init if states is None else states)
        self.counts = array("q", bytes(8 * len(self.net.edges)))
        self.steps = 0
        self.fed = [0] * len(self._in_pos)

    def feed(self, x: Sequence[int]):
        if len(x) != len(self._in_pos):
            raise ValueError(f"expected {len(self._in_pos)} input counts, got {len(x)}")
        for p, c, i in zip(self._in_pos, x, range(len(x))):
            if c < 0:
                raise ValueError("input counts must be nonnegative")
            self.counts[p] += c
            self.fed[i] += c

    def settle(self, schedule: Schedule = LOWEST, budget: int | None = None) -> int:
        if budget is None:
            budget = default_budget(self.net, sum(self.fed))
        kw = {} if self.trace is None else {"trace": self.trace}
        steps, halted = self._engine(*self._arrays, self.counts, self.states,
                                     POLICIES[schedule.policy], schedule.seed, budget, **kw)
        self.steps += steps
        if not halted:
            raise BudgetExceeded(self.exec_state(), budget)
        if self._coeffs is not None:
            bound = sum(a * b for a, b in zip(self._coeffs, self.fed))
            assert self.steps <= bound, f"acyclic network exceeded its step bound {bound}"
        return steps

    def exec_state(self) -> ExecState:
        return ExecState(tuple(self.states), tuple(self.counts), self.steps)

    def output(self) -> tuple:
        return tuple(self.counts[p] for p in self._out_pos)

    def trash(self) -> tuple:
        return tuple(self.counts[p] for p in self._trash_pos)

    def result(self) -> RunResult:
        return RunResult(self.output(), self.trash(), tuple(self.states), self.steps)


def run(net: Network, x: Sequence[int], schedule: Schedule = LOWEST, budget: int | None = None,
        trace: bool = False, engine=None) -> RunResult:
    """Feed ``x`` on the input edges and execute until halting."""
    if budget is not None and budget <= 0:
        raise ValueError("budget must be positive")
    sim = Simulator(net, engine=engine, trace=trace)
    sim.feed(x)
    sim.settle(schedule, budget)
    return sim.result()


def evaluate(net: Network, x: Sequence[int]) -> tuple:
    return run(net, x).output


def evaluate_grid(net: Network, shape: Sequence[int], schedule: Schedule = LOWEST) -> dict:
    """Outputs at every point of ``prod(range(s) for s in shape)``.

    Walks the last coordinate incrementally from each prefix.
    """
    sim = Simulator(net)
    out = {}
    k = len(shape)
    for prefix in itertools.product(*(range(s) for s in shape[:-1])):
        sim.reset()
        sim.feed(tuple(prefix) + (0,))
        sim.settle(schedule)
        out[tuple(prefix) + (0,)] = sim.output()
        unit = (0,) * (k - 1) + (1,)
        for z in range(1, shape[-1]):
            sim.feed(unit)
            sim.settle(schedule)
            out[tuple(prefix) + (z,)] = sim.output()
    return out


# ---------------------------------------------------------------------------
# halting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HaltingVerdict:
    verdict: str  # "acyclic" | "feedback_ok" | "unknown"
    spectral_bound: float | None = None

    def __str__(self):
        if self.verdict == "feedback_ok":
            return f"feedback_ok (spectral radius <= {self.spectral_bound:.4g})"
        return self.verdict


@lru_cache(maxsize=4096)
def _rates(p: AbelianProcessor) -> tuple:
    """rates[i][j]: largest long-run letters out on j per letter in on i, over start states."""
    rates = []
    for i in range(p.k):
        t, o = p.transitions[i], p.outputs[i]
        best = [Fraction(0)] * p.l
        for q in range(p.n_states):
            seen = {}
            s = q
            while s not in seen:
                seen[s] = len(seen)
                s = t[s]
            cyc = [x for x, pos in seen.items() if pos >= seen[s]]
            for j in range(p.l):
                best[j] = max(best[j], Fraction(sum(o[x][j] for x in cyc), len(cyc)))
        rates.append(tuple(best))
    return tuple(rates)


def check_halting(net: Network, iterations: int = 200) -> HaltingVerdict:
    """Certify halting: acyclic, or production-matrix iterates shrinking below 1."""
    if net.is_acyclic:
        return HaltingVerdict("acyclic")
    return production_verdict(net, iterations)


def production_verdict(net: Network, iterations: int = 200) -> HaltingVerdict:
    """The production-matrix certificate alone, whether or not the network has cycles."""
    consuming = [e for e in net.edges if e.dst is not None]
    succ = {}
    for e in consuming:
        p = net.node(e.dst).proc
        row = []
        for j, r in enumerate(_rates(p)[e.dst_port]):
            e2 = net.out_edge(e.dst, j)
            if r and e2.dst is not None:
                row.append((e2.id, r))
        succ[e.id] = row
    # v_t = A^t 1, so max(v_t) is the row-sum norm of A^t and bounds the spectral radius
    # by max(v_t) ** (1/t); exact arithmetic until the norm drops below 1
    v = {e.id: Fraction(1) for e in consuming}
    for t in range(1, iterations + 1):
        v = {eid: sum((r * v[e2] for e2, r in row), Fraction(0)) for eid, row in succ.items()}
        top = max(v.values(), default=Fraction(0))
        if top < 1:
            break
    else:
        return HaltingVerdict("unknown")
    if top == 0:
        return HaltingVerdict("feedback_ok", 0.0)
    # tighten the bound over the rest of the window in floating point, rescaling each step
    w = {eid: float(c / top) for eid, c in v.items()}
    log_norm = math.log(float(top))
    best = log_norm / t
    for s in range(t + 1, iterations + 1):
        w = {eid: sum(float(r) * w[e2] for e2, r in row) for eid, row in succ.items()}
        m = max(w.values())
        if m == 0:
            return HaltingVerdict("feedback_ok", 0.0)
        log_norm += math.log(m)
        w = {eid: c / m for eid, c in w.items()}
        best = min(best, log_norm / s)
    return HaltingVerdict("feedback_ok", math.exp(best))


# ---------------------------------------------------------------------------
# collapse into one processor
# ---------------------------------------------------------------------------


def network_to_processor(net: Network, state_cap: int = 100_000, budget: int | None = None) -> AbelianProcessor:
    """Breadth-first exploration of the joint states reachable from the start."""
    sim = Simulator(net)
    k = len(net.inputs)
    start = tuple(sim.states)
    index = {start: 0}
    order = [start]
    trans = [[] for _ in range(k)]
    outs = [[] for _ in range(k)]
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for i in range(k):
            sim.reset(s)
            unit = [0] * k
            unit[i] = 1
            sim.feed(unit)
            sim.settle(LOWEST, budget)
            s2 = tuple(sim.states)
            if s2 not in index:
                if len(index) >= state_cap:
                    raise StateCapExceeded(f"more than {state_cap} reachable joint states")
                index[s2] = len(order)
                order.append(s2)
                queue.append(s2)
            trans[i].append(s2)
            outs[i].append(sim.output())
    return AbelianProcessor(
        tuple(f"in{i}" for i in range(k)),
        tuple(f"out{j}" for j in range(len(net.outputs))),
        tuple(",".join(map(str, s)) for s in order),
        0,
        tuple(tuple(index[s2] for s2 in t) for t in trans),
        tuple(tuple(o) for o in outs),
    )


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


class Sig:
    """A wire end produced by the builder, consumed at most once."""

    __slots__ = ("kind", "ref", "port", "used")

    def __init__(self, kind, ref, port=0):
        self.kind, self.ref, self.port, self.used = kind, ref, port, False

    def __repr__(self):
        return f"Sig({self.kind}, {self.ref}, {self.port})"


class Builder:
    """Incremental network construction with wire-level helpers.

    ``None`` stands for a wire that never carries letters; gates fed only
    by such wires are elided.  Unconsumed node outputs become trash edges.
    """

    def __init__(self):
        self._nodes = []
        self._links = []  # (source sig, target node id or "output", port)
        self._inputs = []
        self._outputs = []
        self._fwd = {}

    # primitives ----------------------------------------------------------

    def input(self) -> Sig:
        s = Sig("in", len(self._inputs))
        self._inputs.append(s)
        return s

    def _consume(self, s: Sig | None, target, port: int):
        if s is None:
            self._links.append((None, target, port))
            return
        if not isinstance(s, Sig):
            raise NetworkError(f"cannot wire {s!r}")
        if s.used:
            raise NetworkError(f"wire {s!r} consumed twice")
        s.used = True
        self._links.append((s, target, port))

    def _node(self, gate=None, processor=None, ins=()) -> list:
        nid = len(self._nodes)
        node = Node(nid, gate, processor)
        p = node.proc
        if len(ins) != p.k:
            raise NetworkError(f"{node.label} needs {p.k} inputs, got {len(ins)}")
        self._nodes.append(node)
        for i, s in enumerate(ins):
            self._consume(s, nid, i)
        return [Sig("node", nid, j) for j in range(p.l)]

    def gate(self, spec: GateSpec, ins: Sequence[Sig]) -> list:
        return self._node(gate=spec, ins=ins)

    def processor(self, p: AbelianProcessor, ins: Sequence[Sig]) -> list:
        return self._node(processor=p, ins=ins)

    def forward(self) -> Sig:
        """Placeholder wire for feedback; bind it later with :meth:`bind`."""
        s = Sig("fwd", len(self._fwd))
        self._fwd[s.ref] = None
        return s

    def bind(self, fwd: Sig, s: Sig):
        if fwd.kind != "fwd" or self._fwd[fwd.ref] is not None:
            raise NetworkError("bind needs an unbound forward wire")
        if s is None:
            raise NetworkError("cannot bind a forward wire to the zero wire")
        if s.used:
            raise NetworkError(f"wire {s!r} consumed twice")
        s.used = True
        self._fwd[fwd.ref] = s

    def output(self, s: Sig | None):
        if s is not None and s.kind == "in":
            s = self.gate(splitter(2), [s])[0]
        self._outputs.append(s)
        if s is not None:
            self._consume(s, "output", len(self._outputs) - 1)

    # helpers -------------------------------------------------------------

    def add(self, sigs: Sequence[Sig | None]) -> Sig | None:
        live = [s for s in sigs if s is not None]
        if not live:
            return None

        def tree(lst):
            if len(lst) == 1:
                return lst[0]
            h = (len(lst) + 1) // 2
            return self.gate(adder(2), [tree(lst[:h]), tree(lst[h:])])[0]

        return tree(live)

    def split(self, s: Sig | None, n: int) -> list:
        if n == 0:
            return []
        if s is None:
            return [None] * n

        def tree(x, m):
            if m == 1:
                return [x]
            h = (m + 1) // 2
            a, b = self.gate(splitter(2), [x])
            return tree(a, h) + tree(b, m - h)

        return tree(s, n)

    def toppler(self, s: Sig | None, lam: int, prime: int = 0) -> Sig | None:
        if s is None:
            return None
        if lam == 1:
            if prime:
                raise GateError("a threshold-1 toppler admits no prime")
            return s
        return self.gate(toppler(lam, prime), [s])[0]

    def delayer(self, s: Sig | None) -> Sig | None:
        return None if s is None else self.gate(DELAYER, [s])[0]

    def presink(self, s: Sig | None) -> Sig | None:
        return None if s is None else self.gate(PRESINK, [s])[0]

    def scale(self, s: Sig | None, c: int) -> Sig | None:
        """c copies of s, summed."""
        if c < 0:
            raise ValueError("negative multiplier")
        return self.add(self.split(s, c)) if c else None

    def embed(self, net: Network, ins: Sequence[Sig | None]) -> list:
        """Copy ``net`` into this builder, wiring its inputs to ``ins``.

        Returns one wire per output of ``net`` (``None`` for constant zeros).
        """
        if len(ins) != len(net.inputs):
            raise NetworkError("input arity mismatch while embedding")
        feeds = {eid: s for eid, s in zip(net.inputs, ins)}
        order = net.topological_order()
        if order is None:
            # feedback: route every internal wire through a forward placeholder
            wire = {(e.src, e.src_port): self.forward() for e in net.edges if e.src is not None}
            order = [v.id for v in net.nodes]
        else:
            wire = {}
        for nid in order:
            v = net.node(nid)
            srcs = []
            for i in range(v.proc.k):
                e = net.edge(net._in_slots[(nid, i)])
                srcs.append(wire[(e.src, e.src_port)] if e.src is not None else feeds.get(e.id))
            for j, o in enumerate(self._node(gate=v.gate, processor=v.processor, ins=srcs)):
                key = (nid, j)
                if key in wire:
                    self.bind(wire[key], o)
                else:
                    wire[key] = o
        out = []
        for eid in net.outputs:
            e = net.edge(eid)
            out.append(wire[(e.src, e.src_port)] if e.src is not None else None)
        return out

    # assembly ------------------------------------------------------------

    def build(self) -> Network:
        def resolve(s):
            seen = 0
            while s.kind == "fwd":
                t = self._fwd.get(s.ref)
                if t is None:
                    raise NetworkError(f"forward wire {s.ref} never bound")
                s = t
                seen += 1
                if seen > len(self._fwd):
                    raise NetworkError("cyclic forward binding")
            return s

        edges, inputs, outputs, trash = [], [], [], []
        fed = set()
        port_used = set()
        out_edge_ids = [None] * len(self._outputs)
        n_inputs = len(self._inputs)
        input_targets = {}
        for s, target, port in self._links:
            if s is None:
                continue
            r = resolve(s)
            if r.kind == "in":
                if r.ref in input_targets:
                    raise NetworkError(f"input {r.ref} consumed twice")
                input_targets[r.ref] = (target, port)
        nid = len(self._nodes)
        extra_nodes = []
        for a in range(n_inputs):
            if a not in input_targets:
                extra_nodes.append(Node(nid, splitter(2)))
                input_targets[a] = (nid, 0)
                nid += 1
        nodes = self._nodes + extra_nodes
        eid = 0
        for a in range(n_inputs):
            target, port = input_targets[a]
            if target == "output":
                raise NetworkError("input wired straight to an output")
            edges.append(Edge(eid, None, 0, target, port))
            inputs.append(eid)
            eid += 1
        for s, target, port in self._links:
            if s is None:
                edges.append(Edge(eid, None, 0, None if target == "output" else target, port if target != "output" else 0))
                if target == "output":
                    out_edge_ids[port] = eid
                eid += 1
                continue
            r = resolve(s)
            if r.kind == "in":
                continue
            port_used.add((r.ref, r.port))
            if target == "output":
                edges.append(Edge(eid, r.ref, r.port, None, 0))
                out_edge_ids[port] = eid
            else:
                edges.append(Edge(eid, r.ref, r.port, target, port))
            eid += 1
        for j, s in enumerate(self._outputs):
            if s is None:
                edges.append(Edge(eid, None, 0, None, 0))
                out_edge_ids[j] = eid
                eid += 1
        for v in nodes:
            for j in range(v.proc.l):
                if (v.id, j) not in port_used:
                    edges.append(Edge(eid, v.id, j, None, 0))
                    trash.append(eid)
                    eid += 1
        return Network(tuple(nodes), tuple(edges), tuple(inputs), tuple(out_edge_ids), tuple(trash))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def to_dict(net: Network) -> dict:
    ins, outs = set(net.inputs), set(net.outputs)
    nodes = []
    for v in net.nodes:
        d = {"id": v.id}
        if v.gate is not None:
            d["gate"] = v.gate.to_dict()
        else:
            d["processor"] = v.processor.to_dict()
        nodes.append(d)
    edges = []
    for e in net.edges:
        edges.append({
            "id": e.id,
            "from": "input" if e.id in ins else e.src,
            "from_port": e.src_port,
            "to": e.dst if e.dst is not None else ("output" if e.id in outs else "trash"),
            "to_port": e.dst_port,
        })
    return {"nodes": nodes, "edges": edges, "inputs": list(net.inputs),
            "outputs": list(net.outputs), "trash": list(net.trash)}


def export_json(net: Network) -> str:
    """Canonical JSON text (sorted keys, fixed separators)."""
    return json.dumps(to_dict(net), sort_keys=True, separators=(",", ":"))


def import_json(text: str) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise NetworkError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    return from_dict(doc)


def from_dict(doc: dict) -> Network:
    if not isinstance(doc, dict):
        raise NetworkError("network document must be a JSON object")
    for key in ("nodes", "edges", "inputs", "outputs"):
        if key not in doc:
            raise NetworkError(f"network document missing {key!r}")
    nodes = []
    for n, d in enumerate(doc["nodes"]):
        where = f"nodes[{n}]"
        if "id" not in d:
            raise NetworkError(f"{where}: missing 'id'")
        try:
            if "gate" in d:
                nodes.append(Node(int(d["id"]), gate=GateSpec.from_dict(d["gate"])))
            elif "processor" in d:
                nodes.append(Node(int(d["id"]), processor=AbelianProcessor.from_dict(d["processor"])))
            else:
                raise NetworkError("needs 'gate' or 'processor'")
        except (GateError, ProcessorError, NetworkError, TypeError) as e:
            raise NetworkError(f"{where} (id {d['id']}): {e}") from None
    edges = []
    for n, d in enumerate(doc["edges"]):
        where = f"edges[{n}] (id {d.get('id', '?')})"
        for key in ("id", "from", "to"):
            if key not in d:
                raise NetworkError(f"{where}: missing {key!r}")
        src = d["from"]
        dst = d["to"]
        if src not in ("input", None) and not isinstance(src, int):
            raise NetworkError(f"{where}: bad source {src!r}")
        if dst not in ("output", "trash") and not isinstance(dst, int):
            raise NetworkError(f"{where}: bad target {dst!r}")
        edges.append(Edge(int(d["id"]), src if isinstance(src, int) else None, int(d.get("from_port", 0)),
                          dst if isinstance(dst, int) else None, int(d.get("to_port", 0))))
    try:
        net = Network(tuple(nodes), tuple(edges), tuple(doc["inputs"]), tuple(doc["outputs"]),
                      tuple(doc.get("trash", ())))
    except NetworkError as e:
        raise NetworkError(f"inconsistent network: {e}") from None
    ins = set(net.inputs)
    for n, d in enumerate(doc["edges"]):
        if (d["from"] == "input") != (d["id"] in ins):
            raise NetworkError(f"edges[{n}] (id {d['id']}): 'from' disagrees with the inputs list")
        if d["to"] == "output" and d["id"] not in net.outputs:
            raise NetworkError(f"edges[{n}] (id {d['id']}): marked output but not listed")
        if d["to"] == "trash" and d["id"] not in net.trash:
            raise NetworkError(f"edges[{n}] (id {d['id']}): marked trash but not listed")
    return net


SHAPES = {"adder": "circle", "splitter": "point", "toppler": "box", "delayer": "triangle",
          "presink": "invtriangle", "processor": "box3d"}


def export_dot(net: Network, name: str = "network") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for v in net.nodes:
        lines.append(f'  n{v.id} [label="{v.label}", shape={SHAPES[v.kind]}];')
    for a, eid in enumerate(net.inputs):
        lines.append(f'  in{a} [label="x{a + 1}", shape=plaintext];')
    for b, eid in enumerate(net.outputs):
        lines.append(f'  out{b} [label="y{b + 1}", shape=plaintext];')
    if net.trash:
        lines.append('  trash [label="trash", shape=plaintext];')
    ins = {e: a for a, e in enumerate(net.inputs)}
    outs = {e: b for b, e in enumerate(net.outputs)}
    for e in net.edges:
        if e.src is None and e.id not in ins:
            lines.append(f'  zero{e.id} [label="0", shape=plaintext];')
            src = f"zero{e.id}"
        else:
            src = f"in{ins[e.id]}" if e.id in ins else f"n{e.src}"
        dst = f"n{e.dst}" if e.dst is not None else (f"out{outs[e.id]}" if e.id in outs else "trash")
        lines.append(f"  {src} -> {dst};")
    lines.append("}")
    return "\n".join(lines) + "\n"
