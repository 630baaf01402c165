"""Structural summary of a synthesized network."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

from ..network import Network


@dataclass
class SynthReport:
    gate_counts: dict
    toppler_count: int
    floor_depth_bound: int | None  # most topplers on one directed path (acyclic only)
    depth: int | None  # most nodes on one directed path (acyclic only)
    nodes: int
    edges: int
    acyclic: bool
    passes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def summary(self) -> str:
        kinds = ", ".join(f"{k}={v}" for k, v in sorted(self.gate_counts.items())) or "no gates"
        shape = "acyclic" if self.acyclic else "cyclic"
        text = f"{self.nodes} nodes ({kinds}), {self.edges} edges, {shape}"
        if self.acyclic:
            text += f", depth {self.depth}, floor-depth bound {self.floor_depth_bound}"
        return text


def report(net: Network, passes=None) -> SynthReport:
    counts = net.gate_counts()
    floor_bound = depth = None
    if net.is_acyclic:
        preds_of = {v.id: [] for v in net.nodes}
        for e in net.edges:
            if e.src is not None and e.dst is not None:
                preds_of[e.dst].append(e.src)
        tops, deep = {}, {}
        for nid in net.topological_order():
            is_t = 1 if net.node(nid).kind == "toppler" else 0
            preds = preds_of[nid]
            tops[nid] = is_t + max((tops[p] for p in preds), default=0)
            deep[nid] = 1 + max((deep[p] for p in preds), default=0)
        floor_bound = max(tops.values(), default=0)
        depth = max(deep.values(), default=0)
    return SynthReport(dict(sorted(counts.items())), counts.get("toppler", 0), floor_bound, depth,
                       len(net.nodes), len(net.edges), net.is_acyclic, dict(passes or {}))
