"""The five basic gates, their processors, and small demonstration networks."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .core import AbelianProcessor

KINDS = ("adder", "splitter", "toppler", "delayer", "presink")


class GateError(ValueError):
    pass


@dataclass(frozen=True)
class GateSpec:
    kind: str
    lam: int | None = None
    prime: int = 0
    fan: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GateError(f"unknown gate kind {self.kind!r}")
        if self.kind == "toppler":
            if self.lam is None or self.lam < 2:
                raise GateError("toppler threshold must be at least 2")
            if not 0 <= self.prime < self.lam:
                raise GateError(f"toppler prime {self.prime} outside [0, {self.lam})")
        elif self.lam is not None or self.prime:
            raise GateError(f"{self.kind} takes no threshold or prime")
        if self.kind in ("adder", "splitter"):
            if self.fan < 2:
                raise GateError("fan must be at least 2")
        elif self.fan != 2:
            raise GateError(f"{self.kind} has no fan parameter")

    @property
    def n_in(self) -> int:
        return self.fan if self.kind == "adder" else 1

    @property
    def n_out(self) -> int:
        return self.fan if self.kind == "splitter" else 1

    @property
    def label(self) -> str:
        if self.kind == "toppler":
            return f"T{self.lam}:{self.prime}"
        return {"adder": "+", "splitter": "S", "delayer": "D", "presink": "P"}[self.kind]

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "toppler":
            d["lambda"], d["prime"] = self.lam, self.prime
        if self.kind in ("adder", "splitter"):
            d["fan"] = self.fan
        return d

    @classmethod
    def from_dict(cls, d: dict) -> GateSpec:
        if "kind" not in d:
            raise GateError("gate without 'kind'")
        return cls(d["kind"], d.get("lambda"), d.get("prime", 0), d.get("fan", 2))


def adder(fan: int = 2) -> GateSpec:
    return GateSpec("adder", fan=fan)


def splitter(fan: int = 2) -> GateSpec:
    return GateSpec("splitter", fan=fan)


def toppler(lam: int, prime: int = 0) -> GateSpec:
    return GateSpec("toppler", lam, prime)


DELAYER = GateSpec("delayer")
PRESINK = GateSpec("presink")


@lru_cache(maxsize=None)
def gate_processor(g: GateSpec) -> AbelianProcessor:
    """The finite processor implementing a gate."""
    if g.kind == "adder":
        return AbelianProcessor.build([[0]] * g.fan, [[(1,)]] * g.fan,
                                      inputs=[f"x{i + 1}" for i in range(g.fan)], outputs_alphabet=["y"])
    if g.kind == "splitter":
        return AbelianProcessor.build([[0]], [[(1,) * g.fan]],
                                      inputs=["x"], outputs_alphabet=[f"y{j + 1}" for j in range(g.fan)])
    if g.kind == "toppler":
        lam = g.lam
        trans = [(q + 1) % lam for q in range(lam)]
        outs = [(1,) if q == lam - 1 else (0,) for q in range(lam)]
        return AbelianProcessor.build([trans], [outs], initial=g.prime,
                                      inputs=["x"], outputs_alphabet=["y"])
    if g.kind == "delayer":
        return AbelianProcessor.build([[1, 1]], [[(0,), (1,)]], inputs=["x"], outputs_alphabet=["y"])
    return AbelianProcessor.build([[1, 1]], [[(1,), (0,)]], inputs=["x"], outputs_alphabet=["y"])


def gate_function(g: GateSpec, x):
    """Closed form of the gate's function, for cross-checks."""
    if g.kind == "adder":
        return (sum(x),)
    if g.kind == "splitter":
        return (x[0],) * g.fan
    if g.kind == "toppler":
        return ((x[0] + g.prime) // g.lam,)
    if g.kind == "delayer":
        return (max(x[0] - 1, 0),)
    return (min(x[0], 1),)


# ---------------------------------------------------------------------------
# small networks (builders live in the network module; imported lazily)
# ---------------------------------------------------------------------------


def multiway_tree(kind: str, n: int):
    """Network of n-1 two-way gates acting as one n-way adder or splitter."""
    from .network import Builder

    if kind not in ("adder", "splitter"):
        raise GateError("multi-way trees exist for adders and splitters only")
    if n < 2:
        raise GateError("need n >= 2")
    b = Builder()
    if kind == "adder":
        b.output(b.add([b.input() for _ in range(n)]))
    else:
        for s in b.split(b.input(), n):
            b.output(s)
    return b.build()


def rotor_node(d: int, delay: bool = False):
    """d-adder, d-splitter, then d topplers; output branch j is primed d-1-j."""
    from .network import Builder

    if d < 1:
        raise GateError("degree must be positive")
    b = Builder()
    ins = [b.input() for _ in range(d)]
    s = b.gate(adder(d), ins)[0] if d > 1 else ins[0]
    if delay:
        s = b.gate(DELAYER, [s])[0]
    branches = b.gate(splitter(d), [s]) if d > 1 else [s]
    for j, br in enumerate(branches):
        b.output(b.gate(toppler(d, d - 1 - j), [br])[0] if d > 1 else br)
    return b.build()


def rotor_aggregation_node(d: int):
    return rotor_node(d, delay=True)


def sandpile_node(d: int, prime: int = 0):
    """Adder into one d-toppler into a d-splitter."""
    from .network import Builder

    if d < 1:
        raise GateError("degree must be positive")
    b = Builder()
    ins = [b.input() for _ in range(d)]
    s = b.gate(adder(d), ins)[0] if d > 1 else ins[0]
    if d > 1:
        s = b.gate(toppler(d, prime), [s])[0]
        for br in b.gate(splitter(d), [s]):
            b.output(br)
    else:
        b.output(s)
    return b.build()
