"""Randomized-encoding transform and trusted/untrusted partitioning.

The transform takes a combinational netlist f and a configuration naming a
subset S of its inputs, G random-bit groups, and an input-to-group map. It
produces a partitioned design:

  encode (trusted)   for i in S: t_i = x_i xor r_g(i), and the complemented
                     encoding tn_i = x_i xnor r_g(i); inputs outside S pass
                     through untouched.
  replicate          2^G verbatim copies of f (untrusted), copy c reading
                     tn_i where bit g(i)-1 of c is set, t_i otherwise.
  select (trusted)   a balanced mux tree over the 2^G copies with r1 as the
                     outermost select, so the copy whose index equals the
                     current random vector is forwarded: m_o = f_o(x) for
                     every random value.
  re-encode (trusted)  y_o = m_o xor r1 leaves the boundary, and the decode
                     z_o = y_o xor r1 recovers plain f_o(x).

Any full-visibility observer confined to the replica copies sees only
one-time-padded data; the random wires and the raw S inputs never cross
into the untrusted zone, which partition_check verifies structurally.

The complemented encoding is emitted as a single xnor per randomized input
(an inverter folded into the encoder) so the whole harness adds exactly one
gate level in front of the copies.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .netlist import (Gate, Netlist, NetlistError, RESERVED_PREFIX,
                      UNTRUSTED, validate, gate_lines)
from .rng import RngSpec


@dataclass
class RecordConfig:
    """Which inputs are randomized, how many random bits, and the grouping."""

    randomized_inputs: Tuple[str, ...]
    groups: int = 1
    group_assignment: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self.randomized_inputs = tuple(self.randomized_inputs)
        if self.groups >= 1 and not self.group_assignment:
            self.group_assignment = {w: 1 for w in self.randomized_inputs}

    def validate(self, n: Netlist) -> None:
        if not self.randomized_inputs:
            raise ValueError("randomized input subset is empty")
        if self.groups < 1:
            raise ValueError("need at least one random-bit group")
        inp = set(n.inputs)
        seen = set()
        for w in self.randomized_inputs:
            if w not in inp:
                raise ValueError("randomized input %r is not an input of %s"
                                 % (w, n.name))
            if w in seen:
                raise ValueError("randomized input %r listed twice" % w)
            seen.add(w)
        if set(self.group_assignment) != seen:
            raise ValueError("group assignment must cover exactly the "
                             "randomized inputs")
        used = set()
        for w, g in self.group_assignment.items():
            if not 1 <= g <= self.groups:
                raise ValueError("input %r assigned to group %d, valid range "
                                 "is 1..%d" % (w, g, self.groups))
            used.add(g)
        if used != set(range(1, self.groups + 1)):
            missing = sorted(set(range(1, self.groups + 1)) - used)
            raise ValueError("group %d has no inputs" % missing[0])

    @classmethod
    def checkerboard(cls, n: Netlist, groups: int = 1,
                     subset: Optional[Sequence[str]] = None) -> "RecordConfig":
        """Assign groups round-robin by input position (alternating for G=2)."""
        names = tuple(subset) if subset is not None else n.inputs
        pos = {w: i for i, w in enumerate(n.inputs)}
        for w in names:
            if w not in pos:
                raise ValueError("unknown input %r" % w)
        assignment = {w: (pos[w] % groups) + 1 for w in names}
        return cls(tuple(names), groups, assignment)

    def to_json(self) -> dict:
        return {"subset": list(self.randomized_inputs),
                "groups": self.groups,
                "assignment": dict(self.group_assignment)}

    @classmethod
    def from_json(cls, doc: Mapping) -> "RecordConfig":
        return cls(tuple(doc["subset"]), int(doc["groups"]),
                   {k: int(v) for k, v in doc["assignment"].items()})


@dataclass
class PartitionedDesign:
    """A transformed netlist plus the metadata the harness needs to drive it."""

    netlist: Netlist
    random_wires: Tuple[str, ...]
    encoded_outputs: Tuple[str, ...]
    decoded_outputs: Tuple[str, ...]
    source_inputs: Tuple[str, ...]
    source_outputs: Tuple[str, ...]
    config: RecordConfig
    rng: RngSpec = field(default_factory=RngSpec)

    @property
    def replica_count(self) -> int:
        return 1 << self.config.groups

    def replica_gates(self, k: int) -> List[Gate]:
        return [g for g in self.netlist.gates
                if g.zone == UNTRUSTED and g.replica == k]

    def untrusted_gates(self) -> List[Gate]:
        return [g for g in self.netlist.gates if g.zone == UNTRUSTED]

    def encode_wire(self, x: str) -> str:
        return "__t_%s" % x

    def encode_complement_wire(self, x: str) -> str:
        return "__tn_%s" % x

    def selected_wire(self, o: str) -> str:
        return "__m_%s" % o

    def replica_input_wires(self, k: int) -> Dict[str, str]:
        """Wire feeding each source input position of replica k."""
        s = set(self.config.randomized_inputs)
        out = {}
        for i in self.source_inputs:
            if i in s:
                bit = (k >> (self.config.group_assignment[i] - 1)) & 1
                out[i] = (self.encode_complement_wire(i) if bit
                          else self.encode_wire(i))
            else:
                out[i] = i
        return out

    def replica_output_wire(self, k: int, o: str) -> str:
        if o in set(self.source_inputs):
            return self.replica_input_wires(k)[o]
        return "__f%d_%s" % (k, o)


def _reject_reserved(n: Netlist) -> None:
    for w in n.wires():
        if w.startswith(RESERVED_PREFIX):
            raise NetlistError("wire %r collides with the reserved '%s' "
                               "prefix" % (w, RESERVED_PREFIX))


def transform(n: Netlist, cfg: RecordConfig) -> PartitionedDesign:
    """Apply the randomized-encoding construction described above."""
    validate(n)
    cfg.validate(n)
    _reject_reserved(n)
    g_of = cfg.group_assignment
    s = set(cfg.randomized_inputs)
    big_g = cfg.groups
    r_wires = tuple("__r%d" % g for g in range(1, big_g + 1))

    gates: List[Gate] = []
    for i in n.inputs:
        if i in s:
            r = "__r%d" % g_of[i]
            gates.append(Gate("XOR", "__t_%s" % i, (i, r)))
            gates.append(Gate("XNOR", "__tn_%s" % i, (i, r)))

    gate_driven = {g.out for g in n.gates}
    replica_in: List[Dict[str, str]] = []
    for c in range(1 << big_g):
        mapping: Dict[str, str] = {}
        for i in n.inputs:
            if i in s:
                bit = (c >> (g_of[i] - 1)) & 1
                mapping[i] = ("__tn_%s" if bit else "__t_%s") % i
            else:
                mapping[i] = i
        replica_in.append(mapping)
        for g in n.gates:
            ins = tuple(mapping[w] if w not in gate_driven else
                        "__f%d_%s" % (c, w) for w in g.ins)
            gates.append(Gate(g.kind, "__f%d_%s" % (c, g.out), ins,
                              UNTRUSTED, c))

    def leaf(c: int, o: str) -> str:
        return "__f%d_%s" % (c, o) if o in gate_driven else replica_in[c][o]

    def build_mux(o: str, indices: List[int], level: int, path: str) -> str:
        if len(indices) == 1:
            return leaf(indices[0], o)
        lo = [c for c in indices if not (c >> level) & 1]
        hi = [c for c in indices if (c >> level) & 1]
        a0 = build_mux(o, lo, level + 1, path + "0")
        a1 = build_mux(o, hi, level + 1, path + "1")
        out = "__m_%s" % o if path == "" else "__m_%s_b%s" % (o, path)
        gates.append(Gate("MUX2", out, ("__r%d" % (level + 1), a0, a1)))
        return out

    encoded: List[str] = []
    decoded: List[str] = []
    for o in n.outputs:
        m = build_mux(o, list(range(1 << big_g)), 0, "")
        gates.append(Gate("XOR", "__y_%s" % o, (m, "__r1")))
        gates.append(Gate("XOR", "__z_%s" % o, ("__y_%s" % o, "__r1")))
        encoded.append("__y_%s" % o)
        decoded.append("__z_%s" % o)

    out_netlist = Netlist("%s_record%d" % (n.name, big_g),
                          n.inputs + r_wires,
                          tuple(encoded) + tuple(decoded),
                          tuple(gates))
    validate(out_netlist)
    return PartitionedDesign(
        netlist=out_netlist,
        random_wires=r_wires,
        encoded_outputs=tuple(encoded),
        decoded_outputs=tuple(decoded),
        source_inputs=n.inputs,
        source_outputs=n.outputs,
        config=cfg,
    )


@dataclass(frozen=True)
class Violation:
    gate_out: str
    wire: str
    reason: str


@dataclass
class ClosureReport:
    violations: List[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations


def partition_check(d: PartitionedDesign) -> ClosureReport:
    """Structural closure: no untrusted gate reads a random wire or a raw
    randomized input. Violations are report entries, not exceptions."""
    randoms = set(d.random_wires)
    raw = set(d.config.randomized_inputs)
    violations: List[Violation] = []
    for g in d.netlist.gates:
        if g.zone != UNTRUSTED:
            continue
        for w in g.ins:
            if w in randoms:
                violations.append(Violation(g.out, w, "random wire"))
            elif w in raw:
                violations.append(Violation(g.out, w,
                                            "raw randomized input"))
    return ClosureReport(violations)


def user_view(d: PartitionedDesign) -> Netlist:
    """The bona fide user's netlist: decoded outputs, zone tags dropped."""
    gates = tuple(Gate(g.kind, g.out, g.ins) for g in d.netlist.gates)
    n = Netlist("%s_user" % d.netlist.name, d.netlist.inputs,
                d.decoded_outputs, gates)
    validate(n)
    return n


def rekey(d: PartitionedDesign, new_rng: RngSpec) -> PartitionedDesign:
    """Swap the harness random stream; no gate is touched."""
    return replace(d, rng=new_rng)


def untrusted_zone_text(d: PartitionedDesign) -> str:
    """Serialization of exactly the untrusted gates, in netlist order."""
    lines: List[str] = []
    for g in d.netlist.gates:
        if g.zone == UNTRUSTED:
            lines.extend(gate_lines(g))
    return "\n".join(lines) + "\n"


def design_from_netlist(n: Netlist, rng: Optional[RngSpec] = None
                        ) -> PartitionedDesign:
    """Rebuild a PartitionedDesign from a serialized transformed netlist.

    The reserved-name conventions written by transform() carry enough
    structure to recover the configuration: __rK inputs, __t_/__tn_ encode
    gates, __y_/__z_ output pairs, and replica attributes.
    """
    validate(n)
    r_wires = [w for w in n.inputs if w.startswith("__r")]
    for i, w in enumerate(r_wires, start=1):
        if w != "__r%d" % i:
            raise NetlistError("random inputs must be __r1..__rG in order, "
                               "found %r" % w)
    if not r_wires:
        raise NetlistError("no __r inputs: not a transformed design")
    groups = len(r_wires)
    source_inputs = tuple(w for w in n.inputs if not w.startswith("__r"))

    encoded = tuple(w for w in n.outputs if w.startswith("__y_"))
    decoded = tuple(w for w in n.outputs if w.startswith("__z_"))
    if not encoded or len(encoded) != len(decoded):
        raise NetlistError("outputs must pair __y_<o> with __z_<o>")
    source_outputs = tuple(w[len("__y_"):] for w in encoded)
    if tuple(w[len("__z_"):] for w in decoded) != source_outputs:
        raise NetlistError("encoded and decoded output names disagree")

    subset: List[str] = []
    assignment: Dict[str, int] = {}
    by_out = n.drivers()
    for i in source_inputs:
        g = by_out.get("__t_%s" % i)
        if g is None:
            continue
        r_ins = [w for w in g.ins if w.startswith("__r")]
        if g.kind != "XOR" or len(g.ins) != 2 or i not in g.ins or not r_ins:
            raise NetlistError("unrecognized encode gate for input %r" % i)
        subset.append(i)
        assignment[i] = int(r_ins[0][len("__r"):])

    cfg = RecordConfig(tuple(subset), groups, assignment)
    d = PartitionedDesign(
        netlist=n,
        random_wires=tuple(r_wires),
        encoded_outputs=encoded,
        decoded_outputs=decoded,
        source_inputs=source_inputs,
        source_outputs=source_outputs,
        config=cfg,
        rng=rng if rng is not None else RngSpec(),
    )
    cfg.validate(Netlist(n.name, source_inputs, source_outputs, ()))
    replicas = {g.replica for g in d.untrusted_gates()}
    if replicas != set(range(1 << groups)):
        raise NetlistError("expected replica indices 0..%d, found %s"
                           % ((1 << groups) - 1, sorted(replicas)))
    return d
