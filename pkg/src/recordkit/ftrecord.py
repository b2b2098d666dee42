"""Fault-tolerant variant: spare copy, miscompare detection, voted replay.

transform_ft() extends a 1-random-bit design with a third untrusted copy of
the function. Trusted per-input selectors (mux on the random bit) steer the
spare onto exactly the input vector of whichever main copy is currently
selected, so in fault-free operation the spare mirrors the selected copy
bit for bit. A trusted comparator xors spare against selected output and
or-reduces into a single miscompare wire.

ft_simulate() runs the two-phase protocol around that datapath:

  phase 1   normal operation. Clean compare: commit the selected output
            and advance. Miscompare: latch e, buffer the suspect output,
            save the inputs and the random bit.
  phase 2   one replay step with the saved inputs and saved random bit
            (the transient has expired by then). All three copies now act
            as triple-modular redundancy; the per-output majority vote
            replaces the buffered value, e clears, phase 1 resumes.

Under the single-transient fault assumption the committed stream equals
the fault-free reference: the selected copy and the spare recompute
identical correct values on replay, so the vote is decided regardless of
what the unselected copy (which legitimately computes on complemented
inputs) produces. A fault that survives into replays is counted; hitting
the replay limit raises a permanent-fault suspicion flag in the trace.
Purging a permanently faulty copy is reported, never performed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .netlist import Evaluator, Gate, Netlist, UNTRUSTED, validate
from .recordize import PartitionedDesign, RecordConfig, transform
from .rng import RngSpec, bit_stream
from .sim import Stimulus

REPLAY_LIMIT = 3
SPARE = 2


class FaultPlanError(Exception):
    pass


@dataclass
class FTDesign:
    design: PartitionedDesign
    source: Netlist
    spare_inputs: Dict[str, str]
    spare_outputs: Dict[str, str]
    selected_outputs: Dict[str, str]
    compare_wire: str
    voter_outputs: Dict[str, str]
    replay_limit: int = REPLAY_LIMIT

    def replica_wires(self, k: int) -> List[str]:
        return [g.out for g in self.design.netlist.gates
                if g.zone == UNTRUSTED and g.replica == k]


def transform_ft(n: Netlist, cfg: RecordConfig) -> FTDesign:
    """Build the spare-augmented design; only single-group configs apply."""
    if cfg.groups != 1:
        raise ValueError("the fault-tolerant construction uses exactly one "
                         "random bit (got %d groups)" % cfg.groups)
    d = transform(n, cfg)
    gates = list(d.netlist.gates)
    gate_driven = {g.out for g in n.gates}

    rep0 = d.replica_input_wires(0)
    rep1 = d.replica_input_wires(1)
    spare_inputs: Dict[str, str] = {}
    for i in n.inputs:
        w = "__s_%s" % i
        gates.append(Gate("MUX2", w, ("__r1", rep0[i], rep1[i])))
        spare_inputs[i] = w

    for g in n.gates:
        ins = tuple(spare_inputs[x] if x not in gate_driven else
                    "__f%d_%s" % (SPARE, x) for x in g.ins)
        gates.append(Gate(g.kind, "__f%d_%s" % (SPARE, g.out), ins,
                          UNTRUSTED, SPARE))

    def spare_out(o: str) -> str:
        return "__f%d_%s" % (SPARE, o) if o in gate_driven else spare_inputs[o]

    spare_outputs = {o: spare_out(o) for o in n.outputs}
    selected = {o: d.selected_wire(o) for o in n.outputs}

    cmp_wires = []
    for o in n.outputs:
        w = "__cmp_%s" % o
        gates.append(Gate("XOR", w, (spare_outputs[o], selected[o])))
        cmp_wires.append(w)
    if len(cmp_wires) == 1:
        gates.append(Gate("BUF", "__e", (cmp_wires[0],)))
    else:
        gates.append(Gate("OR", "__e", tuple(cmp_wires)))

    voters: Dict[str, str] = {}
    for o in n.outputs:
        a = d.replica_output_wire(0, o)
        b = d.replica_output_wire(1, o)
        c = spare_outputs[o]
        gates.append(Gate("AND", "__vab_%s" % o, (a, b)))
        gates.append(Gate("AND", "__vac_%s" % o, (a, c)))
        gates.append(Gate("AND", "__vbc_%s" % o, (b, c)))
        gates.append(Gate("OR", "__v_%s" % o,
                          ("__vab_%s" % o, "__vac_%s" % o, "__vbc_%s" % o)))
        voters[o] = "__v_%s" % o

    netlist = Netlist(d.netlist.name + "_ft", d.netlist.inputs,
                      d.netlist.outputs + ("__e",) + tuple(voters.values()),
                      tuple(gates))
    validate(netlist)
    return FTDesign(
        design=replace(d, netlist=netlist),
        source=n,
        spare_inputs=spare_inputs,
        spare_outputs=spare_outputs,
        selected_outputs=selected,
        compare_wire="__e",
        voter_outputs=voters,
    )


@dataclass(frozen=True)
class FaultInjection:
    """Force one replica-internal wire to a value for one protocol step."""

    cycle: int
    replica: int
    wire: str
    value: int


@dataclass
class FaultPlan:
    injections: Tuple[FaultInjection, ...] = ()

    def __post_init__(self):
        self.injections = tuple(self.injections)

    def validate(self, ft: FTDesign) -> None:
        seen_cycles = set()
        driven = {g.out for g in ft.source.gates}
        for inj in self.injections:
            if inj.cycle < 0:
                raise FaultPlanError("negative injection cycle")
            if inj.cycle in seen_cycles:
                raise FaultPlanError("more than one fault at cycle %d "
                                     "(single-fault assumption)" % inj.cycle)
            seen_cycles.add(inj.cycle)
            if not 0 <= inj.replica <= SPARE:
                raise FaultPlanError("unknown replica %d" % inj.replica)
            if inj.wire not in driven:
                raise FaultPlanError(
                    "wire %r is not a gate-driven wire of %s; faults only "
                    "apply inside the untrusted copies"
                    % (inj.wire, ft.source.name))
            if inj.value not in (0, 1):
                raise FaultPlanError("forced value must be 0 or 1")

    def at(self, step: int) -> Optional[FaultInjection]:
        for inj in self.injections:
            if inj.cycle == step:
                return inj
        return None

    def to_json(self) -> list:
        return [{"cycle": i.cycle, "replica": i.replica, "wire": i.wire,
                 "value": i.value} for i in self.injections]

    @classmethod
    def from_json(cls, doc: Sequence[dict]) -> "FaultPlan":
        return cls(tuple(FaultInjection(int(e["cycle"]), int(e["replica"]),
                                        str(e["wire"]), int(e["value"]))
                         for e in doc))

    @classmethod
    def from_file(cls, path) -> "FaultPlan":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_json(json.load(f))


@dataclass
class FTStep:
    step: int
    phase: int
    logical_cycle: int
    e: int
    r: int
    miscompare: int
    committed: Optional[Dict[str, int]]
    buffered: Optional[Dict[str, int]]


@dataclass
class FTTrace:
    steps: List[FTStep]
    committed: List[Dict[str, int]]
    reference: List[Dict[str, int]]
    permanent_fault_suspected: bool = False
    suspected_at_step: Optional[int] = None

    @property
    def clean(self) -> bool:
        return self.committed == self.reference

    def e_values(self) -> List[int]:
        return [s.e for s in self.steps]

    def to_csv(self, path) -> None:
        outputs = sorted(self.committed[0]) if self.committed else []
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["step", "phase", "logical_cycle", "e", "r",
                        "miscompare"] + ["commit_%s" % o for o in outputs])
            for s in self.steps:
                row = [s.step, s.phase, s.logical_cycle, s.e, s.r,
                       s.miscompare]
                row += [(s.committed or {}).get(o, "") for o in outputs]
                w.writerow(row)


def ft_simulate(ft: FTDesign, stim: Stimulus, rng: RngSpec,
                faults: Optional[FaultPlan] = None) -> FTTrace:
    """Run the two-phase detect/replay protocol over a stimulus."""
    faults = faults or FaultPlan()
    faults.validate(ft)
    count, cols = stim.bound(len(ft.source.inputs))
    rows = [{w: (c >> cyc) & 1 for w, c in zip(ft.source.inputs, cols)}
            for cyc in range(count)]

    ev = Evaluator(ft.design.netlist)
    ref_ev = Evaluator(ft.source)
    reference = []
    for row in rows:
        v = ref_ev.run(row)
        reference.append({o: v[o] for o in ft.source.outputs})

    r_bits = bit_stream(rng)
    steps: List[FTStep] = []
    committed: List[Optional[Dict[str, int]]] = [None] * count
    outputs = ft.source.outputs

    phase = 1
    lc = 0
    step = 0
    saved: Optional[Tuple[Dict[str, int], int, int]] = None
    replay_faults = 0
    suspected = False
    suspected_at: Optional[int] = None

    while lc < count or phase == 2:
        inj = faults.at(step)
        force = None
        if inj is not None:
            force = {"__f%d_%s" % (inj.replica, inj.wire): inj.value}
        if phase == 1:
            x = rows[lc]
            r = next(r_bits)
            values = dict(x)
            values["__r1"] = r
            v = ev.run(values, force=force)
            m = {o: v[ft.selected_outputs[o]] for o in outputs}
            mis = v[ft.compare_wire]
            if mis:
                saved = (x, r, lc)
                steps.append(FTStep(step, 1, lc, 1, r, 1, None, m))
                phase = 2
            else:
                committed[lc] = m
                steps.append(FTStep(step, 1, lc, 0, r, 0, m, None))
                lc += 1
        else:
            x, r, saved_lc = saved
            values = dict(x)
            values["__r1"] = r
            v = ev.run(values, force=force)
            vote = {o: v[ft.voter_outputs[o]] for o in outputs}
            committed[saved_lc] = vote
            mis = v[ft.compare_wire]
            if mis:
                replay_faults += 1
                if replay_faults >= ft.replay_limit and not suspected:
                    suspected = True
                    suspected_at = step
            else:
                replay_faults = 0
            steps.append(FTStep(step, 2, saved_lc, 0, r, mis, vote, None))
            saved = None
            phase = 1
            lc = saved_lc + 1
        step += 1

    return FTTrace(steps, committed, reference, suspected, suspected_at)
