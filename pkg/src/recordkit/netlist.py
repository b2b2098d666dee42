"""Combinational gate-level netlist IR, text format, validation, evaluation.

A netlist is a DAG of gates over named single-driver wires. The text format
is line-oriented, one statement per line, ``#`` starts a comment:

    module <name>
    input <w> [<w> ...]
    output <w> [<w> ...]
    const0 <w> | const1 <w>
    not <out> <in> | buf <out> <in>
    and|or|nand|nor|xor|xnor <out> <in1> <in2> [...]
    mux <out> <sel> <a0> <a1>
    attr <out-wire> zone <trusted|untrusted>
    attr <out-wire> replica <integer>
    end

Multi-input and/or/nand/nor take two or more operands; a k-input xor is
parity, xnor its complement. ``mux`` selects a0 when sel is 0, a1 when sel
is 1. A gate without a zone attribute is trusted. Wire names match
``[A-Za-z_][A-Za-z0-9_.]*``; the ``__`` prefix is reserved for wires created
by the encoding transform and is rejected there on user inputs.

Evaluation is word-parallel: every wire value is a Python integer whose bit
j carries the wire's value in sample j, so one pass over the gate list
evaluates arbitrarily many input combinations at once.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

WIRE_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")
RESERVED_PREFIX = "__"

TRUSTED = "trusted"
UNTRUSTED = "untrusted"

GATE_KINDS = (
    "NOT", "BUF", "AND", "OR", "NAND", "NOR", "XOR", "XNOR",
    "MUX2", "CONST0", "CONST1",
)

# kind -> (min_arity, max_arity or None for unbounded)
_ARITY = {
    "NOT": (1, 1),
    "BUF": (1, 1),
    "AND": (2, None),
    "OR": (2, None),
    "NAND": (2, None),
    "NOR": (2, None),
    "XOR": (2, None),
    "XNOR": (2, None),
    "MUX2": (3, 3),
    "CONST0": (0, 0),
    "CONST1": (0, 0),
}

_KEYWORD_TO_KIND = {
    "not": "NOT", "buf": "BUF", "and": "AND", "or": "OR", "nand": "NAND",
    "nor": "NOR", "xor": "XOR", "xnor": "XNOR", "mux": "MUX2",
    "const0": "CONST0", "const1": "CONST1",
}
_KIND_TO_KEYWORD = {v: k for k, v in _KEYWORD_TO_KIND.items()}


class NetlistError(Exception):
    """Syntax or structural violation, with a source line when known."""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = "line %d" % line
            if column is not None:
                loc += ", column %d" % column
            loc += ": "
        super().__init__(loc + message)


@dataclass(frozen=True)
class Gate:
    kind: str
    out: str
    ins: Tuple[str, ...]
    zone: str = TRUSTED
    replica: Optional[int] = None
    line: Optional[int] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Netlist:
    name: str
    inputs: Tuple[str, ...]
    outputs: Tuple[str, ...]
    gates: Tuple[Gate, ...]

    def drivers(self) -> Dict[str, Gate]:
        """Map of wire name to driving gate (primary inputs excluded)."""
        return {g.out: g for g in self.gates}

    def wires(self) -> List[str]:
        seen = list(self.inputs)
        have = set(seen)
        for g in self.gates:
            if g.out not in have:
                have.add(g.out)
                seen.append(g.out)
        return seen


def _check_name(name: str, what: str, line: Optional[int] = None) -> None:
    if not WIRE_RE.match(name):
        raise NetlistError("invalid %s name %r" % (what, name), line)


def validate(n: Netlist) -> None:
    """Raise NetlistError on any structural violation; silent when valid."""
    _check_name(n.name, "module")
    driver_line: Dict[str, Optional[int]] = {}
    for w in n.inputs:
        _check_name(w, "input")
        if w in driver_line:
            raise NetlistError("duplicate driver for wire %r "
                               "(declared as input twice)" % w)
        driver_line[w] = None
    for g in n.gates:
        if g.kind not in _ARITY:
            raise NetlistError("unknown gate kind %r" % g.kind, g.line)
        lo, hi = _ARITY[g.kind]
        if len(g.ins) < lo or (hi is not None and len(g.ins) > hi):
            raise NetlistError(
                "gate %s %r takes %s inputs, got %d"
                % (g.kind, g.out, lo if hi == lo else "%d or more" % lo,
                   len(g.ins)), g.line)
        _check_name(g.out, "wire", g.line)
        for w in g.ins:
            _check_name(w, "wire", g.line)
        if g.zone not in (TRUSTED, UNTRUSTED):
            raise NetlistError("bad zone %r on wire %r" % (g.zone, g.out),
                               g.line)
        if g.replica is not None and g.replica < 0:
            raise NetlistError("negative replica index on wire %r" % g.out,
                               g.line)
        if g.out in driver_line:
            raise NetlistError("duplicate driver for wire %r" % g.out, g.line)
        driver_line[g.out] = g.line
    for g in n.gates:
        for w in g.ins:
            if w not in driver_line:
                raise NetlistError("undriven wire %r read by gate %r"
                                   % (w, g.out), g.line)
    seen_out = set()
    for w in n.outputs:
        _check_name(w, "output")
        if w not in driver_line:
            raise NetlistError("undriven output %r" % w)
        if w in seen_out:
            raise NetlistError("output %r listed twice" % w)
        seen_out.add(w)
    topo_order(n)


def topo_order(n: Netlist) -> Tuple[Gate, ...]:
    """Gates in dependency order (Kahn); raises NetlistError on a cycle."""
    by_out = {g.out: g for g in n.gates}
    pending: Dict[str, int] = {}
    readers: Dict[str, List[str]] = {}
    for g in n.gates:
        deps = 0
        for w in g.ins:
            if w in by_out:
                deps += 1
                readers.setdefault(w, []).append(g.out)
        pending[g.out] = deps
    queue = [g.out for g in n.gates if pending[g.out] == 0]
    order: List[Gate] = []
    i = 0
    while i < len(queue):
        out = queue[i]
        i += 1
        order.append(by_out[out])
        for nxt in readers.get(out, ()):
            pending[nxt] -= 1
            if pending[nxt] == 0:
                queue.append(nxt)
    if len(order) != len(n.gates):
        stuck = sorted(w for w, d in pending.items() if d > 0)
        raise NetlistError("cycle detected through wire %r" % stuck[0],
                           by_out[stuck[0]].line)
    return tuple(order)


class Evaluator:
    """Reusable word-parallel evaluation plan for one netlist."""

    def __init__(self, n: Netlist):
        self.netlist = n
        self._ops = tuple((g.kind, g.out, g.ins) for g in topo_order(n))

    def run(self, values: Mapping[str, int], mask: int = 1,
            force: Optional[Mapping[str, int]] = None) -> Dict[str, int]:
        """Value of every wire given packed primary-input words.

        ``force`` overrides a wire after its gate computed, dependents see
        the forced word (transient-fault injection hook).
        """
        v: Dict[str, int] = {}
        for w in self.netlist.inputs:
            if w not in values:
                raise NetlistError("missing input assignment for %r" % w)
            v[w] = values[w] & mask
        if force is None:
            force = {}
        for kind, out, ins in self._ops:
            if kind == "AND":
                x = v[ins[0]]
                for w in ins[1:]:
                    x &= v[w]
            elif kind == "OR":
                x = v[ins[0]]
                for w in ins[1:]:
                    x |= v[w]
            elif kind == "XOR":
                x = v[ins[0]]
                for w in ins[1:]:
                    x ^= v[w]
            elif kind == "NOT":
                x = ~v[ins[0]] & mask
            elif kind == "MUX2":
                s = v[ins[0]]
                x = (v[ins[1]] & ~s) | (v[ins[2]] & s)
            elif kind == "NAND":
                x = v[ins[0]]
                for w in ins[1:]:
                    x &= v[w]
                x = ~x & mask
            elif kind == "NOR":
                x = v[ins[0]]
                for w in ins[1:]:
                    x |= v[w]
                x = ~x & mask
            elif kind == "XNOR":
                x = v[ins[0]]
                for w in ins[1:]:
                    x ^= v[w]
                x = ~x & mask
            elif kind == "BUF":
                x = v[ins[0]]
            elif kind == "CONST0":
                x = 0
            else:  # CONST1
                x = mask
            if out in force:
                x = force[out] & mask
            v[out] = x
        return v


def evaluate(n: Netlist, assignment: Mapping[str, int]) -> Dict[str, int]:
    """Outputs of n under a full primary-input assignment (bits 0/1)."""
    for w in n.inputs:
        if w not in assignment:
            raise NetlistError("missing input assignment for %r" % w)
        if assignment[w] not in (0, 1):
            raise NetlistError("input %r must be 0 or 1, got %r"
                               % (w, assignment[w]))
    v = Evaluator(n).run(assignment, mask=1)
    return {w: v[w] for w in n.outputs}


def eval_columns(n: Netlist, columns: Mapping[str, int],
                 count: int) -> Dict[str, int]:
    """All wires of n over ``count`` packed samples per input."""
    return Evaluator(n).run(columns, mask=(1 << count) - 1)


def parse_netlist(text: str) -> Netlist:
    """Parse the text format; the result always passes validate()."""
    name: Optional[str] = None
    inputs: List[str] = []
    outputs: List[str] = []
    gates: List[Gate] = []
    attrs: List[Tuple[str, str, str, int]] = []
    ended = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = line.split()
        if not tokens:
            continue
        if ended:
            raise NetlistError("statement after 'end'", lineno)
        head = tokens[0]
        if name is None:
            if head != "module":
                raise NetlistError("expected 'module', got %r" % head, lineno,
                                   raw.index(head) + 1)
            if len(tokens) != 2:
                raise NetlistError("module takes exactly one name", lineno)
            name = tokens[1]
            _check_name(name, "module", lineno)
            continue
        if head == "module":
            raise NetlistError("duplicate module statement", lineno)
        if head == "end":
            if len(tokens) != 1:
                raise NetlistError("trailing tokens after 'end'", lineno)
            ended = True
            continue
        if head == "input" or head == "output":
            if len(tokens) < 2:
                raise NetlistError("%s needs at least one wire" % head, lineno)
            for w in tokens[1:]:
                _check_name(w, head, lineno)
            (inputs if head == "input" else outputs).extend(tokens[1:])
            continue
        if head == "attr":
            if len(tokens) != 4:
                raise NetlistError("attr takes: wire key value", lineno)
            attrs.append((tokens[1], tokens[2], tokens[3], lineno))
            continue
        kind = _KEYWORD_TO_KIND.get(head)
        if kind is None:
            raise NetlistError("unknown statement %r" % head, lineno,
                               raw.index(head) + 1)
        args = tokens[1:]
        if not args and kind not in ("CONST0", "CONST1"):
            raise NetlistError("gate %r needs an output wire" % head, lineno)
        if kind in ("CONST0", "CONST1"):
            if len(args) != 1:
                raise NetlistError("%s takes exactly one wire" % head, lineno)
            gates.append(Gate(kind, args[0], (), line=lineno))
        else:
            gates.append(Gate(kind, args[0], tuple(args[1:]), line=lineno))

    if name is None:
        raise NetlistError("empty netlist: no module statement")
    if not ended:
        raise NetlistError("missing 'end'")

    by_out = {g.out: i for i, g in enumerate(gates)}
    seen_attr = set()
    for wire, key, value, lineno in attrs:
        if wire not in by_out:
            raise NetlistError("attr on %r, which is not a gate output" % wire,
                               lineno)
        if (wire, key) in seen_attr:
            raise NetlistError("duplicate attr %s for wire %r" % (key, wire),
                               lineno)
        seen_attr.add((wire, key))
        i = by_out[wire]
        g = gates[i]
        if key == "zone":
            if value not in (TRUSTED, UNTRUSTED):
                raise NetlistError("zone must be trusted or untrusted", lineno)
            gates[i] = Gate(g.kind, g.out, g.ins, value, g.replica, g.line)
        elif key == "replica":
            try:
                idx = int(value)
            except ValueError:
                raise NetlistError("replica must be an integer", lineno)
            if idx < 0:
                raise NetlistError("replica must be non-negative", lineno)
            gates[i] = Gate(g.kind, g.out, g.ins, g.zone, idx, g.line)
        else:
            raise NetlistError("unknown attr key %r" % key, lineno)

    n = Netlist(name, tuple(inputs), tuple(outputs), tuple(gates))
    validate(n)
    return n


def write_netlist(n: Netlist) -> str:
    """Canonical text; parse_netlist(write_netlist(n)) is structurally n."""
    lines = ["module %s" % n.name]
    if n.inputs:
        lines.append("input %s" % " ".join(n.inputs))
    if n.outputs:
        lines.append("output %s" % " ".join(n.outputs))
    for g in n.gates:
        lines.extend(gate_lines(g))
    lines.append("end")
    return "\n".join(lines) + "\n"


def gate_lines(g: Gate) -> List[str]:
    """Statement line for a gate plus its attr lines."""
    keyword = _KIND_TO_KEYWORD[g.kind]
    parts = [keyword, g.out]
    parts.extend(g.ins)
    out = [" ".join(parts)]
    if g.zone != TRUSTED:
        out.append("attr %s zone %s" % (g.out, g.zone))
    if g.replica is not None:
        out.append("attr %s replica %d" % (g.out, g.replica))
    return out


def read_netlist(path) -> Netlist:
    with open(path, "r", encoding="utf-8") as f:
        return parse_netlist(f.read())


def save_netlist(n: Netlist, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(write_netlist(n))
