"""Benchmark netlist generators.

Each fixture has semantics checkable against an external oracle: the AES
byte-substitution table (built here from first principles in GF(2^8)),
integer addition, and the k-of-n majority definition.
"""

from __future__ import annotations

from typing import Dict, List, Mapping, Sequence, Tuple

from .netlist import Gate, Netlist, UNTRUSTED, validate

FIXTURE_KINDS = ("aes-sbox", "maj9", "adder4", "and-tree-n")


def gf_mul(a: int, b: int) -> int:
    """Multiply in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1."""
    p = 0
    for _ in range(8):
        if b & 1:
            p ^= a
        hi = a & 0x80
        a = (a << 1) & 0xFF
        if hi:
            a ^= 0x1B
        b >>= 1
    return p


def gf_inverse(x: int) -> int:
    """Multiplicative inverse in GF(2^8); 0 maps to 0 (x^254 by squaring)."""
    if x == 0:
        return 0
    r, base, e = 1, x, 254
    while e:
        if e & 1:
            r = gf_mul(r, base)
        base = gf_mul(base, base)
        e >>= 1
    return r


def _rotl8(b: int, k: int) -> int:
    return ((b << k) | (b >> (8 - k))) & 0xFF


def aes_sbox_table() -> Tuple[int, ...]:
    """The 256-entry AES S-box: GF(2^8) inverse followed by the affine map."""
    table = []
    for x in range(256):
        b = gf_inverse(x)
        table.append(b ^ _rotl8(b, 1) ^ _rotl8(b, 2) ^ _rotl8(b, 3)
                     ^ _rotl8(b, 4) ^ 0x63)
    return tuple(table)


def byte_assignment(names_msb_first: Sequence[str], value: int) -> Dict[str, int]:
    """Spread an integer over named wires, first name taking the MSB."""
    width = len(names_msb_first)
    if not 0 <= value < (1 << width):
        raise ValueError("value %d does not fit in %d bits" % (value, width))
    return {name: (value >> (width - 1 - i)) & 1
            for i, name in enumerate(names_msb_first)}


def byte_value(names_msb_first: Sequence[str], bits: Mapping[str, int]) -> int:
    """Inverse of byte_assignment."""
    v = 0
    for name in names_msb_first:
        v = (v << 1) | (bits[name] & 1)
    return v


def make_aes_sbox() -> Netlist:
    """8-in/8-out S-box as per-output-bit two-level sum of products.

    Inputs x7..x0 (x7 = MSB), outputs y7..y0. Deliberately naive: the truth
    table is the contract, not the gate count.
    """
    table = aes_sbox_table()
    inputs = tuple("x%d" % i for i in range(7, -1, -1))
    gates: List[Gate] = []
    for i in range(8):
        gates.append(Gate("NOT", "nx%d" % i, ("x%d" % i,)))
    for bit in range(8):
        terms = []
        for v in range(256):
            if (table[v] >> bit) & 1:
                lits = tuple(("x%d" if (v >> i) & 1 else "nx%d") % i
                             for i in range(7, -1, -1))
                t = "t%d_%02x" % (bit, v)
                gates.append(Gate("AND", t, lits))
                terms.append(t)
        gates.append(Gate("OR", "y%d" % bit, tuple(terms)))
    n = Netlist("aes_sbox", inputs,
                tuple("y%d" % i for i in range(7, -1, -1)), tuple(gates))
    validate(n)
    return n


def make_maj9() -> Netlist:
    """9-input majority: OR over all 126 five-element AND terms."""
    inputs = tuple("x%d" % i for i in range(1, 10))
    gates: List[Gate] = []
    terms = []
    combos = _combinations(9, 5)
    for k, combo in enumerate(combos):
        t = "t%d" % k
        gates.append(Gate("AND", t, tuple("x%d" % (j + 1) for j in combo)))
        terms.append(t)
    gates.append(Gate("OR", "y", tuple(terms)))
    n = Netlist("maj9", inputs, ("y",), tuple(gates))
    validate(n)
    return n


def _combinations(n: int, k: int) -> List[Tuple[int, ...]]:
    out: List[Tuple[int, ...]] = []

    def rec(start: int, chosen: Tuple[int, ...]):
        if len(chosen) == k:
            out.append(chosen)
            return
        for i in range(start, n):
            rec(i + 1, chosen + (i,))

    rec(0, ())
    return out


def make_adder4() -> Netlist:
    """4-bit ripple-carry adder: inputs a3..a0 b3..b0, outputs cout s3..s0."""
    inputs = tuple("a%d" % i for i in range(3, -1, -1)) + \
        tuple("b%d" % i for i in range(3, -1, -1))
    gates: List[Gate] = []
    carry = None
    for i in range(4):
        a, b = "a%d" % i, "b%d" % i
        gates.append(Gate("XOR", "p%d" % i, (a, b)))
        gates.append(Gate("AND", "g%d" % i, (a, b)))
        if carry is None:
            gates.append(Gate("BUF", "s%d" % i, ("p%d" % i,)))
            carry = "g0"
        else:
            gates.append(Gate("XOR", "s%d" % i, ("p%d" % i, carry)))
            gates.append(Gate("AND", "pc%d" % i, ("p%d" % i, carry)))
            gates.append(Gate("OR", "c%d" % (i + 1), ("g%d" % i, "pc%d" % i)))
            carry = "c%d" % (i + 1)
    gates.append(Gate("BUF", "cout", (carry,)))
    outputs = ("cout",) + tuple("s%d" % i for i in range(3, -1, -1))
    n = Netlist("adder4", inputs, outputs, tuple(gates))
    validate(n)
    return n


def make_and_tree(n_inputs: int) -> Netlist:
    """Balanced tree of 2-input ANDs over n_inputs inputs."""
    if n_inputs < 2:
        raise ValueError("and-tree needs at least 2 inputs")
    inputs = tuple("x%d" % i for i in range(1, n_inputs + 1))
    gates: List[Gate] = []
    level = list(inputs)
    k = 0
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            w = "a%d" % k
            k += 1
            gates.append(Gate("AND", w, (level[i], level[i + 1])))
            nxt.append(w)
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    gates.append(Gate("BUF", "y", (level[0],)))
    n = Netlist("and_tree_%d" % n_inputs, inputs, ("y",), tuple(gates))
    validate(n)
    return n


def fixture_generate(kind: str, **params) -> Netlist:
    """Build a named fixture; unknown kinds raise ValueError."""
    if kind == "aes-sbox":
        return make_aes_sbox()
    if kind == "maj9":
        return make_maj9()
    if kind == "adder4":
        return make_adder4()
    if kind == "and-tree-n":
        n = params.get("n")
        if n is None:
            raise ValueError("and-tree-n requires the parameter n")
        return make_and_tree(int(n))
    raise ValueError("unknown fixture kind %r (known: %s)"
                     % (kind, ", ".join(FIXTURE_KINDS)))
