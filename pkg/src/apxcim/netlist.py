"""Gate-level netlist IR and its bit-exact evaluator.

A netlist is an acyclic list of gates in topological order (guaranteed by
construction: a gate may only reference wires produced earlier).  Wires
are dense integer ids.  Evaluation is bit-parallel: each wire carries an
arbitrary-precision int whose bit j is the wire's value in test vector j,
so one pass through the gate list simulates a whole batch of operand
pairs.  Scalar evaluation is the one-lane special case of the same loop.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cells import CompressorSpec


class GateKind(Enum):
    INPUT = "INPUT"
    AND = "AND"
    OR = "OR"
    XOR = "XOR"
    NOT = "NOT"
    HA = "HA"
    FA = "FA"
    C42 = "C42"        # exact 4-2 compressor, optional 5th input = cin
    C42A = "C42A"      # approximate 4-2 compressor from a truth table


@dataclass(frozen=True)
class Gate:
    gid: int
    kind: GateKind
    inputs: tuple[int, ...]   # wire ids read
    outputs: tuple[int, ...]  # wire ids driven
    spec: CompressorSpec | None = None  # C42A only


class NetlistError(ValueError):
    pass


@dataclass
class Netlist:
    """Gate DAG for an n-bit multiplier with 2n ordered product bits."""

    width: int
    a_wires: list[int] = field(default_factory=list)
    b_wires: list[int] = field(default_factory=list)
    outputs: list[int] = field(default_factory=list)
    gates: list[Gate] = field(default_factory=list)
    n_wires: int = 0
    stage_heights: list[list[int]] = field(default_factory=list)

    def new_wire(self) -> int:
        w = self.n_wires
        self.n_wires += 1
        return w

    def add_gate(self, kind: GateKind, inputs: tuple[int, ...], n_out: int,
                 spec: CompressorSpec | None = None) -> tuple[int, ...]:
        outs = tuple(self.new_wire() for _ in range(n_out))
        self.gates.append(Gate(len(self.gates), kind, inputs, outs, spec))
        return outs

    def validate(self) -> None:
        """Check acyclicity by construction order and full connectivity."""
        driven: set[int] = set()
        for g in self.gates:
            if g.kind is not GateKind.INPUT:
                for w in g.inputs:
                    if w not in driven:
                        raise NetlistError(f"gate {g.gid} reads undriven wire {w}")
            for w in g.outputs:
                if w in driven:
                    raise NetlistError(f"wire {w} has multiple drivers")
                driven.add(w)
        if len(self.outputs) != 2 * self.width:
            raise NetlistError("netlist must expose exactly 2n product bits")
        for w in self.outputs:
            if w not in driven:
                raise NetlistError(f"output wire {w} is undriven")


def _eval_lanes(nl: Netlist, lanes_a: list[int], lanes_b: list[int], mask: int) -> list[int]:
    """One bit-parallel pass; each lane int packs one test vector per bit."""
    vals = [0] * nl.n_wires
    for i, w in enumerate(nl.a_wires):
        vals[w] = lanes_a[i]
    for i, w in enumerate(nl.b_wires):
        vals[w] = lanes_b[i]
    for g in nl.gates:
        k = g.kind
        if k is GateKind.INPUT:
            continue
        if k is GateKind.AND:
            vals[g.outputs[0]] = vals[g.inputs[0]] & vals[g.inputs[1]]
        elif k is GateKind.XOR:
            vals[g.outputs[0]] = vals[g.inputs[0]] ^ vals[g.inputs[1]]
        elif k is GateKind.OR:
            vals[g.outputs[0]] = vals[g.inputs[0]] | vals[g.inputs[1]]
        elif k is GateKind.NOT:
            vals[g.outputs[0]] = vals[g.inputs[0]] ^ mask
        elif k is GateKind.HA:
            a, b = vals[g.inputs[0]], vals[g.inputs[1]]
            vals[g.outputs[0]] = a ^ b
            vals[g.outputs[1]] = a & b
        elif k is GateKind.FA:
            a, b, c = (vals[w] for w in g.inputs)
            t = a ^ b
            vals[g.outputs[0]] = t ^ c
            vals[g.outputs[1]] = (a & b) | (t & c)
        elif k is GateKind.C42:
            x1, x2, x3, x4 = (vals[w] for w in g.inputs[:4])
            cin = vals[g.inputs[4]] if len(g.inputs) == 5 else 0
            t12 = x1 ^ x2
            s1 = t12 ^ x3
            cout = (x1 & x2) | (t12 & x3)
            t = s1 ^ x4
            vals[g.outputs[0]] = t ^ cin
            vals[g.outputs[1]] = (s1 & x4) | (t & cin)
            vals[g.outputs[2]] = cout
        elif k is GateKind.C42A:
            x = [vals[w] for w in g.inputs]
            nx = [v ^ mask for v in x]
            s_acc = 0
            c_acc = 0
            for p, (sb, cb) in g.spec.table.items():
                if not (sb or cb):
                    continue
                m = ((x[0] if p & 8 else nx[0]) & (x[1] if p & 4 else nx[1])
                     & (x[2] if p & 2 else nx[2]) & (x[3] if p & 1 else nx[3]))
                if sb:
                    s_acc |= m
                if cb:
                    c_acc |= m
            vals[g.outputs[0]] = s_acc
            vals[g.outputs[1]] = c_acc
        else:
            raise NetlistError(f"unhandled gate kind {k}")
    return [vals[w] for w in nl.outputs]


def evaluate_netlist(nl: Netlist, a: int, b: int) -> int:
    """Golden scalar simulation: the 2n-bit product for one operand pair."""
    n = nl.width
    if not (0 <= a < (1 << n) and 0 <= b < (1 << n)):
        raise NetlistError(f"operands must fit {n} bits")
    lanes_a = [(a >> i) & 1 for i in range(n)]
    lanes_b = [(b >> i) & 1 for i in range(n)]
    out = _eval_lanes(nl, lanes_a, lanes_b, 1)
    p = 0
    for i, bit in enumerate(out):
        p |= (bit & 1) << i
    return p


_CHUNK = 1 << 16


def evaluate_batch(nl: Netlist, a_vals, b_vals) -> np.ndarray:
    """Vectorized product of many operand pairs (uint64, so n <= 32).

    Operands are transposed into per-bit lane integers, the gate list is
    walked once per chunk with bulk int ops, and products are transposed
    back.  Results are identical to per-pair evaluate_netlist.
    """
    if nl.width > 32:
        raise NetlistError("batch evaluation supports widths up to 32")
    a_arr = np.ascontiguousarray(a_vals, dtype=np.uint64)
    b_arr = np.ascontiguousarray(b_vals, dtype=np.uint64)
    if a_arr.shape != b_arr.shape:
        raise NetlistError("operand arrays must have equal length")
    n = nl.width
    if a_arr.size and (int(a_arr.max()) >= (1 << n) or int(b_arr.max()) >= (1 << n)):
        raise NetlistError(f"operands must fit {n} bits")
    out = np.zeros(a_arr.size, dtype=np.uint64)
    for lo in range(0, a_arr.size, _CHUNK):
        hi = min(lo + _CHUNK, a_arr.size)
        count = hi - lo
        mask = (1 << count) - 1
        lanes_a = _to_lanes(a_arr[lo:hi], n)
        lanes_b = _to_lanes(b_arr[lo:hi], n)
        lanes_p = _eval_lanes(nl, lanes_a, lanes_b, mask)
        out[lo:hi] = _from_lanes(lanes_p, count)
    return out


def _to_lanes(vals: np.ndarray, nbits: int) -> list[int]:
    lanes = []
    for i in range(nbits):
        bits = ((vals >> np.uint64(i)) & np.uint64(1)).astype(np.uint8)
        lanes.append(int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little"))
    return lanes


def _from_lanes(lanes: list[int], count: int) -> np.ndarray:
    out = np.zeros(count, dtype=np.uint64)
    nbytes = (count + 7) // 8
    for i, lane in enumerate(lanes):
        buf = np.frombuffer(lane.to_bytes(nbytes, "little"), dtype=np.uint8)
        bits = np.unpackbits(buf, bitorder="little", count=count).astype(np.uint64)
        out |= bits << np.uint64(i)
    return out


def gate_count(nl: Netlist) -> dict[str, int]:
    """Per-kind gate counts plus a 'total' over non-INPUT gates."""
    counts = Counter(g.kind.value for g in nl.gates if g.kind is not GateKind.INPUT)
    out = dict(sorted(counts.items()))
    out["total"] = sum(counts.values())
    return out
