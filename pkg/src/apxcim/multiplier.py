"""Multiplier compiler: config descriptions down to gate-level netlists.

Array multipliers are built in three phases: AND-gate partial products,
a staged 4-2 reduction tree, and a ripple carry-propagate adder over
the final two rows.  Columns below the configured approximation region
use a table-driven approximate compressor for each group of 4 bits
(exact FA/HA for 3/2-bit residues); all other columns use exact cells.

Scheduling is column-wise greedy: within a column, bits are consumed
top-down in groups of 4, then 3, then 2.  Exact compressors in a stage
chain cout into the cin of the next column's compressor; couts with no
consumer are carried into the next stage at their own weight.
Approximate compressors never chain.
"""
from __future__ import annotations

from dataclasses import dataclass

from .cells import CompressorSpec, get_compressor_spec
from .netlist import (
    Gate,
    GateKind,
    Netlist,
    NetlistError,
    evaluate_batch,
    evaluate_netlist,
    gate_count,
)

FAMILIES = ("exact", "approx4-2", "logarithmic")
SIGNEDNESS = ("unsigned", "sign-magnitude")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class MultiplierConfig:
    """Declarative multiplier description.

    approx_region counts reduction columns from the LSB that may use the
    approximate compressor; it defaults to the operand width.  Fields
    tied to one family must be left unset for the others.
    """

    width: int
    family: str
    signedness: str = "unsigned"
    approx_region: int | None = None
    compressor: str | None = None
    compensation: bool | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.width, int) or not 2 <= self.width <= 32:
            raise ConfigError(f"width must be an integer in [2, 32], got {self.width!r}")
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.signedness not in SIGNEDNESS:
            raise ConfigError(f"signedness must be one of {SIGNEDNESS}, got {self.signedness!r}")
        if self.family == "approx4-2":
            if self.approx_region is None:
                object.__setattr__(self, "approx_region", self.width)
            if not 0 <= self.approx_region <= 2 * self.width:
                raise ConfigError(
                    f"approx_region must be in [0, {2 * self.width}], got {self.approx_region}")
            if self.compressor is None:
                object.__setattr__(self, "compressor", "saturating")
        else:
            if self.approx_region is not None:
                raise ConfigError("approx_region only applies to family approx4-2")
            if self.compressor is not None:
                raise ConfigError("compressor only applies to family approx4-2")
        if self.family == "logarithmic":
            if self.compensation is None:
                object.__setattr__(self, "compensation", True)
        elif self.compensation is not None:
            raise ConfigError("compensation only applies to family logarithmic")


def build_multiplier_netlist(cfg: MultiplierConfig) -> Netlist:
    """Compile an exact or approx4-2 config into a product netlist."""
    if cfg.family == "logarithmic":
        raise ConfigError("logarithmic multipliers are not array netlists; "
                          "use the log-multiplier builder")
    n = cfg.width
    nl = Netlist(width=n)
    nl.a_wires = [nl.add_gate(GateKind.INPUT, (), 1)[0] for _ in range(n)]
    nl.b_wires = [nl.add_gate(GateKind.INPUT, (), 1)[0] for _ in range(n)]

    spec: CompressorSpec | None = None
    region = 0
    if cfg.family == "approx4-2":
        spec = get_compressor_spec(cfg.compressor)
        region = cfg.approx_region

    cols: list[list[int]] = [[] for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            pp = nl.add_gate(GateKind.AND, (nl.a_wires[i], nl.b_wires[j]), 1)[0]
            cols[i + j].append(pp)

    nl.stage_heights.append([len(c) for c in cols])
    while max(len(c) for c in cols) > 2:
        cols = _reduce_stage(nl, cols, region, spec)
        nl.stage_heights.append([len(c) for c in cols])

    nl.outputs = _ripple_cpa(nl, cols)
    nl.validate()
    return nl


def _reduce_stage(nl: Netlist, cols: list[list[int]], region: int,
                  spec: CompressorSpec | None) -> list[list[int]]:
    width2 = len(cols)
    nxt: list[list[int]] = [[] for _ in range(width2)]
    chain: list[int] = []  # couts from the previous column, weight = current c
    for c in range(width2):
        incoming, chain = chain, []
        bits = cols[c]
        if len(bits) <= 2:
            nxt[c].extend(bits)
            nxt[c].extend(incoming)
            continue
        approx = spec is not None and c < region
        idx = 0
        while len(bits) - idx >= 4:
            group = tuple(bits[idx:idx + 4])
            idx += 4
            if approx:
                s, cy = nl.add_gate(GateKind.C42A, group, 2, spec=spec)
            else:
                if incoming:
                    s, cy, co = nl.add_gate(GateKind.C42, group + (incoming.pop(0),), 3)
                else:
                    s, cy, co = nl.add_gate(GateKind.C42, group, 3)
                chain.append(co)
            nxt[c].append(s)
            if c + 1 < width2:
                nxt[c + 1].append(cy)
        rem = len(bits) - idx
        if rem == 3:
            s, cy = nl.add_gate(GateKind.FA, tuple(bits[idx:idx + 3]), 2)
            nxt[c].append(s)
            if c + 1 < width2:
                nxt[c + 1].append(cy)
        elif rem == 2:
            s, cy = nl.add_gate(GateKind.HA, tuple(bits[idx:idx + 2]), 2)
            nxt[c].append(s)
            if c + 1 < width2:
                nxt[c + 1].append(cy)
        elif rem == 1:
            nxt[c].append(bits[idx])
        nxt[c].extend(incoming)  # couts nobody chained stay at this weight
    # couts past the top column exceed the 2n product range and are dropped;
    # with exact cells they are identically 0 (the product fits 2n bits)
    return nxt


def _ripple_cpa(nl: Netlist, cols: list[list[int]]) -> list[int]:
    carry: int | None = None
    outs: list[int] = []
    for c in range(len(cols)):
        bits = list(cols[c])
        if carry is not None:
            bits.append(carry)
        carry = None
        if not bits:
            raise NetlistError(f"column {c} has no bits at the final adder")
        if len(bits) == 1:
            outs.append(bits[0])
        elif len(bits) == 2:
            s, carry = nl.add_gate(GateKind.HA, tuple(bits), 2)
            outs.append(s)
        else:
            s, carry = nl.add_gate(GateKind.FA, tuple(bits), 2)
            outs.append(s)
    return outs  # top carry has weight 2n and is identically 0; dropped


def signed_multiply(nl: Netlist, a: int, b: int) -> int:
    """Sign-magnitude product: netlist on magnitudes, sign reapplied."""
    lim = 1 << (nl.width - 1)
    if abs(a) >= lim or abs(b) >= lim:
        raise NetlistError(f"signed magnitudes must be below {lim}")
    p = evaluate_netlist(nl, abs(a), abs(b))
    return -p if (a < 0) != (b < 0) else p


class NetlistMultiplier:
    """Callable adapter over a netlist: scalar calls plus a batch path."""

    def __init__(self, netlist: Netlist):
        self.netlist = netlist
        self.width = netlist.width

    def __call__(self, a: int, b: int) -> int:
        return evaluate_netlist(self.netlist, a, b)

    def batch(self, a_vals, b_vals):
        return evaluate_batch(self.netlist, a_vals, b_vals)


def build_multiplier(cfg: MultiplierConfig) -> NetlistMultiplier:
    return NetlistMultiplier(build_multiplier_netlist(cfg))


class SignedMultiplier:
    """Sign-magnitude view over an unsigned multiplier adapter.

    Scalar calls take signed operands with magnitudes below
    2^(width-1).  batch stays on magnitudes (callers that square or
    otherwise know signs apply them outside).
    """

    def __init__(self, base):
        self.base = base
        self.width = base.width

    def __call__(self, a: int, b: int) -> int:
        lim = 1 << (self.width - 1)
        if abs(a) >= lim or abs(b) >= lim:
            raise NetlistError(f"signed magnitudes must be below {lim}")
        p = self.base(abs(a), abs(b))
        return -p if (a < 0) != (b < 0) else p

    def batch(self, a_vals, b_vals):
        return self.base.batch(a_vals, b_vals)


def gate_count_csv(entries) -> str:
    """CSV over (family, width, region, netlist-or-counts) rows.

    region is blank for families without an approximate region.
    """
    lines = ["family,width,region,kind,count"]
    for family, width, region, counts in entries:
        if isinstance(counts, Netlist):
            counts = gate_count(counts)
        reg = "" if region is None else str(region)
        for kind, count in counts.items():
            lines.append(f"{family},{width},{reg},{kind},{count}")
    return "\n".join(lines) + "\n"
