"""Deterministic Verilog emission.

Netlists are lowered to 2-input AND/OR/XOR/NOT primitives and printed as
one continuous assignment per gate, in topological order, with wire
names derived from the stable wire ids.  The logarithmic multiplier gets
a word-level structural module instead, mirroring its block diagram
(leading-one detectors, priority encoders, barrel shifters, comparator,
adders).  Everything here is a pure function of its inputs: emitting the
same design twice yields byte-identical text and digests.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

from .logmult import LogMultiplier, build_log_netlist
from .multiplier import MultiplierConfig, build_multiplier_netlist
from .netlist import Gate, GateKind, Netlist, evaluate_netlist
from .sram import SramConfig

# IEEE 1364-2005 keywords that may not be used as module names
RESERVED_WORDS = frozenset("""
always and assign automatic begin buf bufif0 bufif1 case casex casez cell
cmos config deassign default defparam design disable edge else end endcase
endconfig endfunction endgenerate endmodule endprimitive endspecify endtable
endtask event for force forever fork function generate genvar highz0 highz1
if ifnone incdir include initial inout input instance integer join large
liblist library localparam macromodule medium module nand negedge nmos nor
noshowcancelled not notif0 notif1 or output parameter pmos posedge primitive
pull0 pull1 pulldown pullup pulsestyle_ondetect pulsestyle_onevent rcmos
real realtime reg release repeat rnmos rpmos rtran rtranif0 rtranif1
scalared showcancelled signed small specify specparam strong0 strong1 supply0
supply1 table task time tran tranif0 tranif1 tri tri0 tri1 triand trior
trireg unsigned use uwire vectored wait wand weak0 weak1 while wire wor xnor
xor
""".split())

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class RtlError(ValueError):
    pass


def _check_module_name(name: str) -> None:
    if not _IDENT.match(name):
        raise RtlError(f"module name {name!r} is not a Verilog identifier")
    if name in RESERVED_WORDS:
        raise RtlError(f"module name {name!r} is a Verilog reserved word")


@dataclass(frozen=True)
class RtlArtifact:
    """Emitted module text plus its interface and content digest."""

    module_name: str
    ports: tuple[tuple[str, str, int], ...]  # (name, direction, width)
    body: str
    digest: str

    @staticmethod
    def _make(module_name: str, ports, body: str) -> "RtlArtifact":
        digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
        return RtlArtifact(module_name, tuple(ports), body, digest)


def default_module_name(cfg: MultiplierConfig) -> str:
    if cfg.family == "exact":
        return f"mult_exact_w{cfg.width}"
    if cfg.family == "approx4-2":
        comp = re.sub(r"[^a-z0-9_]", "_", cfg.compressor.lower())
        return f"mult_approx42_{comp}_w{cfg.width}_r{cfg.approx_region}"
    variant = "comp" if cfg.compensation else "mitchell"
    return f"mult_log_{variant}_w{cfg.width}"


# ---------------------------------------------------------------------------
# cell lowering

_PRIMITIVES = (GateKind.INPUT, GateKind.AND, GateKind.OR, GateKind.XOR,
               GateKind.NOT)


def lower_netlist(nl: Netlist) -> Netlist:
    """Expand HA/FA/compressor cells into 2-input primitives.

    Original wire ids keep their meaning; intermediate wires are
    allocated past the source netlist's id range.  Approximate
    compressors become a shared-minterm sum of products over their
    truth tables.
    """
    out = Netlist(width=nl.width)
    out.n_wires = nl.n_wires
    out.a_wires = list(nl.a_wires)
    out.b_wires = list(nl.b_wires)
    out.outputs = list(nl.outputs)
    out.stage_heights = [list(h) for h in nl.stage_heights]

    def emit(kind: GateKind, ins, outs) -> None:
        out.gates.append(Gate(len(out.gates), kind, tuple(ins), tuple(outs)))

    def fresh(kind: GateKind, *ins: int) -> int:
        w = out.new_wire()
        emit(kind, ins, (w,))
        return w

    def tree_into(kind: GateKind, wires: list[int], target: int) -> None:
        ws = list(wires)
        if len(ws) == 1:
            ws.append(ws[0])  # OR/AND of a wire with itself is the wire
        while len(ws) > 2:
            ws = [fresh(kind, ws[i], ws[i + 1]) if i + 1 < len(ws) else ws[i]
                  for i in range(0, len(ws), 2)]
        emit(kind, (ws[0], ws[1]), (target,))

    for g in nl.gates:
        if g.kind in _PRIMITIVES:
            emit(g.kind, g.inputs, g.outputs)
        elif g.kind is GateKind.HA:
            a, b = g.inputs
            emit(GateKind.XOR, (a, b), (g.outputs[0],))
            emit(GateKind.AND, (a, b), (g.outputs[1],))
        elif g.kind is GateKind.FA:
            a, b, cin = g.inputs
            t = fresh(GateKind.XOR, a, b)
            emit(GateKind.XOR, (t, cin), (g.outputs[0],))
            g1 = fresh(GateKind.AND, a, b)
            g2 = fresh(GateKind.AND, t, cin)
            emit(GateKind.OR, (g1, g2), (g.outputs[1],))
        elif g.kind is GateKind.C42:
            x1, x2, x3, x4 = g.inputs[:4]
            s, carry, cout = g.outputs
            t12 = fresh(GateKind.XOR, x1, x2)
            s1 = fresh(GateKind.XOR, t12, x3)
            a1 = fresh(GateKind.AND, x1, x2)
            a2 = fresh(GateKind.AND, t12, x3)
            emit(GateKind.OR, (a1, a2), (cout,))
            if len(g.inputs) == 5:
                cin = g.inputs[4]
                t = fresh(GateKind.XOR, s1, x4)
                emit(GateKind.XOR, (t, cin), (s,))
                b1 = fresh(GateKind.AND, s1, x4)
                b2 = fresh(GateKind.AND, t, cin)
                emit(GateKind.OR, (b1, b2), (carry,))
            else:
                emit(GateKind.XOR, (s1, x4), (s,))
                emit(GateKind.AND, (s1, x4), (carry,))
        elif g.kind is GateKind.C42A:
            xs = list(g.inputs)
            nxs: list[int | None] = [None] * 4
            minterms: dict[int, int] = {}
            s_terms: list[int] = []
            c_terms: list[int] = []
            for p, (sb, cb) in sorted(g.spec.table.items()):
                if not (sb or cb):
                    continue
                if p not in minterms:
                    lits = []
                    for i in range(4):
                        if (p >> (3 - i)) & 1:
                            lits.append(xs[i])
                        else:
                            if nxs[i] is None:
                                nxs[i] = fresh(GateKind.NOT, xs[i])
                            lits.append(nxs[i])
                    m12 = fresh(GateKind.AND, lits[0], lits[1])
                    m34 = fresh(GateKind.AND, lits[2], lits[3])
                    minterms[p] = fresh(GateKind.AND, m12, m34)
                if sb:
                    s_terms.append(minterms[p])
                if cb:
                    c_terms.append(minterms[p])
            for terms, target in ((s_terms, g.outputs[0]), (c_terms, g.outputs[1])):
                if terms:
                    tree_into(GateKind.OR, terms, target)
                else:
                    emit(GateKind.XOR, (xs[0], xs[0]), (target,))  # constant 0
        else:
            raise RtlError(f"cannot lower gate kind {g.kind}")
    out.validate()
    return out


# ---------------------------------------------------------------------------
# netlist emission

def emit_verilog(nl: Netlist, module_name: str,
                 registered_io: bool = False) -> RtlArtifact:
    """Combinational module for a netlist, one assign per lowered gate.

    With registered_io a second module named <module_name>_reg is
    appended wrapping the combinational core with input and output
    registers; the artifact's port list always describes the core.
    """
    _check_module_name(module_name)
    low = lower_netlist(nl)
    n = low.width
    a_pos = {w: i for i, w in enumerate(low.a_wires)}
    b_pos = {w: i for i, w in enumerate(low.b_wires)}

    lines = [
        f"// {n}x{n} unsigned multiplier, combinational, generated from a gate netlist",
        f"module {module_name} (",
        f"  input wire [{n - 1}:0] a,",
        f"  input wire [{n - 1}:0] b,",
        f"  output wire [{2 * n - 1}:0] p",
        ");",
    ]
    for w in range(low.n_wires):
        lines.append(f"  wire w{w};")
    for g in low.gates:
        o = g.outputs[0]
        if g.kind is GateKind.INPUT:
            src = f"a[{a_pos[o]}]" if o in a_pos else f"b[{b_pos[o]}]"
            lines.append(f"  assign w{o} = {src};")
        elif g.kind is GateKind.NOT:
            lines.append(f"  assign w{o} = ~w{g.inputs[0]};")
        else:
            op = {GateKind.AND: "&", GateKind.OR: "|", GateKind.XOR: "^"}[g.kind]
            lines.append(f"  assign w{o} = w{g.inputs[0]} {op} w{g.inputs[1]};")
    for i, w in enumerate(low.outputs):
        lines.append(f"  assign p[{i}] = w{w};")
    lines.append("endmodule")
    if registered_io:
        lines += [
            "",
            f"module {module_name}_reg (",
            "  input wire clk,",
            f"  input wire [{n - 1}:0] a,",
            f"  input wire [{n - 1}:0] b,",
            f"  output reg [{2 * n - 1}:0] p",
            ");",
            f"  reg [{n - 1}:0] a_q;",
            f"  reg [{n - 1}:0] b_q;",
            f"  wire [{2 * n - 1}:0] p_w;",
            f"  {module_name} core (.a(a_q), .b(b_q), .p(p_w));",
            "  always @(posedge clk) begin",
            "    a_q <= a;",
            "    b_q <= b;",
            "    p <= p_w;",
            "  end",
            "endmodule",
        ]
    body = "\n".join(lines) + "\n"
    ports = (("a", "input", n), ("b", "input", n), ("p", "output", 2 * n))
    return RtlArtifact._make(module_name, ports, body)


# ---------------------------------------------------------------------------
# structural logarithmic multiplier

def _lod_module(w: int) -> list[str]:
    """Leading-one detector: downward smear, then keep the top set bit."""
    lines = [
        f"module lod_u{w} (",
        f"  input wire [{w - 1}:0] x,",
        f"  output wire [{w - 1}:0] y",
        ");",
    ]
    prev = "x"
    step = 1
    idx = 0
    while step < w:
        lines.append(f"  wire [{w - 1}:0] s{idx};")
        lines.append(f"  assign s{idx} = {prev} | ({prev} >> {step});")
        prev = f"s{idx}"
        step *= 2
        idx += 1
    lines.append(f"  assign y = {prev} ^ ({prev} >> 1);")
    lines.append("endmodule")
    return lines


def _penc_module(w: int, k: int) -> list[str]:
    """Priority encoder over a one-hot input: OR of masked positions."""
    lines = [
        f"module penc_u{w}_o{k} (",
        f"  input wire [{w - 1}:0] x,",
        f"  output wire [{k - 1}:0] k",
        ");",
    ]
    for j in range(k):
        mask = sum(1 << i for i in range(w) if (i >> j) & 1)
        lines.append(f"  assign k[{j}] = |(x & {w}'d{mask});")
    lines.append("endmodule")
    return lines


def _bshl_module(dw: int, sw: int, ow: int) -> list[str]:
    return [
        f"module bshl_u{dw}_s{sw}_o{ow} (",
        f"  input wire [{dw - 1}:0] x,",
        f"  input wire [{sw - 1}:0] s,",
        f"  output wire [{ow - 1}:0] y",
        ");",
        "  assign y = x << s;",
        "endmodule",
    ]


def _add_module(w: int) -> list[str]:
    return [
        f"module add_u{w} (",
        f"  input wire [{w - 1}:0] x,",
        f"  input wire [{w - 1}:0] y,",
        f"  output wire [{w}:0] s",
        ");",
        "  assign s = x + y;",
        "endmodule",
    ]


def _cmpge_module(w: int) -> list[str]:
    return [
        f"module cmpge_u{w} (",
        f"  input wire [{w - 1}:0] x,",
        f"  input wire [{w - 1}:0] y,",
        "  output wire ge",
        ");",
        "  assign ge = x >= y;",
        "endmodule",
    ]


def emit_log_mult_rtl(cfg: MultiplierConfig) -> RtlArtifact:
    """Word-level structural RTL of the logarithmic multiplier.

    The top module wires named sub-blocks: lod_a/lod_b (leading-one
    detectors), enc_a/enc_b (priority encoders), adder1 (exponent sum),
    bsh_a/bsh_b (residue alignment shifters) and adder2/adder3 (product
    accumulation).  The compensated variant adds the residue comparator
    comp, a third detector/encoder pair for the rounding unit, and the
    compensation shifter, merged into the power term by a carry-free OR.
    Leading-one removal is a plain XOR.  All widths are baked in, so the
    same template scales with the configured operand width.
    """
    if cfg.family != "logarithmic":
        raise RtlError(f"structural log RTL needs family 'logarithmic', got {cfg.family!r}")
    n = cfg.width
    if n < 3:
        raise RtlError(f"structural log RTL supports widths >= 3, got {n}")
    comp_on = bool(cfg.compensation)
    name = default_module_name(cfg)
    t = (n - 1).bit_length()
    r = n - 1                      # residue width after leading-one removal
    u = max(n - 2, 1).bit_length()  # rounding-exponent width
    ow = 2 * n - 2                 # shifted-residue width

    header = [
        f"// {n}x{n} logarithmic multiplier"
        + (" with rounded residue compensation" if comp_on else " (uncompensated)"),
    ]
    sub: list[str] = []
    sub += _lod_module(n)
    sub += _penc_module(n, t)
    sub += [""]
    if comp_on:
        # rounding unit works on the r = n-1 bit residues, never width n
        sub += _lod_module(r)
        sub += _penc_module(r, u)
        sub += _cmpge_module(r)
        sub += [""]
    # one shifter definition serves bsh_a, bsh_b and the compensation shift
    sub += _bshl_module(r, t, ow)
    sub += _add_module(t)
    sub += _add_module(2 * n - 1)
    sub += _add_module(2 * n)

    top = [
        "",
        f"module {name} (",
        f"  input wire [{n - 1}:0] a,",
        f"  input wire [{n - 1}:0] b,",
        f"  output wire [{2 * n - 1}:0] p",
        ");",
        f"  wire [{n - 1}:0] la;",
        f"  wire [{n - 1}:0] lb;",
        f"  wire [{t - 1}:0] ka;",
        f"  wire [{t - 1}:0] kb;",
        f"  wire [{r - 1}:0] qa;",
        f"  wire [{r - 1}:0] qb;",
        f"  wire [{t}:0] ksum;",
        f"  wire [{2 * n - 2}:0] pw;",
        f"  wire [{2 * n - 2}:0] merged;",
        f"  wire [{ow - 1}:0] qa_sh;",
        f"  wire [{ow - 1}:0] qb_sh;",
        f"  wire [{2 * n - 1}:0] sum1;",
        f"  wire [{2 * n}:0] sum2;",
        f"  lod_u{n} lod_a (.x(a), .y(la));",
        f"  lod_u{n} lod_b (.x(b), .y(lb));",
        f"  penc_u{n}_o{t} enc_a (.x(la), .k(ka));",
        f"  penc_u{n}_o{t} enc_b (.x(lb), .k(kb));",
        f"  assign qa = a[{r - 1}:0] ^ la[{r - 1}:0];",
        f"  assign qb = b[{r - 1}:0] ^ lb[{r - 1}:0];",
        f"  add_u{t} adder1 (.x(ka), .y(kb), .s(ksum));",
        f"  assign pw = {2 * n - 1}'d1 << ksum;",
    ]
    if comp_on:
        top += [
            "  wire ge;",
            f"  wire [{r - 1}:0] ql;",
            f"  wire [{r - 1}:0] qs;",
            f"  wire [{r - 1}:0] ll;",
            f"  wire [{u - 1}:0] mm;",
            "  wire up;",
            f"  wire [{t - 1}:0] sh;",
            f"  wire [{ow - 1}:0] comp_sh;",
            f"  wire [{ow - 1}:0] comp_q;",
            f"  cmpge_u{r} comp (.x(qa), .y(qb), .ge(ge));",
            "  assign ql = ge ? qa : qb;",
            "  assign qs = ge ? qb : qa;",
            f"  lod_u{r} lod_l (.x(ql), .y(ll));",
            f"  penc_u{r}_o{u} enc_l (.x(ll), .k(mm));",
        ]
        if r >= 2:
            top.append(f"  assign up = |(ll[{r - 1}:1] & ql[{r - 2}:0]);")
        else:
            top.append("  assign up = 1'b0;")
        top += [
            "  assign sh = mm + up;",
            f"  bshl_u{r}_s{t}_o{ow} bsh_c (.x(qs), .s(sh), .y(comp_sh));",
            f"  assign comp_q = (|ql) ? comp_sh : {ow}'d0;",
            "  assign merged = pw | {1'b0, comp_q};",
        ]
    else:
        top.append("  assign merged = pw;")
    top += [
        f"  bshl_u{r}_s{t}_o{ow} bsh_a (.x(qa), .s(kb), .y(qa_sh));",
        f"  bshl_u{r}_s{t}_o{ow} bsh_b (.x(qb), .s(ka), .y(qb_sh));",
        f"  add_u{2 * n - 1} adder2 (.x(merged), .y({{1'b0, qa_sh}}), .s(sum1));",
        f"  add_u{2 * n} adder3 (.x(sum1), .y({{2'd0, qb_sh}}), .s(sum2));",
        f"  assign p = ((|a) & (|b)) ? sum2[{2 * n - 1}:0] : {2 * n}'d0;",
        "endmodule",
    ]
    body = "\n".join(header + sub + top) + "\n"
    ports = (("a", "input", n), ("b", "input", n), ("p", "output", 2 * n))
    return RtlArtifact._make(name, ports, body)


# ---------------------------------------------------------------------------
# testbench

def emit_testbench(source, vectors, module_name: str | None = None) -> str:
    """Self-checking bench for a netlist or multiplier configuration.

    Expected products are computed here at emission time, so the bench
    carries its own golden values.  Duplicate vectors are applied as
    given; an empty vector list is an error.
    """
    vecs = [(int(a), int(b)) for a, b in vectors]
    if not vecs:
        raise RtlError("testbench needs at least one vector")
    if isinstance(source, MultiplierConfig):
        if source.family == "logarithmic":
            model = LogMultiplier(source.width, source.compensation)
            n = source.width
            golden = model
        else:
            nl = build_multiplier_netlist(source)
            n = nl.width
            golden = lambda a, b: evaluate_netlist(nl, a, b)
        name = module_name or default_module_name(source)
    elif isinstance(source, Netlist):
        if module_name is None:
            raise RtlError("module_name is required when passing a bare netlist")
        n = source.width
        golden = lambda a, b: evaluate_netlist(source, a, b)
        name = module_name
    else:
        raise RtlError(f"expected a Netlist or MultiplierConfig, got {type(source).__name__}")
    _check_module_name(name)
    for a, b in vecs:
        if not (0 <= a < (1 << n) and 0 <= b < (1 << n)):
            raise RtlError(f"vector ({a}, {b}) does not fit {n} bits")

    lines = [
        f"// self-checking bench for {name}: {len(vecs)} vectors, golden values baked in",
        "`timescale 1ns/1ps",
        f"module {name}_tb;",
        f"  reg [{n - 1}:0] a;",
        f"  reg [{n - 1}:0] b;",
        f"  wire [{2 * n - 1}:0] p;",
        "  integer errors;",
        "  integer checks;",
        f"  {name} dut (.a(a), .b(b), .p(p));",
        f"  task check(input [{n - 1}:0] av, input [{n - 1}:0] bv, input [{2 * n - 1}:0] want);",
        "    begin",
        "      a = av; b = bv; #1;",
        "      checks = checks + 1;",
        "      if (p !== want) begin",
        "        errors = errors + 1;",
        '        $display("MISMATCH a=%0d b=%0d p=%0d want=%0d", av, bv, p, want);',
        "      end",
        "    end",
        "  endtask",
        "  initial begin",
        "    errors = 0;",
        "    checks = 0;",
    ]
    for a, b in vecs:
        want = golden(a, b)
        lines.append(f"    check({n}'d{a}, {n}'d{b}, {2 * n}'d{int(want)});")
    lines += [
        '    $display("%0d/%0d checks passed", checks - errors, checks);',
        '    if (errors == 0) $display("PASS"); else $display("FAIL");',
        "    $finish;",
        "  end",
        "endmodule",
    ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# processing element wrapper

def emit_pe_rtl(sram_cfg: SramConfig, mult: RtlArtifact,
                module_name: str = "pe_top",
                registered_output: bool = False) -> RtlArtifact:
    """Processing element: one memory read and one multiply per cycle.

    A read cycle (ce high, we low) latches mem[addr]; the instantiated
    combinational multiplier forms latched_word * operand.  A write
    cycle (ce and we high) updates the array instead.  The multiplier
    module itself is not inlined; link its emitted file alongside.
    """
    _check_module_name(module_name)
    mult_ports = {p[0]: p for p in mult.ports}
    mw = mult_ports["a"][2]
    if mw != sram_cfg.word_width:
        raise RtlError(
            f"multiplier width {mw} does not match sram word_width {sram_cfg.word_width}")
    abits = sram_cfg.addr_bits
    cap = sram_cfg.capacity_words
    pw = 2 * mw
    prod_decl = "output reg" if registered_output else "output wire"
    lines = [
        f"// processing element wrapping {mult.module_name}: one read, one multiply per cycle",
        f"module {module_name} (",
        "  input wire clk,",
        "  input wire we,",
        "  input wire ce,",
        f"  input wire [{abits - 1}:0] addr,",
        f"  input wire [{mw - 1}:0] din,",
        f"  input wire [{mw - 1}:0] operand,",
        f"  {prod_decl} [{pw - 1}:0] product",
        ");",
        f"  reg [{mw - 1}:0] mem [0:{cap - 1}];",
        f"  reg [{mw - 1}:0] word_q;",
        f"  wire [{pw - 1}:0] product_w;",
        "  always @(posedge clk) begin",
        "    if (ce & we) mem[addr] <= din;",
        "    if (ce & ~we) word_q <= mem[addr];",
        "  end",
        f"  {mult.module_name} mult (.a(word_q), .b(operand), .p(product_w));",
    ]
    if registered_output:
        lines += [
            "  always @(posedge clk) begin",
            "    product <= product_w;",
            "  end",
        ]
    else:
        lines.append("  assign product = product_w;")
    lines.append("endmodule")
    body = "\n".join(lines) + "\n"
    ports = (
        ("clk", "input", 1), ("we", "input", 1), ("ce", "input", 1),
        ("addr", "input", abits), ("din", "input", mw),
        ("operand", "input", mw), ("product", "output", pw),
    )
    return RtlArtifact._make(module_name, ports, body)


# ---------------------------------------------------------------------------
# flow-script stubs

@dataclass(frozen=True)
class FlowFile:
    filename: str
    text: str


def _tcl_list(paths) -> str:
    return "{" + " ".join(paths) + "}"


def emit_flow_scripts(design_name: str, rtl_files, lef_files, lib_files,
                      clock_ns: float = 2.0) -> dict[str, FlowFile]:
    """Backend stub scripts: config, constraints, flow.

    All file references stay relative so the set can be copied anywhere
    next to the emitted artifacts.  Running the flow is out of scope;
    the stubs document the intended handoff.
    """
    _check_module_name(design_name)
    rtl = [str(f) for f in rtl_files]
    lef = [str(f) for f in lef_files]
    lib = [str(f) for f in lib_files]
    if not rtl:
        raise RtlError("flow scripts need at least one RTL file")
    for f in rtl + lef + lib:
        if f.startswith("/") or re.match(r"[A-Za-z]:[\\/]", f):
            raise RtlError(f"flow scripts take relative paths only, got {f!r}")
    config = "\n".join([
        "# generated backend configuration; paths are relative to this file",
        f"set DESIGN_NAME {design_name}",
        f"set RTL_FILES {_tcl_list(rtl)}",
        "set SDC_FILE constraints.sdc",
        f"set LEF_FILES {_tcl_list(lef)}",
        f"set LIB_FILES {_tcl_list(lib)}",
        f"set CLOCK_PERIOD_NS {clock_ns!r}",
    ]) + "\n"
    constraints = "\n".join([
        f"# timing constraints for {design_name}",
        f"create_clock -name core_clk -period {clock_ns!r} [get_ports clk]",
        f"create_clock -name virt_clk -period {clock_ns!r}",
        "set_input_delay -clock virt_clk 0.2 [all_inputs]",
        "set_output_delay -clock virt_clk 0.2 [all_outputs]",
    ]) + "\n"
    flow = "\n".join([
        "# minimal backend recipe: read views, link, constrain",
        "source config.tcl",
        "foreach f $LEF_FILES { read_lef $f }",
        "foreach f $LIB_FILES { read_liberty $f }",
        "foreach f $RTL_FILES { read_verilog $f }",
        "link_design $DESIGN_NAME",
        "read_sdc $SDC_FILE",
        "# synthesis, placement, clock tree and routing steps attach here;",
        "# executing them is outside this toolkit",
    ]) + "\n"
    return {
        "config": FlowFile("config.tcl", config),
        "constraints": FlowFile("constraints.sdc", constraints),
        "flow": FlowFile("flow.tcl", flow),
    }
