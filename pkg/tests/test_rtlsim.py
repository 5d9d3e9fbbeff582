"""Micro-interpreter for the emitted combinational Verilog subset."""
import itertools

import numpy as np
import pytest

from apxcim.logmult import LogMultiplier, build_log_netlist
from apxcim.multiplier import MultiplierConfig, build_multiplier_netlist
from apxcim.netlist import evaluate_batch, evaluate_netlist
from apxcim.rtl import emit_log_mult_rtl, emit_testbench, emit_verilog
from apxcim.rtlsim import RtlSimError, VerilogInterpreter, run_vectors


def test_netlist_rtl_exhaustive_w4():
    nl = build_multiplier_netlist(MultiplierConfig(4, "exact"))
    sim = VerilogInterpreter(emit_verilog(nl, "m4").body, "m4")
    for a, b in itertools.product(range(16), repeat=2):
        assert sim(a=a, b=b)["p"] == a * b


def test_netlist_rtl_sampled_w8_approx():
    nl = build_multiplier_netlist(MultiplierConfig(8, "approx4-2"))
    sim = VerilogInterpreter(emit_verilog(nl, "m8a").body, "m8a")
    rng = np.random.default_rng(4)
    for _ in range(300):
        a, b = int(rng.integers(0, 256)), int(rng.integers(0, 256))
        assert sim(a=a, b=b)["p"] == evaluate_netlist(nl, a, b)


@pytest.mark.parametrize("compensation", [True, False])
def test_log_rtl_matches_behavioral_model(compensation):
    cfg = MultiplierConfig(8, "logarithmic", compensation=compensation)
    art = emit_log_mult_rtl(cfg)
    sim = VerilogInterpreter(art.body, top=art.module_name)
    model = LogMultiplier(8, compensation)
    rng = np.random.default_rng(6)
    pairs = [(0, 0), (0, 255), (255, 0), (1, 1), (255, 255), (128, 128)]
    pairs += [(int(rng.integers(0, 256)), int(rng.integers(0, 256)))
              for _ in range(400)]
    for a, b in pairs:
        assert sim(a=a, b=b)["p"] == model(a, b), (a, b)


def test_log_rtl_matches_its_own_netlist():
    cfg = MultiplierConfig(6, "logarithmic")
    art = emit_log_mult_rtl(cfg)
    nl = build_log_netlist(6, compensation=True)
    sim = VerilogInterpreter(art.body, top=art.module_name)
    for a, b in itertools.product(range(0, 64, 3), repeat=2):
        assert sim(a=a, b=b)["p"] == evaluate_netlist(nl, a, b)


def test_run_vectors_helper():
    nl = build_multiplier_netlist(MultiplierConfig(4, "exact"))
    body = emit_verilog(nl, "m4").body
    outs = run_vectors(body, "m4", [{"a": 3, "b": 5}, {"a": 15, "b": 15}])
    assert [o["p"] for o in outs] == [15, 225]


def test_interpreter_skips_unused_modules():
    # a testbench with unsupported constructs shares the file; picking
    # the dut as top must not try to parse the bench
    cfg = MultiplierConfig(4, "exact")
    nl = build_multiplier_netlist(cfg)
    art = emit_verilog(nl, "mult_exact_w4", registered_io=True)
    text = art.body + "\n" + emit_testbench(cfg, [(1, 2)])
    sim = VerilogInterpreter(text, top="mult_exact_w4")
    assert sim(a=7, b=9)["p"] == 63
    with pytest.raises(RtlSimError, match="outside the combinational subset"):
        VerilogInterpreter(text, top="mult_exact_w4_reg")


def test_interpreter_input_validation():
    nl = build_multiplier_netlist(MultiplierConfig(4, "exact"))
    sim = VerilogInterpreter(emit_verilog(nl, "m4").body, "m4")
    with pytest.raises(RtlSimError, match="does not fit"):
        sim(a=16, b=0)
    with pytest.raises(RtlSimError, match="missing value for input"):
        sim(a=1)
    with pytest.raises(RtlSimError, match="unknown inputs"):
        sim(a=1, b=2, c=3)


def test_interpreter_expression_semantics():
    text = "\n".join([
        "module expr (",
        "  input wire [3:0] x,",
        "  input wire [3:0] y,",
        "  output wire [7:0] o1,",
        "  output wire [7:0] o2,",
        "  output wire o3,",
        "  output wire [4:0] o4",
        ");",
        "  assign o1 = (x + y) << 1;",
        "  assign o2 = {y, x};",
        "  assign o3 = (x >= y) ? |x : &y;",
        "  assign o4 = x + (y ^ 4'd3);",
        "endmodule",
    ])
    sim = VerilogInterpreter(text, "expr")
    out = sim(x=9, y=6)
    assert out["o1"] == ((9 + 6) << 1) & 0xFF
    assert out["o2"] == (6 << 4) | 9
    assert out["o3"] == 1
    assert out["o4"] == 9 + (6 ^ 3)
    out = sim(x=3, y=15)
    assert out["o3"] == 1  # &y over 4 set bits
    assert sim(x=3, y=14)["o3"] == 0


def test_interpreter_width_truncation_on_assign():
    text = "\n".join([
        "module t (",
        "  input wire [3:0] x,",
        "  output wire [2:0] o",
        ");",
        "  assign o = x + 4'd15;",
        "endmodule",
    ])
    sim = VerilogInterpreter(text, "t")
    assert sim(x=9)["o"] == (9 + 15) & 0b111


@pytest.mark.parametrize("snippet, fragment", [
    ("always @(posedge clk) begin end", "outside the combinational subset"),
    ("initial begin end", "outside the combinational subset"),
    ("reg [3:0] r;", "outside the combinational subset"),
])
def test_interpreter_rejects_sequential_constructs(snippet, fragment):
    text = f"module bad (\n  input wire clk,\n  output wire o\n);\n  {snippet}\n  assign o = clk;\nendmodule"
    with pytest.raises(RtlSimError, match=fragment):
        VerilogInterpreter(text, "bad")


def test_interpreter_rejects_bad_nets():
    undriven = "module u (\n  input wire x,\n  output wire o\n);\n  wire q;\n  assign o = x & q;\nendmodule"
    with pytest.raises(RtlSimError, match="not fully driven"):
        VerilogInterpreter(undriven, "u")
    doubled = ("module d (\n  input wire x,\n  output wire o\n);\n"
               "  assign o = x;\n  assign o = ~x;\nendmodule")
    with pytest.raises(RtlSimError, match="driver"):
        VerilogInterpreter(doubled, "d")


def test_interpreter_rejects_x_and_overflow_literals():
    xlit = "module m (\n  output wire o\n);\n  assign o = 1'bx;\nendmodule"
    with pytest.raises(RtlSimError, match="x/z"):
        VerilogInterpreter(xlit, "m")
    over = "module m (\n  output wire [1:0] o\n);\n  assign o = 2'd9;\nendmodule"
    with pytest.raises(RtlSimError, match="overflow|fit"):
        VerilogInterpreter(over, "m")


def test_interpreter_unknown_top():
    nl = build_multiplier_netlist(MultiplierConfig(4, "exact"))
    with pytest.raises(RtlSimError, match="ghost"):
        VerilogInterpreter(emit_verilog(nl, "m4").body, top="ghost")
