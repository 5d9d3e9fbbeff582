"""Behavioral SRAM macro: banked, subarrayed array with abstract views.

The model is word-addressed and cycle-atomic: one read or write per
call, no bitline/sense timing simulated.  Timing knobs (sense-amp
enable offset, precharge ticks) ride along in the config and are echoed
into the LIB comment header only.

Addresses decompose high-to-low as bank, subarray, row, mux column:
    addr = ((bank * subarrays + subarray) * rows + row) * mux_ratio + mux

Area and access-time figures for the LEF/LIB views come from the
analytic constants below.  They are NOT calibrated to any silicon
process; they exist to give the views plausible, deterministic numbers
with the right scaling shape (area linear in bits, delay affine in
rows).
"""
from __future__ import annotations

from dataclasses import dataclass, field

# analytic view constants (arbitrary units: um, ns, mW) - non-calibrated
CELL_WIDTH_UM = 0.6
CELL_HEIGHT_UM = 0.8
PERIPHERY_OVERHEAD = 0.25      # fraction added to each dimension
ACCESS_BASE_NS = 0.35
ACCESS_PER_ROW_NS = 0.004
LEAKAGE_PER_BIT_MW = 2.0e-6
PIN_PITCH_UM = 1.2


class SramConfigError(ValueError):
    pass


class SramAccessError(ValueError):
    pass


@dataclass(frozen=True)
class SramConfig:
    rows: int
    cols: int
    word_width: int
    banks: int = 1
    subarrays: int = 1
    mux_ratio: int = 1
    sae_offset: int = 1      # abstract ticks, echoed in views only
    precharge: int = 1

    def __post_init__(self) -> None:
        for name in ("rows", "cols", "word_width", "banks", "subarrays", "mux_ratio"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise SramConfigError(f"{name} must be a positive integer, got {v!r}")
        for name in ("sae_offset", "precharge"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise SramConfigError(f"{name} must be a non-negative integer, got {v!r}")
        if self.cols != self.word_width * self.mux_ratio:
            raise SramConfigError(
                f"cols must equal word_width*mux_ratio "
                f"({self.word_width}*{self.mux_ratio}={self.word_width * self.mux_ratio}), "
                f"got cols={self.cols}")

    @property
    def capacity_words(self) -> int:
        return self.rows * self.mux_ratio * self.banks * self.subarrays

    @property
    def addr_bits(self) -> int:
        return max(1, (self.capacity_words - 1).bit_length())

    @property
    def macro_name(self) -> str:
        return (f"sram_{self.banks}b{self.subarrays}s_"
                f"{self.rows}x{self.cols}_w{self.word_width}m{self.mux_ratio}")


def decompose_address(cfg: SramConfig, addr: int) -> tuple[int, int, int, int]:
    """addr -> (bank, subarray, row, mux), high-to-low significance."""
    if not 0 <= addr < cfg.capacity_words:
        raise SramAccessError(
            f"address {addr} outside [0, {cfg.capacity_words})")
    mux = addr % cfg.mux_ratio
    rest = addr // cfg.mux_ratio
    row = rest % cfg.rows
    rest //= cfg.rows
    sub = rest % cfg.subarrays
    bank = rest // cfg.subarrays
    return bank, sub, row, mux


def compose_address(cfg: SramConfig, bank: int, subarray: int, row: int, mux: int) -> int:
    for name, v, lim in (("bank", bank, cfg.banks), ("subarray", subarray, cfg.subarrays),
                         ("row", row, cfg.rows), ("mux", mux, cfg.mux_ratio)):
        if not 0 <= v < lim:
            raise SramAccessError(f"{name} {v} outside [0, {lim})")
    return ((bank * cfg.subarrays + subarray) * cfg.rows + row) * cfg.mux_ratio + mux


class SramModel:
    """Word-addressed storage with read/write counters and a trace."""

    def __init__(self, cfg: SramConfig, trace: bool = False):
        self.config = cfg
        self._words: dict[int, int] = {}  # absent key reads as 0
        self.reads = 0
        self.writes = 0
        self._trace: list[tuple[int, str, int, int]] | None = [] if trace else None

    def write(self, addr: int, word: int) -> None:
        cfg = self.config
        if not 0 <= addr < cfg.capacity_words:
            raise SramAccessError(f"address {addr} outside [0, {cfg.capacity_words})")
        if not 0 <= word < (1 << cfg.word_width):
            raise SramAccessError(f"word {word} does not fit {cfg.word_width} bits")
        self._words[addr] = word
        self.writes += 1
        if self._trace is not None:
            self._trace.append((self.reads + self.writes, "W", addr, word))

    def read(self, addr: int) -> int:
        cfg = self.config
        if not 0 <= addr < cfg.capacity_words:
            raise SramAccessError(f"address {addr} outside [0, {cfg.capacity_words})")
        word = self._words.get(addr, 0)
        self.reads += 1
        if self._trace is not None:
            self._trace.append((self.reads + self.writes, "R", addr, word))
        return word

    def trace_csv(self) -> str:
        if self._trace is None:
            raise SramAccessError("model was built without tracing")
        lines = ["cycle,op,addr,data"]
        lines += [f"{c},{op},{a},{d}" for c, op, a, d in self._trace]
        return "\n".join(lines) + "\n"


def sram_build(cfg: SramConfig, trace: bool = False) -> SramModel:
    return SramModel(cfg, trace=trace)


def pe_cycle(model: SramModel, addr: int, operand: int, mult) -> int:
    """One compute cycle: read the stored word, multiply by the operand."""
    return mult(model.read(addr), operand)


def macro_dimensions_um(cfg: SramConfig) -> tuple[float, float]:
    width = cfg.cols * cfg.banks * CELL_WIDTH_UM * (1 + PERIPHERY_OVERHEAD)
    height = cfg.rows * cfg.subarrays * CELL_HEIGHT_UM * (1 + PERIPHERY_OVERHEAD)
    return width, height


def access_delay_ns(cfg: SramConfig) -> float:
    return ACCESS_BASE_NS + ACCESS_PER_ROW_NS * cfg.rows


def _pins(cfg: SramConfig) -> list[tuple[str, str]]:
    pins = [("clk", "INPUT"), ("we", "INPUT"), ("ce", "INPUT")]
    pins += [(f"addr[{i}]", "INPUT") for i in range(cfg.addr_bits)]
    pins += [(f"din[{i}]", "INPUT") for i in range(cfg.word_width)]
    pins += [(f"dout[{i}]", "OUTPUT") for i in range(cfg.word_width)]
    return pins


def _lib_bus_type(name: str, width: int) -> str:
    return "\n".join([
        f"  type ({name}) {{",
        "    base_type : array;",
        "    data_type : bit;",
        f"    bit_width : {width};",
        f"    bit_from : {width - 1};",
        "    bit_to : 0;",
        "  }",
    ])


def emit_abstract_views(cfg: SramConfig) -> tuple[str, str]:
    """FakeRAM-style LEF abstract and LIB view, byte-deterministic."""
    width, height = macro_dimensions_um(cfg)
    delay = access_delay_ns(cfg)
    name = cfg.macro_name

    lef = [
        "VERSION 5.7 ;",
        "BUSBITCHARS \"[]\" ;",
        f"MACRO {name}",
        "  CLASS BLOCK ;",
        "  ORIGIN 0 0 ;",
        f"  SIZE {width:.3f} BY {height:.3f} ;",
        "  SYMMETRY X Y ;",
    ]
    for i, (pin, direction) in enumerate(_pins(cfg)):
        y = round(min((i + 1) * PIN_PITCH_UM, height), 3)
        lef += [
            f"  PIN {pin}",
            f"    DIRECTION {direction} ;",
            "    USE SIGNAL ;",
            "    PORT",
            "      LAYER M4 ;",
            f"      RECT 0.000 {y - 0.1:.3f} 0.200 {y:.3f} ;",
            "    END",
            f"  END {pin}",
        ]
    lef += [f"END {name}", ""]

    bits = cfg.capacity_words * cfg.word_width
    lib = [
        f"/* timing knobs: sae_offset={cfg.sae_offset} ticks, "
        f"precharge={cfg.precharge} ticks (behavioral model is cycle-atomic) */",
        f"library ({name}_lib) {{",
        "  delay_model : table_lookup;",
        "  time_unit : \"1ns\";",
        "  leakage_power_unit : \"1mW\";",
        _lib_bus_type(f"addr_{cfg.addr_bits}", cfg.addr_bits),
        _lib_bus_type(f"word_{cfg.word_width}", cfg.word_width),
        f"  cell ({name}) {{",
        f"    area : {width * height:.3f};",
        f"    cell_leakage_power : {bits * LEAKAGE_PER_BIT_MW:.6f};",
        "    pin (clk) {",
        "      direction : input;",
        "      clock : true;",
        "    }",
    ]
    for pin in ("we", "ce"):
        lib += [f"    pin ({pin}) {{", "      direction : input;", "    }"]
    lib += [
        f"    bus (addr) {{",
        f"      bus_type : addr_{cfg.addr_bits};",
        "      direction : input;",
        "    }",
        f"    bus (din) {{",
        f"      bus_type : word_{cfg.word_width};",
        "      direction : input;",
        "    }",
        f"    bus (dout) {{",
        f"      bus_type : word_{cfg.word_width};",
        "      direction : output;",
        "      timing () {",
        "        related_pin : \"clk\";",
        "        timing_type : rising_edge;",
        f"        cell_rise (scalar) {{ values (\"{delay:.4f}\"); }}",
        f"        cell_fall (scalar) {{ values (\"{delay:.4f}\"); }}",
        "      }",
        "    }",
        "  }",
        "}",
        "",
    ]
    return "\n".join(lef), "\n".join(lib)
