"""Bit-level arithmetic cells: half/full adders and 4-2 compressors.

The exact 4-2 compressor is realized as two cascaded full adders, which
gives the standard property that cout depends only on x1..x3 (never on
cin).  Approximate 4-2 compressors are pure 4-in/2-out truth tables with
no cin/cout, loaded from table files or taken from the built-in registry.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

Bit = int

_BITS = (0, 1)


class CompressorSpecError(ValueError):
    """Raised for malformed compressor table files or misuse of a spec."""


def half_adder(a: Bit, b: Bit) -> tuple[Bit, Bit]:
    """sum = a xor b, carry = a and b."""
    return a ^ b, a & b


def full_adder(a: Bit, b: Bit, cin: Bit) -> tuple[Bit, Bit]:
    """sum, carry with a + b + cin == sum + 2*carry."""
    t = a ^ b
    return t ^ cin, (a & b) | (t & cin)


def exact_compressor42(x1: Bit, x2: Bit, x3: Bit, x4: Bit, cin: Bit) -> tuple[Bit, Bit, Bit]:
    """Exact 4-2 compressor: x1+x2+x3+x4+cin == sum + 2*(carry + cout).

    cout is a function of x1..x3 only, so it can feed the next column's
    compressor within the same reduction stage without a ripple on cin.
    """
    s1, cout = full_adder(x1, x2, x3)
    s, carry = full_adder(s1, x4, cin)
    return s, carry, cout


def pattern_key(x1: Bit, x2: Bit, x3: Bit, x4: Bit) -> int:
    """Table index of an input pattern; x1 is the most significant digit."""
    return (x1 << 3) | (x2 << 2) | (x3 << 1) | x4


@dataclass(frozen=True)
class CompressorSpec:
    """A named 4-2 compressor cell, exact or an approximate truth table.

    ``table`` maps a 4-bit pattern key (see :func:`pattern_key`) to
    (sum, carry) and is present only for approximate specs.
    """

    name: str
    kind: str  # "exact" | "approximate"
    table: dict[int, tuple[Bit, Bit]] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("exact", "approximate"):
            raise CompressorSpecError(f"unknown compressor kind {self.kind!r}")
        if self.kind == "exact":
            if self.table:
                raise CompressorSpecError("exact spec carries no table")
            return
        if sorted(self.table) != list(range(16)):
            raise CompressorSpecError(
                f"approximate table must cover all 16 patterns, got {len(self.table)}")
        for p, (s, c) in self.table.items():
            if s not in _BITS or c not in _BITS:
                raise CompressorSpecError(f"non-bit output for pattern {p:04b}")

    def error_distance(self, x1: Bit, x2: Bit, x3: Bit, x4: Bit) -> int:
        """|popcount - (sum + 2*carry)| of this cell on one input pattern."""
        s, c = self.table[pattern_key(x1, x2, x3, x4)]
        return abs((x1 + x2 + x3 + x4) - (s + 2 * c))

    def to_text(self) -> str:
        """Serialize to the 16-line table format (inverse of the loader)."""
        lines = [f"# compressor: {self.name}"]
        for p in range(16):
            s, c = self.table[p]
            lines.append(f"{p:04b} {s} {c}")
        return "\n".join(lines) + "\n"


def approx_compressor42(spec: CompressorSpec, x1: Bit, x2: Bit, x3: Bit, x4: Bit) -> tuple[Bit, Bit]:
    """Table lookup for an approximate 4-2 cell (no cin/cout)."""
    if spec.kind != "approximate":
        raise CompressorSpecError(
            f"spec {spec.name!r} is exact; use exact_compressor42")
    return spec.table[pattern_key(x1, x2, x3, x4)]


def load_compressor_spec(text: str, name: str = "user") -> CompressorSpec:
    """Parse a 16-line compressor table.

    Each line is "x1x2x3x4 sum carry"; '#' starts a comment; patterns must
    appear in ascending binary order.
    """
    table: dict[int, tuple[Bit, Bit]] = {}
    expected = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise CompressorSpecError(f"line {lineno}: expected 'pattern sum carry'")
        pat, s_str, c_str = parts
        if len(pat) != 4 or any(ch not in "01" for ch in pat):
            raise CompressorSpecError(f"line {lineno}: bad pattern {pat!r}")
        key = int(pat, 2)
        if key in table:
            raise CompressorSpecError(f"line {lineno}: duplicate pattern {pat}")
        if key != expected:
            raise CompressorSpecError(
                f"line {lineno}: patterns must ascend; expected {expected:04b}")
        if s_str not in ("0", "1") or c_str not in ("0", "1"):
            raise CompressorSpecError(f"line {lineno}: non-bit output")
        table[key] = (int(s_str), int(c_str))
        expected += 1
    if len(table) != 16:
        raise CompressorSpecError(f"missing pattern: got {len(table)} of 16 lines")
    return CompressorSpec(name=name, kind="approximate", table=table)


def exact_restricted_table(name: str = "exact-cin0") -> CompressorSpec:
    """Approximate spec that mimics the exact cell at cin=0, dropping cout.

    Useful as a worst-case-free baseline: the only error such a cell can
    introduce is the weight of the discarded cout chain.
    """
    table = {}
    for p in range(16):
        x1, x2, x3, x4 = (p >> 3) & 1, (p >> 2) & 1, (p >> 1) & 1, p & 1
        s, c, _cout = exact_compressor42(x1, x2, x3, x4, 0)
        table[p] = (s, c)
    return CompressorSpec(name=name, kind="approximate", table=table)


def _load_builtin(filename: str, name: str) -> CompressorSpec:
    text = resources.files("apxcim").joinpath("data", filename).read_text()
    return load_compressor_spec(text, name=name)


EXACT_SPEC = CompressorSpec(name="exact", kind="exact")

#: Reference approximate cell shipped with the toolkit: a saturating
#: 4-bit one-counter whose output caps at 3, so the only erroneous
#: pattern is all-ones (error distance 1).
REFERENCE_SPEC = _load_builtin("saturating.tbl", "saturating")

_REGISTRY: dict[str, CompressorSpec] = {
    REFERENCE_SPEC.name: REFERENCE_SPEC,
    "exact-cin0": exact_restricted_table(),
}


def register_compressor_spec(spec: CompressorSpec) -> None:
    _REGISTRY[spec.name] = spec


def get_compressor_spec(name: str) -> CompressorSpec:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise CompressorSpecError(f"unknown compressor name {name!r}") from None


def known_compressor_specs() -> tuple[str, ...]:
    return tuple(_REGISTRY)
