"""Adder and 4-2 compressor cell behavior, table loading, registry."""
import itertools

import pytest

from apxcim.cells import (
    EXACT_SPEC,
    REFERENCE_SPEC,
    CompressorSpec,
    CompressorSpecError,
    approx_compressor42,
    exact_compressor42,
    exact_restricted_table,
    full_adder,
    get_compressor_spec,
    half_adder,
    known_compressor_specs,
    load_compressor_spec,
    pattern_key,
    register_compressor_spec,
)

BITS = (0, 1)


def test_half_adder_counts():
    for a, b in itertools.product(BITS, repeat=2):
        s, c = half_adder(a, b)
        assert a + b == s + 2 * c


def test_full_adder_counts():
    for a, b, cin in itertools.product(BITS, repeat=3):
        s, c = full_adder(a, b, cin)
        assert a + b + cin == s + 2 * c


def test_exact_compressor_identity():
    for x1, x2, x3, x4, cin in itertools.product(BITS, repeat=5):
        s, carry, cout = exact_compressor42(x1, x2, x3, x4, cin)
        assert x1 + x2 + x3 + x4 + cin == s + 2 * (carry + cout)


def test_exact_compressor_cout_ignores_cin():
    for x1, x2, x3, x4 in itertools.product(BITS, repeat=4):
        cout0 = exact_compressor42(x1, x2, x3, x4, 0)[2]
        cout1 = exact_compressor42(x1, x2, x3, x4, 1)[2]
        assert cout0 == cout1


def test_pattern_key_msb_first():
    assert pattern_key(1, 0, 0, 0) == 8
    assert pattern_key(0, 0, 0, 1) == 1
    assert sorted(pattern_key(*p) for p in itertools.product(BITS, repeat=4)) \
        == list(range(16))


def test_reference_spec_is_saturating_counter():
    # output value caps at 3, so only the all-ones pattern is wrong
    for x in itertools.product(BITS, repeat=4):
        s, c = approx_compressor42(REFERENCE_SPEC, *x)
        assert s + 2 * c == min(sum(x), 3)
        assert REFERENCE_SPEC.error_distance(*x) == (1 if sum(x) == 4 else 0)


def test_exact_restricted_table_matches_exact_at_cin0():
    spec = exact_restricted_table()
    for x in itertools.product(BITS, repeat=4):
        s_ref, c_ref, _ = exact_compressor42(*x, 0)
        assert approx_compressor42(spec, *x) == (s_ref, c_ref)


def test_table_text_round_trip():
    text = REFERENCE_SPEC.to_text()
    again = load_compressor_spec(text, name="saturating")
    assert again.table == REFERENCE_SPEC.table
    assert again.name == "saturating"
    assert again.kind == "approximate"


def test_loader_accepts_comments_and_blank_lines():
    lines = ["# header", ""]
    for p in range(16):
        lines.append(f"{p:04b} 0 0  # row {p}")
    spec = load_compressor_spec("\n".join(lines))
    assert all(spec.table[p] == (0, 0) for p in range(16))


@pytest.mark.parametrize("mutate, fragment", [
    (lambda rows: rows[:-1], "missing pattern"),
    (lambda rows: rows + ["1111 1 1"], "duplicate pattern"),
    (lambda rows: ["0001 0 0"] + rows[1:], "must ascend"),
    (lambda rows: ["0000 0"] + rows[1:], "expected 'pattern sum carry'"),
    (lambda rows: ["00x0 0 0"] + rows[1:], "bad pattern"),
    (lambda rows: ["0000 2 0"] + rows[1:], "non-bit output"),
])
def test_loader_rejects_malformed_tables(mutate, fragment):
    rows = [f"{p:04b} 0 0" for p in range(16)]
    with pytest.raises(CompressorSpecError, match=fragment):
        load_compressor_spec("\n".join(mutate(rows)))


def test_spec_validation():
    with pytest.raises(CompressorSpecError, match="unknown compressor kind"):
        CompressorSpec(name="x", kind="fuzzy")
    with pytest.raises(CompressorSpecError, match="no table"):
        CompressorSpec(name="x", kind="exact", table={0: (0, 0)})
    with pytest.raises(CompressorSpecError, match="all 16 patterns"):
        CompressorSpec(name="x", kind="approximate", table={0: (0, 0)})
    with pytest.raises(CompressorSpecError, match="use exact_compressor42"):
        approx_compressor42(EXACT_SPEC, 0, 0, 0, 0)


def test_registry_lookup_and_registration():
    assert "saturating" in known_compressor_specs()
    assert get_compressor_spec("saturating") is REFERENCE_SPEC
    spec = CompressorSpec(name="all-zero", kind="approximate",
                          table={p: (0, 0) for p in range(16)})
    register_compressor_spec(spec)
    assert get_compressor_spec("all-zero") is spec
    with pytest.raises(CompressorSpecError, match="unknown compressor name"):
        get_compressor_spec("no-such-cell")
