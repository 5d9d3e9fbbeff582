"""Behavioral SRAM model, address mapping, and abstract views."""
import numpy as np
import pytest

from apxcim.multiplier import MultiplierConfig, build_multiplier
from apxcim.sram import (
    SramAccessError,
    SramConfig,
    SramConfigError,
    access_delay_ns,
    compose_address,
    decompose_address,
    emit_abstract_views,
    macro_dimensions_um,
    pe_cycle,
    sram_build,
)

SPEC_CFG = SramConfig(rows=16, cols=32, word_width=8, banks=2,
                      subarrays=2, mux_ratio=4)


def test_config_validation():
    with pytest.raises(SramConfigError, match="rows must be a positive integer"):
        SramConfig(rows=0, cols=8, word_width=8)
    with pytest.raises(SramConfigError, match="sae_offset must be a non-negative"):
        SramConfig(rows=4, cols=8, word_width=8, sae_offset=-1)
    with pytest.raises(SramConfigError, match="cols must equal word_width"):
        SramConfig(rows=4, cols=9, word_width=8)


def test_derived_geometry():
    assert SPEC_CFG.capacity_words == 16 * 4 * 2 * 2
    assert SPEC_CFG.addr_bits == 8
    assert SPEC_CFG.macro_name == "sram_2b2s_16x32_w8m4"
    tiny = SramConfig(rows=1, cols=4, word_width=4)
    assert tiny.capacity_words == 1
    assert tiny.addr_bits == 1


def test_address_decomposition_bijective():
    seen = set()
    for addr in range(SPEC_CFG.capacity_words):
        bank, sub, row, mux = decompose_address(SPEC_CFG, addr)
        assert 0 <= bank < SPEC_CFG.banks
        assert 0 <= sub < SPEC_CFG.subarrays
        assert 0 <= row < SPEC_CFG.rows
        assert 0 <= mux < SPEC_CFG.mux_ratio
        assert compose_address(SPEC_CFG, bank, sub, row, mux) == addr
        seen.add((bank, sub, row, mux))
    assert len(seen) == SPEC_CFG.capacity_words


def test_address_field_order_high_to_low():
    # highest address belongs to the last bank, lowest to bank 0 mux 0
    assert decompose_address(SPEC_CFG, 0) == (0, 0, 0, 0)
    assert decompose_address(SPEC_CFG, SPEC_CFG.capacity_words - 1) == (1, 1, 15, 3)
    assert decompose_address(SPEC_CFG, 5) == (0, 0, 1, 1)


def test_address_range_errors():
    with pytest.raises(SramAccessError, match="outside"):
        decompose_address(SPEC_CFG, SPEC_CFG.capacity_words)
    with pytest.raises(SramAccessError, match="bank 2 outside"):
        compose_address(SPEC_CFG, 2, 0, 0, 0)
    with pytest.raises(SramAccessError, match="mux 4 outside"):
        compose_address(SPEC_CFG, 0, 0, 0, 4)


def test_model_against_flat_reference():
    model = sram_build(SPEC_CFG)
    reference: dict[int, int] = {}
    rng = np.random.default_rng(8)
    for _ in range(10_000):
        addr = int(rng.integers(0, SPEC_CFG.capacity_words))
        if rng.random() < 0.5:
            word = int(rng.integers(0, 256))
            model.write(addr, word)
            reference[addr] = word
        else:
            assert model.read(addr) == reference.get(addr, 0)
    assert model.reads + model.writes == 10_000


def test_model_access_checks():
    model = sram_build(SramConfig(rows=4, cols=8, word_width=8))
    assert model.read(0) == 0  # unwritten words read as zero
    with pytest.raises(SramAccessError, match="outside"):
        model.write(64, 0)
    with pytest.raises(SramAccessError, match="does not fit 8 bits"):
        model.write(0, 256)
    with pytest.raises(SramAccessError, match="without tracing"):
        model.trace_csv()


def test_trace_records_every_operation():
    model = sram_build(SramConfig(rows=4, cols=8, word_width=8), trace=True)
    model.write(3, 200)
    model.read(3)
    model.read(1)
    lines = model.trace_csv().splitlines()
    assert lines[0] == "cycle,op,addr,data"
    assert lines[1] == "1,W,3,200"
    assert lines[2] == "2,R,3,200"
    assert lines[3] == "3,R,1,0"


def test_pe_cycle_multiplies_stored_word():
    model = sram_build(SramConfig(rows=4, cols=8, word_width=8))
    model.write(2, 31)
    mult = build_multiplier(MultiplierConfig(8, "exact"))
    assert pe_cycle(model, 2, 77, mult) == 31 * 77


def test_analytic_view_numbers():
    w, h = macro_dimensions_um(SPEC_CFG)
    assert w == pytest.approx(32 * 2 * 0.6 * 1.25)
    assert h == pytest.approx(16 * 2 * 0.8 * 1.25)
    assert access_delay_ns(SPEC_CFG) == pytest.approx(0.35 + 0.004 * 16)
    bigger = SramConfig(rows=64, cols=32, word_width=8, mux_ratio=4)
    assert access_delay_ns(bigger) > access_delay_ns(SPEC_CFG)


def test_abstract_views_content():
    lef, lib = emit_abstract_views(SPEC_CFG)
    assert lef == emit_abstract_views(SPEC_CFG)[0]  # deterministic
    name = SPEC_CFG.macro_name
    assert f"MACRO {name}" in lef
    w, h = macro_dimensions_um(SPEC_CFG)
    assert f"SIZE {w:.3f} BY {h:.3f} ;" in lef
    pins = 3 + SPEC_CFG.addr_bits + 2 * SPEC_CFG.word_width
    assert lef.count("  PIN ") == pins
    assert lef.count("DIRECTION INPUT ;") == pins - SPEC_CFG.word_width

    assert f"library ({name}_lib)" in lib
    assert f"cell ({name})" in lib
    assert f"bit_width : {SPEC_CFG.addr_bits};" in lib
    delay = access_delay_ns(SPEC_CFG)
    assert f'values ("{delay:.4f}")' in lib
    assert f"area : {w * h:.3f};" in lib
    assert "sae_offset=1 ticks" in lib
