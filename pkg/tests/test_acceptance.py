"""Top-level acceptance checks, one per shipped guarantee.

Each test drives a whole feature through its public entry points and
prints a single [PASS]/[FAIL] line in the terminal summary.  Expected
values come from closed forms or independent references computed in
the regular unit test files.
"""
import itertools
import math
import time

import numpy as np

from apxcim.cells import REFERENCE_SPEC, exact_compressor42
from apxcim.image import GrayImage, blend_images, psnr, synthetic_pair
from apxcim.logmult import (
    LogMultiplier,
    build_log_netlist,
    compensated_batch,
    compensated_log_multiply,
    mitchell_batch,
    mitchell_multiply,
)
from apxcim.metrics import sweep_errors
from apxcim.multiplier import (
    MultiplierConfig,
    build_multiplier,
    build_multiplier_netlist,
    gate_count_csv,
)
from apxcim.netlist import evaluate_batch, evaluate_netlist, gate_count
from apxcim.rtl import emit_log_mult_rtl, emit_verilog, lower_netlist
from apxcim.rtlsim import VerilogInterpreter
from apxcim.sram import (
    SramConfig,
    compose_address,
    decompose_address,
    sram_build,
)
from apxcim.yieldsim import linear_model, mc_yield, mnis_yield, normal_cdf

PF_ANALYTIC = normal_cdf(-3.0)


def test_criterion_01_exact_multipliers_are_exact(criterion):
    with criterion(1, "exact netlists reproduce wide integer products at "
                      "widths 8, 16 and 32") as info:
        start = time.perf_counter()
        nl8 = build_multiplier_netlist(MultiplierConfig(8, "exact"))
        side = 1 << 8
        a = np.repeat(np.arange(side, dtype=np.uint64), side)
        b = np.tile(np.arange(side, dtype=np.uint64), side)
        assert np.array_equal(evaluate_batch(nl8, a, b), a * b)

        rng = np.random.default_rng(2026)
        for width in (16, 32):
            nl = build_multiplier_netlist(MultiplierConfig(width, "exact"))
            a = rng.integers(0, 1 << width, size=1_000_000, dtype=np.uint64)
            b = rng.integers(0, 1 << width, size=1_000_000, dtype=np.uint64)
            mismatches = int(np.count_nonzero(evaluate_batch(nl, a, b) != a * b))
            assert mismatches == 0, f"width {width}: {mismatches} mismatches"
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0, f"took {elapsed:.2f}s, budget 10s"
        info["detail"] = f"{elapsed:.2f}s"


def test_criterion_02_compressor_identity(criterion):
    with criterion(2, "exact 4-2 compressor satisfies its arithmetic identity "
                      "on all 32 input patterns and carry-out ignores carry-in"):
        for bits in itertools.product((0, 1), repeat=5):
            x1, x2, x3, x4, cin = bits
            s, carry, cout = exact_compressor42(x1, x2, x3, x4, cin)
            assert s + 2 * (carry + cout) == x1 + x2 + x3 + x4 + cin
        for x in itertools.product((0, 1), repeat=4):
            _, _, cout0 = exact_compressor42(*x, 0)
            _, _, cout1 = exact_compressor42(*x, 1)
            assert cout0 == cout1


def test_criterion_03_compensation_or_merge_window(criterion):
    with criterion(3, "compensation term stays below the merge window, so OR "
                      "equals ADD, for every nonzero 8-bit pair"):
        for a in range(1, 256):
            for b in range(1, 256):
                product, trace = compensated_log_multiply(a, b)
                window = 1 << (trace.k1 + trace.k2)
                assert trace.comp < window, (a, b)
                base = window + (trace.q1 << trace.k2) + (trace.q2 << trace.k1)
                assert (window | trace.comp) == window + trace.comp
                assert product == base + trace.comp


def test_criterion_04_worst_case_error_bounds(criterion):
    with criterion(4, "compensated 8-bit worst-case error is within 3072 and "
                      "Mitchell's is at least as large") as info:
        side = 1 << 8
        a = np.repeat(np.arange(side, dtype=np.uint64), side)
        b = np.tile(np.arange(side, dtype=np.uint64), side)
        exact = a * b
        comp_err = np.abs(compensated_batch(a, b).astype(np.int64)
                          - exact.astype(np.int64))
        mit_err = np.abs(mitchell_batch(a, b).astype(np.int64)
                         - exact.astype(np.int64))
        comp_max = int(comp_err.max())
        mit_max = int(mit_err.max())
        assert comp_max <= 3 * 4 ** 5, comp_max
        assert mit_max >= comp_max, (mit_max, comp_max)
        info["detail"] = f"comp max {comp_max} <= 3072, mitchell max {mit_max}"


def test_criterion_05_compensation_improves_mred_and_nmed(criterion):
    with criterion(5, "compensation lowers both MRED and NMED in an "
                      "exhaustive 8-bit sweep") as info:
        start = time.perf_counter()
        comp = sweep_errors(LogMultiplier(8, True), 8, mode="exhaustive")
        mit = sweep_errors(LogMultiplier(8, False), 8, mode="exhaustive")
        elapsed = time.perf_counter() - start
        assert comp.MRED < mit.MRED, (comp.MRED, mit.MRED)
        assert comp.NMED < mit.NMED, (comp.NMED, mit.NMED)
        assert elapsed < 5.0, f"took {elapsed:.2f}s, budget 5s"
        info["detail"] = (f"MRED {comp.MRED:.4f} < {mit.MRED:.4f}, "
                          f"NMED {comp.NMED:.6f} < {mit.NMED:.6f}, {elapsed:.2f}s")


def test_criterion_06_mitchell_never_overestimates(criterion):
    with criterion(6, "Mitchell products never exceed the exact product on "
                      "all 65536 8-bit pairs"):
        side = 1 << 8
        a = np.repeat(np.arange(side, dtype=np.uint64), side)
        b = np.tile(np.arange(side, dtype=np.uint64), side)
        assert np.all(mitchell_batch(a, b) <= a * b)
        assert mitchell_multiply(255, 255) <= 255 * 255


def test_criterion_07_psnr_and_image_quality(criterion):
    with criterion(7, "PSNR closed forms hold and compensation beats plain "
                      "Mitchell on both shipped synthetic blends") as info:
        flat = GrayImage(32, 32, np.full((32, 32), 100, dtype=np.uint8))
        assert psnr(flat, flat) == math.inf
        off_by_one = GrayImage(32, 32, np.full((32, 32), 101, dtype=np.uint8))
        assert abs(psnr(flat, off_by_one) - 48.13) < 0.01

        exact8 = build_multiplier(MultiplierConfig(8, "exact"))
        comp8 = LogMultiplier(8, True)
        mit8 = LogMultiplier(8, False)
        scores = {}
        for pair in ("gradients", "checker"):
            img_a, img_b = synthetic_pair(pair, size=64)
            ref = blend_images(img_a, img_b, exact8)
            assert psnr(ref, ref) == math.inf
            p_comp = psnr(ref, blend_images(img_a, img_b, comp8))
            p_mit = psnr(ref, blend_images(img_a, img_b, mit8))
            assert p_comp > p_mit, (pair, p_comp, p_mit)
            scores[pair] = (p_comp, p_mit)
        info["detail"] = ", ".join(
            f"{pair} {c:.2f} > {m:.2f} dB" for pair, (c, m) in scores.items())


def test_criterion_08_yield_estimators(criterion):
    with criterion(8, "both yield estimators match the analytic failure rate "
                      "and importance sampling needs at least 5x fewer "
                      "simulations") as info:
        start = time.perf_counter()
        model = linear_model(3.0)

        mc = mc_yield(model, target_fom=0.1, max_sims=2_000_000, seed=1)
        assert mc.converged and mc.fom <= 0.1
        assert abs(mc.pf_hat - PF_ANALYTIC) <= 3 * mc.std, (mc.pf_hat, mc.std)

        mn = mnis_yield(model, presamples=1_000, target_fom=0.1,
                        max_sims=2_000_000, seed=1, sigma_s=3.0)
        assert mn.converged and mn.fom <= 0.1
        assert abs(mn.pf_hat - PF_ANALYTIC) <= 3 * mn.std, (mn.pf_hat, mn.std)

        # estimator mean over 50 independent seeds stays within 2 standard
        # errors of the analytic value
        runs = [mnis_yield(model, presamples=1_000, target_fom=0.1,
                           max_sims=2_000_000, seed=s, sigma_s=3.0)
                for s in range(50)]
        assert all(r.converged for r in runs)
        pf = np.array([r.pf_hat for r in runs])
        se = pf.std(ddof=1) / math.sqrt(len(runs))
        assert abs(pf.mean() - PF_ANALYTIC) <= 2 * se, (pf.mean(), se)

        median_sims = float(np.median([r.sims for r in runs]))
        speedup = mc.sims / median_sims
        assert speedup >= 5.0, speedup

        elapsed = time.perf_counter() - start
        assert elapsed < 60.0, f"took {elapsed:.2f}s, budget 60s"
        info["detail"] = (f"mc {mc.sims} sims, mnis median {median_sims:.0f}, "
                          f"speedup {speedup:.1f}x, |bias| {abs(pf.mean() - PF_ANALYTIC):.2e}"
                          f" <= 2se {2 * se:.2e}, {elapsed:.1f}s")


def test_criterion_09_sram_model_and_addressing(criterion):
    with criterion(9, "sram model tracks a flat reference map over 100000 "
                      "random operations and the address split is bijective"):
        cfg = SramConfig(rows=16, cols=32, word_width=8,
                         banks=2, subarrays=2, mux_ratio=4)
        seen = set()
        for addr in range(cfg.capacity_words):
            fields = decompose_address(cfg, addr)
            seen.add(fields)
            assert compose_address(cfg, *fields) == addr
        assert len(seen) == cfg.capacity_words

        model = sram_build(cfg)
        reference: dict[int, int] = {}
        rng = np.random.default_rng(90)
        for _ in range(100_000):
            addr = int(rng.integers(0, cfg.capacity_words))
            if rng.random() < 0.5:
                data = int(rng.integers(0, 1 << cfg.word_width))
                model.write(addr, data)
                reference[addr] = data
            else:
                assert model.read(addr) == reference.get(addr, 0)


def test_criterion_10_interpreter_matches_netlists(criterion):
    with criterion(10, "micro-interpreter agrees with netlist evaluation on "
                       "1000 vectors per emitted module and emission is "
                       "byte-deterministic"):
        duts = []
        for cfg in (MultiplierConfig(8, "exact"),
                    MultiplierConfig(8, "approx4-2", approx_region=8)):
            nl = build_multiplier_netlist(cfg)
            duts.append((cfg, nl, emit_verilog(nl, "dut")))
        for compensation in (True, False):
            cfg = MultiplierConfig(8, "logarithmic", compensation=compensation)
            nl = build_log_netlist(8, compensation)
            duts.append((cfg, nl, emit_log_mult_rtl(cfg)))

        rng = np.random.default_rng(10)
        for cfg, nl, art in duts:
            sim = VerilogInterpreter(art.body, art.module_name)
            for _ in range(1000):
                a = int(rng.integers(0, 256))
                b = int(rng.integers(0, 256))
                assert sim(a=a, b=b)["p"] == evaluate_netlist(nl, a, b), \
                    (cfg.family, a, b)
            # a fresh build of the same config emits identical bytes
            if cfg.family == "logarithmic":
                again = emit_log_mult_rtl(cfg)
            else:
                again = emit_verilog(build_multiplier_netlist(cfg), "dut")
            assert again.body.encode() == art.body.encode()


def test_criterion_11_log_multiplier_is_smaller(criterion):
    with criterion(11, "logarithmic multiplier lowers to fewer primitive "
                       "gates than the exact array at width 32") as info:
        totals = {}
        entries = []
        for width in (8, 16, 32):
            exact = lower_netlist(
                build_multiplier_netlist(MultiplierConfig(width, "exact")))
            log = lower_netlist(build_log_netlist(width, compensation=True))
            totals[width] = (gate_count(exact)["total"], gate_count(log)["total"])
            entries.append(("exact", width, None, exact))
            entries.append(("logarithmic", width, None, log))
        csv_text = gate_count_csv(entries)
        lines = csv_text.splitlines()
        assert lines[0] == "family,width,region,kind,count"
        for width in (8, 16, 32):
            assert any(l.startswith(f"exact,{width},") for l in lines[1:])
            assert any(l.startswith(f"logarithmic,{width},") for l in lines[1:])
        exact32, log32 = totals[32]
        assert log32 < exact32, totals
        info["detail"] = f"width 32: {log32} < {exact32} primitives"
