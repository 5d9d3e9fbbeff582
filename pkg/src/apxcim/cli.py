"""Command line driver: gen, sweep, image, yield and sram subcommands.

Configuration comes from a TOML file (one table per module config type)
with flags overriding file values.  Every run is deterministic for a
given config + seed: artifact bytes contain no timestamps.  Exit codes
are 0 success, 2 usage, 3 malformed configuration, 4 missing file,
1 any other failure; failures print a single diagnostic line on stderr
and leave a FAILED marker next to any partial artifacts.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import CONFIG_SCHEMA_VERSION, __version__
from .cells import CompressorSpecError, load_compressor_spec, register_compressor_spec
from .image import (GrayImage, ImageError, SYNTHETIC_PAIRS, blend_images,
                    psnr, read_pgm, sobel_edge, synthetic_pair, write_pgm)
from .logmult import LogMultError, LogMultiplier
from .metrics import SweepError, sweep_errors
from .multiplier import ConfigError, MultiplierConfig, build_multiplier, build_multiplier_netlist
from .netlist import NetlistError
from .rtl import (RtlError, default_module_name, emit_flow_scripts,
                  emit_log_mult_rtl, emit_pe_rtl, emit_testbench, emit_verilog)
from .sram import SramConfig, SramConfigError, emit_abstract_views, sram_build
from .yieldsim import (YieldEstimationError, compare_methods, comparison_csv,
                       get_model, linear_model, mc_yield, mnis_yield,
                       result_csv, snm_surrogate)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_MISSING = 4

ENV_OUT_DIR = "APXCIM_OUT_DIR"
FAILURE_MARKER = "FAILED"

_TABLE_KEYS = {
    "multiplier": {"width", "family", "signedness", "approx_region",
                   "compressor", "compensation"},
    "sram": {"rows", "cols", "word_width", "banks", "subarrays",
             "mux_ratio", "sae_offset", "precharge"},
    "sweep": {"mode", "count"},
    "image": {"pair", "op", "size"},
    "yield": {"model", "beta", "rarity", "method", "fom", "presamples",
              "sigma_s", "max_sims", "compare_seeds"},
    "trace": {"ops"},
}
_TOP_KEYS = {"schema", "output_dir", "seed", "report"}


class CliError(Exception):
    """Failure with a chosen exit code and one-line message."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class ProjectConfig:
    """Validated run configuration shared by all subcommands."""

    multiplier: MultiplierConfig | None = None
    sram: SramConfig | None = None
    out_dir: str = "apxcim_out"
    seed: int = 0
    report: str = "csv"
    sections: dict = field(default_factory=dict)  # raw per-subcommand tables


def _read_config_file(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise CliError(EXIT_MISSING, f"config file not found: {path}")
    try:
        data = tomllib.loads(p.read_text(encoding="utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as e:
        raise CliError(EXIT_CONFIG, f"malformed config {path}: {e}")
    for key, value in data.items():
        if key in _TOP_KEYS:
            continue
        if key not in _TABLE_KEYS:
            raise CliError(EXIT_CONFIG, f"unknown config table or key [{key}]")
        if not isinstance(value, dict):
            raise CliError(EXIT_CONFIG, f"[{key}] must be a table")
        extra = set(value) - _TABLE_KEYS[key]
        if extra:
            raise CliError(EXIT_CONFIG, f"unknown keys in [{key}]: {sorted(extra)}")
    schema = data.get("schema")
    if schema is not None and str(schema) != CONFIG_SCHEMA_VERSION:
        raise CliError(EXIT_CONFIG,
                       f"config schema {schema!r} unsupported (expected {CONFIG_SCHEMA_VERSION})")
    return data


def _resolve_compressor(mult_table: dict) -> None:
    """A compressor naming a .tbl path is loaded and registered."""
    name = mult_table.get("compressor")
    if not isinstance(name, str):
        return
    if not (name.endswith(".tbl") or os.sep in name):
        return
    p = Path(name)
    if not p.is_file():
        raise CliError(EXIT_MISSING, f"compressor table file not found: {name}")
    try:
        spec = load_compressor_spec(p.read_text(encoding="utf-8"), name=p.stem)
    except (CompressorSpecError, UnicodeDecodeError) as e:
        raise CliError(EXIT_CONFIG, f"bad compressor table {name}: {e}")
    register_compressor_spec(spec)
    mult_table["compressor"] = spec.name


def load_project_config(args: argparse.Namespace) -> ProjectConfig:
    data = _read_config_file(args.config) if args.config else {}
    mult_table = dict(data.get("multiplier", {}))
    sram_table = dict(data.get("sram", {}))

    for flag, key in (("width", "width"), ("family", "family"),
                      ("signedness", "signedness"), ("region", "approx_region"),
                      ("compressor", "compressor")):
        v = getattr(args, flag, None)
        if v is not None:
            mult_table[key] = v
    comp = getattr(args, "compensation", None)
    if comp is not None:
        mult_table["compensation"] = comp == "on"
    for flag in ("rows", "cols", "word_width", "banks", "subarrays", "mux_ratio"):
        v = getattr(args, flag, None)
        if v is not None:
            sram_table[flag] = v

    pc = ProjectConfig(sections={k: dict(data.get(k, {}))
                                 for k in ("sweep", "image", "yield", "trace")})
    if mult_table:
        _resolve_compressor(mult_table)
        try:
            pc.multiplier = MultiplierConfig(**mult_table)
        except (ConfigError, TypeError) as e:
            raise CliError(EXIT_CONFIG, f"bad [multiplier] config: {e}")
    if sram_table:
        try:
            pc.sram = SramConfig(**sram_table)
        except (SramConfigError, TypeError) as e:
            raise CliError(EXIT_CONFIG, f"bad [sram] config: {e}")

    out = args.out or data.get("output_dir") or os.environ.get(ENV_OUT_DIR)
    if out:
        pc.out_dir = str(out)
    if args.seed is not None:
        pc.seed = args.seed
    elif "seed" in data:
        if not isinstance(data["seed"], int):
            raise CliError(EXIT_CONFIG, f"seed must be an integer, got {data['seed']!r}")
        pc.seed = data["seed"]
    report = args.report or data.get("report")
    if report is not None:
        if report not in ("csv", "json"):
            raise CliError(EXIT_CONFIG, f"report must be 'csv' or 'json', got {report!r}")
        pc.report = report
    return pc


class _Workspace:
    """Artifact writer that lazily creates the output directory."""

    def __init__(self, out_dir: str):
        self.root = Path(out_dir)
        self.written: list[Path] = []

    def write(self, filename: str, payload: str | bytes) -> Path:
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise CliError(EXIT_FAILURE, f"cannot create output directory {self.root}: {e}")
        path = self.root / filename
        if isinstance(payload, bytes):
            path.write_bytes(payload)
        else:
            path.write_text(payload, encoding="utf-8")
        self.written.append(path)
        return path

    def mark_failure(self, message: str) -> None:
        if self.written:
            try:
                (self.root / FAILURE_MARKER).write_text(message + "\n", encoding="utf-8")
            except OSError:
                pass

    def clear_stale_marker(self) -> None:
        marker = self.root / FAILURE_MARKER
        try:
            if marker.is_file():
                marker.unlink()
        except OSError:
            pass


def _json_safe(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def _report_json(rows) -> str:
    if isinstance(rows, dict):
        rows = [rows]
    return json.dumps([{k: _json_safe(v) for k, v in row.items()} for row in rows],
                      indent=2) + "\n"


def _need(pc: ProjectConfig, what: str):
    value = getattr(pc, what)
    if value is None:
        raise CliError(EXIT_CONFIG,
                       f"a [{what}] configuration is required (config file or flags)")
    return value


def _section(pc: ProjectConfig, name: str, args: argparse.Namespace,
             keys: tuple[str, ...]) -> dict:
    merged = dict(pc.sections.get(name, {}))
    for key in keys:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    return merged


def _build_dut(cfg: MultiplierConfig):
    if cfg.family == "logarithmic":
        return LogMultiplier(cfg.width, cfg.compensation)
    return build_multiplier(cfg)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_gen(pc: ProjectConfig, args: argparse.Namespace, ws: _Workspace) -> str:
    cfg = _need(pc, "multiplier")
    if cfg.family == "logarithmic":
        art = emit_log_mult_rtl(cfg)
    else:
        nl = build_multiplier_netlist(cfg)
        art = emit_verilog(nl, default_module_name(cfg),
                           registered_io=bool(args.registered))
    rtl_files = [f"{art.module_name}.v"]
    ws.write(rtl_files[0], art.body)

    lef_files: list[str] = []
    lib_files: list[str] = []
    if pc.sram is not None:
        if pc.sram.word_width != cfg.width:
            raise CliError(EXIT_CONFIG,
                           f"sram word_width {pc.sram.word_width} must match "
                           f"multiplier width {cfg.width} for the PE wrapper")
        lef, lib = emit_abstract_views(pc.sram)
        macro = pc.sram.macro_name
        lef_files.append(f"{macro}.lef")
        lib_files.append(f"{macro}.lib")
        ws.write(lef_files[0], lef)
        ws.write(lib_files[0], lib)
        pe = emit_pe_rtl(pc.sram, art)
        rtl_files.append(f"{pe.module_name}.v")
        ws.write(rtl_files[1], pe.body)

    if args.tb_vectors:
        rng = np.random.default_rng(pc.seed)
        hi = 1 << cfg.width
        vecs = [(int(rng.integers(0, hi)), int(rng.integers(0, hi)))
                for _ in range(args.tb_vectors)]
        source = cfg if cfg.family == "logarithmic" else nl
        ws.write(f"{art.module_name}_tb.v",
                 emit_testbench(source, vecs, module_name=art.module_name))

    for stub in emit_flow_scripts(art.module_name, rtl_files,
                                  lef_files, lib_files).values():
        ws.write(stub.filename, stub.text)
    return f"generated {art.module_name} ({len(ws.written)} artifacts)"


def _cmd_sweep(pc: ProjectConfig, args: argparse.Namespace, ws: _Workspace) -> str:
    cfg = _need(pc, "multiplier")
    section = _section(pc, "sweep", args, ("mode", "count"))
    if args.exhaustive:
        section["mode"] = "exhaustive"
    mode = section.get("mode", "exhaustive")
    count = int(section.get("count", 100_000))
    report = sweep_errors(_build_dut(cfg), cfg.width, mode=mode,
                          count=count, seed=pc.seed)
    ws.write("error_report.csv", report.to_csv())
    ws.write("error_report.json", report.to_json())
    out = report.to_csv() if pc.report == "csv" else report.to_json()
    return out.rstrip("\n")


def _load_pair(section: dict) -> tuple[GrayImage, GrayImage, str]:
    in_a, in_b = section.get("input_a"), section.get("input_b")
    if in_a or in_b:
        imgs = []
        for p in (in_a, in_b):
            if p is None:
                raise CliError(EXIT_CONFIG, "--input-a and --input-b must be given together")
            path = Path(p)
            if not path.is_file():
                raise CliError(EXIT_MISSING, f"image file not found: {p}")
            imgs.append(read_pgm(path.read_bytes()))
        return imgs[0], imgs[1], "input"
    pair = section.get("pair", "gradients")
    size = int(section.get("size", 64))
    a, b = synthetic_pair(pair, size=size)
    return a, b, pair


def _cmd_image(pc: ProjectConfig, args: argparse.Namespace, ws: _Workspace) -> str:
    cfg = _need(pc, "multiplier")
    section = _section(pc, "image", args, ("pair", "op", "size"))
    if args.input_a is not None:
        section["input_a"] = args.input_a
    if args.input_b is not None:
        section["input_b"] = args.input_b
    op = section.get("op", "blend")
    img_a, img_b, source = _load_pair(section)
    tag = default_module_name(cfg)

    if op == "blend":
        if cfg.width != 8:
            raise CliError(EXIT_CONFIG, f"blend needs an 8-bit multiplier, got width {cfg.width}")
        exact8 = build_multiplier(MultiplierConfig(8, "exact"))
        ref = blend_images(img_a, img_b, exact8)
        test = blend_images(img_a, img_b, _build_dut(cfg))
        ws.write("blend_exact.pgm", write_pgm(ref))
        ws.write(f"blend_{tag}.pgm", write_pgm(test))
    elif op == "sobel":
        if cfg.width != 16:
            raise CliError(EXIT_CONFIG, f"sobel needs a 16-bit multiplier, got width {cfg.width}")
        exact16 = build_multiplier(MultiplierConfig(16, "exact"))
        ref = sobel_edge(img_a, exact16)
        test = sobel_edge(img_a, _build_dut(cfg))
        ws.write("sobel_exact.pgm", write_pgm(ref))
        ws.write(f"sobel_{tag}.pgm", write_pgm(test))
    else:
        raise CliError(EXIT_CONFIG, f"op must be 'blend' or 'sobel', got {op!r}")

    score = psnr(ref, test)
    row = {"op": op, "source": source, "multiplier": tag, "psnr_db": score}
    csv_text = "op,source,multiplier,psnr_db\n" + \
        f"{op},{source},{tag},{score!r}\n"
    ws.write("image_report.csv", csv_text)
    ws.write("image_report.json", _report_json(row))
    return f"{op} PSNR vs exact: {score!r} dB"


def _cmd_yield(pc: ProjectConfig, args: argparse.Namespace, ws: _Workspace) -> str:
    section = _section(pc, "yield", args,
                       ("model", "beta", "rarity", "method", "fom",
                        "presamples", "sigma_s", "max_sims", "compare_seeds"))
    model_name = section.get("model", "linear")
    if model_name == "linear":
        model = linear_model(float(section.get("beta", 3.0)))
    elif model_name == "snm":
        model = snm_surrogate(float(section.get("rarity", 3.0)))
    else:
        try:
            model = get_model(model_name)
        except YieldEstimationError as e:
            raise CliError(EXIT_CONFIG, str(e))
    method = section.get("method", "mnis")
    fom = float(section.get("fom", 0.1))
    presamples = int(section.get("presamples", 1_000))
    sigma_s = float(section.get("sigma_s", 3.0))
    max_sims = int(section.get("max_sims", 2_000_000))

    if method == "mc":
        res = mc_yield(model, target_fom=fom, max_sims=max_sims, seed=pc.seed)
        rows = [res]
    elif method == "mnis":
        res = mnis_yield(model, presamples=presamples, target_fom=fom,
                         max_sims=max_sims, seed=pc.seed, sigma_s=sigma_s)
        rows = [res]
    elif method == "compare":
        n_seeds = int(section.get("compare_seeds", 5))
        table = compare_methods(model, fom, range(pc.seed, pc.seed + n_seeds),
                                presamples=presamples, sigma_s=sigma_s,
                                max_sims=max_sims)
        ws.write("yield_compare.csv", comparison_csv(table))
        ws.write("yield_compare.json", _report_json(table))
        speedup = table[1]["Speedup"]
        return f"median speedup mnis vs mc: {speedup!r} (pf {table[1]['Pf']!r})"
    else:
        raise CliError(EXIT_CONFIG, f"method must be mc, mnis or compare, got {method!r}")

    ws.write(f"yield_{method}.csv", result_csv(rows))
    ws.write(f"yield_{method}.json",
             _report_json({"method": res.method, "pf_hat": res.pf_hat,
                           "std": res.std, "fom": res.fom, "sims": res.sims,
                           "seed": res.seed, "converged": res.converged}))
    return (f"{res.method}: pf_hat={res.pf_hat!r} fom={res.fom!r} "
            f"sims={res.sims} converged={res.converged}")


def _cmd_sram(pc: ProjectConfig, args: argparse.Namespace, ws: _Workspace) -> str:
    scfg = _need(pc, "sram")
    section = _section(pc, "trace", args, ("ops",))
    ops = int(section.get("ops", 1_000))
    if ops < 1:
        raise CliError(EXIT_CONFIG, f"ops must be positive, got {ops}")
    model = sram_build(scfg, trace=True)
    rng = np.random.default_rng(pc.seed)
    cap = scfg.capacity_words
    hi = 1 << scfg.word_width
    for _ in range(ops):
        addr = int(rng.integers(0, cap))
        if rng.random() < 0.5:
            model.write(addr, int(rng.integers(0, hi)))
        else:
            model.read(addr)
    ws.write("sram_trace.csv", model.trace_csv())
    return (f"{scfg.macro_name}: {model.writes} writes, {model.reads} reads, "
            f"trace in sram_trace.csv")


# ---------------------------------------------------------------------------
# argument parsing and dispatch

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config file")
    common.add_argument("--out", help=f"output directory (default ${ENV_OUT_DIR} or apxcim_out)")
    common.add_argument("--seed", type=int, help="global seed")
    common.add_argument("--report", choices=("csv", "json"),
                        help="report format printed to stdout")

    mult = argparse.ArgumentParser(add_help=False)
    mult.add_argument("--width", type=int)
    mult.add_argument("--family", choices=("exact", "approx4-2", "logarithmic"))
    mult.add_argument("--signedness", choices=("unsigned", "sign-magnitude"))
    mult.add_argument("--region", type=int, help="approximate column region")
    mult.add_argument("--compressor", help="compressor name or .tbl file path")
    mult.add_argument("--compensation", choices=("on", "off"))

    parser = argparse.ArgumentParser(
        prog="apxcim",
        description="approximate compute-in-memory multiplier toolkit")
    parser.add_argument("--version", action="version",
                        version=f"apxcim {__version__} (config schema {CONFIG_SCHEMA_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common, mult],
                       help="emit RTL, SRAM views and flow stubs")
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--word-width", dest="word_width", type=int)
    p.add_argument("--banks", type=int)
    p.add_argument("--subarrays", type=int)
    p.add_argument("--mux-ratio", dest="mux_ratio", type=int)
    p.add_argument("--registered", action="store_true",
                   help="also emit a registered-I/O wrapper module")
    p.add_argument("--tb-vectors", dest="tb_vectors", type=int, default=0,
                   help="emit a self-checking testbench with N random vectors")

    p = sub.add_parser("sweep", parents=[common, mult],
                       help="error metrics against the exact product")
    p.add_argument("--mode", choices=("exhaustive", "sampled"))
    p.add_argument("--exhaustive", action="store_true",
                   help="shorthand for --mode exhaustive")
    p.add_argument("--count", type=int, help="sample count for sampled mode")

    p = sub.add_parser("image", parents=[common, mult],
                       help="image workload PSNR against the exact multiplier")
    p.add_argument("--pair", choices=SYNTHETIC_PAIRS)
    p.add_argument("--op", choices=("blend", "sobel"))
    p.add_argument("--size", type=int, help="synthetic image size")
    p.add_argument("--input-a", dest="input_a", help="first input PGM (P5)")
    p.add_argument("--input-b", dest="input_b", help="second input PGM (P5)")

    p = sub.add_parser("yield", parents=[common],
                       help="failure probability estimation")
    p.add_argument("--model", help="linear | snm")
    p.add_argument("--beta", type=float, help="linear model margin")
    p.add_argument("--rarity", type=float, help="snm surrogate rarity")
    p.add_argument("--method", choices=("mc", "mnis", "compare"))
    p.add_argument("--fom", type=float, help="target std/pf stopping ratio")
    p.add_argument("--presamples", type=int)
    p.add_argument("--sigma-s", dest="sigma_s", type=float)
    p.add_argument("--max-sims", dest="max_sims", type=int)
    p.add_argument("--compare-seeds", dest="compare_seeds", type=int)

    p = sub.add_parser("sram", parents=[common],
                       help="behavioral macro trace")
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--word-width", dest="word_width", type=int)
    p.add_argument("--banks", type=int)
    p.add_argument("--subarrays", type=int)
    p.add_argument("--mux-ratio", dest="mux_ratio", type=int)
    p.add_argument("--ops", type=int, help="number of traced operations")
    return parser


_HANDLERS = {
    "gen": _cmd_gen,
    "sweep": _cmd_sweep,
    "image": _cmd_image,
    "yield": _cmd_yield,
    "sram": _cmd_sram,
}

_EXPECTED_ERRORS = (ConfigError, SramConfigError, NetlistError, LogMultError,
                    SweepError, ImageError, RtlError, CompressorSpecError,
                    YieldEstimationError, ValueError)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    ws: _Workspace | None = None
    try:
        pc = load_project_config(args)
        ws = _Workspace(pc.out_dir)
        summary = _HANDLERS[args.command](pc, args, ws)
        ws.clear_stale_marker()
        for path in ws.written:
            print(f"wrote {path}")
        if summary:
            print(summary)
        return EXIT_OK
    except CliError as e:
        if ws is not None:
            ws.mark_failure(str(e))
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except _EXPECTED_ERRORS as e:
        if ws is not None:
            ws.mark_failure(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
