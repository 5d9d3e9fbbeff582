"""Approximate compute-in-memory toolkit.

Generates exact, compressor-based approximate, and logarithmic
multipliers as gate netlists and RTL, models a banked SRAM macro with
abstract LEF/LIB views, measures arithmetic error (NMED/MRED/WCE/PSNR),
and estimates parametric yield by Monte Carlo and mean-shifted
importance sampling.
"""

__version__ = "0.1.0"

# Version of the TOML project-config schema accepted by the CLI.
CONFIG_SCHEMA_VERSION = "1"
