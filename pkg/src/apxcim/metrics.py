"""Error metrics of approximate multipliers over operand sweeps.

Distances are |exact - approx| per operand pair.  MED is their mean,
NMED normalizes MED by the largest exact product (2^n - 1)^2, MRED is
the mean of distance/exact over pairs with a nonzero exact product,
WCE is the maximum distance, and error_rate is the mismatch fraction.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

SWEEP_MODES = ("exhaustive", "sampled")
EXHAUSTIVE_WIDTH_CAP = 10


class SweepError(ValueError):
    pass


@dataclass(frozen=True)
class ErrorReport:
    samples: int
    MED: float
    NMED: float
    MRED: float
    WCE: int
    error_rate: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    def to_csv(self) -> str:
        d = asdict(self)
        head = ",".join(d)
        row = ",".join(repr(v) if isinstance(v, float) else str(v) for v in d.values())
        return f"{head}\n{row}\n"


def sweep_errors(dut, width: int, mode: str = "exhaustive",
                 count: int = 100_000, seed: int = 0, oracle=None) -> ErrorReport:
    """Measure one multiplier against the wide exact product.

    dut is a scalar callable; an object with a .batch method gets the
    vectorized path.  Exhaustive mode enumerates all 4^width pairs and
    is capped at width 10; sampled mode draws count uniform pairs from
    the given seed.  oracle overrides the reference product per pair.
    """
    if not 2 <= width <= 32:
        raise SweepError(f"width must be in [2, 32], got {width}")
    if mode == "exhaustive":
        if width > EXHAUSTIVE_WIDTH_CAP:
            raise SweepError(
                f"exhaustive sweeps are capped at width {EXHAUSTIVE_WIDTH_CAP}, got {width}")
        side = 1 << width
        a = np.repeat(np.arange(side, dtype=np.uint64), side)
        b = np.tile(np.arange(side, dtype=np.uint64), side)
    elif mode == "sampled":
        if count < 1:
            raise SweepError(f"sample count must be positive, got {count}")
        rng = np.random.default_rng(seed)
        a = rng.integers(0, 1 << width, size=count, dtype=np.uint64)
        b = rng.integers(0, 1 << width, size=count, dtype=np.uint64)
    else:
        raise SweepError(f"mode must be one of {SWEEP_MODES}, got {mode!r}")

    # n <= 32 keeps every product and distance inside uint64
    if oracle is None:
        exact = a * b
    else:
        exact = np.fromiter((oracle(int(x), int(y)) for x, y in zip(a, b)),
                            dtype=np.uint64, count=a.size)
    if hasattr(dut, "batch"):
        approx = np.ascontiguousarray(dut.batch(a, b), dtype=np.uint64)
    else:
        approx = np.fromiter((dut(int(x), int(y)) for x, y in zip(a, b)),
                             dtype=np.uint64, count=a.size)

    dist = np.where(exact >= approx, exact - approx, approx - exact)
    med = float(dist.mean())
    nz = exact != 0
    if nz.any():
        mred = float((dist[nz].astype(np.float64) / exact[nz].astype(np.float64)).mean())
    else:
        mred = 0.0
    return ErrorReport(
        samples=int(dist.size),
        MED=med,
        NMED=med / float(((1 << width) - 1) ** 2),
        MRED=mred,
        WCE=int(dist.max()),
        error_rate=float(np.count_nonzero(dist)) / dist.size,
    )
