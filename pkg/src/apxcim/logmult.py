"""Logarithmic multipliers: Mitchell baseline and compensated variant.

An operand N >= 1 splits as N = 2^k + Q with k the leading-one position
and 0 <= Q < 2^k.  The Mitchell product keeps the shift-computable terms

    2^(k1+k2) + Q1*2^k2 + Q2*2^k1

and drops the Q1*Q2 cross term, so it never overestimates.  The
compensated variant restores an estimate of that term: the larger
residue is rounded to a power of two (nearest, ties up) and applied to
the smaller residue as a shift.  The rounded term is strictly below
2^(k1+k2), so it can be merged into the product with a carry-free OR.

Besides the behavioral model (scalar and vectorized), this module can
lower the same datapath to a gate-level netlist built from the shared
IR: leading-one detectors, priority encoders, barrel shifters, a
residue comparator, and ripple adders.  That netlist backs gate-count
reporting and RTL emission for the logarithmic family.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netlist import GateKind, Netlist

WCE_MODES = ("round-smaller", "round-larger")


class LogMultError(ValueError):
    pass


def leading_one_position(x: int) -> int:
    if x < 1:
        raise LogMultError(f"leading-one position needs x >= 1, got {x}")
    return x.bit_length() - 1


@dataclass(frozen=True)
class LogOperandDecomposition:
    """value = 2^k + q, or the distinguished zero (no exponent)."""

    value: int
    zero: bool
    k: int
    q: int


def decompose(x: int) -> LogOperandDecomposition:
    if x == 0:
        return LogOperandDecomposition(0, True, 0, 0)
    k = leading_one_position(x)
    return LogOperandDecomposition(x, False, k, x - (1 << k))


@dataclass(frozen=True)
class CompensationTrace:
    k1: int
    k2: int
    q1: int
    q2: int
    chosen: str        # "q1" | "q2": which residue was rounded
    rounded_to: int    # power of two (or 0 for a zero residue)
    comp: int          # rounded_to * smaller residue


def mitchell_multiply(a: int, b: int) -> int:
    """Shift/add product that drops the residue cross term; <= a*b."""
    if a == 0 or b == 0:
        return 0
    k1 = leading_one_position(a)
    k2 = leading_one_position(b)
    q1 = a - (1 << k1)
    q2 = b - (1 << k2)
    return (1 << (k1 + k2)) + (q1 << k2) + (q2 << k1)


def round_residue(q: int) -> int:
    """Nearest power of two, ties rounding up; 0 stays 0."""
    if q < 0:
        raise LogMultError(f"residue must be non-negative, got {q}")
    if q == 0:
        return 0
    m = leading_one_position(q)
    if m == 0:
        return 1
    return 1 << (m + 1) if q >= 3 * (1 << (m - 1)) else 1 << m


def compensated_log_multiply(a: int, b: int) -> tuple[int, CompensationTrace | None]:
    """Mitchell product plus the rounded residue cross term.

    The compensation comp = round(q_larger) * q_smaller is merged with
    an OR: comp < 2^(k1+k2) holds whenever both operands are nonzero,
    so the OR never meets a set bit.  Ties pick q1 for rounding, which
    makes the result symmetric in (a, b).
    """
    if a == 0 or b == 0:
        return 0, None
    k1 = leading_one_position(a)
    k2 = leading_one_position(b)
    q1 = a - (1 << k1)
    q2 = b - (1 << k2)
    if q1 >= q2:
        chosen, rounded, other = "q1", round_residue(q1), q2
    else:
        chosen, rounded, other = "q2", round_residue(q2), q1
    comp = rounded * other
    product = ((1 << (k1 + k2)) | comp) + (q1 << k2) + (q2 << k1)
    trace = CompensationTrace(k1, k2, q1, q2, chosen, rounded, comp)
    return product, trace


def compensated_product(a: int, b: int) -> int:
    return compensated_log_multiply(a, b)[0]


def rounding_error_bound(k: int) -> int:
    """Largest distance from a residue with leading-one position k to a
    power of two under nearest rounding: half the gap, 2^(k-1)."""
    if k < 1:
        raise LogMultError(f"bound defined for k >= 1, got {k}")
    return 1 << (k - 1)


def wce_bound(n: int, mode: str) -> int:
    """Worst-case product error bound for n-bit operands.

    Rounding the smaller residue admits 4^(n-2) - 2^(n-3); rounding the
    larger one tightens that to 3*4^(n-3).
    """
    if n < 3:
        raise LogMultError(f"bound defined for n >= 3, got {n}")
    if mode == "round-smaller":
        return 4 ** (n - 2) - 2 ** (n - 3)
    if mode == "round-larger":
        return 3 * 4 ** (n - 3)
    raise LogMultError(f"mode must be one of {WCE_MODES}, got {mode!r}")


# ---------------------------------------------------------------------------
# vectorized evaluation (one uint64 lane per operand pair, widths <= 32)

def _lod_batch(x: np.ndarray) -> np.ndarray:
    # frexp exponents are exact for integers below 2^53
    _, e = np.frexp(np.where(x == 0, 1, x).astype(np.float64))
    return (e - 1).astype(np.uint64)


def _decompose_batch(a, b):
    a = np.ascontiguousarray(a, dtype=np.uint64)
    b = np.ascontiguousarray(b, dtype=np.uint64)
    zero = (a == 0) | (b == 0)
    k1 = _lod_batch(a)
    k2 = _lod_batch(b)
    one = np.uint64(1)
    q1 = a - (one << k1)
    q2 = b - (one << k2)
    return zero, k1, k2, q1, q2


def mitchell_batch(a, b) -> np.ndarray:
    zero, k1, k2, q1, q2 = _decompose_batch(a, b)
    one = np.uint64(1)
    p = (one << (k1 + k2)) + (q1 << k2) + (q2 << k1)
    return np.where(zero, np.uint64(0), p)


def compensated_batch(a, b) -> np.ndarray:
    zero, k1, k2, q1, q2 = _decompose_batch(a, b)
    one = np.uint64(1)
    ge = q1 >= q2
    ql = np.where(ge, q1, q2)
    qs = np.where(ge, q2, q1)
    qlz = ql == 0
    m = _lod_batch(ql)
    up = np.where(m >= 1, (ql >> np.maximum(m - one, np.uint64(0))) & one, np.uint64(0))
    comp = np.where(qlz, np.uint64(0), qs << (m + up))
    p = ((one << (k1 + k2)) | comp) + (q1 << k2) + (q2 << k1)
    return np.where(zero, np.uint64(0), p)


class LogMultiplier:
    """Callable adapter matching the netlist multipliers' interface."""

    def __init__(self, width: int, compensation: bool = True):
        if not 2 <= width <= 32:
            raise LogMultError(f"width must be in [2, 32], got {width}")
        self.width = width
        self.compensation = compensation

    def __call__(self, a: int, b: int) -> int:
        lim = 1 << self.width
        if not (0 <= a < lim and 0 <= b < lim):
            raise LogMultError(f"operands must fit {self.width} bits")
        if self.compensation:
            return compensated_product(a, b)
        return mitchell_multiply(a, b)

    def batch(self, a_vals, b_vals) -> np.ndarray:
        if self.compensation:
            return compensated_batch(a_vals, b_vals)
        return mitchell_batch(a_vals, b_vals)


# ---------------------------------------------------------------------------
# gate-level lowering

def _w(nl: Netlist, kind: GateKind, *ins: int) -> int:
    return nl.add_gate(kind, ins, 1)[0]


def _tree(nl: Netlist, kind: GateKind, wires: list[int]) -> int | None:
    """Balanced 2-input reduction; None for an empty list (constant 0)."""
    ws = list(wires)
    if not ws:
        return None
    while len(ws) > 1:
        nxt = [
            _w(nl, kind, ws[i], ws[i + 1]) if i + 1 < len(ws) else ws[i]
            for i in range(0, len(ws), 2)
        ]
        ws = nxt
    return ws[0]


def _mux_bit(nl: Netlist, sel: int, nsel: int, t: int | None, f: int | None) -> int | None:
    if t is None and f is None:
        return None
    if t is None:
        return _w(nl, GateKind.AND, nsel, f)
    if f is None:
        return _w(nl, GateKind.AND, sel, t)
    return _w(nl, GateKind.OR,
              _w(nl, GateKind.AND, sel, t),
              _w(nl, GateKind.AND, nsel, f))


def _mux_row(nl: Netlist, sel: int, t_bits, f_bits) -> list[int | None]:
    nsel = _w(nl, GateKind.NOT, sel)
    width = max(len(t_bits), len(f_bits))
    out = []
    for i in range(width):
        t = t_bits[i] if i < len(t_bits) else None
        f = f_bits[i] if i < len(f_bits) else None
        out.append(_mux_bit(nl, sel, nsel, t, f))
    return out


def _lod_onehot(nl: Netlist, xs: list[int]) -> list[int]:
    """One-hot mask of the most significant set bit (all zero for 0)."""
    n = len(xs)
    out: list[int] = [0] * n
    out[n - 1] = xs[n - 1]
    seen = xs[n - 1]
    for i in range(n - 2, -1, -1):
        out[i] = _w(nl, GateKind.AND, xs[i], _w(nl, GateKind.NOT, seen))
        seen = _w(nl, GateKind.OR, seen, xs[i])
    return out


def _encode_onehot(nl: Netlist, onehot: list[int], bits: int) -> list[int | None]:
    return [
        _tree(nl, GateKind.OR, [onehot[i] for i in range(len(onehot)) if (i >> j) & 1])
        for j in range(bits)
    ]


def _geq(nl: Netlist, a_bits: list[int], b_bits: list[int]) -> int:
    """a >= b via a ripple borrow chain."""
    borrow: int | None = None
    for a, b in zip(a_bits, b_bits):
        na_b = _w(nl, GateKind.AND, _w(nl, GateKind.NOT, a), b)
        if borrow is None:
            borrow = na_b
        else:
            eq = _w(nl, GateKind.NOT, _w(nl, GateKind.XOR, a, b))
            borrow = _w(nl, GateKind.OR, na_b, _w(nl, GateKind.AND, eq, borrow))
    return _w(nl, GateKind.NOT, borrow)


def _ripple_add_bits(nl: Netlist, a_bits, b_bits) -> list[int | None]:
    """Bitwise ripple sum of two None-padded little-endian vectors."""
    width = max(len(a_bits), len(b_bits))
    out: list[int | None] = []
    carry: int | None = None
    for i in range(width):
        terms = [w for w in (
            a_bits[i] if i < len(a_bits) else None,
            b_bits[i] if i < len(b_bits) else None,
            carry,
        ) if w is not None]
        if not terms:
            out.append(None)
            carry = None
        elif len(terms) == 1:
            out.append(terms[0])
            carry = None
        elif len(terms) == 2:
            s, carry = nl.add_gate(GateKind.HA, tuple(terms), 2)
            out.append(s)
        else:
            s, carry = nl.add_gate(GateKind.FA, tuple(terms), 2)
            out.append(s)
    out.append(carry)
    return out


def _barrel_left(nl: Netlist, bits, amount: list[int | None], out_width: int) -> list[int | None]:
    """Left shift by a binary amount; stage j muxes a shift of 2^j."""
    cur: list[int | None] = list(bits)
    for j, aj in enumerate(amount):
        step = 1 << j
        if aj is None:
            continue  # amount bit is constant 0
        naj = _w(nl, GateKind.NOT, aj)
        nxt: list[int | None] = []
        for i in range(min(len(cur) + step, out_width)):
            shifted = cur[i - step] if 0 <= i - step < len(cur) else None
            kept = cur[i] if i < len(cur) else None
            nxt.append(_mux_bit(nl, aj, naj, shifted, kept))
        cur = nxt
    return cur[:out_width] + [None] * (out_width - len(cur))


def _decoder(nl: Netlist, bits: list[int | None], n_out: int) -> list[int | None]:
    """One-hot decode of a binary value; missing inputs read as 0."""
    lits: list[tuple[int | None, int | None]] = []
    for b in bits:
        lits.append((b, _w(nl, GateKind.NOT, b) if b is not None else None))
    outs: list[int | None] = []
    for v in range(n_out):
        terms: list[int] = []
        dead = False
        for j, (pos, neg) in enumerate(lits):
            want = (v >> j) & 1
            lit = pos if want else neg
            if lit is None:
                if want:  # needs a constant-0 bit to be 1: unreachable
                    dead = True
                continue
            terms.append(lit)
        if dead:
            outs.append(None)
        elif not terms:
            raise LogMultError("decoder requires at least one non-constant bit")
        else:
            outs.append(_tree(nl, GateKind.AND, terms))
    return outs


def build_log_netlist(width: int, compensation: bool = True) -> Netlist:
    """Gate-level datapath of the (compensated) logarithmic multiplier.

    Blocks mirror the behavioral model: per-operand leading-one
    detector, priority encoder, leading-one removal, exponent-sum
    decoder, residue barrel shifters, and for the compensated variant a
    residue comparator, round-to-power-of-two logic, a compensation
    shifter, and the carry-free OR merge.  Zero operands force a zero
    product through an output gate row.
    """
    n = width
    if not 3 <= n <= 32:
        raise LogMultError(f"gate lowering supports widths in [3, 32], got {n}")
    t = (n - 1).bit_length()
    nl = Netlist(width=n)
    nl.a_wires = [nl.add_gate(GateKind.INPUT, (), 1)[0] for _ in range(n)]
    nl.b_wires = [nl.add_gate(GateKind.INPUT, (), 1)[0] for _ in range(n)]
    A, B = nl.a_wires, nl.b_wires

    la = _lod_onehot(nl, A)
    lb = _lod_onehot(nl, B)
    ka = _encode_onehot(nl, la, t)
    kb = _encode_onehot(nl, lb, t)
    # residues: clear the leading one; the top bit is always 0 afterwards
    qa = [_w(nl, GateKind.XOR, A[i], la[i]) for i in range(n - 1)]
    qb = [_w(nl, GateKind.XOR, B[i], lb[i]) for i in range(n - 1)]

    ksum = _ripple_add_bits(nl, ka, kb)[:t + 1]
    onehot = _decoder(nl, ksum, 2 * n - 1)

    merge: list[int | None] = list(onehot)
    if compensation:
        ge = _geq(nl, qa, qb)
        ql = _mux_row(nl, ge, qa, qb)
        qs = _mux_row(nl, ge, qb, qa)
        ll = _lod_onehot(nl, ql)
        m_bits = _encode_onehot(nl, ll, (max(n - 2, 1)).bit_length())
        up = _tree(nl, GateKind.OR, [
            _w(nl, GateKind.AND, ll[i], ql[i - 1]) for i in range(1, n - 1)
        ])
        amount = _ripple_add_bits(nl, m_bits, [up])[:t]
        shifted = _barrel_left(nl, qs, amount, 2 * n - 2)
        nz_ql = _tree(nl, GateKind.OR, ql)
        comp = [
            _w(nl, GateKind.AND, w, nz_ql) if w is not None else None
            for w in shifted
        ]
        merge = [
            _w(nl, GateKind.OR, onehot[i], comp[i])
            if i < len(comp) and comp[i] is not None and onehot[i] is not None
            else (onehot[i] if onehot[i] is not None else (comp[i] if i < len(comp) else None))
            for i in range(2 * n - 1)
        ]

    sha = _barrel_left(nl, qa, kb, 2 * n - 2)
    shb = _barrel_left(nl, qb, ka, 2 * n - 2)
    s1 = _ripple_add_bits(nl, merge, sha)[:2 * n]
    s2 = _ripple_add_bits(nl, s1, shb)[:2 * n]

    nz = _w(nl, GateKind.AND,
            _tree(nl, GateKind.OR, A),
            _tree(nl, GateKind.OR, B))
    const0: int | None = None
    outs: list[int] = []
    for bit in s2:
        if bit is None:
            if const0 is None:
                const0 = _w(nl, GateKind.XOR, A[0], A[0])
            outs.append(const0)
        else:
            outs.append(_w(nl, GateKind.AND, bit, nz))
    nl.outputs = outs
    nl.validate()
    return nl
