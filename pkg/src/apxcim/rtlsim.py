"""Micro-interpreter for the emitted synthesizable Verilog subset.

Closes the fidelity loop without an external simulator: the emitted
modules (continuous assignments, ANSI ports, named-port instances) are
parsed, flattened, scheduled once into a dependency-safe order, then
evaluated per input vector with plain integers masked to declared
widths.  Supported operators: ~ & | ^ + << >> == >= <= > < ?:, unary
reductions | and &, concatenation, bit and part selects, sized and
plain decimal literals.  Sequential constructs (reg, always, initial)
are outside the subset; modules using them parse only if never
instantiated from the chosen top.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field


class RtlSimError(ValueError):
    pass


_TOKEN = re.compile(r"""
      (?P<ws>\s+|//[^\n]*|/\*.*?\*/)
    | (?P<sized>\d+'[bdhBDH][0-9a-fA-F_xzXZ]+)
    | (?P<num>\d+)
    | (?P<id>[A-Za-z_$`][A-Za-z0-9_$]*)
    | (?P<str>"[^"\n]*")
    | (?P<op><<|>>|===|!==|==|!=|>=|<=|&&|\|\||.)
""", re.VERBOSE | re.DOTALL)


def _tokenize(text: str) -> list[str]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise RtlSimError(f"cannot tokenize near {text[pos:pos + 20]!r}")
        pos = m.end()
        if m.lastgroup != "ws":
            out.append(m.group())
    return out


def _split_modules(tokens: list[str]) -> dict[str, list[str]]:
    """Chunk the token stream per module; bodies stay unparsed."""
    chunks: dict[str, list[str]] = {}
    i = 0
    while i < len(tokens):
        if tokens[i] != "module":
            i += 1
            continue
        if i + 1 >= len(tokens):
            raise RtlSimError("module keyword at end of file")
        name = tokens[i + 1]
        j = i
        while j < len(tokens) and tokens[j] != "endmodule":
            j += 1
        if j == len(tokens):
            raise RtlSimError(f"module {name} has no endmodule")
        if name in chunks:
            raise RtlSimError(f"duplicate module {name}")
        chunks[name] = tokens[i:j + 1]
        i = j + 1
    return chunks


@dataclass
class ModuleDef:
    name: str
    ports: list[tuple[str, str, int]]          # (name, direction, width)
    nets: dict[str, int] = field(default_factory=dict)
    assigns: list[tuple] = field(default_factory=list)   # (lvalue, expr)
    insts: list[tuple] = field(default_factory=list)     # (module, inst, {port: expr})


class _Parser:
    def __init__(self, tokens: list[str]):
        self.toks = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> str:
        if self.pos >= len(self.toks):
            raise RtlSimError("unexpected end of module")
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, tok: str) -> None:
        t = self.next()
        if t != tok:
            raise RtlSimError(f"expected {tok!r}, got {t!r}")

    def ident(self) -> str:
        t = self.next()
        if not re.match(r"[A-Za-z_][A-Za-z0-9_]*\Z", t):
            raise RtlSimError(f"expected identifier, got {t!r}")
        return t

    def integer(self) -> int:
        t = self.next()
        if not t.isdigit():
            raise RtlSimError(f"expected integer, got {t!r}")
        return int(t)

    # ---- structure ----

    def module(self) -> ModuleDef:
        self.expect("module")
        name = self.ident()
        mod = ModuleDef(name, [])
        self.expect("(")
        while True:
            self.port(mod)
            t = self.next()
            if t == ")":
                break
            if t != ",":
                raise RtlSimError(f"expected ',' or ')' in port list, got {t!r}")
        self.expect(";")
        while self.peek() != "endmodule":
            self.item(mod)
        self.expect("endmodule")
        return mod

    def port(self, mod: ModuleDef) -> None:
        direction = self.next()
        if direction not in ("input", "output"):
            raise RtlSimError(f"unsupported port direction {direction!r}")
        t = self.peek()
        if t == "wire":
            self.next()
        elif t == "reg":
            raise RtlSimError("reg ports are outside the combinational subset")
        width = self.opt_range()
        name = self.ident()
        mod.ports.append((name, direction, width))
        mod.nets[name] = width

    def opt_range(self) -> int:
        if self.peek() != "[":
            return 1
        self.next()
        msb = self.integer()
        self.expect(":")
        lsb = self.integer()
        self.expect("]")
        if lsb != 0 or msb < 0:
            raise RtlSimError(f"only [msb:0] ranges are supported, got [{msb}:{lsb}]")
        return msb + 1

    def item(self, mod: ModuleDef) -> None:
        t = self.peek()
        if t == "wire":
            self.next()
            width = self.opt_range()
            name = self.ident()
            if name in mod.nets:
                raise RtlSimError(f"net {name} declared twice")
            mod.nets[name] = width
            self.expect(";")
        elif t == "assign":
            self.next()
            lv = self.lvalue()
            self.expect("=")
            expr = self.expr()
            self.expect(";")
            mod.assigns.append((lv, expr))
        elif t in ("reg", "always", "initial", "task", "integer") or (
                t is not None and t.startswith(("`", "$"))):
            raise RtlSimError(
                f"{t!r} is outside the combinational subset this interpreter accepts")
        else:
            modname = self.ident()
            instname = self.ident()
            conns: dict[str, tuple] = {}
            self.expect("(")
            while True:
                self.expect(".")
                port = self.ident()
                self.expect("(")
                conns[port] = self.expr()
                self.expect(")")
                t2 = self.next()
                if t2 == ")":
                    break
                if t2 != ",":
                    raise RtlSimError(f"expected ',' or ')' in instance, got {t2!r}")
            self.expect(";")
            mod.insts.append((modname, instname, conns))

    def lvalue(self) -> tuple:
        name = self.ident()
        if self.peek() != "[":
            return ("id", name)
        self.next()
        hi = self.integer()
        if self.peek() == ":":
            self.next()
            lo = self.integer()
            self.expect("]")
            return ("part", name, hi, lo)
        self.expect("]")
        return ("bit", name, hi)

    # ---- expressions, loosest binding first ----

    def expr(self) -> tuple:
        cond = self.bitor()
        if self.peek() == "?":
            self.next()
            t = self.expr()
            self.expect(":")
            f = self.expr()
            return ("tern", cond, t, f)
        return cond

    def _chain(self, sub, ops):
        node = sub()
        while self.peek() in ops:
            op = self.next()
            node = ("bin", op, node, sub())
        return node

    def bitor(self) -> tuple:
        return self._chain(self.bitxor, ("|",))

    def bitxor(self) -> tuple:
        return self._chain(self.bitand, ("^",))

    def bitand(self) -> tuple:
        return self._chain(self.equality, ("&",))

    def equality(self) -> tuple:
        return self._chain(self.relational, ("==",))

    def relational(self) -> tuple:
        return self._chain(self.shift, (">=", "<=", ">", "<"))

    def shift(self) -> tuple:
        return self._chain(self.additive, ("<<", ">>"))

    def additive(self) -> tuple:
        return self._chain(self.unary, ("+",))

    def unary(self) -> tuple:
        t = self.peek()
        if t in ("~", "|", "&"):
            self.next()
            return ("un", t, self.unary())
        return self.primary()

    def primary(self) -> tuple:
        t = self.peek()
        if t == "(":
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if t == "{":
            self.next()
            parts = [self.expr()]
            while self.peek() == ",":
                self.next()
                parts.append(self.expr())
            self.expect("}")
            return ("cat", tuple(parts))
        if t is not None and re.match(r"\d+'", t):
            self.next()
            width_s, rest = t.split("'", 1)
            base = rest[0].lower()
            digits = rest[1:].replace("_", "")
            if any(c in "xzXZ" for c in digits):
                raise RtlSimError(f"x/z literals are unsupported: {t!r}")
            value = int(digits, {"b": 2, "d": 10, "h": 16}[base])
            width = int(width_s)
            if value >= (1 << width):
                raise RtlSimError(f"literal {t!r} overflows its width")
            return ("num", value, width)
        if t is not None and t.isdigit():
            self.next()
            return ("num", int(t), None)
        name = self.ident()
        if self.peek() == "[":
            self.next()
            hi = self.integer()
            if self.peek() == ":":
                self.next()
                lo = self.integer()
                self.expect("]")
                return ("part", name, hi, lo)
            self.expect("]")
            return ("bit", name, hi)
        return ("id", name)


def parse_verilog(text: str, top: str | None = None) -> dict[str, ModuleDef]:
    """Parse the modules in a source text.

    With top given, only modules reachable from it are parsed, so a file
    may carry sequential wrappers alongside the combinational core.
    """
    chunks = _split_modules(_tokenize(text))
    if not chunks:
        raise RtlSimError("no modules found")
    if top is None:
        return {name: _Parser(toks).module() for name, toks in chunks.items()}
    if top not in chunks:
        raise RtlSimError(f"module {top} not found; file has {sorted(chunks)}")
    parsed: dict[str, ModuleDef] = {}
    pending = [top]
    while pending:
        name = pending.pop()
        if name in parsed:
            continue
        parsed[name] = _Parser(chunks[name]).module()
        for modname, _, _ in parsed[name].insts:
            if modname not in chunks:
                raise RtlSimError(f"instance of unknown module {modname}")
            pending.append(modname)
    return parsed


# ---------------------------------------------------------------------------
# flattening and scheduling

def _width_of(expr: tuple, nets: dict[str, int]) -> int | None:
    kind = expr[0]
    if kind == "num":
        return expr[2]
    if kind == "id":
        return nets[expr[1]]
    if kind == "bit":
        return 1
    if kind == "part":
        return expr[2] - expr[3] + 1
    if kind == "cat":
        total = 0
        for part in expr[1]:
            w = _width_of(part, nets)
            if w is None:
                return None
            total += w
        return total
    return None


def _reads(expr: tuple, out: set[str]) -> None:
    kind = expr[0]
    if kind in ("id", "bit", "part"):
        out.add(expr[1])
    elif kind == "un":
        _reads(expr[2], out)
    elif kind == "bin":
        _reads(expr[2], out)
        _reads(expr[3], out)
    elif kind == "tern":
        for sub in expr[1:]:
            _reads(sub, out)
    elif kind == "cat":
        for sub in expr[1]:
            _reads(sub, out)


def _prefix_expr(expr: tuple, prefix: str) -> tuple:
    kind = expr[0]
    if kind in ("id", "bit", "part"):
        return (kind, prefix + expr[1]) + expr[2:]
    if kind == "un":
        return ("un", expr[1], _prefix_expr(expr[2], prefix))
    if kind == "bin":
        return ("bin", expr[1], _prefix_expr(expr[2], prefix),
                _prefix_expr(expr[3], prefix))
    if kind == "tern":
        return ("tern",) + tuple(_prefix_expr(e, prefix) for e in expr[1:])
    if kind == "cat":
        return ("cat", tuple(_prefix_expr(e, prefix) for e in expr[1]))
    return expr


def _compile(expr: tuple, nets: dict[str, int]):
    """Closure-compile an expression; returns fn(env) -> int."""
    kind = expr[0]
    if kind == "num":
        v = expr[1]
        return lambda env: v
    if kind == "id":
        name = expr[1]
        if name not in nets:
            raise RtlSimError(f"undeclared net {name}")
        return lambda env: env[name]
    if kind == "bit":
        name, i = expr[1], expr[2]
        if name not in nets:
            raise RtlSimError(f"undeclared net {name}")
        if i >= nets[name]:
            raise RtlSimError(f"bit {i} out of range for {name}[{nets[name] - 1}:0]")
        return lambda env: (env[name] >> i) & 1
    if kind == "part":
        name, hi, lo = expr[1], expr[2], expr[3]
        if name not in nets:
            raise RtlSimError(f"undeclared net {name}")
        if hi < lo or hi >= nets[name]:
            raise RtlSimError(f"part select {name}[{hi}:{lo}] out of range")
        mask = (1 << (hi - lo + 1)) - 1
        return lambda env: (env[name] >> lo) & mask
    if kind == "un":
        op = expr[1]
        sub = _compile(expr[2], nets)
        if op == "|":
            return lambda env: 1 if sub(env) else 0
        w = _width_of(expr[2], nets)
        if w is None:
            raise RtlSimError(f"operand of unary {op} needs a self-determined width")
        mask = (1 << w) - 1
        if op == "~":
            return lambda env: sub(env) ^ mask
        return lambda env: 1 if sub(env) == mask else 0  # unary &
    if kind == "bin":
        op = expr[1]
        fa = _compile(expr[2], nets)
        fb = _compile(expr[3], nets)
        return {
            "&": lambda env: fa(env) & fb(env),
            "|": lambda env: fa(env) | fb(env),
            "^": lambda env: fa(env) ^ fb(env),
            "+": lambda env: fa(env) + fb(env),
            "<<": lambda env: fa(env) << fb(env),
            ">>": lambda env: fa(env) >> fb(env),
            "==": lambda env: 1 if fa(env) == fb(env) else 0,
            ">=": lambda env: 1 if fa(env) >= fb(env) else 0,
            "<=": lambda env: 1 if fa(env) <= fb(env) else 0,
            ">": lambda env: 1 if fa(env) > fb(env) else 0,
            "<": lambda env: 1 if fa(env) < fb(env) else 0,
        }[op]
    if kind == "tern":
        fc = _compile(expr[1], nets)
        ft = _compile(expr[2], nets)
        ff = _compile(expr[3], nets)
        return lambda env: ft(env) if fc(env) else ff(env)
    if kind == "cat":
        parts = []
        for sub in expr[1]:
            w = _width_of(sub, nets)
            if w is None:
                raise RtlSimError("concatenation parts need self-determined widths")
            parts.append((_compile(sub, nets), w, (1 << w) - 1))

        def cat(env):
            acc = 0
            for fn, w, mask in parts:
                acc = (acc << w) | (fn(env) & mask)
            return acc
        return cat
    raise RtlSimError(f"unknown expression node {kind}")


class VerilogInterpreter:
    """Flattened combinational evaluator for one top module."""

    def __init__(self, text: str, top: str):
        modules = parse_verilog(text, top)
        self.top = top
        self.ports = list(modules[top].ports)
        self._nets: dict[str, int] = {}
        self._assigns: list[tuple[str, int, int, tuple]] = []  # (net, lo, width, expr)
        self._instantiate(modules, top, "")
        self._check_drivers()
        self._schedule()
        self._compiled = [
            (net, lo, (1 << width) - 1, _compile(expr, self._nets))
            for net, lo, width, expr in (self._assigns[i] for i in self._order)
        ]

    def _instantiate(self, modules: dict[str, ModuleDef], name: str, prefix: str) -> None:
        mod = modules[name]
        for net, width in mod.nets.items():
            self._nets[prefix + net] = width
        for lv, expr in mod.assigns:
            self._add_assign(prefix, mod, lv, _prefix_expr(expr, prefix))
        for modname, instname, conns in mod.insts:
            child = modules[modname]
            child_prefix = f"{prefix}{instname}."
            self._instantiate(modules, modname, child_prefix)
            cports = {p[0]: p for p in child.ports}
            for port in cports:
                if port not in conns:
                    raise RtlSimError(f"instance {prefix}{instname} leaves port {port} unconnected")
            for port, expr in conns.items():
                if port not in cports:
                    raise RtlSimError(f"instance {prefix}{instname} has no port {port}")
                _, direction, width = cports[port]
                flat_expr = _prefix_expr(expr, prefix)
                if direction == "input":
                    self._assigns.append((child_prefix + port, 0, width, flat_expr))
                else:
                    if flat_expr[0] not in ("id", "bit", "part"):
                        raise RtlSimError(
                            f"output port {port} of {prefix}{instname} needs an lvalue connection")
                    self._add_assign("", None, flat_expr,
                                     ("id", child_prefix + port), flat=True)

    def _add_assign(self, prefix: str, mod: ModuleDef | None, lv: tuple,
                    expr: tuple, flat: bool = False) -> None:
        name = lv[1] if flat else prefix + lv[1]
        decl = self._nets.get(name)
        if decl is None:
            raise RtlSimError(f"assignment to undeclared net {name}")
        if lv[0] == "id":
            lo, width = 0, decl
        elif lv[0] == "bit":
            lo, width = lv[2], 1
        else:
            hi, lo = lv[2], lv[3]
            width = hi - lo + 1
        if lo + width > decl:
            raise RtlSimError(f"assignment to {name} exceeds its declared width")
        self._assigns.append((name, lo, width, expr))

    def _check_drivers(self) -> None:
        driven: dict[str, int] = {}
        for net, lo, width, _ in self._assigns:
            mask = ((1 << width) - 1) << lo
            if driven.get(net, 0) & mask:
                raise RtlSimError(f"net {net} has overlapping drivers")
            driven[net] = driven.get(net, 0) | mask
        inputs = {p[0] for p in self.ports if p[1] == "input"}
        read: set[str] = set()
        for _, _, _, expr in self._assigns:
            _reads(expr, read)
        for p in self.ports:
            if p[1] == "output":
                read.add(p[0])
        for net in sorted(read):
            if net in inputs:
                continue
            full = (1 << self._nets[net]) - 1
            if driven.get(net, 0) != full:
                raise RtlSimError(f"net {net} is read but not fully driven")

    def _schedule(self) -> None:
        inputs = {p[0] for p in self.ports if p[1] == "input"}
        drivers_left: dict[str, int] = {}
        for net, _, _, _ in self._assigns:
            drivers_left[net] = drivers_left.get(net, 0) + 1
        waiting: dict[str, list[int]] = {}
        pending: list[int] = []
        ready: list[int] = []
        for idx, (_, _, _, expr) in enumerate(self._assigns):
            deps: set[str] = set()
            _reads(expr, deps)
            deps = {d for d in deps if d not in inputs and drivers_left.get(d, 0) > 0}
            pending.append(len(deps))
            for d in deps:
                waiting.setdefault(d, []).append(idx)
            if not deps:
                ready.append(idx)
        order: list[int] = []
        while ready:
            idx = ready.pop()
            order.append(idx)
            net = self._assigns[idx][0]
            drivers_left[net] -= 1
            if drivers_left[net] == 0:
                for widx in waiting.get(net, ()):
                    pending[widx] -= 1
                    if pending[widx] == 0:
                        ready.append(widx)
        if len(order) < len(self._assigns):
            raise RtlSimError("combinational cycle in the assignment graph")
        self._order = order

    def __call__(self, **inputs: int) -> dict[str, int]:
        env: dict[str, int] = {}
        for name, direction, width in self.ports:
            if direction != "input":
                continue
            if name not in inputs:
                raise RtlSimError(f"missing value for input {name}")
            v = int(inputs.pop(name))
            if not 0 <= v < (1 << width):
                raise RtlSimError(f"value for {name} does not fit {width} bits")
            env[name] = v
        if inputs:
            raise RtlSimError(f"unknown inputs: {sorted(inputs)}")
        for net, lo, mask, fn in self._compiled:
            v = (fn(env) & mask) << lo
            env[net] = (env.get(net, 0) & ~(mask << lo)) | v
        return {p[0]: env[p[0]] for p in self.ports if p[1] == "output"}


def run_vectors(text: str, top: str, vectors) -> list[dict[str, int]]:
    """Evaluate a list of {input: value} dicts through one interpreter."""
    sim = VerilogInterpreter(text, top)
    return [sim(**vec) for vec in vectors]
