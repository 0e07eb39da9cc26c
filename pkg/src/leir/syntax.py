"""Surface syntax: text <-> AST.

Grammar (whitespace-insensitive; LaTeX command residue is stripped first):

    program  := expr+
    expr     := segment+ ';'
    segment  := loop* group          (first segment of a top-level expr
                                      requires at least one loop)
    group    := '[' item+ ']'
    item     := equation ';' | segment ';'?
    loop     := KIND '^{' INT '}' '_{' IDENT '=' INT '}'   KIND in {L,P,V,U,B}
    tensor   := NAME '^{' DTYPE ',' SCOPE '}' ['_{' index (',' index)* '}']

Later segments of a multi-segment expression nest inside the previous
segment's body, so shared outer loops scope over the whole expression.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .ir import (
    Abs, Add, And, Cmp, Cond, DType, Div, Equation, Exp, IAdd, IConst, IfThenElse,
    IMul, IndexExpr, ISub, IVar, Idx, Log, LoopHeader, LoopKind, Max, MemScope,
    Min, Mul, Neg, Nest, Pow, Program, RangeCmp, Read, Role, SConst, ScalarExpr,
    Sqrt, Sub, TensorDecl, TensorRef, infer_io,
)


@dataclass(frozen=True)
class SourceSpan:
    byte_start: int
    byte_end: int


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan, expected: tuple[str, ...] = ()):
        super().__init__(f"{message} at bytes {span.byte_start}..{span.byte_end}")
        self.message = message
        self.span = span
        self.expected = expected


_LATEX_SUBSTITUTIONS = [
    (re.compile(r"\\text\{([^{}]*)\}"), r"\1"),
    (re.compile(r"\\leq"), "<="),
    (re.compile(r"\\geq"), ">="),
    (re.compile(r"\\times"), "*"),
    (re.compile(r"\\infty"), "inf"),
    (re.compile(r"\\cdot"), "*"),
]


def _strip(text: str) -> tuple[str, list[int]]:
    """Remove LaTeX residue and whitespace, keeping original byte offsets."""
    for pat, rep in _LATEX_SUBSTITUTIONS:
        text = pat.sub(rep, text)
    out: list[str] = []
    offsets: list[int] = []
    for i, ch in enumerate(text):
        if ch.isspace() or ch in "\\$":
            continue
        out.append(ch)
        offsets.append(i)
    offsets.append(len(text))
    return "".join(out), offsets


_KINDS = {k.token: k for k in LoopKind}
_DTYPES = {d.token: d for d in DType}
_SCOPES = {s.token: s for s in MemScope}
_FUNCS1 = {"exp": Exp, "log": Log, "sqrt": Sqrt, "abs": Abs}
_FUNCS2 = {"max": Max, "min": Min}


class _Parser:
    def __init__(self, text: str):
        self.src, self.offsets = _strip(text)
        self.pos = 0

    # -- primitives --------------------------------------------------------

    def _span(self, start: int | None = None) -> SourceSpan:
        p = self.pos if start is None else start
        p = min(p, len(self.src))
        return SourceSpan(self.offsets[p], self.offsets[min(p + 1, len(self.src))])

    def fail(self, message: str, expected: tuple[str, ...] = ()):
        raise ParseError(message, self._span(), expected)

    def peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.src[i] if i < len(self.src) else ""

    def eat(self, literal: str):
        if not self.src.startswith(literal, self.pos):
            self.fail(f"expected {literal!r}", (literal,))
        self.pos += len(literal)

    def try_eat(self, literal: str) -> bool:
        if self.src.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def ident(self) -> str:
        m = re.match(r"[A-Za-z][A-Za-z0-9_]*", self.src[self.pos:])
        if not m:
            self.fail("expected identifier", ("IDENT",))
        self.pos += m.end()
        return m.group()

    def integer(self) -> int:
        m = re.match(r"-?\d+", self.src[self.pos:])
        if not m:
            self.fail("expected integer", ("INT",))
        self.pos += m.end()
        return int(m.group())

    def number(self) -> float:
        m = re.match(r"\d+(\.\d+)?([eE][+-]?\d+)?", self.src[self.pos:])
        if not m:
            self.fail("expected number", ("NUMBER",))
        self.pos += m.end()
        return float(m.group())

    # -- program structure --------------------------------------------------

    def program(self) -> Program:
        exprs: list[Nest] = []
        while self.pos < len(self.src):
            exprs.append(self.expr())
        if not exprs:
            self.fail("expected expr", ("expr",))
        prog = Program(tuple(exprs))
        return Program(prog.exprs, infer_io(prog))

    def expr(self) -> Nest:
        segments = [self.segment(top=True)]
        while self.pos < len(self.src) and self.peek() != ";":
            segments.append(self.segment(top=False))
        self.eat(";")
        nest = segments[-1]
        for seg in reversed(segments[:-1]):
            nest = Nest(seg.loops, seg.body + (nest,))
        return nest

    def segment(self, top: bool) -> Nest:
        loops: list[LoopHeader] = []
        while self._at_loop():
            loops.append(self.loop())
        if top and not loops:
            self.fail("top-level expression requires at least one loop", ("loop",))
        body = self.group()
        return Nest(tuple(loops), body)

    def _at_loop(self) -> bool:
        # loop kinds are single reserved letters; tensors put a dtype letter
        # (not a digit) right after "^{"
        c = self.peek()
        if c not in _KINDS:
            return False
        return self.peek(1) == "^" and self.peek(2) == "{" and self.peek(3).isdigit()

    def loop(self) -> LoopHeader:
        kind = _KINDS[self.peek()]
        self.pos += 1
        self.eat("^{")
        extent = self.integer()
        self.eat("}")
        self.eat("_{")
        index = self.ident()
        self.eat("=")
        start = self.integer()
        self.eat("}")
        return LoopHeader(kind, index, start, extent)

    def group(self) -> tuple:
        self.eat("[")
        items: list = []
        while not self.try_eat("]"):
            if self.pos >= len(self.src):
                self.fail("unterminated group", ("]",))
            if self._at_loop() or self.peek() == "[":
                seg = self.segment(top=False)
                self.try_eat(";")
                items.append(seg)
            else:
                items.append(self.equation())
                self.eat(";")
        if not items:
            self.fail("empty group", ("item",))
        return tuple(items)

    def equation(self) -> Equation:
        lhs = self.tensor()
        self.eat("=")
        rhs = self.value()
        return Equation(lhs, rhs)

    def tensor(self) -> TensorRef:
        start = self.pos
        name = self.ident()
        if not name[0].isupper() or any(c.isupper() for c in name[1:]):
            raise ParseError(f"bad tensor name {name!r}", self._span(start))
        self.eat("^{")
        dt = self.ident()
        # dtype tokens end in digits which ident() absorbed
        m = re.fullmatch(r"([a-z])(\d+)", dt)
        if not m or dt not in _DTYPES:
            raise ParseError(f"bad dtype token {dt!r}", self._span(start))
        self.eat(",")
        sc = self.ident()
        if sc not in _SCOPES:
            raise ParseError(f"bad scope token {sc!r}", self._span(start))
        self.eat("}")
        indices: tuple[IndexExpr, ...] = ()
        if self.try_eat("_{"):
            idx = [self.index_expr()]
            while self.try_eat(","):
                idx.append(self.index_expr())
            self.eat("}")
            indices = tuple(idx)
        return TensorRef(name, _DTYPES[dt], _SCOPES[sc], indices)

    # -- index expressions ---------------------------------------------------

    def index_expr(self) -> IndexExpr:
        node = self.index_term()
        while self.peek() in "+-":
            op = self.peek()
            self.pos += 1
            rhs = self.index_term()
            node = IAdd(node, rhs) if op == "+" else ISub(node, rhs)
        return node

    def index_term(self) -> IndexExpr:
        node = self.index_factor()
        while self.peek() == "*" and self.peek(1) != "*":
            self.pos += 1
            node = IMul(node, self.index_factor())
        return node

    def index_factor(self) -> IndexExpr:
        if self.try_eat("("):
            node = self.index_expr()
            self.eat(")")
            return node
        if self.peek() == "-":
            self.pos += 1
            inner = self.index_factor()
            if isinstance(inner, IConst):
                return IConst(-inner.value)
            return ISub(IConst(0), inner)
        if self.peek().isdigit():
            return IConst(self.integer())
        return IVar(self.ident())

    # -- value expressions ---------------------------------------------------

    def value(self) -> ScalarExpr:
        node = self.value_term()
        while self.peek() in "+-":
            op = self.peek()
            self.pos += 1
            rhs = self.value_term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def value_term(self) -> ScalarExpr:
        node = self.value_unary()
        while True:
            if self.peek() == "*" and self.peek(1) != "*":
                self.pos += 1
                node = Mul(node, self.value_unary())
            elif self.peek() == "/":
                self.pos += 1
                node = Div(node, self.value_unary())
            else:
                return node

    def value_unary(self) -> ScalarExpr:
        if self.peek() == "-":
            self.pos += 1
            inner = self.value_unary()
            if isinstance(inner, SConst):
                return SConst(-inner.value)
            return Neg(inner)
        return self.value_power()

    def value_power(self) -> ScalarExpr:
        base = self.value_atom()
        if self.try_eat("**"):
            return Pow(base, self.value_unary())
        return base

    def value_atom(self) -> ScalarExpr:
        c = self.peek()
        if c == "(":
            self.pos += 1
            node = self.value()
            self.eat(")")
            return node
        if c.isdigit():
            return SConst(self.number())
        if not c.isalpha():
            self.fail("expected value", ("value",))
        start = self.pos
        name = self.ident()
        if name == "inf":
            return SConst(math.inf)
        if name in _FUNCS1:
            self.eat("(")
            x = self.value()
            self.eat(")")
            return _FUNCS1[name](x)
        if name in _FUNCS2:
            self.eat("(")
            a = self.value()
            self.eat(",")
            b = self.value()
            self.eat(")")
            return _FUNCS2[name](a, b)
        if name == "if_then_else":
            self.eat("(")
            cond = self.condition()
            self.eat(",")
            then = self.value()
            self.eat(",")
            other = self.value()
            self.eat(")")
            return IfThenElse(cond, then, other)
        if name[0].isupper():
            self.pos = start
            return Read(self.tensor())
        # bare loop-index variable used as an integer value
        return Idx(IVar(name))

    def condition(self) -> Cond:
        node: Cond = self.comparison()
        while self.try_eat("&"):
            node = And(node, self.comparison())
        return node

    def comparison(self) -> Cond:
        lhs = self.index_expr()
        op = self._cmp_op()
        mid = self.index_expr()
        if op in ("<", "<=") and self.peek() in "<>":
            op2 = self._cmp_op()
            if op2 not in ("<", "<="):
                self.fail("bad chained comparison", ("<", "<="))
            hi = self.index_expr()
            if op == "<=" and op2 == "<":
                return RangeCmp(lhs, mid, hi)
            # normalize other chains into a conjunction
            return And(Cmp(op, lhs, mid), Cmp(op2, mid, hi))
        return Cmp(op, lhs, mid)

    def _cmp_op(self) -> str:
        for op in ("<=", ">=", "==", "<", ">"):
            if self.try_eat(op):
                return op
        self.fail("expected comparison operator", ("<", "<=", ">", ">=", "=="))


def parse(text: str) -> Program:
    return _Parser(text).program()


# ---------------------------------------------------------------------------
# Canonical printing.


def _fmt_number(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _print_index(e: IndexExpr, parent_prec: int = 0) -> str:
    if isinstance(e, IConst):
        s = str(e.value)
        return f"({s})" if e.value < 0 and parent_prec > 0 else s
    if isinstance(e, IVar):
        return e.name
    if isinstance(e, IAdd):
        s = f"{_print_index(e.lhs, 1)}+{_print_index(e.rhs, 2)}"
        prec = 1
    elif isinstance(e, ISub):
        s = f"{_print_index(e.lhs, 1)}-{_print_index(e.rhs, 2)}"
        prec = 1
    else:
        s = f"{_print_index(e.lhs, 2)}*{_print_index(e.rhs, 3)}"
        prec = 2
    return f"({s})" if prec < parent_prec else s


def _print_ref(ref: TensorRef) -> str:
    s = f"{ref.name}^{{{ref.dtype.token},{ref.scope.token}}}"
    if ref.indices:
        s += "_{" + ",".join(_print_index(i) for i in ref.indices) + "}"
    return s


def _print_cond(c: Cond) -> str:
    if isinstance(c, Cmp):
        return f"{_print_index(c.lhs)}{c.op}{_print_index(c.rhs)}"
    if isinstance(c, RangeCmp):
        return f"{_print_index(c.lo)}<={_print_index(c.mid)}<{_print_index(c.hi)}"
    return f"{_print_cond(c.lhs)}&{_print_cond(c.rhs)}"


# precedence: add/sub 1, mul/div 2, unary neg 3, pow 4, atom 5
def _print_value(e: ScalarExpr, parent_prec: int = 0) -> str:
    if isinstance(e, SConst):
        s = _fmt_number(e.value)
        return f"({s})" if s.startswith("-") and parent_prec > 0 else s
    if isinstance(e, Read):
        return _print_ref(e.ref)
    if isinstance(e, Idx):
        return _print_index(e.expr, parent_prec)
    if isinstance(e, IfThenElse):
        return f"if_then_else({_print_cond(e.cond)},{_print_value(e.then)},{_print_value(e.other)})"
    for cls, name in ((Exp, "exp"), (Log, "log"), (Sqrt, "sqrt"), (Abs, "abs")):
        if isinstance(e, cls):
            return f"{name}({_print_value(e.x)})"
    for cls, name in ((Max, "max"), (Min, "min")):
        if isinstance(e, cls):
            return f"{name}({_print_value(e.lhs)},{_print_value(e.rhs)})"
    if isinstance(e, Neg):
        s = f"-{_print_value(e.x, 3)}"
        return f"({s})" if 3 < parent_prec else s
    if isinstance(e, Pow):
        s = f"{_print_value(e.lhs, 5)}**{_print_value(e.rhs, 4)}"
        return f"({s})" if 4 < parent_prec else s
    # right operands parenthesize at equal precedence to keep printing
    # injective (a+(b+c) must not collapse into a+b+c)
    ops = {Add: ("+", 1, 1, 2), Sub: ("-", 1, 1, 2), Mul: ("*", 2, 2, 3), Div: ("/", 2, 2, 3)}
    op, prec, lp, rp = ops[type(e)]
    s = f"{_print_value(e.lhs, lp)}{op}{_print_value(e.rhs, rp)}"
    return f"({s})" if prec < parent_prec else s


def _print_nest(nest: Nest) -> str:
    parts = [f"{h.kind.token}^{{{h.extent}}}_{{{h.index}={h.start}}}" for h in nest.loops]
    body = []
    for item in nest.body:
        if isinstance(item, Equation):
            body.append(f"{_print_ref(item.lhs)}={_print_value(item.rhs)};")
        else:
            body.append(_print_nest(item) + ";")
    return "".join(parts) + "[" + "".join(body) + "]"


def unparse(program: Program) -> str:
    return "".join(_print_nest(n) + ";" for n in program.exprs)


print_program = unparse


def byte_stats(text: str) -> dict[str, int]:
    raw = text.encode("utf-8")
    return {
        "bytes": len(raw),
        "nonspace_bytes": sum(1 for b in raw if b not in b" \t\r\n"),
    }
