"""Reference interpreter.

Executes programs on concrete tensors and serves as the semantic-equivalence
oracle: each program is compiled once to a plain Python function (nested
loops over flat float64 buffers), randomized inputs are drawn per trial, and
outputs are compared under dtype-keyed tolerances.

Semantics: all loop kinds iterate sequentially (parallel/vectorized/unrolled/
binding annotations are no-ops here); reduction destinations are set to the
combiner identity at the iteration where every reduction axis sits at its
start value; if_then_else is lazy, so guarded out-of-range accesses in the
untaken branch never fault; all arithmetic is f64.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .ir import (
    Abs, Add, And, Cmp, Cond, DType, DTYPE_WIDTH_ORDER, Div, Equation, Exp,
    IAdd, IConst, IfThenElse, IMul, IndexExpr, ISub, IVar, Idx, Log,
    LoopHeader, Max, Min, Mul, Neg, Nest, Pow, Program, RangeCmp, Read, Role,
    SConst, ScalarExpr, Sqrt, Sub, TensorDecl, classify_reduction,
    infer_io, reads_of, validate, walk_scalar,
)
from .syntax import unparse


class OutOfBounds(Exception):
    def __init__(self, tensor: str, index: tuple[int, ...]):
        super().__init__(f"access {tensor}{list(index)} out of bounds")
        self.tensor = tensor
        self.index = index


class SignatureMismatch(Exception):
    pass


class ShrinkFailed(Exception):
    pass


@dataclass
class Env:
    tensors: dict[str, np.ndarray]
    rng_seed: int = 0

    def copy(self) -> "Env":
        return Env({n: a.copy() for n, a in self.tensors.items()}, self.rng_seed)


# -- guarded f64 helpers injected into compiled code -------------------------


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _log(x: float) -> float:
    if x > 0:
        return math.log(x)
    if x == 0:
        return -math.inf
    return math.nan


def _sqrt(x: float) -> float:
    return math.sqrt(x) if x >= 0 else math.nan


def _div(a: float, b: float) -> float:
    try:
        return a / b
    except ZeroDivisionError:
        if a == 0 or a != a:
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)


def _pow(a: float, b: float) -> float:
    try:
        r = a ** b
    except (OverflowError, ZeroDivisionError):
        return math.inf if a != 0 else math.inf
    except ValueError:
        return math.nan
    if isinstance(r, complex):
        return math.nan
    return float(r)


def _max(a: float, b: float) -> float:
    if a != a or b != b:
        return math.nan
    return a if a >= b else b


def _min(a: float, b: float) -> float:
    if a != a or b != b:
        return math.nan
    return a if a <= b else b


def _ld(buf, shape, idx, name):
    f = 0
    for v, d in zip(idx, shape):
        if v < 0 or v >= d:
            raise OutOfBounds(name, idx)
        f = f * d + v
    return buf[f]


def _flat(shape, idx, name):
    f = 0
    for v, d in zip(idx, shape):
        if v < 0 or v >= d:
            raise OutOfBounds(name, idx)
        f = f * d + v
    return f


_GLOBALS = {
    "_exp": _exp, "_log": _log, "_sqrt": _sqrt, "_div": _div, "_pow": _pow,
    "_max": _max, "_min": _min, "_ld": _ld, "_flat": _flat,
    "_abs": abs, "inf": math.inf,
}


# -- code generation ----------------------------------------------------------


def _gen_index(e: IndexExpr) -> str:
    if isinstance(e, IConst):
        return str(e.value)
    if isinstance(e, IVar):
        return f"v_{e.name}"
    op = {"IAdd": "+", "ISub": "-", "IMul": "*"}[type(e).__name__]
    return f"({_gen_index(e.lhs)}{op}{_gen_index(e.rhs)})"


def _gen_cond(c: Cond) -> str:
    if isinstance(c, Cmp):
        return f"({_gen_index(c.lhs)}{c.op}{_gen_index(c.rhs)})"
    if isinstance(c, RangeCmp):
        return f"({_gen_index(c.lo)}<={_gen_index(c.mid)}<{_gen_index(c.hi)})"
    return f"({_gen_cond(c.lhs)} and {_gen_cond(c.rhs)})"


def _gen_read(name: str, indices) -> str:
    idx = "(" + ",".join(_gen_index(i) for i in indices) + ("," if indices else "") + ")"
    return f"_ld(t_{name},s_{name},{idx},{name!r})"


def _gen_value(e: ScalarExpr) -> str:
    if isinstance(e, SConst):
        return repr(e.value) if not math.isinf(e.value) else ("inf" if e.value > 0 else "(-inf)")
    if isinstance(e, Read):
        return _gen_read(e.ref.name, e.ref.indices)
    if isinstance(e, Idx):
        return f"float({_gen_index(e.expr)})"
    if isinstance(e, Neg):
        return f"(-{_gen_value(e.x)})"
    if isinstance(e, Add):
        return f"({_gen_value(e.lhs)}+{_gen_value(e.rhs)})"
    if isinstance(e, Sub):
        return f"({_gen_value(e.lhs)}-{_gen_value(e.rhs)})"
    if isinstance(e, Mul):
        return f"({_gen_value(e.lhs)}*{_gen_value(e.rhs)})"
    if isinstance(e, Div):
        return f"_div({_gen_value(e.lhs)},{_gen_value(e.rhs)})"
    if isinstance(e, Pow):
        return f"_pow({_gen_value(e.lhs)},{_gen_value(e.rhs)})"
    if isinstance(e, Exp):
        return f"_exp({_gen_value(e.x)})"
    if isinstance(e, Log):
        return f"_log({_gen_value(e.x)})"
    if isinstance(e, Sqrt):
        return f"_sqrt({_gen_value(e.x)})"
    if isinstance(e, Abs):
        return f"_abs({_gen_value(e.x)})"
    if isinstance(e, Max):
        return f"_max({_gen_value(e.lhs)},{_gen_value(e.rhs)})"
    if isinstance(e, Min):
        return f"_min({_gen_value(e.lhs)},{_gen_value(e.rhs)})"
    if isinstance(e, IfThenElse):
        return f"({_gen_value(e.then)} if {_gen_cond(e.cond)} else {_gen_value(e.other)})"
    raise TypeError(type(e))


def _gen_equation(eq: Equation, scope: list[LoopHeader], lines: list[str], pad: str):
    info = classify_reduction(eq, scope)
    name = eq.lhs.name
    idx = "(" + ",".join(_gen_index(i) for i in eq.lhs.indices) + ("," if eq.lhs.indices else "") + ")"
    lines.append(f"{pad}_i = _flat(s_{name},{idx},{name!r})")
    if info.is_reduction:
        starts = {h.index: h.start for h in scope}
        guard = " and ".join(f"v_{ax}=={starts[ax]}" for ax in sorted(info.reduction_axes))
        lines.append(f"{pad}if {guard}: t_{name}[_i] = {repr(info.identity)}")
    lines.append(f"{pad}t_{name}[_i] = {_gen_value(eq.rhs)}")


def _gen_nest(nest: Nest, scope: list[LoopHeader], lines: list[str], depth: int):
    pad = "    " * (depth + 1)
    scope = scope + list(nest.loops)
    for h in nest.loops:
        lines.append(f"{pad}for v_{h.index} in range({h.start},{h.start + h.extent}):")
        pad += "    "
        depth += 1
    for item in nest.body:
        if isinstance(item, Equation):
            _gen_equation(item, scope, lines, pad)
        else:
            _gen_nest(item, scope, lines, depth)


def _compile_source(program: Program) -> str:
    lines = ["def _run(bufs, shapes):"]
    names = sorted(program.io)
    for n in names:
        lines.append(f"    t_{n} = bufs[{n!r}]; s_{n} = shapes[{n!r}]")
    for nest in program.exprs:
        _gen_nest(nest, [], lines, 0)
    lines.append("    return None")
    return "\n".join(lines)


@functools.lru_cache(maxsize=512)
def _compiled(text: str):
    from .syntax import parse

    program = parse(text)
    ns = dict(_GLOBALS)
    exec(compile(_compile_source(program), "<leir>", "exec"), ns)
    return ns["_run"]


def run(program: Program, env: Env) -> Env:
    """Execute the program over env's tensors, returning a new Env."""
    out = env.copy()
    bufs: dict[str, list[float]] = {}
    shapes: dict[str, tuple[int, ...]] = {}
    for name, decl in program.io.items():
        arr = out.tensors.get(name)
        if arr is None:
            arr = np.zeros(decl.shape, dtype=np.float64)
        bufs[name] = [float(x) for x in np.asarray(arr, dtype=np.float64).ravel()]
        shapes[name] = decl.shape
    _compiled(unparse(program))(bufs, shapes)
    for name, decl in program.io.items():
        out.tensors[name] = np.array(bufs[name], dtype=np.float64).reshape(decl.shape)
    return out


# -- randomized environments ---------------------------------------------------


def positive_domain_tensors(program: Program) -> set[str]:
    """Input tensors read under log/sqrt, in denominators, or as pow bases."""
    out: set[str] = set()
    for _, eq in program.equations():
        for node in walk_scalar(eq.rhs):
            if isinstance(node, (Log, Sqrt)):
                out.update(r.name for r in reads_of(node.x))
            elif isinstance(node, Div):
                out.update(r.name for r in reads_of(node.rhs))
            elif isinstance(node, Pow):
                out.update(r.name for r in reads_of(node.lhs))
    return out


def _tensor_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed & 0x7FFFFFFF, *name.encode("utf-8")])


def random_env(program: Program, seed: int, positive: set[str] | None = None) -> Env:
    if positive is None:
        positive = positive_domain_tensors(program)
    tensors: dict[str, np.ndarray] = {}
    for name, decl in program.io.items():
        shape = decl.shape
        if decl.role is not Role.INPUT:
            tensors[name] = np.zeros(shape, dtype=np.float64)
            continue
        rng = _tensor_rng(seed, name)
        if decl.dtype is DType.I64:
            tensors[name] = rng.integers(0, 8, size=shape).astype(np.float64)
        elif decl.dtype is DType.B8:
            tensors[name] = (rng.random(shape) < 0.5).astype(np.float64)
        elif name in positive:
            tensors[name] = rng.uniform(0.25, 1.25, size=shape)
        else:
            tensors[name] = rng.uniform(-1.0, 1.0, size=shape)
    return Env(tensors, seed)


# -- equivalence oracle ---------------------------------------------------------


@dataclass(frozen=True)
class Trial:
    seed: int
    max_abs_err: float
    max_rel_err: float
    ok: bool


@dataclass(frozen=True)
class VerifyReport:
    equivalent: bool
    trials: tuple[Trial, ...] = ()
    tolerance_used: tuple[float, float] = (0.0, 0.0)
    reason: str = ""


def output_tolerance(program: Program) -> tuple[float, float]:
    """(rtol, atol) keyed to the narrowest declared output dtype."""
    dts = [d.dtype for d in program.io.values() if d.role is Role.OUTPUT]
    if not dts:
        return DType.F64.tolerance
    narrowest = min(dts, key=DTYPE_WIDTH_ORDER.index)
    return narrowest.tolerance


def _signature(program: Program) -> dict[str, tuple]:
    return {
        n: (d.dtype, d.shape, d.role)
        for n, d in program.io.items()
        if d.role in (Role.INPUT, Role.OUTPUT)
    }


def align_io(program: Program, reference: Program) -> Program:
    """Re-infer roles using the reference's io as ground truth.

    Canonical text does not record roles, so a freshly parsed transformed
    program can show helper tensors as outputs.  Tensors shared with the
    reference take its roles; tensors only the transformed program knows
    become intermediates.
    """
    roles = {n: d.role for n, d in reference.io.items()}
    for name in program.tensor_names():
        roles.setdefault(name, Role.INTERMEDIATE)
    return Program(program.exprs, infer_io(program, roles))


def equivalent(a: Program, b: Program, trials: int = 3, seed: int = 0) -> VerifyReport:
    if _signature(a) != _signature(b):
        raise SignatureMismatch(f"io signatures differ: {_signature(a)} vs {_signature(b)}")
    rtol, atol = output_tolerance(a)
    positive = positive_domain_tensors(a) | positive_domain_tensors(b)
    results: list[Trial] = []
    for t in range(trials):
        env = random_env(a, seed + t, positive)
        out_a = run(a, env)
        out_b = run(b, env.copy())
        max_abs = 0.0
        max_rel = 0.0
        ok = True
        for name, decl in a.io.items():
            if decl.role is not Role.OUTPUT:
                continue
            x = out_a.tensors[name]
            y = out_b.tensors[name]
            if not np.all(np.isclose(y, x, rtol=rtol, atol=atol, equal_nan=True)):
                ok = False
            finite = np.isfinite(x) & np.isfinite(y)
            if finite.any():
                diff = np.abs(x[finite] - y[finite])
                max_abs = max(max_abs, float(diff.max(initial=0.0)))
                denom = np.maximum(np.abs(x[finite]), 1e-300)
                max_rel = max(max_rel, float((diff / denom).max(initial=0.0)))
            if np.isfinite(x).sum() != np.isfinite(y).sum():
                ok = False
        results.append(Trial(seed + t, max_abs, max_rel, ok))
    return VerifyReport(all(r.ok for r in results), tuple(results), (rtol, atol))


# -- shape shrinking -------------------------------------------------------------


def _shrink_candidates(cap: int) -> list[int]:
    vals = [cap, cap - 2, cap - 4]
    return [max(v, 2) for v in vals]


def _remap_index(e: IndexExpr, const_map: dict[int, int]) -> IndexExpr:
    if isinstance(e, IConst):
        return IConst(const_map.get(e.value, e.value))
    if isinstance(e, IVar):
        return e
    cls = type(e)
    return cls(_remap_index(e.lhs, const_map), _remap_index(e.rhs, const_map))


def _remap_scalar(e: ScalarExpr, const_map: dict[int, int]) -> ScalarExpr:
    from .ir import rewrite_scalar

    def fn(node):
        if isinstance(node, Read):
            ref = node.ref
            return Read(replace(ref, indices=tuple(_remap_index(i, const_map) for i in ref.indices)))
        if isinstance(node, Idx):
            return Idx(_remap_index(node.expr, const_map))
        if isinstance(node, IfThenElse):
            return IfThenElse(_remap_cond(node.cond, const_map), node.then, node.other)
        if isinstance(node, SConst):
            v = node.value
            if math.isfinite(v) and v == int(v) and int(v) in const_map:
                return SConst(float(const_map[int(v)]))
            return node
        return node

    return rewrite_scalar(e, fn)


def _remap_cond(c: Cond, const_map: dict[int, int]) -> Cond:
    if isinstance(c, Cmp):
        return Cmp(c.op, _remap_index(c.lhs, const_map), _remap_index(c.rhs, const_map))
    if isinstance(c, RangeCmp):
        return RangeCmp(
            _remap_index(c.lo, const_map),
            _remap_index(c.mid, const_map),
            _remap_index(c.hi, const_map),
        )
    return And(_remap_cond(c.lhs, const_map), _remap_cond(c.rhs, const_map))


def shrink_shapes(program: Program, cap: int = 8) -> Program:
    """Rescale oversized loop extents to small composite values.

    Each distinct extent above the cap maps to a value from a small composite
    cycle; index constants equal to an old extent (offsets) or old extent - 1
    (last-element accesses) are remapped alongside.  The result must
    re-validate or ShrinkFailed is raised.
    """
    extents: list[int] = []
    for nest in program.exprs:
        for h in nest.all_loops():
            if h.extent > cap and h.extent not in extents:
                extents.append(h.extent)
    if not extents:
        return program
    cycle = _shrink_candidates(cap)
    ext_map = {old: cycle[i % len(cycle)] for i, old in enumerate(extents)}
    const_map: dict[int, int] = {}
    for old, new in ext_map.items():
        const_map[old] = new
        const_map.setdefault(old - 1, new - 1)

    def shrink_nest(nest: Nest) -> Nest:
        loops = tuple(
            replace(h, extent=ext_map.get(h.extent, h.extent)) for h in nest.loops
        )
        body = []
        for item in nest.body:
            if isinstance(item, Nest):
                body.append(shrink_nest(item))
            else:
                lhs = replace(
                    item.lhs,
                    indices=tuple(_remap_index(i, const_map) for i in item.lhs.indices),
                )
                body.append(Equation(lhs, _remap_scalar(item.rhs, const_map)))
        return Nest(loops, tuple(body))

    shrunk = Program(tuple(shrink_nest(n) for n in program.exprs))
    roles = {n: d.role for n, d in program.io.items()}
    shrunk = Program(shrunk.exprs, infer_io(shrunk, roles))
    diags = validate(shrunk)
    if diags:
        raise ShrinkFailed(f"shrunk program does not validate: {diags[:3]}")
    return shrunk
