"""Core AST for the loop-equation IR.

A program is an ordered list of loop nests.  Each nest carries loop headers
(serial, parallel, vectorized, unrolled, or GPU-binding loops) over a body of
element-wise equations and optional inner nests.  All node types are frozen
dataclasses; values are safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Optional, Union


class DType(Enum):
    F16 = "f16"
    F32 = "f32"
    F64 = "f64"
    I64 = "i64"
    B8 = "b8"

    @property
    def token(self) -> str:
        return self.value

    @property
    def tolerance(self) -> tuple[float, float]:
        """(rtol, atol) for output comparison; exact dtypes return (0, 0)."""
        return _TOLERANCES[self]


_TOLERANCES = {
    DType.F64: (1e-9, 1e-12),
    DType.F32: (1e-5, 1e-8),
    DType.F16: (1e-2, 1e-3),
    DType.I64: (0.0, 0.0),
    DType.B8: (0.0, 0.0),
}

# narrowest-first ordering used when picking a comparison tolerance
DTYPE_WIDTH_ORDER = [DType.B8, DType.I64, DType.F16, DType.F32, DType.F64]


class MemScope(Enum):
    GLOBAL = "g"
    SHARED = "s"
    LOCAL = "l"

    @property
    def token(self) -> str:
        return self.value


class LoopKind(Enum):
    SERIAL = "L"
    PARALLEL = "P"
    VECTORIZED = "V"
    UNROLLED = "U"
    BINDING = "B"

    @property
    def token(self) -> str:
        return self.value


# binding index prefix -> (family, axis position)
BIND_PREFIXES = ("bx", "by", "bz", "tx", "ty", "tz")
BLOCK_CAPS = {"bx": 2**31 - 1, "by": 65535, "bz": 65535}
THREAD_CAPS = {"tx": 1024, "ty": 1024, "tz": 64}
BIND_CAPS = {**BLOCK_CAPS, **THREAD_CAPS}

RESERVED_TENSOR_NAMES = frozenset({"L", "P", "V", "U", "B", "T"})


def bind_prefix_of(index: str) -> Optional[str]:
    for p in BIND_PREFIXES:
        if index.startswith(p):
            return p
    return None


@dataclass(frozen=True)
class LoopHeader:
    kind: LoopKind
    index: str
    start: int
    extent: int

    @property
    def bind_target(self) -> Optional[str]:
        if self.kind is LoopKind.BINDING:
            return bind_prefix_of(self.index)
        return None

    @property
    def stop(self) -> int:
        return self.start + self.extent


# ---------------------------------------------------------------------------
# Index expressions: integer arithmetic over loop indices, closed under +,-,*.


@dataclass(frozen=True)
class IConst:
    value: int


@dataclass(frozen=True)
class IVar:
    name: str


@dataclass(frozen=True)
class IAdd:
    lhs: "IndexExpr"
    rhs: "IndexExpr"


@dataclass(frozen=True)
class ISub:
    lhs: "IndexExpr"
    rhs: "IndexExpr"


@dataclass(frozen=True)
class IMul:
    lhs: "IndexExpr"
    rhs: "IndexExpr"


IndexExpr = Union[IConst, IVar, IAdd, ISub, IMul]


def index_vars(e: IndexExpr) -> set[str]:
    if isinstance(e, IVar):
        return {e.name}
    if isinstance(e, (IAdd, ISub, IMul)):
        return index_vars(e.lhs) | index_vars(e.rhs)
    return set()


def subst_index(e: IndexExpr, mapping: dict[str, IndexExpr]) -> IndexExpr:
    if isinstance(e, IVar):
        return mapping.get(e.name, e)
    if isinstance(e, IAdd):
        return IAdd(subst_index(e.lhs, mapping), subst_index(e.rhs, mapping))
    if isinstance(e, ISub):
        return ISub(subst_index(e.lhs, mapping), subst_index(e.rhs, mapping))
    if isinstance(e, IMul):
        return IMul(subst_index(e.lhs, mapping), subst_index(e.rhs, mapping))
    return e


def index_bounds(e: IndexExpr, env: dict[str, tuple[int, int]]) -> tuple[int, int]:
    """Inclusive (lo, hi) interval of an index expression under loop ranges."""
    if isinstance(e, IConst):
        return (e.value, e.value)
    if isinstance(e, IVar):
        if e.name not in env:
            raise KeyError(e.name)
        return env[e.name]
    a = index_bounds(e.lhs, env)
    b = index_bounds(e.rhs, env)
    if isinstance(e, IAdd):
        return (a[0] + b[0], a[1] + b[1])
    if isinstance(e, ISub):
        return (a[0] - b[1], a[1] - b[0])
    products = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
    return (min(products), max(products))


# ---------------------------------------------------------------------------
# Scalar expressions (equation right-hand sides).


@dataclass(frozen=True)
class TensorRef:
    name: str
    dtype: DType
    scope: MemScope
    indices: tuple[IndexExpr, ...] = ()


@dataclass(frozen=True)
class SConst:
    value: float


@dataclass(frozen=True)
class Read:
    ref: TensorRef


@dataclass(frozen=True)
class Idx:
    """Index arithmetic used directly as an equation value (i64 results)."""

    expr: IndexExpr


@dataclass(frozen=True)
class Neg:
    x: "ScalarExpr"


@dataclass(frozen=True)
class Add:
    lhs: "ScalarExpr"
    rhs: "ScalarExpr"


@dataclass(frozen=True)
class Sub:
    lhs: "ScalarExpr"
    rhs: "ScalarExpr"


@dataclass(frozen=True)
class Mul:
    lhs: "ScalarExpr"
    rhs: "ScalarExpr"


@dataclass(frozen=True)
class Div:
    lhs: "ScalarExpr"
    rhs: "ScalarExpr"


@dataclass(frozen=True)
class Pow:
    lhs: "ScalarExpr"
    rhs: "ScalarExpr"


@dataclass(frozen=True)
class Exp:
    x: "ScalarExpr"


@dataclass(frozen=True)
class Log:
    x: "ScalarExpr"


@dataclass(frozen=True)
class Sqrt:
    x: "ScalarExpr"


@dataclass(frozen=True)
class Abs:
    x: "ScalarExpr"


@dataclass(frozen=True)
class Max:
    lhs: "ScalarExpr"
    rhs: "ScalarExpr"


@dataclass(frozen=True)
class Min:
    lhs: "ScalarExpr"
    rhs: "ScalarExpr"


CMP_OPS = ("<=", ">=", "==", "<", ">")


@dataclass(frozen=True)
class Cmp:
    op: str
    lhs: IndexExpr
    rhs: IndexExpr


@dataclass(frozen=True)
class RangeCmp:
    """lo <= mid < hi over index arithmetic."""

    lo: IndexExpr
    mid: IndexExpr
    hi: IndexExpr


@dataclass(frozen=True)
class And:
    lhs: "Cond"
    rhs: "Cond"


Cond = Union[Cmp, RangeCmp, And]


@dataclass(frozen=True)
class IfThenElse:
    cond: Cond
    then: "ScalarExpr"
    other: "ScalarExpr"


ScalarExpr = Union[
    SConst, Read, Idx, Neg, Add, Sub, Mul, Div, Pow,
    Exp, Log, Sqrt, Abs, Max, Min, IfThenElse,
]

_BINARY = (Add, Sub, Mul, Div, Pow, Max, Min)
_UNARY = (Neg, Exp, Log, Sqrt, Abs)


def scalar_children(e: ScalarExpr) -> tuple[ScalarExpr, ...]:
    if isinstance(e, _BINARY):
        return (e.lhs, e.rhs)
    if isinstance(e, _UNARY):
        return (e.x,)
    if isinstance(e, IfThenElse):
        return (e.then, e.other)
    return ()


def walk_scalar(e: ScalarExpr) -> Iterator[ScalarExpr]:
    yield e
    for c in scalar_children(e):
        yield from walk_scalar(c)


def reads_of(e: ScalarExpr) -> list[TensorRef]:
    return [n.ref for n in walk_scalar(e) if isinstance(n, Read)]


def cond_index_exprs(c: Cond) -> list[IndexExpr]:
    if isinstance(c, Cmp):
        return [c.lhs, c.rhs]
    if isinstance(c, RangeCmp):
        return [c.lo, c.mid, c.hi]
    return cond_index_exprs(c.lhs) + cond_index_exprs(c.rhs)


def scalar_index_exprs(e: ScalarExpr) -> list[IndexExpr]:
    out: list[IndexExpr] = []
    for n in walk_scalar(e):
        if isinstance(n, Read):
            out.extend(n.ref.indices)
        elif isinstance(n, Idx):
            out.append(n.expr)
        elif isinstance(n, IfThenElse):
            out.extend(cond_index_exprs(n.cond))
    return out


def scalar_vars(e: ScalarExpr) -> set[str]:
    out: set[str] = set()
    for ix in scalar_index_exprs(e):
        out |= index_vars(ix)
    return out


def rewrite_scalar(e: ScalarExpr, fn) -> ScalarExpr:
    """Bottom-up rewrite: fn is applied to every node after its children."""
    if isinstance(e, _BINARY):
        e = type(e)(rewrite_scalar(e.lhs, fn), rewrite_scalar(e.rhs, fn))
    elif isinstance(e, _UNARY):
        e = type(e)(rewrite_scalar(e.x, fn))
    elif isinstance(e, IfThenElse):
        e = IfThenElse(e.cond, rewrite_scalar(e.then, fn), rewrite_scalar(e.other, fn))
    return fn(e)


def subst_scalar_indices(e: ScalarExpr, mapping: dict[str, IndexExpr]) -> ScalarExpr:
    def fn(node: ScalarExpr) -> ScalarExpr:
        if isinstance(node, Read):
            ref = node.ref
            return Read(replace(ref, indices=tuple(subst_index(i, mapping) for i in ref.indices)))
        if isinstance(node, Idx):
            return Idx(subst_index(node.expr, mapping))
        if isinstance(node, IfThenElse):
            return IfThenElse(_subst_cond(node.cond, mapping), node.then, node.other)
        return node

    return rewrite_scalar(e, fn)


def _subst_cond(c: Cond, mapping: dict[str, IndexExpr]) -> Cond:
    if isinstance(c, Cmp):
        return Cmp(c.op, subst_index(c.lhs, mapping), subst_index(c.rhs, mapping))
    if isinstance(c, RangeCmp):
        return RangeCmp(subst_index(c.lo, mapping), subst_index(c.mid, mapping), subst_index(c.hi, mapping))
    return And(_subst_cond(c.lhs, mapping), _subst_cond(c.rhs, mapping))


# ---------------------------------------------------------------------------
# Equations, nests, programs.


@dataclass(frozen=True)
class Equation:
    lhs: TensorRef
    rhs: ScalarExpr


@dataclass(frozen=True)
class Nest:
    loops: tuple[LoopHeader, ...]
    body: tuple[Union[Equation, "Nest"], ...]

    def equations(self) -> Iterator[Equation]:
        for item in self.body:
            if isinstance(item, Equation):
                yield item
            else:
                yield from item.equations()

    def all_loops(self) -> Iterator[LoopHeader]:
        yield from self.loops
        for item in self.body:
            if isinstance(item, Nest):
                yield from item.all_loops()


class Role(Enum):
    INPUT = "input"
    OUTPUT = "output"
    INTERMEDIATE = "intermediate"


@dataclass(frozen=True)
class TensorDecl:
    dtype: DType
    shape: tuple[int, ...]
    role: Role


@dataclass(frozen=True)
class Program:
    exprs: tuple[Nest, ...]
    io: dict[str, TensorDecl] = field(default_factory=dict, compare=False)

    def equations(self) -> Iterator[tuple[int, Equation]]:
        for i, nest in enumerate(self.exprs):
            for eq in nest.equations():
                yield i, eq

    def tensor_names(self) -> set[str]:
        names: set[str] = set()
        for _, eq in self.equations():
            names.add(eq.lhs.name)
            names.update(r.name for r in reads_of(eq.rhs))
        return names

    def inputs(self) -> dict[str, TensorDecl]:
        return {n: d for n, d in self.io.items() if d.role is Role.INPUT}

    def outputs(self) -> dict[str, TensorDecl]:
        return {n: d for n, d in self.io.items() if d.role is Role.OUTPUT}


def structural_eq(a: Program, b: Program) -> bool:
    """Identity of the loop/equation structure and the io signature."""
    return a.exprs == b.exprs and a.io == b.io


# ---------------------------------------------------------------------------
# Reduction classification.


class Combiner(Enum):
    SUM = "sum"
    PRODUCT = "product"
    MAX = "max"
    MIN = "min"


COMBINER_IDENTITY = {
    Combiner.SUM: 0.0,
    Combiner.PRODUCT: 1.0,
    Combiner.MAX: -math.inf,
    Combiner.MIN: math.inf,
}


@dataclass(frozen=True)
class ReductionInfo:
    is_reduction: bool
    combiner: Optional[Combiner] = None
    identity: Optional[float] = None
    reduction_axes: frozenset[str] = frozenset()


class AmbiguousCombiner(Exception):
    pass


def _top_level_self_combiners(eq: Equation) -> set[Combiner]:
    """Combiners whose direct operand is the lhs read at identical indices."""
    lhs = eq.lhs
    found: set[Combiner] = set()
    rhs = eq.rhs
    for node, comb in ((rhs, None),):
        pass
    candidates = [
        (Add, Combiner.SUM),
        (Mul, Combiner.PRODUCT),
        (Max, Combiner.MAX),
        (Min, Combiner.MIN),
    ]
    for cls, comb in candidates:
        if isinstance(rhs, cls):
            for side in (rhs.lhs, rhs.rhs):
                if isinstance(side, Read) and side.ref.name == lhs.name and side.ref.indices == lhs.indices:
                    found.add(comb)
    return found


def classify_reduction(eq: Equation, scope_loops: list[LoopHeader]) -> ReductionInfo:
    combs = _top_level_self_combiners(eq)
    if len(combs) > 1:
        raise AmbiguousCombiner(eq.lhs.name)
    if not combs:
        return ReductionInfo(False)
    comb = next(iter(combs))
    loop_names = {h.index for h in scope_loops}
    lhs_vars: set[str] = set()
    for ix in eq.lhs.indices:
        lhs_vars |= index_vars(ix)
    rhs_vars = scalar_vars(eq.rhs) & loop_names
    axes = frozenset(rhs_vars - lhs_vars)
    if not axes:
        return ReductionInfo(False)
    return ReductionInfo(True, comb, COMBINER_IDENTITY[comb], axes)


# ---------------------------------------------------------------------------
# Validation.


@dataclass(frozen=True)
class Diagnostic:
    code: str
    path: str
    message: str


def _iter_nests(program: Program) -> Iterator[tuple[str, Nest, list[LoopHeader]]]:
    def rec(nest: Nest, path: str, scope: list[LoopHeader]):
        scope = scope + list(nest.loops)
        yield path, nest, scope
        for k, item in enumerate(nest.body):
            if isinstance(item, Nest):
                yield from rec(item, f"{path}.body[{k}]", scope)

    for i, nest in enumerate(program.exprs):
        yield from rec(nest, f"exprs[{i}]", [])


def iter_equations_with_scope(program: Program) -> Iterator[tuple[int, str, Equation, list[LoopHeader]]]:
    for path, nest, scope in _iter_nests(program):
        expr_index = int(path.split("]", 1)[0].split("[")[1])
        for k, item in enumerate(nest.body):
            if isinstance(item, Equation):
                yield expr_index, f"{path}.body[{k}]", item, scope


def validate(program: Program) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    for path, nest, scope in _iter_nests(program):
        if path.count(".") == 0 and not nest.loops:
            diags.append(Diagnostic("EmptyTopLevelNest", path, "top-level nest requires at least one loop"))
        seen = [h.index for h in scope]
        if len(seen) != len(set(seen)):
            diags.append(Diagnostic("DuplicateLoopIndex", path, f"repeated loop index along path: {seen}"))
        for j, h in enumerate(nest.loops):
            hpath = f"{path}.loops[{j}]"
            if h.extent < 1:
                diags.append(Diagnostic("NonPositiveExtent", hpath, f"extent {h.extent}"))
            prefix = bind_prefix_of(h.index)
            if h.kind is LoopKind.BINDING:
                if prefix is None:
                    diags.append(Diagnostic("BadBindingIndex", hpath, f"binding index {h.index!r} lacks a bx/by/bz/tx/ty/tz prefix"))
                elif h.extent > BIND_CAPS[prefix]:
                    diags.append(Diagnostic("BindingCapExceeded", hpath, f"{h.index}: extent {h.extent} > cap {BIND_CAPS[prefix]}"))
            elif prefix is not None:
                diags.append(Diagnostic("ReservedIndexPrefix", hpath, f"non-binding loop index {h.index!r} uses a binding prefix"))
            if "e" in h.index:
                diags.append(Diagnostic("ReservedIndexLetter", hpath, f"loop index {h.index!r} contains the letter e"))

    for expr_index, path, eq, scope in iter_equations_with_scope(program):
        loop_names = {h.index for h in scope}
        refs = [eq.lhs] + reads_of(eq.rhs)
        for ref in refs:
            if ref.name in RESERVED_TENSOR_NAMES:
                diags.append(Diagnostic("ReservedName", path, f"tensor name {ref.name!r} is reserved"))
            for ix in ref.indices:
                for v in index_vars(ix):
                    if v not in loop_names:
                        diags.append(Diagnostic("UnboundIndex", path, f"index variable {v!r} is not a loop index in scope"))
        for ix in scalar_index_exprs(eq.rhs) + list(eq.lhs.indices):
            for v in index_vars(ix):
                if v not in loop_names:
                    diags.append(Diagnostic("UnboundIndex", path, f"index variable {v!r} is not a loop index in scope"))
        try:
            classify_reduction(eq, scope)
        except AmbiguousCombiner:
            diags.append(Diagnostic("AmbiguousCombiner", path, f"{eq.lhs.name} combined under two operators"))

    # io consistency: every referenced tensor declared, inputs never written,
    # outputs written, shapes cover the reachable index extents.
    if program.io:
        written = {eq.lhs.name for _, eq in program.equations()}
        for name in program.tensor_names():
            if name not in program.io:
                diags.append(Diagnostic("UndeclaredTensor", name, "tensor missing from io map"))
        for name, decl in program.io.items():
            if decl.role is Role.INPUT and name in written:
                diags.append(Diagnostic("InputWritten", name, "input tensor is written"))
            if decl.role is Role.OUTPUT and name not in written:
                diags.append(Diagnostic("OutputNeverWritten", name, "output tensor is never written"))
        inferred = infer_shapes(program)
        for name, decl in program.io.items():
            shape = inferred.get(name)
            if shape is not None and len(shape) == len(decl.shape):
                for ax, (need, have) in enumerate(zip(shape, decl.shape)):
                    if need > have:
                        diags.append(Diagnostic("ShapeTooSmall", name, f"axis {ax} needs {need}, declared {have}"))
            elif shape is not None:
                diags.append(Diagnostic("RankMismatch", name, f"declared rank {len(decl.shape)}, used rank {len(shape)}"))
    return diags


def infer_shapes(program: Program) -> dict[str, tuple[int, ...]]:
    """Per-tensor shape as max reachable index + 1 per axis (interval bounds)."""
    shapes: dict[str, list[int]] = {}
    for _, _, eq, scope in iter_equations_with_scope(program):
        env = {h.index: (h.start, h.start + h.extent - 1) for h in scope}
        for ref in [eq.lhs] + reads_of(eq.rhs):
            dims = []
            for ix in ref.indices:
                _, hi = index_bounds(ix, env)
                dims.append(max(hi + 1, 1))
            cur = shapes.setdefault(ref.name, list(dims))
            if len(cur) != len(dims):
                # keep the longer rank; validation flags mismatches separately
                if len(dims) > len(cur):
                    shapes[ref.name] = dims
                continue
            shapes[ref.name] = [max(a, b) for a, b in zip(cur, dims)]
    return {n: tuple(s) for n, s in shapes.items()}


def infer_io(program: Program, roles: Optional[dict[str, Role]] = None) -> dict[str, TensorDecl]:
    """Build the io map: dtypes from refs, shapes from bounds, roles from use.

    A tensor is an input when never written; an output when written and not
    read by any equation after its last writing equation.  Self-reads within
    one equation do not count.  Explicit roles override inference.
    """
    shapes = infer_shapes(program)
    dtypes: dict[str, DType] = {}
    last_write: dict[str, int] = {}
    reads_at: dict[str, list[int]] = {}
    for i, (_, eq) in enumerate(program.equations()):
        dtypes.setdefault(eq.lhs.name, eq.lhs.dtype)
        last_write[eq.lhs.name] = i
        for r in reads_of(eq.rhs):
            dtypes.setdefault(r.name, r.dtype)
            reads_at.setdefault(r.name, []).append(i)
    io: dict[str, TensorDecl] = {}
    for name in sorted(dtypes):
        if roles and name in roles:
            role = roles[name]
        elif name not in last_write:
            role = Role.INPUT
        elif any(i > last_write[name] for i in reads_at.get(name, [])):
            role = Role.INTERMEDIATE
        else:
            role = Role.OUTPUT
        io[name] = TensorDecl(dtypes[name], shapes.get(name, ()), role)
    return io


def with_inferred_io(program: Program, roles: Optional[dict[str, Role]] = None) -> Program:
    return Program(program.exprs, infer_io(program, roles))


# ---------------------------------------------------------------------------
# Dependency analysis and symbol collection.


def dependency_graph(program: Program) -> dict[int, set[int]]:
    """Edge i -> j when expression j reads a tensor last written by i."""
    edges: dict[int, set[int]] = {i: set() for i in range(len(program.exprs))}
    last_writer: dict[str, int] = {}
    writes: list[set[str]] = []
    reads: list[set[str]] = []
    for i, nest in enumerate(program.exprs):
        w: set[str] = set()
        r: set[str] = set()
        for eq in nest.equations():
            w.add(eq.lhs.name)
            r.update(x.name for x in reads_of(eq.rhs))
        writes.append(w)
        reads.append(r)
    for j in range(len(program.exprs)):
        for name in reads[j]:
            if name in last_writer and last_writer[name] != j:
                edges[last_writer[name]].add(j)
        for name in writes[j]:
            last_writer[name] = j
    return edges


def free_symbols(program: Program) -> tuple[set[str], set[str]]:
    """(tensor names, loop index names) used anywhere in the program."""
    tensors = program.tensor_names()
    indices: set[str] = set()
    for nest in program.exprs:
        indices.update(h.index for h in nest.all_loops())
    return tensors, indices


_NAME_ALPHABET = "ACDEFGHIJKMNOQRSWXYZ"


def fresh_tensor_names(program: Program, count: int) -> list[str]:
    """Shortest unused names in a fixed order, skipping reserved letters."""
    used, _ = free_symbols(program)
    out: list[str] = []
    for first in _NAME_ALPHABET:
        if first not in used and first not in RESERVED_TENSOR_NAMES:
            used.add(first)
            out.append(first)
            if len(out) == count:
                return out
    for first in _NAME_ALPHABET:
        for second in "abcdfghijkmnopqrsuvw":
            name = first + second
            if name not in used:
                used.add(name)
                out.append(name)
                if len(out) == count:
                    return out
    raise RuntimeError("fresh tensor name pool exhausted")


_INDEX_ALPHABET = "acdfghijkmnopqrsuvw"


def fresh_index_names(taken: set[str], count: int) -> list[str]:
    out: list[str] = []
    for ch in _INDEX_ALPHABET:
        if ch not in taken and bind_prefix_of(ch) is None:
            taken = taken | {ch}
            out.append(ch)
            if len(out) == count:
                return out
    for ch in _INDEX_ALPHABET:
        for ch2 in _INDEX_ALPHABET:
            name = ch + ch2
            if name not in taken and bind_prefix_of(name) is None:
                taken = taken | {name}
                out.append(name)
                if len(out) == count:
                    return out
    raise RuntimeError("fresh index name pool exhausted")
