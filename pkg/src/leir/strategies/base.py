"""Shared helpers for transformation strategies."""

from __future__ import annotations

from dataclasses import replace

from ..ir import (
    Abs, Add, Div, Equation, Exp, IAdd, IConst, IMul, ISub, IVar, Idx,
    IfThenElse, IndexExpr, Log, LoopHeader, Max, Min, Mul, Neg, Nest, Pow,
    Program, Read, Role, SConst, ScalarExpr, Sqrt, Sub, TensorRef,
    infer_io, index_bounds, index_vars, reads_of, validate,
)

_BINARY = (Add, Sub, Mul, Div, Pow, Max, Min)
_UNARY = (Neg, Exp, Log, Sqrt, Abs)


def with_io(orig: Program, exprs, fresh_roles: dict[str, Role] | None = None) -> Program:
    """Rebuild io for rewritten exprs, keeping the original declarations."""
    prog = Program(tuple(exprs))
    roles = {n: d.role for n, d in orig.io.items()}
    if fresh_roles:
        roles.update(fresh_roles)
    io = infer_io(prog, roles)
    for n, d in orig.io.items():
        if n in io:
            io[n] = d
    return Program(tuple(exprs), io)


def checked(orig: Program, prog: Program) -> Program | None:
    return prog if not validate(prog) else None


def replace_exprs(program: Program, at: int, count: int, new) -> tuple[Nest, ...]:
    return program.exprs[:at] + tuple(new) + program.exprs[at + count:]


def nest_footprint(nest: Nest) -> tuple[set[str], set[str]]:
    """(read names, written names) of a whole nest."""
    r: set[str] = set()
    w: set[str] = set()
    for eq in nest.equations():
        w.add(eq.lhs.name)
        r.update(x.name for x in reads_of(eq.rhs))
    return r, w


def single_equation(nest: Nest) -> Equation | None:
    if len(nest.body) == 1 and isinstance(nest.body[0], Equation):
        return nest.body[0]
    return None


def plain_vars(ref: TensorRef) -> list[str] | None:
    """Index names when every index is a bare variable, else None."""
    out = []
    for ix in ref.indices:
        if not isinstance(ix, IVar):
            return None
        out.append(ix.name)
    return out


def var_tuple(names) -> tuple[IndexExpr, ...]:
    return tuple(IVar(n) for n in names)


def reads_at_loop_vars(eq: Equation, loop_names: list[str]) -> bool:
    """True when every read is indexed exactly by the loop variable tuple."""
    want = var_tuple(loop_names)
    return all(r.indices == want for r in reads_of(eq.rhs))


def is_scan_nest(nest: Nest) -> bool:
    """A nest is a scan when some read of a locally written tensor uses an
    index tuple different from the one it is written at (e.g. S[d-1])."""
    writes: dict[str, set[tuple]] = {}
    for eq in nest.equations():
        writes.setdefault(eq.lhs.name, set()).add(eq.lhs.indices)
    for eq in nest.equations():
        for r in reads_of(eq.rhs):
            if r.name in writes and r.indices not in writes[r.name]:
                return True
    return False


def index_to_scalar(e: IndexExpr) -> ScalarExpr:
    """Index arithmetic as an equation value (variables stay Idx leaves)."""
    if isinstance(e, IConst):
        return SConst(float(e.value))
    if isinstance(e, IVar):
        return Idx(e)
    op = {IAdd: Add, ISub: Sub, IMul: Mul}[type(e)]
    return op(index_to_scalar(e.lhs), index_to_scalar(e.rhs))


def rename_reads(e: ScalarExpr, mapping: dict[str, str]) -> ScalarExpr:
    from ..ir import rewrite_scalar

    def fn(node):
        if isinstance(node, Read) and node.ref.name in mapping:
            return Read(replace(node.ref, name=mapping[node.ref.name]))
        return node

    return rewrite_scalar(e, fn)


def replace_reads(e: ScalarExpr, target: TensorRef, replacement: ScalarExpr) -> ScalarExpr:
    from ..ir import rewrite_scalar

    def fn(node):
        if isinstance(node, Read) and node.ref == target:
            return replacement
        return node

    return rewrite_scalar(e, fn)


def rewrite_first(e: ScalarExpr, matcher) -> tuple[ScalarExpr, bool]:
    """Replace the first (bottom-up) node the matcher rewrites."""
    done = [False]

    def go(node):
        if done[0]:
            return node
        if isinstance(node, _BINARY):
            node = type(node)(go(node.lhs), go(node.rhs))
        elif isinstance(node, _UNARY):
            node = type(node)(go(node.x))
        elif isinstance(node, IfThenElse):
            node = IfThenElse(node.cond, go(node.then), go(node.other))
        if done[0]:
            return node
        out = matcher(node)
        if out is not None:
            done[0] = True
            return out
        return node

    return go(e), done[0]


def map_first_equation(program: Program, eq_fn) -> tuple[Program | None, str]:
    """Rewrite the first equation accepted by eq_fn(eq) -> (Equation, note)."""

    hit: list = []

    def go_nest(nest: Nest) -> Nest:
        body = []
        for item in nest.body:
            if hit:
                body.append(item)
            elif isinstance(item, Equation):
                res = eq_fn(item)
                if res is None:
                    body.append(item)
                else:
                    hit.append(res[1])
                    body.append(res[0])
            else:
                body.append(go_nest(item))
        return Nest(nest.loops, tuple(body))

    exprs = tuple(go_nest(n) for n in program.exprs)
    if not hit:
        return None, ""
    return with_io(program, exprs), hit[0]


def reads_count(program: Program, name: str) -> int:
    n = 0
    for _, eq in program.equations():
        n += sum(1 for r in reads_of(eq.rhs) if r.name == name)
    return n


def loop_index_names(program: Program) -> set[str]:
    out: set[str] = set()
    for nest in program.exprs:
        out.update(h.index for h in nest.all_loops())
    return out


def lhs_index_vars(eq: Equation) -> set[str]:
    out: set[str] = set()
    for ix in eq.lhs.indices:
        out |= index_vars(ix)
    return out


def reads_statically_in_bounds(e: ScalarExpr, scope: list[LoopHeader],
                               program: Program) -> bool:
    """True when every read stays in bounds over the full loop ranges.

    Guards a rewrite that moves a read out from under an if_then_else: the
    original may rely on lazy evaluation to skip out-of-range accesses.
    """
    env = {h.index: (h.start, h.start + h.extent - 1) for h in scope}
    for ref in reads_of(e):
        decl = program.io.get(ref.name)
        for d, ix in enumerate(ref.indices):
            try:
                lo, hi = index_bounds(ix, env)
            except KeyError:
                return False
            if lo < 0:
                return False
            if decl is not None and d < len(decl.shape) and hi >= decl.shape[d]:
                return False
    return True
