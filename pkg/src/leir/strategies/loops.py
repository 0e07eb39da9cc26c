"""Loop-level strategies: reordering, tiling, splitting, annotation."""

from __future__ import annotations

import random
from dataclasses import replace

from ..ir import (
    BIND_CAPS, BIND_PREFIXES, Equation, IAdd, IConst, IMul, IVar, LoopHeader,
    LoopKind, Nest, Program, Role, TensorRef, bind_prefix_of,
    classify_reduction, fresh_index_names, subst_scalar_indices,
    fresh_tensor_names,
)
from .base import (
    is_scan_nest, plain_vars, replace_exprs, var_tuple, with_io,
)


def _subst_nest(nest: Nest, mapping) -> Nest:
    body = []
    for item in nest.body:
        if isinstance(item, Equation):
            lhs = replace(item.lhs, indices=tuple(
                _si(i, mapping) for i in item.lhs.indices))
            body.append(Equation(lhs, subst_scalar_indices(item.rhs, mapping)))
        else:
            body.append(_subst_nest(item, mapping))
    return Nest(nest.loops, tuple(body))


def _si(ix, mapping):
    from ..ir import subst_index

    return subst_index(ix, mapping)


def _reduction_axes(nest: Nest) -> set[str]:
    axes: set[str] = set()
    scope = list(nest.all_loops())
    for eq in nest.equations():
        info = classify_reduction(eq, scope)
        axes |= set(info.reduction_axes)
    return axes


def _serial_headers(nest: Nest):
    return [(k, h) for k, h in enumerate(nest.loops) if h.kind is LoopKind.SERIAL]


def _divisors(n: int):
    return [d for d in range(2, n) if n % d == 0]


def apply_loop_reorder(program: Program, rng: random.Random):
    sites = [i for i, n in enumerate(program.exprs)
             if len(n.loops) >= 2 and not is_scan_nest(n)]
    if not sites:
        return None
    i = rng.choice(sites)
    nest = program.exprs[i]
    order = list(range(len(nest.loops)))
    for _ in range(16):
        rng.shuffle(order)
        if order != sorted(order):
            break
    else:
        return None
    loops = tuple(nest.loops[k] for k in order)
    prog = with_io(program, replace_exprs(program, i, 1, [Nest(loops, nest.body)]))
    return prog, (f"reordered the loops of nest {i} to "
                  f"({', '.join(h.index for h in loops)})")


def apply_loop_tiling(program: Program, rng: random.Random):
    sites = []
    for i, nest in enumerate(program.exprs):
        if is_scan_nest(nest):
            continue
        ser = _serial_headers(nest)
        for a in range(len(ser) - 1):
            (ka, ha), (kb, hb) = ser[a], ser[a + 1]
            if kb == ka + 1 and ha.start == 0 and hb.start == 0 \
                    and _divisors(ha.extent) and _divisors(hb.extent):
                sites.append((i, ka, kb))
    if not sites:
        return None
    i, ka, kb = rng.choice(sites)
    nest = program.exprs[i]
    ha, hb = nest.loops[ka], nest.loops[kb]
    t1 = rng.choice(_divisors(ha.extent))
    t2 = rng.choice(_divisors(hb.extent))
    taken = {h.index for h in nest.all_loops()}
    o1, o2 = fresh_index_names(taken, 2)
    outer1 = LoopHeader(LoopKind.SERIAL, o1, 0, ha.extent // t1)
    outer2 = LoopHeader(LoopKind.SERIAL, o2, 0, hb.extent // t2)
    loops = list(nest.loops)
    loops[ka] = replace(ha, extent=t1)
    loops[kb] = replace(hb, extent=t2)
    mapping = {
        ha.index: IAdd(IMul(IVar(o1), IConst(t1)), IVar(ha.index)),
        hb.index: IAdd(IMul(IVar(o2), IConst(t2)), IVar(hb.index)),
    }
    new = _subst_nest(Nest((outer1, outer2) + tuple(loops), nest.body), mapping)
    prog = with_io(program, replace_exprs(program, i, 1, [new]))
    return prog, (f"tiled loops {ha.index} and {hb.index} of nest {i} with "
                  f"tile sizes {t1} and {t2}")


def apply_loop_split(program: Program, rng: random.Random):
    sites = []
    for i, nest in enumerate(program.exprs):
        if is_scan_nest(nest):
            continue
        for k, h in _serial_headers(nest):
            if h.start == 0 and _divisors(h.extent):
                sites.append((i, k))
    if not sites:
        return None
    i, k = rng.choice(sites)
    nest = program.exprs[i]
    h = nest.loops[k]
    g = rng.choice(_divisors(h.extent))
    taken = {x.index for x in nest.all_loops()}
    (w,) = fresh_index_names(taken, 1)
    outer = LoopHeader(LoopKind.SERIAL, w, 0, h.extent // g)
    loops = nest.loops[:k] + (outer, replace(h, extent=g)) + nest.loops[k + 1:]
    mapping = {h.index: IAdd(IMul(IVar(w), IConst(g)), IVar(h.index))}
    new = _subst_nest(Nest(loops, nest.body), mapping)
    prog = with_io(program, replace_exprs(program, i, 1, [new]))
    return prog, f"split loop {h.index} of nest {i} with inner factor {g}"


def _only_fused_uses(nest: Nest, u: str, v: str, ev: int) -> bool:
    """True when u and v only ever appear as the exact pattern u*ev+v."""
    from ..ir import IndexExpr, index_vars, scalar_index_exprs

    pattern = IAdd(IMul(IVar(u), IConst(ev)), IVar(v))

    def check(ix) -> bool:
        if ix == pattern:
            return True
        if isinstance(ix, (IAdd, IMul)) or type(ix).__name__ == "ISub":
            return check(ix.lhs) and check(ix.rhs)
        return not ({u, v} & index_vars(ix))

    for eq in nest.equations():
        for ix in list(eq.lhs.indices) + scalar_index_exprs(eq.rhs):
            if not check(ix):
                return False
    return True


def apply_loop_fusion(program: Program, rng: random.Random):
    sites = []
    for i, nest in enumerate(program.exprs):
        for k in range(len(nest.loops) - 1):
            u, v = nest.loops[k], nest.loops[k + 1]
            if u.kind is not LoopKind.SERIAL or u.start or v.start:
                continue
            if v.kind is LoopKind.BINDING:
                cap = BIND_CAPS[bind_prefix_of(v.index)]
                if u.extent * v.extent > cap:
                    continue
            if _only_fused_uses(nest, u.index, v.index, v.extent):
                sites.append((i, k))
    if not sites:
        return None
    i, k = rng.choice(sites)
    nest = program.exprs[i]
    u, v = nest.loops[k], nest.loops[k + 1]
    fused = replace(v, extent=u.extent * v.extent)
    # collapse the u*ev+v pattern to just v everywhere
    pattern = IAdd(IMul(IVar(u.index), IConst(v.extent)), IVar(v.index))

    def collapse(ix):
        if ix == pattern:
            return IVar(v.index)
        if hasattr(ix, "lhs"):
            return type(ix)(collapse(ix.lhs), collapse(ix.rhs))
        return ix

    def collapse_cond(c):
        from ..ir import And, Cmp, RangeCmp

        if isinstance(c, Cmp):
            return Cmp(c.op, collapse(c.lhs), collapse(c.rhs))
        if isinstance(c, RangeCmp):
            return RangeCmp(collapse(c.lo), collapse(c.mid), collapse(c.hi))
        return And(collapse_cond(c.lhs), collapse_cond(c.rhs))

    def go(n: Nest) -> Nest:
        body = []
        for item in n.body:
            if isinstance(item, Equation):
                lhs = replace(item.lhs, indices=tuple(collapse(x) for x in item.lhs.indices))
                from ..ir import rewrite_scalar, Read, Idx, IfThenElse

                def fn(node):
                    if isinstance(node, Read):
                        return Read(replace(node.ref, indices=tuple(
                            collapse(x) for x in node.ref.indices)))
                    if isinstance(node, Idx):
                        return Idx(collapse(node.expr))
                    if isinstance(node, IfThenElse):
                        return IfThenElse(collapse_cond(node.cond), node.then, node.other)
                    return node

                body.append(Equation(lhs, rewrite_scalar(item.rhs, fn)))
            else:
                body.append(go(item))
        return Nest(n.loops, tuple(body))

    new = go(Nest(nest.loops[:k] + (fused,) + nest.loops[k + 2:], nest.body))
    prog = with_io(program, replace_exprs(program, i, 1, [new]))
    return prog, (f"fused loops {u.index} and {v.index} of nest {i} into a "
                  f"single loop of extent {fused.extent}")


def _annotate(program: Program, rng: random.Random, kind: LoopKind,
              exclude_reduction: bool):
    sites = []
    for i, nest in enumerate(program.exprs):
        red = _reduction_axes(nest) if exclude_reduction else set()
        scan = is_scan_nest(nest)
        for k, h in _serial_headers(nest):
            if h.index in red or (scan and exclude_reduction):
                continue
            sites.append((i, k))
    if not sites:
        return None
    i, k = rng.choice(sites)
    nest = program.exprs[i]
    h = nest.loops[k]
    loops = nest.loops[:k] + (replace(h, kind=kind),) + nest.loops[k + 1:]
    prog = with_io(program, replace_exprs(program, i, 1, [Nest(loops, nest.body)]))
    return prog, f"marked loop {h.index} of nest {i} as {kind.name.lower()}"


def apply_loop_unrolling(program: Program, rng: random.Random):
    return _annotate(program, rng, LoopKind.UNROLLED, exclude_reduction=False)


def apply_loop_parallelization(program: Program, rng: random.Random):
    return _annotate(program, rng, LoopKind.PARALLEL, exclude_reduction=True)


def apply_loop_vectorization(program: Program, rng: random.Random):
    return _annotate(program, rng, LoopKind.VECTORIZED, exclude_reduction=True)


def apply_loop_binding(program: Program, rng: random.Random):
    all_indices = set()
    for n in program.exprs:
        all_indices |= {h.index for h in n.all_loops()}
    sites = []
    for i, nest in enumerate(program.exprs):
        red = _reduction_axes(nest)
        if is_scan_nest(nest):
            continue
        used = {h.bind_target for h in nest.loops if h.bind_target}
        for k, h in enumerate(nest.loops):
            if h.kind not in (LoopKind.SERIAL, LoopKind.PARALLEL):
                continue
            if h.index in red or h.start != 0:
                continue
            for prefix in BIND_PREFIXES:
                if prefix in used or h.extent > BIND_CAPS[prefix]:
                    continue
                if prefix + h.index in all_indices:
                    continue
                sites.append((i, k, prefix))
                break
    if not sites:
        return None
    i, k, prefix = rng.choice(sites)
    nest = program.exprs[i]
    h = nest.loops[k]
    new_index = prefix + h.index
    mapping = {h.index: IVar(new_index)}
    header = LoopHeader(LoopKind.BINDING, new_index, 0, h.extent)
    loops = nest.loops[:k] + (header,) + nest.loops[k + 1:]
    new = _subst_nest(Nest(loops, nest.body), mapping)
    prog = with_io(program, replace_exprs(program, i, 1, [new]))
    return prog, f"bound loop {h.index} of nest {i} to hardware axis {prefix}"


def apply_reduction_factorization(program: Program, rng: random.Random):
    from ..ir import Add, Max, Min, Mul, Read

    comb_op = {"sum": Add, "product": Mul, "max": Max, "min": Min}
    sites = []
    for i, nest in enumerate(program.exprs):
        eq = nest.body[0] if len(nest.body) == 1 and isinstance(nest.body[0], Equation) else None
        if eq is None or is_scan_nest(nest):
            continue
        info = classify_reduction(eq, list(nest.loops))
        if not info.is_reduction or plain_vars(eq.lhs) is None:
            continue
        for k, h in enumerate(nest.loops):
            if h.index in info.reduction_axes and h.kind is LoopKind.SERIAL \
                    and h.start == 0 and h.extent >= 2:
                sites.append((i, k, info))
    if not sites:
        return None
    i, k, info = rng.choice(sites)
    nest = program.exprs[i]
    eq = nest.body[0]
    h = nest.loops[k]
    s = rng.randrange(1, h.extent)
    ka, kb = fresh_tensor_names(program, 2)
    op = comb_op[info.combiner.value]
    # the addend is the operand that is not the self-read accumulator
    rhs = eq.rhs
    self_read = Read(eq.lhs)
    addend = rhs.rhs if rhs.lhs == self_read else rhs.lhs

    def partial(name, extent, shift):
        loops = nest.loops[:k] + (replace(h, extent=extent),) + nest.loops[k + 1:]
        ref = TensorRef(name, eq.lhs.dtype, eq.lhs.scope, eq.lhs.indices)
        body_rhs = addend
        if shift:
            body_rhs = subst_scalar_indices(
                addend, {h.index: IAdd(IVar(h.index), IConst(shift))})
        return Nest(loops, (Equation(ref, op(Read(ref), body_rhs)),))

    outer = tuple(x for x in nest.loops
                  if x.index not in info.reduction_axes)
    ra = Read(TensorRef(ka, eq.lhs.dtype, eq.lhs.scope, eq.lhs.indices))
    rb = Read(TensorRef(kb, eq.lhs.dtype, eq.lhs.scope, eq.lhs.indices))
    combine = Nest(outer, (Equation(eq.lhs, op(ra, rb)),))
    exprs = [partial(ka, s, 0), partial(kb, h.extent - s, s), combine]
    roles = {ka: Role.INTERMEDIATE, kb: Role.INTERMEDIATE}
    prog = with_io(program, replace_exprs(program, i, 1, exprs), roles)
    return prog, (f"factored reduction axis {h.index} of nest {i} at {s} into "
                  f"partial tensors {ka} and {kb}")
