"""Math-level strategies: local algebraic rewrites on equation values."""

from __future__ import annotations

import random
from dataclasses import replace

from ..ir import (
    Add, Cmp, DType, Div, Equation, Exp, IAdd, IConst, ISub, IVar,
    IfThenElse, Log, LoopHeader, LoopKind, Max, Mul, Nest, Pow, Program, Read, Role,
    SConst, Sub, TensorRef, classify_reduction, fresh_index_names,
    fresh_tensor_names, reads_of, subst_index, subst_scalar_indices,
)
from .base import (
    map_first_equation, reads_statically_in_bounds, rename_reads,
    replace_exprs, rewrite_first, single_equation, var_tuple, with_io,
)


def _pattern_strategy(matcher, note):
    def run(program: Program, rng: random.Random):
        def eq_fn(eq):
            new_rhs, ok = rewrite_first(eq.rhs, matcher)
            if not ok:
                return None
            return Equation(eq.lhs, new_rhs), note

        prog, n = map_first_equation(program, eq_fn)
        if prog is None:
            return None
        return prog, n

    return run


def _is_const(e, value=None):
    return isinstance(e, SConst) and (value is None or e.value == value)


def _simp_div(n, d):
    return SConst(1.0) if n == d else Div(n, d)


# -- inverse algebraic pairs --------------------------------------------------


def _m_factorization(node):
    if isinstance(node, Div) and isinstance(node.lhs, Add) and _is_const(node.rhs):
        k = node.rhs.value
        if k == 0:
            return None
        a, b = node.lhs.lhs, node.lhs.rhs
        if _is_const(b):
            return Add(Div(a, node.rhs), SConst(b.value / k))
        if _is_const(a):
            return Add(SConst(a.value / k), Div(b, node.rhs))
    return None


def _m_expand_factorization(node):
    if isinstance(node, Pow) and _is_const(node.rhs, 2.0) \
            and isinstance(node.lhs, (Add, Sub)):
        x, y = node.lhs.lhs, node.lhs.rhs
        two = SConst(2.0)
        cross = Mul(Mul(two, x), y)
        mid = Add if isinstance(node.lhs, Add) else Sub
        return Add(mid(Pow(x, two), cross), Pow(y, two))
    return None


def _quotient_parts(term):
    """Decompose h*(n/s), (n/s)*h, or n/s into (h, n, s)."""
    if isinstance(term, Div):
        return None, term.lhs, term.rhs
    if isinstance(term, Mul):
        if isinstance(term.rhs, Div):
            return term.lhs, term.rhs.lhs, term.rhs.rhs
        if isinstance(term.lhs, Div):
            return term.rhs, term.lhs.lhs, term.lhs.rhs
    return None, None, None


def _common_denominator(node, distribute):
    if not isinstance(node, Add):
        return None
    for quot, other, left in ((node.lhs, node.rhs, True), (node.rhs, node.lhs, False)):
        h, n, s = _quotient_parts(quot)
        if n is None:
            continue
        num = n if h is None else Mul(h, n)
        if distribute and h is not None and isinstance(n, (Add, Sub)):
            num = type(n)(Mul(h, n.lhs), Mul(h, n.rhs))
        scaled = Mul(other, s)
        top = Add(num, scaled) if left else Add(scaled, num)
        return Div(top, s)
    return None


def _m_cancellation(node):
    return _common_denominator(node, distribute=True)


def _m_together(node):
    return _common_denominator(node, distribute=False)


def _m_expand_cancellation(node):
    if not isinstance(node, Div):
        return None
    num = node.lhs
    if isinstance(num, Mul) and _is_const(num.lhs, 1.0):
        num = num.rhs
    if not isinstance(num, Add):
        return None
    p, q = num.lhs, num.rhs
    if not (isinstance(p, Mul) and isinstance(q, Mul)):
        return None
    for x in (p.lhs, p.rhs):
        for x2 in (q.lhs, q.rhs):
            if x == x2:
                y = p.rhs if p.lhs == x else p.lhs
                w = q.rhs if q.lhs == x2 else q.lhs
                return Mul(x, Add(_simp_div(y, node.rhs), _simp_div(w, node.rhs)))
    return None


def _m_apart(node):
    if isinstance(node, Div) and isinstance(node.lhs, (Add, Sub)):
        a, b = node.lhs.lhs, node.lhs.rhs
        return type(node.lhs)(_simp_div(a, node.rhs), _simp_div(b, node.rhs))
    return None


def _m_powsimp(node):
    if isinstance(node, Mul):
        if isinstance(node.rhs, Div) and _is_const(node.rhs.lhs, 1.0):
            return Div(node.lhs, node.rhs.rhs)
        if isinstance(node.lhs, Div) and _is_const(node.lhs.lhs, 1.0):
            return Div(node.rhs, node.lhs.rhs)
    return None


def _m_expand_powsimp(node):
    if isinstance(node, Div) and not _is_const(node.lhs, 1.0):
        return Mul(node.lhs, Div(SConst(1.0), node.rhs))
    return None


def _m_logsimp(node):
    if isinstance(node, Log) and isinstance(node.x, Mul):
        return Add(Log(node.x.lhs), Log(node.x.rhs))
    return None


def _m_expand_log(node):
    if isinstance(node, Add) and isinstance(node.lhs, Log) and isinstance(node.rhs, Log):
        return Log(Mul(node.lhs.x, node.rhs.x))
    return None


def _m_collect(node):
    if isinstance(node, Mul):
        if _is_const(node.lhs) and isinstance(node.rhs, Add):
            c, s = node.lhs, node.rhs
        elif _is_const(node.rhs) and isinstance(node.lhs, Add):
            c, s = node.rhs, node.lhs
        else:
            return None
        return Add(Mul(c, s.lhs), Mul(c, s.rhs))
    return None


def _m_expand_collect(node):
    if isinstance(node, Mul):
        if _is_const(node.lhs) and node.lhs.value != 0 and not _is_const(node.rhs):
            return Div(node.rhs, SConst(1.0 / node.lhs.value))
        if _is_const(node.rhs) and node.rhs.value != 0 and not _is_const(node.lhs):
            return Div(node.lhs, SConst(1.0 / node.rhs.value))
    return None


apply_factorization = _pattern_strategy(
    _m_factorization, "pulled the constant term out of a quotient")
apply_expand_factorization = _pattern_strategy(
    _m_expand_factorization, "expanded a squared binomial into its trinomial form")
apply_cancellation = _pattern_strategy(
    _m_cancellation, "combined terms over the common denominator and distributed "
    "the numerator")
apply_together = _pattern_strategy(
    _m_together, "combined terms over the common denominator")
apply_expand_cancellation = _pattern_strategy(
    _m_expand_cancellation, "cancelled the shared factor between numerator and "
    "denominator")
apply_apart = _pattern_strategy(
    _m_apart, "split a quotient of a sum into separate quotients")
apply_powsimp = _pattern_strategy(
    _m_powsimp, "collapsed a multiply by a reciprocal into a division")
apply_expand_powsimp = _pattern_strategy(
    _m_expand_powsimp, "rewrote a division as a multiply by a reciprocal")
apply_logsimp = _pattern_strategy(
    _m_logsimp, "split the logarithm of a product into a sum of logarithms")
apply_expand_log = _pattern_strategy(
    _m_expand_log, "merged a sum of logarithms into the logarithm of a product")
apply_collect = _pattern_strategy(
    _m_collect, "distributed a constant factor over a sum")
apply_expand_collect = _pattern_strategy(
    _m_expand_collect, "rewrote a constant multiple as a division by its "
    "reciprocal")


# -- structural value splits --------------------------------------------------


_FLOAT_DTYPES = (DType.F16, DType.F32, DType.F64)


def apply_multiplicative_split(program: Program, rng: random.Random):
    # only float inputs: they are sampled away from zero once they appear as
    # a denominator, while accumulators can legitimately pass through zero
    def matcher(node):
        if not (isinstance(node, Read) and node.ref.dtype in _FLOAT_DTYPES):
            return None
        decl = program.io.get(node.ref.name)
        if decl is None or decl.role is not Role.INPUT:
            return None
        return Mul(Div(node, node), node)

    return _pattern_strategy(matcher, "rewrote a value v as (v / v) * v")(program, rng)


def apply_additive_split(program: Program, rng: random.Random):
    hit = []

    def go_nest(nest, scope):
        scope = scope + list(nest.loops)
        body = []
        for item in nest.body:
            if hit:
                body.append(item)
            elif isinstance(item, Equation):
                # the extra read runs unguarded, so it must be safe over the
                # whole loop range even when the original was condition-gated
                reads = [r for r in reads_of(item.rhs)
                         if reads_statically_in_bounds(Read(r), scope, program)]
                if reads and not classify_reduction(item, scope).is_reduction:
                    r = Read(reads[0])
                    hit.append(reads[0].name)
                    body.append(Equation(item.lhs, Sub(Add(item.rhs, r), r)))
                else:
                    body.append(item)
            else:
                body.append(go_nest(item, scope))
        return Nest(nest.loops, tuple(body))

    exprs = tuple(go_nest(n, []) for n in program.exprs)
    if not hit:
        return None
    prog = with_io(program, exprs)
    return prog, f"rewrote an expression e as (e + v) - v with v a read of {hit[0]}"


def apply_exponential_split(program: Program, rng: random.Random):
    hit = []

    def go_nest(nest, scope):
        scope = scope + list(nest.loops)
        headers = {h.index: h for h in scope}
        body = []
        for item in nest.body:
            if hit:
                body.append(item)
            elif isinstance(item, Equation):
                def matcher(node):
                    if not isinstance(node, Exp):
                        return None
                    for ref in reads_of(node.x):
                        for pos in range(len(ref.indices) - 1, -1, -1):
                            ix = ref.indices[pos]
                            if isinstance(ix, IVar) and ix.name in headers \
                                    and headers[ix.name].start == 0:
                                v = ix.name
                                prev = replace(ref, indices=tuple(
                                    subst_index(x, {v: ISub(IVar(v), IConst(1))})
                                    for x in ref.indices))
                                guard = Cmp("<", ISub(IVar(v), IConst(1)), IConst(0))
                                y = IfThenElse(guard, SConst(0.0), Read(prev))
                                hit.append(v)
                                return Mul(Exp(Sub(node.x, y)), Exp(y))
                    return None

                new_rhs, ok = rewrite_first(item.rhs, matcher)
                body.append(Equation(item.lhs, new_rhs) if ok else item)
            else:
                body.append(go_nest(item, scope))
        return Nest(nest.loops, tuple(body))

    exprs = tuple(go_nest(n, []) for n in program.exprs)
    if not hit:
        return None
    prog = with_io(program, exprs)
    return prog, (f"split exp(x) into exp(x - y) * exp(y) with y read from the "
                  f"previous {hit[0]} iteration, guarded at {hit[0]} = 0")


# -- partially equivalent then correct ---------------------------------------


def _read_names_in_order(e):
    return [r.name for r in reads_of(e)]


def apply_petc(program: Program, rng: random.Random):
    from .base import plain_vars

    sites = []
    for i in range(len(program.exprs) - 1):
        a, b = program.exprs[i], program.exprs[i + 1]
        if a.loops != b.loops or not a.loops:
            continue
        ea, eb = single_equation(a), single_equation(b)
        if ea is None or eb is None or ea.lhs.name == eb.lhs.name:
            continue
        scope = list(a.loops)
        ia = classify_reduction(ea, scope)
        ib = classify_reduction(eb, scope)
        if not (ia.is_reduction and ib.is_reduction) or ia.combiner != ib.combiner:
            continue
        if ia.combiner.value != "sum":
            continue
        va, vb = plain_vars(ea.lhs), plain_vars(eb.lhs)
        if va is None or va != vb or len(va) < 2:
            continue
        first = a.loops[0]
        if va[0] != first.index or first.start != 0 or first.extent < 2:
            continue
        # the two value expressions must agree up to one read tensor
        ra = _read_names_in_order(ea.rhs)
        rb = _read_names_in_order(eb.rhs)
        if len(ra) != len(rb):
            continue
        diff = {(x, y) for x, y in zip(ra, rb) if x != y and
                not (x == ea.lhs.name and y == eb.lhs.name)}
        if len(diff) != 1:
            continue
        (src_a, src_b), = diff
        renamed = rename_reads(ea.rhs, {ea.lhs.name: eb.lhs.name, src_a: src_b})
        if renamed != eb.rhs:
            continue
        # the differing tensor must be indexed by the shared leading axis
        refs_a = [r for r in reads_of(ea.rhs) if r.name == src_a]
        if any(r.indices[:1] != (IVar(first.index),) for r in refs_a):
            continue
        if first.kind.name == "BINDING":
            from ..ir import BIND_CAPS, bind_prefix_of

            if 2 * first.extent - 1 > BIND_CAPS[bind_prefix_of(first.index)]:
                continue
        sites.append((i, src_a, src_b))
    if not sites:
        return None
    i, src_a, src_b = sites[0]
    a, b = program.exprs[i], program.exprs[i + 1]
    ea, eb = single_equation(a), single_equation(b)
    first = a.loops[0]
    t_rows = first.extent
    packed, fused_name = fresh_tensor_names(program, 2)
    src_decl = program.io[src_a]
    taken = {h.index for h in a.all_loops()}
    copy_idx = fresh_index_names(taken, max(len(src_decl.shape) - 1, 0))
    copy_loops = (first,) + tuple(
        LoopHeader(LoopKind.SERIAL, nm, 0, dim)
        for nm, dim in zip(copy_idx, src_decl.shape[1:]))
    src_ref = next(r for r in reads_of(ea.rhs) if r.name == src_a)
    vt = (IVar(first.index),) + var_tuple(copy_idx)
    packed_ref = TensorRef(packed, src_ref.dtype, src_ref.scope, vt)
    src_b_ref = next(r for r in reads_of(eb.rhs) if r.name == src_b)
    shifted = (IAdd(IVar(first.index), IConst(t_rows)),) + var_tuple(copy_idx)
    copies = [
        Nest(copy_loops, (Equation(packed_ref,
                                   Read(replace(src_ref, indices=vt))),)),
        Nest(copy_loops, (Equation(replace(packed_ref, indices=shifted),
                                   Read(replace(src_b_ref, indices=vt))),)),
    ]
    fused_loops = (replace(first, extent=2 * t_rows - 1),) + a.loops[1:]
    fused_lhs = TensorRef(fused_name, ea.lhs.dtype, ea.lhs.scope, ea.lhs.indices)
    fused_rhs = rename_reads(ea.rhs, {ea.lhs.name: fused_name, src_a: packed})
    fused = Nest(fused_loops, (Equation(fused_lhs, fused_rhs),))
    out_vars = plain_vars(ea.lhs)
    out_loops = tuple(h for h in a.loops if h.index in out_vars)
    split_a = Nest(out_loops, (Equation(ea.lhs, Read(fused_lhs)),))
    shift_map = {first.index: IAdd(IVar(first.index), IConst(t_rows))}
    split_b_loops = (replace(first, extent=t_rows - 1),) + out_loops[1:]
    split_b = Nest(split_b_loops, (Equation(
        eb.lhs, Read(replace(fused_lhs, indices=tuple(
            subst_index(x, shift_map) for x in fused_lhs.indices)))),))
    # patch the missing last row of the second output with a direct reduction
    last = IConst(t_rows - 1)
    row_map = {first.index: last}
    corr_lhs = replace(eb.lhs, indices=tuple(
        subst_index(x, row_map) for x in eb.lhs.indices))
    red_loops = tuple(h for h in a.loops if h.index not in out_vars)
    addend = eb.rhs.rhs if eb.rhs.lhs == Read(eb.lhs) else eb.rhs.lhs
    corr_addend = subst_scalar_indices(addend, row_map)
    corr = Nest(out_loops[1:], (
        Equation(corr_lhs, SConst(0.0)),
        Nest(red_loops, (Equation(corr_lhs, Add(Read(corr_lhs), corr_addend)),)),
    ))
    exprs = copies + [fused, split_a, split_b, corr]
    roles = {packed: Role.INTERMEDIATE, fused_name: Role.INTERMEDIATE}
    prog = with_io(program, replace_exprs(program, i, 2, exprs), roles)
    return prog, (f"fused the twin reductions into {fused_name} over a "
                  f"concatenated tensor {packed}, one row short, then patched "
                  f"the last row of {eb.lhs.name} with a correction nest")
