"""Graph-level strategies: rearranging whole loop nests and equations."""

from __future__ import annotations

import random
from dataclasses import replace

from ..ir import (
    Div, Equation, IAdd, IConst, IVar, Nest, Program, Read, Role, SConst,
    TensorRef, reads_of, scalar_children, scalar_vars, subst_scalar_indices,
    walk_scalar, fresh_tensor_names, classify_reduction,
)
from .base import (
    lhs_index_vars, nest_footprint, plain_vars, reads_at_loop_vars,
    reads_count, reads_statically_in_bounds, rename_reads, replace_exprs,
    replace_reads, single_equation, var_tuple, with_io,
)


def apply_fusion(program: Program, rng: random.Random):
    sites = []
    for i in range(len(program.exprs) - 1):
        a, b = program.exprs[i], program.exprs[i + 1]
        if a.loops != b.loops:
            continue
        ra, wa = nest_footprint(a)
        rb, wb = nest_footprint(b)
        if wa & (rb | wb) or wb & ra:
            continue
        sites.append(i)
    if not sites:
        return None
    i = rng.choice(sites)
    a, b = program.exprs[i], program.exprs[i + 1]
    fused = Nest(a.loops, a.body + b.body)
    prog = with_io(program, replace_exprs(program, i, 2, [fused]))
    return prog, f"fused adjacent nests {i} and {i + 1} sharing identical loop headers"


def apply_fission(program: Program, rng: random.Random):
    sites = []
    for i, nest in enumerate(program.exprs):
        if len(nest.body) < 2:
            continue
        for k in range(1, len(nest.body)):
            head = Nest(nest.loops, nest.body[:k])
            tail = Nest(nest.loops, nest.body[k:])
            r1, w1 = nest_footprint(head)
            _, w2 = nest_footprint(tail)
            if w2 & (r1 | w1):
                continue
            sites.append((i, k))
    if not sites:
        return None
    i, k = rng.choice(sites)
    nest = program.exprs[i]
    head = Nest(nest.loops, nest.body[:k])
    tail = Nest(nest.loops, nest.body[k:])
    prog = with_io(program, replace_exprs(program, i, 1, [head, tail]))
    return prog, f"split nest {i} after its first {k} statement(s) into two nests"


def apply_inline(program: Program, rng: random.Random):
    sites = []
    for i in range(len(program.exprs) - 1):
        prod, cons = program.exprs[i], program.exprs[i + 1]
        if prod.loops != cons.loops:
            continue
        eq = single_equation(prod)
        if eq is None:
            continue
        if classify_reduction(eq, list(prod.loops)).is_reduction:
            continue
        name = eq.lhs.name
        decl = program.io.get(name)
        if decl is None or decl.role is not Role.INTERMEDIATE:
            continue
        cons_reads = sum(reads_count(Program((n,)), name) for n in (cons,))
        total_reads = reads_count(program, name)
        if cons_reads == 0 or cons_reads != total_reads:
            continue
        # every consumer read must use exactly the producer's write indices
        if any(r.name == name and r.indices != eq.lhs.indices
               for ceq in cons.equations() for r in reads_of(ceq.rhs)):
            continue
        sites.append(i)
    if not sites:
        return None
    i = rng.choice(sites)
    prod, cons = program.exprs[i], program.exprs[i + 1]
    eq = single_equation(prod)
    target = replace(eq.lhs, indices=eq.lhs.indices)

    def inline_body(item):
        if isinstance(item, Equation):
            return Equation(item.lhs, replace_reads(item.rhs, target, eq.rhs))
        return Nest(item.loops, tuple(inline_body(x) for x in item.body))

    new_cons = inline_body(cons)
    prog = with_io(program, replace_exprs(program, i, 2, [new_cons]))
    return prog, f"inlined the definition of {eq.lhs.name} into its only consumer"


def apply_expression_splitting(program: Program, rng: random.Random):
    sites = []
    for i, nest in enumerate(program.exprs):
        eq = single_equation(nest)
        if eq is None:
            continue
        lv = plain_vars(eq.lhs)
        if lv is None:
            continue
        if classify_reduction(eq, list(nest.loops)).is_reduction:
            continue
        for child in scalar_children(eq.rhs):
            if not scalar_children(child):
                continue
            if not scalar_vars(child) <= set(lv):
                continue
            # the subtree runs unguarded in its own nest
            if not reads_statically_in_bounds(child, list(nest.loops), program):
                continue
            sites.append((i, child))
    if not sites:
        return None
    # prefer a quotient's numerator when present
    pref = [s for s in sites if isinstance(program.exprs[s[0]].body[0].rhs, Div)
            and program.exprs[s[0]].body[0].rhs.lhs == s[1]]
    i, sub = (pref or sites)[0]
    nest = program.exprs[i]
    eq = single_equation(nest)
    (fresh,) = fresh_tensor_names(program, 1)
    ref = TensorRef(fresh, eq.lhs.dtype, eq.lhs.scope, eq.lhs.indices)
    first = Nest(nest.loops, (Equation(ref, sub),))
    new_rhs, _ = _replace_subtree_once(eq.rhs, sub, Read(ref))
    second = Nest(nest.loops, (Equation(eq.lhs, new_rhs),))
    prog = with_io(program, replace_exprs(program, i, 1, [first, second]),
                   {fresh: Role.INTERMEDIATE})
    return prog, f"materialized a subexpression of {eq.lhs.name} into fresh tensor {fresh}"


def _replace_subtree_once(e, sub, repl):
    from .base import rewrite_first

    return rewrite_first(e, lambda n: repl if n == sub else None)


def apply_concat_fuse(program: Program, rng: random.Random):
    sites = []
    for i in range(len(program.exprs) - 1):
        a, b = program.exprs[i], program.exprs[i + 1]
        if len(a.loops) < 2 or len(a.loops) != len(b.loops):
            continue
        if any(ha.kind != hb.kind or ha.start != 0 or hb.start != 0
               for ha, hb in zip(a.loops, b.loops)):
            continue
        if a.loops[0].extent != b.loops[0].extent:
            continue
        ea, eb = single_equation(a), single_equation(b)
        if ea is None or eb is None:
            continue
        va, vb = plain_vars(ea.lhs), plain_vars(eb.lhs)
        if va != [h.index for h in a.loops] or vb != [h.index for h in b.loops]:
            continue
        if not (reads_at_loop_vars(ea, va) and reads_at_loop_vars(eb, vb)):
            continue
        ra = [r.name for r in reads_of(ea.rhs)]
        rb = [r.name for r in reads_of(eb.rhs)]
        if len(ra) != len(rb):
            continue
        mapping = dict(zip(ra, rb))
        if len(set(ra)) != len(ra) or len(set(rb)) != len(rb):
            continue
        renamed = rename_reads(subst_scalar_indices(
            ea.rhs, {h.index: IVar(g.index) for h, g in zip(a.loops, b.loops)}), mapping)
        if renamed != eb.rhs:
            continue
        sites.append((i, mapping))
    if not sites:
        return None
    i, mapping = rng.choice(sites)
    a, b = program.exprs[i], program.exprs[i + 1]
    ea, eb = single_equation(a), single_equation(b)
    pairs = list(mapping.items())
    fresh = fresh_tensor_names(program, len(pairs) + 1)
    packed = dict(zip([p[0] for p in pairs], fresh[:-1]))
    fused_name = fresh[-1]
    off = a.loops[1].extent
    fused_loops = tuple(
        replace(h, extent=(h.extent + b.loops[k].extent) if k == 1
                else max(h.extent, b.loops[k].extent))
        for k, h in enumerate(a.loops)
    )
    vtup_a = var_tuple(h.index for h in a.loops)
    vtup_b = var_tuple(h.index for h in b.loops)

    def shifted(vt, axis_off):
        return vt[:1] + (IAdd(vt[1], IConst(axis_off)),) + vt[2:]

    exprs = []
    for src, dst in pairs:
        ref_a = next(r for r in reads_of(ea.rhs) if r.name == src)
        ref_b = next(r for r in reads_of(eb.rhs) if r.name == mapping[src])
        pref = TensorRef(packed[src], ref_a.dtype, ref_a.scope, vtup_a)
        exprs.append(Nest(a.loops, (Equation(pref, Read(ref_a)),)))
        pref2 = TensorRef(packed[src], ref_b.dtype, ref_b.scope, shifted(vtup_b, off))
        exprs.append(Nest(b.loops, (Equation(pref2, Read(ref_b)),)))
    fused_vt = var_tuple(h.index for h in fused_loops)
    fused_rhs = rename_reads(ea.rhs, packed)
    fused_ref = TensorRef(fused_name, ea.lhs.dtype, ea.lhs.scope, fused_vt)
    exprs.append(Nest(fused_loops, (Equation(fused_ref, fused_rhs),)))
    read_a = TensorRef(fused_name, ea.lhs.dtype, ea.lhs.scope, vtup_a)
    exprs.append(Nest(a.loops, (Equation(ea.lhs, Read(read_a)),)))
    read_b = TensorRef(fused_name, ea.lhs.dtype, ea.lhs.scope, shifted(vtup_b, off))
    exprs.append(Nest(b.loops, (Equation(eb.lhs, Read(read_b)),)))
    roles = {n: Role.INTERMEDIATE for n in fresh}
    prog = with_io(program, replace_exprs(program, i, 2, exprs), roles)
    return prog, (f"concatenated the inputs of nests {i} and {i + 1} along axis 1 "
                  f"into {', '.join(fresh[:-1])} and fused the computation into {fused_name}")


def apply_split_decouple(program: Program, rng: random.Random):
    sites = []
    for i, nest in enumerate(program.exprs):
        eq = single_equation(nest)
        if eq is None or not nest.loops or nest.loops[0].extent < 4:
            continue
        if nest.loops[0].start != 0:
            continue
        lv = plain_vars(eq.lhs)
        if lv != [h.index for h in nest.loops]:
            continue
        if not reads_at_loop_vars(eq, lv):
            continue
        names = {r.name for r in reads_of(eq.rhs)}
        if len(names) != 1:
            continue
        sites.append(i)
    if not sites:
        return None
    i = rng.choice(sites)
    nest = program.exprs[i]
    eq = single_equation(nest)
    n0 = nest.loops[0].extent
    s = rng.randrange(2, n0 - 1)
    src = reads_of(eq.rhs)[0]
    lo_name, hi_name, flo, fhi = fresh_tensor_names(program, 4)
    v0 = nest.loops[0].index
    lo_loops = (replace(nest.loops[0], extent=s),) + nest.loops[1:]
    hi_loops = (replace(nest.loops[0], extent=n0 - s),) + nest.loops[1:]
    vt = var_tuple(h.index for h in nest.loops)
    shift = (IAdd(IVar(v0), IConst(s)),) + vt[1:]

    def tref(name, ref, idx):
        return TensorRef(name, ref.dtype, ref.scope, idx)

    exprs = [
        Nest(lo_loops, (Equation(tref(lo_name, src, vt), Read(src)),)),
        Nest(hi_loops, (Equation(tref(hi_name, src, vt),
                                 Read(replace(src, indices=shift))),)),
        Nest(lo_loops, (Equation(tref(flo, eq.lhs, vt),
                                 rename_reads(eq.rhs, {src.name: lo_name})),)),
        Nest(hi_loops, (Equation(tref(fhi, eq.lhs, vt),
                                 rename_reads(eq.rhs, {src.name: hi_name})),)),
        Nest(lo_loops, (Equation(eq.lhs, Read(tref(flo, eq.lhs, vt))),)),
        Nest(hi_loops, (Equation(replace(eq.lhs, indices=shift),
                                 Read(tref(fhi, eq.lhs, vt))),)),
    ]
    roles = {n: Role.INTERMEDIATE for n in (lo_name, hi_name, flo, fhi)}
    prog = with_io(program, replace_exprs(program, i, 1, exprs), roles)
    return prog, (f"split the leading axis of nest {i} at {s}, computing rows "
                  f"below and above the cut through separate tensors")


def apply_cse(program: Program, rng: random.Random):
    sites = []
    for i, nest in enumerate(program.exprs):
        eq = single_equation(nest)
        if eq is None:
            continue
        lv = plain_vars(eq.lhs)
        if lv is None:
            continue
        counts: dict = {}
        for node in walk_scalar(eq.rhs):
            if scalar_children(node):
                counts[node] = counts.get(node, 0) + 1
        loop_order = [h.index for h in nest.loops]
        for node, c in counts.items():
            if c >= 2 and scalar_vars(node) <= set(lv):
                sites.append((i, node, tuple(v for v in loop_order
                                             if v in scalar_vars(node))))
    if not sites:
        return None
    # deepest duplicated subtree first for determinism
    i, sub, idx_vars = max(sites, key=lambda s: len(list(walk_scalar(s[1]))))
    nest = program.exprs[i]
    eq = single_equation(nest)
    (fresh,) = fresh_tensor_names(program, 1)
    ref = TensorRef(fresh, eq.lhs.dtype, eq.lhs.scope, var_tuple(idx_vars))
    from ..ir import rewrite_scalar

    new_rhs = rewrite_scalar(eq.rhs, lambda n: Read(ref) if n == sub else n)
    body = (Equation(ref, sub), Equation(eq.lhs, new_rhs))
    prog = with_io(program, replace_exprs(program, i, 1, [Nest(nest.loops, body)]),
                   {fresh: Role.INTERMEDIATE})
    return prog, f"hoisted a repeated subexpression into fresh tensor {fresh}"


def apply_expression_reorder(program: Program, rng: random.Random):
    sites = []
    for i in range(len(program.exprs) - 1):
        ra, wa = nest_footprint(program.exprs[i])
        rb, wb = nest_footprint(program.exprs[i + 1])
        if wa & (rb | wb) or wb & (ra | wa):
            continue
        sites.append(i)
    if not sites:
        return None
    i = rng.choice(sites)
    exprs = replace_exprs(program, i, 2, [program.exprs[i + 1], program.exprs[i]])
    return with_io(program, exprs), f"swapped independent nests {i} and {i + 1}"
