"""Scan-family strategies: reductions rewritten as running prefix scans."""

from __future__ import annotations

import random
from dataclasses import replace

from ..ir import (
    Add, Cmp, Div, Equation, Exp, IConst, ISub, IVar, IfThenElse, LoopHeader,
    LoopKind, Max, Min, Mul, Nest, Program, Read, Role, SConst, Sub,
    TensorRef, classify_reduction, fresh_index_names, fresh_tensor_names,
    reads_of, subst_index,
)
from .base import plain_vars, replace_exprs, single_equation, with_io


def _guard(d: str) -> Cmp:
    return Cmp("<", ISub(IVar(d), IConst(1)), IConst(0))


def _at_prev(ref: TensorRef, d: str) -> TensorRef:
    m = {d: ISub(IVar(d), IConst(1))}
    return replace(ref, indices=tuple(subst_index(x, m) for x in ref.indices))


def _at_last(ref: TensorRef, d: str, last: int) -> TensorRef:
    m = {d: IConst(last)}
    return replace(ref, indices=tuple(subst_index(x, m) for x in ref.indices))


def _scan_pair_eqs(s_ref: TensorRef, w_ref: TensorRef, y, d: str):
    """Running max S and rescaled running sum of exponentials W."""
    s_prev = IfThenElse(_guard(d), SConst(-float("inf")), Read(_at_prev(s_ref, d)))
    s_eq = Equation(s_ref, Max(s_prev, y))
    w_prev = IfThenElse(_guard(d), SConst(1.0), Read(_at_prev(w_ref, d)))
    rescale = Exp(Sub(IfThenElse(_guard(d), SConst(-float("inf")),
                                 Read(_at_prev(s_ref, d))), Read(s_ref)))
    w_eq = Equation(w_ref, Add(Mul(w_prev, rescale), Exp(Sub(y, Read(s_ref)))))
    return s_eq, w_eq


def _single_axis(nest: Nest, eq: Equation):
    info = classify_reduction(eq, list(nest.loops))
    if not info.is_reduction or len(info.reduction_axes) != 1:
        return None
    (axis,) = info.reduction_axes
    h = next(x for x in nest.loops if x.index == axis)
    if h.kind is not LoopKind.SERIAL or h.start != 0:
        return None
    return info, h


def _match_pair(program: Program, i: int):
    """Adjacent (max reduction, sum of rescaled exponentials) over one axis."""
    a, b = program.exprs[i], program.exprs[i + 1]
    if a.loops != b.loops:
        return None
    ea, eb = single_equation(a), single_equation(b)
    if ea is None or eb is None:
        return None
    if plain_vars(ea.lhs) is None or ea.lhs.indices != eb.lhs.indices:
        return None
    ra = _single_axis(a, ea)
    rb = _single_axis(b, eb)
    if ra is None or rb is None or ra[1] != rb[1]:
        return None
    if ra[0].combiner.value != "max" or rb[0].combiner.value != "sum":
        return None
    h = ra[1]
    if not isinstance(ea.rhs, Max):
        return None
    self_a = Read(ea.lhs)
    y = ea.rhs.rhs if ea.rhs.lhs == self_a else (
        ea.rhs.lhs if ea.rhs.rhs == self_a else None)
    if y is None or not isinstance(eb.rhs, Add):
        return None
    self_b = Read(eb.lhs)
    addend = eb.rhs.rhs if eb.rhs.lhs == self_b else (
        eb.rhs.lhs if eb.rhs.rhs == self_b else None)
    want = Exp(Sub(y, Read(ea.lhs)))
    if addend != want:
        return None
    if any(x.index not in {v.name for v in ea.lhs.indices} | {h.index}
           for x in a.loops):
        return None
    return ea, eb, h, y


def _reads_outside(program: Program, name: str, skip: set[int]) -> bool:
    for i, eq in program.equations():
        if i not in skip and any(r.name == name for r in reads_of(eq.rhs)):
            return True
    return False


def _needs_writeback(program: Program, name: str, replaced: set[int]) -> bool:
    if program.io[name].role is not Role.INTERMEDIATE:
        return True
    return _reads_outside(program, name, replaced)


def _out_loops(loops, lhs: TensorRef):
    vars_ = {v.name for v in lhs.indices}
    return tuple(h for h in loops if h.index in vars_)


def apply_prefix_max(program: Program, rng: random.Random):
    for i in range(len(program.exprs) - 1):
        m = _match_pair(program, i)
        if m is None:
            continue
        ea, eb, h, y = m
        a = program.exprs[i]
        s_name, w_name = fresh_tensor_names(program, 2)
        scan_idx = ea.lhs.indices + (IVar(h.index),)
        s_ref = TensorRef(s_name, ea.lhs.dtype, ea.lhs.scope, scan_idx)
        w_ref = TensorRef(w_name, eb.lhs.dtype, eb.lhs.scope, scan_idx)
        s_eq, w_eq = _scan_pair_eqs(s_ref, w_ref, y, h.index)
        scan = Nest(a.loops, (s_eq, w_eq))
        out = _out_loops(a.loops, ea.lhs)
        last = h.extent - 1
        exprs = [scan,
                 Nest(out, (Equation(eb.lhs, Read(_at_last(w_ref, h.index, last))),))]
        replaced = {i, i + 1}
        if _needs_writeback(program, ea.lhs.name, replaced):
            exprs.append(Nest(out, (Equation(ea.lhs, Read(_at_last(s_ref, h.index, last))),)))
        roles = {s_name: Role.INTERMEDIATE, w_name: Role.INTERMEDIATE}
        prog = with_io(program, replace_exprs(program, i, 2, exprs), roles)
        return prog, (f"replaced the max/sum-of-exponentials pair over {h.index} "
                      f"with running scans {s_name}, {w_name} and a writeback of "
                      f"the final scan column")
    return None


def apply_prefix_expsum(program: Program, rng: random.Random):
    comb_op = {"sum": Add, "product": Mul, "max": Max, "min": Min}
    for i, nest in enumerate(program.exprs):
        eq = single_equation(nest)
        if eq is None or plain_vars(eq.lhs) is None:
            continue
        m = _single_axis(nest, eq)
        if m is None:
            continue
        info, h = m
        lhs_vars = {v.name for v in eq.lhs.indices}
        if any(x.index not in lhs_vars | {h.index} for x in nest.loops):
            continue
        self_read = Read(eq.lhs)
        rhs = eq.rhs
        if rhs.lhs == self_read:
            addend = rhs.rhs
        elif rhs.rhs == self_read:
            addend = rhs.lhs
        else:
            continue
        (s_name,) = fresh_tensor_names(program, 1)
        scan_idx = eq.lhs.indices + (IVar(h.index),)
        s_ref = TensorRef(s_name, eq.lhs.dtype, eq.lhs.scope, scan_idx)
        prev = IfThenElse(_guard(h.index), SConst(info.identity),
                          Read(_at_prev(s_ref, h.index)))
        op = comb_op[info.combiner.value]
        scan = Nest(nest.loops, (Equation(s_ref, op(prev, addend)),))
        out = _out_loops(nest.loops, eq.lhs)
        wb = Nest(out, (Equation(eq.lhs, Read(_at_last(s_ref, h.index, h.extent - 1))),))
        prog = with_io(program, replace_exprs(program, i, 1, [scan, wb]),
                       {s_name: Role.INTERMEDIATE})
        return prog, (f"turned the {info.combiner.value} reduction over "
                      f"{h.index} into prefix scan {s_name} plus a writeback "
                      f"of its last element")
    return None


def _match_normalize(program: Program, i: int, ea, eb, h, y):
    """Third pass of a softmax: normalize by the two reduction results."""
    if i + 2 >= len(program.exprs):
        return None
    c = program.exprs[i + 2]
    if c.loops != program.exprs[i].loops:
        return None
    ec = single_equation(c)
    if ec is None or plain_vars(ec.lhs) is None:
        return None
    if classify_reduction(ec, list(c.loops)).is_reduction:
        return None
    want = Div(Exp(Sub(y, Read(ea.lhs))), Read(eb.lhs))
    if ec.rhs != want:
        return None
    lhs_vars = {v.name for v in ec.lhs.indices}
    out_vars = {v.name for v in ea.lhs.indices}
    if lhs_vars != out_vars | {h.index}:
        return None
    return ec


def apply_online_softmax(program: Program, rng: random.Random):
    for i in range(len(program.exprs) - 2):
        m = _match_pair(program, i)
        if m is None:
            continue
        ea, eb, h, y = m
        ec = _match_normalize(program, i, ea, eb, h, y)
        if ec is None:
            continue
        a = program.exprs[i]
        s_name, w_name = fresh_tensor_names(program, 2)
        scan_idx = ea.lhs.indices + (IVar(h.index),)
        s_ref = TensorRef(s_name, ea.lhs.dtype, ea.lhs.scope, scan_idx)
        w_ref = TensorRef(w_name, eb.lhs.dtype, eb.lhs.scope, scan_idx)
        s_eq, w_eq = _scan_pair_eqs(s_ref, w_ref, y, h.index)
        scan = Nest(a.loops, (s_eq, w_eq))
        last = h.extent - 1
        norm_rhs = Div(Exp(Sub(y, Read(_at_last(s_ref, h.index, last)))),
                       Read(_at_last(w_ref, h.index, last)))
        norm = Nest(program.exprs[i + 2].loops, (Equation(ec.lhs, norm_rhs),))
        exprs = [scan, norm]
        replaced = {i, i + 1, i + 2}
        out = _out_loops(a.loops, ea.lhs)
        for name, tref in ((ea.lhs.name, (ea.lhs, s_ref)), (eb.lhs.name, (eb.lhs, w_ref))):
            if _needs_writeback(program, name, replaced):
                lhs, sref = tref
                exprs.append(Nest(out, (Equation(lhs, Read(_at_last(sref, h.index, last))),)))
        roles = {s_name: Role.INTERMEDIATE, w_name: Role.INTERMEDIATE}
        prog = with_io(program, replace_exprs(program, i, 3, exprs), roles)
        return prog, (f"replaced the three-pass softmax over {h.index} with "
                      f"single-pass scans {s_name}, {w_name} and one "
                      f"normalization pass")
    return None


def _match_matmul(program: Program, j: int, value_name: str, out_vars: set[str],
                  scan_extent: int):
    """Sum reduction lhs += value[outs, k] * other[...] with k of scan length."""
    nest = program.exprs[j] if j < len(program.exprs) else None
    if nest is None:
        return None
    eq = single_equation(nest)
    if eq is None or plain_vars(eq.lhs) is None:
        return None
    info = classify_reduction(eq, list(nest.loops))
    if not info.is_reduction or info.combiner.value != "sum" \
            or len(info.reduction_axes) != 1:
        return None
    (k,) = info.reduction_axes
    kh = next(x for x in nest.loops if x.index == k)
    if kh.kind is not LoopKind.SERIAL or kh.start != 0 or kh.extent != scan_extent:
        return None
    self_read = Read(eq.lhs)
    addend = eq.rhs.rhs if eq.rhs.lhs == self_read else (
        eq.rhs.lhs if eq.rhs.rhs == self_read else None)
    if not isinstance(addend, Mul):
        return None
    for v, x in ((addend.lhs, addend.rhs), (addend.rhs, addend.lhs)):
        if not (isinstance(v, Read) and isinstance(x, Read)):
            continue
        if v.ref.name != value_name:
            continue
        vv = plain_vars(v.ref)
        if vv is None or set(vv) != out_vars | {k}:
            continue
        lhs_vars = {nm.name for nm in eq.lhs.indices}
        cols = lhs_vars - out_vars
        if len(cols) != 1:
            continue
        (col,) = cols
        col_h = next(x2 for x2 in nest.loops if x2.index == col)
        return eq, kh, col_h, v.ref, x.ref
    return None


def _accumulator_eq(ca_ref: TensorRef, s_ref: TensorRef, w_ref: TensorRef,
                    y, d: str, x_read: Read):
    carried = Mul(Mul(Read(_at_prev(ca_ref, d)),
                      Div(Read(_at_prev(w_ref, d)), Read(w_ref))),
                  Exp(Sub(Read(_at_prev(s_ref, d)), Read(s_ref))))
    fresh_term = Mul(Div(Exp(Sub(y, Read(s_ref))), Read(w_ref)), x_read)
    return Equation(ca_ref, Add(IfThenElse(_guard(d), SConst(0.0), carried),
                                fresh_term))


def apply_flash_attention(program: Program, rng: random.Random):
    for i in range(len(program.exprs) - 3):
        m = _match_pair(program, i)
        if m is None:
            continue
        ea, eb, h, y = m
        ec = _match_normalize(program, i, ea, eb, h, y)
        if ec is None:
            continue
        out_vars = {v.name for v in ea.lhs.indices}
        mm = _match_matmul(program, i + 3, ec.lhs.name, out_vars, h.extent)
        if mm is None:
            continue
        eq4, kh, col_h, v_ref, x_ref = mm
        a = program.exprs[i]
        nest4 = program.exprs[i + 3]
        s_name, w_name, ca_name = fresh_tensor_names(program, 3)
        taken = {x.index for n in program.exprs for x in n.all_loops()}
        (col_idx,) = fresh_index_names(taken, 1)
        scan_idx = ea.lhs.indices + (IVar(h.index),)
        s_ref = TensorRef(s_name, ea.lhs.dtype, ea.lhs.scope, scan_idx)
        w_ref = TensorRef(w_name, eb.lhs.dtype, eb.lhs.scope, scan_idx)
        s_eq, w_eq = _scan_pair_eqs(s_ref, w_ref, y, h.index)
        ca_idx = ea.lhs.indices + (IVar(col_idx), IVar(h.index))
        ca_ref = TensorRef(ca_name, eq4.lhs.dtype, eq4.lhs.scope, ca_idx)
        x_map = {kh.index: IVar(h.index), col_h.index: IVar(col_idx)}
        x_read = Read(replace(x_ref, indices=tuple(
            subst_index(ix, x_map) for ix in x_ref.indices)))
        ca_eq = _accumulator_eq(ca_ref, s_ref, w_ref, y, h.index, x_read)
        inner = Nest((LoopHeader(LoopKind.SERIAL, col_idx, 0, col_h.extent),),
                     (ca_eq,))
        scan = Nest(a.loops, (s_eq, w_eq, inner))
        wb_loops = tuple(x for x in nest4.loops if x.index != kh.index)
        wb_idx = tuple(v for v in eq4.lhs.indices)
        ca_at = TensorRef(ca_name, eq4.lhs.dtype, eq4.lhs.scope,
                          tuple(v for v in ea.lhs.indices)
                          + (IVar(col_h.index), IConst(h.extent - 1)))
        wb = Nest(wb_loops, (Equation(replace(eq4.lhs, indices=wb_idx), Read(ca_at)),))
        exprs = [scan, wb]
        replaced = {i, i + 1, i + 2, i + 3}
        out = _out_loops(a.loops, ea.lhs)
        for name, lhs, sref in ((ea.lhs.name, ea.lhs, s_ref),
                                (eb.lhs.name, eb.lhs, w_ref),
                                (ec.lhs.name, ec.lhs, None)):
            if sref is not None and _needs_writeback(program, name, replaced):
                exprs.append(Nest(out, (Equation(
                    lhs, Read(_at_last(sref, h.index, h.extent - 1))),)))
        roles = {s_name: Role.INTERMEDIATE, w_name: Role.INTERMEDIATE,
                 ca_name: Role.INTERMEDIATE}
        prog = with_io(program, replace_exprs(program, i, 4, exprs), roles)
        return prog, (f"folded the softmax over {h.index} and the following "
                      f"matrix multiply into one scan with rescaled running "
                      f"accumulator {ca_name}")
    return None


def _match_scan_pair_expr(program: Program, i: int):
    """An already-scanned pair: one nest holding the S and W recurrences."""
    nest = program.exprs[i]
    if len(nest.body) != 2 or not all(isinstance(x, Equation) for x in nest.body):
        return None
    s_eq, w_eq = nest.body
    if not isinstance(s_eq.rhs, Max):
        return None
    vs = plain_vars(s_eq.lhs)
    if vs is None or plain_vars(w_eq.lhs) != vs:
        return None
    # locate the scan axis: S reads itself shifted by one on that axis
    prev_reads = [r for r in reads_of(s_eq.rhs) if r.name == s_eq.lhs.name]
    if len(prev_reads) != 1:
        return None
    d = None
    for pos, (a, b) in enumerate(zip(s_eq.lhs.indices, prev_reads[0].indices)):
        if a != b:
            if b == ISub(a, IConst(1)) and isinstance(a, IVar):
                d = a.name
            else:
                return None
    if d is None or d != vs[-1]:
        return None
    h = next((x for x in nest.loops if x.index == d), None)
    if h is None or h.kind is not LoopKind.SERIAL or h.start != 0:
        return None
    ite = s_eq.rhs.lhs if isinstance(s_eq.rhs.lhs, IfThenElse) else s_eq.rhs.rhs
    y = s_eq.rhs.rhs if isinstance(s_eq.rhs.lhs, IfThenElse) else s_eq.rhs.lhs
    if not isinstance(ite, IfThenElse):
        return None
    return s_eq, w_eq, h, y


def apply_prefix_matmul(program: Program, rng: random.Random):
    for i in range(len(program.exprs) - 2):
        m = _match_scan_pair_expr(program, i)
        if m is None:
            continue
        s_eq, w_eq, h, y = m
        nest = program.exprs[i]
        out_idx = s_eq.lhs.indices[:-1]
        out_vars = {v.name for v in out_idx}
        # the normalize pass reading the last scan column
        nb = program.exprs[i + 1]
        en = single_equation(nb)
        if en is None or plain_vars(en.lhs) is None:
            continue
        last = h.extent - 1
        s_last = Read(_at_last(s_eq.lhs, h.index, last))
        w_last = Read(_at_last(w_eq.lhs, h.index, last))
        if en.rhs != Div(Exp(Sub(y, s_last)), w_last):
            continue
        mm = _match_matmul(program, i + 2, en.lhs.name, out_vars, h.extent)
        if mm is None:
            continue
        eq4, kh, col_h, v_ref, x_ref = mm
        nest4 = program.exprs[i + 2]
        (ca_name,) = fresh_tensor_names(program, 1)
        taken = {x.index for n in program.exprs for x in n.all_loops()}
        (col_idx,) = fresh_index_names(taken, 1)
        ca_idx = out_idx + (IVar(col_idx), IVar(h.index))
        ca_ref = TensorRef(ca_name, eq4.lhs.dtype, eq4.lhs.scope, ca_idx)
        x_map = {kh.index: IVar(h.index), col_h.index: IVar(col_idx)}
        x_read = Read(replace(x_ref, indices=tuple(
            subst_index(ix, x_map) for ix in x_ref.indices)))
        ca_eq = _accumulator_eq(ca_ref, s_eq.lhs, w_eq.lhs, y, h.index, x_read)
        inner = Nest((LoopHeader(LoopKind.SERIAL, col_idx, 0, col_h.extent),),
                     (ca_eq,))
        scan = Nest(nest.loops, (s_eq, w_eq, inner))
        wb_loops = tuple(x for x in nest4.loops if x.index != kh.index)
        ca_at = TensorRef(ca_name, eq4.lhs.dtype, eq4.lhs.scope,
                          out_idx + (IVar(col_h.index), IConst(last)))
        wb = Nest(wb_loops, (Equation(eq4.lhs, Read(ca_at)),))
        exprs = [scan, wb]
        replaced = {i, i + 1, i + 2}
        if _needs_writeback(program, en.lhs.name, replaced):
            exprs.insert(1, nb)
        prog = with_io(program, replace_exprs(program, i, 3, exprs),
                       {ca_name: Role.INTERMEDIATE})
        return prog, (f"pushed the matrix multiply into the existing scan over "
                      f"{h.index} via rescaled running accumulator {ca_name}")
    return None
