"""Memory-level strategies: staging buffers, layouts, and scopes."""

from __future__ import annotations

import random
from dataclasses import replace

from ..ir import (
    Equation, IAdd, IConst, IMul, IVar, LoopHeader, LoopKind, MemScope, Nest,
    Program, Read, Role, TensorRef, classify_reduction, fresh_index_names,
    fresh_tensor_names, index_vars, reads_of, rewrite_scalar,
)
from .base import (
    index_to_scalar, plain_vars, replace_exprs, single_equation, var_tuple,
    with_io,
)


def apply_cache_read_write(program: Program, rng: random.Random):
    write_sites = []
    read_sites = []
    for i, nest in enumerate(program.exprs):
        eq = single_equation(nest)
        if eq is None:
            continue
        if classify_reduction(eq, list(nest.loops)).is_reduction:
            continue
        if plain_vars(eq.lhs) is not None:
            write_sites.append(i)
        for ref in reads_of(eq.rhs):
            if ref.scope is MemScope.GLOBAL and plain_vars(ref) is not None \
                    and ref.name != eq.lhs.name:
                read_sites.append((i, ref))
    modes = (["write"] if write_sites else []) + (["read"] if read_sites else [])
    if not modes:
        return None
    mode = rng.choice(modes)
    (fresh,) = fresh_tensor_names(program, 1)
    if mode == "write":
        i = rng.choice(write_sites)
        nest = program.exprs[i]
        eq = single_equation(nest)
        staged = TensorRef(fresh, eq.lhs.dtype, MemScope.LOCAL, eq.lhs.indices)
        body = (Equation(staged, eq.rhs), Equation(eq.lhs, Read(staged)))
        prog = with_io(program, replace_exprs(program, i, 1, [Nest(nest.loops, body)]),
                       {fresh: Role.INTERMEDIATE})
        return prog, (f"staged the write to {eq.lhs.name} through local "
                      f"buffer {fresh}")
    i, ref = rng.choice(read_sites)
    nest = program.exprs[i]
    eq = single_equation(nest)
    staged = TensorRef(fresh, ref.dtype, MemScope.LOCAL, ref.indices)

    def fn(node):
        if isinstance(node, Read) and node.ref == ref:
            return Read(staged)
        return node

    body = (Equation(staged, Read(ref)), Equation(eq.lhs, rewrite_scalar(eq.rhs, fn)))
    prog = with_io(program, replace_exprs(program, i, 1, [Nest(nest.loops, body)]),
                   {fresh: Role.INTERMEDIATE})
    return prog, f"staged the read of {ref.name} through local buffer {fresh}"


def apply_layout_transformation(program: Program, rng: random.Random):
    candidates = []
    for name, decl in program.io.items():
        if decl.role is not Role.INPUT or len(decl.shape) != 2:
            continue
        refs = [r for _, eq in program.equations() for r in reads_of(eq.rhs)
                if r.name == name]
        if refs and all(len(r.indices) == 2 for r in refs):
            candidates.append(name)
    if not candidates:
        return None
    name = rng.choice(sorted(candidates))
    decl = program.io[name]
    (fresh,) = fresh_tensor_names(program, 1)
    taken = set()
    for n in program.exprs:
        taken |= {h.index for h in n.all_loops()}
    i0, i1 = fresh_index_names(taken, 2)
    src_ref = next(r for _, eq in program.equations() for r in reads_of(eq.rhs)
                   if r.name == name)
    copy = Nest(
        (LoopHeader(LoopKind.SERIAL, i0, 0, decl.shape[0]),
         LoopHeader(LoopKind.SERIAL, i1, 0, decl.shape[1])),
        (Equation(
            TensorRef(fresh, decl.dtype, MemScope.GLOBAL, (IVar(i1), IVar(i0))),
            Read(replace(src_ref, indices=(IVar(i0), IVar(i1))))),),
    )

    def fn(node):
        if isinstance(node, Read) and node.ref.name == name:
            p, q = node.ref.indices
            return Read(TensorRef(fresh, decl.dtype, MemScope.GLOBAL, (q, p)))
        return node

    exprs = [copy]
    for nest in program.exprs:
        exprs.append(_map_rhs(nest, fn))
    prog = with_io(program, exprs, {fresh: Role.INTERMEDIATE})
    return prog, f"transposed input {name} into {fresh} and redirected all reads"


def _map_rhs(nest: Nest, fn) -> Nest:
    body = []
    for item in nest.body:
        if isinstance(item, Equation):
            body.append(Equation(item.lhs, rewrite_scalar(item.rhs, fn)))
        else:
            body.append(_map_rhs(item, fn))
    return Nest(nest.loops, tuple(body))


def apply_set_storage_scope(program: Program, rng: random.Random):
    candidates = [n for n, d in program.io.items() if d.role is Role.INTERMEDIATE]
    if not candidates:
        return None
    name = rng.choice(sorted(candidates))
    current = None
    for _, eq in program.equations():
        for ref in [eq.lhs] + reads_of(eq.rhs):
            if ref.name == name:
                current = ref.scope
    new_scope = rng.choice([s for s in MemScope if s is not current])

    def remap(nest: Nest) -> Nest:
        body = []
        for item in nest.body:
            if isinstance(item, Equation):
                lhs = item.lhs if item.lhs.name != name else replace(item.lhs, scope=new_scope)

                def fn(node):
                    if isinstance(node, Read) and node.ref.name == name:
                        return Read(replace(node.ref, scope=new_scope))
                    return node

                body.append(Equation(lhs, rewrite_scalar(item.rhs, fn)))
            else:
                body.append(remap(item))
        return Nest(nest.loops, tuple(body))

    exprs = [remap(n) for n in program.exprs]
    prog = with_io(program, exprs)
    return prog, f"moved intermediate {name} to {new_scope.name.lower()} memory"


def apply_set_storage_layout(program: Program, rng: random.Random):
    candidates = []
    for name, decl in program.io.items():
        if decl.role is not Role.INTERMEDIATE or len(decl.shape) != 2:
            continue
        refs = [r for _, eq in program.equations()
                for r in [eq.lhs] + reads_of(eq.rhs) if r.name == name]
        if refs and all(len(r.indices) == 2 for r in refs):
            candidates.append(name)
    if not candidates:
        return None
    name = rng.choice(sorted(candidates))
    dim0 = program.io[name].shape[0]

    def flatten(ref: TensorRef) -> TensorRef:
        i0, i1 = ref.indices
        return replace(ref, indices=(IAdd(IMul(i1, IConst(dim0)), i0),))

    def remap(nest: Nest) -> Nest:
        body = []
        for item in nest.body:
            if isinstance(item, Equation):
                lhs = item.lhs if item.lhs.name != name else flatten(item.lhs)

                def fn(node):
                    if isinstance(node, Read) and node.ref.name == name:
                        return Read(flatten(node.ref))
                    return node

                body.append(Equation(lhs, rewrite_scalar(item.rhs, fn)))
            else:
                body.append(remap(item))
        return Nest(nest.loops, tuple(body))

    exprs = [remap(n) for n in program.exprs]
    io = {n: d for n, d in program.io.items()}
    del io[name]
    prog = with_io(replace(program, io=io), exprs, {name: Role.INTERMEDIATE})
    return prog, f"linearized intermediate {name} to one dimension with stride {dim0}"


def apply_precompute_indices(program: Program, rng: random.Random):
    from ..ir import DType, iter_equations_with_scope

    sites = []
    for ei, _, eq, scope in iter_equations_with_scope(program):
        headers = {h.index: h for h in scope}
        for ref in reads_of(eq.rhs):
            for ix in ref.indices:
                vs = sorted(index_vars(ix))
                from ..ir import bind_prefix_of

                if len(vs) >= 2 and all(
                        v in headers and bind_prefix_of(v) is None for v in vs):
                    sites.append((ix, tuple(headers[v] for v in vs)))
    if not sites:
        return None
    dedup = []
    for s in sites:
        if s not in dedup:
            dedup.append(s)
    ix, headers = rng.choice(dedup)
    (fresh,) = fresh_tensor_names(program, 1)
    loops = tuple(LoopHeader(LoopKind.SERIAL, h.index, h.start, h.extent)
                  for h in headers)
    ref = TensorRef(fresh, DType.I64, MemScope.GLOBAL,
                    var_tuple(h.index for h in headers))
    table = Nest(loops, (Equation(ref, index_to_scalar(ix)),))
    prog = with_io(program, (table,) + program.exprs, {fresh: Role.INTERMEDIATE})
    return prog, f"tabulated a compound index expression into integer tensor {fresh}"
