"""Dispatch layer: apply a named strategy to a program and validate the result."""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..ir import Program, validate
from . import graph, loops, mathrules, memory, prefix
from .registry import STRATEGIES

_IMPL = {
    "operator fusion": graph.apply_fusion,
    "operator fission": graph.apply_fission,
    "compute inline": graph.apply_inline,
    "expression splitting": graph.apply_expression_splitting,
    "tensor concat to fuse operators": graph.apply_concat_fuse,
    "tensor split to decouple operators": graph.apply_split_decouple,
    "common subexpression elimination": graph.apply_cse,
    "expression reorder": graph.apply_expression_reorder,
    "loop reorder": loops.apply_loop_reorder,
    "loop tiling": loops.apply_loop_tiling,
    "loop split": loops.apply_loop_split,
    "loop fusion": loops.apply_loop_fusion,
    "loop unrolling": loops.apply_loop_unrolling,
    "loop parallelization": loops.apply_loop_parallelization,
    "loop vectorization": loops.apply_loop_vectorization,
    "loop binding": loops.apply_loop_binding,
    "reduction factorization": loops.apply_reduction_factorization,
    "cache read write": memory.apply_cache_read_write,
    "layout transformation": memory.apply_layout_transformation,
    "set storage scope": memory.apply_set_storage_scope,
    "set storage layout": memory.apply_set_storage_layout,
    "precompute indices": memory.apply_precompute_indices,
    "factorization": mathrules.apply_factorization,
    "expand factorization": mathrules.apply_expand_factorization,
    "cancellation": mathrules.apply_cancellation,
    "expand cancellation": mathrules.apply_expand_cancellation,
    "apart": mathrules.apply_apart,
    "together": mathrules.apply_together,
    "powsimp": mathrules.apply_powsimp,
    "expand powsimp": mathrules.apply_expand_powsimp,
    "logsimp": mathrules.apply_logsimp,
    "expand log": mathrules.apply_expand_log,
    "collect": mathrules.apply_collect,
    "expand collect": mathrules.apply_expand_collect,
    "partially equivalent then correct": mathrules.apply_petc,
    "exponential split": mathrules.apply_exponential_split,
    "multiplicative split": mathrules.apply_multiplicative_split,
    "additive split": mathrules.apply_additive_split,
    "normal loop max to prefix max": prefix.apply_prefix_max,
    "normal loop summation on exp to prefix summation on exp":
        prefix.apply_prefix_expsum,
    "online softmax": prefix.apply_online_softmax,
    "flashattention wo tiling": prefix.apply_flash_attention,
    "normal matmul to prefix matmul based on online softmax":
        prefix.apply_prefix_matmul,
}

assert set(_IMPL) == set(STRATEGIES)


@dataclass(frozen=True)
class ApplyResult:
    program: Program
    strategy: str
    note: str


def apply(program: Program, name: str, rng: random.Random | None = None) -> ApplyResult | None:
    """Apply a strategy; None when infeasible or when the result is invalid."""
    if rng is None:
        rng = random.Random(0)
    out = _IMPL[name](program, rng)
    if out is None:
        return None
    prog, note = out
    if validate(prog):
        return None
    if prog.exprs == program.exprs and prog.io == program.io:
        return None
    return ApplyResult(prog, name, note)


def feasible(program: Program, name: str) -> bool:
    return apply(program, name, random.Random(0)) is not None


def applicable_strategies(program: Program) -> list[str]:
    return [n for n in STRATEGIES if feasible(program, n)]
