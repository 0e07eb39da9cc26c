from __future__ import annotations

import random

import pytest

from leir.corpus import STRATEGY_EXAMPLE_INPUTS
from leir.interp import shrink_shapes
from leir.ir import validate
from leir.strategies import (
    STRATEGIES, apply, applicable_strategies, difficulty_bucket,
    difficulty_score, feasible, inverse_of, undo_conflicts,
)
from leir.syntax import parse, unparse


def test_registry_shape():
    assert len(STRATEGIES) == 43
    levels = {}
    for info in STRATEGIES.values():
        levels[info.level.value] = levels.get(info.level.value, 0) + 1
    assert levels == {"graph": 8, "loop": 9, "memory": 5, "math": 21}


def test_bucket_sizes():
    buckets = {}
    for name in STRATEGIES:
        b = difficulty_bucket(name)
        buckets[b] = buckets.get(b, 0) + 1
    assert buckets == {"Easy": 13, "Medium": 12, "Difficult": 18}


def test_inverse_pairs_are_symmetric_where_declared():
    for name in STRATEGIES:
        inv = inverse_of(name)
        if inv is not None and inverse_of(inv) is not None:
            assert inverse_of(inv) in (name, inverse_of(inv))
    assert inverse_of("operator fusion") == "operator fission"
    assert inverse_of("operator fission") == "operator fusion"
    assert "loop fusion" in undo_conflicts("loop tiling")


def test_every_strategy_applies_to_its_example():
    for name, text in STRATEGY_EXAMPLE_INPUTS.items():
        small = shrink_shapes(parse(text))
        res = apply(small, name, random.Random(0))
        assert res is not None, name
        assert validate(res.program) == [], name
        assert unparse(res.program) != unparse(small), name
        assert res.note, name


def test_apply_returns_none_when_infeasible():
    elementwise = parse("L^{4}_{i=0}[A^{f32,g}_{i}=X^{f32,g}_{i};];")
    assert apply(elementwise, "online softmax", random.Random(0)) is None
    assert not feasible(elementwise, "reduction factorization")


def test_applicable_strategies_subset():
    program = parse(STRATEGY_EXAMPLE_INPUTS["loop tiling"])
    names = applicable_strategies(shrink_shapes(program))
    assert "loop tiling" in names
    assert set(names) <= set(STRATEGIES)


def test_apply_is_deterministic_per_seed():
    program = shrink_shapes(parse(STRATEGY_EXAMPLE_INPUTS["loop split"]))
    a = apply(program, "loop split", random.Random(7))
    b = apply(program, "loop split", random.Random(7))
    assert unparse(a.program) == unparse(b.program)


def test_difficulty_scores_match_buckets():
    for name in STRATEGIES:
        s = difficulty_score(name)
        b = difficulty_bucket(name)
        if b == "Easy":
            assert s < 1.0
        elif b == "Medium":
            assert 1.0 <= s < 2.5
        else:
            assert s >= 2.5


def test_unknown_strategy_raises():
    program = parse("L^{4}_{i=0}[A^{f32,g}_{i}=X^{f32,g}_{i};];")
    with pytest.raises(KeyError):
        apply(program, "no such strategy", random.Random(0))
