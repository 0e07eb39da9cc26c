from __future__ import annotations

import numpy as np
import pytest

from leir.interp import (
    OutOfBounds, SignatureMismatch, equivalent, output_tolerance,
    random_env, run, shrink_shapes,
)
from leir.syntax import parse, unparse

MM = ("L^{4}_{i=0}L^{5}_{j=0}L^{6}_{k=0}"
      "[C^{f64,g}_{i,j}=C^{f64,g}_{i,j}+A^{f64,g}_{i,k}*D^{f64,g}_{k,j};];")


def test_matmul_matches_numpy():
    program = parse(MM)
    env = run(program, random_env(program, seed=0))
    want = env.tensors["A"] @ env.tensors["D"]
    assert np.allclose(env.tensors["C"], want, atol=1e-12)


def test_reduction_identity_init_per_element():
    text = ("L^{3}_{i=0}L^{4}_{k=0}[M^{f64,g}_{i}="
            "max(M^{f64,g}_{i},X^{f64,g}_{i,k});];")
    program = parse(text)
    env = run(program, random_env(program, seed=1))
    assert np.allclose(env.tensors["M"], env.tensors["X"].max(axis=1))


def test_product_and_min_combiners():
    text = ("L^{3}_{i=0}L^{4}_{k=0}[P^{f64,g}_{i}="
            "P^{f64,g}_{i}*X^{f64,g}_{i,k};];"
            "L^{3}_{i=0}L^{4}_{k=0}[N^{f64,g}_{i}="
            "min(N^{f64,g}_{i},X^{f64,g}_{i,k});];")
    program = parse(text)
    env = run(program, random_env(program, seed=2))
    x = env.tensors["X"]
    assert np.allclose(env.tensors["P"], x.prod(axis=1))
    assert np.allclose(env.tensors["N"], x.min(axis=1))


def test_out_of_bounds_raises():
    text = "L^{4}_{i=0}[A^{f64,g}_{i}=X^{f64,g}_{i+4};];"
    program = parse(text)
    program.io["X"] = program.io["X"].__class__(
        program.io["X"].dtype, (4,), program.io["X"].role)
    with pytest.raises(OutOfBounds):
        run(program, random_env(program, seed=0))


def test_equivalent_detects_difference():
    a = parse("L^{4}_{i=0}[A^{f64,g}_{i}=X^{f64,g}_{i}*2;];")
    b = parse("L^{4}_{i=0}[A^{f64,g}_{i}=X^{f64,g}_{i}*3;];")
    assert not equivalent(a, b).equivalent


def test_equivalent_requires_matching_signatures():
    a = parse("L^{4}_{i=0}[A^{f64,g}_{i}=X^{f64,g}_{i};];")
    b = parse("L^{4}_{i=0}[A^{f32,g}_{i}=X^{f32,g}_{i};];")
    with pytest.raises(SignatureMismatch):
        equivalent(a, b)


def test_tolerance_tracks_output_dtype():
    f16 = parse("L^{4}_{i=0}[A^{f16,g}_{i}=X^{f64,g}_{i};];")
    f64 = parse("L^{4}_{i=0}[A^{f64,g}_{i}=X^{f64,g}_{i};];")
    assert output_tolerance(f16) == (1e-2, 1e-3)
    assert output_tolerance(f64) == (1e-9, 1e-12)


def test_positive_sampling_under_log():
    text = "L^{4}_{i=0}[A^{f64,g}_{i}=log(X^{f64,g}_{i});];"
    program = parse(text)
    env = random_env(program, seed=3)
    assert (env.tensors["X"] > 0).all()


def test_shrink_shapes_remaps_extents_and_offsets():
    text = ("L^{128}_{i=0}L^{128}_{d=0}[R^{f64,g}_{i,d}="
            "max(if_then_else(d-1<0,-inf,R^{f64,g}_{i,d-1}),X^{f64,g}_{i,d});];"
            "L^{128}_{i=0}[O^{f64,g}_{i}=R^{f64,g}_{i,127};];")
    small = shrink_shapes(parse(text), cap=8)
    out = unparse(small)
    assert "128" not in out and "127" not in out
    env = run(small, random_env(small, seed=0))
    want = np.maximum.accumulate(env.tensors["X"], axis=1)[:, -1]
    assert np.allclose(env.tensors["O"], want)


def test_shrink_is_identity_below_cap():
    text = "L^{4}_{i=0}[A^{f64,g}_{i}=X^{f64,g}_{i};];"
    assert unparse(shrink_shapes(parse(text))) == unparse(parse(text))
