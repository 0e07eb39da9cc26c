from __future__ import annotations

import pytest

from leir.ir import validate
from leir.syntax import ParseError, byte_stats, parse, unparse

MM = ("L^{4}_{i=0}L^{4}_{j=0}L^{4}_{k=0}"
      "[C^{f32,g}_{i,j}=C^{f32,g}_{i,j}+A^{f32,g}_{i,k}*D^{f32,g}_{k,j};];")


def test_round_trip_is_fixpoint():
    canon = unparse(parse(MM))
    assert unparse(parse(canon)) == canon


def test_parse_rejects_garbage():
    for bad in ("", "hello", "L^{4}_{i=0}", "L^{4}_{i=0}[;];"):
        with pytest.raises(ParseError):
            parse(bad)


def test_parse_error_carries_span():
    with pytest.raises(ParseError) as exc:
        parse("L^{4}_{i=0}[A^{f32,g}_{i}=@;];")
    assert exc.value.span.byte_start >= 0


def test_if_then_else_and_infinity():
    text = ("L^{4}_{i=0}L^{4}_{d=0}[R^{f64,g}_{i,d}="
            "max(if_then_else(d-1<0,-inf,R^{f64,g}_{i,d-1}),X^{f64,g}_{i,d});];")
    program = parse(text)
    assert validate(program) == []
    assert unparse(parse(unparse(program))) == unparse(program)


def test_printer_injective_on_subtraction_chains():
    a = "L^{4}_{i=0}[A^{f32,g}_{i}=X^{f32,g}_{i}-Y^{f32,g}_{i}-Z^{f32,g}_{i};];"
    b = "L^{4}_{i=0}[A^{f32,g}_{i}=X^{f32,g}_{i}-(Y^{f32,g}_{i}-Z^{f32,g}_{i});];"
    assert unparse(parse(a)) != unparse(parse(b))


def test_validation_catches_reserved_and_binding_errors():
    reserved = "L^{4}_{i=0}[T^{f32,g}_{i}=X^{f32,g}_{i};];"
    assert any(d.code == "ReservedName" for d in validate(parse(reserved)))
    cap = "B^{2000}_{ty=0}[A^{f32,g}_{ty}=X^{f32,g}_{ty};];"
    assert any(d.code == "BindingCapExceeded" for d in validate(parse(cap)))


def test_byte_stats():
    info = byte_stats(MM)
    assert info["bytes"] == len(MM.encode())
    assert 0 < info["nonspace_bytes"] <= info["bytes"]
