"""HTTP service exposing the core operations.

Run with:  uvicorn leir.service:app
The CLI talks to the library directly; this service is an additional
surface for remote clients and offers the same parse / validate / run /
apply / verify / search operations over JSON.
"""

from __future__ import annotations

import random

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import search as se
from .interp import align_io, equivalent, random_env, run as interp_run, shrink_shapes
from .ir import validate
from .strategies import STRATEGIES, apply as apply_strategy, applicable_strategies
from .syntax import ParseError, parse, unparse

app = FastAPI(title="leir", version="0.1.0")


def _program(leir: str, check: bool = True):
    try:
        program = parse(leir)
    except ParseError as exc:
        raise HTTPException(status_code=422, detail=f"parse error: {exc}")
    if check:
        diags = validate(program)
        if diags:
            raise HTTPException(status_code=422, detail=[
                {"code": d.code, "path": d.path, "message": d.message}
                for d in diags])
    return program


class ProgramRequest(BaseModel):
    leir: str


class FormatResponse(BaseModel):
    leir: str


class DiagnosticModel(BaseModel):
    code: str
    path: str
    message: str


class CheckResponse(BaseModel):
    ok: bool
    diagnostics: list[DiagnosticModel]


class RunRequest(BaseModel):
    leir: str
    seed: int = 0
    shrink: bool = True


class RunResponse(BaseModel):
    outputs: dict[str, list]
    shapes: dict[str, list[int]]


class ApplyRequest(BaseModel):
    leir: str
    strategy: str
    seed: int = 0


class ApplyResponse(BaseModel):
    leir: str
    strategy: str
    note: str


class FeasibleResponse(BaseModel):
    strategies: list[str]


class VerifyRequest(BaseModel):
    original: str
    transformed: str
    trials: int = Field(default=3, ge=1, le=16)
    seed: int = 0
    shrink: bool = True


class VerifyResponse(BaseModel):
    equivalent: bool
    trials: int
    rtol: float
    atol: float
    reason: str


class SearchRequest(BaseModel):
    leir: str
    algorithm: str = "greedy"
    iterations: int = Field(default=20, ge=1, le=200)
    seed: int = 0
    verify: bool = True


class SearchResponse(BaseModel):
    algorithm: str
    best_leir: str
    best_speedup: float
    best_strategies: list[str]
    samples: int
    iterations: int


@app.get("/health")
def health() -> dict:
    return {"ok": True, "strategies": len(STRATEGIES)}


@app.post("/format", response_model=FormatResponse)
def format_program(req: ProgramRequest) -> FormatResponse:
    return FormatResponse(leir=unparse(_program(req.leir, check=False)))


@app.post("/check", response_model=CheckResponse)
def check_program(req: ProgramRequest) -> CheckResponse:
    program = _program(req.leir, check=False)
    diags = [DiagnosticModel(code=d.code, path=d.path, message=d.message)
             for d in validate(program)]
    return CheckResponse(ok=not diags, diagnostics=diags)


@app.post("/run", response_model=RunResponse)
def run_program(req: RunRequest) -> RunResponse:
    program = _program(req.leir)
    if req.shrink:
        program = shrink_shapes(program)
    env = interp_run(program, random_env(program, req.seed))
    outs = {n: env.tensors[n] for n in program.outputs()}
    return RunResponse(
        outputs={n: a.tolist() for n, a in outs.items()},
        shapes={n: list(a.shape) for n, a in outs.items()})


@app.post("/feasible", response_model=FeasibleResponse)
def feasible_strategies(req: ProgramRequest) -> FeasibleResponse:
    return FeasibleResponse(
        strategies=applicable_strategies(_program(req.leir)))


@app.post("/apply", response_model=ApplyResponse)
def apply_one(req: ApplyRequest) -> ApplyResponse:
    if req.strategy not in STRATEGIES:
        raise HTTPException(status_code=422,
                            detail=f"unknown strategy {req.strategy!r}")
    res = apply_strategy(_program(req.leir), req.strategy,
                         random.Random(req.seed))
    if res is None:
        raise HTTPException(status_code=409,
                            detail=f"strategy {req.strategy!r} not applicable")
    return ApplyResponse(leir=unparse(res.program), strategy=res.strategy,
                         note=res.note)


@app.post("/verify", response_model=VerifyResponse)
def verify_pair(req: VerifyRequest) -> VerifyResponse:
    a = _program(req.original)
    b = _program(req.transformed)
    if req.shrink:
        a, b = shrink_shapes(a), shrink_shapes(b)
    try:
        report = equivalent(a, align_io(b, a), trials=req.trials, seed=req.seed)
    except Exception as exc:
        raise HTTPException(status_code=409, detail=str(exc))
    return VerifyResponse(
        equivalent=report.equivalent, trials=len(report.trials),
        rtol=report.tolerance_used[0], atol=report.tolerance_used[1],
        reason=report.reason)


@app.post("/search", response_model=SearchResponse)
def search_program(req: SearchRequest) -> SearchResponse:
    if req.algorithm not in se.ALGORITHMS:
        raise HTTPException(status_code=422,
                            detail=f"unknown algorithm {req.algorithm!r}")
    budget = se.SearchBudget(max_iterations=req.iterations)
    result = se.run_search(_program(req.leir), req.algorithm, budget=budget,
                           seed=req.seed, verify=req.verify)
    return SearchResponse(
        algorithm=result.algorithm, best_leir=result.best_leir,
        best_speedup=result.best_speedup,
        best_strategies=list(result.best_strategies),
        samples=result.samples, iterations=result.iterations)
