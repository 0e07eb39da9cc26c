"""Acceptance gate: one test (one pass/fail line under pytest -v) per criterion."""

from __future__ import annotations

import json
import math
import random
import shutil
import subprocess
import time
from pathlib import Path

import numpy as np
import pytest

from leir.corpus import REFERENCE_TEXTS, STRATEGY_EXAMPLE_INPUTS
from leir.dataset import Entry, build_dataset, filter_entries, gen_corpus
from leir.interp import align_io, equivalent, random_env, run, shrink_shapes
from leir.ir import validate
from leir.search import SearchBudget, efficiency, run_search
from leir.strategies import STRATEGIES, apply, undo_conflicts
from leir.syntax import parse, unparse

BRIDGE_DIST = Path(__file__).resolve().parents[1] / "bridge" / "dist" / "main.js"


def test_criterion_1_grammar_corpus_round_trip():
    t0 = time.time()
    assert len(REFERENCE_TEXTS) == 86
    for text in REFERENCE_TEXTS.values():
        program = parse(text)
        assert validate(program) == [], text
        canon = unparse(program)
        assert unparse(parse(canon)) == canon, text
    assert time.time() - t0 < 5.0


def test_criterion_2_strategy_equivalence_suite():
    t0 = time.time()
    failures = []
    for name, text in STRATEGY_EXAMPLE_INPUTS.items():
        small = shrink_shapes(parse(text), cap=8)
        res = apply(small, name, random.Random(0))
        if res is None:
            failures.append(f"{name}: not applicable to its own example")
            continue
        report = equivalent(small, res.program, trials=3, seed=0)
        if not report.equivalent:
            failures.append(f"{name}: {report.reason}")
    assert not failures, failures
    assert len(STRATEGY_EXAMPLE_INPUTS) == 43
    assert time.time() - t0 < 60.0


def test_criterion_3_interpreter_oracle_suite():
    matmul = ("L^{4}_{i=0}L^{5}_{j=0}L^{6}_{k=0}"
              "[C^{f64,g}_{i,j}=C^{f64,g}_{i,j}+A^{f64,g}_{i,k}*D^{f64,g}_{k,j};];")
    softmax = ("L^{4}_{i=0}L^{6}_{k=0}[M^{f64,g}_{i}=max(M^{f64,g}_{i},X^{f64,g}_{i,k});];"
               "L^{4}_{i=0}L^{6}_{k=0}[S^{f64,g}_{i}=S^{f64,g}_{i}"
               "+exp(X^{f64,g}_{i,k}-M^{f64,g}_{i});];"
               "L^{4}_{i=0}L^{6}_{k=0}[O^{f64,g}_{i,k}="
               "exp(X^{f64,g}_{i,k}-M^{f64,g}_{i})/S^{f64,g}_{i};];")
    running_max = ("L^{4}_{i=0}L^{6}_{d=0}[R^{f64,g}_{i,d}="
                   "max(if_then_else(d-1<0,-inf,R^{f64,g}_{i,d-1}),"
                   "X^{f64,g}_{i,d});];")
    mean = ("L^{4}_{i=0}L^{6}_{k=0}[S^{f64,g}_{i}=S^{f64,g}_{i}"
            "+X^{f64,g}_{i,k};];"
            "L^{4}_{i=0}[M^{f64,g}_{i}=S^{f64,g}_{i}/6;];")

    def np_matmul(env):
        return {"C": env["A"] @ env["D"]}

    def np_softmax(env):
        x = env["X"]
        m = x.max(axis=1, keepdims=True)
        e = np.exp(x - m)
        return {"O": e / e.sum(axis=1, keepdims=True)}

    def np_running_max(env):
        return {"R": np.maximum.accumulate(env["X"], axis=1)}

    def np_mean(env):
        return {"M": env["X"].mean(axis=1)}

    cases = [(matmul, np_matmul), (softmax, np_softmax),
             (running_max, np_running_max), (mean, np_mean)]
    for text, oracle in cases:
        program = parse(text)
        assert validate(program) == []
        for trial in range(50):
            env = run(program, random_env(program, seed=trial))
            inputs = {n: env.tensors[n] for n in program.inputs()}
            for name, want in oracle(inputs).items():
                got = env.tensors[name]
                assert np.max(np.abs(got - want)) <= 1e-12, (text, trial, name)


def test_criterion_4_difficulty_calibration():
    expected_easy = {
        "operator fission", "factorization", "expand factorization",
        "cancellation", "expand cancellation", "apart", "together",
        "powsimp", "expand powsimp", "logsimp", "expand log",
        "collect", "expand collect",
    }
    expected_medium = {
        "operator fusion", "compute inline", "expression splitting",
        "expression reorder", "loop reorder", "loop unrolling",
        "loop parallelization", "loop vectorization", "loop binding",
        "multiplicative split", "additive split", "exponential split",
    }
    expected_difficult = set(STRATEGIES) - expected_easy - expected_medium
    assert len(expected_difficult) == 18
    for name, info in STRATEGIES.items():
        k = len(info.preconditions)
        score = 0.1 * k + 0.5 * (info.param_sites - 1) + info.structural_novelty
        assert math.isclose(score, info.difficulty_score)
        want = ("Easy" if name in expected_easy else
                "Medium" if name in expected_medium else "Difficult")
        assert info.difficulty == want, (name, score, info.difficulty)


def _synthetic_pool() -> list[Entry]:
    simplify = ["factorization", "cancellation", "together", "powsimp",
                "logsimp", "collect", "operator fission"]
    expand = ["expand factorization", "expand cancellation", "apart",
              "expand powsimp", "expand log", "expand collect"]

    def mk(i, strategy, difficulty):
        return Entry(id=f"syn-{i:05d}", program_name="syn",
                     original_leir="", transformed_leir="",
                     strategy=strategy, cot="", difficulty=difficulty,
                     verified=True)

    pool, i = [], 0
    for _ in range(5000):
        pool.append(mk(i, simplify[i % len(simplify)], "Easy")); i += 1
    for _ in range(5000):
        pool.append(mk(i, expand[i % len(expand)], "Easy")); i += 1
    for _ in range(2000):
        pool.append(mk(i, "factorization; together", "Easy")); i += 1
    for lead in ("loop reorder", "loop unrolling", "loop binding"):
        for _ in range(4000):
            pool.append(mk(i, f"{lead}; loop vectorization", "Medium")); i += 1
    for _ in range(3000):
        pool.append(mk(i, "compute inline", "Medium")); i += 1
    for _ in range(3000):
        pool.append(mk(i, "loop tiling", "Difficult")); i += 1
    assert len(pool) == 30000
    return pool


def test_criterion_5_filter_policy():
    pool = _synthetic_pool()
    for seed in range(10):
        kept = filter_entries(pool, seed=seed)
        easy_multi = [e for e in kept
                      if e.difficulty == "Easy" and len(e.steps) > 1]
        assert easy_multi == []
        medium_leads = {}
        for e in kept:
            if e.difficulty == "Medium" and len(e.steps) > 1:
                medium_leads[e.steps[0]] = medium_leads.get(e.steps[0], 0) + 1
        assert medium_leads and all(c <= 2000 for c in medium_leads.values())
        assert sum(1 for e in kept if e.difficulty == "Difficult") == 3000
        simp = sum(1 for e in kept if e.difficulty == "Easy"
                   and len(e.steps) == 1 and not e.strategy.startswith("expand")
                   and e.strategy != "apart")
        expd = sum(1 for e in kept if e.difficulty == "Easy"
                   and len(e.steps) == 1 and (e.strategy.startswith("expand")
                                              or e.strategy == "apart"))
        assert abs(simp / 5000 - 0.20) <= 0.02, (seed, simp)
        assert abs(expd / 5000 - 0.04) <= 0.01, (seed, expd)


def test_criterion_6_metrics_arithmetic():
    assert round(efficiency(20.79, 35.91), 2) == 0.58
    assert round(efficiency(24.96, 17.41), 2) == 1.43
    assert efficiency(10.0, 4.0) == 2.5
    with pytest.raises(ValueError):
        efficiency(1.0, 0.0)


def test_criterion_7_search_soundness_and_budget():
    t0 = time.time()
    budget = SearchBudget()
    assert (budget.max_iterations, budget.children_per_node,
            budget.beam_width, budget.beam_children,
            budget.max_depth) == (20, 2, 2, 3, 20)
    corpus = gen_corpus(seed=5, count=20)
    algorithms = ("greedy", "bfs", "beam", "mcts", "chain-parent")
    for k, (name, text) in enumerate(corpus):
        program = parse(text)
        alg = algorithms[k % len(algorithms)]
        result = run_search(program, alg, budget=budget, seed=k)
        assert result.iterations <= budget.max_iterations
        assert len(result.best_strategies) <= budget.max_depth
        for a, b in zip(result.best_strategies, result.best_strategies[1:]):
            assert b not in undo_conflicts(a), (name, alg, a, b)
        root = shrink_shapes(program)
        best = align_io(parse(result.best_leir), root)
        report = equivalent(root, best, trials=2, seed=k)
        assert report.equivalent, (name, alg, report.reason)
        if alg == "greedy":
            assert result.best_speedup >= 1.0
    greedy = run_search(parse(corpus[0][1]), "greedy", budget=budget, seed=0)
    assert greedy.best_speedup >= 1.0
    assert time.time() - t0 < 600.0


def test_criterion_8_dataset_reproducibility(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    build_dataset(a, seed=9, program_count=6, multi_per_program=1)
    build_dataset(b, seed=9, program_count=6, multi_per_program=1)
    for fname in ("entries.jsonl", "chat.jsonl", "strategy_id.jsonl"):
        assert (a / fname).read_bytes() == (b / fname).read_bytes(), fname
    for line in (a / "chat.jsonl").read_text().splitlines():
        rec = json.loads(line)
        user = rec["messages"][0]["content"]
        leir = user.split("Program:\n", 1)[1]
        parse(leir)
        answer = rec["messages"][1]["content"]
        parse(answer.split("Transformed program:\n", 1)[1])


@pytest.mark.skipif(shutil.which("node") is None or not BRIDGE_DIST.exists(),
                    reason="node or bridge build not available")
def test_criterion_9_bridge_cross_oracle():
    proc = subprocess.Popen(["node", str(BRIDGE_DIST)],
                            stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                            text=True)

    def call(**payload):
        proc.stdin.write(json.dumps(payload) + "\n")
        proc.stdin.flush()
        return json.loads(proc.stdout.readline())

    try:
        assert call(cmd="ping")["ok"]
        corpus = gen_corpus(seed=2, count=20)
        checked = 0
        for name, text in corpus:
            program = shrink_shapes(parse(text))
            leir = unparse(program)
            lowered = call(cmd="lower", leir=leir)
            assert lowered["ok"], (name, lowered.get("error"))
            assert len(leir.encode()) < len(lowered["tir"].encode()), name
            env = run(program, random_env(program, seed=3))
            inputs = {n: env.tensors[n].ravel().tolist()
                      for n in program.inputs()}
            reply = call(cmd="run", leir=leir, inputs=inputs)
            assert reply["ok"], (name, reply.get("error"))
            rtol, atol = (1e-5, 1e-8)
            for out in program.outputs():
                want = env.tensors[out].ravel()
                got = np.asarray(reply["outputs"][out], dtype=np.float64)
                assert np.allclose(got, want, rtol=rtol, atol=atol,
                                   equal_nan=True), (name, out)
            checked += 1
        assert checked == 20
    finally:
        proc.stdin.close()
        proc.wait(timeout=10)
