from __future__ import annotations

import json
import sys

import pytest

from leir.search import (
    ALGORITHMS, BuiltinProposer, ExternalProposer, SearchBudget,
    analytic_cost, efficiency, render_search_prompt, run_search, summarize,
)
from leir.strategies import STRATEGIES
from leir.syntax import parse, unparse

MM = ("L^{8}_{i=0}L^{8}_{j=0}L^{8}_{k=0}"
      "[C^{f32,g}_{i,j}=C^{f32,g}_{i,j}+A^{f32,g}_{i,k}*D^{f32,g}_{k,j};];")


def test_analytic_cost_rewards_parallel_loops():
    serial = parse(MM)
    vectorized = parse(MM.replace("L^{8}_{j=0}", "V^{8}_{j=0}"))
    bound = parse(MM.replace("L^{8}_{i=0}", "B^{8}_{tx=0}")
                  .replace("_{i,j}", "_{tx,j}").replace("_{i,k}", "_{tx,k}"))
    assert analytic_cost(vectorized) < analytic_cost(serial)
    assert analytic_cost(bound) < analytic_cost(serial)


def test_builtin_proposer_respects_ban_list():
    proposer = BuiltinProposer(seed=0)
    banned = set(STRATEGIES) - {"loop vectorization"}
    cands = proposer.propose(parse(MM), k=3, banned=banned)
    assert cands and all(c.strategies == ("loop vectorization",)
                         for c in cands)


def test_every_algorithm_runs_and_is_bounded():
    program = parse(MM)
    for alg in ALGORITHMS:
        result = run_search(program, alg, seed=1)
        assert result.algorithm == alg
        assert result.best_speedup >= 1.0
        assert result.samples >= 0
        parse(result.best_leir)


def test_unknown_algorithm_rejected():
    with pytest.raises(ValueError):
        run_search(parse(MM), "annealing")


def test_depth_budget_limits_chain_length():
    budget = SearchBudget(max_iterations=30, max_depth=2)
    result = run_search(parse(MM), "chain-parent", budget=budget, seed=0)
    assert len(result.best_strategies) <= 2


def test_efficiency_and_summary():
    assert efficiency(10.0, 5.0) == 2.0
    r1 = run_search(parse(MM), "greedy", seed=0)
    m = summarize([r1])
    assert m.programs == 1
    assert m.avg_speedup == r1.best_speedup
    assert m.efficiency == pytest.approx(r1.best_speedup / max(r1.samples, 1),
                                         rel=1e-9) or r1.samples == 0


def test_render_search_prompt_contents():
    prompt = render_search_prompt(parse(MM), "greedy", [(0, 1.0)], k=2)
    assert "depth:0, speedup value: 1" in prompt
    assert unparse(parse(MM)) in prompt
    assert "CRITICAL" in prompt
    for name in STRATEGIES:
        assert name in prompt


EXTERNAL_PROPOSER = r'''
import json, sys
for line in sys.stdin:
    req = json.loads(line)
    ir = ("V^{8}_{i=0}L^{8}_{j=0}L^{8}_{k=0}"
          "[C^{f32,g}_{i,j}=C^{f32,g}_{i,j}+A^{f32,g}_{i,k}*D^{f32,g}_{k,j};];")
    print(json.dumps({"answers": [{"idx": 0, "transformed_IR": ir,
                                   "applied_strategies": ["loop vectorization"]}]}))
    sys.stdout.flush()
'''


def test_external_proposer_protocol(tmp_path):
    script = tmp_path / "proposer.py"
    script.write_text(EXTERNAL_PROPOSER)
    proposer = ExternalProposer([sys.executable, str(script)])
    try:
        result = run_search(parse(MM), "greedy", proposer=proposer, seed=0)
        assert result.best_speedup > 1.0
        assert result.best_strategies[:1] == ("loop vectorization",)
    finally:
        proposer.close()
