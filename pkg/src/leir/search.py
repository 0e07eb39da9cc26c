"""Optimization search over transformation strategies.

Seven search drivers explore the space of strategy applications starting
from a root program.  Candidates are proposed either by the builtin engine
(random feasible strategies) or by an external proposer process speaking a
line-oriented JSON protocol; every accepted candidate is re-verified against
the root program on randomized inputs.  Costs come from an analytic model by
default, or from an external timing backend when one is attached.
"""

from __future__ import annotations

import json
import math
import random
import subprocess
from dataclasses import dataclass, field

from .ir import (
    BIND_CAPS, LoopKind, Program, bind_prefix_of, MemScope, reads_of,
    iter_equations_with_scope, validate, walk_scalar,
)
from .interp import equivalent, shrink_shapes
from .strategies import STRATEGIES, apply, undo_conflicts
from .syntax import parse, unparse

ALGORITHMS = ("greedy", "bfs", "dfs", "beam", "mcts",
              "chain-parent", "chain-no-parent")


@dataclass(frozen=True)
class SearchBudget:
    max_iterations: int = 20
    children_per_node: int = 2
    beam_width: int = 2
    beam_children: int = 3
    max_depth: int = 20


# -- analytic cost model --------------------------------------------------------


_SCOPE_WEIGHT = {MemScope.GLOBAL: 4.0, MemScope.SHARED: 2.0, MemScope.LOCAL: 1.0}


def _effective_trips(scope) -> float:
    trips = 1.0
    for h in scope:
        trips *= max(h.extent, 1)
        if h.kind is LoopKind.BINDING:
            cap = BIND_CAPS.get(bind_prefix_of(h.index), 1)
            trips /= min(h.extent, cap) or 1
        elif h.kind is LoopKind.PARALLEL:
            trips /= min(h.extent, 16) or 1
        elif h.kind is LoopKind.VECTORIZED:
            trips /= min(h.extent, 4) or 1
    return max(trips, 1.0)


def analytic_cost(program: Program) -> float:
    """Estimated execution cost: per-equation work times effective trip count."""
    total = 0.0
    for _, _, eq, scope in iter_equations_with_scope(program):
        ops = sum(1 for _ in walk_scalar(eq.rhs))
        mem = _SCOPE_WEIGHT[eq.lhs.scope]
        mem += sum(_SCOPE_WEIGHT[r.scope] for r in reads_of(eq.rhs))
        total += (ops + mem) * _effective_trips(scope)
    return total


# -- metrics -------------------------------------------------------------------


def efficiency(avg_speedup: float, avg_samples: float) -> float:
    """Speedup earned per evaluated sample."""
    if avg_samples <= 0:
        raise ValueError("avg_samples must be positive")
    return avg_speedup / avg_samples


@dataclass(frozen=True)
class SearchMetrics:
    programs: int
    avg_speedup: float
    avg_samples: float

    @property
    def efficiency(self) -> float:
        return efficiency(self.avg_speedup, self.avg_samples)


def summarize(results: list["SearchResult"]) -> SearchMetrics:
    n = len(results)
    if n == 0:
        raise ValueError("no results")
    return SearchMetrics(
        programs=n,
        avg_speedup=sum(r.best_speedup for r in results) / n,
        avg_samples=sum(r.samples for r in results) / n,
    )


# -- proposers -----------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    program: Program
    strategies: tuple[str, ...]
    note: str = ""


class BuiltinProposer:
    """Proposes children by applying random feasible strategies."""

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)

    def propose(self, program: Program, k: int,
                banned: set[str] = frozenset()) -> list[Candidate]:
        names = [n for n in STRATEGIES if n not in banned]
        self.rng.shuffle(names)
        out: list[Candidate] = []
        for name in names:
            res = apply(program, name, random.Random(self.rng.randrange(1 << 30)))
            if res is None:
                continue
            out.append(Candidate(res.program, (name,), res.note))
            if len(out) == k:
                break
        return out


class ExternalProposer:
    """Child process speaking one JSON object per line.

    Request:  {"prompt": str, "k": int}
    Response: {"answers": [{"idx": int, "transformed_IR": str,
                            "applied_strategies": [str, ...]}, ...]}
    """

    def __init__(self, cmd: list[str], algorithm: str = "greedy"):
        self.proc = subprocess.Popen(
            cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)
        self.algorithm = algorithm
        self.history: list[tuple[int, float]] = [(0, 1.0)]

    def propose(self, program: Program, k: int,
                banned: set[str] = frozenset()) -> list[Candidate]:
        prompt = render_search_prompt(program, self.algorithm, self.history, k)
        self.proc.stdin.write(json.dumps({"prompt": prompt, "k": k}) + "\n")
        self.proc.stdin.flush()
        line = self.proc.stdout.readline()
        if not line:
            return []
        reply = json.loads(line)
        out: list[Candidate] = []
        for ans in reply.get("answers", []):
            try:
                prog = parse(ans["transformed_IR"])
            except Exception:
                continue
            if validate(prog):
                continue
            names = tuple(ans.get("applied_strategies", ()))
            if any(n not in STRATEGIES for n in names):
                continue
            if banned and names[:1] and names[0] in banned:
                continue
            out.append(Candidate(prog, names))
        return out

    def close(self):
        if self.proc.stdin:
            self.proc.stdin.close()
        self.proc.wait(timeout=10)


def render_search_prompt(program: Program, algorithm: str,
                         history: list[tuple[int, float]], k: int) -> str:
    """Prompt for an external proposer model."""
    meta = ", ".join(
        f"{n}:{d.dtype.token}{list(d.shape)}:{d.role.value}"
        for n, d in sorted(program.io.items()))
    hist = "\n".join(f"depth:{d}, speedup value: {s:g}" for d, s in history)
    names = "\n".join(f"- {n}" for n in STRATEGIES)
    return (
        f"You are exploring program optimizations with a {algorithm} search.\n"
        f"Current program (loop-equation IR):\n{unparse(program)}\n"
        f"Known variables: {meta}\n"
        f"Search history:\n{hist}\n"
        f"Hardware: a single CUDA GPU; binding loops map to blockIdx/threadIdx "
        f"axes bx, by, bz, tx, ty, tz with caps "
        f"(2147483647, 65535, 65535) and (1024, 1024, 64).\n"
        f"Memory scopes: g is global, s is shared, l is local; favor moving "
        f"reused intermediates to faster scopes when legal.\n"
        f"Available strategies:\n{names}\n"
        f"Task: propose up to {k} transformed programs that are semantically "
        f"equivalent to the current program and likely faster.\n"
        f"Reply with a single JSON object on one line: "
        f'{{"answers": [{{"idx": 0, "transformed_IR": "...", '
        f'"applied_strategies": ["..."]}}]}}.\n'
        f"CRITICAL: every transformed_IR must parse and preserve the program's "
        f"inputs and outputs exactly.\n"
        f"CRITICAL: do not apply a strategy that immediately undoes the "
        f"previous one."
    )


# -- search drivers --------------------------------------------------------------


@dataclass
class SearchNode:
    program: Program
    depth: int
    speedup: float
    strategies: tuple[str, ...] = ()
    parent: "SearchNode | None" = None
    visits: int = 0
    reward: float = 0.0
    children: list = field(default_factory=list)


@dataclass(frozen=True)
class SearchResult:
    algorithm: str
    best_leir: str
    best_speedup: float
    best_strategies: tuple[str, ...]
    samples: int
    iterations: int
    history: tuple[tuple[int, float], ...]


class _Session:
    def __init__(self, root: Program, proposer, seed: int, verify: bool,
                 cost_fn=None, verify_trials: int = 2):
        self.root = root
        self.proposer = proposer or BuiltinProposer(seed)
        self.verify = verify
        self.cost_fn = cost_fn or analytic_cost
        self.verify_trials = verify_trials
        self.seed = seed
        self.root_cost = self.cost_fn(root)
        self.samples = 0

    def children(self, node: SearchNode, k: int) -> list[SearchNode]:
        banned = undo_conflicts(node.strategies[-1]) if node.strategies else set()
        out = []
        for cand in self.proposer.propose(node.program, k, banned):
            self.samples += 1
            if self.verify and not self._sound(cand.program):
                continue
            sp = self.root_cost / max(self.cost_fn(cand.program), 1e-9)
            out.append(SearchNode(cand.program, node.depth + 1, sp,
                                  node.strategies + cand.strategies, node))
        return out

    def _sound(self, candidate: Program) -> bool:
        try:
            return equivalent(self.root, candidate, trials=self.verify_trials,
                              seed=self.seed).equivalent
        except Exception:
            return False


def _finish(algorithm: str, best: SearchNode, session: _Session,
            iters: int, history) -> SearchResult:
    return SearchResult(
        algorithm=algorithm,
        best_leir=unparse(best.program),
        best_speedup=best.speedup,
        best_strategies=best.strategies,
        samples=session.samples,
        iterations=iters,
        history=tuple(history),
    )


def _greedy(session: _Session, budget: SearchBudget):
    node = SearchNode(session.root, 0, 1.0)
    best = node
    history = [(0, 1.0)]
    for it in range(budget.max_iterations):
        if node.depth >= budget.max_depth:
            break
        kids = session.children(node, budget.children_per_node)
        if not kids:
            break
        cand = max(kids, key=lambda n: n.speedup)
        if cand.speedup < node.speedup:
            break
        node = cand
        history.append((node.depth, node.speedup))
        if node.speedup > best.speedup:
            best = node
    return best, history


def _bfs(session: _Session, budget: SearchBudget):
    root = SearchNode(session.root, 0, 1.0)
    queue = [root]
    best = root
    history = [(0, 1.0)]
    expanded = 0
    while queue and expanded < budget.max_iterations:
        node = queue.pop(0)
        if node.depth >= budget.max_depth:
            continue
        expanded += 1
        for kid in session.children(node, budget.children_per_node):
            history.append((kid.depth, kid.speedup))
            if kid.speedup > best.speedup:
                best = kid
            queue.append(kid)
    return best, history, expanded


def _dfs(session: _Session, budget: SearchBudget):
    root = SearchNode(session.root, 0, 1.0)
    stack = [root]
    best = root
    history = [(0, 1.0)]
    expanded = 0
    while stack and expanded < budget.max_iterations:
        node = stack.pop()
        if node.depth >= budget.max_depth:
            continue
        expanded += 1
        for kid in session.children(node, budget.children_per_node):
            history.append((kid.depth, kid.speedup))
            if kid.speedup > best.speedup:
                best = kid
            stack.append(kid)
    return best, history, expanded


def _beam(session: _Session, budget: SearchBudget):
    root = SearchNode(session.root, 0, 1.0)
    frontier = [root]
    best = root
    history = [(0, 1.0)]
    for it in range(budget.max_iterations):
        level = []
        for node in frontier:
            if node.depth >= budget.max_depth:
                continue
            level.extend(session.children(node, budget.beam_children))
        if not level:
            break
        level.sort(key=lambda n: n.speedup, reverse=True)
        frontier = level[:budget.beam_width]
        for n in frontier:
            history.append((n.depth, n.speedup))
            if n.speedup > best.speedup:
                best = n
    return best, history


def _mcts(session: _Session, budget: SearchBudget):
    c = math.sqrt(2.0)
    root = SearchNode(session.root, 0, 1.0)
    best = root
    history = [(0, 1.0)]

    def uct(parent, child):
        if child.visits == 0:
            return float("inf")
        return (child.reward / child.visits
                + c * math.sqrt(math.log(parent.visits + 1) / child.visits))

    for it in range(budget.max_iterations):
        node = root
        while node.children:
            node = max(node.children, key=lambda ch: uct(node, ch))
        if node.depth < budget.max_depth:
            node.children = session.children(node, budget.children_per_node)
        rollout = node
        if node.children:
            rollout = max(node.children, key=lambda ch: ch.speedup)
        reward = rollout.speedup
        history.append((rollout.depth, rollout.speedup))
        if rollout.speedup > best.speedup:
            best = rollout
        walk = rollout
        while walk is not None:
            walk.visits += 1
            walk.reward += reward
            walk = walk.parent
    return best, history


def _chain(session: _Session, budget: SearchBudget, keep_parent: bool):
    root = SearchNode(session.root, 0, 1.0)
    node = root
    best = root
    history = [(0, 1.0)]
    for it in range(budget.max_iterations):
        base = node if keep_parent else root
        if base.depth >= budget.max_depth:
            break
        kids = session.children(base, 1)
        if not kids:
            if keep_parent:
                break
            continue
        node = kids[0]
        history.append((node.depth, node.speedup))
        if node.speedup > best.speedup:
            best = node
    return best, history


def run_search(program: Program, algorithm: str,
               budget: SearchBudget | None = None, proposer=None,
               seed: int = 0, verify: bool = True, cost_fn=None,
               shrink_cap: int = 8) -> SearchResult:
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    budget = budget or SearchBudget()
    root = shrink_shapes(program, shrink_cap) if verify else program
    session = _Session(root, proposer, seed, verify, cost_fn)
    if algorithm == "greedy":
        best, history = _greedy(session, budget)
        iters = len(history) - 1
    elif algorithm == "bfs":
        best, history, iters = _bfs(session, budget)
    elif algorithm == "dfs":
        best, history, iters = _dfs(session, budget)
    elif algorithm == "beam":
        best, history = _beam(session, budget)
        iters = budget.max_iterations
    elif algorithm == "mcts":
        best, history = _mcts(session, budget)
        iters = budget.max_iterations
    else:
        best, history = _chain(session, budget, algorithm == "chain-parent")
        iters = budget.max_iterations
    return _finish(algorithm, best, session, iters, history)


# -- external lowering / timing backend ------------------------------------------


class BridgeClient:
    """Line-protocol client for an external lowering and timing backend.

    Request:  {"cmd": "ping"|"lower"|"time"|"run", "leir": str, "trials": int}
    Response: {"ok": bool, "tir": str, "cuda": str, "mean_ms": float,
               "error": str}
    """

    def __init__(self, cmd: list[str]):
        self.proc = subprocess.Popen(
            cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)

    def _call(self, **payload) -> dict:
        self.proc.stdin.write(json.dumps(payload) + "\n")
        self.proc.stdin.flush()
        line = self.proc.stdout.readline()
        if not line:
            raise RuntimeError("bridge process closed its output")
        return json.loads(line)

    def ping(self) -> bool:
        return bool(self._call(cmd="ping").get("ok"))

    def lower(self, leir: str) -> dict:
        return self._call(cmd="lower", leir=leir)

    def time(self, leir: str, trials: int = 3) -> dict:
        return self._call(cmd="time", leir=leir, trials=trials)

    def run(self, leir: str, inputs: dict) -> dict:
        return self._call(cmd="run", leir=leir, inputs=inputs)

    def cost_fn(self):
        def fn(program: Program) -> float:
            reply = self.time(unparse(program))
            if not reply.get("ok"):
                raise RuntimeError(reply.get("error", "timing failed"))
            return float(reply["mean_ms"])

        return fn

    def close(self):
        if self.proc.stdin:
            self.proc.stdin.close()
        self.proc.wait(timeout=10)
