"""Strategy registry: metadata, preconditions, and difficulty scoring."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Level(Enum):
    GRAPH = "graph"
    LOOP = "loop"
    MEMORY = "memory"
    MATH = "math"


class Precondition(Enum):
    PATTERN_MATCH = "PatternMatch"
    DEPENDENCY = "Dependency"
    OPERATION_IDENTITY = "OperationIdentity"
    LOOP_NEST_CONSISTENCY = "LoopNestConsistency"
    EQUATION_COUNT = "EquationCount"
    LOOP_AXIS_COUNT = "LoopAxisCount"
    LOOP_RANGE_FACTORIZATION = "LoopRangeFactorization"
    REDUCTION_AXIS = "ReductionAxis"
    INTERMEDIATE_VARIABLE = "IntermediateVariable"


_P = Precondition


@dataclass(frozen=True)
class StrategyInfo:
    name: str
    level: Level
    preconditions: tuple[Precondition, ...]
    param_sites: int          # distinct decisions fixed when instantiating
    structural_novelty: int   # how far the result departs from the input shape
    description: str
    inverse: str | None = None
    orientation: str | None = None  # "simplify" | "expand" for algebraic moves

    @property
    def difficulty_score(self) -> float:
        return 0.1 * len(self.preconditions) + 0.5 * (self.param_sites - 1) + self.structural_novelty

    @property
    def difficulty(self) -> str:
        s = self.difficulty_score
        if s < 1.0:
            return "Easy"
        if s < 2.5:
            return "Medium"
        return "Difficult"


def _s(name, level, pre, p, s, desc, inverse=None, orientation=None):
    return StrategyInfo(name, level, tuple(pre), p, s, desc, inverse, orientation)


_TABLE = [
    # graph level
    _s("operator fusion", Level.GRAPH, [_P.DEPENDENCY, _P.LOOP_NEST_CONSISTENCY], 3, 0,
       "merge two adjacent loop nests with identical headers and independent "
       "bodies into a single nest", inverse="operator fission"),
    _s("operator fission", Level.GRAPH, [_P.DEPENDENCY, _P.EQUATION_COUNT], 2, 0,
       "split one loop nest holding several equations into consecutive nests "
       "with duplicated headers", inverse="operator fusion",
       orientation="simplify"),
    _s("compute inline", Level.GRAPH, [_P.DEPENDENCY, _P.INTERMEDIATE_VARIABLE], 3, 0,
       "substitute the defining expression of a single-use intermediate tensor "
       "into its consumer and drop the producer nest"),
    _s("expression splitting", Level.GRAPH, [], 2, 1,
       "materialize a subexpression into a fresh intermediate tensor computed "
       "by its own nest, then read it back in the original equation"),
    _s("tensor concat to fuse operators", Level.GRAPH,
       [_P.OPERATION_IDENTITY, _P.LOOP_NEST_CONSISTENCY], 3, 2,
       "pack the inputs of two same-shaped computations into one concatenated "
       "tensor, run the computation once over the packed tensor, and split "
       "the result back"),
    _s("tensor split to decouple operators", Level.GRAPH, [], 3, 2,
       "slice the input of an elementwise computation along its leading axis "
       "into two halves, compute each half separately, and write both back",
       ),
    _s("common subexpression elimination", Level.GRAPH,
       [_P.PATTERN_MATCH, _P.LOOP_NEST_CONSISTENCY], 3, 2,
       "hoist a repeated subexpression into a fresh tensor computed once and "
       "replace every occurrence with a read of it"),
    _s("expression reorder", Level.GRAPH, [_P.DEPENDENCY], 3, 0,
       "swap two adjacent loop nests that touch disjoint tensors"),
    # loop level
    _s("loop reorder", Level.LOOP, [_P.LOOP_AXIS_COUNT], 3, 0,
       "permute the loop headers of a nest without touching its body"),
    _s("loop tiling", Level.LOOP, [_P.LOOP_AXIS_COUNT, _P.LOOP_RANGE_FACTORIZATION], 5, 1,
       "tile two loops into outer/inner pairs, rewriting every use of the old "
       "indices as outer*tile+inner"),
    _s("loop split", Level.LOOP, [_P.LOOP_RANGE_FACTORIZATION], 4, 1,
       "split one loop into an outer and an inner loop whose product covers "
       "the original range", inverse="loop fusion"),
    _s("loop fusion", Level.LOOP, [_P.LOOP_AXIS_COUNT, _P.PATTERN_MATCH], 4, 1,
       "collapse an outer/inner loop pair used only as outer*extent+inner "
       "back into a single loop", inverse="loop split"),
    _s("loop unrolling", Level.LOOP, [], 3, 0,
       "mark a serial loop for unrolling"),
    _s("loop parallelization", Level.LOOP, [_P.REDUCTION_AXIS], 3, 0,
       "mark a serial non-reduction loop as parallel"),
    _s("loop vectorization", Level.LOOP, [_P.REDUCTION_AXIS], 3, 0,
       "mark a serial non-reduction loop as vectorized"),
    _s("loop binding", Level.LOOP, [_P.REDUCTION_AXIS], 4, 0,
       "bind a non-reduction loop to a GPU block or thread axis, renaming its "
       "index with the hardware prefix"),
    _s("reduction factorization", Level.LOOP, [_P.REDUCTION_AXIS], 4, 2,
       "split a reduction axis into two partial reductions stored in fresh "
       "tensors and combine the partials afterwards"),
    # memory level
    _s("cache read write", Level.MEMORY, [], 2, 2,
       "stage a read or a write through a fresh buffer in faster memory"),
    _s("layout transformation", Level.MEMORY, [], 2, 2,
       "transpose an input tensor into a fresh buffer and redirect every read "
       "to the transposed layout"),
    _s("set storage scope", Level.MEMORY, [_P.INTERMEDIATE_VARIABLE], 6, 0,
       "move an intermediate tensor to a different memory scope"),
    _s("set storage layout", Level.MEMORY, [_P.INTERMEDIATE_VARIABLE], 4, 1,
       "flatten a two-dimensional intermediate tensor into one dimension with "
       "an explicit linearized index"),
    _s("precompute indices", Level.MEMORY, [_P.PATTERN_MATCH], 2, 2,
       "tabulate a compound index expression into an integer tensor computed "
       "up front"),
    # math level: inverse algebraic pairs
    _s("factorization", Level.MATH, [_P.PATTERN_MATCH], 2, 0,
       "rewrite (x + c) / k as x / k + c / k with constants folded",
       inverse="expand factorization", orientation="simplify"),
    _s("expand factorization", Level.MATH, [_P.PATTERN_MATCH], 2, 0,
       "expand a squared sum or difference into its trinomial form",
       inverse="factorization", orientation="expand"),
    _s("cancellation", Level.MATH, [_P.PATTERN_MATCH], 2, 0,
       "put a sum involving a quotient over the common denominator, "
       "distributing products in the numerator",
       inverse="expand cancellation", orientation="simplify"),
    _s("expand cancellation", Level.MATH, [_P.PATTERN_MATCH], 2, 0,
       "cancel a shared factor between numerator terms and the denominator "
       "of a quotient", inverse="cancellation", orientation="expand"),
    _s("apart", Level.MATH, [_P.PATTERN_MATCH], 2, 0,
       "split a quotient of a sum into a sum of quotients, reducing x/x to 1",
       inverse="together", orientation="expand"),
    _s("together", Level.MATH, [_P.PATTERN_MATCH], 2, 0,
       "combine a sum containing a quotient over the common denominator "
       "without distributing", inverse="apart", orientation="simplify"),
    _s("powsimp", Level.MATH, [_P.PATTERN_MATCH], 2, 0,
       "rewrite x * (1 / y) as x / y", inverse="expand powsimp",
       orientation="simplify"),
    _s("expand powsimp", Level.MATH, [_P.PATTERN_MATCH], 2, 0,
       "rewrite x / y as x * (1 / y)", inverse="powsimp", orientation="expand"),
    _s("logsimp", Level.MATH, [_P.PATTERN_MATCH], 2, 0,
       "rewrite log(x * y) as log(x) + log(y)", inverse="expand log",
       orientation="simplify"),
    _s("expand log", Level.MATH, [_P.PATTERN_MATCH], 2, 0,
       "rewrite log(x) + log(y) as log(x * y)", inverse="logsimp",
       orientation="expand"),
    _s("collect", Level.MATH, [_P.PATTERN_MATCH], 2, 0,
       "distribute a constant factor over a sum", inverse="expand collect",
       orientation="simplify"),
    _s("expand collect", Level.MATH, [_P.PATTERN_MATCH], 2, 0,
       "rewrite a constant multiple c * x as x / (1 / c)",
       inverse="collect", orientation="expand"),
    # math level: structural rewrites
    _s("partially equivalent then correct", Level.MATH, [], 3, 3,
       "fuse two near-identical reductions through a concatenated tensor, "
       "computing one row short, then patch the missing row with an explicit "
       "correction nest"),
    _s("exponential split", Level.MATH, [_P.PATTERN_MATCH], 2, 1,
       "split exp(x) into exp(x - y) * exp(y) with y taken from the previous "
       "iteration and guarded at the boundary"),
    _s("multiplicative split", Level.MATH, [], 2, 1,
       "replace a value v with (v / v) * v"),
    _s("additive split", Level.MATH, [], 2, 1,
       "replace an expression e with (e + v) - v for some value v read in e"),
    _s("normal loop max to prefix max", Level.MATH, [_P.PATTERN_MATCH], 3, 2,
       "turn a max reduction feeding a sum of exponentials into running "
       "prefix scans with a final writeback"),
    _s("normal loop summation on exp to prefix summation on exp", Level.MATH,
       [_P.REDUCTION_AXIS], 3, 2,
       "turn a loop reduction into a prefix scan over the reduction axis plus "
       "a writeback of the last scan element"),
    _s("online softmax", Level.MATH, [_P.PATTERN_MATCH], 4, 3,
       "replace the three-pass softmax (max, sum of exponentials, normalize) "
       "with a single-pass pair of running scans and one normalization pass"),
    _s("flashattention wo tiling", Level.MATH, [_P.PATTERN_MATCH], 5, 3,
       "fold a softmax followed by a matrix multiply into one scan that "
       "rescales a running output accumulator each step"),
    _s("normal matmul to prefix matmul based on online softmax", Level.MATH,
       [_P.PATTERN_MATCH], 5, 3,
       "push a matrix multiply consuming a scanned softmax into the scan "
       "itself via a rescaled running accumulator"),
]

STRATEGIES: dict[str, StrategyInfo] = {s.name: s for s in _TABLE}
STRATEGY_NAMES: tuple[str, ...] = tuple(s.name for s in _TABLE)

assert len(STRATEGIES) == 43

_LEVEL_COUNTS = {Level.GRAPH: 8, Level.LOOP: 9, Level.MEMORY: 5, Level.MATH: 21}
for _lvl, _n in _LEVEL_COUNTS.items():
    assert sum(1 for s in _TABLE if s.level is _lvl) == _n


def difficulty_score(name: str) -> float:
    return STRATEGIES[name].difficulty_score


def difficulty_bucket(name: str) -> str:
    return STRATEGIES[name].difficulty


def inverse_of(name: str) -> str | None:
    return STRATEGIES[name].inverse


def undo_conflicts(name: str) -> set[str]:
    """Strategies that must not immediately follow the given one."""
    out = set()
    inv = STRATEGIES[name].inverse
    if inv:
        out.add(inv)
    if name == "loop tiling":
        out.add("loop fusion")
    if name == "loop fusion":
        out.add("loop tiling")
    return out
