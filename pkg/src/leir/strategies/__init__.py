"""Program transformation strategies: registry, feasibility, and application."""

from __future__ import annotations

from .registry import (
    Level, Precondition, StrategyInfo, STRATEGIES, STRATEGY_NAMES,
    difficulty_score, difficulty_bucket, inverse_of, undo_conflicts,
)
from .engine import ApplyResult, apply, feasible, applicable_strategies

__all__ = [
    "Level", "Precondition", "StrategyInfo", "STRATEGIES", "STRATEGY_NAMES",
    "difficulty_score", "difficulty_bucket", "inverse_of", "undo_conflicts",
    "ApplyResult", "apply", "feasible", "applicable_strategies",
]
