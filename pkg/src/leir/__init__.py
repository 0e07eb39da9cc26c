"""Loop-equation IR toolkit: parser, interpreter, rewrite strategies,
dataset builder, and an optimization search harness."""

from __future__ import annotations

__version__ = "0.1.0"
