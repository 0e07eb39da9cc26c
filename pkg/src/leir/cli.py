"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 parse or validation error,
3 verification failure, 4 I/O error.  The default RNG seed can be set
with the LEIR_SEED environment variable.
"""

from __future__ import annotations

import json
import os
import sys

import click

from . import dataset as ds
from . import search as se
from .interp import align_io, equivalent, random_env, run as interp_run, shrink_shapes
from .ir import validate
from .strategies import (
    STRATEGIES, apply as apply_strategy, applicable_strategies,
    difficulty_bucket, difficulty_score,
)
from .syntax import ParseError, byte_stats, parse, unparse

click.UsageError.exit_code = 1

EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_VERIFY = 3
EXIT_IO = 4

# snake_case aliases accepted anywhere a strategy name is expected
STRATEGY_ALIASES = {name.replace(" ", "_"): name for name in STRATEGIES}


def _canonical_strategy(name: str) -> str:
    name = name.strip()
    if name in STRATEGIES:
        return name
    if name in STRATEGY_ALIASES:
        return STRATEGY_ALIASES[name]
    raise click.UsageError(f"unknown strategy {name!r}")


def _default_seed() -> int:
    try:
        return int(os.environ.get("LEIR_SEED", "0"))
    except ValueError:
        return 0


def _read_source(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)


def _parse_source(path: str):
    text = _read_source(path)
    try:
        return parse(text)
    except ParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(EXIT_INVALID)


def _parse_valid(path: str):
    program = _parse_source(path)
    diags = validate(program)
    if diags:
        for d in diags:
            click.echo(f"{d.code} at {d.path}: {d.message}", err=True)
        sys.exit(EXIT_INVALID)
    return program


@click.group()
def main():
    """Work with loop-equation IR programs."""


@main.command()
@click.argument("source", default="-")
def fmt(source):
    """Parse SOURCE and print it in canonical form."""
    click.echo(unparse(_parse_source(source)), nl=False)


@main.command()
@click.argument("source", default="-")
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
def check(source, as_json):
    """Parse and validate SOURCE, reporting diagnostics."""
    program = _parse_source(source)
    diags = validate(program)
    if as_json:
        click.echo(json.dumps(
            [{"code": d.code, "path": d.path, "message": d.message}
             for d in diags]))
    else:
        for d in diags:
            click.echo(f"{d.code} at {d.path}: {d.message}")
        if not diags:
            click.echo("ok")
    sys.exit(EXIT_INVALID if diags else 0)


@main.command(name="run")
@click.argument("source", default="-")
@click.option("--seed", type=int, default=None, help="input RNG seed")
@click.option("--shrink/--no-shrink", default=True,
              help="rescale large extents before executing")
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
def run_cmd(source, seed, shrink, as_json):
    """Execute SOURCE on random inputs and print its outputs."""
    program = _parse_valid(source)
    if shrink:
        program = shrink_shapes(program)
    seed = _default_seed() if seed is None else seed
    env = interp_run(program, random_env(program, seed))
    outputs = {name: env.tensors[name] for name in program.outputs()}
    if as_json:
        click.echo(json.dumps(
            {n: a.tolist() for n, a in sorted(outputs.items())}))
    else:
        for name, arr in sorted(outputs.items()):
            click.echo(f"{name} shape={list(arr.shape)}")
            click.echo(str(arr))


@main.command()
@click.argument("source", default="-")
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
def feasible(source, as_json):
    """List strategies applicable to SOURCE."""
    names = applicable_strategies(_parse_valid(source))
    click.echo(json.dumps(names) if as_json else "\n".join(names))


@main.command(name="apply")
@click.argument("source", default="-")
@click.argument("strategy")
@click.option("--seed", type=int, default=None, help="strategy RNG seed")
def apply_cmd(source, strategy, seed):
    """Apply STRATEGY to SOURCE and print the transformed program."""
    import random

    name = _canonical_strategy(strategy)
    program = _parse_valid(source)
    seed = _default_seed() if seed is None else seed
    res = apply_strategy(program, name, random.Random(seed))
    if res is None:
        click.echo(f"strategy {name!r} is not applicable here", err=True)
        sys.exit(EXIT_INVALID)
    click.echo(unparse(res.program), nl=False)
    click.echo(f"note: {res.note}", err=True)


@main.command()
@click.argument("original")
@click.argument("transformed")
@click.option("--trials", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=None, help="input RNG seed")
@click.option("--shrink/--no-shrink", default=True,
              help="rescale large extents before executing")
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
def verify(original, transformed, trials, seed, shrink, as_json):
    """Check that two programs compute the same outputs."""
    a = _parse_valid(original)
    b = _parse_valid(transformed)
    seed = _default_seed() if seed is None else seed
    if shrink:
        a, b = shrink_shapes(a), shrink_shapes(b)
    try:
        report = equivalent(a, align_io(b, a), trials=trials, seed=seed)
    except Exception as exc:
        click.echo(f"verification error: {exc}", err=True)
        sys.exit(EXIT_VERIFY)
    if as_json:
        click.echo(json.dumps({
            "equivalent": report.equivalent,
            "trials": len(report.trials),
            "rtol": report.tolerance_used[0],
            "atol": report.tolerance_used[1],
            "reason": report.reason,
        }))
    else:
        click.echo("equivalent" if report.equivalent
                   else f"NOT equivalent: {report.reason}")
    sys.exit(0 if report.equivalent else EXIT_VERIFY)


@main.command()
@click.argument("strategy", required=False)
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
def score(strategy, as_json):
    """Show difficulty scores, for one strategy or all of them."""
    names = [_canonical_strategy(strategy)] if strategy else list(STRATEGIES)
    rows = [{"strategy": n,
             "score": round(difficulty_score(n), 3),
             "difficulty": difficulty_bucket(n)} for n in names]
    if as_json:
        click.echo(json.dumps(rows))
    else:
        for r in rows:
            click.echo(f"{r['strategy']}: {r['score']} ({r['difficulty']})")


@main.command()
@click.option("--seed", type=int, default=None)
@click.option("--count", type=int, default=34, show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="directory for one .leir file per program")
def gen(seed, count, out):
    """Generate a corpus of reference programs."""
    seed = _default_seed() if seed is None else seed
    corpus = ds.gen_corpus(seed=seed, count=count)
    if out is None:
        for name, text in corpus:
            click.echo(f"# {name}")
            click.echo(text, nl=False)
        return
    try:
        os.makedirs(out, exist_ok=True)
        for name, text in corpus:
            with open(os.path.join(out, f"{name}.leir"), "w",
                      encoding="utf-8") as f:
                f.write(text)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)
    click.echo(f"wrote {len(corpus)} programs to {out}")


@main.command(name="build-dataset")
@click.argument("out_dir", type=click.Path())
@click.option("--seed", type=int, default=None)
@click.option("--programs", type=int, default=34, show_default=True)
@click.option("--multi", type=int, default=2, show_default=True,
              help="multi-step chains per program")
def build_dataset_cmd(out_dir, seed, programs, multi):
    """Build the transformation dataset (JSONL files plus stats)."""
    seed = _default_seed() if seed is None else seed
    try:
        stats = ds.build_dataset(out_dir, seed=seed, program_count=programs,
                                 multi_per_program=multi)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)
    click.echo(json.dumps(stats, indent=2, sort_keys=True))


@main.command(name="search")
@click.argument("source", default="-")
@click.option("--algorithm", type=click.Choice(se.ALGORITHMS),
              default="greedy", show_default=True)
@click.option("--iterations", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--no-verify", is_flag=True,
              help="skip per-candidate equivalence checks")
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
def search_cmd(source, algorithm, iterations, seed, no_verify, as_json):
    """Search for a faster equivalent of SOURCE."""
    program = _parse_valid(source)
    seed = _default_seed() if seed is None else seed
    budget = se.SearchBudget(max_iterations=iterations)
    result = se.run_search(program, algorithm, budget=budget, seed=seed,
                           verify=not no_verify)
    if as_json:
        click.echo(json.dumps({
            "algorithm": result.algorithm,
            "best_speedup": result.best_speedup,
            "best_strategies": list(result.best_strategies),
            "samples": result.samples,
            "iterations": result.iterations,
            "best_leir": result.best_leir,
        }))
    else:
        click.echo(f"best speedup: {result.best_speedup:.3f} "
                   f"({result.samples} samples)")
        if result.best_strategies:
            click.echo("strategies: " + "; ".join(result.best_strategies))
        click.echo(result.best_leir, nl=False)


@main.command()
@click.argument("source", default="-")
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
def stats(source, as_json):
    """Report size and structure statistics for SOURCE."""
    text = _read_source(source)
    try:
        program = parse(text)
    except ParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    info = byte_stats(text)
    info.update({
        "expressions": len(program.exprs),
        "equations": sum(1 for _ in program.equations()),
        "tensors": len(program.tensor_names()),
        "inputs": len(program.inputs()),
        "outputs": len(program.outputs()),
        "analytic_cost": se.analytic_cost(program),
    })
    if as_json:
        click.echo(json.dumps(info, sort_keys=True))
    else:
        for k in sorted(info):
            click.echo(f"{k}: {info[k]}")


if __name__ == "__main__":
    main()
