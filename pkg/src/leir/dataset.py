"""Dataset construction: program corpus, transformation entries, chat exports.

Entries pair an original program with a verified transformed program, a
named strategy (or strategy chain), a rendered reasoning trace, and a
difficulty bucket.  Easy entries are heavily subsampled, medium multi-step
entries are capped per strategy, and difficult entries are fully retained.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .interp import equivalent, shrink_shapes
from .strategies import STRATEGIES, apply, difficulty_score, undo_conflicts
from .syntax import parse, unparse

STEP_SEPARATOR = "; "


@dataclass(frozen=True)
class Entry:
    id: str
    program_name: str
    original_leir: str
    transformed_leir: str
    strategy: str
    cot: str
    difficulty: str
    verified: bool
    original_tir: str = ""
    transformed_tir: str = ""
    cuda: str = ""

    @property
    def steps(self) -> list[str]:
        return self.strategy.split(STEP_SEPARATOR)


# -- program corpus -----------------------------------------------------------


def _dims(rng: random.Random, n: int, choices=(4, 6, 8, 12, 16)) -> list[int]:
    return [rng.choice(choices) for _ in range(n)]


def _gen_matmul(rng):
    m, n, k = _dims(rng, 3)
    return (f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}L^{{{k}}}_{{c=0}}"
            f"[D^{{f32,g}}_{{tx,a}}=D^{{f32,g}}_{{tx,a}}"
            f"+A^{{f32,g}}_{{tx,c}}*C^{{f32,g}}_{{c,a}};];")


def _gen_batch_matmul(rng):
    b, m, n, k = _dims(rng, 4)
    return (f"B^{{{b}}}_{{tx=0}}L^{{{m}}}_{{a=0}}L^{{{n}}}_{{c=0}}L^{{{k}}}_{{d=0}}"
            f"[D^{{f32,g}}_{{tx,a,c}}=D^{{f32,g}}_{{tx,a,c}}"
            f"+A^{{f32,g}}_{{tx,a,d}}*C^{{f32,g}}_{{tx,d,c}};];")


def _gen_bias_add(rng):
    m, n = _dims(rng, 2)
    return (f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
            f"[D^{{f32,g}}_{{tx,a}}=A^{{f32,g}}_{{tx,a}}+C^{{f32,g}}_{{a}};];")


def _gen_sigmoid(rng):
    m, n = _dims(rng, 2)
    return (f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
            f"[C^{{f32,g}}_{{tx,a}}=1/(1+exp(-A^{{f32,g}}_{{tx,a}}));];")


def _gen_relu_chain(rng):
    m, n = _dims(rng, 2)
    return (f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
            f"[C^{{f32,g}}_{{tx,a}}=max(0,A^{{f32,g}}_{{tx,a}});];"
            f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
            f"[E^{{f32,g}}_{{tx,a}}=C^{{f32,g}}_{{tx,a}}*D^{{f32,g}}_{{tx,a}};];")


def _gen_hardswish(rng):
    m, n = _dims(rng, 2)
    return (f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
            f"[C^{{f32,g}}_{{tx,a}}=A^{{f32,g}}_{{tx,a}}"
            f"*max(0,min(1,(A^{{f32,g}}_{{tx,a}}+3)/6));];")


def _gen_row_sum(rng):
    m, n = _dims(rng, 2)
    return (f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
            f"[C^{{f32,g}}_{{tx}}=C^{{f32,g}}_{{tx}}+A^{{f32,g}}_{{tx,a}};];")


def _gen_row_mean(rng):
    m, n = _dims(rng, 2)
    return (f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
            f"[C^{{f32,g}}_{{tx}}=C^{{f32,g}}_{{tx}}+A^{{f32,g}}_{{tx,a}};];"
            f"B^{{{m}}}_{{tx=0}}[D^{{f32,g}}_{{tx}}=C^{{f32,g}}_{{tx}}/{n};];")


def _gen_row_max(rng):
    m, n = _dims(rng, 2)
    return (f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
            f"[C^{{f32,g}}_{{tx}}=max(C^{{f32,g}}_{{tx}},A^{{f32,g}}_{{tx,a}});];")


def _gen_softmax(rng):
    m, n = _dims(rng, 2)
    h = f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
    return (f"{h}[C^{{f32,g}}_{{tx}}=max(C^{{f32,g}}_{{tx}},A^{{f32,g}}_{{tx,a}});];"
            f"{h}[D^{{f32,g}}_{{tx}}=D^{{f32,g}}_{{tx}}"
            f"+exp(A^{{f32,g}}_{{tx,a}}-C^{{f32,g}}_{{tx}});];"
            f"{h}[E^{{f32,g}}_{{tx,a}}=exp(A^{{f32,g}}_{{tx,a}}-C^{{f32,g}}_{{tx}})"
            f"/D^{{f32,g}}_{{tx}};];")


def _gen_logsoftmax(rng):
    m, n = _dims(rng, 2)
    h = f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
    return (f"{h}[C^{{f32,g}}_{{tx}}=max(C^{{f32,g}}_{{tx}},A^{{f32,g}}_{{tx,a}});];"
            f"{h}[D^{{f32,g}}_{{tx}}=D^{{f32,g}}_{{tx}}"
            f"+exp(A^{{f32,g}}_{{tx,a}}-C^{{f32,g}}_{{tx}});];"
            f"{h}[E^{{f32,g}}_{{tx,a}}=A^{{f32,g}}_{{tx,a}}-C^{{f32,g}}_{{tx}}"
            f"-log(D^{{f32,g}}_{{tx}});];")


def _gen_layer_norm(rng):
    m, n = _dims(rng, 2)
    return (f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
            f"[D^{{f32,g}}_{{tx,a}}=G^{{f32,g}}_{{a}}"
            f"*((A^{{f32,g}}_{{tx,a}}-M^{{f32,g}}_{{tx}})"
            f"/sqrt(N^{{f32,g}}_{{tx}}+1e-05))+C^{{f32,g}}_{{a}};];")


def _gen_shift_pool(rng):
    m, n = _dims(rng, 2, (8, 12, 16))
    return (f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
            f"[C^{{f32,g}}_{{tx,a}}=if_then_else(1<=a<{n - 1},"
            f"(A^{{f32,g}}_{{tx,a-1}}+A^{{f32,g}}_{{tx,a+1}})/2,0);];")


def _gen_mse(rng):
    m, n = _dims(rng, 2)
    return (f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
            f"[C^{{f32,g}}_{{tx}}=C^{{f32,g}}_{{tx}}"
            f"+(A^{{f32,g}}_{{tx,a}}-D^{{f32,g}}_{{tx,a}})**2;];")


def _gen_neg_loglik(rng):
    m, n = _dims(rng, 2)
    return (f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
            f"[C^{{f32,g}}_{{tx}}=C^{{f32,g}}_{{tx}}"
            f"-G^{{f32,g}}_{{tx,a}}*log(A^{{f32,g}}_{{tx,a}});];")


def _gen_attention(rng):
    b, q, k = _dims(rng, 3, (4, 6, 8))
    v = rng.choice((4, 6, 8))
    h = f"B^{{{b}}}_{{tx=0}}L^{{{q}}}_{{a=0}}"
    red = f"{h}L^{{{k}}}_{{d=0}}"
    return (
        f"{red}L^{{{v}}}_{{f=0}}[Q^{{f32,g}}_{{tx,a,d}}=Q^{{f32,g}}_{{tx,a,d}}"
        f"+W^{{f32,g}}_{{tx,a,f}}*K^{{f32,g}}_{{tx,d,f}};];"
        f"{red}[C^{{f32,g}}_{{tx,a}}=max(C^{{f32,g}}_{{tx,a}},Q^{{f32,g}}_{{tx,a,d}});];"
        f"{red}[D^{{f32,g}}_{{tx,a}}=D^{{f32,g}}_{{tx,a}}"
        f"+exp(Q^{{f32,g}}_{{tx,a,d}}-C^{{f32,g}}_{{tx,a}});];"
        f"{red}[E^{{f32,g}}_{{tx,a,d}}=exp(Q^{{f32,g}}_{{tx,a,d}}-C^{{f32,g}}_{{tx,a}})"
        f"/D^{{f32,g}}_{{tx,a}};];"
        f"{h}L^{{{v}}}_{{d=0}}L^{{{k}}}_{{f=0}}[O^{{f32,g}}_{{tx,a,d}}"
        f"=O^{{f32,g}}_{{tx,a,d}}+E^{{f32,g}}_{{tx,a,f}}*N^{{f32,g}}_{{tx,f,d}};];"
    )


def _gen_elementwise_chain(rng):
    m, n = _dims(rng, 2)
    h = f"B^{{{m}}}_{{tx=0}}L^{{{n}}}_{{a=0}}"
    ops = [
        "exp({x})", "sqrt(abs({x}))", "{x}*2", "({x}+1)/2", "max(0,{x})",
        "log(abs({x})+1)",
    ]
    depth = rng.randrange(2, 5)
    names = ["C", "D", "E", "F", "G"]
    parts = []
    src = "A"
    for k in range(depth):
        op = rng.choice(ops)
        rhs = op.format(x=f"{src}^{{f32,g}}_{{tx,a}}")
        parts.append(f"{h}[{names[k]}^{{f32,g}}_{{tx,a}}={rhs};];")
        src = names[k]
    return "".join(parts)


_FAMILIES = [
    ("matmul", _gen_matmul),
    ("batch_matmul", _gen_batch_matmul),
    ("bias_add", _gen_bias_add),
    ("sigmoid", _gen_sigmoid),
    ("relu_mul", _gen_relu_chain),
    ("hardswish", _gen_hardswish),
    ("row_sum", _gen_row_sum),
    ("row_mean", _gen_row_mean),
    ("row_max", _gen_row_max),
    ("softmax", _gen_softmax),
    ("log_softmax", _gen_logsoftmax),
    ("layer_norm", _gen_layer_norm),
    ("shift_pool", _gen_shift_pool),
    ("mse", _gen_mse),
    ("neg_loglik", _gen_neg_loglik),
    ("attention", _gen_attention),
    ("elementwise_chain", _gen_elementwise_chain),
]


def gen_corpus(seed: int, count: int = 34) -> list[tuple[str, str]]:
    """Deterministic (name, source) pairs cycling through program families."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        fam, gen = _FAMILIES[i % len(_FAMILIES)]
        text = gen(rng)
        out.append((f"{fam}_{i:03d}", unparse(parse(text))))
    return out


# -- reasoning traces ---------------------------------------------------------


def render_cot(steps: list[tuple[str, str]], verified: bool) -> str:
    """One paragraph per applied step: what the strategy does, then what was
    done to this particular program."""
    lines = []
    for k, (name, note) in enumerate(steps, 1):
        info = STRATEGIES[name]
        prefix = f"Step {k}: " if len(steps) > 1 else ""
        lines.append(f"{prefix}Apply {name} ({info.level.value} level): "
                     f"{info.description}. In this program, {note}.")
    tail = ("Numeric verification on randomized inputs confirmed the "
            "transformed program matches the original outputs."
            if verified else
            "Numeric verification could not confirm equivalence for this pair.")
    lines.append(tail)
    return "\n".join(lines)


# -- entry construction -------------------------------------------------------


def _verify_pair(a_text: str, b_text: str, trials: int, seed: int,
                 cap: int) -> bool:
    # both sides already come from shrunk programs; re-shrinking here could
    # rescale an extent that exists as a loop in only one of the two texts
    try:
        a = parse(a_text)
        b = parse(b_text)
        return equivalent(a, b, trials=trials, seed=seed).equivalent
    except Exception:
        return False


def _chain_bucket(names: list[str]) -> str:
    hardest = max(names, key=difficulty_score)
    return STRATEGIES[hardest].difficulty


def build_entries(corpus: list[tuple[str, str]], seed: int,
                  multi_per_program: int = 2, max_chain: int = 3,
                  verify_trials: int = 3, shrink_cap: int = 8,
                  lower=None) -> list[Entry]:
    """Single-step entries for every feasible strategy plus sampled chains."""
    rng = random.Random(seed)
    entries: list[Entry] = []

    def lowered(text: str) -> str:
        return lower(text) if lower else ""

    for pname, text in corpus:
        program = parse(text)
        small = shrink_shapes(program, shrink_cap)
        for sname in STRATEGIES:
            res = apply(small, sname, random.Random(rng.randrange(1 << 30)))
            if res is None:
                continue
            out_text = unparse(res.program)
            in_text = unparse(small)
            ok = _verify_pair(in_text, out_text, verify_trials,
                              rng.randrange(1 << 30), shrink_cap)
            cot = render_cot([(sname, res.note)], ok)
            entries.append(Entry(
                id=f"{pname}-s{len(entries):05d}",
                program_name=pname,
                original_leir=in_text,
                transformed_leir=out_text,
                strategy=sname,
                cot=cot,
                difficulty=STRATEGIES[sname].difficulty,
                verified=ok,
                original_tir=lowered(in_text),
                transformed_tir=lowered(out_text),
                cuda="",
            ))
        # multi-step chains drawn from medium and difficult strategies only
        pool = [n for n, s in STRATEGIES.items() if s.difficulty != "Easy"]
        for _ in range(multi_per_program):
            cur = small
            steps: list[tuple[str, str]] = []
            depth = rng.randrange(2, max_chain + 1)
            banned: set[str] = set()
            for _ in range(depth):
                cands = [n for n in pool if n not in banned]
                rng.shuffle(cands)
                advanced = False
                for n in cands:
                    res = apply(cur, n, random.Random(rng.randrange(1 << 30)))
                    if res is not None:
                        cur = res.program
                        steps.append((n, res.note))
                        banned = undo_conflicts(n)
                        advanced = True
                        break
                if not advanced:
                    break
            if len(steps) < 2:
                continue
            in_text = unparse(small)
            out_text = unparse(cur)
            ok = _verify_pair(in_text, out_text, verify_trials,
                              rng.randrange(1 << 30), shrink_cap)
            names = [n for n, _ in steps]
            entries.append(Entry(
                id=f"{pname}-m{len(entries):05d}",
                program_name=pname,
                original_leir=in_text,
                transformed_leir=out_text,
                strategy=STEP_SEPARATOR.join(names),
                cot=render_cot(steps, ok),
                difficulty=_chain_bucket(names),
                verified=ok,
                original_tir=lowered(in_text),
                transformed_tir=lowered(out_text),
                cuda="",
            ))
    return entries


# -- filtering ----------------------------------------------------------------


def filter_entries(entries: list[Entry], seed: int,
                   simplify_keep: float = 0.20, expand_keep: float = 0.04,
                   medium_multi_cap: int = 2000) -> list[Entry]:
    """Subsample easy entries, cap medium chains, keep everything difficult.

    Easy single-step entries survive with probability 20% (simplification
    moves) or 4% (expansion moves); easy strategies never appear in chains;
    medium chains are capped per leading strategy; difficult entries pass
    through untouched.
    """
    rng = random.Random(seed)
    kept: list[Entry] = []
    medium_counts: Counter = Counter()
    for e in entries:
        steps = e.steps
        multi = len(steps) > 1
        if e.difficulty == "Easy":
            if multi:
                continue
            info = STRATEGIES[steps[0]]
            rate = expand_keep if info.orientation == "expand" else simplify_keep
            if rng.random() < rate:
                kept.append(e)
            continue
        if e.difficulty == "Medium" and multi:
            lead = steps[0]
            if medium_counts[lead] >= medium_multi_cap:
                continue
            medium_counts[lead] += 1
        kept.append(e)
    return kept


# -- serialization ------------------------------------------------------------


def entry_record(e: Entry) -> dict:
    return asdict(e)


def chat_record(e: Entry) -> dict:
    steps = e.steps
    if len(steps) == 1:
        task = (f"Apply the transformation strategy '{steps[0]}' to the "
                f"following program and output the transformed program.")
    else:
        listing = ", ".join(f"'{s}'" for s in steps)
        task = (f"Apply the following transformation strategies in order: "
                f"{listing}. Output the transformed program.")
    user = (f"{task}\n\nProgram:\n{e.original_leir}")
    if len(steps) == 1:
        assistant = f"{e.cot}\n\nTransformed program:\n{e.transformed_leir}"
    else:
        assistant = (f"{len(steps)} transformations applied.\n{e.cot}\n\n"
                     f"Transformed program:\n{e.transformed_leir}")
    return {"messages": [{"role": "user", "content": user},
                         {"role": "assistant", "content": assistant}]}


def strategy_pick_record(e: Entry) -> dict:
    steps = e.steps
    user = ("Given the original program and its transformed version, name the "
            "strategy or strategies that were applied.\n\nOriginal:\n"
            f"{e.original_leir}\n\nTransformed:\n{e.transformed_leir}")
    if len(steps) == 1:
        assistant = steps[0]
    else:
        assistant = f"{len(steps)}: " + STEP_SEPARATOR.join(steps)
    return {"messages": [{"role": "user", "content": user},
                         {"role": "assistant", "content": assistant}]}


def write_jsonl(path: Path, records: list[dict]) -> None:
    with open(path, "w") as f:
        for r in records:
            f.write(json.dumps(r, sort_keys=True) + "\n")


def build_dataset(out_dir: str | Path, seed: int, program_count: int = 34,
                  multi_per_program: int = 2) -> dict:
    """Build and write all three JSONL exports; returns summary statistics."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = gen_corpus(seed, program_count)
    entries = build_entries(corpus, seed, multi_per_program=multi_per_program)
    entries = filter_entries(entries, seed)
    write_jsonl(out / "entries.jsonl", [entry_record(e) for e in entries])
    write_jsonl(out / "chat.jsonl", [chat_record(e) for e in entries])
    write_jsonl(out / "strategy_id.jsonl", [strategy_pick_record(e) for e in entries])
    stats = dataset_stats(entries)
    (out / "stats.json").write_text(json.dumps(stats, indent=2, sort_keys=True))
    return stats


def dataset_stats(entries: list[Entry]) -> dict:
    by_difficulty = Counter(e.difficulty for e in entries)
    by_strategy = Counter(s for e in entries for s in e.steps)
    return {
        "total": len(entries),
        "verified": sum(1 for e in entries if e.verified),
        "multi_step": sum(1 for e in entries if len(e.steps) > 1),
        "by_difficulty": dict(sorted(by_difficulty.items())),
        "by_strategy": dict(sorted(by_strategy.items())),
    }
