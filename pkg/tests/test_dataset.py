from __future__ import annotations

import json

from leir.dataset import (
    Entry, build_dataset, build_entries, chat_record, dataset_stats,
    entry_record, gen_corpus, render_cot, strategy_pick_record,
)
from leir.ir import validate
from leir.strategies import undo_conflicts
from leir.syntax import parse

ENTRY_KEYS = ["id", "program_name", "original_leir", "transformed_leir",
              "strategy", "cot", "difficulty", "verified",
              "original_tir", "transformed_tir", "cuda"]


def test_gen_corpus_is_deterministic_and_valid():
    a = gen_corpus(seed=4, count=10)
    b = gen_corpus(seed=4, count=10)
    assert a == b
    for name, text in a:
        assert validate(parse(text)) == [], name


def test_entry_record_key_order():
    e = Entry(id="x", program_name="p", original_leir="o",
              transformed_leir="t", strategy="apart", cot="c",
              difficulty="Easy", verified=True)
    assert list(entry_record(e)) == ENTRY_KEYS


def test_render_cot_single_and_multi():
    single = render_cot([("loop split", "split loop i")], verified=True)
    assert single.startswith("Apply loop split")
    assert "confirmed" in single
    multi = render_cot([("loop split", "a"), ("loop binding", "b")],
                       verified=False)
    assert multi.startswith("Step 1:")
    assert "Step 2:" in multi
    assert "could not confirm" in multi


def test_chat_and_pick_records():
    e = Entry(id="x", program_name="p", original_leir="ORIG",
              transformed_leir="NEW", strategy="loop split; loop binding",
              cot="c", difficulty="Difficult", verified=True)
    chat = chat_record(e)
    assert [m["role"] for m in chat["messages"]] == ["user", "assistant"]
    assert chat["messages"][1]["content"].startswith(
        "2 transformations applied.")
    pick = strategy_pick_record(e)
    assert pick["messages"][1]["content"] == "2: loop split; loop binding"
    single = strategy_pick_record(
        Entry(id="y", program_name="p", original_leir="O",
              transformed_leir="T", strategy="apart", cot="c",
              difficulty="Easy", verified=True))
    assert single["messages"][1]["content"] == "apart"


def test_build_entries_no_easy_chains():
    corpus = gen_corpus(seed=1, count=4)
    entries = build_entries(corpus, seed=1, multi_per_program=2)
    assert entries
    for e in entries:
        if len(e.steps) > 1:
            assert e.difficulty != "Easy"
            for a, b in zip(e.steps, e.steps[1:]):
                assert b not in undo_conflicts(a)


def test_build_dataset_outputs(tmp_path):
    stats = build_dataset(tmp_path, seed=3, program_count=4,
                          multi_per_program=1)
    assert stats["total"] > 0
    for fname in ("entries.jsonl", "chat.jsonl", "strategy_id.jsonl",
                  "stats.json"):
        assert (tmp_path / fname).exists()
    lines = (tmp_path / "entries.jsonl").read_text().splitlines()
    assert len(lines) == stats["total"]
    rec = json.loads(lines[0])
    assert set(rec) == set(ENTRY_KEYS)
    parse(rec["original_leir"])
    parse(rec["transformed_leir"])


def test_dataset_stats_counts():
    entries = [
        Entry(id="1", program_name="p", original_leir="", transformed_leir="",
              strategy="apart", cot="", difficulty="Easy", verified=True),
        Entry(id="2", program_name="p", original_leir="", transformed_leir="",
              strategy="loop split; loop binding", cot="",
              difficulty="Difficult", verified=False),
    ]
    s = dataset_stats(entries)
    assert s["total"] == 2 and s["verified"] == 1 and s["multi_step"] == 1
    assert s["by_strategy"]["loop split"] == 1
