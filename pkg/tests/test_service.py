from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from leir.service import app

MM = ("L^{8}_{i=0}L^{8}_{j=0}L^{8}_{k=0}"
      "[C^{f32,g}_{i,j}=C^{f32,g}_{i,j}+A^{f32,g}_{i,k}*D^{f32,g}_{k,j};];")


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    body = client.get("/health").json()
    assert body == {"ok": True, "strategies": 43}


def test_format_and_check(client):
    assert client.post("/format", json={"leir": MM}).json()["leir"] == MM
    assert client.post("/check", json={"leir": MM}).json()["ok"]
    bad = client.post("/check", json={"leir": MM.replace("D^", "T^")}).json()
    assert not bad["ok"] and bad["diagnostics"][0]["code"] == "ReservedName"
    assert client.post("/format", json={"leir": "nope"}).status_code == 422


def test_run_returns_output_shapes(client):
    body = client.post("/run", json={"leir": MM, "seed": 1}).json()
    assert body["shapes"]["C"] == [8, 8]


def test_apply_and_verify(client):
    applied = client.post("/apply", json={
        "leir": MM, "strategy": "loop vectorization"})
    assert applied.status_code == 200
    verdict = client.post("/verify", json={
        "original": MM, "transformed": applied.json()["leir"]}).json()
    assert verdict["equivalent"]
    missing = client.post("/apply", json={"leir": MM, "strategy": "bogus"})
    assert missing.status_code == 422
    infeasible = client.post("/apply", json={
        "leir": MM, "strategy": "online softmax"})
    assert infeasible.status_code == 409


def test_feasible_and_search(client):
    names = client.post("/feasible", json={"leir": MM}).json()["strategies"]
    assert "loop tiling" in names
    body = client.post("/search", json={
        "leir": MM, "algorithm": "greedy", "seed": 1}).json()
    assert body["best_speedup"] >= 1.0
    bad = client.post("/search", json={"leir": MM, "algorithm": "nope"})
    assert bad.status_code == 422
