import asyncio
import json

import httpx
import pytest

import server
from tools.resolution_tools import get_resolution, get_satisfaction
from tools.validity_tools import get_configurations, get_validity


@pytest.fixture
def texts(fixtures_dir):
    return {
        name: (fixtures_dir / name).read_text(encoding="utf-8")
        for name in ("webportal.fm", "scenario.json", "final.txt", "tie.fm", "tiny.fm")
    }


@pytest.fixture
def remote(monkeypatch, texts):
    """Serve fixtures at https://models.example/<name> through a mock transport."""
    def handler(request: httpx.Request) -> httpx.Response:
        name = request.url.path.lstrip("/")
        if name in texts:
            return httpx.Response(200, text=texts[name])
        return httpx.Response(404, text="not found")

    real_client = httpx.AsyncClient
    monkeypatch.setattr(
        httpx, "AsyncClient",
        lambda **kwargs: real_client(transport=httpx.MockTransport(handler), **kwargs),
    )
    return "https://models.example"


def test_resolution(texts):
    document = json.loads(asyncio.run(get_resolution(texts["webportal.fm"], texts["scenario.json"])))
    assert document["status"] == "ok"
    assert document["valid"] is True
    assert "¬ms" in document["final"] and "ms" not in document["final"]
    assert document["satisfaction"]["weighted_global"]["num"] == 55


def test_resolution_with_rule(texts):
    configs = json.dumps([
        {"stakeholder": "A", "choices": [{"feature": "F", "polarity": "+", "degree": 3}]},
        {"stakeholder": "B", "choices": [{"feature": "F", "polarity": "-", "degree": 3}]},
    ])
    document = json.loads(asyncio.run(get_resolution(texts["tie.fm"], configs, "priority:B")))
    assert document["final"] == ["¬F"]
    assert document["manager_rule"] == "priority:B"


def test_resolution_reports_model_errors(texts):
    document = json.loads(asyncio.run(get_resolution("Root!\n   A?\n", texts["scenario.json"])))
    assert document["status"] == "error"
    assert document["message"].startswith("model:2: ")


def test_resolution_reports_choice_errors(texts):
    document = json.loads(asyncio.run(get_resolution(texts["webportal.fm"], "[{\"stakeholder\": 1")))
    assert document["status"] == "error"
    assert document["message"].startswith("configs:")


def test_validity(texts):
    document = json.loads(asyncio.run(get_validity(texts["webportal.fm"], texts["final.txt"])))
    assert document["valid"] is True
    assert {"WebPortal", "HTML", "Persistence"} <= set(document["witness"])


def test_validity_violation(texts):
    document = json.loads(asyncio.run(get_validity(texts["webportal.fm"], "XML, Database")))
    assert document["valid"] is False
    assert [v["kind"] for v in document["violations"]] == ["xor-multiple"]


def test_configurations(texts):
    document = json.loads(asyncio.run(get_configurations(texts["webportal.fm"], limit=3)))
    assert document["count"] > 3
    assert len(document["configurations"]) == 3


def test_satisfaction(texts):
    document = json.loads(asyncio.run(get_satisfaction(texts["webportal.fm"], texts["scenario.json"], texts["final.txt"])))
    weighted = document["satisfaction"]["weighted_global"]
    assert (weighted["num"], weighted["den"]) == (55, 76)


def test_remote_documents(remote):
    document = json.loads(asyncio.run(get_configurations(f"{remote}/tiny.fm")))
    assert document == {"status": "ok", "count": 1, "configurations": [["Root"]]}

    document = json.loads(asyncio.run(get_resolution(f"{remote}/webportal.fm", f"{remote}/scenario.json")))
    assert document["valid"] is True


def test_remote_not_found(remote):
    document = json.loads(asyncio.run(get_configurations(f"{remote}/absent.fm")))
    assert document["status"] == "error"
    assert "HTTP 404" in document["message"]


def test_server_validates_arguments(texts):
    assert asyncio.run(server.resolve_configuration(texts["tie.fm"], "[]", "loudest")).startswith("Invalid rule")
    assert asyncio.run(server.enumerate_configurations(texts["tiny.fm"], 0)).startswith("Invalid limit")
    assert asyncio.run(server.validate_configuration("", "F")) == "Invalid model."


def test_server_delegates_to_tools(texts):
    document = json.loads(asyncio.run(server.enumerate_configurations(texts["tie.fm"], 5)))
    assert document["count"] == 2
