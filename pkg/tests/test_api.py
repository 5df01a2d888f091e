import json
from pathlib import Path

import jsonschema
import pytest
from referencing import Registry, Resource
from starlette.testclient import TestClient

from fabula import Engine, EngineConfig, load_dictionary
from fabula.api import create_app

from helpers import restaurant_dictionary_text, restaurant_stories, story_lines

SCHEMA_DIR = Path(__file__).parent.parent / "src" / "fabula" / "schemas"

_registry = Registry().with_resources(
    [
        ("fabula:common", Resource.from_contents(json.loads((SCHEMA_DIR / "common.schema.json").read_text()))),
        ("fabula:responses", Resource.from_contents(json.loads((SCHEMA_DIR / "responses.schema.json").read_text()))),
    ]
)


def check_schema(name: str, payload: dict) -> None:
    validator = jsonschema.Draft202012Validator(
        {"$ref": f"fabula:responses#/$defs/{name}"}, registry=_registry
    )
    validator.validate(payload)


@pytest.fixture
def client():
    engine = Engine(load_dictionary(restaurant_dictionary_text()), EngineConfig.oracle_mode())
    app = create_app(engine)
    with TestClient(app, raise_server_exceptions=False) as c:
        c.engine = engine
        yield c


def _seed_restaurant(client, stories=10):
    lines = []
    for noun, verbs in restaurant_stories(stories):
        lines += story_lines(noun, verbs)
    response = client.post("/api/narrate", json={"text": "\n".join(lines)})
    assert response.status_code == 200


def test_narrate_single_sentence(client):
    response = client.post("/api/narrate", json={"text": "A customer / enters."})
    assert response.status_code == 200
    body = response.json()
    check_schema("narrate", body)
    assert len(body["inserted"]) == 1


def test_narrate_two_sentences_share_subject(client):
    response = client.post("/api/narrate", json={"text": "A customer / enters.\nThe customer / orders."})
    body = response.json()
    assert len(body["inserted"]) == 2
    focus = client.get("/api/focus").json()
    check_schema("focus", focus)
    first, second = focus["vis"]
    assert first["subject"] == second["subject"]


def test_narrate_unknown_word_no_state_change(client):
    before = client.get("/api/state/hash").json()["hash"]
    response = client.post("/api/narrate", json={"text": "A customer / frobnicates."})
    assert response.status_code == 400
    body = response.json()
    check_schema("error", body)
    assert body["error"]["code"] == "unknown_word"
    assert body["error"]["location"]["line"] == 1
    assert client.get("/api/state/hash").json()["hash"] == before


def test_narrate_error_keeps_prior_insertions(client):
    response = client.post(
        "/api/narrate", json={"text": "A customer / enters.\nA customer / frobnicates."}
    )
    assert response.status_code == 400
    body = response.json()
    assert len(body["inserted"]) == 1
    assert len(client.get("/api/focus").json()["vis"]) == 1


def test_narrate_parse_error_has_location(client):
    response = client.post("/api/narrate", json={"text": "customer enters"})
    body = response.json()
    assert response.status_code == 400
    assert body["error"]["code"] == "parse_error"
    assert body["error"]["location"] == {"line": 1, "col": 1}


def test_narrate_rejects_directives(client):
    response = client.post("/api/narrate", json={"text": "!confabulate 3"})
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "parse_error"


def test_narrate_bad_body(client):
    assert client.post("/api/narrate", json={"text": 42}).status_code == 400
    assert client.post("/api/narrate", json=[1, 2]).status_code == 400
    response = client.post("/api/narrate", content=b"not json", headers={"content-type": "application/json"})
    assert response.status_code == 400


def test_focus_fresh_engine_empty(client):
    body = client.get("/api/focus").json()
    check_schema("focus", body)
    assert body == {"instances": [], "vis": []}


def test_shadow_unknown_id_404(client):
    response = client.get("/api/shadow/1")
    assert response.status_code == 404
    body = response.json()
    check_schema("error", body)
    assert body["error"]["code"] == "unknown_id"


def test_shadow_of_focus_vi(client):
    client.post("/api/narrate", json={"text": "A customer / enters.\n----\nA customer / enters."})
    vis = client.get("/api/focus").json()["vis"]
    body = client.get(f"/api/shadow/{vis[0]['id']}").json()
    check_schema("shadow", body)
    assert len(body["entries"]) == 1


def test_shadow_non_integer_id_bad_request(client):
    assert client.get("/api/shadow/abc").status_code == 400


def test_state_hash_stable_across_reads(client):
    first = client.get("/api/state/hash").json()
    check_schema("stateHash", first)
    second = client.get("/api/state/hash").json()
    assert first == second


def test_get_endpoints_never_change_state(client):
    _seed_restaurant(client, 5)
    client.post("/api/narrate", json={"text": "A customer / enters."})
    before = client.get("/api/state/hash").json()["hash"]
    client.get("/api/focus")
    client.get("/api/hls?top=3")
    client.get("/api/memory")
    client.post("/api/cloze", json={"position": 1})
    assert client.get("/api/state/hash").json()["hash"] == before


def test_hls_returns_build_continuations(client):
    _seed_restaurant(client)
    client.post("/api/narrate", json={"text": "A customer / enters."})
    body = client.get("/api/hls?top=2").json()
    check_schema("hls", body)
    assert list(body["candidates"][0]["verbs"]) == ["orders"]


def test_hls_bad_top(client):
    assert client.get("/api/hls?top=0").status_code == 400
    assert client.get("/api/hls?top=x").status_code == 400


def test_memory_range(client):
    client.post("/api/narrate", json={"text": "A customer / enters.\nThe customer / orders."})
    body = client.get("/api/memory").json()
    check_schema("memory", body)
    assert len(body["records"]) == 3
    ranged = client.get("/api/memory?from=2&to=2").json()
    assert [r["id"] for r in ranged["records"]] == [2]
    assert client.get("/api/memory?from=x").status_code == 400


def test_confabulate_schema_order(client):
    _seed_restaurant(client, 20)
    client.post("/api/narrate", json={"text": "A customer / enters."})
    response = client.post("/api/confabulate", json={"steps": 4})
    body = response.json()
    check_schema("confabulate", body)
    assert len(body["inserted"]) == 4
    memory = client.get("/api/memory").json()["records"]
    by_id = {r["id"]: r for r in memory}
    verbs = [list(dict(by_id[i]["verbs"])) for i in body["inserted"]]
    assert verbs == [["orders"], ["eats"], ["pays"], ["leaves"]]


def test_confabulate_zero_steps_bad_request(client):
    response = client.post("/api/confabulate", json={"steps": 0})
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "bad_request"


def test_cloze_restaurant(client):
    _seed_restaurant(client, 20)
    client.post(
        "/api/narrate",
        json={"text": "A customer / enters.\nThe customer / orders.\nThe customer / pays."},
    )
    body = client.post("/api/cloze", json={"position": 2}).json()
    check_schema("cloze", body)
    assert list(body["candidates"][0]["verbs"]) == ["eats"]
    assert body["candidates"][0]["score"] == pytest.approx(2.0, abs=1e-9)


def test_cloze_bad_position(client):
    response = client.post("/api/cloze", json={"position": 3})
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "bad_position"
    assert client.post("/api/cloze", json={"position": "x"}).status_code == 400


def test_concurrent_narrations_never_interleave(client):
    # each narration holds the writer lock for all its lines, so the ticks
    # of any one response form a consecutive block
    import concurrent.futures

    story = "\n".join(story_lines("customer", ["enters", "orders", "eats", "pays", "leaves"])[:-1])
    with concurrent.futures.ThreadPoolExecutor(max_workers=6) as pool:
        results = list(pool.map(lambda _: client.post("/api/narrate", json={"text": story}), range(6)))
    assert all(r.status_code == 200 for r in results)
    records = {r["id"]: r for r in client.get("/api/memory").json()["records"]}
    for response in results:
        ticks = [records[i]["tick"] for i in response.json()["inserted"]]
        assert ticks == list(range(ticks[0], ticks[0] + len(ticks)))


def test_queue_overflow_returns_503():
    engine = Engine(load_dictionary(restaurant_dictionary_text()))
    app = create_app(engine, queue_limit=0)
    with TestClient(app, raise_server_exceptions=False) as client:
        response = client.get("/api/focus")
        assert response.status_code == 503
