import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from curralign.lexical import RankedClassification
from curralign.ontology import parse_guideline
from curralign.pipeline import save_result
from curralign.service import DecisionLog, create_app
from conftest import small_guideline_dict


@pytest.fixture
def review(tmp_path):
    guideline = parse_guideline(json.dumps(small_guideline_dict()))
    results = tmp_path / "results"
    results.mkdir()
    save_result(
        results,
        RankedClassification(
            "graphs",
            "count-unweighted",
            [("AL/Graphs/graph", 4.0), ("AL/Graphs/bfs", 2.0), ("DS/Lists/linked", 1.0)],
        ),
        20,
    )
    save_result(
        results,
        RankedClassification("graphs", "count-weighted", [("AL/Graphs/graph", 2.0)]),
        20,
    )
    save_result(results, RankedClassification("lists", "count-unweighted", []), 20)
    app = create_app(results, guideline)
    return TestClient(app), results


def test_list_documents_with_suggestion_counts(review):
    client, _ = review
    payload = client.get("/api/documents").json()
    assert payload == [
        {
            "document_id": "graphs",
            "methods": {"count-unweighted": 3, "count-weighted": 1},
        },
        {"document_id": "lists", "methods": {"count-unweighted": 0}},
    ]


def test_suggestions_enriched_and_rank_ordered(review):
    client, _ = review
    payload = client.get(
        "/api/documents/graphs/suggestions", params={"method": "count-unweighted"}
    ).json()
    assert payload["method"] == "count-unweighted"
    entries = payload["entries"]
    assert [e["category_id"] for e in entries] == [
        "AL/Graphs/graph",
        "AL/Graphs/bfs",
        "DS/Lists/linked",
    ]
    assert [e["rank"] for e in entries] == [1, 2, 3]
    assert entries[0]["ka_title"] == "Algorithms"
    assert entries[0]["ku_title"] == "Graphs"
    assert entries[0]["text"] == "Graph algorithms"
    assert entries[0]["decision"] == "undecided"
    assert [e["score"] for e in entries] == [4.0, 2.0, 1.0]


def test_unknown_document_is_404_with_error_payload(review):
    client, _ = review
    response = client.get("/api/documents/nope/suggestions")
    assert response.status_code == 404
    assert "error" in response.json()


def test_unknown_method_is_404(review):
    client, _ = review
    response = client.get("/api/documents/graphs/suggestions", params={"method": "llm-binary"})
    assert response.status_code == 404


def test_category_context_endpoint(review):
    client, _ = review
    payload = client.get("/api/categories/DS/Lists/linked/context").json()
    assert payload["ka_title"] == "Data Structures"
    assert payload["ku_title"] == "Lists"
    assert payload["kind"] == "topic"


def test_guideline_endpoint_round_trips(review):
    client, _ = review
    assert client.get("/api/guideline").json() == small_guideline_dict()


def test_decision_round_trip_export(review):
    client, _ = review
    post = lambda cat, verdict: client.post(
        "/api/documents/graphs/decisions", json={"category_id": cat, "verdict": verdict}
    )
    assert post("AL/Graphs/graph", "accepted").status_code == 200
    assert post("AL/Graphs/bfs", "rejected").status_code == 200
    # an added category outside the suggested top-K
    assert post("AL/Sorting/quicksort", "added").status_code == 200
    exported = client.get("/api/export").json()
    assert exported == {"graphs": ["AL/Graphs/graph", "AL/Sorting/quicksort"]}


def test_last_decision_wins(review):
    client, _ = review
    for verdict in ("rejected", "accepted"):
        client.post(
            "/api/documents/graphs/decisions",
            json={"category_id": "AL/Graphs/graph", "verdict": verdict},
        )
    assert client.get("/api/export").json() == {"graphs": ["AL/Graphs/graph"]}
    client.post(
        "/api/documents/graphs/decisions",
        json={"category_id": "AL/Graphs/graph", "verdict": "rejected"},
    )
    assert client.get("/api/export").json() == {}


def test_decisions_persisted_append_only(review):
    client, results = review
    client.post(
        "/api/documents/graphs/decisions",
        json={"category_id": "AL/Graphs/graph", "verdict": "accepted"},
    )
    client.post(
        "/api/documents/graphs/decisions",
        json={"category_id": "AL/Graphs/bfs", "verdict": "rejected"},
    )
    lines = (results / "decisions.jsonl").read_text().strip().splitlines()
    assert len(lines) == 2
    first = json.loads(lines[0])
    assert first["category_id"] == "AL/Graphs/graph"
    assert first["verdict"] == "accepted"
    assert "timestamp" in first


def test_replaying_log_reconstructs_export(review, tmp_path):
    client, results = review
    decisions = [
        ("AL/Graphs/graph", "accepted"),
        ("AL/Graphs/bfs", "accepted"),
        ("AL/Graphs/bfs", "rejected"),
        ("DS/Lists/linked", "added"),
    ]
    for category_id, verdict in decisions:
        client.post(
            "/api/documents/graphs/decisions",
            json={"category_id": category_id, "verdict": verdict},
        )
    log = DecisionLog(results / "decisions.jsonl")
    assert log.export() == client.get("/api/export").json()


def test_decision_rejects_bad_verdict(review):
    client, _ = review
    response = client.post(
        "/api/documents/graphs/decisions",
        json={"category_id": "AL/Graphs/graph", "verdict": "meh"},
    )
    assert response.status_code == 422


def test_decision_rejects_unknown_category(review):
    client, _ = review
    response = client.post(
        "/api/documents/graphs/decisions",
        json={"category_id": "nope", "verdict": "accepted"},
    )
    assert response.status_code == 404


def test_suggestions_reflect_decisions_after_sync(review):
    client, _ = review
    client.post(
        "/api/documents/graphs/decisions",
        json={"category_id": "AL/Graphs/graph", "verdict": "accepted"},
    )
    payload = client.get(
        "/api/documents/graphs/suggestions", params={"method": "count-unweighted"}
    ).json()
    states = {e["category_id"]: e["decision"] for e in payload["entries"]}
    assert states["AL/Graphs/graph"] == "accepted"
    assert states["AL/Graphs/bfs"] == "undecided"


def test_review_round_trip_matches_ui_client_flow(review):
    """The exact request sequence the review UI issues, over the real service."""
    client, _ = review
    documents = client.get("/api/documents").json()
    assert documents[0]["document_id"] == "graphs"
    payload = client.get(
        "/api/documents/graphs/suggestions", params={"method": "count-unweighted"}
    ).json()
    top_two = [e["category_id"] for e in payload["entries"][:2]]
    for category_id in top_two:
        response = client.post(
            "/api/documents/graphs/decisions",
            json={"category_id": category_id, "verdict": "accepted"},
        )
        assert response.status_code == 200
    client.post(
        "/api/documents/graphs/decisions",
        json={"category_id": payload["entries"][2]["category_id"], "verdict": "rejected"},
    )
    added = "AL/Sorting/quicksort"  # from the guideline browser, outside top-K
    client.post(
        "/api/documents/graphs/decisions", json={"category_id": added, "verdict": "added"}
    )
    exported = client.get("/api/export").json()
    assert sorted(exported["graphs"]) == sorted(top_two + [added])
    assert len(exported["graphs"]) == 3
    assert payload["entries"][2]["category_id"] not in exported["graphs"]


def test_service_mounts_built_ui(tmp_path):
    import pytest as _pytest

    dist = Path(__file__).resolve().parent.parent / "frontend" / "dist"
    if not (dist / "index.html").exists():
        _pytest.skip("frontend not built; run npm run build in frontend/")
    guideline = parse_guideline(json.dumps(small_guideline_dict()))
    results = tmp_path / "results"
    results.mkdir()
    save_result(results, RankedClassification("d", "count-unweighted", []), 20)
    app = create_app(results, guideline, ui_dir=dist)
    client = TestClient(app)
    home = client.get("/")
    assert home.status_code == 200
    assert "<div id=\"app\">" in home.text
    bundle = client.get("/app.js")
    assert bundle.status_code == 200
    assert "suggestions" in bundle.text
