from __future__ import annotations

import threading
import time

import pytest
from fastapi.testclient import TestClient

from tutor_engine.cycle import FixedClock
from tutor_engine.persistence import METRICS, aggregate_metrics
from tutor_engine.runtime import TutorRuntime
from tutor_engine.service import create_app

from conftest import (
    FIXTURES,
    GOLDEN_TURN_1,
    GOLDEN_TURN_2,
    SAMPLE_CORPUS,
    golden_config,
    make_runtime,
)


@pytest.fixture
def client(golden_runtime) -> TestClient:
    return TestClient(create_app(golden_runtime))


def new_session(client: TestClient, learner_id: str = "learner-1") -> str:
    resp = client.post(
        "/api/sessions",
        json={"learner_id": learner_id, "role": "Student", "familiarity": "Occasional"},
    )
    assert resp.status_code == 201
    return resp.json()["session_id"]


# --- session creation -----------------------------------------------------------


def test_create_session_returns_201_and_id(client):
    sid = new_session(client)
    assert len(sid) == 32


def test_unknown_role_is_400_with_error_code(client):
    resp = client.post(
        "/api/sessions",
        json={"learner_id": "x", "role": "Wizard", "familiarity": "None"},
    )
    assert resp.status_code == 400
    body = resp.json()
    assert body["error"] == "invalid_enum"
    assert "message" in body


def test_duplicate_learner_id_gets_fresh_session(client):
    a = new_session(client, "same-learner")
    b = new_session(client, "same-learner")
    assert a != b


# --- messages ---------------------------------------------------------------------


def test_golden_dialogue_over_http(client):
    sid = new_session(client)
    r1 = client.post(f"/api/sessions/{sid}/messages", json={"text": GOLDEN_TURN_1})
    assert r1.status_code == 200
    body1 = r1.json()
    assert body1["trace"]["intent"] == "NewInquiry"
    assert [s["title"] for s in body1["plan_snapshot"]["steps"]] == [
        "Definitions & Vectors",
        "Baseline Hygiene",
        "Anti-malware Tools",
        "Layered Defenses",
        "Incident Response",
    ]
    assert body1["scaffold_used"] == "HighSupport"
    assert body1["check"] is not None
    assert body1["citations"]
    assert body1["citation_details"][0]["title"]

    r2 = client.post(f"/api/sessions/{sid}/messages", json={"text": GOLDEN_TURN_2})
    assert r2.status_code == 200
    body2 = r2.json()
    assert body2["trace"]["intent"] == "ResponseToScaffold"
    assert body2["trace"]["plan_action"] == "AdvancedWithinStep"
    assert body2["scaffold_used"] == "Guided"
    assert body2["plan_snapshot"]["steps"][0]["status"] == "Active"


def test_message_to_unknown_session_is_404(client):
    resp = client.post("/api/sessions/feedbeef/messages", json={"text": "hi"})
    assert resp.status_code == 404
    assert resp.json()["error"] == "not_found"


def test_empty_text_is_422(client):
    sid = new_session(client)
    resp = client.post(f"/api/sessions/{sid}/messages", json={"text": "   "})
    assert resp.status_code == 422
    assert resp.json()["error"] == "empty_message"


def test_unscripted_request_maps_to_502_and_leaves_session_unchanged(client):
    sid = new_session(client)
    before = client.get(f"/api/sessions/{sid}").json()
    resp = client.post(
        f"/api/sessions/{sid}/messages",
        json={"text": "completely unscripted topic nothing matches"},
    )
    assert resp.status_code == 502
    assert resp.json()["error"] == "gateway_failure"
    after = client.get(f"/api/sessions/{sid}").json()
    assert after == before


def test_concurrent_turn_gets_409(golden_runtime):
    app = create_app(golden_runtime)
    release = threading.Event()
    started = threading.Event()
    inner = golden_runtime.provider.complete

    def slow_complete(bundle):
        started.set()
        release.wait(timeout=10)
        return inner(bundle)

    golden_runtime.provider.complete = slow_complete  # type: ignore[attr-defined]
    client_a, client_b = TestClient(app), TestClient(app)
    sid_resp = client_a.post(
        "/api/sessions",
        json={"learner_id": "x", "role": "Student", "familiarity": "None"},
    )
    sid = sid_resp.json()["session_id"]

    results: dict[str, int] = {}

    def first_turn():
        results["first"] = client_a.post(
            f"/api/sessions/{sid}/messages", json={"text": GOLDEN_TURN_1}
        ).status_code

    t = threading.Thread(target=first_turn)
    t.start()
    assert started.wait(timeout=10)
    second = client_b.post(f"/api/sessions/{sid}/messages", json={"text": GOLDEN_TURN_1})
    release.set()
    t.join(timeout=30)
    assert second.status_code == 409
    assert second.json()["error"] == "turn_in_flight"
    assert results["first"] == 200


# --- plan and session views ---------------------------------------------------------


def test_plan_view_is_null_before_any_plan(client):
    sid = new_session(client)
    resp = client.get(f"/api/sessions/{sid}/plan")
    assert resp.status_code == 200
    assert resp.json()["plan"] is None


def test_plan_view_shows_statuses_after_creation(client):
    sid = new_session(client)
    client.post(f"/api/sessions/{sid}/messages", json={"text": GOLDEN_TURN_1})
    plan = client.get(f"/api/sessions/{sid}/plan").json()["plan"]
    assert len(plan["steps"]) == 5
    assert plan["steps"][0]["status"] == "Active"
    assert {s["status"] for s in plan["steps"][1:]} == {"Pending"}


def test_plan_revision_increments_after_remedial_insertion(tmp_path):
    runtime = make_runtime(tmp_path / "d", script_path=FIXTURES / "ext_dialogue", ingest=False)
    client = TestClient(create_app(runtime))
    sid = new_session(client)
    for text in [
        "How do ransomware attacks unfold?",
        "It encrypts files and demands payment, usually stealing data first.",
        "I think phishing emails mostly?",
        "No idea honestly.",
        "Still lost.",
    ]:
        resp = client.post(f"/api/sessions/{sid}/messages", json={"text": text})
        assert resp.status_code == 200
    plan = client.get(f"/api/sessions/{sid}/plan").json()["plan"]
    assert plan["revision"] == 1
    assert any(s["title"].startswith("Remediation:") for s in plan["steps"])


def test_session_view_joins_agent_texts(client):
    sid = new_session(client)
    client.post(f"/api/sessions/{sid}/messages", json={"text": GOLDEN_TURN_1})
    view = client.get(f"/api/sessions/{sid}").json()
    assert view["scaffold_phase"] == "I Do"
    assert len(view["messages"]) == 1
    message = view["messages"][0]
    assert message["user_message"] == GOLDEN_TURN_1
    assert "Check for Understanding:" in message["agent_text"]
    assert view["pending_check"] is not None


def test_get_unknown_session_is_404(client):
    assert client.get("/api/sessions/nope").status_code == 404
    assert client.get("/api/sessions/nope/plan").status_code == 404


# --- feedback -----------------------------------------------------------------------


def test_full_feedback_round_trip(client, golden_runtime):
    sid = new_session(client)
    resp = client.post(
        f"/api/sessions/{sid}/feedback",
        json={"ratings": {m: 5 for m in METRICS}, "free_text": "great"},
    )
    assert resp.status_code == 204
    records = golden_runtime.store.scan_feedback()
    assert len(records) == 1
    assert set(records[0].ratings) == set(METRICS)


def test_out_of_range_rating_is_400(client):
    sid = new_session(client)
    resp = client.post(f"/api/sessions/{sid}/feedback", json={"ratings": {"accuracy": 6}})
    assert resp.status_code == 400
    assert resp.json()["error"] == "invalid_rating"


def test_unknown_metric_is_400(client):
    sid = new_session(client)
    resp = client.post(f"/api/sessions/{sid}/feedback", json={"ratings": {"speed": 5}})
    assert resp.status_code == 400
    assert resp.json()["error"] == "invalid_rating"


def test_subset_of_metrics_is_accepted_and_aggregates_per_metric(client, golden_runtime):
    sid = new_session(client)
    assert (
        client.post(
            f"/api/sessions/{sid}/feedback", json={"ratings": {"accuracy": 4}}
        ).status_code
        == 204
    )
    assert (
        client.post(
            f"/api/sessions/{sid}/feedback",
            json={"ratings": {"accuracy": 5, "relevance": 3}},
        ).status_code
        == 204
    )
    summaries = {s.metric: s for s in aggregate_metrics(golden_runtime.store.scan_feedback())}
    assert summaries["accuracy"].n == 2
    assert summaries["relevance"].n == 1
    assert "visual_appeal" not in summaries


# --- ingest -------------------------------------------------------------------------


def test_ingest_endpoint_counts_docs_and_chunks(tmp_path):
    runtime = make_runtime(tmp_path / "d", ingest=False)
    client = TestClient(create_app(runtime))
    resp = client.post("/api/admin/ingest", json={"path": str(SAMPLE_CORPUS)})
    assert resp.status_code == 200
    body = resp.json()
    assert body["docs"] == 3
    assert body["chunks"] > 0


def test_reingest_is_deterministic(tmp_path):
    runtime = make_runtime(tmp_path / "d", ingest=False)
    client = TestClient(create_app(runtime))
    client.post("/api/admin/ingest", json={"path": str(SAMPLE_CORPUS)})
    first = [c.chunk_id for c in runtime.current_index().chunks]
    client.post("/api/admin/ingest", json={"path": str(SAMPLE_CORPUS)})
    second = [c.chunk_id for c in runtime.current_index().chunks]
    assert first == second


def test_ingest_missing_dir_is_400(client):
    resp = client.post("/api/admin/ingest", json={"path": "/nonexistent/corpus"})
    assert resp.status_code == 400
    assert resp.json()["error"] == "bad_path"


# --- statelessness --------------------------------------------------------------------


def test_restart_between_requests_preserves_responses(tmp_path):
    data_dir = tmp_path / "d"
    runtime = make_runtime(data_dir)
    client = TestClient(create_app(runtime))
    sid = new_session(client)
    client.post(f"/api/sessions/{sid}/messages", json={"text": GOLDEN_TURN_1})
    before_view = client.get(f"/api/sessions/{sid}").json()
    before_plan = client.get(f"/api/sessions/{sid}/plan").json()

    # simulate a full service restart on the same data directory
    runtime2 = TutorRuntime(golden_config(data_dir), clock=FixedClock())
    client2 = TestClient(create_app(runtime2))
    assert client2.get(f"/api/sessions/{sid}").json() == before_view
    assert client2.get(f"/api/sessions/{sid}/plan").json() == before_plan
