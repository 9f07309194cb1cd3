import pytest
from fastapi.testclient import TestClient

from calnlu.dialog import replay
from calnlu.engine import data_path
from calnlu.service import create_app

from conftest import make_engine

TURNS = [
    "Schedule a meeting with Bob!",
    "On August 30th.",
    "At 8.",
    "In the evening.",
]


@pytest.fixture
def client():
    return TestClient(create_app(make_engine()))


def _utter(client, session_id, text):
    return client.post(f"/sessions/{session_id}/utterances", json={"text": text})


def test_healthz(client):
    response = client.get("/healthz")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_sessions_get_distinct_ids(client):
    first = client.post("/sessions")
    second = client.post("/sessions")
    assert first.status_code == 201 and second.status_code == 201
    assert first.json()["session_id"] != second.json()["session_id"]


def test_unknown_session_404_and_empty_text_400(client):
    assert _utter(client, "nope", "hi").status_code == 404
    sid = client.post("/sessions").json()["session_id"]
    assert _utter(client, sid, "   ").status_code == 400


def test_full_dialog_and_calendar(client):
    sid = client.post("/sessions").json()["session_id"]
    payloads = [_utter(client, sid, text).json() for text in TURNS]
    assert payloads[0]["reply"] == "At what time and date?"
    assert payloads[0]["pending"] == "wh_date_time"
    assert payloads[1]["pending"] == "wh_time"
    assert payloads[2]["pending"] == "meridiem_choice"
    final = payloads[3]
    assert final["executed"]
    assert final["events_changed"] == ["ev1"]
    assert final["pending"] is None

    events = client.get("/calendar/events").json()
    assert len(events) == 1
    assert events[0]["date"] == "1994-08-30"
    assert events[0]["time"] == "20:00"
    assert events[0]["participants"] == ["bob"]

    ranged = client.get(
        "/calendar/events", params={"start": "1994-08-01", "end": "1994-08-31"}
    ).json()
    assert ranged == events
    empty = client.get(
        "/calendar/events", params={"start": "1995-01-01", "end": "1995-12-31"}
    ).json()
    assert empty == []


def test_bad_range_400(client):
    assert client.get("/calendar/events", params={"start": "not-a-date"}).status_code == 400
    assert (
        client.get(
            "/calendar/events", params={"start": "1994-09-01", "end": "1994-08-01"}
        ).status_code
        == 400
    )


def test_api_replies_equal_cli_replay():
    engine = make_engine()
    with open(data_path("dialog_transcript.txt"), encoding="utf-8") as fh:
        expected = [actual for _, _, actual, _ in replay(make_engine(), fh.read())]
    client = TestClient(create_app(engine))
    sid = client.post("/sessions").json()["session_id"]
    replies = [_utter(client, sid, text).json()["reply"] for text in TURNS]
    assert replies == expected


def test_sessions_are_isolated():
    client = TestClient(create_app(make_engine()))
    a = client.post("/sessions").json()["session_id"]
    b = client.post("/sessions").json()["session_id"]
    replies_a, replies_b = [], []
    for text in TURNS:
        replies_a.append(_utter(client, a, text).json()["reply"])
        replies_b.append(_utter(client, b, text).json()["reply"])
    # interleaving never cross-contaminates the pending frames
    assert replies_a[:3] == replies_b[:3]
    assert replies_a[-1].startswith('Scheduled "a meeting" on 1994-08-30 at 20:00')
    # the calendar is shared, so the second booking warns about the first
    assert replies_b[-1].startswith('Scheduled "a meeting" on 1994-08-30 at 20:00')
    assert "overlaps" in replies_b[-1]
    assert len(client.get("/calendar/events").json()) == 2
