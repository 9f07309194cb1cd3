"""HTTP session API: dialog sessions over JSON, plus calendar reads.

The service wraps one shared ``Engine``.  Each session owns a dialog
manager; utterances within a session are serialized with a per-session
lock, and calendar mutation is additionally serialized engine-wide.
"""

from __future__ import annotations

import datetime as _dt
import threading
import uuid

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .avm import to_text


class UtteranceIn(BaseModel):
    text: str


def _event_payload(event):
    return {
        "id": event.id,
        "name": event.name,
        "date": event.date.isoformat(),
        "time": event.time.strftime("%H:%M"),
        "duration": event.duration,
        "place": event.place,
        "participants": list(event.participants),
    }


def create_app(engine):
    app = FastAPI(title="calendar dialog service")
    sessions = {}
    locks = {}
    registry_lock = threading.Lock()
    store_lock = threading.Lock()

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session():
        session_id = uuid.uuid4().hex
        with registry_lock:
            sessions[session_id] = engine.new_session()
            locks[session_id] = threading.Lock()
        return {"session_id": session_id}

    @app.post("/sessions/{session_id}/utterances")
    def post_utterance(session_id: str, body: UtteranceIn):
        with registry_lock:
            session = sessions.get(session_id)
            lock = locks.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        if not body.text.strip():
            raise HTTPException(status_code=400, detail="empty text")
        with lock, store_lock:
            turn = session.handle_utterance(body.text)
        return {
            "reply": turn.reply,
            "pending": turn.pending_kind,
            "frame": to_text(turn.frame.to_avm()) if turn.frame is not None else None,
            "executed": turn.executed,
            "events_changed": list(turn.events_changed),
        }

    @app.get("/calendar/events")
    def get_events(start: str | None = None, end: str | None = None):
        try:
            start_date = _dt.date.fromisoformat(start) if start else None
            end_date = _dt.date.fromisoformat(end) if end else None
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if start_date and end_date and start_date > end_date:
            raise HTTPException(status_code=400, detail="start is after end")
        with store_lock:
            events = engine.store.query(start_date, end_date)
        return [_event_payload(ev) for ev in events]

    return app
