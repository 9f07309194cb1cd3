"""The calendar backend: a persistent event store.

Supports the three operations the dialog needs -- schedule, move, cancel --
plus range queries.  Persistence is a single human-readable file with one
pipe-delimited record per line, written with an atomic replace:

    id|name|YYYY-MM-DD|HH:MM|duration_min|place|participant,participant
"""

from __future__ import annotations

import datetime as _dt
import os
import tempfile
from dataclasses import dataclass, replace


class StoreError(Exception):
    pass


class UnknownEvent(StoreError):
    def __init__(self, event_id):
        self.event_id = event_id
        super().__init__("unknown event id %r" % (event_id,))


@dataclass(frozen=True)
class CalendarEvent:
    id: str
    name: str
    date: _dt.date
    time: _dt.time
    duration: int = 60
    place: str | None = None
    participants: tuple = ()

    def __post_init__(self):
        if self.duration <= 0:
            raise StoreError("duration must be positive")

    def end_minute(self):
        return self.time.hour * 60 + self.time.minute + self.duration

    def start_minute(self):
        return self.time.hour * 60 + self.time.minute


class EventStore:
    def __init__(self):
        self._events = {}
        self._by_date = {}
        self._counter = 0

    def _next_id(self):
        self._counter += 1
        return "ev%d" % self._counter

    def _index(self, event):
        self._by_date.setdefault(event.date, []).append(event.id)

    def _unindex(self, event):
        ids = self._by_date.get(event.date, [])
        if event.id in ids:
            ids.remove(event.id)
        if not ids:
            self._by_date.pop(event.date, None)

    def get(self, event_id):
        if event_id not in self._events:
            raise UnknownEvent(event_id)
        return self._events[event_id]

    def all_events(self):
        return sorted(self._events.values(), key=lambda e: (e.date, e.time, e.id))

    def schedule(self, name, date, time, duration=60, place=None, participants=()):
        """Store a new event; overlapping events warn but never block."""
        event = CalendarEvent(
            id=self._next_id(),
            name=name,
            date=date,
            time=time,
            duration=duration,
            place=place,
            participants=tuple(participants),
        )
        warnings = []
        for other_id in self._by_date.get(date, []):
            other = self._events[other_id]
            if event.start_minute() < other.end_minute() and other.start_minute() < event.end_minute():
                warnings.append(
                    "overlaps %r at %s" % (other.name, other.time.strftime("%H:%M"))
                )
        self._events[event.id] = event
        self._index(event)
        return event, warnings

    def move(self, event_id, date=None, time=None):
        event = self.get(event_id)
        self._unindex(event)
        moved = replace(event, date=date or event.date, time=time or event.time)
        self._events[event_id] = moved
        self._index(moved)
        return moved

    def cancel(self, event_id):
        event = self.get(event_id)
        self._unindex(event)
        del self._events[event_id]
        return event

    def query(self, start=None, end=None):
        """Events with start <= date <= end, sorted by (date, time)."""
        out = []
        for event in self._events.values():
            if start is not None and event.date < start:
                continue
            if end is not None and event.date > end:
                continue
            out.append(event)
        out.sort(key=lambda e: (e.date, e.time, e.id))
        return out

    def __eq__(self, other):
        return isinstance(other, EventStore) and set(self._events.values()) == set(
            other._events.values()
        )

    def __len__(self):
        return len(self._events)

    # -- persistence --------------------------------------------------------

    def save(self, path):
        lines = []
        for event in self.all_events():
            lines.append(
                "|".join(
                    [
                        event.id,
                        event.name,
                        event.date.isoformat(),
                        event.time.strftime("%H:%M"),
                        str(event.duration),
                        event.place or "",
                        ",".join(event.participants),
                    ]
                )
            )
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".calstore-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write("\n".join(lines) + ("\n" if lines else ""))
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, path):
        store = cls()
        if not os.path.exists(path):
            return store
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                fields = line.split("|")
                if len(fields) != 7:
                    raise StoreError("%s:%d: expected 7 fields" % (path, lineno))
                ident, name, date_s, time_s, dur_s, place, parts = fields
                event = CalendarEvent(
                    id=ident,
                    name=name,
                    date=_dt.date.fromisoformat(date_s),
                    time=_dt.time.fromisoformat(time_s),
                    duration=int(dur_s),
                    place=place or None,
                    participants=tuple(p for p in parts.split(",") if p),
                )
                store._events[event.id] = event
                store._index(event)
                if event.id.startswith("ev") and event.id[2:].isdigit():
                    store._counter = max(store._counter, int(event.id[2:]))
        return store
