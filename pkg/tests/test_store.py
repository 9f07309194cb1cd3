import datetime

import pytest

from calnlu.store import CalendarEvent, EventStore, StoreError, UnknownEvent

D1 = datetime.date(1994, 8, 30)
D2 = datetime.date(1994, 8, 31)


def test_schedule_assigns_sequential_ids():
    store = EventStore()
    e1, _ = store.schedule("a meeting", D1, datetime.time(20, 0))
    e2, _ = store.schedule("a demo", D2, datetime.time(9, 0))
    assert (e1.id, e2.id) == ("ev1", "ev2")
    assert len(store) == 2


def test_overlap_warns_but_never_blocks():
    store = EventStore()
    store.schedule("a meeting", D1, datetime.time(20, 0), duration=60)
    _, warnings = store.schedule("a call", D1, datetime.time(20, 30))
    assert warnings and "a meeting" in warnings[0]
    _, no_warnings = store.schedule("a review", D1, datetime.time(21, 30))
    assert no_warnings == []  # back-to-back is not an overlap
    assert len(store) == 3


def test_schedule_cancel_round_trip_restores_equality():
    store = EventStore()
    store.schedule("a meeting", D1, datetime.time(20, 0))
    snapshot = EventStore()
    snapshot.schedule("a meeting", D1, datetime.time(20, 0))
    event, _ = store.schedule("a demo", D2, datetime.time(9, 0))
    store.cancel(event.id)
    assert store == snapshot


def test_move_preserves_count_and_reindexes():
    store = EventStore()
    event, _ = store.schedule("a meeting", D1, datetime.time(20, 0))
    moved = store.move(event.id, date=D2, time=datetime.time(9, 0))
    assert len(store) == 1
    assert moved.date == D2 and moved.time == datetime.time(9, 0)
    assert store.query(D1, D1) == []
    assert [e.id for e in store.query(D2, D2)] == [event.id]


def test_query_sorted_and_bounded():
    store = EventStore()
    store.schedule("b", D2, datetime.time(9, 0))
    store.schedule("a", D1, datetime.time(20, 0))
    store.schedule("c", D1, datetime.time(8, 0))
    all_events = store.query()
    assert [(e.date, e.time) for e in all_events] == sorted(
        (e.date, e.time) for e in all_events
    )
    assert [e.name for e in store.query(D1, D1)] == ["c", "a"]
    assert store.query(datetime.date(2000, 1, 1), datetime.date(2000, 12, 31)) == []


def test_unknown_event_errors():
    store = EventStore()
    with pytest.raises(UnknownEvent):
        store.get("ev9")
    with pytest.raises(UnknownEvent):
        store.cancel("ev9")
    with pytest.raises(UnknownEvent):
        store.move("ev9", time=datetime.time(9, 0))


def test_duration_must_be_positive():
    with pytest.raises(StoreError):
        CalendarEvent("ev1", "x", D1, datetime.time(9, 0), duration=0)


def test_persistence_round_trip(tmp_path):
    path = str(tmp_path / "calendar.events")
    store = EventStore()
    store.schedule("a meeting", D1, datetime.time(20, 0), place="my office",
                   participants=("bob", "alice"))
    store.schedule("a demo", D2, datetime.time(9, 30), duration=30)
    store.save(path)
    loaded = EventStore.load(path)
    assert loaded == store
    # id counter continues after the highest persisted id
    event, _ = loaded.schedule("a call", D2, datetime.time(11, 0))
    assert event.id == "ev3"


def test_load_missing_file_is_empty(tmp_path):
    store = EventStore.load(str(tmp_path / "nope.events"))
    assert len(store) == 0


def test_load_rejects_malformed_lines(tmp_path):
    path = tmp_path / "bad.events"
    path.write_text("ev1|too|few\n")
    with pytest.raises(StoreError):
        EventStore.load(str(path))
