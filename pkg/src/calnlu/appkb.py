"""Application-specific interpretation rules.

This layer owns everything that is about the concrete calendar application
rather than the calendar domain: slot renaming, value formatting, the
business-hours window used to default an ambiguous am/pm hour, and the
required-slots table that drives elicitation.  Rules load from ``app.kb``.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field

from . import domain, sexpr
from .avm import ABSENT, Avm


class AppError(Exception):
    pass


class InvalidHour(AppError):
    pass


class _Ambiguous:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "AMBIGUOUS"


#: Returned by resolve_time when the business window cannot pick a meridiem.
AMBIGUOUS = _Ambiguous()


@dataclass(frozen=True)
class AppRules:
    rename: dict
    formats: dict
    window: tuple            # inclusive (lo, hi) business hours
    required: dict           # action -> tuple of required slot names

    def app_slot(self, domain_slot):
        return self.rename.get(domain_slot, domain_slot)


def load_app_rules(source):
    rename = {}
    formats = {}
    window = None
    required = {}
    for form, line in sexpr.parse(source):
        if not isinstance(form, list) or not form:
            raise AppError("line %d: expected a rule form" % line)
        head = str(form[0])
        if head == "rename":
            rename[str(form[1])] = str(form[2])
        elif head == "format":
            formats[str(form[1])] = str(form[2])
        elif head == "window":
            window = (int(form[1]), int(form[2]))
        elif head == "required":
            required[str(form[1])] = tuple(str(s) for s in form[2:])
        else:
            raise AppError("line %d: unknown rule kind %s" % (line, head))
    if window is None:
        raise AppError("app rules must define a business window")
    lo, hi = window
    if not 0 <= lo < hi <= 23:
        raise AppError("bad business window %d..%d" % (lo, hi))
    if len(set(rename.values())) != len(rename):
        raise AppError("rename map must be injective")
    return AppRules(rename=rename, formats=formats, window=window, required=required)


# ---------------------------------------------------------------------------
# Time resolution
# ---------------------------------------------------------------------------

_POD_MERIDIEM = {"morning": "am", "afternoon": "pm", "evening": "pm"}


def resolve_time(rules, time_avm, part_of_day=None):
    """Resolve an event_time AVM to a civil time, or AMBIGUOUS.

    A part-of-day answer always fixes the meridiem.  Otherwise the business
    window decides: between h and h+12, exactly one inside the window wins;
    both or neither inside means the caller has to ask.
    """
    if not isinstance(time_avm, Avm):
        raise InvalidHour("not a time value: %r" % (time_avm,))
    hour_avm = time_avm.get("hour")
    if not isinstance(hour_avm, Avm):
        raise InvalidHour("time without an hour: %s" % time_avm)
    hour = hour_avm.get("value")
    if not isinstance(hour, int):
        raise InvalidHour("hour without a numeric value: %s" % hour_avm)
    minute = time_avm.get("minute")
    minute = 0 if minute is ABSENT else int(minute)
    meridiem = hour_avm.get("meridiem")

    if meridiem is ABSENT:
        if not 0 <= hour <= 23:
            raise InvalidHour("explicit hour %d out of range" % hour)
        return _dt.time(hour, minute)
    if not 1 <= hour <= 12:
        raise InvalidHour("hour %d needs to be 1..12 with an am/pm marker" % hour)
    if meridiem == "am":
        return _dt.time(hour % 12, minute)
    if meridiem == "pm":
        return _dt.time(hour % 12 + 12, minute)
    if meridiem != "am_or_pm":
        raise InvalidHour("unknown meridiem marker %r" % (meridiem,))

    if part_of_day is not None:
        fixed = _POD_MERIDIEM.get(str(part_of_day))
        if fixed is None:
            raise InvalidHour("unknown part of day %r" % (part_of_day,))
        if fixed == "pm" and hour < 12:
            return _dt.time(hour + 12, minute)
        return _dt.time(hour, minute)

    lo, hi = rules.window
    candidates = [h for h in (hour, hour + 12) if lo <= h <= hi]
    if len(candidates) == 1:
        return _dt.time(candidates[0], minute)
    return AMBIGUOUS


def format_time(rules, value):
    # only one shipped format: 24-hour HH:MM
    return value.strftime("%H:%M")


def format_date(rules, value):
    # only one shipped format: ISO YYYY-MM-DD
    return value.isoformat()


# ---------------------------------------------------------------------------
# Application requests
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AppRequest:
    action: str
    params: dict
    pending: tuple

    @property
    def executable(self):
        return not self.pending


def to_app_request(rules, ontology, frame, today, part_of_day=None, store=None):
    """Translate a SlotFrame into an executable application request.

    ``pending`` lists every unmet requirement: missing required slots,
    an ambiguous meridiem, or an unresolvable event reference.  When a
    ``store`` is supplied, move/cancel references resolve against it by
    name-substring match.
    """
    pod = part_of_day if part_of_day is not None else frame.part_of_day
    params = {}
    pending = []

    if frame.event_name is not None:
        params[rules.app_slot("event_name")] = frame.event_name
    if frame.event_place is not None:
        params[rules.app_slot("event_place")] = frame.event_place
    if frame.participants:
        params[rules.app_slot("participants")] = tuple(frame.participants)
    if frame.event_duration is not None:
        params[rules.app_slot("event_duration")] = frame.event_duration

    if frame.event_date is not None:
        date = domain.normalize_date(ontology, frame.event_date, today)
        params[rules.app_slot("event_date")] = date

    resolved_time = None
    if frame.event_time is not None:
        resolved_time = resolve_time(rules, frame.event_time, pod)
        if resolved_time is AMBIGUOUS:
            pending.append("ambiguous_meridiem")
        else:
            params[rules.app_slot("event_time")] = resolved_time

    required = rules.required.get(frame.action_name, ())
    for slot in required:
        if slot in ("event_ref", "new_time"):
            continue  # resolved below
        if slot == "event_time":
            if frame.event_time is None:
                pending.append(slot)
        elif slot == "event_date":
            if frame.event_date is None:
                pending.append(slot)
        elif rules.app_slot(slot) not in params:
            pending.append(slot)

    if "event_ref" in required:
        # for cancel, a given date narrows the reference; for move it is the
        # new value, not part of the reference
        ref_date = params.get(rules.app_slot("event_date")) if frame.action_name == "cancel" else None
        ref = _resolve_event_ref(frame, store, ref_date)
        if ref == "missing":
            pending.append("event_ref")
        elif ref == "ambiguous":
            pending.append("event_ref_choice")
        else:
            params["event_id"] = ref
    if "new_time" in required:
        if resolved_time is not None and resolved_time is not AMBIGUOUS:
            params["new_time"] = resolved_time
        elif frame.event_date is not None and rules.app_slot("event_date") in params:
            params["new_date"] = params[rules.app_slot("event_date")]
        elif "ambiguous_meridiem" not in pending:
            pending.append("new_time")

    return AppRequest(action=frame.action_name, params=params, pending=tuple(pending))


def _resolve_event_ref(frame, store, ref_date=None):
    """Match an event reference by name substring (plus date, if given)."""
    if store is None or frame.event_name is None:
        return "missing"
    needle = frame.event_name.lower()
    for det in ("the ", "a ", "an ", "my "):
        if needle.startswith(det):
            needle = needle[len(det):]
            break
    matches = [ev for ev in store.all_events() if needle in ev.name.lower()]
    if ref_date is not None:
        matches = [ev for ev in matches if ev.date == ref_date]
    if not matches:
        return "missing"
    if len(matches) > 1:
        return "ambiguous"
    return matches[0].id
