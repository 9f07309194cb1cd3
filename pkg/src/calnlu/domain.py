"""Calendar-domain knowledge: ontology, attachment filters, interpreter.

The ontology holds application-independent facts (month lengths and order,
weekdays, a small sort hierarchy, action synonyms, parts of the day).  The
filter rules encode domain linguistics such as "places do not modify people";
the parser consults them before creating a modifier attachment.  The domain
interpreter maps a root message AVM onto a ``SlotFrame``.

Both the ontology and the filter rules load from ``calendar.kb`` (the same
s-expression dialect as the grammar file).
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field, replace

from . import sexpr
from .avm import ABSENT, Avm, Term
from .sexpr import Symbol


class DomainError(Exception):
    pass


class UnknownAction(DomainError):
    def __init__(self, verb):
        self.verb = verb
        super().__init__("unknown action %r" % (verb,))


class MalformedMessage(DomainError):
    pass


class InvalidDate(DomainError):
    pass


@dataclass(frozen=True)
class PartOfDay:
    name: str
    meridiem: str     # am | pm
    window: tuple     # representative (lo, hi) hours, 24h


class Ontology:
    def __init__(self, months, weekdays, sort_parent, synonyms, parts_of_day):
        # months: name -> (index0, days, successor name)
        self.months = months
        self.weekdays = weekdays
        self.sort_parent = dict(sort_parent)
        self.synonyms = dict(synonyms)
        self.parts_of_day = dict(parts_of_day)
        self._check_month_cycle()

    def _check_month_cycle(self):
        if len(self.months) != 12:
            raise DomainError("month table must have 12 entries")
        seen = set()
        name = next(iter(self.months))
        for _ in range(12):
            seen.add(name)
            name = self.months[name][2]
        if len(seen) != 12 or name not in seen:
            raise DomainError("month successors must form a 12-cycle")

    def month_index(self, name):
        if name not in self.months:
            raise InvalidDate("unknown month %r" % (name,))
        return self.months[name][0] + 1

    def days_in_month(self, name):
        if name not in self.months:
            raise InvalidDate("unknown month %r" % (name,))
        return self.months[name][1]

    def successor_month(self, name):
        return self.months[name][2]

    def weekday_index(self, name):
        try:
            return self.weekdays.index(name)
        except ValueError:
            raise InvalidDate("unknown weekday %r" % (name,))

    def ancestors(self, sort):
        """The sort itself plus everything above it in the hierarchy."""
        chain = []
        seen = set()
        while isinstance(sort, str) and sort not in seen:
            chain.append(sort)
            seen.add(sort)
            sort = self.sort_parent.get(sort)
        return chain

    def normalize_action(self, verb):
        if verb not in self.synonyms:
            raise UnknownAction(verb)
        return self.synonyms[verb]

    def sort_of(self, message):
        """The domain sort of a constituent message, for filter checks."""
        if not isinstance(message, Avm):
            return None
        if "action_object" in message or "a_type" in message:
            return "action"
        den = message.get("den")
        if isinstance(den, str) and den in self.sort_parent:
            return den
        mtype = message.get("type")
        if isinstance(mtype, Term):
            return mtype.head
        if isinstance(mtype, str):
            return mtype
        return None


class FilterSet:
    """Forbidden (modifier sort, head sort) pairs, closed over the hierarchy."""

    def __init__(self, ontology, rules, enabled=True):
        self.ontology = ontology
        self.rules = frozenset(rules)
        self.enabled = enabled

    def disabled(self):
        return FilterSet(self.ontology, self.rules, enabled=False)

    def check(self, modifier_sort, head_sort):
        """'allow' or 'veto'; unknown sorts allow."""
        if not self.enabled:
            return "allow"
        mods = self.ontology.ancestors(modifier_sort) or [modifier_sort]
        heads = self.ontology.ancestors(head_sort) or [head_sort]
        for m in mods:
            for h in heads:
                if (m, h) in self.rules:
                    return "veto"
        return "allow"

    def allows(self, modifier_message, head_message):
        mod = self.ontology.sort_of(modifier_message)
        head = self.ontology.sort_of(head_message)
        if mod is None or head is None:
            return True
        return self.check(mod, head) == "allow"


def check_filter(filters, modifier_sort, head_sort):
    return filters.check(modifier_sort, head_sort)


# ---------------------------------------------------------------------------
# KB loading
# ---------------------------------------------------------------------------


def load_knowledge(source):
    """Load (Ontology, FilterSet) from calendar.kb text."""
    months = {}
    weekdays = []
    sorts = {}
    synonyms = {}
    parts = {}
    rules = []
    for form, line in sexpr.parse(source):
        if not isinstance(form, list) or not form:
            raise DomainError("line %d: expected a fact form" % line)
        head = str(form[0])
        try:
            if head == "month":
                name, days, successor = str(form[1]), int(form[2]), str(form[3])
                months[name] = (len(months), days, successor)
            elif head == "weekdays":
                weekdays = [str(w) for w in form[1:]]
            elif head == "sort":
                sorts[str(form[1])] = str(form[2])
            elif head == "synonym":
                synonyms[str(form[1])] = str(form[2])
            elif head == "part_of_day":
                name = str(form[1])
                parts[name] = PartOfDay(name, str(form[2]), (int(form[3]), int(form[4])))
            elif head == "forbid":
                rules.append((str(form[1]), str(form[2])))
            else:
                raise DomainError("unknown fact kind %s" % head)
        except (IndexError, ValueError) as exc:
            raise DomainError("line %d: malformed %s fact: %s" % (line, head, exc))
    ontology = Ontology(months, weekdays, sorts, synonyms, parts)
    return ontology, FilterSet(ontology, rules)


# ---------------------------------------------------------------------------
# Slot frames and the domain interpreter
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SlotFrame:
    """Domain-level interpretation of one utterance."""

    action_name: str
    event_name: str | None = None
    event_date: Avm | None = None
    event_time: Avm | None = None
    event_place: str | None = None
    event_duration: int | None = None
    participants: tuple = ()
    part_of_day: str | None = None

    def to_avm(self):
        attrs = {"action_name": self.action_name}
        if self.event_name is not None:
            attrs["event_name"] = self.event_name
        if self.event_date is not None:
            attrs["event_date"] = self.event_date
        if self.event_time is not None:
            attrs["event_time"] = self.event_time
        if self.event_place is not None:
            attrs["event_place"] = self.event_place
        if self.event_duration is not None:
            attrs["event_duration"] = self.event_duration
        if self.participants:
            attrs["participants"] = tuple(self.participants)
        return Avm(attrs)


def _name_of(message):
    """Render a nominal message as surface-ish text: determiners + den."""
    den = message.get("den")
    if den is ABSENT:
        raise MalformedMessage("nominal message without den: %s" % message)
    words = []
    for mod in message.get("mods", ()):
        det = mod.get("det") if isinstance(mod, Avm) else ABSENT
        if det is not ABSENT:
            words.append(str(det))
    words.append(str(den))
    return " ".join(words)


def _unwrap(message):
    """Extract (verb sem_type, object message, modifier list) from a root message."""
    if not isinstance(message, Avm):
        raise MalformedMessage("root message is not an AVM")
    if message.get("sem_cat") == "command":
        verb = message.get("a_type")
        obj = message.get("a_obj")
        mods = message.get("mods", ())
    else:
        den = message.get("den")
        if not (isinstance(den, Term) and den.head == "want"):
            raise MalformedMessage("not a command or indirect request: %s" % message)
        action = message.get("action")
        if not isinstance(action, Avm):
            raise MalformedMessage("indirect request without action")
        verb = action.get("den")
        obj = action.get("action_object")
        mods = action.get("mods", ())
    if verb is ABSENT:
        raise MalformedMessage("message without an action type")
    return verb, obj, mods


def interpret(ontology, message):
    """Map a root message AVM onto a SlotFrame."""
    verb, obj, mods = _unwrap(message)
    frame = SlotFrame(action_name=ontology.normalize_action(verb))
    if isinstance(obj, Avm):
        obj_sort = ontology.sort_of(obj)
        if "person" in ontology.ancestors(obj_sort) or obj.get("type") == "person":
            # "meet my manager": a person object names a participant, not an event
            frame = replace(
                frame,
                participants=frame.participants + (_name_of(obj),),
                event_name="a meeting",
            )
        else:
            frame = replace(frame, event_name=_name_of(obj))
        for mod in obj.get("mods", ()):
            pp = mod.get("pp_msg") if isinstance(mod, Avm) else ABSENT
            if pp is not ABSENT:
                frame = _route_pp(ontology, frame, pp)
    for mod in mods:
        pp = mod.get("pp_msg") if isinstance(mod, Avm) else ABSENT
        if pp is not ABSENT:
            frame = _route_pp(ontology, frame, pp)
    return frame


def _route_pp(ontology, frame, pp):
    ptype = pp.get("type")
    den = pp.get("den")
    if isinstance(ptype, Term) and ptype.head == "time":
        return replace(frame, event_time=den)
    if ptype == "date":
        return replace(frame, event_date=den)
    if ptype == "part_of_day":
        return replace(frame, part_of_day=str(den))
    if ptype == "duration":
        return replace(frame, event_duration=int(den))
    sort = ontology.sort_of(pp)
    chain = ontology.ancestors(sort) if sort else []
    if "place" in chain or ptype == "place":
        return replace(frame, event_place=_name_of(pp))
    if "person" in chain or ptype == "person":
        return replace(frame, participants=frame.participants + (_name_of(pp),))
    raise MalformedMessage("cannot route modifier %s" % pp)


# ---------------------------------------------------------------------------
# Date normalization
# ---------------------------------------------------------------------------


def normalize_date(ontology, date_avm, today):
    """Resolve a date AVM (month/day, relative marker, or weekday) to a civil date.

    A month/day with no year resolves to the next occurrence not before
    today; a bare weekday resolves to the next occurrence strictly after
    today.
    """
    if not isinstance(date_avm, Avm):
        raise InvalidDate("not a date value: %r" % (date_avm,))
    rel = date_avm.get("rel")
    if rel is not ABSENT:
        if rel == "today":
            return today
        if rel == "tomorrow":
            return today + _dt.timedelta(days=1)
        raise InvalidDate("unknown relative date %r" % (rel,))
    weekday = date_avm.get("weekday")
    if weekday is not ABSENT:
        target = ontology.weekday_index(str(weekday))
        ahead = (target - today.weekday()) % 7
        return today + _dt.timedelta(days=ahead or 7)
    month = date_avm.get("month")
    day = date_avm.get("day")
    if month is ABSENT or day is ABSENT:
        raise InvalidDate("date needs month and day: %s" % date_avm)
    month = str(month)
    day = int(day)
    if not 1 <= day <= ontology.days_in_month(month):
        raise InvalidDate("%s has no day %d" % (month, day))
    month_num = ontology.month_index(month)
    year = date_avm.get("year")
    if year is not ABSENT:
        try:
            return _dt.date(int(year), month_num, day)
        except ValueError as exc:
            raise InvalidDate(str(exc))
    for candidate_year in range(today.year, today.year + 9):
        try:
            candidate = _dt.date(candidate_year, month_num, day)
        except ValueError:
            continue  # e.g. Feb 29 in a non-leap year
        if candidate >= today:
            return candidate
    raise InvalidDate("cannot resolve %s %d near %s" % (month, day, today))
