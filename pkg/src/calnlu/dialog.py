"""Session-level discourse management.

Maintains the context the parser consults (speaker, hearer, previous
utterance), elicits missing or ambiguous parameters with fixed question
templates, coerces fragment answers through the pending question, and
executes completed requests against the calendar.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import appkb
from .avm import Avm, Term
from .domain import DomainError, SlotFrame, interpret
from .parsing import parse, tokenize

#: Fixed elicitation templates; the first three are quoted verbatim in tests.
QUESTION_TEXT = {
    "wh_date_time": "At what time and date?",
    "wh_time": "At what time?",
    "wh_date": "On what date?",
    "meridiem_choice": "Morning or afternoon?",
    "event_ref_choice": "Which event do you mean?",
    "confirm_change": "Should I change it? (yes or no)",
}

REPHRASE = "I did not understand that. Could you rephrase?"


@dataclass(frozen=True)
class PendingQuestion:
    kind: str
    frame: SlotFrame
    part_of_day: str | None = None
    slot: str | None = None      # confirm_change only
    new_value: object = None     # confirm_change only


@dataclass
class DiscourseContext:
    sr: str = "user"
    lang_code: str = "english"
    lang_channel: str = "text"
    p_utter: Term | None = None
    pending: PendingQuestion | None = None

    def to_avm(self):
        attrs = {
            "hr": Avm(attends=self.sr),
            "sr": self.sr,
            "lang_code": self.lang_code,
            "lang_channel": self.lang_channel,
        }
        if self.p_utter is not None:
            attrs["p_utter"] = Avm(cons_n=self.p_utter)
        return Avm(attrs)


@dataclass(frozen=True)
class DialogTurn:
    user_text: str
    reply: str
    frame: SlotFrame | None = None
    executed: bool = False
    events_changed: tuple = ()
    pending_kind: str | None = None


def update_context(ctx, cons_name):
    """Record the construction name of the turn that just happened."""
    ctx.p_utter = cons_name
    return ctx


def next_question(pending_slots):
    """Map unmet requirements to a question kind and its fixed reply text."""
    slots = set(pending_slots)
    wants_time = bool(slots & {"event_time", "new_time"})
    if "event_date" in slots and wants_time:
        kind = "wh_date_time"
    elif wants_time:
        kind = "wh_time"
    elif "event_date" in slots:
        kind = "wh_date"
    elif "ambiguous_meridiem" in slots:
        kind = "meridiem_choice"
    elif slots & {"event_ref", "event_ref_choice"}:
        kind = "event_ref_choice"
    else:
        kind = "event_ref_choice"
    return kind, QUESTION_TEXT[kind]


def interpret_fragment(ctx, messages):
    """Coerce fragment readings through the pending question's kind.

    Returns a slot-contribution dict; empty when no reading is consistent
    with the question that was asked.
    """
    pending = ctx.pending
    if pending is None:
        return {}
    kind = pending.kind
    for message in messages:
        if not isinstance(message, Avm):
            continue
        if kind == "confirm_change":
            tv = message.get("truth_value")
            if isinstance(tv, int):
                return {"truth_value": tv}
            continue
        mtype = message.get("type")
        if isinstance(mtype, Term) and mtype.head == "time":
            if kind in ("wh_date_time", "wh_time"):
                return {"event_time": message.get("den")}
        elif mtype == "date":
            if kind in ("wh_date_time", "wh_date"):
                return {"event_date": message.get("den")}
        elif mtype == "part_of_day":
            if kind == "meridiem_choice":
                return {"part_of_day": str(message.get("den"))}
        elif kind == "event_ref_choice" and "den" in message:
            words = [
                str(mod.get("det"))
                for mod in message.get("mods", ())
                if isinstance(mod, Avm) and "det" in mod
            ]
            words.append(str(message.get("den")))
            return {"event_name": " ".join(words)}
    return {}


class DialogSession:
    """One user's dialog: a discourse context plus the shared engine."""

    def __init__(self, engine):
        self.engine = engine
        self.ctx = DiscourseContext()
        self.trace = []

    def handle_utterance(self, text):
        tokens = tokenize(text)
        parses = (
            parse(self.engine.grammar, self.engine.filters, self.ctx.to_avm(), tokens)
            if tokens
            else []
        )
        if self.engine.config.trace:
            self.trace.append((text, [(repr(n), m) for n, m in parses]))

        commands = self._commands(parses)
        if commands:
            name, frame = commands[0]
            self.ctx.pending = None  # a fresh command abandons any pending frame
            return self._advance(text, frame, name, frame.part_of_day)

        if self.ctx.pending is not None:
            fragments = [m for n, m in parses if n.head == "fragment"]
            contribution = interpret_fragment(self.ctx, fragments)
            if contribution:
                frag_name = next(n for n, m in parses if n.head == "fragment")
                return self._apply(text, contribution, frag_name)
            if fragments or parses:
                # parsed, but inconsistent with the question asked: re-ask
                return self._reask(text)

        return DialogTurn(user_text=text, reply=REPHRASE,
                          pending_kind=self.ctx.pending.kind if self.ctx.pending else None)

    # -- internals -----------------------------------------------------------

    def _commands(self, parses):
        ranked = []
        for name, message in parses:
            if name.head != "sent":
                continue
            try:
                frame = interpret(self.engine.ontology, message)
            except DomainError:
                continue
            ranked.append((name, frame))
        ranked.sort(key=lambda item: self.engine._rank(item[1]))
        return ranked

    def _reask(self, text):
        kind = self.ctx.pending.kind
        update_context(self.ctx, Term("sent", ("ques", kind)))
        return DialogTurn(user_text=text, reply=QUESTION_TEXT[kind], pending_kind=kind)

    def _apply(self, text, contribution, frag_name):
        pending = self.ctx.pending
        frame = pending.frame
        pod = pending.part_of_day

        if "truth_value" in contribution:
            if contribution["truth_value"]:
                frame, pod = self._merge_slot(frame, pod, pending.slot, pending.new_value)
            self.ctx.pending = None
            return self._advance(text, frame, frag_name, pod)

        (slot, value), = contribution.items()
        current = getattr(frame, slot) if slot != "part_of_day" else pod
        if current is not None and current != value:
            # monotone slot policy: never overwrite silently
            question = PendingQuestion(
                kind="confirm_change", frame=frame, part_of_day=pod,
                slot=slot, new_value=value,
            )
            self.ctx.pending = question
            update_context(self.ctx, Term("sent", ("ques", "confirm_change")))
            return DialogTurn(user_text=text, reply=QUESTION_TEXT["confirm_change"],
                              pending_kind="confirm_change")
        frame, pod = self._merge_slot(frame, pod, slot, value)
        self.ctx.pending = None
        return self._advance(text, frame, frag_name, pod)

    def _merge_slot(self, frame, pod, slot, value):
        if slot == "part_of_day":
            return frame, value
        return replace(frame, **{slot: value}), pod

    def _advance(self, text, frame, cons_name, pod):
        engine = self.engine
        try:
            request = appkb.to_app_request(
                engine.rules, engine.ontology, frame, engine.today,
                part_of_day=pod, store=engine.store,
            )
        except appkb.AppError as exc:
            update_context(self.ctx, cons_name)
            return DialogTurn(user_text=text, reply="Sorry, %s." % exc, frame=frame)
        if request.pending:
            kind, reply = next_question(request.pending)
            self.ctx.pending = PendingQuestion(kind=kind, frame=frame, part_of_day=pod)
            update_context(self.ctx, Term("sent", ("ques", kind)))
            return DialogTurn(user_text=text, reply=reply, frame=frame, pending_kind=kind)
        reply, changed = self._execute(request)
        self.ctx.pending = None
        update_context(self.ctx, cons_name)
        return DialogTurn(user_text=text, reply=reply, frame=frame,
                          executed=True, events_changed=changed)

    def _execute(self, request):
        engine = self.engine
        store = engine.store
        params = request.params
        if request.action == "schedule":
            event, warnings = store.schedule(
                name=params.get("event_name", "a meeting"),
                date=params["event_date"],
                time=params["event_time"],
                duration=params.get("duration", 60),
                place=params.get("event_place"),
                participants=params.get("participants", ()),
            )
            reply = 'Scheduled "%s" on %s at %s' % (
                event.name, event.date.isoformat(), event.time.strftime("%H:%M"),
            )
            if event.place:
                reply += " in %s" % event.place
            if event.participants:
                reply += " with %s" % ", ".join(event.participants)
            reply += "."
            if warnings:
                reply += " Warning: %s." % "; ".join(warnings)
        elif request.action == "move":
            event = store.move(
                params["event_id"],
                date=params.get("new_date"),
                time=params.get("new_time"),
            )
            reply = 'Moved "%s" to %s at %s.' % (
                event.name, event.date.isoformat(), event.time.strftime("%H:%M"),
            )
        elif request.action == "cancel":
            event = store.cancel(params["event_id"])
            reply = 'Cancelled "%s".' % event.name
        else:
            return "Sorry, I cannot do that.", ()
        engine.save_store()
        return reply, (event.id,)


def replay(engine, transcript_text):
    """Run the U: lines of a transcript; compare byte-for-byte with S: lines.

    Returns a list of (user line, expected reply, actual reply, ok) tuples.
    """
    session = engine.new_session()
    results = []
    lines = [ln for ln in transcript_text.splitlines() if ln.strip()]
    i = 0
    while i < len(lines):
        if not lines[i].startswith("U: "):
            raise ValueError("transcript line %d: expected a U: line" % (i + 1))
        user = lines[i][3:]
        expected = None
        if i + 1 < len(lines) and lines[i + 1].startswith("S: "):
            expected = lines[i + 1][3:]
            i += 2
        else:
            i += 1
        actual = session.handle_utterance(user).reply
        results.append((user, expected, actual, expected is None or expected == actual))
    return results
