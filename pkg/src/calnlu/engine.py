"""Assembly of the full pipeline: grammar + knowledge bases + calendar.

``EngineConfig`` points at the data files (defaulting to the shipped ones)
and carries the runtime switches; ``Engine`` loads everything once and
offers parse/interpret entry points shared by the CLI, the dialog manager
and the HTTP service.
"""

from __future__ import annotations

import datetime as _dt
import os
from dataclasses import dataclass, field, replace

from . import appkb, domain, grammar as grammar_mod, parsing
from .avm import Avm
from .domain import interpret
from .store import EventStore

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def data_path(name):
    return os.path.join(DATA_DIR, name)


class DataFileError(Exception):
    """A grammar or knowledge-base file failed to load."""


@dataclass
class EngineConfig:
    grammar_path: str = field(default_factory=lambda: data_path("calendar.cg"))
    kb_path: str = field(default_factory=lambda: data_path("calendar.kb"))
    app_kb_path: str = field(default_factory=lambda: data_path("app.kb"))
    store_path: str | None = None
    window: tuple | None = None
    no_filters: bool = False
    trace: bool = False
    fmt: str = "paper"
    today: _dt.date | None = None


def base_context():
    """The ready-state discourse context: hearer attending to the speaker."""
    return Avm(
        hr=Avm(attends="user"),
        sr="user",
        lang_code="english",
        lang_channel="text",
    )


class Engine:
    def __init__(self, config=None):
        self.config = config or EngineConfig()
        cfg = self.config
        try:
            with open(cfg.grammar_path, encoding="utf-8") as fh:
                self.grammar = grammar_mod.load_grammar(fh.read())
            with open(cfg.kb_path, encoding="utf-8") as fh:
                self.ontology, self.filters = domain.load_knowledge(fh.read())
            with open(cfg.app_kb_path, encoding="utf-8") as fh:
                self.rules = appkb.load_app_rules(fh.read())
        except (OSError, grammar_mod.GrammarError, domain.DomainError, appkb.AppError) as exc:
            raise DataFileError(str(exc)) from exc
        violations = grammar_mod.validate_l_attributed(self.grammar)
        if violations:
            raise DataFileError(
                "grammar is not L-attributed: %s" % "; ".join(map(str, violations))
            )
        if cfg.window is not None:
            self.rules = replace(self.rules, window=tuple(cfg.window))
        if cfg.no_filters:
            self.filters = self.filters.disabled()
        self.store = (
            EventStore.load(cfg.store_path) if cfg.store_path else EventStore()
        )

    @property
    def today(self):
        return self.config.today or _dt.date.today()

    def save_store(self):
        if self.config.store_path:
            self.store.save(self.config.store_path)

    def parse_text(self, text, ctx=None):
        tokens = parsing.tokenize(text)
        if not tokens:
            return []
        return parsing.parse(self.grammar, self.filters, ctx or base_context(), tokens)

    def parse_count(self, text, ctx=None):
        return len(self.parse_text(text, ctx))

    def command_frames(self, text, ctx=None):
        """Interpretable command frames among the root parses, best first.

        Ranking prefers the parse filling the most required slots, then the
        most slots overall; remaining ties order deterministically.
        """
        out = []
        for name, message in self.parse_text(text, ctx):
            if name.head != "sent":
                continue
            try:
                frame = interpret(self.ontology, message)
            except domain.DomainError:
                continue
            out.append((name, frame, message))
        out.sort(key=lambda item: self._rank(item[1]))
        return out

    def _rank(self, frame):
        required = self.rules.required.get(frame.action_name, ())
        filled = frame.to_avm()
        n_required = sum(1 for slot in required if slot in filled)
        return (-n_required, -len(filled), repr(filled))

    def interpret_text(self, text):
        """(frame, post-default frame or None, pending requirements)."""
        frames = self.command_frames(text)
        if not frames:
            return None
        _, frame, _ = frames[0]
        request = appkb.to_app_request(
            self.rules, self.ontology, frame, self.today,
            part_of_day=frame.part_of_day, store=self.store,
        )
        post = self._post_default_frame(frame)
        return frame, post, request.pending

    def _post_default_frame(self, frame):
        """The frame after meridiem defaulting, or None when nothing fired."""
        if frame.event_time is None:
            return None
        hour = frame.event_time.get("hour")
        if not isinstance(hour, Avm) or hour.get("meridiem") != "am_or_pm":
            return None
        resolved = appkb.resolve_time(self.rules, frame.event_time, frame.part_of_day)
        if resolved is appkb.AMBIGUOUS:
            return None
        new_time = frame.event_time.with_attrs(
            hour=Avm(value=resolved.hour), minute=resolved.minute
        )
        return replace(frame, event_time=new_time)

    def new_session(self):
        from .dialog import DialogSession

        return DialogSession(self)
