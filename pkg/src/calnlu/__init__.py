"""Construction-grammar language understanding for an interactive calendar.

Public surface: the AVM value layer, grammar loading, the chart parser,
domain interpretation into slot frames, application-request mapping, the
dialog manager, the calendar store, and the assembled ``Engine``.
"""

from .avm import ANY, Avm, AvmError, Term, Var, from_text, match, merge, to_pretty, to_text
from .dialog import DialogSession, DialogTurn, DiscourseContext, replay
from .domain import FilterSet, Ontology, SlotFrame, interpret, load_knowledge
from .engine import DataFileError, Engine, EngineConfig, base_context
from .generate import enumerate_utterances
from .grammar import Construction, Grammar, GrammarError, load_grammar, serialize_grammar
from .parsing import oracle_parse, parse, parse_count, tokenize
from .store import CalendarEvent, EventStore, UnknownEvent

__all__ = [
    "ANY",
    "Avm",
    "AvmError",
    "CalendarEvent",
    "Construction",
    "DataFileError",
    "DialogSession",
    "DialogTurn",
    "DiscourseContext",
    "Engine",
    "EngineConfig",
    "EventStore",
    "FilterSet",
    "Grammar",
    "GrammarError",
    "Ontology",
    "SlotFrame",
    "Term",
    "UnknownEvent",
    "Var",
    "base_context",
    "enumerate_utterances",
    "from_text",
    "interpret",
    "load_grammar",
    "load_knowledge",
    "match",
    "merge",
    "oracle_parse",
    "parse",
    "parse_count",
    "replay",
    "serialize_grammar",
    "to_pretty",
    "to_text",
    "tokenize",
]

__version__ = "0.1.0"
