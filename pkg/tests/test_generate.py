import pytest

from calnlu.avm import Term
from calnlu.domain import interpret
from calnlu.engine import base_context
from calnlu.generate import GenerationError, detokenize, enumerate_utterances
from calnlu.parsing import tokenize

ROOT = Term("sent", ("cmnd", "v.np"))


def test_detokenize_attaches_punctuation():
    assert detokenize(("schedule", "a", "meeting", "!")) == "schedule a meeting!"
    assert detokenize(("no", ",", "but")) == "no, but"


def test_limit_one_yields_exactly_one(engine):
    pairs = list(
        enumerate_utterances(engine.grammar, engine.filters, base_context(), ROOT, 1)
    )
    assert len(pairs) == 1


def test_unknown_root_raises_with_name():
    from conftest import make_engine

    engine = make_engine()
    with pytest.raises(GenerationError, match="ghost"):
        list(
            enumerate_utterances(
                engine.grammar, engine.filters, base_context(), Term("ghost", ("x",)), 1
            )
        )


def test_strings_are_distinct_and_retokenize(engine):
    pairs = list(
        enumerate_utterances(engine.grammar, engine.filters, base_context(), ROOT, 300)
    )
    texts = [text for text, _ in pairs]
    assert len(texts) == len(set(texts)) == 300
    for text in texts[:50]:
        assert detokenize(tuple(t.surface for t in tokenize(text))) == text


def test_sample_round_trips_to_generation_frame(engine):
    pairs = list(
        enumerate_utterances(engine.grammar, engine.filters, base_context(), ROOT, 200)
    )
    for text, message in pairs:
        generated = interpret(engine.ontology, message).to_avm()
        parsed = {frame.to_avm() for _, frame, _ in engine.command_frames(text)}
        assert generated in parsed, text
