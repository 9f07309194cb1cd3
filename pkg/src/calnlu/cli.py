"""Command-line entry points: parse, interpret, repl, replay, enumerate, serve."""

from __future__ import annotations

import datetime as _dt
import re
import sys

import click

from .avm import Term, to_pretty, to_text
from .dialog import replay as replay_transcript
from .engine import DataFileError, Engine, EngineConfig
from .generate import GenerationError, enumerate_utterances

EXIT_NO_PARSE = 1
EXIT_DATA_ERROR = 3

_NAME_RE = re.compile(r"^([a-z_.]+)(?:\(([a-z_.,*]*)\))?$")


class DataError(click.ClickException):
    exit_code = EXIT_DATA_ERROR


def _parse_window(ctx, param, value):
    if value is None:
        return None
    m = re.fullmatch(r"(\d{1,2})\.\.(\d{1,2})", value)
    if not m:
        raise click.BadParameter("expected LO..HI, e.g. 9..17")
    return (int(m.group(1)), int(m.group(2)))


def _parse_today(ctx, param, value):
    if value is None:
        return None
    try:
        return _dt.date.fromisoformat(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc))


def parse_cons_name(text):
    """Read a construction name like ``sent(cmnd,v.np)`` into a Term."""
    m = _NAME_RE.match(text.strip().replace(" ", ""))
    if not m:
        raise click.BadParameter("bad construction name %r" % text)
    args = tuple(a for a in (m.group(2) or "").split(",") if a)
    return Term(m.group(1), args)


@click.group(context_settings={"auto_envvar_prefix": "CALNLU"})
@click.option("--grammar", type=click.Path(), default=None, help="Grammar file.")
@click.option("--kb", type=click.Path(), default=None, help="Domain knowledge base.")
@click.option("--app-kb", type=click.Path(), default=None, help="Application knowledge base.")
@click.option("--store", type=click.Path(), default=None, help="Calendar persistence file.")
@click.option("--window", callback=_parse_window, default=None, metavar="LO..HI",
              help="Override the business-hours window.")
@click.option("--no-filters", is_flag=True, help="Disable semantic attachment filters.")
@click.option("--trace", is_flag=True, help="Record parse traces in dialog sessions.")
@click.option("--format", "fmt", type=click.Choice(["paper", "machine"]), default="paper",
              help="Output style: bracketed blocks or one-line canonical form.")
@click.option("--today", callback=_parse_today, default=None, metavar="YYYY-MM-DD",
              help="Fix the reference date for relative date words.")
@click.pass_context
def main(ctx, grammar, kb, app_kb, store, window, no_filters, trace, fmt, today):
    """Natural-language calendar assistant."""
    overrides = {}
    if grammar:
        overrides["grammar_path"] = grammar
    if kb:
        overrides["kb_path"] = kb
    if app_kb:
        overrides["app_kb_path"] = app_kb
    ctx.obj = EngineConfig(
        store_path=store,
        window=window,
        no_filters=no_filters,
        trace=trace,
        fmt=fmt,
        today=today,
        **overrides,
    )


def _engine(config):
    try:
        return Engine(config)
    except DataFileError as exc:
        raise DataError(str(exc))


def _render(value, fmt):
    return to_pretty(value) if fmt == "paper" else to_text(value)


@main.command("parse")
@click.argument("sentence")
@click.pass_obj
def cmd_parse(config, sentence):
    """Print every root message for SENTENCE."""
    engine = _engine(config)
    parses = engine.parse_text(sentence)
    for name, message in parses:
        click.echo("%s:" % repr(name))
        click.echo(_render(message, config.fmt))
    if not parses:
        sys.exit(EXIT_NO_PARSE)


@main.command("interpret")
@click.argument("sentence")
@click.pass_obj
def cmd_interpret(config, sentence):
    """Print the slot frame for SENTENCE, plus any applied defaults."""
    engine = _engine(config)
    result = engine.interpret_text(sentence)
    if result is None:
        sys.exit(EXIT_NO_PARSE)
    frame, post_default, pending = result
    click.echo("***Slots:")
    click.echo(_render(frame.to_avm(), config.fmt))
    if post_default is not None:
        click.echo("***After defaults:")
        click.echo(_render(post_default.to_avm(), config.fmt))
    if pending:
        click.echo("pending: %s" % ", ".join(pending))


@main.command("repl")
@click.pass_obj
def cmd_repl(config):
    """Interactive dialog loop (:quit, :calendar, :trace)."""
    engine = _engine(config)
    session = engine.new_session()
    while True:
        try:
            line = click.prompt("U", prompt_suffix="> ", default="", show_default=False)
        except (EOFError, click.Abort):
            break
        line = line.strip()
        if not line:
            continue
        if line == ":quit":
            break
        if line == ":calendar":
            events = engine.store.query()
            if not events:
                click.echo("(no events)")
            for ev in events:
                click.echo(_format_event(ev))
            continue
        if line == ":trace":
            for text, parses in session.trace:
                click.echo("%s -> %d parse(s)" % (text, len(parses)))
            continue
        turn = session.handle_utterance(line)
        click.echo("S> %s" % turn.reply)


def _format_event(ev):
    parts = ["%s %s %s %dmin" % (ev.id, ev.date.isoformat(), ev.time.strftime("%H:%M"), ev.duration),
             '"%s"' % ev.name]
    if ev.place:
        parts.append("in %s" % ev.place)
    if ev.participants:
        parts.append("with %s" % ", ".join(ev.participants))
    return " ".join(parts)


@main.command("replay")
@click.argument("transcript", type=click.Path(exists=True))
@click.pass_obj
def cmd_replay(config, transcript):
    """Replay a U:/S: transcript, checking each system reply."""
    engine = _engine(config)
    with open(transcript, encoding="utf-8") as fh:
        results = replay_transcript(engine, fh.read())
    failed = False
    for user, expected, actual, ok in results:
        status = "pass" if ok else "FAIL"
        click.echo("%s  U: %s" % (status, user))
        if not ok:
            failed = True
            click.echo("      expected: %s" % expected)
            click.echo("      actual:   %s" % actual)
    if failed:
        sys.exit(EXIT_NO_PARSE)


@main.command("enumerate")
@click.option("--root", default="sent(cmnd,v.np)", show_default=True,
              help="Construction to expand.")
@click.option("--limit", default=2000, show_default=True, type=click.IntRange(min=1))
@click.pass_obj
def cmd_enumerate(config, root, limit):
    """Emit distinct surface strings derivable from a construction."""
    engine = _engine(config)
    from .engine import base_context

    try:
        pairs = enumerate_utterances(
            engine.grammar, engine.filters, base_context(), parse_cons_name(root), limit
        )
        for text, _message in pairs:
            click.echo(text)
    except GenerationError as exc:
        raise click.ClickException(str(exc))


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.pass_obj
def cmd_serve(config, host, port):
    """Run the HTTP session API."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(_engine(config)), host=host, port=port)


if __name__ == "__main__":
    main()
