"""A small s-expression reader for the grammar and knowledge-base files.

Supports ``;`` line comments, quoted strings, integers, symbols and keywords
(``:name``).  Every top-level form is returned with the line number it
started on, so loaders can report errors usefully.
"""

from __future__ import annotations

import re


class SexprError(Exception):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class Symbol(str):
    """A bare symbol, distinct from a quoted string."""

    __slots__ = ()

    def __repr__(self):
        return str(self)


class Keyword(str):
    """A ``:keyword`` marker."""

    __slots__ = ()

    def __repr__(self):
        return ":" + str(self)


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>;[^\n]*)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<atom>[^\s()";]+)
    """,
    re.VERBOSE,
)


def _tokens(text):
    pos = 0
    line = 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SexprError("unreadable input %r" % text[pos : pos + 20], line)
        kind = m.lastgroup
        value = m.group()
        line += value.count("\n")
        pos = m.end()
        if kind in ("ws", "comment"):
            continue
        yield kind, value, line


def _atom(text):
    if re.match(r"-?[0-9]+$", text):
        return int(text)
    if text.startswith(":"):
        return Keyword(text[1:])
    return Symbol(text)


def parse(text):
    """Parse all top-level forms, returning a list of (form, line) pairs."""
    stack = []
    top = []
    open_lines = []
    for kind, value, line in _tokens(text):
        if kind == "open":
            stack.append([])
            open_lines.append(line)
        elif kind == "close":
            if not stack:
                raise SexprError("unbalanced ')'", line)
            done = stack.pop()
            start = open_lines.pop()
            if stack:
                stack[-1].append(done)
            else:
                top.append((done, start))
        else:
            item = value[1:-1].replace('\\"', '"') if kind == "string" else _atom(value)
            if stack:
                stack[-1].append(item)
            else:
                top.append((item, line))
    if stack:
        raise SexprError("unbalanced '('", open_lines[-1])
    return top


def parse_one(text):
    forms = parse(text)
    if len(forms) != 1:
        raise SexprError("expected exactly one form, got %d" % len(forms))
    return forms[0][0]
