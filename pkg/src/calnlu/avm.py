"""Attribute-value matrices: the universal value representation.

Every message, discourse context and slot value in the system is an AVM: a
finite, tree-shaped map from lowercase attribute names to values.  Values are
plain Python strings (symbol or string atoms), ints, nested ``Avm`` objects,
tuples (ordered lists), constructor terms (``Term``), and -- in templates and
patterns only -- variables, wildcards, paths and template calls.

The operations here are all pure: ``resolve`` walks a path, ``match`` checks
pattern subsumption and collects variable bindings, ``merge`` takes the
recursive union of two ground AVMs, and ``substitute`` instantiates a
template against a set of bindings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class AvmError(Exception):
    pass


class MergeConflict(AvmError):
    """Raised when two ground AVMs disagree at a path."""

    def __init__(self, path):
        self.path = tuple(path)
        super().__init__("merge conflict at [%s]" % " ".join(self.path))


class UnboundVariable(AvmError):
    def __init__(self, name):
        self.name = name
        super().__init__("unbound variable %s" % name)


class UnresolvablePath(AvmError):
    def __init__(self, path):
        self.path = path
        super().__init__("unresolvable path %s" % (path,))


class _Absent:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ABSENT"

    def __bool__(self):
        return False


#: Sentinel returned by ``resolve`` when a path step is missing.
ABSENT = _Absent()


class _Wildcard:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "*"


#: The pattern wildcard: matches any ground value.
ANY = _Wildcard()


@dataclass(frozen=True)
class Var:
    """A named pattern/template variable (written uppercase)."""

    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Term:
    """A constructor term such as ``sent(cmnd, v.np)`` or ``want(other_agent)``."""

    head: str
    args: tuple = ()

    def __repr__(self):
        if not self.args:
            return self.head
        return "%s(%s)" % (self.head, ",".join(_text(a) for a in self.args))


@dataclass(frozen=True)
class Path:
    """A path expression, optionally rooted at a variable.

    ``Path("V", ("M", "v_type"))`` reads "the v_type of the message of V".
    An ``optional`` path yields no attribute (instead of an error) when any
    step is missing during substitution.
    """

    root: str | None
    attrs: tuple = ()
    optional: bool = False

    def __post_init__(self):
        if self.root is None and not self.attrs:
            raise AvmError("empty path")

    def __repr__(self):
        parts = ([self.root] if self.root else []) + list(self.attrs)
        return "<%s>" % " ".join(parts)


@dataclass(frozen=True)
class Call:
    """A template function application, e.g. appending a modifier."""

    fn: str
    args: tuple


class Avm:
    """An immutable attribute-value matrix."""

    __slots__ = ("_attrs", "_hash")

    def __init__(self, _attrs=None, **kwargs):
        attrs = dict(_attrs) if _attrs else {}
        attrs.update(kwargs)
        for key in attrs:
            if not isinstance(key, str):
                raise AvmError("attribute names must be strings: %r" % (key,))
        object.__setattr__(self, "_attrs", attrs)
        object.__setattr__(self, "_hash", None)

    def get(self, name, default=ABSENT):
        return self._attrs.get(name, default)

    def __contains__(self, name):
        return name in self._attrs

    def __iter__(self):
        return iter(self._attrs)

    def __len__(self):
        return len(self._attrs)

    def items(self):
        return self._attrs.items()

    def attrs(self):
        return tuple(self._attrs)

    def with_attrs(self, **kwargs):
        attrs = dict(self._attrs)
        attrs.update(kwargs)
        return Avm(attrs)

    def without(self, *names):
        return Avm({k: v for k, v in self._attrs.items() if k not in names})

    def __eq__(self, other):
        return isinstance(other, Avm) and self._attrs == other._attrs

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(
                self, "_hash", hash(frozenset((k, _hashable(v)) for k, v in self._attrs.items()))
            )
        return self._hash

    def __repr__(self):
        return to_text(self)


def _hashable(value):
    if isinstance(value, tuple):
        return tuple(_hashable(v) for v in value)
    return value


EMPTY = Avm()


def resolve(value, path):
    """Walk ``path`` (a Path or an iterable of attribute names) through ``value``.

    Returns ABSENT if any step is missing; never raises for missing data.
    """
    if isinstance(path, Path):
        if path.root is not None:
            raise UnresolvablePath(path)
        attrs = path.attrs
    else:
        attrs = tuple(path)
    current = value
    for name in attrs:
        if not isinstance(current, Avm):
            return ABSENT
        current = current.get(name)
        if current is ABSENT:
            return ABSENT
    return current


def match(pattern, subject, bindings=None):
    """Match ``pattern`` against a ground ``subject``.

    Returns a dict of variable bindings on success (possibly empty) or None
    on failure.  The pattern subsumes the subject: AVM subjects may carry
    extra attributes, list subjects are matched by an order-preserving
    subsequence, and an atom pattern matches any Term with that head.
    """
    bindings = dict(bindings) if bindings else {}
    result = _match(pattern, subject, bindings)
    return result


def _match(pattern, subject, bindings):
    if pattern is ANY:
        return bindings
    if isinstance(pattern, Var):
        if pattern.name in bindings:
            return bindings if bindings[pattern.name] == subject else None
        bindings[pattern.name] = subject
        return bindings
    if isinstance(pattern, Avm):
        if not isinstance(subject, Avm):
            return None
        for name, pval in pattern.items():
            sval = subject.get(name)
            if sval is ABSENT:
                return None
            if _match(pval, sval, bindings) is None:
                return None
        return bindings
    if isinstance(pattern, Term):
        if not isinstance(subject, Term):
            return None
        if pattern.head != subject.head or len(pattern.args) != len(subject.args):
            return None
        for parg, sarg in zip(pattern.args, subject.args):
            if _match(parg, sarg, bindings) is None:
                return None
        return bindings
    if isinstance(pattern, str) and isinstance(subject, Term):
        # <V cons_n> = verb: a bare category atom matches any construction
        # name with that head.
        return bindings if pattern == subject.head else None
    if isinstance(pattern, tuple):
        if not isinstance(subject, tuple):
            return None
        return _match_seq(pattern, subject, bindings)
    return bindings if pattern == subject else None


def _match_seq(pattern, subject, bindings):
    if not pattern:
        return bindings
    head, rest = pattern[0], pattern[1:]
    for i, item in enumerate(subject):
        trial = _match(head, item, dict(bindings))
        if trial is not None:
            result = _match_seq(rest, subject[i + 1 :], trial)
            if result is not None:
                bindings.clear()
                bindings.update(result)
                return bindings
    return None


def merge(base, overlay, _path=()):
    """Recursive union of two ground values; conflicting atoms raise."""
    if isinstance(base, Avm) and isinstance(overlay, Avm):
        attrs = dict(base.items())
        for name, oval in overlay.items():
            if name in attrs:
                attrs[name] = merge(attrs[name], oval, _path + (name,))
            else:
                attrs[name] = oval
        return Avm(attrs)
    if base == overlay:
        return base
    raise MergeConflict(_path)


def override(base, overlay):
    """Like merge, but the overlay wins wherever the two disagree."""
    if isinstance(base, Avm) and isinstance(overlay, Avm):
        attrs = dict(base.items())
        for name, oval in overlay.items():
            if name in attrs:
                attrs[name] = override(attrs[name], oval)
            else:
                attrs[name] = oval
        return Avm(attrs)
    return overlay


def substitute(template, bindings):
    """Instantiate ``template`` against ``bindings``; the result is ground.

    Raises UnboundVariable / UnresolvablePath when the template references
    something the bindings cannot supply (optional paths are dropped).
    """
    result = _substitute(template, bindings)
    if result is ABSENT:
        raise UnresolvablePath(template)
    return result


def _substitute(template, bindings):
    if isinstance(template, Var):
        if template.name not in bindings:
            raise UnboundVariable(template.name)
        return bindings[template.name]
    if isinstance(template, Path):
        if template.root is None:
            raise UnresolvablePath(template)
        if template.root not in bindings:
            if template.optional:
                return ABSENT
            raise UnboundVariable(template.root)
        value = resolve(bindings[template.root], template.attrs)
        if value is ABSENT and not template.optional:
            raise UnresolvablePath(template)
        return value
    if isinstance(template, Call):
        return _apply_call(template, bindings)
    if isinstance(template, Avm):
        attrs = {}
        for name, tval in template.items():
            value = _substitute(tval, bindings)
            if value is not ABSENT:
                attrs[name] = value
        return Avm(attrs)
    if isinstance(template, Term):
        return Term(template.head, tuple(_substitute(a, bindings) for a in template.args))
    if isinstance(template, tuple):
        out = []
        for item in template:
            value = _substitute(item, bindings)
            if value is not ABSENT:
                out.append(value)
        return tuple(out)
    return template


def _apply_call(call, bindings):
    args = [_substitute(a, bindings) for a in call.args]
    if call.fn == "merge":
        result = args[0]
        for arg in args[1:]:
            result = merge(result, arg)
        return result
    if call.fn == "add-mod":
        base, mod = args
        if not isinstance(base, Avm):
            raise AvmError("add-mod base must be an AVM")
        mods = base.get("mods", ())
        return base.with_attrs(mods=tuple(mods) + (Avm(pp_msg=mod),))
    raise AvmError("unknown template function %s" % call.fn)


def is_ground(value):
    """True when the value contains no Var, Wildcard, Path or Call."""
    if isinstance(value, (Var, Path, Call)) or value is ANY:
        return False
    if isinstance(value, Avm):
        return all(is_ground(v) for _, v in value.items())
    if isinstance(value, Term):
        return all(is_ground(a) for a in value.args)
    if isinstance(value, tuple):
        return all(is_ground(v) for v in value)
    return True


# ---------------------------------------------------------------------------
# Canonical textual serialization.
#
# Bracketed display form, e.g. ``[ hour [ 5 am_or_pm ] ]``:
#   - a single-attribute AVM prints as ``[ attr value ]``
#   - a multi-attribute AVM prints as ``[ [ a1 v1 ] [ a2 v2 ] ]``
#   - a time AVM ({value, meridiem?}) prints positionally: ``[ 5 am_or_pm ]``
#   - lists print as ``( v1 v2 ... )``
# The reader round-trips all of these.
# ---------------------------------------------------------------------------

_ATTR_ORDER = (
    "action_name",
    "event_name",
    "event_date",
    "event_time",
    "event_place",
    "event_duration",
    "participants",
)

_BARE_ATOM = re.compile(r"[a-z0-9_.'!?,:*-]+$")


def _sorted_attrs(avm):
    def key(name):
        try:
            return (0, _ATTR_ORDER.index(name))
        except ValueError:
            return (1, name)

    return sorted(avm.attrs(), key=key)


def _is_positional_time(avm):
    names = set(avm.attrs())
    return "value" in names and names <= {"value", "meridiem"} and isinstance(
        avm.get("value"), int
    )


def _text(value):
    if isinstance(value, Avm):
        if _is_positional_time(value):
            meridiem = value.get("meridiem")
            inner = str(value.get("value"))
            if meridiem is not ABSENT:
                inner += " " + _text(meridiem)
            return "[ %s ]" % inner
        names = _sorted_attrs(value)
        if len(names) == 0:
            return "[ ]"
        if len(names) == 1:
            return "[ %s %s ]" % (names[0], _text(value.get(names[0])))
        return "[ %s ]" % " ".join(
            "[ %s %s ]" % (n, _text(value.get(n))) for n in names
        )
    if isinstance(value, tuple):
        return "( %s )" % " ".join(_text(v) for v in value)
    if isinstance(value, Term):
        return repr(value)
    if isinstance(value, Var):
        return value.name
    if value is ANY:
        return "*"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        if _BARE_ATOM.match(value):
            return value
        return '"%s"' % value.replace('"', '\\"')
    raise AvmError("cannot serialize %r" % (value,))


def to_text(value):
    """Render a value in the canonical bracketed form."""
    return _text(value)


def to_pretty(value, indent=0):
    """Multi-line rendering of an AVM for human-facing output."""
    pad = "  " * indent
    if isinstance(value, Avm) and not _is_positional_time(value):
        names = _sorted_attrs(value)
        if not names:
            return pad + "[ ]"
        lines = [pad + "["]
        for name in names:
            sub = value.get(name)
            rendered = _text(sub)
            if len(rendered) <= 60:
                lines.append(pad + "  [ %s %s ]" % (name, rendered))
            else:
                lines.append(pad + "  [ %s" % name)
                lines.append(to_pretty(sub, indent + 2))
                lines.append(pad + "  ]")
        lines.append(pad + "]")
        return "\n".join(lines)
    return pad + _text(value)


_TOKEN = re.compile(
    r"""
    \s*(
        "(?:[^"\\]|\\.)*"            # quoted string
      | [a-z][a-z0-9_.']*\([^()]*\)  # constructor term
      | [\[\]()]                     # brackets
      | -?[0-9]+(?:st|nd|rd|th)?     # number or ordinal-like atom
      | [A-Za-z0-9_.':!?,*-]+        # atom / variable / wildcard
    )""",
    re.VERBOSE,
)


def _tokenize_text(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise AvmError("bad serialized value at %r" % text[pos : pos + 20])
            break
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def from_text(text):
    """Parse the canonical bracketed form back into a value."""
    tokens = _tokenize_text(text)
    value, rest = _read_value(tokens)
    if rest:
        raise AvmError("trailing input after value: %r" % (rest,))
    return value


def _read_value(tokens):
    if not tokens:
        raise AvmError("unexpected end of input")
    tok = tokens[0]
    if tok == "[":
        return _read_avm(tokens)
    if tok == "(":
        items = []
        tokens = tokens[1:]
        while tokens and tokens[0] != ")":
            item, tokens = _read_value(tokens)
            items.append(item)
        if not tokens:
            raise AvmError("unterminated list")
        return tuple(items), tokens[1:]
    return _read_leaf(tok), tokens[1:]


def _read_leaf(tok):
    if tok.startswith('"'):
        return tok[1:-1].replace('\\"', '"')
    if re.match(r"-?[0-9]+$", tok):
        return int(tok)
    if tok == "*":
        return ANY
    if "(" in tok:
        head, body = tok.split("(", 1)
        body = body.rstrip(")")
        args = tuple(
            _read_leaf(part.strip()) for part in body.split(",") if part.strip()
        )
        return Term(head, args)
    if tok[0].isupper():
        return Var(tok)
    return tok


def _read_avm(tokens):
    assert tokens[0] == "["
    tokens = tokens[1:]
    if not tokens:
        raise AvmError("unterminated avm")
    if tokens[0] == "]":
        return EMPTY, tokens[1:]
    if tokens[0] == "[":
        # multi-attribute form: a sequence of [ attr value ] pairs
        attrs = {}
        while tokens and tokens[0] == "[":
            pair, tokens = _read_avm(tokens)
            for name, val in pair.items():
                attrs[name] = val
        if not tokens or tokens[0] != "]":
            raise AvmError("unterminated avm")
        return Avm(attrs), tokens[1:]
    if re.match(r"-?[0-9]+$", tokens[0]):
        # positional time form: [ 5 am_or_pm ] or [ 17 ]
        value = int(tokens[0])
        tokens = tokens[1:]
        attrs = {"value": value}
        if tokens and tokens[0] not in ("]",):
            attrs["meridiem"] = _read_leaf(tokens[0])
            tokens = tokens[1:]
        if not tokens or tokens[0] != "]":
            raise AvmError("unterminated time avm")
        return Avm(attrs), tokens[1:]
    name = tokens[0]
    value, tokens = _read_value(tokens[1:])
    if not tokens or tokens[0] != "]":
        raise AvmError("unterminated avm pair for %s" % name)
    return Avm({name: value}), tokens[1:]
