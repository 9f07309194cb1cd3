"""Constructions and the grammar that holds them.

A construction pairs a form (the vehicle: an ordered constituent structure
plus feature-of-form tests) with a meaning template, guarded by context
constraints on the discourse state.  Grammars load from a declarative
s-expression file; see ``data/calendar.cg`` for the shipped grammar.

DSL sketch::

    (construction (sent cmnd v.np)
      :struc (V NP (opt "!" "."))
      :feat (((^ V cons_n) verb)
             ((^ V M v_type) action_verb)
             ((^ NP cons_n) np))
      :context (((^ hr attends) sr))
      :inh ((NP expected_obj (^ V M sem_type)))
      :message (avm sem_cat command
                    a_type (^ V M sem_type)
                    a_obj (^ NP M)
                    agent hr))

    (lexeme "cancel" (verb cancel)
      :message (avm cat verb sem_type delete v_type action_verb))

Value expressions: integers and lowercase symbols are literal values,
uppercase symbols are variables, ``*`` is the wildcard, ``(^ ROOT a b)`` is
a path (``(^? ...)`` optional), ``(avm a v ...)`` a nested matrix,
``(list ...)`` an ordered list, ``(@ head args)`` a constructor term, and
``(merge ...)`` / ``(add-mod base mod)`` are template functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import sexpr
from .avm import (
    ANY,
    ABSENT,
    Avm,
    Call,
    Path,
    Term,
    Var,
    is_ground,
    match,
    override,
    resolve,
    to_text,
)
from .sexpr import Keyword, SexprError, Symbol


class GrammarError(Exception):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


#: Discourse symbols a context constraint (or rhs) may reference.
RESERVED_CONTEXT = ("hr", "sr", "p_utter", "lang_code", "lang_channel")

#: Construction heads whose complete edges count as root parses.
ROOT_HEADS = ("sent", "fragment")


@dataclass(frozen=True)
class OptionalToken:
    """A struc slot that may match one of several tokens, or nothing."""

    alternatives: tuple

    def __repr__(self):
        return "(opt %s)" % " ".join(self.alternatives)


@dataclass(frozen=True)
class Construction:
    name: Term
    struc: tuple = ()
    context: tuple = ()      # of (Path, pattern)
    equations: tuple = ()    # of (Path, pattern)
    inherited: tuple = ()    # of (target var name, attr name, template)
    modifier: tuple | None = None  # (modifier var, head var)
    message: Avm = field(default_factory=Avm)
    abstract: bool = False

    @property
    def key(self):
        return self.name

    @property
    def head(self):
        return self.name.head

    def struc_vars(self):
        return tuple(e.name for e in self.struc if isinstance(e, Var))

    def is_lexical(self):
        return len(self.struc) == 1 and isinstance(self.struc[0], str)

    def cons_n_patterns(self, var_name):
        """Patterns constraining which constructions may fill ``var_name``."""
        return tuple(
            rhs
            for lhs, rhs in self.equations
            if lhs.root == var_name and lhs.attrs == ("cons_n",)
        )

    def message_equations(self, var_name):
        """Feature equations on ``var_name`` other than cons_n tests."""
        return tuple(
            (lhs, rhs)
            for lhs, rhs in self.equations
            if lhs.root == var_name and lhs.attrs != ("cons_n",)
        )

    def __repr__(self):
        return "Construction(%s)" % repr(self.name)


class Grammar:
    """An immutable set of constructions with lookup indexes."""

    def __init__(self, constructions):
        by_name = {}
        for cons in constructions:
            if cons.name in by_name:
                raise GrammarError("duplicate construction name %s" % repr(cons.name))
            by_name[cons.name] = cons
        self.constructions = by_name
        self.lexicon = {}
        self.by_head = {}
        for cons in by_name.values():
            if cons.abstract:
                continue
            self.by_head.setdefault(cons.head, []).append(cons)
            if cons.is_lexical():
                self.lexicon.setdefault(cons.struc[0], []).append(cons)
        self._check_categories()

    def _check_categories(self):
        for cons in self.constructions.values():
            for lhs, rhs in cons.equations:
                if lhs.attrs != ("cons_n",):
                    continue
                heads = _pattern_heads(rhs)
                for head in heads:
                    if head not in self.by_head and not any(
                        c.head == head for c in self.constructions.values()
                    ):
                        raise GrammarError(
                            "construction %s references unknown category %s"
                            % (repr(cons.name), head)
                        )

    def __eq__(self, other):
        return isinstance(other, Grammar) and self.constructions == other.constructions

    def productions(self):
        return [c for c in self.constructions.values() if not c.is_lexical() and not c.abstract]

    def lexemes(self):
        return [c for c in self.constructions.values() if c.is_lexical()]

    def candidates_for(self, patterns):
        """All non-abstract constructions whose name matches every pattern."""
        out = []
        for cons in self.constructions.values():
            if cons.abstract:
                continue
            if all(match(p, cons.name) is not None for p in patterns):
                out.append(cons)
        return out


def _pattern_heads(pattern):
    if isinstance(pattern, Term):
        return [pattern.head]
    if isinstance(pattern, str):
        return [pattern]
    return []


def check_context(constraints, ctx_avm):
    """Evaluate context constraints against a discourse-context AVM."""
    for lhs, rhs in constraints:
        value = resolve(ctx_avm, (lhs.root,) + lhs.attrs)
        if value is ABSENT:
            return False
        if isinstance(rhs, str) and rhs in RESERVED_CONTEXT:
            expected = resolve(ctx_avm, (rhs,))
            if expected is ABSENT or value != expected:
                return False
        elif match(rhs, value) is None:
            return False
    return True


def lexical_candidates(grammar, token, ctx_avm):
    """All lexical constructions matching ``token`` whose context holds."""
    out = []
    for cons in grammar.lexicon.get(token, ()):
        if check_context(cons.context, ctx_avm):
            out.append((cons, cons.message))
    return out


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def parse_value(form, line=None):
    """Parse a DSL value expression into an AVM-layer value."""
    if isinstance(form, int):
        return form
    if isinstance(form, Symbol):
        text = str(form)
        if text == "*":
            return ANY
        if text[0].isupper():
            return Var(text)
        return text
    if isinstance(form, Keyword):
        raise GrammarError("unexpected keyword :%s in value" % form, line)
    if isinstance(form, str):
        return form
    if isinstance(form, list):
        if not form:
            return ()
        head = form[0]
        if isinstance(head, Symbol):
            text = str(head)
            if text in ("^", "^?"):
                parts = [str(p) for p in form[1:]]
                if not parts:
                    raise GrammarError("empty path", line)
                return Path(parts[0], tuple(parts[1:]), optional=(text == "^?"))
            if text == "avm":
                body = form[1:]
                if len(body) % 2:
                    raise GrammarError("avm needs attribute/value pairs", line)
                attrs = {}
                for i in range(0, len(body), 2):
                    name = body[i]
                    if not isinstance(name, Symbol):
                        raise GrammarError("bad attribute name %r" % (name,), line)
                    attrs[str(name)] = parse_value(body[i + 1], line)
                return Avm(attrs)
            if text == "list":
                return tuple(parse_value(v, line) for v in form[1:])
            if text == "@":
                return Term(str(form[1]), tuple(parse_value(v, line) for v in form[2:]))
            if text in ("merge", "add-mod"):
                return Call(text, tuple(parse_value(v, line) for v in form[1:]))
        raise GrammarError("unreadable value expression %r" % (form,), line)
    raise GrammarError("unreadable value %r" % (form,), line)


def _parse_name(form, line):
    if isinstance(form, list) and form and isinstance(form[0], Symbol):
        return Term(str(form[0]), tuple(str(a) for a in form[1:]))
    raise GrammarError("construction name must be a (head args...) form", line)


def _parse_struc(form, line):
    elements = []
    for item in form:
        if isinstance(item, Symbol) and str(item)[0].isupper():
            elements.append(Var(str(item)))
        elif isinstance(item, str) and not isinstance(item, Symbol):
            elements.append(str(item))
        elif isinstance(item, list) and item and str(item[0]) == "opt":
            elements.append(OptionalToken(tuple(str(t) for t in item[1:])))
        else:
            raise GrammarError("bad struc element %r" % (item,), line)
    if not elements:
        raise GrammarError("struc must be nonempty", line)
    return tuple(elements)


def _parse_pairs(form, line):
    pairs = []
    for item in form:
        if not (isinstance(item, list) and len(item) == 2):
            raise GrammarError("expected (path pattern) pair, got %r" % (item,), line)
        lhs = parse_value(item[0], line)
        if not isinstance(lhs, Path):
            raise GrammarError("constraint lhs must be a path", line)
        pairs.append((lhs, parse_value(item[1], line)))
    return tuple(pairs)


def _parse_inherited(form, line):
    decls = []
    for item in form:
        if not (isinstance(item, list) and len(item) == 3):
            raise GrammarError("expected (Var attr template) in :inh", line)
        target = str(item[0])
        if not target[0].isupper():
            raise GrammarError(":inh target must be a struc variable", line)
        decls.append((target, str(item[1]), parse_value(item[2], line)))
    return tuple(decls)


def _sections(body, line):
    sections = {}
    i = 0
    while i < len(body):
        key = body[i]
        if not isinstance(key, Keyword):
            raise GrammarError("expected :keyword, got %r" % (key,), line)
        if str(key) == "abstract":
            sections["abstract"] = True
            i += 1
            continue
        if i + 1 >= len(body):
            raise GrammarError("keyword :%s needs an argument" % key, line)
        sections[str(key)] = body[i + 1]
        i += 2
    return sections


def _build_construction(form, line):
    kind = str(form[0])
    if kind in ("construction", "lexeme") and len(form) < (2 if kind == "construction" else 3):
        raise GrammarError("truncated %s form" % kind, line)
    if kind == "construction":
        name = _parse_name(form[1], line)
        sections = _sections(form[2:], line)
        struc = _parse_struc(sections["struc"], line) if "struc" in sections else ()
        abstract = bool(sections.get("abstract"))
        if not struc and not abstract:
            raise GrammarError("construction %s has no struc" % repr(name), line)
    elif kind == "lexeme":
        surface = form[1]
        if isinstance(surface, Symbol) or not isinstance(surface, str):
            raise GrammarError("lexeme surface must be a quoted string", line)
        name = _parse_name(form[2], line)
        sections = _sections(form[3:], line)
        struc = (str(surface),)
        abstract = False
    else:
        raise GrammarError("unknown form %s" % kind, line)

    message = parse_value(sections["message"], line) if "message" in sections else Avm()
    if not isinstance(message, (Avm, Call, Path)):
        raise GrammarError(":message must be an avm, merge/add-mod, or path template", line)
    cons = Construction(
        name=name,
        struc=struc,
        context=_parse_pairs(sections.get("context", []), line),
        equations=_parse_pairs(sections.get("feat", []), line),
        inherited=_parse_inherited(sections.get("inh", []), line),
        modifier=_parse_modifier(sections.get("mod"), line),
        message=message,
        abstract=abstract,
    )
    _check_variables(cons, line)
    return cons


def _parse_modifier(form, line):
    if form is None:
        return None
    if not (isinstance(form, list) and len(form) == 2):
        raise GrammarError(":mod expects (ModifierVar HeadVar)", line)
    return (str(form[0]), str(form[1]))


def _template_roots(value):
    roots = set()
    if isinstance(value, Path):
        roots.add(value.root)
    elif isinstance(value, Var):
        roots.add(value.name)
    elif isinstance(value, Avm):
        for _, v in value.items():
            roots |= _template_roots(v)
    elif isinstance(value, (tuple,)):
        for v in value:
            roots |= _template_roots(v)
    elif isinstance(value, Call):
        for v in value.args:
            roots |= _template_roots(v)
    elif isinstance(value, Term):
        for v in value.args:
            roots |= _template_roots(v)
    return roots


def _check_variables(cons, line):
    allowed = set(cons.struc_vars()) | set(RESERVED_CONTEXT) | {"inh"}
    used = set()
    for lhs, rhs in cons.equations:
        used.add(lhs.root)
        used |= _template_roots(rhs)
    used |= _template_roots(cons.message)
    for target, _, template in cons.inherited:
        used.add(target)
        used |= _template_roots(template)
    for lhs, rhs in cons.context:
        if lhs.root not in RESERVED_CONTEXT:
            raise GrammarError(
                "context constraint in %s must be rooted at a discourse symbol"
                % repr(cons.name),
                line,
            )
    dangling = {u for u in used if u and u[0].isupper()} - set(cons.struc_vars())
    if dangling:
        raise GrammarError(
            "construction %s uses variables absent from struc: %s"
            % (repr(cons.name), ", ".join(sorted(dangling))),
            line,
        )
    if cons.modifier:
        for var in cons.modifier:
            if var not in cons.struc_vars():
                raise GrammarError(
                    ":mod variable %s not in struc of %s" % (var, repr(cons.name)), line
                )
    if cons.is_lexical() and not is_ground(cons.message):
        raise GrammarError(
            "lexeme %s has a non-ground message" % repr(cons.name), line
        )


def load_grammar(source):
    """Load a grammar from DSL text."""
    try:
        forms = sexpr.parse(source)
    except SexprError as exc:
        raise GrammarError(str(exc)) from exc
    constructions = []
    for form, line in forms:
        if not isinstance(form, list) or not form:
            raise GrammarError("expected a (construction ...) or (lexeme ...) form", line)
        constructions.append(_build_construction(form, line))
    constructions = _apply_abstract_defaults(constructions)
    return Grammar(constructions)


def _apply_abstract_defaults(constructions):
    defaults = {
        c.head: c.message
        for c in constructions
        if c.abstract and not c.name.args
    }
    out = []
    for cons in constructions:
        if not cons.abstract and cons.head in defaults:
            merged = override(defaults[cons.head], cons.message)
            cons = Construction(
                name=cons.name,
                struc=cons.struc,
                context=cons.context,
                equations=cons.equations,
                inherited=cons.inherited,
                modifier=cons.modifier,
                message=merged,
                abstract=False,
            )
        out.append(cons)
    return out


# ---------------------------------------------------------------------------
# L-attributedness validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    construction: Term
    attribute: str
    dependency: str

    def __str__(self):
        return "%s: inherited %s depends on %s" % (
            repr(self.construction),
            self.attribute,
            self.dependency,
        )


def validate_l_attributed(grammar):
    """Check every inherited-attribute declaration for left-to-right order.

    An inherited attribute of the element at position i may depend only on
    the parent's inherited attributes (root ``inh``) or on struc variables at
    positions strictly left of i.  Returns a (possibly empty) list of
    violations; an empty list means the grammar is L-attributed.
    """
    violations = []
    for cons in grammar.constructions.values():
        positions = {}
        for idx, elem in enumerate(cons.struc):
            if isinstance(elem, Var):
                positions[elem.name] = idx
        for target, attr, template in cons.inherited:
            if target not in positions:
                violations.append(Violation(cons.name, attr, "unknown target %s" % target))
                continue
            tpos = positions[target]
            for root in _template_roots(template):
                if root == "inh" or root in RESERVED_CONTEXT:
                    continue
                if root not in positions:
                    violations.append(Violation(cons.name, attr, "unknown %s" % root))
                elif positions[root] >= tpos:
                    violations.append(Violation(cons.name, attr, root))
    return violations


def attribute_classification(grammar):
    """Per construction: synthesized message attributes and inherited decls."""
    table = {}
    for cons in grammar.constructions.values():
        inherited = {}
        for target, attr, _ in cons.inherited:
            inherited.setdefault(target, []).append(attr)
        synthesized = cons.message.attrs() if isinstance(cons.message, Avm) else ()
        table[cons.name] = {
            "synthesized": tuple(synthesized),
            "inherited": {k: tuple(v) for k, v in inherited.items()},
        }
    return table


# ---------------------------------------------------------------------------
# Serialization (round-trips through load_grammar)
# ---------------------------------------------------------------------------


def _emit_value(value):
    if isinstance(value, Path):
        head = "^?" if value.optional else "^"
        return "(%s %s)" % (head, " ".join([value.root] + list(value.attrs)))
    if isinstance(value, Avm):
        parts = []
        for name in sorted(value.attrs()):
            parts.append("%s %s" % (name, _emit_value(value.get(name))))
        return "(avm %s)" % " ".join(parts)
    if isinstance(value, tuple):
        return "(list %s)" % " ".join(_emit_value(v) for v in value)
    if isinstance(value, Term):
        return "(@ %s %s)" % (value.head, " ".join(_emit_value(a) for a in value.args))
    if isinstance(value, Call):
        return "(%s %s)" % (value.fn, " ".join(_emit_value(a) for a in value.args))
    if isinstance(value, Var):
        return value.name
    if value is ANY:
        return "*"
    if isinstance(value, int):
        return str(value)
    return '"%s"' % value if not value.replace("_", "").replace(".", "").isalnum() or value[0].isupper() else value


def _emit_struc_element(elem):
    if isinstance(elem, Var):
        return elem.name
    if isinstance(elem, OptionalToken):
        return "(opt %s)" % " ".join('"%s"' % t for t in elem.alternatives)
    return '"%s"' % elem


def serialize_grammar(grammar):
    """Emit DSL text that reloads to an equal grammar."""
    lines = []
    for cons in grammar.constructions.values():
        name = "(%s %s)" % (cons.name.head, " ".join(cons.name.args))
        if cons.is_lexical():
            parts = ['(lexeme "%s" %s' % (cons.struc[0], name)]
        else:
            parts = ["(construction %s" % name]
            if cons.abstract:
                parts.append("  :abstract")
            if cons.struc:
                parts.append(
                    "  :struc (%s)" % " ".join(_emit_struc_element(e) for e in cons.struc)
                )
        if cons.context:
            parts.append(
                "  :context (%s)"
                % " ".join(
                    "(%s %s)" % (_emit_value(l), _emit_value(r)) for l, r in cons.context
                )
            )
        if cons.equations:
            parts.append(
                "  :feat (%s)"
                % " ".join(
                    "(%s %s)" % (_emit_value(l), _emit_value(r)) for l, r in cons.equations
                )
            )
        if cons.inherited:
            parts.append(
                "  :inh (%s)"
                % " ".join(
                    "(%s %s %s)" % (t, a, _emit_value(v)) for t, a, v in cons.inherited
                )
            )
        if cons.modifier:
            parts.append("  :mod (%s %s)" % cons.modifier)
        if not isinstance(cons.message, Avm) or len(cons.message):
            parts.append("  :message %s" % _emit_value(cons.message))
        lines.append("\n".join(parts) + ")")
    return "\n\n".join(lines) + "\n"
