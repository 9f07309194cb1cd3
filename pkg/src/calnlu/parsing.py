"""Left-to-right chart parser over the construction grammar.

The parser works left to right with no lookahead.  Prediction is top-down,
seeded by the root categories; a construction is predicted only if its
context constraints hold in the current discourse context, and a modifier
attachment is created only if no domain filter vetoes it.  Inherited
attributes are evaluated when the dot passes a constituent.  The parser
returns ground message AVMs only -- structural descriptions are built
transiently and discarded.

``oracle_parse`` is an independent brute-force enumerator over all span
decompositions, used to cross-check the chart parser on short inputs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .avm import ABSENT, ANY, Avm, AvmError, Term, Var, match, resolve, substitute, to_text
from .grammar import OptionalToken, ROOT_HEADS, check_context


@dataclass(frozen=True)
class Token:
    surface: str
    position: int


_WORD = re.compile(r"[a-z0-9]+(?:[':][a-z0-9]+)*|[.,!?]")


def tokenize(text):
    """Lowercased word and punctuation tokens; numerals stay single tokens."""
    tokens = []
    for m in _WORD.finditer(text.lower()):
        tokens.append(Token(m.group(), len(tokens)))
    return tokens


@dataclass(frozen=True)
class Edge:
    cons: object          # Construction
    start: int
    end: int
    dot: int
    bindings: tuple       # of (var name, wrapper Avm with cons_n + M)
    env: Avm              # inherited attributes received from the parent

    def key(self):
        return (self.cons.name, self.start, self.end, self.dot, self.bindings, self.env)

    def is_complete(self):
        return self.dot == len(self.cons.struc)

    def next_element(self):
        return self.cons.struc[self.dot]

    def bindings_dict(self):
        return dict(self.bindings)


@dataclass(frozen=True)
class Constituent:
    name: Term
    message: Avm
    env: Avm
    start: int
    end: int


class _Chart:
    def __init__(self, n):
        self.active_at = {i: [] for i in range(n + 1)}     # awaiting a Var at end=i
        self.complete_at = {i: [] for i in range(n + 1)}   # constituents starting at i
        self.seen_edges = set()
        self.seen_complete = set()
        self.predicted = set()


def _wrapper(name, message):
    return Avm(cons_n=name, M=message)


def _inherited_env(edge, var_name):
    """Inherited attributes for the constituent about to fill ``var_name``."""
    attrs = {}
    bindings = edge.bindings_dict()
    bindings["inh"] = edge.env
    for target, attr, template in edge.cons.inherited:
        if target == var_name:
            value = substitute(template, bindings)
            attrs[attr] = value
    return Avm(attrs)


def _equations_hold(cons, var_name, wrapper, bindings):
    """Check the non-cons_n feature equations on ``var_name``."""
    env = dict(bindings)
    env[var_name] = wrapper
    for lhs, rhs in cons.message_equations(var_name):
        value = resolve(wrapper, lhs.attrs)
        if value is ABSENT:
            return False
        if match(rhs, value) is None:
            return False
    return True


def _filter_ok(cons, var_name, wrapper, bindings, filters):
    """Consult the domain filters when advancing over a modifier or its head."""
    if cons.modifier is None or filters is None:
        return True
    mod_var, head_var = cons.modifier
    merged = dict(bindings)
    merged[var_name] = wrapper
    if mod_var not in merged or head_var not in merged:
        return True  # checked once both constituents are bound
    mod_msg = merged[mod_var].get("M")
    head_msg = merged[head_var].get("M")
    return filters.allows(mod_msg, head_msg)


def _advance(edge, constituent, filters):
    """Fundamental rule: advance ``edge`` over a completed constituent."""
    var_name = edge.next_element().name
    for pattern in edge.cons.cons_n_patterns(var_name):
        if match(pattern, constituent.name) is None:
            return None
    wrapper = _wrapper(constituent.name, constituent.message)
    bindings = edge.bindings_dict()
    if not _equations_hold(edge.cons, var_name, wrapper, bindings):
        return None
    if not _filter_ok(edge.cons, var_name, wrapper, bindings, filters):
        return None
    expected_env = _inherited_env(edge, var_name)
    if constituent.env != expected_env:
        return None
    return Edge(
        cons=edge.cons,
        start=edge.start,
        end=constituent.end,
        dot=edge.dot + 1,
        bindings=edge.bindings + ((var_name, wrapper),),
        env=edge.env,
    )


def _complete_message(edge):
    """The edge's ground message, or None when the template cannot resolve.

    A non-optional path that fails to resolve acts as one more constraint on
    the construction, not as an error.
    """
    bindings = edge.bindings_dict()
    bindings["inh"] = edge.env
    try:
        return substitute(edge.cons.message, bindings)
    except AvmError:
        return None


def _ctx_avm(ctx):
    return ctx if isinstance(ctx, Avm) else ctx.to_avm()


def parse(grammar, filters, ctx, tokens):
    """All root messages over the full input, sorted deterministically."""
    constituents = _run_chart(grammar, filters, _ctx_avm(ctx), tokens)
    n = len(tokens)
    results = {}
    for item in constituents:
        if item.start == 0 and item.end == n and item.name.head in ROOT_HEADS:
            results[(item.name, item.message)] = None
    ordered = sorted(results, key=lambda pair: (repr(pair[0]), to_text(pair[1])))
    return ordered


def parse_count(grammar, filters, ctx, tokens):
    return len(parse(grammar, filters, ctx, tokens))


def _run_chart(grammar, filters, ctx_avm, tokens):
    n = len(tokens)
    if n == 0:
        return []
    words = [t.surface for t in tokens]
    chart = _Chart(n)
    agenda = []
    all_complete = []

    def push_edge(edge):
        key = edge.key()
        if key in chart.seen_edges:
            return
        chart.seen_edges.add(key)
        agenda.append(("edge", edge))

    def predict(cons, pos, env):
        key = (cons.name, pos, env)
        if key in chart.predicted:
            return
        chart.predicted.add(key)
        if not check_context(cons.context, ctx_avm):
            return
        push_edge(Edge(cons=cons, start=pos, end=pos, dot=0, bindings=(), env=env))

    candidate_cache = {}

    def candidates(cons, var_name):
        key = (cons.name, var_name)
        if key not in candidate_cache:
            patterns = cons.cons_n_patterns(var_name)
            candidate_cache[key] = grammar.candidates_for(patterns)
        return candidate_cache[key]

    for root in grammar.candidates_for(()):
        if root.head in ROOT_HEADS:
            predict(root, 0, Avm())

    while agenda:
        kind, item = agenda.pop()
        if kind == "edge":
            edge = item
            if edge.is_complete():
                message = _complete_message(edge)
                if message is None:
                    continue
                constituent = Constituent(
                    name=edge.cons.name,
                    message=message,
                    env=edge.env,
                    start=edge.start,
                    end=edge.end,
                )
                ckey = (
                    constituent.name,
                    constituent.start,
                    constituent.end,
                    constituent.message,
                    constituent.env,
                )
                if ckey in chart.seen_complete:
                    continue
                chart.seen_complete.add(ckey)
                chart.complete_at[constituent.start].append(constituent)
                all_complete.append(constituent)
                for waiting in list(chart.active_at[constituent.start]):
                    advanced = _advance(waiting, constituent, filters)
                    if advanced is not None:
                        push_edge(advanced)
                continue
            element = edge.next_element()
            if isinstance(element, str):
                if edge.end < n and words[edge.end] == element:
                    push_edge(
                        Edge(edge.cons, edge.start, edge.end + 1, edge.dot + 1, edge.bindings, edge.env)
                    )
            elif isinstance(element, OptionalToken):
                push_edge(Edge(edge.cons, edge.start, edge.end, edge.dot + 1, edge.bindings, edge.env))
                if edge.end < n and words[edge.end] in element.alternatives:
                    push_edge(
                        Edge(edge.cons, edge.start, edge.end + 1, edge.dot + 1, edge.bindings, edge.env)
                    )
            elif isinstance(element, Var):
                chart.active_at[edge.end].append(edge)
                env = _inherited_env(edge, element.name)
                for cand in candidates(edge.cons, element.name):
                    predict(cand, edge.end, env)
                for constituent in list(chart.complete_at[edge.end]):
                    advanced = _advance(edge, constituent, filters)
                    if advanced is not None:
                        push_edge(advanced)
    return all_complete


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------


def oracle_parse(grammar, filters, ctx, tokens):
    """Enumerate every construction over every span decomposition.

    Applies the same context, feature-equation, inherited-attribute and
    filter checks as the chart parser; intended for short inputs (the cost
    is exponential in principle, memoized per (construction, span, env)).
    """
    ctx_avm = _ctx_avm(ctx)
    n = len(tokens)
    if n == 0:
        return []
    words = [t.surface for t in tokens]
    memo = {}

    def fill(cons, i, j, env):
        key = (cons.name, i, j, env)
        if key in memo:
            return memo[key]
        memo[key] = []  # cycle guard; left recursion cannot produce new spans
        if not check_context(cons.context, ctx_avm):
            return memo[key]
        messages = set()
        for bindings in assignments(cons, 0, i, j, (), env):
            env_bindings = dict(bindings)
            env_bindings["inh"] = env
            try:
                messages.add(substitute(cons.message, env_bindings))
            except AvmError:
                continue
        memo[key] = sorted(messages, key=to_text)
        return memo[key]

    def assignments(cons, elem_idx, pos, j, bindings, env):
        if elem_idx == len(cons.struc):
            if pos == j:
                yield bindings
            return
        element = cons.struc[elem_idx]
        last = elem_idx == len(cons.struc) - 1
        if isinstance(element, str):
            if pos < j and words[pos] == element:
                yield from assignments(cons, elem_idx + 1, pos + 1, j, bindings, env)
            return
        if isinstance(element, OptionalToken):
            yield from assignments(cons, elem_idx + 1, pos, j, bindings, env)
            if pos < j and words[pos] in element.alternatives:
                yield from assignments(cons, elem_idx + 1, pos + 1, j, bindings, env)
            return
        var_name = element.name
        parent = Edge(cons=cons, start=0, end=0, dot=0, bindings=bindings, env=env)
        child_env = _inherited_env(parent, var_name)
        patterns = cons.cons_n_patterns(var_name)
        ends = [j] if last else range(pos + 1, j + 1)
        for cand in grammar.candidates_for(patterns):
            for end in ends:
                if end <= pos:
                    continue
                for message in fill(cand, pos, end, child_env):
                    wrapper = _wrapper(cand.name, message)
                    if not _equations_hold(cons, var_name, wrapper, dict(bindings)):
                        continue
                    if not _filter_ok(cons, var_name, wrapper, dict(bindings), filters):
                        continue
                    yield from assignments(
                        cons,
                        elem_idx + 1,
                        end,
                        j,
                        bindings + ((var_name, wrapper),),
                        env,
                    )

    results = {}
    for cons in grammar.candidates_for(()):
        if cons.head not in ROOT_HEADS:
            continue
        for message in fill(cons, 0, n, Avm()):
            results[(cons.name, message)] = None
    return sorted(results, key=lambda pair: (repr(pair[0]), to_text(pair[1])))
