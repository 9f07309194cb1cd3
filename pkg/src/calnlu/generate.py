"""Surface-form enumeration: the grammar run in reverse.

Expands a construction's vehicle breadth-first by derivation depth, applying
the same context, feature-equation and attachment-filter checks as the
parser, and emits distinct surface strings paired with their messages.
Every emitted string re-tokenizes to the token sequence it was built from,
so each one can be round-tripped through the parser.
"""

from __future__ import annotations

import re

from .avm import Avm, AvmError, substitute
from .grammar import OptionalToken, check_context
from .parsing import _ctx_avm, _equations_hold, _filter_ok, _wrapper

_DEFAULT_DEPTH_CAP = 5


class GenerationError(Exception):
    pass


def detokenize(tokens):
    text = " ".join(tokens)
    return re.sub(r" (?=[!.,?])", "", text)


class Enumerator:
    """Memoized language-by-depth tables over one grammar and context."""

    def __init__(self, grammar, filters, ctx_avm):
        self.grammar = grammar
        self.filters = filters
        self.ctx = ctx_avm
        self._memo = {}

    def language(self, cons, depth):
        """All (tokens, message) pairs derivable from ``cons`` within ``depth``."""
        key = (cons.name, depth)
        if key in self._memo:
            return self._memo[key]
        items = []
        self._memo[key] = items
        if depth <= 0 or not check_context(cons.context, self.ctx):
            return items
        seen = set()
        for tokens, bindings in self._expand(cons, 0, (), (), depth):
            env = dict(bindings)
            env["inh"] = Avm()
            try:
                message = substitute(cons.message, env)
            except AvmError:
                continue
            pair = (tokens, message)
            if pair not in seen:
                seen.add(pair)
                items.append(pair)
        return items

    def _expand(self, cons, idx, tokens, bindings, depth):
        if idx == len(cons.struc):
            yield tokens, bindings
            return
        element = cons.struc[idx]
        if isinstance(element, str):
            yield from self._expand(cons, idx + 1, tokens + (element,), bindings, depth)
            return
        if isinstance(element, OptionalToken):
            yield from self._expand(cons, idx + 1, tokens, bindings, depth)
            for alt in element.alternatives:
                yield from self._expand(cons, idx + 1, tokens + (alt,), bindings, depth)
            return
        var_name = element.name
        patterns = cons.cons_n_patterns(var_name)
        for cand in self.grammar.candidates_for(patterns):
            for child_tokens, message in self.language(cand, depth - 1):
                wrapper = _wrapper(cand.name, message)
                if not _equations_hold(cons, var_name, wrapper, dict(bindings)):
                    continue
                if not _filter_ok(cons, var_name, wrapper, dict(bindings), self.filters):
                    continue
                yield from self._expand(
                    cons,
                    idx + 1,
                    tokens + child_tokens,
                    bindings + ((var_name, wrapper),),
                    depth,
                )


def enumerate_utterances(grammar, filters, ctx, root_name, limit,
                         depth_cap=_DEFAULT_DEPTH_CAP):
    """Yield up to ``limit`` distinct (surface string, message) pairs.

    Expansion is breadth-first by derivation depth: all strings reachable at
    depth d are emitted before any string first reachable at depth d+1.
    """
    root = grammar.constructions.get(root_name)
    if root is None or root.abstract:
        raise GenerationError("unknown construction %r" % (root_name,))
    enum = Enumerator(grammar, filters, _ctx_avm(ctx))
    emitted = {}
    for depth in range(1, depth_cap + 1):
        for tokens, message in enum.language(root, depth):
            text = detokenize(tokens)
            if text in emitted:
                continue
            emitted[text] = message
            yield text, message
            if len(emitted) >= limit:
                return
