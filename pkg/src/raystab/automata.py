"""Finite automata over arbitrary hashable symbols.

An automaton exposes ``start``, ``arcs(state)`` (pairs ``(symbol, next)``,
symbol ``None`` for an empty move) and ``is_final(state)``.  States may be
produced lazily, which is how the constructed grammar tables stay small.
"""
from __future__ import annotations

import heapq
import re
from collections import Counter

EPS = None


class RegexError(ValueError):
    pass


class Automaton:
    deterministic = False
    start = None

    def arcs(self, state):
        raise NotImplementedError

    def is_final(self, state) -> bool:
        raise NotImplementedError


class Nfa(Automaton):
    """Explicit automaton; ``arcs`` maps a state to a list of (symbol, next)."""

    def __init__(self, start, finals, arcs, deterministic=None):
        self.start = start
        self.finals = frozenset(finals)
        self._arcs = {s: list(v) for s, v in arcs.items()}
        if deterministic is None:
            deterministic = _looks_deterministic(self._arcs)
        self.deterministic = deterministic

    def arcs(self, state):
        return self._arcs.get(state, ())

    def is_final(self, state):
        return state in self.finals

    def __repr__(self):
        return f"Nfa(states={len(reachable_states(self))}, det={self.deterministic})"


def _looks_deterministic(arcs) -> bool:
    for edges in arcs.values():
        syms = [s for s, _ in edges]
        if EPS in syms or len(set(syms)) != len(syms):
            return False
    return True


def reachable_states(aut: Automaton) -> list:
    seen = {aut.start}
    order = [aut.start]
    i = 0
    while i < len(order):
        for _, t in aut.arcs(order[i]):
            if t not in seen:
                seen.add(t)
                order.append(t)
        i += 1
    return order


def explicit(aut: Automaton) -> Nfa:
    """Materialize the reachable part of a (lazy) automaton, states renumbered."""
    order = reachable_states(aut)
    num = {s: i for i, s in enumerate(order)}
    arcs = {num[s]: [(x, num[t]) for x, t in aut.arcs(s)] for s in order}
    finals = [num[s] for s in order if aut.is_final(s)]
    return Nfa(0, finals, arcs, aut.deterministic or None)


def trim(aut: Automaton) -> Nfa:
    """Explicit automaton restricted to states that can still reach a final state."""
    nfa = explicit(aut)
    back = {}
    for s, edges in nfa._arcs.items():
        for x, t in edges:
            back.setdefault(t, []).append(s)
    live = set(nfa.finals)
    todo = list(live)
    while todo:
        t = todo.pop()
        for s in back.get(t, ()):
            if s not in live:
                live.add(s)
                todo.append(s)
    arcs = {s: [(x, t) for x, t in e if t in live] for s, e in nfa._arcs.items() if s in live}
    return Nfa(0, nfa.finals, arcs, nfa.deterministic)


def eps_closure(aut: Automaton, states) -> frozenset:
    out = set(states)
    todo = list(out)
    while todo:
        s = todo.pop()
        for x, t in aut.arcs(s):
            if x is EPS and t not in out:
                out.add(t)
                todo.append(t)
    return frozenset(out)


def determinize(aut: Automaton, size_cap: int = 200000) -> Nfa:
    if aut.deterministic:
        return explicit(aut)
    start = eps_closure(aut, [aut.start])
    num = {start: 0}
    order = [start]
    arcs = {}
    finals = []
    i = 0
    while i < len(order):
        cur = order[i]
        if any(aut.is_final(s) for s in cur):
            finals.append(i)
        moves = {}
        for s in cur:
            for x, t in aut.arcs(s):
                if x is not EPS:
                    moves.setdefault(x, set()).add(t)
        row = []
        for x, targets in moves.items():
            nxt = eps_closure(aut, targets)
            if nxt not in num:
                if len(num) >= size_cap:
                    raise RuntimeError(f"determinization exceeded {size_cap} states")
                num[nxt] = len(order)
                order.append(nxt)
            row.append((x, num[nxt]))
        arcs[i] = row
        i += 1
    return Nfa(0, finals, arcs, True)



def minimize_dfa(aut: Automaton) -> Nfa:
    """Moore partition refinement on the trimmed determinized automaton."""
    dfa = trim(determinize(aut) if not aut.deterministic else aut)
    states = sorted(dfa._arcs)
    if not states:
        return Nfa(0, [], {0: []}, True)
    cls = {s: int(s in dfa.finals) for s in states}
    while True:
        sigs = {}
        new = {}
        for s in states:
            sig = (cls[s], tuple(sorted((str(x), cls[t]) for x, t in dfa._arcs[s])))
            new[s] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == len(set(cls.values())):
            break
        cls = new
    cls = new
    arcs = {c: [] for c in set(cls.values())}
    done = set()
    for s in states:
        if cls[s] in done:
            continue
        done.add(cls[s])
        arcs[cls[s]] = [(x, cls[t]) for x, t in dfa._arcs[s]]
    finals = {cls[s] for s in dfa.finals}
    return Nfa(cls[dfa.start], finals, arcs, True)

def accepts(aut: Automaton, word) -> bool:
    cur = eps_closure(aut, [aut.start])
    for x in word:
        nxt = set()
        for s in cur:
            for y, t in aut.arcs(s):
                if y == x and y is not EPS:
                    nxt.add(t)
        if not nxt:
            return False
        cur = eps_closure(aut, nxt)
    return any(aut.is_final(s) for s in cur)


def words(aut: Automaton, cap: int) -> Counter:
    """Accepted words of length <= cap with their path multiplicities (1 each if deterministic)."""
    if not aut.deterministic:
        aut = determinize(aut)
    out = Counter()
    stack = [(aut.start, ())]
    while stack:
        s, w = stack.pop()
        if aut.is_final(s):
            out[w] += 1
        if len(w) < cap:
            for x, t in aut.arcs(s):
                stack.append((t, w + (x,)))
    return out


def is_empty(aut: Automaton) -> bool:
    return not any(aut.is_final(s) for s in reachable_states(aut))


def accepts_empty(aut: Automaton) -> bool:
    return any(aut.is_final(s) for s in eps_closure(aut, [aut.start]))


def symbols(aut: Automaton) -> set:
    return {x for s in reachable_states(aut) for x, _ in aut.arcs(s) if x is not EPS}


def min_weight(aut: Automaton, weight) -> float:
    """Smallest total weight of an accepted word; ``weight(symbol)`` may be inf."""
    inf = float("inf")
    best = {aut.start: 0}
    heap = [(0, 0, aut.start)]
    tick = 1
    while heap:
        c, _, s = heapq.heappop(heap)
        if c > best.get(s, inf):
            continue
        if aut.is_final(s):
            return c
        for x, t in aut.arcs(s):
            w = 0 if x is EPS else weight(x)
            if w == inf:
                continue
            if c + w < best.get(t, inf):
                best[t] = c + w
                heapq.heappush(heap, (c + w, tick, t))
                tick += 1
    return inf


def finite_language(words_) -> Nfa:
    """Trie automaton accepting exactly the given words."""
    arcs = {0: []}
    finals = set()
    children = {}
    for w in words_:
        s = 0
        for x in w:
            key = (s, x)
            if key not in children:
                children[key] = len(arcs)
                arcs[s].append((x, len(arcs)))
                arcs[len(arcs)] = []
            s = children[key]
        finals.add(s)
    return Nfa(0, finals, arcs, True)


def single_symbol(sym) -> Nfa:
    return finite_language([(sym,)])


_TOKEN = re.compile(r"\s*(\(|\)|\||\*|\+|\?|[^\s()|*+?]+)")
EPS_TOKENS = ("eps", "ε")
EMPTY_TOKENS = ("empty", "∅")


def tokenize(text: str) -> list[str]:
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise RegexError(f"cannot tokenize at {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _Builder:
    def __init__(self):
        self.arcs = {}

    def state(self):
        s = len(self.arcs)
        self.arcs[s] = []
        return s

    def edge(self, s, x, t):
        self.arcs[s].append((x, t))


def compile_regex(text: str) -> Nfa:
    """Regex over whitespace-separated symbol tokens: ``|``, juxtaposition,
    ``* + ?``, parentheses, ``eps`` for the empty word and ``empty`` for no word."""
    tokens = tokenize(text)
    b = _Builder()
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def alt():
        nonlocal pos
        frag = cat()
        while peek() == "|":
            pos += 1
            other = cat()
            s, f = b.state(), b.state()
            b.edge(s, EPS, frag[0])
            b.edge(s, EPS, other[0])
            b.edge(frag[1], EPS, f)
            b.edge(other[1], EPS, f)
            frag = (s, f)
        return frag

    def cat():
        frag = None
        while peek() not in (None, "|", ")"):
            nxt = rep()
            if frag is None:
                frag = nxt
            else:
                b.edge(frag[1], EPS, nxt[0])
                frag = (frag[0], nxt[1])
        if frag is None:
            s = b.state()
            frag = (s, s)
        return frag

    def rep():
        nonlocal pos
        frag = atom()
        while peek() in ("*", "+", "?"):
            op = tokens[pos]
            pos += 1
            s, f = b.state(), b.state()
            b.edge(s, EPS, frag[0])
            b.edge(frag[1], EPS, f)
            if op in ("*", "?"):
                b.edge(s, EPS, f)
            if op in ("*", "+"):
                b.edge(frag[1], EPS, frag[0])
            frag = (s, f)
        return frag

    def atom():
        nonlocal pos
        tok = peek()
        if tok is None or tok in ("|", ")", "*", "+", "?"):
            raise RegexError(f"unexpected {tok!r} in {text!r}")
        pos += 1
        if tok == "(":
            frag = alt()
            if peek() != ")":
                raise RegexError(f"missing ')' in {text!r}")
            pos += 1
            return frag
        s, f = b.state(), b.state()
        if tok in EPS_TOKENS:
            b.edge(s, EPS, f)
        elif tok not in EMPTY_TOKENS:
            b.edge(s, tok, f)
        return (s, f)

    start, final = alt()
    if pos != len(tokens):
        raise RegexError(f"trailing input {tokens[pos:]} in {text!r}")
    return Nfa(start, [final], b.arcs, False)


def relabel(aut: Automaton, mapping) -> Nfa:
    """Rename symbols (e.g. token strings to richer symbol objects)."""
    nfa = explicit(aut)
    arcs = {s: [(x if x is EPS else mapping(x), t) for x, t in e] for s, e in nfa._arcs.items()}
    return Nfa(nfa.start, nfa.finals, arcs, nfa.deterministic)
