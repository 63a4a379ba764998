"""Deterministic string transducers and the grammar closure constructions."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .automata import Automaton, finite_language
from .et0l import LimitingGrammar, Table
from .tree import GeneratingSet, compose, identity, is_identity

FAIL = "fail"


class InjectivityViolation(ValueError):
    def __init__(self, msg, pair):
        super().__init__(msg)
        self.pair = pair


class GeodesicSearchExhausted(RuntimeError):
    pass


@dataclass
class Gsm:
    """delta[(letter, state)] = (output word, next state); missing entries go to a fail state."""

    inputs: tuple
    outputs: tuple
    states: tuple
    accepting: frozenset
    initial: object
    delta: dict

    def step(self, letter, state):
        if state == FAIL:
            return (), FAIL
        return self.delta.get((letter, state), ((), FAIL))


def apply_gsm(M: Gsm, w):
    out = []
    q = M.initial
    for x in w:
        o, q = M.step(x, q)
        out.extend(o)
    return tuple(out) if q in M.accepting else None


@dataclass
class PrefixCode:
    words: dict  # codeword tuple -> output tuple

    def __post_init__(self):
        ws = list(self.words)
        for u in ws:
            if not u:
                raise ValueError("codewords must be nonempty")
            for v in ws:
                if u != v and v[: len(u)] == u:
                    raise ValueError(f"{u} is a prefix of {v}")


def decoding_automaton(code: PrefixCode, inputs=None, outputs=None) -> Gsm:
    """States are the proper prefixes of codewords; a finished codeword emits its output."""
    prefixes = {()}
    for w in code.words:
        for k in range(1, len(w)):
            prefixes.add(w[:k])
    letters = inputs or tuple(sorted({x for w in code.words for x in w}))
    outs = outputs or tuple(sorted({y for o in code.words.values() for y in o}))
    delta = {}
    for u in prefixes:
        for x in letters:
            ux = u + (x,)
            if ux in code.words:
                delta[(x, u)] = (tuple(code.words[ux]), ())
            elif ux in prefixes:
                delta[(x, u)] = ((), ux)
    states = tuple(sorted(prefixes, key=lambda p: (len(p), p))) + (FAIL,)
    accepting = frozenset([()]) if code.words else frozenset()
    return Gsm(tuple(letters), tuple(outs), states, accepting, (), delta)


def check_injective(M: Gsm, n: int):
    """Exhaustive check on inputs up to length n; raises with a colliding pair."""
    seen = {}
    for k in range(n + 1):
        for w in product(M.inputs, repeat=k):
            img = apply_gsm(M, w)
            if img is None:
                continue
            if img in seen and seen[img] != w:
                raise InjectivityViolation(f"{seen[img]} and {w} both map to {img}", (seen[img], w))
            seen[img] = w


def _geodesics(X: GeneratingSet, length: int, cap: int):
    """Words of exactly the given length that are geodesic, in BFS order."""
    seen = {identity(X.d)}
    layer = [((), identity(X.d))]
    for n in range(length):
        nxt = []
        for w, g in layer:
            for x in X.names:
                h = compose(g, X[x])
                if h not in seen:
                    seen.add(h)
                    nxt.append((w + (x,), h))
                    if len(seen) > cap:
                        raise GeodesicSearchExhausted(f"more than {cap} elements within radius {n + 1}")
        layer = nxt
        if not layer:
            raise GeodesicSearchExhausted(f"the group has no elements of length {length}")
    return [w for w, _ in layer]


def build_antichain(X: GeneratingSet, suffixes, cap: int = 200000):
    """Trivial words w_i with {w_i u_i} a prefix antichain.

    w_1 = alpha_1 alpha_1^-1 for the first nontrivial generator; later alpha_i are
    geodesics of length |w_{i-1}| + 1 and w_i = alpha_i alpha_i^-1.
    """
    ws = []
    prev = None
    for i, _ in enumerate(suffixes):
        if i == 0:
            alpha = next(((x,) for x in X.names if not is_identity(X[x])), None)
            if alpha is None:
                raise GeodesicSearchExhausted("all generators are trivial")
        else:
            alpha = _geodesics(X, len(prev) + 1, cap)[0]
        w = alpha + X.invert_word(alpha)
        ws.append(w)
        prev = w
    return [w + tuple(u) for w, u in zip(ws, suffixes)], ws


def is_antichain(words) -> bool:
    return all(u == v or v[: len(u)] != u for u in words for v in words)


# ---------------------------------------------------------------- grammar transformation


@dataclass(frozen=True)
class Annotated:
    """Symbol s read while the transducer moves from state q to state q2."""

    symbol: object
    q: object
    q2: object

    def __str__(self):
        return f"<{self.symbol}:{_state_name(self.q)}:{_state_name(self.q2)}>"


@dataclass(frozen=True)
class NewStart:
    inner: object

    def __str__(self):
        return f"^{self.inner}"


def _state_name(q):
    if q == FAIL:
        return "fail"
    if isinstance(q, tuple):
        return "".join(map(str, q)) or "e"
    return str(q)


class _AnnotatedImage(Automaton):
    """Words of an image automaton with consecutive transducer states threaded through."""

    deterministic = True

    def __init__(self, aut, q, q2, states, E, M):
        self.aut = aut
        self.q2 = q2
        self.states = states
        self.E = E
        self.M = M
        self.start = (aut.start, q)
        self._arcs = {}

    def arcs(self, state):
        if state in self._arcs:
            return self._arcs[state]
        s, q = state
        out = []
        for x, t in self.aut.arcs(s):
            if self.E.is_terminal(x):
                # terminals are never rewritten, so their end state is forced
                r = self.M.step(x, q)[1]
                if r in self.states:
                    out.append((Annotated(x, q, r), (t, r)))
                continue
            for r in self.states:
                out.append((Annotated(x, q, r), (t, r)))
        self._arcs[state] = out
        return out

    def is_final(self, state):
        return self.aut.is_final(state[0]) and state[1] == self.q2


class _StartImage(Automaton):
    """alpha'' of the new start: the union over accepting end states."""

    deterministic = False

    def __init__(self, parts):
        self.parts = parts
        self.start = "root"

    def arcs(self, state):
        if state == "root":
            return [(None, (i, p.start)) for i, p in enumerate(self.parts)]
        i, s = state
        return [(x, (i, t)) for x, t in self.parts[i].arcs(s)]

    def is_final(self, state):
        return state != "root" and self.parts[state[0]].is_final(state[1])


class _FinishImage(Automaton):
    """gamma' followed by replacing annotated terminals by their transducer output."""

    deterministic = False

    def __init__(self, inner, E, M):
        self.inner = inner
        self.E = E
        self.M = M
        self.start = (inner.start, ())

    def arcs(self, state):
        s, pending = state
        if pending:
            return [(pending[0], (s, pending[1:]))]
        out = []
        for x, t in self.inner.arcs(s):
            if isinstance(x, Annotated) and self.E.is_terminal(x.symbol):
                o, nxt = self.M.step(x.symbol, x.q)
                if nxt == x.q2:
                    out.append((None, (t, tuple(o))))
                    continue
            out.append((x, (t, ())))
        return out

    def is_final(self, state):
        return not state[1] and self.inner.is_final(state[0])


def transform_grammar(E: LimitingGrammar, M: Gsm, injectivity_check_len: int = 6) -> LimitingGrammar:
    """Grammar for M(L(E)) whose nonterminals are symbols annotated with transducer state pairs.

    alpha'' starts by guessing an accepting run, every table image is annotated
    with the intermediate states, and gamma'' finally replaces each annotated
    terminal by its transducer output when that edge exists.
    """
    check_injective(M, injectivity_check_len)
    states = tuple(_useful_states(M))
    new_start = NewStart(E.start)
    cache = {}

    def annotated(table, sym):
        if not isinstance(sym, Annotated) or E.is_terminal(sym.symbol):
            return None
        key = (table.name, sym)
        if key not in cache:
            aut = table.det_image(sym.symbol)
            cache[key] = None if aut is None else _AnnotatedImage(aut, sym.q, sym.q2, states, E, M)
        return cache[key]

    class _Alpha(Table):
        def image(self, sym):
            if sym == new_start:
                parts = []
                for qa in sorted(M.accepting, key=_state_name):
                    top = Annotated(E.start, M.initial, qa)
                    parts.append(annotated(E.alpha, top) or finite_language([(top,)]))
                return _StartImage(parts)
            return annotated(E.alpha, sym)

    class _Beta(Table):
        def image(self, sym):
            return annotated(E.beta, sym)

    class _Gamma(Table):
        def image(self, sym):
            if isinstance(sym, Annotated) and E.is_terminal(sym.symbol):
                out, nxt = M.step(sym.symbol, sym.q)
                return finite_language([tuple(out)]) if nxt == sym.q2 else None
            inner = annotated(E.gamma, sym)
            return None if inner is None else _FinishImage(inner, E, M)

    return LimitingGrammar(M.outputs, None, _Alpha("alpha"), _Beta("beta"), _Gamma("gamma"), new_start, verify=False)


def _useful_states(M: Gsm):
    """States reachable from the initial state that can still reach acceptance."""
    reach = [M.initial]
    seen = {M.initial}
    i = 0
    while i < len(reach):
        q = reach[i]
        i += 1
        for x in M.inputs:
            _, t = M.step(x, q)
            if t not in seen:
                seen.add(t)
                reach.append(t)
    live = {q for q in reach if q in M.accepting}
    changed = True
    while changed:
        changed = False
        for q in reach:
            if q not in live and any(M.step(x, q)[1] in live for x in M.inputs):
                live.add(q)
                changed = True
    return [q for q in reach if q in live]


def identity_gsm(letters) -> Gsm:
    letters = tuple(letters)
    return Gsm(letters, letters, (0,), frozenset([0]), 0, {(x, 0): ((x,), 0) for x in letters})


def restrict_to_subgroup(E: LimitingGrammar, X: GeneratingSet, Y: dict, injectivity_check_len: int = 6):
    """Grammar over the names of Y for words whose image under y -> u_y lies in L(E).

    Y maps each new generator name to its word over X.  Codewords are w_y u_y
    with w_y trivial in the group, chosen so no codeword prefixes another.
    """
    names = list(Y)
    if not names:
        code = PrefixCode({})
        M = decoding_automaton(code, inputs=X.names, outputs=())
    else:
        words, _ = build_antichain(X, [tuple(Y[n]) for n in names])
        code = PrefixCode({w: (n,) for w, n in zip(words, names)})
        M = decoding_automaton(code, inputs=X.names, outputs=tuple(names))
    return transform_grammar(E, M, injectivity_check_len), code, M
