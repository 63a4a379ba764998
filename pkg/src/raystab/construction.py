"""Unambiguous limiting ET0L grammars for ray stabilisers.

For a symmetric generating set of finitary and directed automorphisms and a
ray eta = a b^w, ``build_grammars`` returns E with L(E) the words fixing eta
and E' with L(E') the words moving it.

Nonterminals are placeholders: ``[i.p,j.q]`` stands for the words w with
(u_i v_i^m p)·w = u_j v_j^m q, decorations bounded by the level;
``[i.p,~eta]`` for those ending off eta; ``[i.p,any]`` for all of them.
Here (u_i, v_i) is the i-th pair of the index set and |p| = |q| = 2 ell.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

from .automata import Automaton
from .classify import Directed, Finitary, classify, directional_depth, finitary_depth, trivial_states
from .et0l import LimitingGrammar, Table
from .tree import GeneratingSet, Ray, act_ray, act_vertex, format_vertex, section


class NotFinDirGenerator(ValueError):
    pass


class NotSymmetric(ValueError):
    pass


# ---------------------------------------------------------------- index set


@dataclass
class IndexSet:
    ell: int
    pairs: tuple  # ((u, v), ...) with |u| = |v| = ell, sorted
    spine_choice: dict  # directed generator -> pair index of its spine
    eta: int  # pair index of the boundary ray
    finitary: dict = field(default_factory=dict)  # name -> depth
    directed: tuple = ()  # directed generator names in generator order

    def ray(self, i: int) -> Ray:
        u, v = self.pairs[i]
        return Ray(u, v)

    def index_of(self, r: Ray):
        prefix = r.prefix(2 * self.ell)
        for i, (u, v) in enumerate(self.pairs):
            if u + v == prefix:
                return i if self.ray(i) == r else None
        return None

    def u(self, i):
        return self.pairs[i][0]

    def v(self, i):
        return self.pairs[i][1]


def _cut(r: Ray, ell: int):
    return r.prefix(ell), r.prefix(2 * ell)[ell:]


def _lcm(values):
    out = 1
    for x in values:
        if x:
            out = out * x // math.gcd(out, x)
    return out


def split_generators(X: GeneratingSet):
    finitary, directed = {}, {}
    for name in X.names:
        c = classify(X[name])
        if isinstance(c, Finitary):
            finitary[name] = c.depth
        elif isinstance(c, Directed):
            directed[name] = c.spine
        else:
            raise NotFinDirGenerator(f"generator {name} is neither finitary nor directed ({type(c).__name__})")
    return finitary, directed


def off_spine_depth(g, sp) -> int:
    """Largest finitary depth of a section just off the spine (one period suffices)."""
    path = sp.initial + sp.period
    best = 0
    for k, on in enumerate(path):
        for x in range(g.d):
            if x != on:
                best = max(best, finitary_depth(section(g, path[:k] + (x,))) or 0)
    return best


def build_index_set(X: GeneratingSet, a, b) -> IndexSet:
    if not b:
        raise ValueError("period must be nonempty")
    finitary, directed = split_generators(X)
    eta = Ray(tuple(a), tuple(b))
    seeds = {eta}
    for x, sp in directed.items():
        s = sp.ray
        seeds.add(s)
        for y in directed:
            seeds.add(act_ray(X[y], s))
    # common length: every period divides it and every initial part fits
    ell = _lcm([len(r.period) for r in seeds] + [max(len(r.initial) for r in seeds)])
    # doubling makes the first halves of distinct rays distinct
    ell *= 2
    extra = [len(sp.initial) for sp in directed.values()]
    extra += [len(sp.period) for sp in directed.values()]
    extra += list(finitary.values())
    extra += [off_spine_depth(X[x], sp) for x, sp in directed.items()]
    ell = _lcm([ell] + extra)
    pairs = tuple(sorted({_cut(r, ell) for r in seeds}))
    us = [u for u, _ in pairs]
    assert len(set(us)) == len(us), "pairs with equal initial parts"
    index = IndexSet(ell, pairs, {}, 0, dict(finitary), tuple(x for x in X.names if x in directed))
    index.eta = index.index_of(eta)
    for x, sp in directed.items():
        i = index.index_of(sp.ray)
        u, v = pairs[i]
        if section(X[x], u) != section(X[x], u + v):
            raise AssertionError(f"spine of {x} is not periodic from length {ell}")
        index.spine_choice[x] = i
    return index


# ---------------------------------------------------------------- step relation


@dataclass
class StepRelation:
    """(x, q, y) -> (q', y', depth) for directed x along its spine pair."""

    entries: dict
    image_pair: dict  # directed x -> pair index of spine(x)·x
    viable: dict  # y -> set of (pair, q) admitting at least one step

    def __len__(self):
        return len(self.entries)


def build_step_relation(X: GeneratingSet, I: IndexSet) -> StepRelation:
    ell = I.ell
    entries = {}
    image_pair = {}
    viable = {}
    for x in I.directed:
        g = X[x]
        i = I.spine_choice[x]
        u, v = I.pairs[i]
        j = I.index_of(act_ray(g, I.ray(i)))
        if j is None:
            raise AssertionError(f"image of the spine of {x} missing from the index set")
        image_pair[x] = j
        u2, v2 = I.pairs[j]
        for q in product(range(X.d), repeat=2 * ell):
            for y in product(range(X.d), repeat=ell):
                vert = u + v + q + y
                depth = directional_depth(vert, g)
                if not (4 * ell < depth <= 5 * ell):
                    continue
                img = act_vertex(g, vert)
                if img[: 2 * ell] != u2 + v2:
                    raise AssertionError(f"step for {x} leaves the image spine early")
                entries[(x, q, y)] = (img[2 * ell : 4 * ell], img[4 * ell :], depth)
                viable.setdefault(y, set()).add((i, q))
    return StepRelation(entries, image_pair, viable)


def step_periodic(X: GeneratingSet, I: IndexSet, S: StepRelation, m: int) -> list:
    """Entries whose analogue with v repeated m times fails; empty when periodic."""
    ell = I.ell
    bad = []
    for (x, q, y), (q2, y2, depth) in S.entries.items():
        u, v = I.pairs[I.spine_choice[x]]
        u2, v2 = I.pairs[S.image_pair[x]]
        vert = u + v * m + q + y
        img = act_vertex(X[x], vert)
        d = directional_depth(vert, X[x])
        if img != u2 + v2 * m + q2 + y2 or not ((m + 3) * ell < d <= (m + 4) * ell):
            bad.append((x, q, y))
    return bad


# ---------------------------------------------------------------- placeholders


@dataclass(frozen=True)
class Placeholder:
    kind: str  # "pair", "neg", "any", "start", "start'"
    left: int = -1
    lpath: tuple = ()
    right: int = -1
    rpath: tuple = ()

    def __str__(self):
        if self.kind == "start":
            return "S"
        if self.kind == "start'":
            return "S'"
        head = f"[{self.left}.{format_vertex(self.lpath)},"
        if self.kind == "pair":
            return head + f"{self.right}.{format_vertex(self.rpath)}]"
        return head + ("~eta]" if self.kind == "neg" else "any]")


START = Placeholder("start")
START_NEG = Placeholder("start'")


class _LazyDfa(Automaton):
    deterministic = True

    def __init__(self):
        self._cache = {}

    def arcs(self, state):
        if state not in self._cache:
            self._cache[state] = list(self._arcs(state))
        return self._cache[state]

    def _arcs(self, state):
        raise NotImplementedError


class _InitDfa(_LazyDfa):
    def __init__(self, ctx: "_Context", negated: bool):
        super().__init__()
        self.ctx = ctx
        self.negated = negated
        self.start = ("exp", ctx.I.eta)

    def is_final(self, state):
        if state[0] == "done":
            return True
        return not self.negated and state[0] == "mid" and state[1] == self.ctx.I.eta

    def _arcs(self, state):
        I = self.ctx.I
        if state[0] == "exp":
            left = state[1]
            vl = I.v(left)
            for right in range(len(I.pairs)):
                if I.v(right) != vl:
                    continue
                useful = right in self.ctx.spine_pairs or (right == I.eta and not self.negated)
                if useful:
                    yield Placeholder("pair", left, vl + vl, right, vl + vl), ("mid", right)
            if self.negated:
                kind = "neg" if vl == I.v(I.eta) else "any"
                yield Placeholder(kind, left, vl + vl), ("done",)
        elif state[0] == "mid":
            for x in I.directed:
                if I.spine_choice[x] == state[1]:
                    yield x, ("exp", self.ctx.S.image_pair[x])


class _UpDfa(_LazyDfa):
    def __init__(self, ctx: "_Context", P: Placeholder):
        super().__init__()
        self.ctx = ctx
        self.P = P
        ell = ctx.I.ell
        v = ctx.I.v(P.left)
        self.start = ("exp", P.left, v + P.lpath[:ell], P.lpath[ell:])
        if P.kind == "pair":
            v2 = ctx.I.v(P.right)
            self.target = (P.right, v2 + P.rpath[:ell], P.rpath[ell:])
        else:
            self.target = None

    def is_final(self, state):
        if state[0] == "done":
            return True
        return state[0] == "mid" and state[1:] == self.target

    def _arcs(self, state):
        ctx = self.ctx
        if state[0] == "exp":
            _, left, lpath, y = state
            options = set(ctx.S.viable.get(y, ()))
            if self.target is not None and self.target[2] == y:
                options.add(self.target[:2])
            for right, q in sorted(options):
                yield Placeholder("pair", left, lpath, right, q), ("mid", right, q, y)
            if self.P.kind == "neg":
                kind = "neg" if y == ctx.I.v(ctx.I.eta) else "any"
                yield Placeholder(kind, left, lpath), ("done",)
            elif self.P.kind == "any":
                yield Placeholder("any", left, lpath), ("done",)
        elif state[0] == "mid":
            _, pair, q, y = state
            for x in ctx.I.directed:
                if ctx.I.spine_choice[x] != pair:
                    continue
                hit = ctx.S.entries.get((x, q, y))
                if hit is not None:
                    q2, y2, _ = hit
                    yield x, ("exp", ctx.S.image_pair[x], q2, y2)


class _FinishDfa(_LazyDfa):
    def __init__(self, ctx: "_Context", P: Placeholder):
        super().__init__()
        self.ctx = ctx
        self.P = P
        I = ctx.I
        self.start = ("init", I.u(P.left) + P.lpath)
        self.goal = I.u(P.right) + P.rpath if P.kind == "pair" else None
        self.avoid = I.u(I.eta) + I.v(I.eta) * 2 if P.kind == "neg" else None

    def is_final(self, state):
        if state == "self":
            return True
        if state[0] == "init":
            state = state[1]
        if self.P.kind == "pair":
            return state == self.goal
        if self.P.kind == "neg":
            return state != self.avoid
        return True

    def _arcs(self, state):
        if state == "self":
            return
        if state[0] == "init":
            yield self.P, "self"
            state = state[1]
        for x in self.ctx.X.names:
            nxt = self.ctx.move(x, state)
            if nxt is not None:
                yield x, nxt


class _Context:
    def __init__(self, X: GeneratingSet, I: IndexSet, S: StepRelation):
        self.X = X
        self.I = I
        self.S = S
        self.spine_pairs = set(I.spine_choice.values())
        self._moves = {}
        self._triv = {x: trivial_states(X[x]) for x in X.names}

    def move(self, x, vertex):
        """Image of the vertex under x when x's section there is trivial, else None."""
        key = (x, vertex)
        if key not in self._moves:
            g = self.X[x]
            s = 0
            for c in vertex:
                s = g.sections[s][c]
            self._moves[key] = act_vertex(g, vertex) if s in self._triv[x] else None
        return self._moves[key]


class _ImageTable(Table):
    def __init__(self, name, make):
        super().__init__(name)
        self._make = make
        self._built = {}

    def image(self, symbol):
        if symbol not in self._built:
            self._built[symbol] = self._make(symbol)
        return self._built[symbol]

    def listed(self):
        return list(self._built)


@dataclass
class Construction:
    X: GeneratingSet
    index: IndexSet
    steps: StepRelation
    E: LimitingGrammar
    E_neg: LimitingGrammar
    context: _Context


def build_construction(X: GeneratingSet, a, b) -> Construction:
    if not X.is_symmetric():
        raise NotSymmetric("the generating set must be closed under inverses")
    I = build_index_set(X, a, b)
    S = build_step_relation(X, I)
    ctx = _Context(X, I, S)

    def init(sym):
        if sym == START:
            return _InitDfa(ctx, False)
        if sym == START_NEG:
            return _InitDfa(ctx, True)
        return None

    def up(sym):
        if isinstance(sym, Placeholder) and sym.kind in ("pair", "neg", "any"):
            return _UpDfa(ctx, sym)
        return None

    def finish(sym):
        if isinstance(sym, Placeholder) and sym.kind in ("pair", "neg", "any"):
            return _FinishDfa(ctx, sym)
        return None

    alpha = _ImageTable("alpha", init)
    beta = _ImageTable("beta", up)
    gamma = _ImageTable("gamma", finish)
    E = LimitingGrammar(X.names, None, alpha, beta, gamma, START, verify=False)
    E_neg = LimitingGrammar(X.names, None, alpha, beta, gamma, START_NEG, verify=False)
    return Construction(X, I, S, E, E_neg, ctx)


def build_grammars(X: GeneratingSet, a, b):
    c = build_construction(X, a, b)
    return c.E, c.E_neg


def tau_init(X, a, b, negated=False):
    c = build_construction(X, a, b)
    return c.E.alpha.image(START_NEG if negated else START)


def first_round(index: IndexSet, depths) -> int:
    """Round n at which a word with these decorations first appears in S alpha beta^n gamma."""
    finite = [d for d in depths if d != math.inf]
    if not finite:
        return 0
    return max(0, math.ceil(max(finite) / index.ell) - 3)
