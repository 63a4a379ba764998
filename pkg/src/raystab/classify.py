"""Finitary / directed / bounded classification, spines and decorations."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .tree import (
    Automorphism,
    GeneratingSet,
    Ray,
    Vertex,
    act_ray,
    act_vertex,
    section,
    state_automorphism,
)

INF = math.inf


class NotDirected(ValueError):
    pass


@dataclass(frozen=True)
class SpineData:
    initial: Vertex
    period: Vertex
    section_at_u: Automorphism

    @property
    def ray(self) -> Ray:
        return Ray(self.initial, self.period)


@dataclass(frozen=True)
class Finitary:
    depth: int


@dataclass(frozen=True)
class Directed:
    spine: SpineData


@dataclass(frozen=True)
class BoundedOther:
    pass


@dataclass(frozen=True)
class Unbounded:
    pass


def trivial_states(g: Automorphism) -> set:
    """States whose section is the identity (at most one in a minimal machine)."""
    ident = tuple(range(g.d))
    return {
        s
        for s in range(g.size)
        if g.perms[s] == ident and all(t == s for t in g.sections[s])
    }


def _nontrivial_graph(g: Automorphism):
    triv = trivial_states(g)
    succ = {}
    for s in range(g.size):
        if s in triv:
            continue
        succ[s] = [(x, t) for x, t in enumerate(g.sections[s]) if t not in triv]
    return succ


def _sccs(succ):
    """Tarjan, iterative.  Returns list of components (lists of states)."""
    index, low, on, stack, comps = {}, {}, set(), [], []
    counter = 0
    for root in succ:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on.add(v)
            edges = succ[v]
            if i < len(edges):
                work.append((v, i + 1))
                w = edges[i][1]
                if w not in index:
                    work.append((w, 0))
                elif w in on:
                    low[v] = min(low[v], index[w])
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def _structure(g: Automorphism):
    succ = _nontrivial_graph(g)
    comps = _sccs(succ)
    comp_of = {s: i for i, c in enumerate(comps) for s in c}
    cyclic = {}
    for i, comp in enumerate(comps):
        members = set(comp)
        internal = sum(1 for s in comp for _, t in succ[s] if t in members)
        if internal:
            cyclic[i] = internal == len(comp)
    return succ, comps, comp_of, cyclic


def finitary_depth(g: Automorphism) -> int | None:
    succ, comps, comp_of, cyclic = _structure(g)
    if 0 not in succ:
        return 0
    memo = {}

    def depth(s):
        if s in memo:
            return memo[s]
        memo[s] = None
        best = 0
        for _, t in succ[s]:
            sub = depth(t)
            if sub is None:
                return None
            best = max(best, sub)
        memo[s] = best + 1
        return memo[s]

    if any(comp_of[s] in cyclic for s in _reachable(succ, 0)):
        return None
    return depth(0)


def _reachable(succ, start):
    if start not in succ:
        return set()
    seen = {start}
    todo = [start]
    while todo:
        s = todo.pop()
        for _, t in succ[s]:
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return seen


def is_bounded(g: Automorphism) -> bool:
    """Every nontrivial state on at most one cycle, no path joins two cycles."""
    succ, comps, comp_of, cyclic = _structure(g)
    reach = _reachable(succ, 0)
    if any(not simple for i, simple in cyclic.items() if any(comp_of[s] == i for s in reach)):
        return False
    # count cycles met along any path through the condensation
    memo = {}

    def most(c):
        if c in memo:
            return memo[c]
        below = 0
        for s in comps[c]:
            for _, t in succ[s]:
                if comp_of[t] != c:
                    below = max(below, most(comp_of[t]))
        memo[c] = below + (1 if c in cyclic else 0)
        return memo[c]

    return 0 not in succ or most(comp_of[0]) <= 1


def level_counts(g: Automorphism, levels: int) -> list[int]:
    """Number of nontrivial sections at each level 0..levels-1."""
    triv = trivial_states(g)
    counts = {0: 1}
    out = []
    for _ in range(levels):
        out.append(sum(c for s, c in counts.items() if s not in triv))
        nxt = {}
        for s, c in counts.items():
            if s in triv:
                continue
            for t in g.sections[s]:
                nxt[t] = nxt.get(t, 0) + c
        counts = nxt
    return out


def spine(g: Automorphism) -> SpineData:
    if not is_bounded(g) or finitary_depth(g) is not None:
        raise NotDirected("automorphism is not bounded and infinite")
    succ, comps, comp_of, cyclic = _structure(g)
    memo = {}

    def rays(s):
        if s not in memo:
            if comp_of[s] in cyclic:
                memo[s] = 1
            else:
                memo[s] = sum(rays(t) for _, t in succ[s])
        return memo[s]

    if rays(0) != 1:
        raise NotDirected(f"{rays(0)} infinite nontrivial rays, need exactly one")
    u = []
    s = 0
    while comp_of[s] not in cyclic:
        x, s = next((x, t) for x, t in succ[s] if rays(t))
        u.append(x)
    members = set(comps[comp_of[s]])
    v = []
    start = s
    while True:
        x, s = next((x, t) for x, t in succ[s] if t in members)
        v.append(x)
        if s == start:
            break
    return SpineData(tuple(u), tuple(v), state_automorphism(g, start))


def spine_witness_holds(g: Automorphism, sp: SpineData, k_max: int | None = None) -> bool:
    if k_max is None:
        k_max = g.size + 2
    for j in range(len(sp.period) + 1):
        ref = section(g, sp.initial + sp.period[:j])
        for k in range(k_max + 1):
            if section(g, sp.initial + sp.period * k + sp.period[:j]) != ref:
                return False
    return True


def classify(g: Automorphism):
    depth = finitary_depth(g)
    if depth is not None:
        return Finitary(depth)
    if not is_bounded(g):
        return Unbounded()
    try:
        return Directed(spine(g))
    except NotDirected:
        return BoundedOther()


def directional_depth(zeta, g: Automorphism):
    """Least prefix length of zeta where the section of g is trivial, else INF."""
    triv = trivial_states(g)
    s = 0
    if isinstance(zeta, Ray):
        k = 0
        for x in zeta.initial:
            if s in triv:
                return k
            s = g.sections[s][x]
            k += 1
        seen = set()
        j = 0
        while (s, j) not in seen:
            if s in triv:
                return k
            seen.add((s, j))
            s = g.sections[s][zeta.period[j]]
            j = (j + 1) % len(zeta.period)
            k += 1
        return INF
    for k, x in enumerate(zeta):
        if s in triv:
            return k
        s = g.sections[s][x]
    return len(zeta) if s in triv else INF


def act(g: Automorphism, zeta):
    if isinstance(zeta, Ray):
        return act_ray(g, zeta)
    return act_vertex(g, zeta)


@dataclass(frozen=True)
class DecoratedWord:
    letters: tuple  # ((name, depth), ...)

    def __len__(self):
        return len(self.letters)

    @property
    def depths(self):
        return tuple(a for _, a in self.letters)

    def __str__(self):
        if not self.letters:
            return "eps"
        return " ".join(f"{x}^({'inf' if a == INF else a})" for x, a in self.letters)


def decorate_chain(zeta, w, X: GeneratingSet):
    """Decorations plus the rays/vertices visited along the way."""
    chain = [zeta]
    letters = []
    for x in w:
        g = X[x]
        letters.append((x, directional_depth(zeta, g)))
        zeta = act(g, zeta)
        chain.append(zeta)
    return DecoratedWord(tuple(letters)), chain


def decorate(zeta, w, X: GeneratingSet) -> DecoratedWord:
    return decorate_chain(zeta, w, X)[0]
