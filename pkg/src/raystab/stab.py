"""Membership in ray stabilisers and the brute-force word oracle."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable

from .classify import is_bounded, trivial_states
from .tree import GeneratingSet, act_vertex, compose, identity, word_to_automorphism


class EmptyPeriod(ValueError):
    pass


class UnboundedGenerator(ValueError):
    pass


@dataclass(frozen=True)
class Member:
    pass


@dataclass(frozen=True)
class NonMember:
    witness_depth: int


@dataclass(frozen=True)
class DepthExceeded:
    cap: int


class RayOracle:
    """Supplies prefixes of a ray from a letter function ``i -> letter``."""

    def __init__(self, letter: Callable[[int], int]):
        self._letter = letter
        self._cache: list[int] = []

    def prefix(self, n: int) -> tuple:
        while len(self._cache) < n:
            self._cache.append(self._letter(len(self._cache)))
        return tuple(self._cache[:n])

    @classmethod
    def periodic(cls, a, b):
        a, b = tuple(a), tuple(b)
        return cls(lambda i: a[i] if i < len(a) else b[(i - len(a)) % len(b)])


def target_vertex(a, b, k: int) -> tuple:
    return tuple(a) + tuple(b) * (k + 1)


def member_periodic(X: GeneratingSet, w, a, b, machine=None) -> bool:
    """True iff the word fixes the ray a b b b ...; pigeonhole bound K+1 copies of b."""
    if len(b) == 0:
        raise EmptyPeriod("period must be nonempty")
    g = machine if machine is not None else word_to_automorphism(X, w)
    v = target_vertex(a, b, g.size)
    return act_vertex(g, v) == v


def member_promise(X: GeneratingSet, w, eta: RayOracle, depth_cap: int):
    for name in X.names:
        if not is_bounded(X[name]):
            raise UnboundedGenerator(name)
    g = word_to_automorphism(X, w)
    triv = trivial_states(g)
    s = 0
    for k in range(depth_cap + 1):
        if s in triv:
            p = eta.prefix(k)
            img = act_vertex(g, p)
            for i in range(k):
                if img[i] != p[i]:
                    return NonMember(i + 1)
            return Member()
        if k == depth_cap:
            break
        s = g.sections[s][eta.prefix(k + 1)[k]]
    return DepthExceeded(depth_cap)


def _words_with_machines(X: GeneratingSet, L: int):
    """Yield (word, machine) for all words of length <= L, reusing prefix products."""
    level = [((), identity(X.d))]
    for n in range(L + 1):
        yield from level
        if n == L:
            break
        nxt = []
        memo = {}
        for w, g in level:
            for x in X.names:
                key = (g, x)
                if key not in memo:
                    memo[key] = compose(g, X[x])
                nxt.append((w + (x,), memo[key]))
        level = nxt


def enumerate_wp(X: GeneratingSet, a, b, L: int) -> list:
    """All words of length <= L fixing a b^w, ordered by length then generator order."""
    if len(b) == 0:
        raise EmptyPeriod("period must be nonempty")
    cache = {}
    out = []
    for w, g in _words_with_machines(X, L):
        if g not in cache:
            cache[g] = member_periodic(X, w, a, b, machine=g)
        if cache[g]:
            out.append(w)
    return out


def enumerate_complement(X: GeneratingSet, a, b, L: int) -> list:
    inside = set(enumerate_wp(X, a, b, L))
    return [w for n in range(L + 1) for w in product(X.names, repeat=n) if w not in inside]


def counts_by_length(words, L: int) -> list[int]:
    out = [0] * (L + 1)
    for w in words:
        if len(w) <= L:
            out[len(w)] += 1
    return out
