"""Finite-level Schreier graphs, closed walks and return probabilities."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .classify import INF, directional_depth
from .tree import GeneratingSet, Ray, act_ray, act_vertex, format_vertex


class NotSymmetric(ValueError):
    pass


@dataclass
class LevelGraph:
    """Labeled orbit graph on (part of) the n-th level."""

    level: int
    base: tuple
    names: tuple
    vertices: list
    edges: dict = field(repr=False)  # (vertex, name) -> vertex
    symmetric: bool = False

    def neighbours(self, v):
        return [(x, self.edges[(v, x)]) for x in self.names if (v, x) in self.edges]


def level_graph(X: GeneratingSet, n: int, base, component_only=False, radius=None) -> LevelGraph:
    base = tuple(base)
    if len(base) != n:
        raise ValueError(f"base has length {len(base)}, expected {n}")
    edges = {}
    if component_only or radius is not None:
        dist = {base: 0}
        queue = deque([base])
        while queue:
            v = queue.popleft()
            if radius is not None and dist[v] >= radius:
                continue
            for x in X.names:
                t = act_vertex(X[x], v)
                edges[(v, x)] = t
                if t not in dist:
                    dist[t] = dist[v] + 1
                    queue.append(t)
        verts = sorted(dist)
        if radius is not None:
            # keep every edge between ball vertices
            for v in verts:
                for x in X.names:
                    t = act_vertex(X[x], v)
                    if t in dist:
                        edges[(v, x)] = t
                    else:
                        edges.pop((v, x), None)
    else:
        verts = list(product(range(X.d), repeat=n))
        for v in verts:
            for x in X.names:
                edges[(v, x)] = act_vertex(X[x], v)
    return LevelGraph(n, base, X.names, verts, edges, X.is_symmetric())


def closed_walk_counts(G: LevelGraph, L: int) -> list[int]:
    vec = {G.base: 1}
    counts = [1]
    for _ in range(L):
        nxt = {}
        for v, c in vec.items():
            for x in G.names:
                t = G.edges.get((v, x))
                if t is not None:
                    nxt[t] = nxt.get(t, 0) + c
        vec = nxt
        counts.append(vec.get(G.base, 0))
    return counts


def green_coeffs(G: LevelGraph, L: int) -> list[Fraction]:
    if not G.symmetric:
        raise NotSymmetric("return probabilities need a symmetric generating set")
    k = len(G.names)
    return [Fraction(c, k**m) for m, c in enumerate(closed_walk_counts(G, L))]


def ray_counts_at_level(X: GeneratingSet, a, b, n: int, L: int) -> list[int]:
    base = Ray(tuple(a), tuple(b)).prefix(n)
    G = level_graph(X, n, base, radius=(L + 1) // 2 + 1)
    return closed_walk_counts(G, L)


def stabilized_counts(X: GeneratingSet, a, b, L: int, n_max: int = 4096):
    """Closed-walk counts at the prefix of a b^w; level doubled until stable twice."""
    n = max(1, len(a) + len(b))
    prev = ray_counts_at_level(X, a, b, n, L)
    stable = 0
    while stable < 2:
        n *= 2
        if n > n_max:
            raise RuntimeError(f"walk counts did not stabilize by level {n_max}")
        cur = ray_counts_at_level(X, a, b, n, L)
        stable = stable + 1 if cur == prev else 0
        prev = cur
    return prev, n


def safe_level(X: GeneratingSet, a, b, L: int) -> int:
    """Level beyond which no word of length <= L can tell Gamma^n from the ray.

    Uses the largest finite decoration seen along walks of length <= L from the ray;
    every letter with infinite decoration fixes all further prefixes.
    """
    r = Ray(tuple(a), tuple(b))
    frontier = {r}
    seen = {r}
    best = 0
    for _ in range(L):
        nxt = set()
        for z in frontier:
            for x in X.names:
                dep = directional_depth(z, X[x])
                if dep != INF:
                    best = max(best, dep)
                t = act_ray(X[x], z)
                if t not in seen:
                    seen.add(t)
                    nxt.add(t)
        frontier = nxt
    return max(best, len(r.initial) + len(r.period)) + 1


def rooted_ball(X: GeneratingSet, r: Ray, radius: int, n_max: int = 4096) -> LevelGraph:
    """Ball in the orbit graph of the ray, read off a level where it has stabilized."""
    n = max(1, len(r.initial) + len(r.period))

    def ball(k):
        return level_graph(X, k, r.prefix(k), radius=radius)

    cur = ball(n)
    while n < n_max:
        nxt = ball(n + 1)
        if _projects_onto(nxt, cur):
            return cur
        n += 1
        cur = nxt
    raise RuntimeError("ball did not stabilize")


def _projects_onto(big: LevelGraph, small: LevelGraph) -> bool:
    proj = {v: v[:-1] for v in big.vertices}
    if sorted(proj.values()) != sorted(small.vertices) or len(set(proj.values())) != len(proj):
        return False
    mapped = {(proj[v], x): proj[t] for (v, x), t in big.edges.items()}
    return mapped == small.edges


def export_dot(G: LevelGraph, name: str = "schreier") -> str:
    lines = [f'digraph "{name}" {{', "  node [shape=circle];"]
    for v in sorted(G.vertices, key=format_vertex):
        shape = ' [shape=doublecircle]' if v == G.base else ""
        lines.append(f'  "{format_vertex(v)}"{shape};')
    order = {x: i for i, x in enumerate(G.names)}
    for (v, x), t in sorted(G.edges.items(), key=lambda e: (format_vertex(e[0][0]), order[e[0][1]])):
        lines.append(f'  "{format_vertex(v)}" -> "{format_vertex(t)}" [label="{x}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
