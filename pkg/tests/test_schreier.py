from fractions import Fraction
from pathlib import Path

import pytest

from raystab.schreier import (
    NotSymmetric,
    closed_walk_counts,
    export_dot,
    green_coeffs,
    level_graph,
    ray_counts_at_level,
    rooted_ball,
    safe_level,
    stabilized_counts,
)
from raystab.stab import counts_by_length, enumerate_wp
from raystab.tree import GeneratingSet, Ray, from_states

GOLDEN = Path(__file__).parent / "golden"


def test_level_one(D):
    G = level_graph(D, 1, (1,))
    assert G.edges == {((0,), "a"): (1,), ((1,), "a"): (0,), ((0,), "b"): (0,), ((1,), "b"): (1,)}
    G0 = level_graph(D, 0, ())
    assert G0.vertices == [()]
    assert all(t == () for t in G0.edges.values())


def test_level_three_is_a_path(D):
    G = level_graph(D, 3, (1, 1, 1))
    loops = [v for (v, x), t in G.edges.items() if v == t]
    assert len(loops) == 2 and (1, 1, 1) in loops
    # undirected simple graph without loops is a path on 8 vertices
    adj = {v: set() for v in G.vertices}
    for (v, x), t in G.edges.items():
        if v != t:
            adj[v].add(t)
    degrees = sorted(len(n) for n in adj.values())
    assert degrees == [1, 1] + [2] * 6
    seen, todo = {(1, 1, 1)}, [(1, 1, 1)]
    while todo:
        for t in adj[todo.pop()]:
            if t not in seen:
                seen.add(t)
                todo.append(t)
    assert len(seen) == 8


def test_closed_walk_examples(D):
    G = level_graph(D, 12, (1,) * 12)
    assert closed_walk_counts(G, 3) == [1, 1, 2, 3]
    assert closed_walk_counts(G, 0) == [1]
    H = level_graph(D, 12, (0,) + (1,) * 11)
    # a b a returns to 0 1^11
    assert closed_walk_counts(H, 3) == [1, 0, 2, 1]


def test_green_examples(D):
    G = level_graph(D, 12, (1,) * 12)
    p = green_coeffs(G, 8)
    assert p[:4] == [1, Fraction(1, 2), Fraction(1, 2), Fraction(3, 8)]
    assert all(0 <= x <= 1 for x in p)


def test_green_needs_symmetric():
    X = GeneratingSet(2, {"t": from_states(2, [(1, 0), (0, 1)], [[1, 0], [1, 1]], 0)})
    with pytest.raises(NotSymmetric):
        green_coeffs(level_graph(X, 2, (0, 0)), 2)


@pytest.mark.parametrize("group, a, b, L", [("D", (), (1,), 8), ("IMG", (), (1, 0), 8), ("D", (0,), (0, 1), 6)])
def test_walks_match_enumeration(group, a, b, L, request):
    X = request.getfixturevalue(group)
    counts, n = stabilized_counts(X, a, b, L)
    assert counts == counts_by_length(enumerate_wp(X, a, b, L), L)
    assert ray_counts_at_level(X, a, b, max(n, safe_level(X, a, b, L)), L) == counts


def test_level_projection(D, IMG):
    for X in (D, IMG):
        for n in range(1, 6):
            big = level_graph(X, n + 1, (1,) * (n + 1))
            small = level_graph(X, n, (1,) * n)
            for (v, x), t in big.edges.items():
                assert small.edges[(v[:-1], x)] == t[:-1]


def test_reversed_labels_same_counts(IMG):
    G = level_graph(IMG, 8, (1, 0) * 4)
    rev = dict(G.edges)
    for (v, x), t in G.edges.items():
        rev[(t, x)] = v
    H = level_graph(IMG, 8, (1, 0) * 4)
    H.edges = rev
    # each generator is an involution, so reversal gives the same graph
    assert rev == G.edges
    assert closed_walk_counts(H, 8) == closed_walk_counts(G, 8)


def test_rooted_ball(D):
    B = rooted_ball(D, Ray((), (1,)), 2)
    assert sorted(B.vertices) == [(0, 0), (0, 1), (1, 1)]
    assert B.edges[((1, 1), "b")] == (1, 1)
    assert B.edges[((1, 1), "a")] == (0, 1)
    assert B.edges[((0, 1), "b")] == (0, 0)
    B0 = rooted_ball(D, Ray((), (1,)), 0)
    assert len(B0.vertices) == 1
    B1 = rooted_ball(D, Ray((), (0, 1)), 1)
    assert B1.edges[(B1.base, "b")] != B1.base


@pytest.mark.parametrize(
    "name, group, base",
    [
        ("dihedral_level1", "D", (1,)),
        ("dihedral_level3", "D", (1, 1, 1)),
        ("img_level2", "IMG", (1, 0)),
    ],
)
def test_dot_golden(name, group, base, request):
    X = request.getfixturevalue(group)
    G = level_graph(X, len(base), base)
    assert export_dot(G) == (GOLDEN / f"{name}.dot").read_text()


def test_ball_dot_golden(D):
    B = rooted_ball(D, Ray((), (1,)), 2)
    assert export_dot(B, "ball") == (GOLDEN / "dihedral_ball2.dot").read_text()
