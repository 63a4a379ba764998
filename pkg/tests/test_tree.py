import random
from itertools import product

import pytest

from raystab.tree import (
    AlphabetMismatch,
    GroupDefinitionError,
    Ray,
    UnknownGenerator,
    act_ray,
    act_vertex,
    compose,
    equal,
    format_vertex,
    from_states,
    identity,
    inverse,
    is_identity,
    minimize,
    normalize_ray,
    parse_group,
    parse_vertex,
    section,
    word_to_automorphism,
)


def random_machine(rng, d, n):
    perms = [tuple(rng.sample(range(d), d)) for _ in range(n)]
    sections = [[rng.randrange(n) for _ in range(d)] for _ in range(n)]
    return from_states(d, perms, sections, 0)


def random_ray(rng, d):
    u = tuple(rng.randrange(d) for _ in range(rng.randrange(4)))
    v = tuple(rng.randrange(d) for _ in range(rng.randrange(1, 4)))
    return Ray(u, v)


def test_compose_examples(D, IMG):
    a, b = D["a"], D["b"]
    assert is_identity(compose(a, a))
    assert is_identity(compose(b, b))
    assert compose(b, identity(2)) == b
    assert inverse(identity(2)) == identity(2)
    assert inverse(a) == a
    assert inverse(IMG["b"]) == IMG["b"]


def test_is_identity_examples(D):
    assert is_identity(identity(2))
    assert not is_identity(D["a"])
    assert not is_identity(word_to_automorphism(D, ("a", "b", "a", "b")))
    assert is_identity(word_to_automorphism(D, ("a", "a", "b", "b")))


def test_section_and_action_examples(D):
    a, b = D["a"], D["b"]
    assert section(b, ()) == b
    assert section(b, (0,)) == a
    assert section(a, (1,)) == identity(2)
    assert act_vertex(identity(2), (0, 1, 1)) == (0, 1, 1)
    assert act_vertex(a, (0,)) == (1,)
    assert act_vertex(b, (1, 0)) == (1, 0)
    assert act_ray(b, Ray((), (1,))) == Ray((), (1,))
    assert act_ray(a, Ray((), (1,))) == Ray((0,), (1,))
    r = Ray((0, 1), (1, 0))
    assert act_ray(identity(2), r) == r


def test_minimize_examples(D):
    b = D["b"]
    assert minimize(b) == b
    assert b.size == 3
    # two copies of the same involution merge
    g = from_states(2, [(1, 0), (1, 0), (0, 1)], [[2, 2], [2, 2], [2, 2]], 0)
    assert g.size == 2
    assert minimize(word_to_automorphism(D, ("b", "b"))).size == 1
    assert not is_identity(word_to_automorphism(D, ("a", "b")))
    assert word_to_automorphism(D, ()) == identity(2)


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        compose(identity(2), identity(3))


def test_group_axioms_random():
    rng = random.Random(7)
    for _ in range(150):
        d = rng.choice([2, 3])
        g, h, k = (random_machine(rng, d, rng.randint(1, 4)) for _ in range(3))
        assert compose(compose(g, h), k) == compose(g, compose(h, k))
        assert is_identity(compose(g, inverse(g)))
        assert is_identity(compose(inverse(g), g))
        assert is_identity(g) == (minimize(g) == identity(d))
        assert equal(g, g)


def test_section_cocycle_random():
    rng = random.Random(11)
    for _ in range(100):
        d = rng.choice([2, 3])
        g, h = random_machine(rng, d, rng.randint(1, 4)), random_machine(rng, d, rng.randint(1, 4))
        gh = compose(g, h)
        for n in range(4):
            for v in product(range(d), repeat=n):
                assert section(gh, v) == compose(section(g, v), section(h, act_vertex(g, v)))
                assert act_vertex(gh, v) == act_vertex(h, act_vertex(g, v))


def test_act_ray_agrees_with_prefixes():
    rng = random.Random(3)
    for _ in range(200):
        d = rng.choice([2, 3])
        g = random_machine(rng, d, rng.randint(1, 5))
        r = random_ray(rng, d)
        img = act_ray(g, r)
        for k in range(3 * g.size * len(r.period) + len(r.initial) + 1):
            assert img.prefix(k) == act_vertex(g, r.prefix(k))


def test_ray_normalization():
    rng = random.Random(5)
    assert normalize_ray((1, 1), (1,)) == ((), (1,))
    assert normalize_ray((0,), (1, 0)) == ((), (0, 1))
    assert normalize_ray((), (1, 0, 1, 0)) == ((), (1, 0))
    for _ in range(200):
        d = rng.choice([2, 3])
        u = tuple(rng.randrange(d) for _ in range(rng.randrange(5)))
        v = tuple(rng.randrange(d) for _ in range(rng.randrange(1, 5)))
        r = Ray(u, v)
        assert act_ray(identity(d), r) == r
        assert (r.initial, r.period) == normalize_ray(u, v)
        # same boundary point
        n = len(u) + 3 * len(v)
        assert r.prefix(n) == (u + v * n)[:n]


def test_parse_group_and_words(D):
    text = "alphabet 2\ngen a perm=1,0 sections=1,1\ngen b perm=0,1 sections=a,b\n"
    X = parse_group(text)
    assert X.names == ("a", "b")
    assert X["b"] == D["b"]
    assert X.parse_word("a b a") == ("a", "b", "a")
    assert X.parse_word("aba") == ("a", "b", "a")
    assert X.parse_word("eps") == ()
    with pytest.raises(UnknownGenerator):
        X.parse_word("a c")
    assert X.is_symmetric()


def test_symmetrized_adds_named_inverses():
    X = parse_group("alphabet 2\ngen t perm=1,0 sections=1,t\n")
    assert not X.is_symmetric()
    Y = X.symmetrized()
    assert Y.names == ("t", "t^-1")
    assert is_identity(word_to_automorphism(Y, Y.parse_word("t t^-1")))
    assert Y.invert_word(("t", "t")) == ("t^-1", "t^-1")


@pytest.mark.parametrize(
    "text, line",
    [
        ("gen a perm=1,0 sections=1,1\n", 1),
        ("alphabet 2\ngen a perm=1,1 sections=1,1\n", 2),
        ("alphabet 2\ngen a perm=1,0 sections=1\n", 2),
        ("alphabet 2\ngen a perm=1,0 sections=1,q\n", 2),
        ("alphabet 2\ngen a perm=1,0 sections=1,1\ngen a perm=1,0 sections=1,1\n", 3),
        ("alphabet 2\nfoo a\n", 2),
    ],
)
def test_parse_group_errors(text, line):
    with pytest.raises(GroupDefinitionError, match=f"line {line}"):
        parse_group(text)


def test_parse_group_needs_alphabet():
    with pytest.raises(GroupDefinitionError):
        parse_group("")


def test_vertex_text():
    assert parse_vertex("eps") == ()
    assert parse_vertex("0110") == (0, 1, 1, 0)
    assert parse_vertex("0,1,2", 3) == (0, 1, 2)
    assert format_vertex(()) == "eps"
    assert format_vertex((1, 0)) == "10"
    with pytest.raises(ValueError):
        parse_vertex("2", 2)
    assert str(Ray((0,), (1,))) == str(Ray((0,), (1, 1)))
