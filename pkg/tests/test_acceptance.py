"""End-to-end acceptance criteria, one test per criterion.

Each test is named test_criterion_N; conftest.py prints a "criterion N: pass/FAIL"
line for each of them at the end of the run.
"""
import random
from fractions import Fraction
from itertools import product

from conftest import AMBIGUOUS, ANBN, EMPTY_GAMMA, EPS_IN_BETA, PARTITIONS

from raystab.classify import Directed, Finitary, classify, decorate_chain, directional_depth
from raystab.construction import build_index_set, build_step_relation, step_periodic
from raystab.et0l import count_derivations, generate, generate_limiting, validate_limiting
from raystab.grammar_io import parse_grammar
from raystab.schreier import green_coeffs, level_graph, stabilized_counts
from raystab.series import gfun_recurrence, green_from_f
from raystab.stab import counts_by_length, enumerate_wp, member_periodic
from raystab.transducer import identity_gsm, restrict_to_subgroup, transform_grammar
from raystab.tree import (
    Ray,
    act_ray,
    act_vertex,
    compose,
    from_states,
    identity,
    inverse,
    is_identity,
    section,
    word_to_automorphism,
)

L = 8


def dihedral_counts(D, c):
    oracle = counts_by_length(enumerate_wp(D, (), (1,), L), L)
    words, index = generate_limiting(c.E, L)
    return oracle, counts_by_length(words, L), index


def test_criterion_1(D, dihedral_construction):
    oracle, grammar, _ = dihedral_counts(D, dihedral_construction)
    walks, n = stabilized_counts(D, (), (1,), L)
    assert oracle == grammar == walks
    assert oracle[:4] == [1, 1, 2, 3]
    neg = counts_by_length(generate_limiting(dihedral_construction.E_neg, L)[0], L)
    assert [e + f for e, f in zip(grammar, neg)] == [2**m for m in range(L + 1)]


def test_criterion_2(D, dihedral_construction):
    oracle, _, index = dihedral_counts(D, dihedral_construction)
    res = gfun_recurrence(dihedral_construction.E, L)
    assert res.f.coeffs == oracle
    assert res.index == index


def test_criterion_3(D, dihedral_construction):
    f = gfun_recurrence(dihedral_construction.E, L).f
    _, n = stabilized_counts(D, (), (1,), L)
    walks = green_coeffs(level_graph(D, n, (1,) * n), L)
    p = green_from_f(f, 2).coeffs
    assert p == walks
    assert p[:4] == [1, Fraction(1, 2), Fraction(1, 2), Fraction(3, 8)]


def fixes_prefixes(X, w, a, b, depth):
    g = word_to_automorphism(X, w)
    v = (tuple(a) + tuple(b) * depth)[:depth]
    return all(act_vertex(g, v[:m]) == v[:m] for m in range(depth + 1))


def test_criterion_4(D):
    assert member_periodic(D, ("b",), (), (1,))
    assert not member_periodic(D, ("a",), (), (1,))
    rng = random.Random(4)
    a, b = (), (1,)
    for _ in range(200):
        w = tuple(rng.choice(D.names) for _ in range(rng.randint(0, 10)))
        K = word_to_automorphism(D, w).size
        depth = (K + 1) * len(b) + len(a) + 4
        assert member_periodic(D, w, a, b) == fixes_prefixes(D, w, a, b, depth)


def test_criterion_5(IMG, img_construction):
    assert classify(IMG["b"]) == Finitary(1)
    for x in ("a", "c"):
        tag = classify(IMG[x])
        assert isinstance(tag, Directed)
        assert len(tag.spine.period) == 2
    n = 6
    words, _ = generate_limiting(img_construction.E, n)
    assert counts_by_length(words, n) == counts_by_length(enumerate_wp(IMG, (), (1, 0), n), n)


def test_criterion_6():
    E = parse_grammar(ANBN)
    expected = {(), tuple("ab"), tuple("aabb"), tuple("abab"), tuple("aaabbb"), tuple("ababab")}
    assert generate(E, 6, 12) == expected
    P = parse_grammar(PARTITIONS)
    assert count_derivations(P, tuple("aababab"), ("alpha", "beta", "alpha", "alpha", "gamma")) == 1


def test_criterion_7(dihedral_construction, toy):
    assert validate_limiting(dihedral_construction.E, 4, 4).ok
    assert validate_limiting(dihedral_construction.E_neg, 4, 4).ok
    assert validate_limiting(toy, 6, 6).ok
    assert [v.item for v in validate_limiting(parse_grammar(EPS_IN_BETA), 4, 4).violations] == ["beta-eps"]
    assert [v.item for v in validate_limiting(parse_grammar(EMPTY_GAMMA), 4, 4).violations] == ["gamma-empty"]
    rep = validate_limiting(parse_grammar(AMBIGUOUS), 4, 4)
    flagged = [v for v in rep.violations if v.item == "unambiguity"]
    assert flagged and flagged[0].witness is not None


def test_criterion_8(D, dihedral_construction):
    E = dihedral_construction.E
    F = transform_grammar(E, identity_gsm(D.names))
    assert generate_limiting(F, L)[0] == generate_limiting(E, L)[0]
    R, _, _ = restrict_to_subgroup(E, D, {"b": ("b",)})
    assert generate_limiting(R, L)[0] == {("b",) * k for k in range(L + 1)}


def random_machine(rng, d, n):
    perms = [tuple(rng.sample(range(d), d)) for _ in range(n)]
    sections = [[rng.randrange(n) for _ in range(d)] for _ in range(n)]
    return from_states(d, perms, sections, 0)


def test_criterion_9(D, IMG, dihedral_construction):
    rng = random.Random(9)
    # group axioms and the section cocycle
    for _ in range(100):
        d = rng.choice([2, 3])
        g, h, k = (random_machine(rng, d, rng.randint(1, 4)) for _ in range(3))
        assert compose(compose(g, h), k) == compose(g, compose(h, k))
        assert is_identity(compose(g, inverse(g)))
        assert compose(g, identity(d)) == compose(identity(d), g)
        gh = compose(g, h)
        for v in product(range(d), repeat=3):
            assert section(gh, v) == compose(section(g, v), section(h, act_vertex(g, v)))
    # decoration chain consistency
    for X in (D, IMG):
        for _ in range(50):
            zeta = Ray(tuple(rng.randrange(2) for _ in range(rng.randrange(3))), rng.choice([(1,), (1, 0)]))
            w = tuple(rng.choice(X.names) for _ in range(rng.randrange(8)))
            dec, chain = decorate_chain(zeta, w, X)
            for i, x in enumerate(w):
                assert chain[i + 1] == act_ray(X[x], chain[i])
                assert dec.depths[i] == directional_depth(chain[i], X[x])
    # step relation periodicity
    for X, ray in ((D, ((), (1,))), (IMG, ((), (1, 0)))):
        I = build_index_set(X, *ray)
        S = build_step_relation(X, I)
        for m in (1, 2, 3):
            assert step_periodic(X, I, S, m) == []
    # trivial words lie in the stabilizer language
    stab_words, _ = generate_limiting(dihedral_construction.E, 10)
    for _ in range(100):
        u = tuple(rng.choice(D.names) for _ in range(rng.randint(0, 5)))
        w = u + D.invert_word(u)
        assert is_identity(word_to_automorphism(D, w))
        assert member_periodic(D, w, (), (1,))
        assert w in stab_words
    for _ in range(100):
        u = tuple(rng.choice(IMG.names) for _ in range(rng.randint(0, 5)))
        w = u + IMG.invert_word(u)
        assert is_identity(word_to_automorphism(IMG, w))
        assert member_periodic(IMG, w, (), (1, 0))
