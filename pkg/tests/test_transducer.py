from itertools import product

import pytest
from conftest import DIHEDRAL_RAY

from raystab.et0l import generate_limiting, validate_limiting
from raystab.stab import member_periodic
from raystab.transducer import (
    FAIL,
    Gsm,
    InjectivityViolation,
    PrefixCode,
    apply_gsm,
    build_antichain,
    check_injective,
    decoding_automaton,
    identity_gsm,
    is_antichain,
    restrict_to_subgroup,
    transform_grammar,
)
from raystab.tree import is_identity, word_to_automorphism


def test_decoding_example():
    M = decoding_automaton(PrefixCode({("a", "b"): ("u",), ("b",): ("v",)}))
    assert apply_gsm(M, ("a", "b", "b")) == ("u", "v")
    assert apply_gsm(M, ("a",)) is None
    assert apply_gsm(M, ("a", "a")) is None
    assert apply_gsm(M, ()) == ()
    assert set(M.states) == {(), ("a",), FAIL}
    check_injective(M, 7)


def test_prefix_code_rejects_prefixes():
    with pytest.raises(ValueError):
        PrefixCode({("a",): ("u",), ("a", "b"): ("v",)})
    with pytest.raises(ValueError):
        PrefixCode({(): ("u",)})


def test_empty_code_accepts_only_empty_word():
    M = decoding_automaton(PrefixCode({}), inputs=("a", "b"), outputs=())
    assert apply_gsm(M, ()) is None
    assert apply_gsm(M, ("a",)) is None


def test_check_injective_finds_collision():
    M = Gsm(("a", "b"), ("x",), (0,), frozenset([0]), 0, {("a", 0): (("x",), 0), ("b", 0): (("x",), 0)})
    with pytest.raises(InjectivityViolation) as err:
        check_injective(M, 2)
    assert err.value.pair == (("a",), ("b",))


def test_antichain_dihedral(D):
    words, ws = build_antichain(D, [("a",), ("b",)])
    assert words == [("a", "a", "a"), ("a", "b", "a", "a", "b", "a", "b")]
    assert ws == [("a", "a"), ("a", "b", "a", "a", "b", "a")]
    assert all(is_identity(word_to_automorphism(D, w)) for w in ws)
    assert is_antichain(words)


def test_antichain_img(IMG):
    suffixes = [("a",), ("b",), ("a", "c")]
    words, ws = build_antichain(IMG, suffixes)
    assert is_antichain(words)
    assert all(is_identity(word_to_automorphism(IMG, w)) for w in ws)
    assert all(w[-len(s) :] == s for w, s in zip(words, suffixes))


def test_identity_transform(dihedral_construction):
    E = dihedral_construction.E
    F = transform_grammar(E, identity_gsm(("a", "b")))
    assert generate_limiting(F, 8)[0] == generate_limiting(E, 8)[0]


def test_toy_substitution(toy):
    M = Gsm(("a",), ("b", "c"), (0,), frozenset([0]), 0, {("a", 0): (("b", "c"), 0)})
    F = transform_grammar(toy, M)
    assert generate_limiting(F, 8)[0] == {("b", "c") * k for k in range(5)}
    assert validate_limiting(F, 6, 6).ok


def test_restrict_single_generator(D, dihedral_construction):
    F, code, M = restrict_to_subgroup(dihedral_construction.E, D, {"B": ("b",)})
    # b fixes the ray, so every word over B is in the stabilizer
    assert generate_limiting(F, 8)[0] == {("B",) * k for k in range(9)}


def test_restrict_matches_oracle(D, dihedral_construction):
    Y = {"A": ("a",), "B": ("b",)}
    F, code, M = restrict_to_subgroup(dihedral_construction.E, D, Y)
    got = generate_limiting(F, 6)[0]
    expected = set()
    for n in range(7):
        for w in product(Y, repeat=n):
            image = tuple(x for y in w for x in Y[y])
            if member_periodic(D, image, *DIHEDRAL_RAY):
                expected.add(w)
    assert got == expected


def test_restrict_empty(D, dihedral_construction):
    F, code, M = restrict_to_subgroup(dihedral_construction.E, D, {})
    assert generate_limiting(F, 4)[0] == set()


def test_transformed_grammars_validate(D, dihedral_construction):
    F = transform_grammar(dihedral_construction.E, identity_gsm(("a", "b")))
    assert validate_limiting(F, 4, 4).ok
    R, _, _ = restrict_to_subgroup(dihedral_construction.E, D, {"B": ("b",)})
    assert validate_limiting(R, 4, 4).ok
