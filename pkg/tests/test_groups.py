import random

import pytest

from compwords import GroupAlphabet, decompress
from compwords.errors import (
    GeneratorTableMissing,
    ParseError,
    RankMismatch,
    StrandIndexOutOfRange,
    UnknownTwistGenerator,
)
from compwords.freegroup import free_reduce
from compwords.groups import (
    Endomorphism,
    NielsenWord,
    Token,
    aut_apply,
    aut_is_identity,
    braid_is_trivial,
    braid_to_nielsen,
    build_leveled_family,
    fbc_is_trivial,
    fbc_levels,
    genus_alphabet,
    handlebody_membership,
    heegaard_membership,
    inn_membership,
    inner_automorphism,
    load_genus2_actions,
    nielsen_decompose,
    nielsen_images,
    parse_actions,
    parse_nielsen,
    punctured_disk_mcg_membership,
    reduce_word,
)
from compwords.oracle import literal_levels, naive_substitute
from conftest import A5_PRINTED, W

F2 = GroupAlphabet(("a", "b"))
PHI = Endomorphism.from_mapping(F2, {"a": ["b"], "b": ["b", "a", "b'"]})


def test_leveled_family_iterated_automorphism():
    fam = build_leveled_family(PHI, 5)
    assert decompress(fam.root(1), 100) == W(A5_PRINTED)


def test_leveled_family_identity():
    g = GroupAlphabet.of_rank(3)
    fam = build_leveled_family(Endomorphism.identity(g), 4)
    for i in (1, 2, 3):
        assert decompress(fam.root(i), 10) == [f"a{i}"]


def test_leveled_family_single_mul():
    fam = build_leveled_family(parse_nielsen("mul1,2"))
    assert decompress(fam.root(1), 10) == ["a1", "a2"]
    assert decompress(fam.root(2), 10) == ["a2"]


def test_leveled_family_matches_substitution():
    rng = random.Random(4)
    g = GroupAlphabet.of_rank(3)
    for _ in range(30):
        images = {x: [rng.choice(g.letters) for _ in range(rng.randint(1, 3))] for x in g.base}
        phi = Endomorphism.from_mapping(g, images)
        levels = rng.randint(0, 4)
        fam = build_leveled_family(phi, levels)
        for i, x in enumerate(g.base, start=1):
            w = [x]
            for _ in range(levels):
                w = naive_substitute(images, w, reduce=False)
            if len(w) <= 10 ** 4:
                assert decompress(fam.root(i), 10 ** 4) == w


def test_aut_apply():
    assert decompress(aut_apply(NielsenWord((), 2), ["a1", "a2'"]), 10) == ["a1", "a2'"]
    assert decompress(aut_apply(parse_nielsen("inv1"), ["a1"]), 10) == ["a1'"]
    assert decompress(aut_apply(parse_nielsen("mul1,2"), ["a1", "a2'"]), 10) == ["a1", "a2", "a2'"]


def test_aut_is_identity_examples():
    assert aut_is_identity(parse_nielsen("inv1 inv1"))
    assert aut_is_identity(parse_nielsen("mul1,2 mul1,2^-1"))
    assert not aut_is_identity(parse_nielsen("mul1,2"))


def test_nielsen_relations():
    assert aut_is_identity(parse_nielsen("mul1,2 mul3,4 mul1,2^-1 mul3,4^-1"))
    for i in range(1, 5):
        assert aut_is_identity(parse_nielsen(f"inv{i} inv{i}", 4))


def test_parse_nielsen_errors():
    with pytest.raises(ParseError):
        parse_nielsen("mul1")
    with pytest.raises(RankMismatch):
        parse_nielsen("mul1,5", 3)


def test_nielsen_decompose_round_trip():
    rng = random.Random(8)
    for _ in range(40):
        m = rng.randint(2, 4)
        toks = []
        for _ in range(rng.randint(0, 8)):
            if rng.random() < 0.3:
                toks.append(Token("inv", rng.randint(1, m), None))
            else:
                i, j = rng.sample(range(1, m + 1), 2)
                toks.append(Token(rng.choice(["mul", "mulinv"]), i, j))
        w = NielsenWord(tuple(toks), m)
        images = nielsen_images(w)
        g = GroupAlphabet.of_rank(m)
        back = nielsen_decompose(Endomorphism(g, tuple(tuple(x) for x in images)))
        assert nielsen_images(back) == images


def test_fbc_examples():
    g = GroupAlphabet.of_rank(2)
    ident = Endomorphism.identity(g)
    assert fbc_is_trivial(ident, W("t a1 t' a1'"))
    phi = Endomorphism.from_mapping(g, {"a1": ["a1", "a2"], "a2": ["a2"]})
    # t a1 t' = phi(a1), so phi(a1) t a1' t' is trivial
    assert fbc_is_trivial(phi, W("a1 a2 t a1' t'"))
    swap = Endomorphism.from_mapping(g, {"a1": ["a2"], "a2": ["a1"]})
    assert not fbc_is_trivial(swap, W("t a1 t' a1'"))
    assert not fbc_is_trivial(ident, W("t a1"))


def test_fbc_levels_match_literal_rewriting():
    rng = random.Random(2)
    letters = ["t", "t'", "a1", "a1'", "a2"]
    for _ in range(200):
        w = reduce_word(rng.choice(letters) for _ in range(rng.randint(0, 14)))
        assert sorted((w[q], v) for q, v in fbc_levels(w)) == sorted(literal_levels(w))


def test_inn_membership():
    phi = inner_automorphism(["a1", "a2"], 2)
    v = inn_membership(phi)
    assert v
    assert reduce_word(decompress(v.witness, 10)) == ["a1", "a2"]
    v = inn_membership(NielsenWord((), 2))
    assert v and v.witness.length == 0
    assert not inn_membership(parse_nielsen("mul1,2"))


def test_inn_witness_verifies():
    rng = random.Random(6)
    for _ in range(20):
        m = rng.randint(2, 3)
        g = GroupAlphabet.of_rank(m)
        u = reduce_word(rng.choice(g.letters) for _ in range(rng.randint(0, 5)))
        v = inn_membership(inner_automorphism(u, m))
        assert v
        uw = decompress(v.witness, 100)
        imgs = nielsen_images(inner_automorphism(u, m))
        for x, img in zip(g.base, imgs):
            assert reduce_word(uw + [x] + [y[:-1] if y.endswith("'") else y + "'" for y in reversed(uw)]) == img


def test_punctured_disk():
    assert punctured_disk_mcg_membership(braid_to_nielsen("s1", 3))
    assert punctured_disk_mcg_membership(NielsenWord((), 3))
    assert not punctured_disk_mcg_membership(parse_nielsen("inv1", 2))


def test_braids():
    assert braid_is_trivial("s1 s1^-1", 3)
    assert braid_is_trivial("s1 s2 s1 s2^-1 s1^-1 s2^-1", 3)
    assert not braid_is_trivial("s1", 3)
    assert braid_is_trivial("s1 s3 s1^-1 s3^-1", 4)
    with pytest.raises(StrandIndexOutOfRange):
        braid_is_trivial("s3", 3)


def test_braid_images():
    imgs = nielsen_images(braid_to_nielsen("s1", 2))
    assert imgs == [["a1", "a2", "a1'"], ["a1"]]


TABLE = """
twist M      # twist along the meridian b1
a1 -> a1 b1
twist D      # twist along the dual curve
b1 -> b1 a1
"""


def test_handlebody_examples():
    actions = parse_actions(TABLE, genus_alphabet(1))
    assert handlebody_membership([], 1, actions)
    assert handlebody_membership(["M"], 1, actions)
    assert not handlebody_membership(["D"], 1, actions)
    assert handlebody_membership(["D", "D^-1"], 1, actions)
    with pytest.raises(UnknownTwistGenerator):
        handlebody_membership(["Q"], 1, actions)
    with pytest.raises(GeneratorTableMissing):
        handlebody_membership(["M"], 1, None)


def test_heegaard_examples():
    actions = parse_actions(TABLE, genus_alphabet(1))
    assert heegaard_membership([], 1, actions)
    assert not heegaard_membership(["M"], 1, actions)
    assert heegaard_membership(["M", "M^-1"], 1, actions)


def test_genus2_table():
    actions = load_genus2_actions()
    assert set(actions) == {"Ta1", "Ta2", "Tb1", "Tb2", "Tc"}
    assert handlebody_membership(["Tb1"], 2, actions)
    assert not handlebody_membership(["Ta1"], 2, actions)
    for name in actions:
        assert handlebody_membership([name, name + "^-1"], 2, actions)


def test_free_reduce_of_aut_apply_matches_images():
    w = parse_nielsen("mul1,2 inv2 mul2,1^-1")
    img = free_reduce(aut_apply(w, ["a1"])).program
    assert decompress(img, 100) == nielsen_images(w)[0]
