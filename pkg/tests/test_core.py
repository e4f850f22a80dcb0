import pytest

from compwords import (
    Alphabet,
    Empty,
    GroupAlphabet,
    ProgramBuilder,
    Ref,
    Terminal,
    char_at,
    decompress,
    from_word,
    invert,
    normalize,
    project,
    substring,
)
from compwords.errors import (
    CapExceeded,
    CyclicReference,
    DanglingReference,
    HasTruncation,
    IndexOutOfRange,
    KeepSetNotInvolutionClosed,
    NotGroupAlphabet,
    TruncationOutOfRange,
)
from compwords.oracle import naive_invert
from conftest import A5_PRINTED, AB, B8, F8, F9, G2, W, word_program


def test_fibonacci_lengths(f8, f9):
    assert f8.length == 21
    assert f9.length == 34
    assert f8.height == 7


def test_empty_program():
    p = from_word(AB, [])
    assert p.length == 0
    assert p.height == 0
    assert decompress(p, 0) == []


def test_truncation_out_of_range():
    b = ProgramBuilder(AB)
    b.add("A", list(map(lambda x: __import__("compwords").Lit(x), "aba")))
    b.add("B", [b.ref("A", trunc=(1, 5))])
    with pytest.raises(TruncationOutOfRange):
        b.build()


def test_cycles_and_dangling_refs_rejected():
    b = ProgramBuilder(AB)
    b.add("A", [Ref(1)])
    b.add("B", [Ref(0)])
    with pytest.raises(CyclicReference):
        b.build()
    b = ProgramBuilder(AB)
    b.add("A", [Ref(7)])
    with pytest.raises(DanglingReference):
        b.build()


def test_normalize_binarizes_literal_word():
    p = normalize(from_word(AB, W("aba")))
    assert decompress(p, 10) == W("aba")
    kinds = sorted(type(prod).__name__ for prod in p.productions)
    assert kinds == ["Seq", "Seq", "Terminal", "Terminal"]
    for prod in p.productions:
        if not isinstance(prod, Terminal):
            assert len(prod.items) == 2
            assert all(not it.inverted and it.trunc is None for it in prod.items)


def test_normalize_fixed_point_on_fibonacci(f8):
    q = normalize(f8)
    assert len(q) == len(f8)
    assert decompress(q, 100) == decompress(f8, 100)


def test_normalize_materializes_inversion():
    b = ProgramBuilder(G2)
    b.add("A", Terminal("a"))
    b.add("C", Terminal("b"))
    b.add("B", [b.ref("A"), b.ref("C")])
    b.add("R", [b.ref("B", inverted=True)])
    q = normalize(b.build("R"))
    assert decompress(q, 10) == ["b'", "a'"]
    assert not q.has_inversion


def test_normalize_rejects_truncation(b8):
    with pytest.raises(HasTruncation):
        normalize(b8)


@pytest.mark.parametrize("i,expected", [(0, "a"), (2, "a"), (20, "a"), (-1, "a"), (1, "b")])
def test_char_at(f8, i, expected):
    assert char_at(f8, i) == expected


def test_char_at_out_of_range(f8):
    with pytest.raises(IndexOutOfRange):
        char_at(f8, 21)


def test_substring(f8, b8):
    assert substring(f8, 0, 5) == W("abaab")
    assert substring(f8, 3, 3) == []
    assert substring(b8, 0, 6) == W("bababb")
    assert substring(f8, -4, -1) == list(F8[-4:-1])


def test_invert_simple():
    assert decompress(invert(word_program("ab")), 5) == ["b'", "a'"]


def test_invert_iterated_automorphism(a5):
    assert decompress(invert(a5), 100) == naive_invert(W(A5_PRINTED))


def test_invert_needs_group_alphabet(f8):
    with pytest.raises(NotGroupAlphabet):
        invert(f8)


def test_invert_truncated_item():
    b = ProgramBuilder(G2)
    b.add("A", [__import__("compwords").Lit(x) for x in W("a b b a'")])
    b.add("R", [b.ref("A", inverted=True, trunc=(1, 3))])
    p = b.build("R")
    # inverse of A is a b' b' a'; positions 1..3 give b' b'
    assert decompress(p, 10) == ["b'", "b'"]
    assert decompress(invert(p), 10) == ["b", "b"]


def test_project():
    p = word_program("a b a' b'")
    assert decompress(project(p, {"a", "a'"}), 10) == ["a", "a'"]
    assert decompress(project(p, G2.letters), 10) == W("a b a' b'")
    assert decompress(project(p, set()), 10) == []
    with pytest.raises(KeepSetNotInvolutionClosed):
        project(p, {"a"})


def test_decompress_cap(f8, f9):
    assert "".join(decompress(f8, 100)) == F8
    with pytest.raises(CapExceeded) as err:
        decompress(f9, 10)
    assert err.value.length == 34


def test_truncated_doubling(b8):
    assert "".join(decompress(b8, 100)) == B8


def test_group_alphabet_index():
    g = GroupAlphabet.of_rank(3)
    assert g.letters == ("a1", "a2", "a3", "a1'", "a2'", "a3'")
    assert g.index("a2'") == (1, -1)  # zero-based generator index
    assert g.inverse("a3") == "a3'"


def test_empty_production_inside_word():
    b = ProgramBuilder(AB)
    b.add("E", Empty())
    b.add("A", Terminal("a"))
    b.add("R", [b.ref("E"), b.ref("A"), b.ref("E")])
    p = b.build()
    assert p.length == 1
    assert char_at(p, 0) == "a"
