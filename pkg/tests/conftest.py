import pytest

from compwords import Alphabet, GroupAlphabet, ProgramBuilder, Terminal, from_word
from compwords.oracle import fibonacci, iterated_automorphism, truncated_doubling

F8 = "abaababaabaababaababa"
F9 = "abaababaabaababaababaabaababaabaab"
B8 = "bababbabbbababbabbababbabbbababbab"
# The 41-letter word printed for A_5 of the iterated automorphism family.
A5_PRINTED = ("b a b' b b a' b' b a b' b a b' b' b a' b' b a b' b b a' "
              "b' b a b' b b a' b' b a' b' b a b' b' b a' b'")


def W(text):
    """Letters of a word written with spaces, or one letter per character."""
    return text.split() if " " in text else list(text)


AB = Alphabet(("a", "b"))
G2 = GroupAlphabet(("a", "b"))


def word_program(text, alphabet=G2):
    return from_word(alphabet, W(text))


def binary_program(text, alphabet=G2):
    """Normal-form program for a word, built as a left comb."""
    letters = W(text)
    b = ProgramBuilder(alphabet)
    seen = {}
    for x in letters:
        if x not in seen:
            seen[x] = f"T{len(seen)}"
            b.add(seen[x], Terminal(x))
    cur = seen[letters[0]]
    for k, x in enumerate(letters[1:]):
        name = f"C{k}"
        b.add(name, [b.ref(cur), b.ref(seen[x])])
        cur = name
    return b.build(cur)


@pytest.fixture
def f8():
    return fibonacci(8)


@pytest.fixture
def f9():
    return fibonacci(9)


@pytest.fixture
def b8():
    return truncated_doubling(8)


@pytest.fixture
def a5():
    return iterated_automorphism(5)


# one (number, title, status, detail) entry per acceptance criterion run
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {number} {status}: {title} ({detail})")
