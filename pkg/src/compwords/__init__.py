"""Grammar-compressed words and polynomial-time algorithms on them."""
from .core import (
    Alphabet,
    Empty,
    GroupAlphabet,
    Lit,
    Program,
    ProgramBuilder,
    Ref,
    Seq,
    Terminal,
    char_at,
    concat_programs,
    decompress,
    from_word,
    invert,
    normalize,
    project,
    substring,
    validate,
)
from .textformat import dump, dumps, load, loads

__version__ = "0.1.0"
