"""Line-based text format for programs.

Example::

    # Fibonacci words
    alphabet a b
    F1 -> 'b'
    F2 -> 'a'
    F3 -> F2 F1
    F4 -> F3 F2[0:2] ~F1
    root F4

``group-alphabet a b`` declares letters a, b and their inverses a', b'.
Items are quoted letters, non-terminal names, ``~NAME`` for an inverted
reference, ``NAME[i:j]`` / ``~NAME[i:j]`` for truncations (either bound may be
negative or omitted) and ``eps`` for the empty word.
"""
from __future__ import annotations

import re
from pathlib import Path
from typing import Union

from .core import Alphabet, Empty, GroupAlphabet, Lit, Program, ProgramBuilder, Ref, Seq, Terminal
from .errors import ParseError, SLPError

_LETTER = re.compile(r"'([A-Za-z_][A-Za-z0-9_]*'?)'\Z")
_REF = re.compile(r"(~?)([A-Za-z_][A-Za-z0-9_]*)(?:\[(-?\d*):(-?\d*)\])?\Z")


def _bound(text: str):
    return None if text == "" else int(text)


def _fmt_bound(b):
    return "" if b is None else str(b)


def format_item(item, names) -> str:
    if isinstance(item, Lit):
        return f"'{item.letter}'"
    s = ("~" if item.inverted else "") + names[item.target]
    if item.trunc is not None:
        s += f"[{_fmt_bound(item.trunc[0])}:{_fmt_bound(item.trunc[1])}]"
    return s


def dumps(p: Program) -> str:
    alpha = p.alphabet
    if isinstance(alpha, GroupAlphabet):
        lines = ["group-alphabet " + " ".join(alpha.base)]
    else:
        lines = ["alphabet " + " ".join(alpha.letters)]
    for name, prod in zip(p.names, p.productions):
        if isinstance(prod, Terminal):
            rhs = f"'{prod.letter}'"
        elif isinstance(prod, Empty):
            rhs = "eps"
        else:
            rhs = " ".join(format_item(x, p.names) for x in prod.items)
        lines.append(f"{name} -> {rhs}")
    lines.append(f"root {p.names[p.root]}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> Program:
    builder = None
    root = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head in ("alphabet", "group-alphabet"):
            if builder is not None:
                raise ParseError("alphabet declared twice", lineno)
            letters = rest.split()
            try:
                alpha = GroupAlphabet(tuple(letters)) if head == "group-alphabet" else Alphabet(tuple(letters))
            except (ValueError, SLPError) as exc:
                raise ParseError(str(exc), lineno) from None
            builder = ProgramBuilder(alpha)
            continue
        if builder is None:
            raise ParseError("expected an alphabet declaration first", lineno)
        if head == "root":
            name = rest.strip()
            if name not in builder:
                raise ParseError(f"unknown root {name!r}", lineno)
            root = name
            continue
        lhs, arrow, rhs = line.partition("->")
        if not arrow:
            raise ParseError(f"cannot parse line: {raw.strip()!r}", lineno)
        name = lhs.strip()
        if not _REF.match(name) or "~" in name or "[" in name or name == "eps":
            raise ParseError(f"bad non-terminal name {name!r}", lineno)
        if name in builder:
            raise ParseError(f"non-terminal {name} defined twice", lineno)
        items = []
        for tok in rhs.split():
            if tok == "eps":
                continue
            m = _LETTER.match(tok)
            if m:
                letter = m.group(1)
                if letter not in builder.alphabet:
                    raise ParseError(f"letter {letter!r} not in the alphabet", lineno)
                items.append(Lit(letter))
                continue
            m = _REF.match(tok)
            if not m:
                raise ParseError(f"bad item {tok!r}", lineno)
            tilde, target, lo, hi = m.groups()
            if target not in builder:
                raise ParseError(f"{target} used before it is defined", lineno)
            trunc = None
            if lo is not None:
                trunc = (_bound(lo), _bound(hi))
            items.append(Ref(builder.index(target), bool(tilde), trunc))
        if len(items) == 1 and isinstance(items[0], Lit):
            prod = Terminal(items[0].letter)
        elif not items:
            prod = Empty()
        else:
            prod = Seq(tuple(items))
        builder.add(name, prod)
    if builder is None:
        raise ParseError("empty input", 0)
    if not builder.productions:
        raise ParseError("no productions", 0)
    try:
        return builder.build(root)
    except SLPError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), 0) from exc


def load(path: Union[str, Path]) -> Program:
    return loads(Path(path).read_text(encoding="utf-8"))


def dump(p: Program, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(p), encoding="utf-8")
