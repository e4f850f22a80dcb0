"""Word and membership problems built on compressed free reduction.

The central construction is the *leveled family*: non-terminals ``A{i}_{p}``
with ``A{i}_0 -> a_i`` and level p obtained from level p-1 by one step (a
Nielsen generator or a full endomorphism).  Its word at level p is the image
of ``a_i`` under the composite of the first p steps, while the program size
stays linear in the number of steps.
"""
from __future__ import annotations

import re
from collections import namedtuple
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

from .core import Empty, GroupAlphabet, Lit, Program, ProgramBuilder, Ref, Seq, Terminal, decompress, project
from .errors import (
    GeneratorTableMissing,
    LetterOutsideAlphabet,
    NotAnAutomorphism,
    ParseError,
    RankMismatch,
    SLPError,
    StrandIndexOutOfRange,
    UnknownTwistGenerator,
)
from .freegroup import Verdict, Workspace

# -- explicit words ---------------------------------------------------------------


def _inv(x: str) -> str:
    return x[:-1] if x.endswith("'") else x + "'"


def reduce_word(w: Iterable[str]) -> list:
    out = []
    for x in w:
        if out and out[-1] == _inv(x):
            out.pop()
        else:
            out.append(x)
    return out


def inverse_word(w: Sequence[str]) -> list:
    return [_inv(x) for x in reversed(w)]


# -- endomorphisms ----------------------------------------------------------------

@dataclass(frozen=True)
class Endomorphism:
    """Substitution ``base[i] -> images[i]``; an image is a letter tuple or a Program."""

    alphabet: GroupAlphabet
    images: tuple

    def __post_init__(self):
        imgs = tuple(x if isinstance(x, Program) else tuple(x) for x in self.images)
        object.__setattr__(self, "images", imgs)
        if len(imgs) != self.alphabet.rank:
            raise RankMismatch(f"{len(imgs)} images for rank {self.alphabet.rank}")
        for img in imgs:
            letters = img.alphabet.letters if isinstance(img, Program) else img
            for x in letters:
                if x not in self.alphabet:
                    raise LetterOutsideAlphabet(f"image letter {x!r} outside {self.alphabet.base}")

    @classmethod
    def from_mapping(cls, alphabet: GroupAlphabet, mapping: dict) -> "Endomorphism":
        for g in mapping:
            if g not in alphabet.base:
                raise LetterOutsideAlphabet(f"{g!r} is not a generator of {alphabet.base}")
        return cls(alphabet, tuple(tuple(mapping.get(g, (g,))) for g in alphabet.base))

    @classmethod
    def identity(cls, alphabet: GroupAlphabet) -> "Endomorphism":
        return cls(alphabet, tuple((g,) for g in alphabet.base))

    @property
    def rank(self) -> int:
        return self.alphabet.rank

    def image(self, i: int, cap: int = 10 ** 6) -> list:
        img = self.images[i]
        return decompress(img, cap) if isinstance(img, Program) else list(img)

    def apply(self, word: Sequence[str]) -> list:
        """Explicit reduced image of an explicit word."""
        out = []
        for x in word:
            i, sign = self.alphabet.index(x)
            img = self.image(i)
            out.extend(img if sign > 0 else inverse_word(img))
        return reduce_word(out)

    def mapping(self) -> dict:
        return {g: self.image(i) for i, g in enumerate(self.alphabet.base)}


# -- Nielsen words ------------------------------------------------------------------

Token = namedtuple("Token", "kind i j")
_TOKEN = re.compile(r"(inv)(\d+)\Z|(mul)(\d+),(\d+)(\^-1)?\Z")


@dataclass(frozen=True)
class NielsenWord:
    """Composite ``phi_1 o phi_2 o ... o phi_n`` of Nielsen generators (1-based indices)."""

    tokens: tuple
    rank: int

    def __post_init__(self):
        toks = tuple(Token(*t) for t in self.tokens)
        object.__setattr__(self, "tokens", toks)
        for t in toks:
            if t.kind not in ("inv", "mul", "mulinv"):
                raise ValueError(f"unknown Nielsen generator {t.kind!r}")
            idx = [t.i] if t.kind == "inv" else [t.i, t.j]
            if any(not 1 <= x <= self.rank for x in idx):
                raise RankMismatch(f"generator {format_token(t)} outside rank {self.rank}")
            if t.kind != "inv" and t.i == t.j:
                raise ValueError(f"{format_token(t)} multiplies a generator by itself")

    def __len__(self):
        return len(self.tokens)

    def __add__(self, other: "NielsenWord") -> "NielsenWord":
        return NielsenWord(self.tokens + other.tokens, max(self.rank, other.rank))

    def power(self, n: int) -> "NielsenWord":
        if n < 0:
            return self.inverse().power(-n)
        return NielsenWord(self.tokens * n, self.rank)

    def inverse(self) -> "NielsenWord":
        swap = {"inv": "inv", "mul": "mulinv", "mulinv": "mul"}
        return NielsenWord(tuple(Token(swap[t.kind], t.i, t.j) for t in reversed(self.tokens)), self.rank)

    def with_rank(self, m: int) -> "NielsenWord":
        return NielsenWord(self.tokens, m)

    def __str__(self):
        return " ".join(format_token(t) for t in self.tokens)


def format_token(t: Token) -> str:
    if t.kind == "inv":
        return f"inv{t.i}"
    return f"mul{t.i},{t.j}" + ("^-1" if t.kind == "mulinv" else "")


def parse_nielsen(text: str, rank: Optional[int] = None) -> NielsenWord:
    toks = []
    for raw in text.replace(";", " ").split():
        m = _TOKEN.match(raw)
        if not m:
            raise ParseError(f"bad Nielsen generator {raw!r}")
        if m.group(1):
            toks.append(Token("inv", int(m.group(2)), None))
        else:
            kind = "mulinv" if m.group(6) else "mul"
            toks.append(Token(kind, int(m.group(4)), int(m.group(5))))
    top = max([t.i for t in toks] + [t.j for t in toks if t.j is not None] + [1])
    if rank is None:
        rank = top
    elif top > rank:
        raise RankMismatch(f"generator index {top} exceeds rank {rank}")
    return NielsenWord(tuple(toks), rank)


def nielsen_images(word: NielsenWord, alphabet: Optional[GroupAlphabet] = None) -> list:
    """Explicit reduced images of the generators (exponential in general)."""
    alphabet = alphabet or GroupAlphabet.of_rank(word.rank)
    imgs = [[g] for g in alphabet.base]
    for t in word.tokens:
        i = t.i - 1
        if t.kind == "inv":
            step = [_inv(alphabet.base[i])]
        elif t.kind == "mul":
            step = [alphabet.base[i], alphabet.base[t.j - 1]]
        else:
            step = [alphabet.base[i], _inv(alphabet.base[t.j - 1])]
        sub = []
        for x in step:
            k, sign = alphabet.index(x)
            sub.extend(imgs[k] if sign > 0 else inverse_word(imgs[k]))
        imgs[i] = reduce_word(sub)
    return imgs


# tuple moves under right composition: phi o token acts on the image tuple
def _tuple_move(U, t: Token):
    i = t.i - 1
    if t.kind == "inv":
        U[i] = inverse_word(U[i])
    elif t.kind == "mul":
        U[i] = reduce_word(U[i] + U[t.j - 1])
    else:
        U[i] = reduce_word(U[i] + inverse_word(U[t.j - 1]))


def _move_tokens(kind: str, i: int, j: int) -> list:
    """Tokens realizing one elementary move on positions i, j (1-based)."""
    if kind == "right+":
        return [Token("mul", i, j)]
    if kind == "right-":
        return [Token("mulinv", i, j)]
    if kind == "left+":   # u_i <- u_j u_i
        return [Token("inv", i, None), Token("mulinv", i, j), Token("inv", i, None)]
    if kind == "left-":   # u_i <- u_j' u_i
        return [Token("inv", i, None), Token("mul", i, j), Token("inv", i, None)]
    raise ValueError(kind)


def swap_tokens(i: int, j: int) -> list:
    """Tokens exchanging the images at positions i and j."""
    return ([Token("mul", i, j), Token("mulinv", j, i), Token("inv", j, None)]
            + _move_tokens("left-", i, j))


_MOVES = ("right+", "right-", "left+", "left-")


def _moved(U, kind, i, j):
    ui, uj = U[i], U[j]
    if kind == "right+":
        return reduce_word(ui + uj)
    if kind == "right-":
        return reduce_word(ui + inverse_word(uj))
    if kind == "left+":
        return reduce_word(uj + ui)
    return reduce_word(inverse_word(uj) + ui)


def nielsen_decompose(phi: Endomorphism, max_steps: int = 10 ** 4) -> NielsenWord:
    """Nielsen word equal to ``phi``; raises NotAnAutomorphism when none exists.

    The image tuple is Nielsen-reduced by length-decreasing elementary moves
    (with a two-move lookahead when no single move helps) until it is a
    signed permutation of the basis; the recorded moves are then inverted.
    """
    alphabet = phi.alphabet
    m = alphabet.rank
    U = [reduce_word(phi.image(i)) for i in range(m)]
    moves = []

    def run(tokens):
        for t in tokens:
            _tuple_move(U, t)
            moves.append(t)

    def done():
        return all(len(u) == 1 for u in U) and len({alphabet.index(u[0])[0] for u in U}) == m

    steps = 0
    while not done():
        steps += 1
        if steps > max_steps or any(not u for u in U):
            raise NotAnAutomorphism("images do not form a basis")
        best = None
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                for kind in _MOVES:
                    gain = len(U[i]) - len(_moved(U, kind, i, j))
                    if gain > 0 and (best is None or gain > best[0]):
                        best = (gain, kind, i, j)
        if best is not None:
            run(_move_tokens(best[1], best[2] + 1, best[3] + 1))
            continue
        found = _lookahead(U, m)
        if found is None:
            raise NotAnAutomorphism("no length-reducing Nielsen move; images are not a basis")
        run(found)
    for i in range(m):
        if U[i][0].endswith("'"):
            run([Token("inv", i + 1, None)])
    for i in range(m):
        if U[i][0] != alphabet.base[i]:
            j = next(k for k in range(m) if U[k][0] == alphabet.base[i])
            run(swap_tokens(i + 1, j + 1))
    result = NielsenWord(tuple(moves), m).inverse()
    if nielsen_images(result, alphabet) != [reduce_word(phi.image(i)) for i in range(m)]:
        raise AssertionError("Nielsen decomposition failed verification")
    return result


def _lookahead(U, m):
    total = sum(len(u) for u in U)
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            for kind in _MOVES:
                new = _moved(U, kind, i, j)
                if len(new) > len(U[i]):
                    continue
                V = list(U)
                V[i] = new
                for a in range(m):
                    for b in range(m):
                        if a == b:
                            continue
                        for kind2 in _MOVES:
                            if len(_moved(V, kind2, a, b)) - len(V[a]) + sum(len(v) for v in V) < total:
                                return _move_tokens(kind, i + 1, j + 1) + _move_tokens(kind2, a + 1, b + 1)
    return None


# -- leveled families -------------------------------------------------------------

@dataclass(frozen=True)
class LeveledFamily:
    program: Program
    alphabet: GroupAlphabet
    levels: int
    index: dict = field(compare=False, repr=False)

    def nonterminal(self, i: int, p: int) -> int:
        """Index of ``A{i}_{p}`` (i is 1-based)."""
        return self.index[(i, p)]

    def root(self, i: int, p: Optional[int] = None) -> Program:
        return self.program.with_root(self.nonterminal(i, self.levels if p is None else p))


Step = Union[Token, Endomorphism]


def _steps(phi, levels: Optional[int]) -> list:
    if isinstance(phi, NielsenWord):
        toks = list(phi.tokens)
        return toks if levels is None else toks[:levels]
    if isinstance(phi, Endomorphism):
        return [phi] * (1 if levels is None else levels)
    steps = list(phi)
    return steps if levels is None else steps[:levels]


def build_leveled_family(phi, levels: Optional[int] = None,
                         alphabet: Optional[GroupAlphabet] = None) -> LeveledFamily:
    """Program with ``A{i}_{p}`` producing the image of generator i after p steps.

    ``phi`` is a NielsenWord (one token per level), an Endomorphism (applied at
    every level) or a sequence of Tokens / Endomorphisms.
    """
    if alphabet is None:
        if isinstance(phi, Endomorphism):
            alphabet = phi.alphabet
        elif isinstance(phi, NielsenWord):
            alphabet = GroupAlphabet.of_rank(phi.rank)
        else:
            raise RankMismatch("an alphabet is needed for a bare step sequence")
    if isinstance(phi, NielsenWord) and phi.rank != alphabet.rank:
        raise RankMismatch(f"Nielsen word of rank {phi.rank} over an alphabet of rank {alphabet.rank}")
    if levels is not None and levels < 0:
        raise ValueError("levels must be non-negative")
    steps = _steps(phi, levels)
    m = alphabet.rank
    b = ProgramBuilder(alphabet)
    index = {}
    for i in range(1, m + 1):
        index[(i, 0)] = b.add(f"A{i}_0", Terminal(alphabet.base[i - 1]))
    for p, step in enumerate(steps, start=1):
        if isinstance(step, Endomorphism):
            if step.alphabet != alphabet:
                raise RankMismatch("endomorphism over a different alphabet")
            for i in range(1, m + 1):
                img = step.images[i - 1]
                if isinstance(img, Program):
                    prod = _embed_program(b, img, index, p, i)
                else:
                    items = []
                    for x in img:
                        k, sign = alphabet.index(x)
                        items.append(Ref(index[(k + 1, p - 1)], sign < 0))
                    prod = Seq(tuple(items))
                index[(i, p)] = b.add(f"A{i}_{p}", prod)
            continue
        t = Token(*step)
        if any(x is not None and not 1 <= x <= m for x in (t.i, t.j)):
            raise RankMismatch(f"{format_token(t)} outside rank {m}")
        for i in range(1, m + 1):
            prev = index[(i, p - 1)]
            if i != t.i:
                prod = Seq((Ref(prev),))
            elif t.kind == "inv":
                prod = Seq((Ref(prev, True),))
            else:
                prod = Seq((Ref(prev), Ref(index[(t.j, p - 1)], t.kind == "mulinv")))
            index[(i, p)] = b.add(f"A{i}_{p}", prod)
    prog = b.build(index[(1, len(steps))])
    return LeveledFamily(prog, alphabet, len(steps), index)


def _embed_program(b: ProgramBuilder, img: Program, index: dict, p: int, i: int):
    """Copy ``img`` with letters replaced by level p-1 references; return root production."""
    alphabet = b.alphabet
    local = {}

    def letter_ref(x):
        k, sign = alphabet.index(x)
        return Ref(index[(k + 1, p - 1)], sign < 0)

    root_prod = None
    for idx, (name, prod) in enumerate(zip(img.names, img.productions)):
        if isinstance(prod, Terminal):
            new = Seq((letter_ref(prod.letter),))
        elif isinstance(prod, Empty):
            new = Empty()
        else:
            new = Seq(tuple(letter_ref(x.letter) if isinstance(x, Lit)
                            else Ref(local[x.target], x.inverted, x.trunc) for x in prod.items))
        if idx == img.root:
            root_prod = new
            break
        local[idx] = b.add(f"I{i}_{p}_{name}", new)
    return root_prod


def _as_nielsen(phi, rank: Optional[int] = None) -> NielsenWord:
    if isinstance(phi, NielsenWord):
        return phi if rank is None or rank == phi.rank else phi.with_rank(rank)
    if isinstance(phi, str):
        return parse_nielsen(phi, rank)
    return NielsenWord(tuple(phi), rank or max([t[1] for t in phi] + [t[2] or 0 for t in phi] + [1]))


def aut_apply(phi, word: Sequence[str], rank: Optional[int] = None) -> Program:
    """Program producing ``Phi(w)`` (not reduced)."""
    phi = _as_nielsen(phi, rank)
    fam = build_leveled_family(phi)
    alphabet = fam.alphabet
    b = ProgramBuilder(alphabet)
    for name, prod in zip(fam.program.names, fam.program.productions):
        b.add(name, prod)
    items = []
    for x in word:
        if x not in alphabet:
            raise RankMismatch(f"letter {x!r} outside rank {alphabet.rank}")
        k, sign = alphabet.index(x)
        items.append(Ref(fam.nonterminal(k + 1, fam.levels), sign < 0))
    b.add("R", Seq(tuple(items)))
    return b.build("R")


def _family_workspace(fam: LeveledFamily, program: Optional[Program] = None):
    ws = Workspace(fam.alphabet)
    from .hagenah import load_program
    nodes = load_program(ws.slp, program or fam.program)
    return ws, nodes


def aut_is_identity(phi, rank: Optional[int] = None, stats: Optional[dict] = None) -> bool:
    phi = _as_nielsen(phi, rank)
    fam = build_leveled_family(phi)
    ws, nodes = _family_workspace(fam)
    result = True
    for i in range(1, phi.rank + 1):
        r, _ = ws.reduce(nodes[fam.nonterminal(i, fam.levels)])
        if ws.length(r) != 1 or ws.slp.letter[r] != fam.alphabet.base[i - 1]:
            result = False
            break
    if stats is not None:
        stats.update(ws.stats, levels=fam.levels)
    return result


# -- free-by-cyclic groups ----------------------------------------------------------

def fbc_levels(word: Sequence[str]) -> list:
    """``(position, level)`` of every non-t letter of a mixed word.

    The level is the t-exponent of the prefix before the letter, shifted so
    that the minimum over all prefixes (including the empty one and the whole
    word) is 0.
    """
    d = 0
    low = 0
    raw = []
    for q, x in enumerate(word):
        if x == "t":
            d += 1
        elif x == "t'":
            d -= 1
        else:
            raw.append((q, d))
        low = min(low, d)
    return [(q, v - low) for q, v in raw]


def fbc_is_trivial(phi: Endomorphism, word: Sequence[str], stats: Optional[dict] = None) -> bool:
    """Triviality of a word over the generators and t in the mapping torus of phi."""
    alphabet = phi.alphabet
    for x in word:
        if x not in ("t", "t'") and x not in alphabet:
            raise LetterOutsideAlphabet(f"letter {x!r} is neither t, t' nor in {alphabet.letters}")
    w = reduce_word(word)
    if sum(1 if x == "t" else -1 if x == "t'" else 0 for x in w) != 0:
        return False
    levels = fbc_levels(w)
    top = max((v for _, v in levels), default=0)
    fam = build_leveled_family(phi, top)
    b = ProgramBuilder(alphabet)
    for name, prod in zip(fam.program.names, fam.program.productions):
        b.add(name, prod)
    items = []
    for q, v in levels:
        k, sign = alphabet.index(w[q])
        items.append(Ref(fam.nonterminal(k + 1, v), sign < 0))
    b.add("W", Seq(tuple(items)))
    prog = b.build("W")
    ws = Workspace(alphabet)
    from .hagenah import load_program
    r, _ = ws.reduce(load_program(ws.slp, prog)[prog.root])
    if stats is not None:
        stats.update(ws.stats, levels=top)
    return r is None


# -- Inn / Out -------------------------------------------------------------------

def inn_membership(phi, rank: Optional[int] = None) -> Verdict:
    """Is Phi inner?  The witness U satisfies Phi(x) = U x U' for every x."""
    phi = _as_nielsen(phi, rank)
    m = phi.rank
    fam = build_leveled_family(phi)
    ws, nodes = _family_workspace(fam)
    slp = ws.slp
    base = fam.alphabet.base
    reds = [ws.reduce(nodes[fam.nonterminal(i, fam.levels)])[0] for i in range(1, m + 1)]
    stats = ws.stats

    def single(u, letter):
        return u is not None and slp.length[u] == 1 and slp.letter[u] == letter

    if m == 1:
        ok = single(reds[0], base[0])
        return Verdict(ok, ws.export(None, "U") if ok else None, stats)
    r1, _, k1 = ws.cyclic(nodes[fam.nonterminal(1, fam.levels)])
    n1 = ws.length(r1)
    if not single(slp.cut(r1, k1, n1 - k1), base[0]):
        return Verdict(False, None, stats)
    u1 = slp.cut(r1, 0, k1)
    u1bar = slp.bar(u1)
    a1 = slp.terminal(base[0])
    power = None
    for i in range(2, m + 1):
        psi = slp.concat_all([u1bar, reds[i - 1], u1])
        s, _, k = ws.cyclic(psi)
        n = ws.length(s)
        if not single(slp.cut(s, k, n - k), base[i - 1]):
            return Verdict(False, None, stats)
        conj = slp.cut(s, 0, k)
        if k == 0:
            e = 0
        else:
            first = slp.char_at(conj, 0)
            if first not in (base[0], base[0] + "'"):
                return Verdict(False, None, stats)
            if not ws.equal(conj, slp.power(slp.terminal(first), k)):
                return Verdict(False, None, stats)
            e = k if first == base[0] else -k
        if power is None:
            power = e
        elif power != e:
            return Verdict(False, None, stats)
    pw = slp.power(a1, power) if power > 0 else slp.bar(slp.power(a1, -power))
    u = slp.concat(u1, pw)
    ubar = slp.bar(u)
    for i in range(1, m + 1):
        lhs, _ = ws.reduce(slp.concat_all([u, slp.terminal(base[i - 1]), ubar]))
        if not ws.equal(lhs, reds[i - 1]):
            return Verdict(False, None, stats)
    ured, _ = ws.reduce(u)
    return Verdict(True, ws.export(ured, "U"), stats)


def inner_automorphism(u: Sequence[str], rank: int) -> NielsenWord:
    """Nielsen word for conjugation ``x -> u x u'``."""
    alphabet = GroupAlphabet.of_rank(rank)
    ubar = inverse_word(u)
    images = tuple(tuple(reduce_word(list(u) + [g] + ubar)) for g in alphabet.base)
    return nielsen_decompose(Endomorphism(alphabet, images))


def punctured_disk_mcg_membership(phi, rank: Optional[int] = None) -> bool:
    """Boundary word a_1...a_m fixed and each a_i sent to a conjugate of a positive generator."""
    phi = _as_nielsen(phi, rank)
    m = phi.rank
    fam = build_leveled_family(phi)
    ws, nodes = _family_workspace(fam)
    slp = ws.slp
    base = fam.alphabet.base
    tops = [nodes[fam.nonterminal(i, fam.levels)] for i in range(1, m + 1)]
    boundary, _ = ws.reduce(slp.concat_all(tops))
    if not ws.equal(boundary, slp.word_node(list(base))):
        return False
    for u in tops:
        r, _, k = ws.cyclic(u)
        core = slp.cut(r, k, ws.length(r) - k)
        if core is None or slp.length[core] != 1 or slp.letter[core] not in base:
            return False
    return True


# -- braids -------------------------------------------------------------------------

_BRAID = re.compile(r"s(\d+)(\^-1|\^\+?1)?\Z")


def parse_braid(text: str) -> list:
    out = []
    for raw in text.split():
        m = _BRAID.match(raw)
        if not m:
            raise ParseError(f"bad braid letter {raw!r}")
        out.append((int(m.group(1)), -1 if m.group(2) == "^-1" else 1))
    return out


@lru_cache(maxsize=None)
def _sigma_tokens(i: int, m: int) -> tuple:
    alphabet = GroupAlphabet.of_rank(m)
    a, b = alphabet.base[i - 1], alphabet.base[i]
    phi = Endomorphism.from_mapping(alphabet, {a: (a, b, a + "'"), b: (a,)})
    return nielsen_decompose(phi).tokens


def braid_to_nielsen(braid, strands: int) -> NielsenWord:
    """Nielsen word for a braid; sigma_i acts by a_i -> a_i a_{i+1} a_i', a_{i+1} -> a_i."""
    if isinstance(braid, str):
        braid = parse_braid(braid)
    toks = []
    for i, sign in braid:
        if not 1 <= i <= strands - 1:
            raise StrandIndexOutOfRange(f"s{i} needs 1 <= i <= {strands - 1}")
        w = NielsenWord(_sigma_tokens(i, strands), strands)
        toks.extend((w if sign > 0 else w.inverse()).tokens)
    return NielsenWord(tuple(toks), strands)


def braid_is_trivial(braid, strands: int, stats: Optional[dict] = None) -> bool:
    return aut_is_identity(braid_to_nielsen(braid, strands), stats=stats)


# -- handlebody groups ------------------------------------------------------------

def genus_alphabet(g: int) -> GroupAlphabet:
    return GroupAlphabet(tuple(f"a{i}" for i in range(1, g + 1)) + tuple(f"b{i}" for i in range(1, g + 1)))


def parse_map(text: str, alphabet: Optional[GroupAlphabet] = None) -> dict:
    """``{generator: image letters}`` from lines ``a1 -> a1 b1``."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        lhs, arrow, rhs = line.partition("->")
        if not arrow:
            raise ParseError(f"expected 'x -> word', got {raw.strip()!r}", lineno)
        g = lhs.strip()
        img = [x for x in rhs.split() if x != "eps"]
        if alphabet is not None:
            for x in [g] + img:
                if x not in alphabet:
                    raise LetterOutsideAlphabet(f"line {lineno}: letter {x!r} outside {alphabet.base}")
            if g not in alphabet.base:
                raise ParseError(f"left side {g!r} must be a generator", lineno)
        if g in out:
            raise ParseError(f"generator {g} mapped twice", lineno)
        out[g] = img
    return out


def parse_actions(text: str, alphabet: GroupAlphabet) -> dict:
    """``{twist name: Endomorphism}`` from ``twist NAME`` blocks of map lines."""
    blocks = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("twist "):
            current = line.split(None, 1)[1].strip()
            if current in blocks:
                raise ParseError(f"twist {current} defined twice", lineno)
            blocks[current] = []
            continue
        if current is None:
            raise ParseError("map line before any 'twist NAME' header", lineno)
        blocks[current].append(raw)
    return {name: Endomorphism.from_mapping(alphabet, parse_map("\n".join(lines), alphabet))
            for name, lines in blocks.items()}


def load_genus2_actions() -> dict:
    from importlib import resources
    text = resources.files("compwords").joinpath("data/genus2_humphries.map").read_text(encoding="utf-8")
    return parse_actions(text, genus_alphabet(2))


def _twist_word(twists, actions: dict, alphabet: GroupAlphabet) -> NielsenWord:
    if actions is None:
        raise GeneratorTableMissing("no twist action table supplied")
    if isinstance(twists, str):
        twists = twists.split()
    toks = []
    cache = {}
    for raw in twists:
        name, inverse = (raw[:-3], True) if raw.endswith("^-1") else (raw, False)
        if name not in actions:
            raise UnknownTwistGenerator(f"unknown twist generator {name!r}")
        if name not in cache:
            phi = actions[name]
            if phi.alphabet != alphabet:
                raise RankMismatch(f"twist {name} acts on {phi.alphabet.base}, expected {alphabet.base}")
            cache[name] = nielsen_decompose(phi)
        w = cache[name]
        toks.extend((w.inverse() if inverse else w).tokens)
    return NielsenWord(tuple(toks), alphabet.rank)


def _projected_trivial(fam: LeveledFamily, gens: Sequence[int], keep_prefix: str) -> bool:
    alphabet = fam.alphabet
    keep = [x for x in alphabet.letters if x.startswith(keep_prefix)]
    proj = project(fam.program, keep)
    ws, nodes = _family_workspace(fam, proj)
    for i in gens:
        r, _ = ws.reduce(nodes[fam.nonterminal(i, fam.levels)])
        if r is not None:
            return False
    return True


def handlebody_membership(twists, genus: int, actions: Optional[dict] = None) -> bool:
    """Does the composed twist map extend over the handlebody with meridians b_i?

    Every image of a meridian b_i, with the b-letters deleted, must be trivial.
    """
    alphabet = genus_alphabet(genus)
    word = _twist_word(twists, actions, alphabet)
    fam = build_leveled_family(word, alphabet=alphabet)
    return _projected_trivial(fam, range(genus + 1, 2 * genus + 1), "a")


def heegaard_membership(twists, genus: int, actions: Optional[dict] = None) -> bool:
    """Handlebody test on both sides: b-meridians for V and a-meridians for W."""
    alphabet = genus_alphabet(genus)
    word = _twist_word(twists, actions, alphabet)
    fam = build_leveled_family(word, alphabet=alphabet)
    return (_projected_trivial(fam, range(genus + 1, 2 * genus + 1), "a")
            and _projected_trivial(fam, range(1, genus + 1), "b"))
