"""Straight line programs and composition systems.

A :class:`Program` is an ordered list of productions over an alphabet.  Each
production may reference earlier non-terminals only, optionally inverted
(group alphabets) and optionally truncated.  Programs validate themselves on
construction and carry their length/height table, so every instance is
well formed.

Lengths and indices are Python ints throughout; words routinely reach 2**n
letters for n non-terminals.
"""
from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .errors import (
    CapExceeded,
    CyclicReference,
    DanglingReference,
    HasTruncation,
    IndexOutOfRange,
    KeepSetNotInvolutionClosed,
    NotGroupAlphabet,
    SLPError,
    TruncationOutOfRange,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def is_identifier(s: str) -> bool:
    return bool(_IDENT.match(s))


@dataclass(frozen=True)
class Alphabet:
    letters: tuple

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if len(set(letters)) != len(letters):
            raise ValueError(f"duplicate letters in alphabet {letters}")
        for a in letters:
            if not is_identifier(a):
                raise ValueError(f"letter {a!r} is not an identifier")

    is_group = False

    def __contains__(self, letter):
        return letter in self._index

    def __iter__(self):
        return iter(self.letters)

    def __len__(self):
        return len(self.letters)

    @property
    def _index(self):
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = frozenset(self.letters)
            object.__setattr__(self, "_idx", idx)
        return idx

    def inverse(self, letter):
        raise NotGroupAlphabet("alphabet has no involution")


@dataclass(frozen=True)
class GroupAlphabet:
    """Letters ``a`` and formal inverses ``a'`` for every base symbol."""

    base: tuple

    def __post_init__(self):
        base = tuple(self.base)
        object.__setattr__(self, "base", base)
        if not base:
            raise ValueError("group alphabet needs at least one generator")
        if len(set(base)) != len(base):
            raise ValueError(f"duplicate generators {base}")
        for a in base:
            if not is_identifier(a):
                raise ValueError(f"generator {a!r} is not an identifier")
        inv = {}
        for a in base:
            inv[a] = a + "'"
            inv[a + "'"] = a
        object.__setattr__(self, "_inv", inv)

    is_group = True

    @classmethod
    def of_rank(cls, m: int, prefix: str = "a") -> "GroupAlphabet":
        return cls(tuple(f"{prefix}{i}" for i in range(1, m + 1)))

    @property
    def rank(self) -> int:
        return len(self.base)

    @property
    def letters(self) -> tuple:
        return self.base + tuple(a + "'" for a in self.base)

    @property
    def involution(self) -> dict:
        return dict(self._inv)

    def __contains__(self, letter):
        return letter in self._inv

    def __iter__(self):
        return iter(self.letters)

    def __len__(self):
        return 2 * len(self.base)

    def inverse(self, letter: str) -> str:
        try:
            return self._inv[letter]
        except KeyError:
            raise SLPError(f"letter {letter!r} not in alphabet") from None

    def index(self, letter: str) -> tuple:
        """Return ``(i, sign)`` with i the 0-based generator index."""
        if letter.endswith("'"):
            return self.base.index(letter[:-1]), -1
        return self.base.index(letter), 1


AnyAlphabet = Union[Alphabet, GroupAlphabet]


def invert_word(alphabet, word: Sequence[str]) -> list:
    inv = alphabet.inverse
    return [inv(a) for a in reversed(word)]


# -- productions -----------------------------------------------------------

@dataclass(frozen=True)
class Ref:
    """Reference to a non-terminal, optionally inverted and/or truncated.

    Truncation applies to the (possibly inverted) referenced word; ``None``
    bounds mean start/end and negative bounds count from the end.
    """

    target: int
    inverted: bool = False
    trunc: Optional[tuple] = None

    @property
    def truncated(self) -> bool:
        return self.trunc is not None

    def resolve(self, n: int) -> tuple:
        if self.trunc is None:
            return 0, n
        return resolve_slice(self.trunc[0], self.trunc[1], n)


@dataclass(frozen=True)
class Lit:
    letter: str


@dataclass(frozen=True)
class Terminal:
    letter: str


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Seq:
    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


Production = Union[Terminal, Empty, Seq]


def resolve_slice(lo, hi, n):
    lo = 0 if lo is None else (lo + n if lo < 0 else lo)
    hi = n if hi is None else (hi + n if hi < 0 else hi)
    return lo, hi


def _canonical(prod):
    if isinstance(prod, Seq):
        if not prod.items:
            return Empty()
        if len(prod.items) == 1 and isinstance(prod.items[0], Lit):
            return Terminal(prod.items[0].letter)
    return prod


@dataclass(frozen=True)
class LengthTable:
    lengths: tuple
    heights: tuple
    # per Seq production: cumulative start offsets of its resolved segments
    starts: tuple = field(repr=False, compare=False, default=())
    # per Seq production: resolved (lo, hi) of each item
    spans: tuple = field(repr=False, compare=False, default=())


@dataclass(frozen=True)
class Program:
    """A straight line program or composition system with a single root."""

    alphabet: AnyAlphabet
    productions: tuple
    root: int
    names: tuple = ()
    table: LengthTable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        prods = tuple(_canonical(p) for p in self.productions)
        object.__setattr__(self, "productions", prods)
        names = tuple(self.names) if self.names else tuple(f"N{i}" for i in range(len(prods)))
        object.__setattr__(self, "names", names)
        if len(names) != len(prods):
            raise ValueError("names and productions differ in length")
        if len(set(names)) != len(names):
            raise ValueError("non-terminal names must be unique")
        for nm in names:
            if not is_identifier(nm) or nm == "eps":
                raise ValueError(f"bad non-terminal name {nm!r}")
        object.__setattr__(self, "table", _build_table(self))

    # -- derived data ------------------------------------------------------
    def __len__(self):
        return len(self.productions)

    @property
    def length(self) -> int:
        return self.table.lengths[self.root]

    def length_of(self, b: int) -> int:
        return self.table.lengths[b]

    def height_of(self, b: int) -> int:
        return self.table.heights[b]

    @property
    def height(self) -> int:
        return self.table.heights[self.root]

    @property
    def has_truncation(self) -> bool:
        return any(isinstance(p, Seq) and any(isinstance(x, Ref) and x.truncated for x in p.items)
                   for p in self.productions)

    @property
    def has_inversion(self) -> bool:
        return any(isinstance(p, Seq) and any(isinstance(x, Ref) and x.inverted for x in p.items)
                   for p in self.productions)

    @property
    def kind(self) -> str:
        prods = self.productions
        if len(prods) == 1 and isinstance(prods[0], Empty):
            return "slp-normal-form"
        if all(isinstance(p, Terminal) or (
                isinstance(p, Seq) and len(p.items) == 2 and all(
                    isinstance(x, Ref) and not x.inverted and not x.truncated for x in p.items))
               for p in prods):
            return "slp-normal-form"
        if all(not isinstance(p, Seq) or len(p.items) <= 2 for p in prods):
            return "composition-system"
        return "general"

    def index(self, name: str) -> int:
        return self.names.index(name)

    def with_root(self, root: Union[int, str]) -> "Program":
        if isinstance(root, str):
            root = self.index(root)
        return Program(self.alphabet, self.productions, root, self.names)

    def word(self, cap: Optional[int] = None) -> list:
        return decompress(self, self.length if cap is None else cap)

    def __str__(self):
        from .textformat import dumps
        return dumps(self)


def _build_table(p: Program) -> LengthTable:
    alphabet = p.alphabet
    n = len(p.productions)
    if not 0 <= p.root < n:
        raise DanglingReference(f"root {p.root} does not exist")
    lengths = [0] * n
    heights = [0] * n
    starts = [None] * n
    spans = [None] * n
    for b, prod in enumerate(p.productions):
        if isinstance(prod, Terminal):
            if prod.letter not in alphabet:
                raise SLPError(f"letter {prod.letter!r} of {p.names[b]} not in alphabet")
            lengths[b] = 1
            heights[b] = 1
        elif isinstance(prod, Empty):
            pass
        elif isinstance(prod, Seq):
            total = 0
            h = 0
            st = []
            sp = []
            for item in prod.items:
                st.append(total)
                if isinstance(item, Lit):
                    if item.letter not in alphabet:
                        raise SLPError(f"letter {item.letter!r} of {p.names[b]} not in alphabet")
                    sp.append((0, 1))
                    total += 1
                elif isinstance(item, Ref):
                    t = item.target
                    if not isinstance(t, int) or t < 0 or t >= n:
                        raise DanglingReference(f"{p.names[b]} references missing non-terminal {t}")
                    if t >= b:
                        raise CyclicReference(
                            f"{p.names[b]} references {p.names[t]}, which is not defined before it")
                    if item.inverted and not alphabet.is_group:
                        raise NotGroupAlphabet(f"{p.names[b]} inverts a reference over a plain alphabet")
                    lt = lengths[t]
                    lo, hi = item.resolve(lt)
                    if not 0 <= lo <= hi <= lt:
                        raise TruncationOutOfRange(p.names[t], item.trunc[0], item.trunc[1], lt)
                    sp.append((lo, hi))
                    total += hi - lo
                    h = max(h, heights[t])
                else:
                    raise SLPError(f"bad item {item!r}")
            lengths[b] = total
            heights[b] = h + 1
            starts[b] = tuple(st)
            spans[b] = tuple(sp)
        else:
            raise SLPError(f"bad production {prod!r}")
    return LengthTable(tuple(lengths), tuple(heights), tuple(starts), tuple(spans))


class ProgramBuilder:
    """Incremental construction by name: ``b.add("F3", Seq([b.ref("F2"), ...]))``."""

    def __init__(self, alphabet: AnyAlphabet):
        self.alphabet = alphabet
        self.productions = []
        self.names = []
        self._index = {}

    def add(self, name: str, production) -> int:
        if name in self._index:
            raise ValueError(f"duplicate non-terminal {name}")
        if isinstance(production, (list, tuple)):
            production = Seq(tuple(production))
        self._index[name] = len(self.productions)
        self.productions.append(production)
        self.names.append(name)
        return self._index[name]

    def __contains__(self, name):
        return name in self._index

    def index(self, name: str) -> int:
        return self._index[name]

    def ref(self, name: str, inverted: bool = False, trunc=None) -> Ref:
        return Ref(self._index[name], inverted, trunc)

    def fresh(self, stem: str) -> str:
        k = 1
        while f"{stem}{k}" in self._index:
            k += 1
        return f"{stem}{k}"

    def build(self, root: Union[str, int, None] = None) -> Program:
        if root is None:
            root = len(self.productions) - 1
        elif isinstance(root, str):
            root = self._index[root]
        return Program(self.alphabet, tuple(self.productions), root, tuple(self.names))


def from_word(alphabet: AnyAlphabet, word: Sequence[str], name: str = "R") -> Program:
    """Program with the single production ``R -> w``."""
    word = list(word)
    if not word:
        return Program(alphabet, (Empty(),), 0, (name,))
    return Program(alphabet, (Seq(tuple(Lit(a) for a in word)),), 0, (name,))


# -- queries ---------------------------------------------------------------

def validate(p: Program) -> LengthTable:
    """Return the length/height table; construction already checked everything."""
    return p.table


def _inv_letter(p, letter, inv):
    return p.alphabet.inverse(letter) if inv else letter


def char_at(p: Program, i: int, node: Optional[int] = None) -> str:
    """Letter ``w[i]`` by descending the production tree (cost ~ height)."""
    cur = p.root if node is None else node
    lengths = p.table.lengths
    n = lengths[cur]
    if i < 0:
        i += n
    if not 0 <= i < n:
        raise IndexOutOfRange(f"index {i} out of range for length {n}")
    inv = False
    prods = p.productions
    starts = p.table.starts
    spans = p.table.spans
    while True:
        prod = prods[cur]
        if isinstance(prod, Terminal):
            return _inv_letter(p, prod.letter, inv)
        st = starts[cur]
        k = bisect.bisect_right(st, i) - 1
        item = prod.items[k]
        # zero-length items share a start with their successor
        while spans[cur][k][0] == spans[cur][k][1]:
            k += 1
            item = prod.items[k]
        if isinstance(item, Lit):
            return _inv_letter(p, item.letter, inv)
        lo = spans[cur][k][0]
        pos = lo + (i - st[k])
        t = item.target
        if item.inverted:
            pos = lengths[t] - 1 - pos
            inv = not inv
        cur, i = t, pos


def substring(p: Program, i: int, j: int, node: Optional[int] = None) -> list:
    """Explicit ``w[i:j]``; cost is polynomial in ``j - i`` and program size."""
    cur = p.root if node is None else node
    n = p.table.lengths[cur]
    if i < 0:
        i += n
    if j < 0:
        j += n
    if not 0 <= i <= j <= n:
        raise IndexOutOfRange(f"slice [{i}:{j}] out of range for length {n}")
    return _emit(p, cur, i, j)


_MEMO_LIMIT = 4096


def _emit(p: Program, node: int, lo: int, hi: int) -> list:
    out = []
    if lo >= hi:
        return out
    prods = p.productions
    lengths = p.table.lengths
    starts = p.table.starts
    spans = p.table.spans
    inverse = p.alphabet.inverse
    # expansions of whole short non-terminals, reused across the traversal
    memo = {}
    # frames: (node, lo, hi, inv), a bare letter string, or a (key, start)
    # marker that records the expansion written since ``start``
    stack = [(node, lo, hi, False)]
    while stack:
        fr = stack.pop()
        if isinstance(fr, str):
            out.append(fr)
            continue
        if len(fr) == 2:
            memo[fr[0]] = out[fr[1]:]
            continue
        cur, lo, hi, inv = fr
        prod = prods[cur]
        if isinstance(prod, Terminal):
            out.append(inverse(prod.letter) if inv else prod.letter)
            continue
        if lo == 0 and hi == lengths[cur] <= _MEMO_LIMIT:
            key = (cur, inv)
            hit = memo.get(key)
            if hit is not None:
                out.extend(hit)
                continue
            stack.append((key, len(out)))
        if inv:
            m = lengths[cur]
            lo, hi = m - hi, m - lo
        st = starts[cur]
        sp = spans[cur]
        items = prod.items
        k0 = max(bisect.bisect_right(st, lo) - 1, 0)
        pending = []
        for k in range(k0, len(items)):
            a = st[k]
            if a >= hi:
                break
            slo, shi = sp[k]
            seg_end = a + (shi - slo)
            x, y = max(lo, a), min(hi, seg_end)
            if x >= y:
                continue
            item = items[k]
            if isinstance(item, Lit):
                pending.append(inverse(item.letter) if inv else item.letter)
                continue
            t = item.target
            # child frames use coordinates of the word as it will be emitted
            vx, vy = slo + x - a, slo + y - a
            if inv:
                lt = lengths[t]
                vx, vy = lt - vy, lt - vx
            pending.append((t, vx, vy, inv ^ item.inverted))
        if inv:
            stack.extend(pending)
        else:
            stack.extend(reversed(pending))
    return out


def decompress(p: Program, cap: int) -> list:
    if cap < 0:
        raise ValueError("cap must be non-negative")
    n = p.length
    if n > cap:
        raise CapExceeded(n, cap)
    return _emit(p, p.root, 0, n)


def invert(p: Program) -> Program:
    """Program for the group inverse: each non-terminal B is replaced by its bar."""
    alphabet = p.alphabet
    if not alphabet.is_group:
        raise NotGroupAlphabet("inversion needs a group alphabet")
    lengths = p.table.lengths
    out = []
    for prod in p.productions:
        if isinstance(prod, Terminal):
            out.append(Terminal(alphabet.inverse(prod.letter)))
        elif isinstance(prod, Empty):
            out.append(prod)
        else:
            items = []
            for item in reversed(prod.items):
                if isinstance(item, Lit):
                    items.append(Lit(alphabet.inverse(item.letter)))
                elif item.trunc is None:
                    items.append(item)
                else:
                    lt = lengths[item.target]
                    lo, hi = item.resolve(lt)
                    items.append(Ref(item.target, item.inverted, (lt - hi, lt - lo)))
            out.append(Seq(tuple(items)))
    return Program(alphabet, tuple(out), p.root, p.names)


def project(p: Program, keep: Iterable[str]) -> Program:
    """Delete every letter outside ``keep`` by emptying its terminal productions."""
    keep = frozenset(keep)
    alphabet = p.alphabet
    for a in keep:
        if a not in alphabet:
            raise SLPError(f"letter {a!r} not in alphabet")
    if alphabet.is_group and any(alphabet.inverse(a) not in keep for a in keep):
        raise KeepSetNotInvolutionClosed(f"keep set {sorted(keep)} is not closed under inversion")
    if p.has_truncation:
        raise HasTruncation("project needs a truncation-free program")
    out = []
    for prod in p.productions:
        if isinstance(prod, Terminal):
            out.append(prod if prod.letter in keep else Empty())
        elif isinstance(prod, Seq):
            out.append(Seq(tuple(x for x in prod.items
                                 if not isinstance(x, Lit) or x.letter in keep)))
        else:
            out.append(prod)
    return Program(alphabet, tuple(out), p.root, p.names)


def normalize(p: Program) -> Program:
    """Chomsky normal form: terminal productions and pairs of plain refs.

    Inverted references are materialized as barred copies, empty productions
    and aliases disappear.  An empty word gives the one-production program
    ``R -> eps``.
    """
    if p.has_truncation:
        raise HasTruncation("run cs_to_slp first to eliminate truncations")
    from .hagenah import SLPBuilder, load_program
    inverse = p.alphabet.involution if p.alphabet.is_group else None
    slp = SLPBuilder(inverse=inverse)
    nodes = load_program(slp, p)
    return slp.to_program(nodes[p.root], p.alphabet, naming=_naming_for(slp, p, nodes),
                          root_name=p.names[p.root])


def _naming_for(slp, p: Program, nodes) -> dict:
    names = {}
    for b, node in enumerate(nodes):
        if node is not None and node not in names:
            names[node] = p.names[b]
    if p.alphabet.is_group:
        for b, node in enumerate(nodes):
            if node is None:
                continue
            bar = slp.bar_if_built(node)
            if bar is not None and bar not in names:
                names[bar] = p.names[b] + "_bar"
    return names


def concat_programs(parts: Sequence[Program], alphabet=None, root_name: str = "R") -> Program:
    """Program for w_1 w_2 ... with each part copied under a prefixed name."""
    if not parts and alphabet is None:
        raise ValueError("need an alphabet for an empty concatenation")
    alphabet = alphabet or parts[0].alphabet
    b = ProgramBuilder(alphabet)
    items = []
    for k, part in enumerate(parts):
        if part.alphabet != alphabet:
            raise SLPError("programs over different alphabets")
        offset = len(b.productions)
        for name, prod in zip(part.names, part.productions):
            if isinstance(prod, Seq):
                prod = Seq(tuple(Ref(x.target + offset, x.inverted, x.trunc) if isinstance(x, Ref) else x
                                 for x in prod.items))
            b.add(f"P{k}_{name}", prod)
        items.append(Ref(part.root + offset))
    b.add(root_name, Seq(tuple(items)))
    return b.build()
