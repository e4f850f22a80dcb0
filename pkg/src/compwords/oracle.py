"""Naive reference implementations and random instance generators.

Everything here works on explicit words (lists of letter strings) and refuses
inputs longer than :data:`CAP` letters.  None of it is used by the solvers;
it exists so that tests can compare compressed results against obviously
correct ones.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

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
    normalize,
)
from .errors import CapExceeded

CAP = 10 ** 5


def _check(w, cap=CAP):
    if len(w) > cap:
        raise CapExceeded(len(w), cap)


def inv_letter(x: str) -> str:
    return x[:-1] if x.endswith("'") else x + "'"


def naive_invert(w):
    return [inv_letter(x) for x in reversed(w)]


def naive_free_reduce(w, cap: int = CAP) -> list:
    _check(w, cap)
    out = []
    for x in w:
        if out and out[-1] == inv_letter(x):
            out.pop()
        else:
            out.append(x)
    return out


def naive_equal(u, v) -> bool:
    _check(u)
    _check(v)
    return list(u) == list(v)


def naive_lcp(u, v) -> int:
    _check(u)
    _check(v)
    k = 0
    for x, y in zip(u, v):
        if x != y:
            break
        k += 1
    return k


def naive_cyclic_reduce(w):
    """``(conjugator, core)`` of the free reduction of ``w``."""
    r = naive_free_reduce(w)
    k = 0
    while 2 * k + 1 < len(r) and r[k] == inv_letter(r[len(r) - 1 - k]):
        k += 1
    return r[:k], r[k:len(r) - k]


def naive_conjugate(u, v) -> bool:
    _, cu = naive_cyclic_reduce(u)
    _, cv = naive_cyclic_reduce(v)
    if len(cu) != len(cv):
        return False
    if not cu:
        return True
    return any(cv[o:] + cv[:o] == cu for o in range(len(cv)))


def naive_substitute(images: dict, w, reduce: bool = True, cap: int = CAP) -> list:
    """Apply the endomorphism ``x -> images[x]`` (inverse letters inverted)."""
    out = []
    for x in w:
        if x in images:
            out.extend(images[x])
        elif x.endswith("'") and x[:-1] in images:
            out.extend(naive_invert(images[x[:-1]]))
        else:
            out.append(x)
        if len(out) > cap:
            raise CapExceeded(len(out), cap)
    return naive_free_reduce(out, cap) if reduce else out


def nielsen_images(tokens, m: int, cap: int = CAP) -> dict:
    """Reduced images ``a_i -> (phi_1 o ... o phi_n)(a_i)`` by explicit composition.

    Tokens are ``(kind, i, j)`` with kind ``inv`` / ``mul`` / ``mulinv`` and
    1-based generator indices.
    """
    gens = [f"a{i}" for i in range(1, m + 1)]
    images = {g: [g] for g in gens}
    for tok in tokens:
        kind, i = tok[0], tok[1]
        ai = f"a{i}"
        if kind == "inv":
            step = {ai: [ai + "'"]}
        elif kind == "mul":
            step = {ai: [ai, f"a{tok[2]}"]}
        elif kind == "mulinv":
            step = {ai: [ai, f"a{tok[2]}'"]}
        else:
            raise ValueError(f"unknown token {tok!r}")
        new = dict(images)
        for g, w in step.items():
            new[g] = naive_substitute(images, w, cap=cap)
        images = new
    return images


def inverse_tokens(tokens) -> list:
    swap = {"mul": "mulinv", "mulinv": "mul", "inv": "inv"}
    return [(swap[t[0]],) + tuple(t[1:]) for t in reversed(tokens)]


def naive_aut_is_identity(tokens, m: int) -> bool:
    images = nielsen_images(tokens, m)
    return all(images[f"a{i}"] == [f"a{i}"] for i in range(1, m + 1))


# -- free-by-cyclic oracles ------------------------------------------------------

def naive_britton(images: dict, inv_images: dict, word, cap: int = CAP) -> bool:
    """Triviality in the mapping torus by explicit pinch rewriting.

    ``t g t'`` becomes ``Phi(g)`` and ``t' g t`` becomes ``Phi^-1(g)`` for
    t-free ``g``; the word is trivial iff this ends with the empty word.
    """
    w = _reduce_mixed(list(word))
    while True:
        ts = [q for q, x in enumerate(w) if x in ("t", "t'")]
        if not ts:
            return not naive_free_reduce(w, cap)
        for a, b in zip(ts, ts[1:]):
            if w[a] != w[b]:
                g = w[a + 1:b]
                table = images if w[a] == "t" else inv_images
                w = w[:a] + naive_substitute(table, g, cap=cap) + w[b + 1:]
                w = _reduce_mixed(w)
                _check(w, cap)
                break
        else:
            return False


def _reduce_mixed(w):
    out = []
    for x in w:
        if out and out[-1] == inv_letter(x):
            out.pop()
        else:
            out.append(x)
    return out


def literal_levels(word) -> list:
    """``(letter, level)`` pairs obtained by literally pushing t right and t' left.

    Rules: ``t x_p -> x_{p+1} t``, ``x_p t' -> t' x_{p+1}``, and adjacent
    ``t t'`` / ``t' t`` cancel.  Leading t' and trailing t are a conjugation
    and dropped.
    """
    toks = [["t"] if x == "t" else ["t'"] if x == "t'" else [x, 0] for x in word]
    changed = True
    while changed:
        changed = False
        q = 0
        while q + 1 < len(toks):
            a, b = toks[q], toks[q + 1]
            if a[0] in ("t", "t'") and b[0] in ("t", "t'") and a[0] != b[0]:
                del toks[q:q + 2]
                changed = True
                q = max(q - 1, 0)
                continue
            if a[0] == "t" and b[0] not in ("t", "t'"):
                toks[q], toks[q + 1] = [b[0], b[1] + 1], a
                changed = True
            elif b[0] == "t'" and a[0] not in ("t", "t'"):
                toks[q], toks[q + 1] = b, [a[0], a[1] + 1]
                changed = True
            q += 1
    return [(x[0], x[1]) for x in toks if x[0] not in ("t", "t'")]


# -- explicit word programs ------------------------------------------------------

def program_word(p: Program, cap: int = CAP) -> list:
    """Decompress by direct recursion over productions (independent of core)."""
    if p.length > cap:
        raise CapExceeded(p.length, cap)
    memo = {}
    for b, prod in enumerate(p.productions):
        if isinstance(prod, Terminal):
            memo[b] = [prod.letter]
        elif isinstance(prod, Empty):
            memo[b] = []
        else:
            w = []
            for item in prod.items:
                if isinstance(item, Lit):
                    w.append(item.letter)
                    continue
                x = memo[item.target]
                if item.inverted:
                    x = naive_invert(x)
                if item.trunc is not None:
                    lo, hi = item.trunc
                    x = x[slice(lo, hi)]
                w.extend(x)
            memo[b] = w
    return memo[p.root]


# -- generators --------------------------------------------------------------------

@dataclass
class GeneratorConfig:
    seed: int = 0
    rank: int = 2
    nonterminals: int = 12
    trunc_prob: float = 0.0
    inv_prob: float = 0.0
    target_height: Optional[int] = None
    kind: str = "slp"  # slp | cs | general
    group: bool = False
    max_len: int = 10 ** 4
    family: Optional[str] = None  # fibonacci | trunc-doubling | iterated-automorphism
    n: int = 8


def _alphabet(cfg: GeneratorConfig):
    if cfg.group:
        return GroupAlphabet.of_rank(cfg.rank)
    return Alphabet(tuple("abcdefghijklmnopqrstuvwxyz"[:cfg.rank]))


def fibonacci(n: int) -> Program:
    b = ProgramBuilder(Alphabet(("a", "b")))
    b.add("F1", Terminal("b"))
    b.add("F2", Terminal("a"))
    for k in range(3, n + 1):
        b.add(f"F{k}", [b.ref(f"F{k - 1}"), b.ref(f"F{k - 2}")])
    return b.build(f"F{max(n, 1)}" if n >= 1 else "F1")


def truncated_doubling(n: int) -> Program:
    b = ProgramBuilder(Alphabet(("a", "b")))
    b.add("B1", Terminal("b"))
    b.add("B2", Terminal("a"))
    b.add("B3", [b.ref("B2"), b.ref("B1")])
    b.add("B4", [b.ref("B3"), b.ref("B3")])
    for k in range(5, n + 1):
        b.add(f"B{k}", [b.ref(f"B{k - 1}", trunc=(1, None)), b.ref(f"B{k - 1}", trunc=(1, None))])
    return b.build(f"B{n}")


def iterated_automorphism(n: int) -> Program:
    """``A_0 = a, B_0 = b, A_{k+1} = B_k, B_{k+1} = B_k A_k B_k'``; root ``A_n``."""
    b = ProgramBuilder(GroupAlphabet(("a", "b")))
    b.add("A0", Terminal("a"))
    b.add("B0", Terminal("b"))
    for k in range(n):
        b.add(f"A{k + 1}", [b.ref(f"B{k}")])
        b.add(f"B{k + 1}", [b.ref(f"B{k}"), b.ref(f"A{k}"), b.ref(f"B{k}", inverted=True)])
    return b.build(f"A{n}")


FAMILIES = {
    "fibonacci": fibonacci,
    "trunc-doubling": truncated_doubling,
    "iterated-automorphism": iterated_automorphism,
}


def gen_program(cfg: GeneratorConfig) -> Program:
    if cfg.family is not None:
        return FAMILIES[cfg.family](cfg.n)
    rng = random.Random(cfg.seed)
    alpha = _alphabet(cfg)
    letters = list(alpha.letters)
    b = ProgramBuilder(alpha)
    lengths = []
    heights = []
    n_term = min(len(letters), max(1, cfg.nonterminals // 3))
    for a in rng.sample(letters, n_term):
        b.add(f"T{len(lengths)}", Terminal(a))
        lengths.append(1)
        heights.append(1)
    arity = {"slp": (2, 2), "cs": (1, 2), "general": (1, 4)}[cfg.kind]
    while len(lengths) < cfg.nonterminals:
        k = rng.randint(*arity)
        items = []
        total = 0
        height = 0
        for slot in range(k):
            if cfg.kind == "general" and rng.random() < 0.15:
                items.append(Lit(rng.choice(letters)))
                total += 1
                continue
            # prefer recent non-terminals to grow height
            lo = max(0, len(lengths) - 4) if rng.random() < 0.7 else 0
            t = rng.randrange(lo, len(lengths))
            if cfg.target_height is not None and slot == 0 and rng.random() < 0.85:
                # climb: extend the tallest recent non-terminal until the target is reached
                top = max(heights)
                if top < cfg.target_height:
                    t = max(x for x in range(len(heights)) if heights[x] == top)
            if total + lengths[t] > cfg.max_len:
                t = min(range(len(lengths)), key=lambda x: lengths[x])
            inverted = cfg.group and cfg.kind != "slp" and rng.random() < cfg.inv_prob
            trunc = None
            seg = lengths[t]
            if cfg.kind != "slp" and lengths[t] > 0 and rng.random() < cfg.trunc_prob:
                if lengths[t] >= 4 and rng.random() < 0.8:
                    # light cut near the ends, as in the truncated doubling family
                    i = rng.randint(0, 1)
                    j = rng.randint(lengths[t] - 1, lengths[t])
                else:
                    i = rng.randint(0, lengths[t])
                    j = rng.randint(i, lengths[t])
                seg = j - i
                lo_b = i - lengths[t] if (rng.random() < 0.3 and i < lengths[t]) else i
                hi_b = j - lengths[t] if (rng.random() < 0.3 and j < lengths[t]) else j
                if lo_b == 0 and rng.random() < 0.5:
                    lo_b = None
                if hi_b == lengths[t] and rng.random() < 0.5:
                    hi_b = None
                trunc = (lo_b, hi_b)
            items.append(Ref(t, inverted, trunc))
            total += seg
            height = max(height, heights[t])
        if cfg.kind == "slp" and total == 0:
            continue
        b.add(f"N{len(lengths)}", Seq(tuple(items)))
        lengths.append(total)
        heights.append(height + 1)
    return b.build(len(lengths) - 1)


def rebracket(word: Sequence[str], alphabet, rng: random.Random, name: str = "R") -> Program:
    """Random normal-form program for an explicit non-empty word."""
    b = ProgramBuilder(alphabet)
    term = {}
    for a in sorted(set(word)):
        term[a] = b.add(f"L_{len(term)}", Terminal(a))
    counter = [0]

    def build(lo, hi):
        # iterative would be overkill: depth is O(log) on average, capped below
        if hi - lo == 1:
            return term[word[lo]]
        mid = rng.randint(lo + 1, hi - 1) if hi - lo < 64 else (lo + hi) // 2 + rng.randint(-(hi - lo) // 4, (hi - lo) // 4)
        left = build(lo, mid)
        right = build(mid, hi)
        counter[0] += 1
        return b.add(f"M{counter[0]}", Seq((Ref(left), Ref(right))))

    root = build(0, len(word))
    return b.build(root)


def mutate(word: Sequence[str], letters, rng: random.Random) -> list:
    w = list(word)
    q = rng.randrange(len(w))
    w[q] = rng.choice([x for x in letters if x != w[q]])
    return w


def random_nielsen_tokens(rng: random.Random, m: int, length: int) -> list:
    toks = []
    for _ in range(length):
        r = rng.random()
        if r < 0.2 or m == 1:
            toks.append(("inv", rng.randint(1, m), None))
        else:
            i, j = rng.sample(range(1, m + 1), 2)
            toks.append(("mul" if r < 0.6 else "mulinv", i, j))
    return toks


def random_automorphism(rng: random.Random, m: int, max_image: int = 4, steps: int = 6):
    """``(tokens, images, inverse_images)`` with every image of length <= max_image."""
    while True:
        toks = random_nielsen_tokens(rng, m, rng.randint(0, steps))
        images = nielsen_images(toks, m)
        if all(len(w) <= max_image for w in images.values()):
            return toks, images, nielsen_images(inverse_tokens(toks), m)


def reshape(p: Program, rng: random.Random, rotations: Optional[int] = None, prefix: str = "Q") -> Program:
    """Same word, different grammar: random rotations ``(UV)Z -> U(VZ)`` plus renaming.

    Works on the compressed program, so it is usable far beyond the oracle cap.
    """
    q = normalize(p)
    kids = []
    letter = []
    for prod in q.productions:
        if isinstance(prod, Terminal):
            kids.append(None)
            letter.append(prod.letter)
        elif isinstance(prod, Seq):
            kids.append([prod.items[0].target, prod.items[1].target])
            letter.append(None)
        else:
            return q
    inner = [x for x in range(len(kids)) if kids[x] is not None]
    if rotations is None:
        rotations = len(inner)
    for _ in range(rotations if inner else 0):
        x = rng.choice(inner)
        y, z = kids[x]
        if rng.random() < 0.5:
            if kids[y] is None:
                continue
            u, v = kids[y]
            kids.append([v, z])
            kids[x] = [u, len(kids) - 1]
        else:
            if kids[z] is None:
                continue
            u, v = kids[z]
            kids.append([y, u])
            kids[x] = [len(kids) - 1, v]
        letter.append(None)
        inner.append(len(kids) - 1)
    # randomized topological order of the nodes reachable from the root
    order, seen = [], set()
    stack = [(q.root, False)]
    while stack:
        x, done = stack.pop()
        if done:
            order.append(x)
            continue
        if x in seen:
            continue
        seen.add(x)
        stack.append((x, True))
        if kids[x] is not None:
            pair = list(kids[x])
            rng.shuffle(pair)
            stack.extend((c, False) for c in pair if c not in seen)
    label = list(range(len(order)))
    rng.shuffle(label)
    names = {x: f"{prefix}{label[k]}" for k, x in enumerate(order)}
    b = ProgramBuilder(q.alphabet)
    for x in order:
        if kids[x] is None:
            b.add(names[x], Terminal(letter[x]))
        else:
            b.add(names[x], [b.ref(names[c]) for c in kids[x]])
    return b.build(names[q.root])


def mutate_program(p: Program, rng: random.Random) -> Program:
    """Compressed program whose word differs from ``w_p`` in exactly one position."""
    n = p.length
    q = rng.randrange(n)
    old = char_at(p, q)
    new = rng.choice([x for x in p.alphabet.letters if x != old])
    b = ProgramBuilder(p.alphabet)
    for name, prod in zip(p.names, p.productions):
        b.add(name, prod)
    root = p.names[p.root]
    items = []
    if q:
        items.append(b.ref(root, trunc=(0, q)))
    items.append(Lit(new))
    if q + 1 < n:
        items.append(b.ref(root, trunc=(q + 1, n)))
    b.add(b.fresh("MUT"), items)
    return b.build()
