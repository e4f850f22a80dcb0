"""Deterministic equality of straight line programs and compressed lcp.

Equality is decided by maintaining a set of *assertions* ``(F, S, i)``, each
claiming ``w_F[i:i+t] = w_S[:t]`` with ``t = min(|w_F| - i, |w_S|)``.  Starting
from ``{(A, X, 0)}`` the longest mentioned symbol is repeatedly split into its
two children, and groups of overlap assertions are compacted with the
periodicity lemma so the set stays polynomially small.

Symbols are nodes of one :class:`~compwords.hagenah.SLPBuilder` tagged with a
side bit (0 for the left-hand word, 1 for the right-hand word), encoded as
``node << 1 | side``.  Every assertion pairs symbols of opposite sides.
"""
from __future__ import annotations

import heapq
from collections import namedtuple
from math import gcd
from typing import Callable, Optional

from .core import Program
from .errors import PNotMaximal, POutOfRange
from .hagenah import SLPBuilder, load_program

Assertion = namedtuple("Assertion", "first second offset")


def sym(node: int, side: int) -> int:
    return node << 1 | side


def sym_node(s: int) -> int:
    return s >> 1


def sym_side(s: int) -> int:
    return s & 1


class AssertionSet:
    """Deduplicated assertions grouped by ``(first, second)``.

    ``o`` and ``s`` count overlap and subword assertions.  ``consistent``
    turns False as soon as a terminal-terminal assertion fails.
    """

    def __init__(self, slp: SLPBuilder):
        self.slp = slp
        self.groups = {}
        self.by_sym = {}
        self.o = 0
        self.s = 0
        self.consistent = True
        self.on_new_symbol: Optional[Callable[[int], None]] = None
        self._known = set()
        self._touched = set()

    # -- bookkeeping ---------------------------------------------------
    def length(self, s: int) -> int:
        return self.slp.length[s >> 1]

    def is_overlap(self, f: int, sc: int, i: int) -> bool:
        return self.length(f) <= i + self.length(sc)

    def __len__(self):
        return self.o + self.s

    def __iter__(self):
        for (f, sc), offs in self.groups.items():
            for i in sorted(offs):
                yield Assertion(f, sc, i)

    def assertions(self) -> list:
        return sorted(self)

    def mentions(self, s: int) -> bool:
        return bool(self.by_sym.get(s))

    def symbols(self) -> set:
        return {x for x, keys in self.by_sym.items() if keys}

    def copy(self) -> "AssertionSet":
        other = AssertionSet(self.slp)
        other.groups = {k: set(v) for k, v in self.groups.items()}
        other.by_sym = {k: set(v) for k, v in self.by_sym.items()}
        other.o, other.s, other.consistent = self.o, self.s, self.consistent
        other._known = set(self._known)
        return other

    def _count(self, f, sc, i, delta):
        if self.is_overlap(f, sc, i):
            self.o += delta
        else:
            self.s += delta

    # -- mutation --------------------------------------------------------
    def add(self, f: int, sc: int, i: int) -> None:
        slp = self.slp
        lf = slp.length[f >> 1]
        if i >= lf:
            return
        if i == 0:
            ls = slp.length[sc >> 1]
            if (f >> 1) == (sc >> 1):
                return  # the same word on both sides
            if ls < lf or (ls == lf and sc < f):
                f, sc, lf = sc, f, ls
        letter = slp.letter
        lt_f = letter[f >> 1]
        lt_s = letter[sc >> 1]
        if lt_f is not None and lt_s is not None:
            if lt_f != lt_s:
                self.consistent = False
            return
        key = (f, sc)
        offs = self.groups.get(key)
        if offs is None:
            offs = self.groups[key] = set()
            for x in (f, sc):
                self.by_sym.setdefault(x, set()).add(key)
                if x not in self._known:
                    self._known.add(x)
                    if self.on_new_symbol is not None:
                        self.on_new_symbol(x)
        if i in offs:
            return
        offs.add(i)
        self._touched.add(key)
        self._count(f, sc, i, 1)

    def _pop_group(self, key) -> set:
        offs = self.groups.pop(key)
        f, sc = key
        for x in (f, sc):
            keys = self.by_sym.get(x)
            if keys is not None:
                keys.discard(key)
        for i in offs:
            self._count(f, sc, i, -1)
        return offs

    def split(self, p: int) -> list:
        """Replace every assertion mentioning symbol ``p``; return touched keys."""
        slp = self.slp
        node = p >> 1
        if slp.letter[node] is not None:
            raise ValueError("terminal symbols cannot be split")
        side = p & 1
        c_sym = sym(slp.left[node], side)
        d_sym = sym(slp.right[node], side)
        c = slp.length[slp.left[node]]
        self._touched = set()
        while self.by_sym.get(p):
            key = next(iter(self.by_sym[p]))
            f, sc = key
            offs = self._pop_group(key)
            for i in offs:
                if not self.consistent:
                    break
                if f == p:
                    ls = self.length(sc)
                    t = min(self.length(f) - i, ls)
                    if i < c:
                        self.add(c_sym, sc, i)
                        if i + t > c:
                            self.add(sc, d_sym, c - i)
                    else:
                        self.add(d_sym, sc, i - c)
                else:
                    t = min(self.length(f) - i, self.length(sc))
                    self.add(f, c_sym, i)
                    if t > c:
                        self.add(f, d_sym, i + c)
            if not self.consistent:
                break
        return [k for k in self._touched if k in self.groups]

    def compact(self, keys=None) -> int:
        """Apply the periodicity reduction to overlap groups; return #removed."""
        removed = 0
        keys = list(self.groups) if keys is None else [k for k in keys if k in self.groups]
        for key in keys:
            f, sc = key
            offs = self.groups[key]
            if len(offs) < 3:
                continue
            lf, ls = self.length(f), self.length(sc)
            cutoff = lf - ls  # overlap iff i >= cutoff
            ov = sorted(i for i in offs if i >= cutoff)
            if len(ov) < 3:
                continue
            new = compact_offsets(ov, lf)
            if len(new) != len(ov):
                gone = set(ov) - set(new)
                fresh = set(new) - set(ov)
                offs -= gone
                offs |= fresh
                self.o += len(fresh) - len(gone)
                removed += len(gone) - len(fresh)
        return removed

    def max_overlaps_per_pair(self) -> list:
        """``(count, first)`` for the largest overlap group."""
        best = (0, None)
        for (f, sc), offs in self.groups.items():
            cutoff = self.length(f) - self.length(sc)
            n = sum(1 for i in offs if i >= cutoff)
            if n > best[0]:
                best = (n, f)
        return list(best)


def compact_offsets(offsets, lf: int) -> list:
    """Fixpoint of the three-offset reduction on sorted overlap offsets.

    For consecutive ``i < j < k`` with ``(j-i) + (k-i) <= lf - i`` the suffix
    ``w[i:]`` has periods ``j-i`` and ``k-i``, hence ``g = gcd`` as well, and
    ``{i, j, k}`` is equivalent to ``{i, i+g}``.
    """
    offs = sorted(set(offsets))
    changed = True
    while changed:
        changed = False
        for a in range(len(offs) - 2):
            i, j, k = offs[a], offs[a + 1], offs[a + 2]
            if (j - i) + (k - i) <= lf - i:
                g = gcd(j - i, k - i)
                rest = set(offs)
                rest.discard(j)
                rest.discard(k)
                rest.add(i + g)
                offs = sorted(rest)
                changed = True
                break
    return offs


def is_period(u, p: int) -> bool:
    n = len(u)
    if not 1 <= p <= n - 1:
        raise POutOfRange(f"period {p} outside [1, {n - 1}]")
    return all(u[i] == u[i + p] for i in range(n - p))


def split(gamma: AssertionSet, p: int) -> AssertionSet:
    """Functional form of :meth:`AssertionSet.split` with the maximality check."""
    lp = gamma.length(p)
    for x in gamma.symbols():
        if gamma.slp.letter[x >> 1] is None and gamma.length(x) > lp:
            raise PNotMaximal(f"symbol {x} is longer than the split symbol {p}")
    out = gamma.copy()
    out.split(p)
    return out


def compact(gamma: AssertionSet) -> AssertionSet:
    out = gamma.copy()
    out.compact()
    return out


# -- equality ----------------------------------------------------------------

def _reach_count(slp: SLPBuilder, root: int) -> int:
    return len(slp.reachable([root]))


def equal_nodes(slp: SLPBuilder, u: Optional[int], v: Optional[int], trace=None,
                stats: Optional[dict] = None) -> bool:
    """Equality of ``w_u`` and ``w_v`` for two nodes of one builder."""
    if u is None or v is None:
        return (u is None or slp.length[u] == 0) and (v is None or slp.length[v] == 0)
    if slp.length[u] != slp.length[v]:
        return False
    if u == v:
        return True
    gamma = AssertionSet(slp)
    heap = []

    def push(x):
        if slp.letter[x >> 1] is None:
            heapq.heappush(heap, (-slp.length[x >> 1], x & 1, x >> 1))

    gamma.on_new_symbol = push
    gamma.add(sym(u, 0), sym(v, 1), 0)
    hu, hv = slp.height[u] + 1, slp.height[v] + 1
    sizes = None
    k = 0
    rounds = 0
    max_gamma = len(gamma)
    literal_violations = 0
    if trace is not None:
        trace(f"round 0: o={gamma.o}, s={gamma.s}, |Γ|={len(gamma)}")
    while heap and gamma.consistent:
        _, side, node = heapq.heappop(heap)
        p = sym(node, side)
        if not gamma.mentions(p):
            continue
        o0, s0 = gamma.o, gamma.s
        touched = gamma.split(p)
        k += 1
        rounds += 1
        if not gamma.consistent:
            break
        o1, s1 = gamma.o, gamma.s
        # growth per split: the literal o' <= o + 2s fails already on the
        # first split of (A, X, 0); the sound form doubles the overlap term
        assert o1 <= 2 * o0 + 2 * s0 and s1 <= o0 + s0, (o0, s0, o1, s1)
        if o1 > o0 + 2 * s0:
            literal_violations += 1
        gamma.compact(touched)
        size = len(gamma)
        if size > (k + 1) * 4 * hu * hv * (hu + hv):
            if sizes is None:
                sizes = (_reach_count(slp, u), _reach_count(slp, v))
            m, n = sizes
            assert size <= (k + 1) * 4 * m * n * (m + n), (size, k, m, n)
        for key in touched:
            offs = gamma.groups.get(key)
            if offs is not None and len(offs) > 2:
                f = key[0]
                lf = gamma.length(f)
                cutoff = lf - gamma.length(key[1])
                nov = sum(1 for i in offs if i >= cutoff)
                assert nov <= 2 * slp.height[f >> 1] + 1, (nov, slp.height[f >> 1])
        if size > max_gamma:
            max_gamma = size
        if trace is not None:
            trace(f"round {k}: o={gamma.o}, s={gamma.s}, |Γ|={size}")
    result = gamma.consistent and len(gamma) == 0
    if stats is not None:
        stats["rounds"] = stats.get("rounds", 0) + rounds
        stats["max_gamma"] = max(stats.get("max_gamma", 0), max_gamma)
        stats["literal_growth_violations"] = stats.get("literal_growth_violations", 0) + literal_violations
        stats["equal_calls"] = stats.get("equal_calls", 0) + 1
    return result


def _load_pair(a: Program, x: Program):
    inverse = None
    if a.alphabet.is_group and x.alphabet.is_group:
        inverse = {**a.alphabet.involution, **x.alphabet.involution}
    slp = SLPBuilder(inverse=inverse)
    u = load_program(slp, a)[a.root]
    v = load_program(slp, x)[x.root]
    return slp, u, v


def equal(a: Program, x: Program, trace=None, stats: Optional[dict] = None) -> bool:
    """True iff the two programs produce the same word.

    Truncations and inverted references are accepted; they are eliminated
    while loading the programs into a common grammar.
    """
    if a.length != x.length:
        return False
    slp, u, v = _load_pair(a, x)
    return equal_nodes(slp, u, v, trace=trace, stats=stats)


# -- longest common prefix -----------------------------------------------------

EXPLICIT_LIMIT = 64


def lcp_nodes(slp: SLPBuilder, u: Optional[int], v: Optional[int],
              explicit_limit: int = EXPLICIT_LIMIT, stats: Optional[dict] = None) -> int:
    """Largest k with ``w_u[:k] = w_v[:k]`` by binary search over equality probes.

    Once the search window is at most ``explicit_limit`` letters wide it is
    finished by reading that window explicitly.
    """
    if u is None or v is None:
        return 0
    m = min(slp.length[u], slp.length[v])
    if m == 0:
        return 0
    if u == v:
        return m
    lo, hi = 0, m  # w_u[:lo] == w_v[:lo]; the answer is at most hi
    probes = 0
    while lo < hi:
        if hi - lo <= explicit_limit:
            a = slp.substring(u, lo, hi)
            b = slp.substring(v, lo, hi)
            for x, y in zip(a, b):
                if x != y:
                    break
                lo += 1
            break
        mid = (lo + hi + 1) // 2
        if slp.char_at(u, mid - 1) != slp.char_at(v, mid - 1):
            hi = mid - 1
            continue
        probes += 1
        if equal_nodes(slp, slp.cut(u, 0, mid), slp.cut(v, 0, mid), stats=stats):
            lo = mid
        else:
            hi = mid - 1
    if stats is not None:
        stats["lcp_probes"] = stats.get("lcp_probes", 0) + probes
    return lo


def lcp(a: Program, x: Program, explicit_limit: int = EXPLICIT_LIMIT, stats: Optional[dict] = None) -> int:
    slp, u, v = _load_pair(a, x)
    return lcp_nodes(slp, u, v, explicit_limit=explicit_limit, stats=stats)
