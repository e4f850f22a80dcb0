"""Composition system -> straight line program conversion.

:class:`SLPBuilder` is a growable grammar in Chomsky normal form.  Its
:meth:`~SLPBuilder.cut` method returns the node for a truncated word
``Y[i:j]``, creating decorated non-terminals on demand with one memo entry per
``(Y, i, j)``.  Every other algorithm in the package (equality, lcp, free
reduction) works on nodes of one builder, so conversions done for one query
are reused by the next.

Nodes are dense ints in creation order, which is a topological order.  The
empty word is ``None`` and never appears inside a production.
"""
from __future__ import annotations

from typing import Optional

from .core import Empty, Lit, Program, ProgramBuilder, Ref, Seq, Terminal, is_identifier
from .errors import IndexOutOfRange, SLPError


class SLPBuilder:
    def __init__(self, inverse: Optional[dict] = None, hash_cons: bool = True):
        self.letter = []
        self.left = []
        self.right = []
        self.length = []
        self.height = []
        self.inverse = inverse
        self._terminals = {}
        self._pairs = {} if hash_cons else None
        self._cuts = {}
        self._bars = {}

    def __len__(self):
        return len(self.length)

    def is_terminal(self, u: int) -> bool:
        return self.letter[u] is not None

    # -- construction -----------------------------------------------------
    def terminal(self, a: str) -> int:
        u = self._terminals.get(a)
        if u is None:
            u = len(self.length)
            self.letter.append(a)
            self.left.append(-1)
            self.right.append(-1)
            self.length.append(1)
            self.height.append(0)
            self._terminals[a] = u
        return u

    def pair(self, u: int, v: int) -> int:
        pairs = self._pairs
        if pairs is not None:
            w = pairs.get((u, v))
            if w is not None:
                return w
        w = len(self.length)
        self.letter.append(None)
        self.left.append(u)
        self.right.append(v)
        self.length.append(self.length[u] + self.length[v])
        hu, hv = self.height[u], self.height[v]
        self.height.append((hu if hu > hv else hv) + 1)
        if pairs is not None:
            pairs[(u, v)] = w
        return w

    def concat(self, u: Optional[int], v: Optional[int]) -> Optional[int]:
        if u is None:
            return v
        if v is None:
            return u
        return self.pair(u, v)

    def concat_all(self, nodes) -> Optional[int]:
        acc = None
        for x in nodes:
            acc = self.concat(acc, x)
        return acc

    def power(self, u: Optional[int], n: int) -> Optional[int]:
        """Node for ``w_u ** n`` by repeated squaring."""
        result = None
        base = u
        while n > 0 and base is not None:
            if n & 1:
                result = self.concat(result, base)
            n >>= 1
            if n:
                base = self.pair(base, base)
        return result

    def word_node(self, word) -> Optional[int]:
        """Balanced node for an explicit word."""
        nodes = [self.terminal(a) for a in word]
        if not nodes:
            return None
        while len(nodes) > 1:
            nxt = [self.pair(nodes[k], nodes[k + 1]) for k in range(0, len(nodes) - 1, 2)]
            if len(nodes) % 2:
                nxt.append(nodes[-1])
            nodes = nxt
        return nodes[0]

    # -- decorated non-terminals -------------------------------------------
    def cut(self, u: Optional[int], lo: int, hi: int) -> Optional[int]:
        """Node for ``w_u[lo:hi]`` (``0 <= lo <= hi <= |w_u|``)."""
        if u is None:
            if lo == hi == 0:
                return None
            raise IndexOutOfRange(f"cut [{lo}:{hi}] of the empty word")
        length = self.length
        if not 0 <= lo <= hi <= length[u]:
            raise IndexOutOfRange(f"cut [{lo}:{hi}] out of range for length {length[u]}")
        left, right, memo = self.left, self.right, self._cuts
        path = []
        while True:
            if lo == hi:
                res = None
                break
            n = length[u]
            if lo == 0 and hi == n:
                res = u
                break
            key = (u, lo, hi)
            res = memo.get(key)
            if res is not None:
                break
            if lo == 0:
                res = self._prefix(u, hi)
                break
            if hi == n:
                res = self._suffix(u, lo)
                break
            # subword: delegate while the cut stays inside one child
            path.append(key)
            l = left[u]
            ul = length[l]
            if hi <= ul:
                u = l
            elif lo >= ul:
                u = right[u]
                lo -= ul
                hi -= ul
            else:
                res = self.pair(self._suffix(l, lo), self._prefix(right[u], hi - ul))
                break
        for key in path:
            memo[key] = res
        return res

    def _prefix(self, u: int, j: int) -> int:
        length, left, right, memo = self.length, self.left, self.right, self._cuts
        path = []
        while True:
            if j == length[u]:
                res = u
                break
            key = (u, 0, j)
            res = memo.get(key)
            if res is not None:
                break
            l = left[u]
            ul = length[l]
            if j <= ul:
                path.append((key, None))
                u = l
            else:
                path.append((key, l))
                u = right[u]
                j -= ul
        for key, l in reversed(path):
            if l is not None:
                res = self.pair(l, res)
            memo[key] = res
        return res

    def _suffix(self, u: int, i: int) -> int:
        length, left, right, memo = self.length, self.left, self.right, self._cuts
        path = []
        while True:
            if i == 0:
                res = u
                break
            key = (u, i, length[u])
            res = memo.get(key)
            if res is not None:
                break
            l = left[u]
            ul = length[l]
            if i >= ul:
                path.append((key, None))
                u = right[u]
                i -= ul
            else:
                path.append((key, right[u]))
                u = l
        for key, r in reversed(path):
            if r is not None:
                res = self.pair(res, r)
            memo[key] = res
        return res

    # -- inversion -------------------------------------------------------
    def bar(self, u: Optional[int]) -> Optional[int]:
        """Node for the group inverse of ``w_u`` (memoized mirror copy)."""
        if u is None:
            return None
        bars = self._bars
        hit = bars.get(u)
        if hit is not None:
            return hit
        if self.inverse is None:
            raise SLPError("builder has no involution")
        left, right, letter = self.left, self.right, self.letter
        stack = [u]
        while stack:
            x = stack[-1]
            if x in bars:
                stack.pop()
                continue
            if letter[x] is not None:
                y = self.terminal(self.inverse[letter[x]])
            else:
                l, r = left[x], right[x]
                bl, br = bars.get(l), bars.get(r)
                if bl is None or br is None:
                    if br is None:
                        stack.append(r)
                    if bl is None:
                        stack.append(l)
                    continue
                y = self.pair(br, bl)
            stack.pop()
            bars[x] = y
            bars.setdefault(y, x)
        return bars[u]

    def bar_if_built(self, u: int) -> Optional[int]:
        return self._bars.get(u)

    # -- queries ---------------------------------------------------------
    def char_at(self, u: int, i: int) -> str:
        length, left, letter = self.length, self.left, self.letter
        if not 0 <= i < length[u]:
            raise IndexOutOfRange(f"index {i} out of range for length {length[u]}")
        while letter[u] is None:
            l = left[u]
            if i < length[l]:
                u = l
            else:
                i -= length[l]
                u = self.right[u]
        return letter[u]

    def substring(self, u: Optional[int], i: int, j: int) -> list:
        if u is None:
            if i == j == 0:
                return []
            raise IndexOutOfRange("slice of the empty word")
        length, left, right, letter = self.length, self.left, self.right, self.letter
        if not 0 <= i <= j <= length[u]:
            raise IndexOutOfRange(f"slice [{i}:{j}] out of range for length {length[u]}")
        out = []
        stack = [(u, i, j)]
        while stack:
            x, lo, hi = stack.pop()
            if lo >= hi:
                continue
            if letter[x] is not None:
                out.append(letter[x])
                continue
            l = left[x]
            ul = length[l]
            if hi > ul:
                stack.append((right[x], max(lo - ul, 0), hi - ul))
            if lo < ul:
                stack.append((l, lo, min(hi, ul)))
        return out

    def word(self, u: Optional[int]) -> list:
        return [] if u is None else self.substring(u, 0, self.length[u])

    def reachable(self, roots) -> list:
        """Nodes reachable from ``roots`` in increasing (topological) order."""
        seen = set()
        stack = [r for r in roots if r is not None]
        left, right, letter = self.left, self.right, self.letter
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            if letter[x] is None:
                stack.append(left[x])
                stack.append(right[x])
        return sorted(seen)

    def to_program(self, root: Optional[int], alphabet, naming: Optional[dict] = None,
                   root_name: str = "R") -> Program:
        """Export the sub-grammar below ``root`` as a normal-form Program."""
        if root is None:
            return Program(alphabet, (Empty(),), 0, (root_name,))
        naming = dict(naming or {})
        naming[root] = root_name
        nodes = self.reachable([root])
        b = ProgramBuilder(alphabet)
        local = {}
        used = set()
        counter = 0
        for x in nodes:
            name = naming.get(x)
            if name is None or name in used:
                if self.letter[x] is not None:
                    stem = "T_" + self.letter[x].replace("'", "_inv")
                    name = stem if is_identifier(stem) and stem not in used else None
                while name is None or name in used:
                    counter += 1
                    name = f"C{counter}"
            if x == root and name != root_name and root_name not in used:
                name = root_name
            used.add(name)
            if self.letter[x] is not None:
                local[x] = b.add(name, Terminal(self.letter[x]))
            else:
                local[x] = b.add(name, Seq((Ref(local[self.left[x]]), Ref(local[self.right[x]]))))
        return b.build(local[root])


def load_program(slp: SLPBuilder, p: Program) -> list:
    """Build a node for every non-terminal of ``p``; returns the node list.

    Truncated items become :meth:`SLPBuilder.cut` calls and inverted items use
    :meth:`SLPBuilder.bar`, so any well formed program can be loaded.
    """
    nodes = [None] * len(p.productions)
    spans = p.table.spans
    for b, prod in enumerate(p.productions):
        if isinstance(prod, Terminal):
            nodes[b] = slp.terminal(prod.letter)
        elif isinstance(prod, Seq):
            acc = None
            for item, (lo, hi) in zip(prod.items, spans[b]):
                if isinstance(item, Lit):
                    x = slp.terminal(item.letter)
                else:
                    x = nodes[item.target]
                    if item.inverted:
                        x = slp.bar(x)
                    if item.trunc is not None:
                        x = slp.cut(x, lo, hi)
                acc = slp.concat(acc, x)
            nodes[b] = acc
    return nodes


# -- the module-level conversion -----------------------------------------

def binarize(p: Program):
    """Rewrite ``p`` into the two-item shape the conversion tables assume.

    Returns ``(rows, root, origin)`` where each row is ``("t", letter)``,
    ``("e",)`` or ``("s", [(row, lo, hi), ...])`` with one or two items, and
    ``origin`` maps a row to the ``(non-terminal, inverted)`` it stands for.
    Inverted references are materialized here as barred copies.
    """
    alphabet = p.alphabet
    prods = p.productions
    lengths = p.table.lengths
    spans = p.table.spans

    need = set()
    stack = [(p.root, False)]
    while stack:
        b, f = stack.pop()
        if (b, f) in need:
            continue
        need.add((b, f))
        prod = prods[b]
        if isinstance(prod, Seq):
            for item in prod.items:
                if isinstance(item, Ref):
                    stack.append((item.target, f ^ item.inverted))

    rows = []
    origin = {}
    index = {}
    letters = {}

    def letter_row(a):
        r = letters.get(a)
        if r is None:
            r = len(rows)
            rows.append(("t", a))
            letters[a] = r
        return r

    for b in range(len(prods)):
        for f in (False, True):
            if (b, f) not in need:
                continue
            prod = prods[b]
            if isinstance(prod, Terminal):
                a = alphabet.inverse(prod.letter) if f else prod.letter
                r = letter_row(a)
            elif isinstance(prod, Empty):
                r = len(rows)
                rows.append(("e",))
            else:
                items = []
                seq = list(zip(prod.items, spans[b]))
                if f:
                    seq.reverse()
                for item, (lo, hi) in seq:
                    if isinstance(item, Lit):
                        a = alphabet.inverse(item.letter) if f else item.letter
                        items.append((letter_row(a), 0, 1))
                        continue
                    t = item.target
                    tf = f ^ item.inverted
                    if f:
                        lt = lengths[t]
                        lo, hi = lt - hi, lt - lo
                    items.append((index[(t, tf)], lo, hi))
                while len(items) > 2:
                    r0 = len(rows)
                    rows.append(("s", items[:2]))
                    a0 = items[0][2] - items[0][1]
                    a1 = items[1][2] - items[1][1]
                    items = [(r0, 0, a0 + a1)] + items[2:]
                r = len(rows)
                rows.append(("s", items))
            index[(b, f)] = r
            origin.setdefault(r, (b, f))
    return rows, index[(p.root, False)], origin


def cs_to_slp(p: Program, stats: Optional[dict] = None) -> Program:
    """Equivalent straight line program in Chomsky normal form.

    The output has at most ``2n**2 + 4n`` non-terminals, n being the row count
    after :func:`binarize`; this is asserted on every call.
    """
    rows, root, origin = binarize(p)
    n = len(rows)
    slp = SLPBuilder()
    plain = [None] * n
    for r, row in enumerate(rows):
        kind = row[0]
        if kind == "t":
            plain[r] = slp.terminal(row[1])
        elif kind == "s":
            acc = None
            for (t, lo, hi) in row[1]:
                acc = slp.concat(acc, slp.cut(plain[t], lo, hi))
            plain[r] = acc
    created = len(slp)
    bound = 2 * n * n + 4 * n
    if created > bound:
        raise AssertionError(f"conversion created {created} > 2n^2+4n = {bound} non-terminals")
    if stats is not None:
        stats.update(rows=n, created=created, bound=bound, decorated=len(slp._cuts))
    naming = {}
    for r, (b, f) in sorted(origin.items()):
        x = plain[r]
        if x is not None and x not in naming:
            naming[x] = p.names[b] + ("_bar" if f else "")
    return slp.to_program(plain[root], p.alphabet, naming=naming, root_name=p.names[p.root])
