"""Compressed words in a free group.

Free reduction works bottom-up over a normal-form program.  For a
non-terminal ``A -> B C`` whose children already reduce to ``X_B`` and
``X_C``, the cancellation depth at the junction is
``k = lcp(inverse(X_B), X_C)`` and the reduced word is ``X_B[:-k] X_C[k:]``.
The output is a composition system built from exactly these productions.

Internally every reduced word also lives as a node of a shared
:class:`~compwords.hagenah.SLPBuilder` together with its inverse, so that the
lcp probes reuse one grammar.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Protocol

from .core import Empty, Program, ProgramBuilder, Ref, Seq, Terminal, char_at, decompress, normalize
from .errors import CapExceeded, MatcherCapExceeded, NotGroupAlphabet
from .hagenah import SLPBuilder, cs_to_slp, load_program
from .plandowski import EXPLICIT_LIMIT, equal_nodes, lcp_nodes


@dataclass
class Verdict:
    value: bool
    witness: Optional[Program] = None
    stats: dict = field(default_factory=dict)

    def __bool__(self):
        return self.value


@dataclass(frozen=True)
class ReducedProgram:
    """A composition system whose word is freely reduced."""

    program: Program
    certified: bool = True
    # junction cancellation depth per non-terminal of ``program``
    depths: tuple = field(default=(), compare=False, repr=False)

    @property
    def length(self) -> int:
        return self.program.length


@dataclass(frozen=True)
class CyclicDecomposition:
    conjugator: Program
    core: Program
    k: int


class FreeReducer:
    """Bottom-up free reduction of builder nodes with per-node memo.

    ``reduce(u)`` returns ``(r, rbar)``: nodes for the free reduction of
    ``w_u`` and for its inverse (``None`` for the empty word).
    """

    def __init__(self, slp: SLPBuilder, explicit_limit: int = EXPLICIT_LIMIT,
                 stats: Optional[dict] = None):
        if slp.inverse is None:
            raise NotGroupAlphabet("free reduction needs a group alphabet")
        self.slp = slp
        self.explicit_limit = explicit_limit
        self.stats = stats if stats is not None else {}
        self.red = {}
        self.depth = {}

    def reduce(self, u: Optional[int]):
        if u is None:
            return None, None
        hit = self.red.get(u)
        if hit is not None:
            return hit
        slp = self.slp
        todo = [x for x in slp.reachable([u]) if x not in self.red]
        letter, left, right, length = slp.letter, slp.left, slp.right, slp.length
        inverse = slp.inverse
        for x in todo:
            if letter[x] is not None:
                self.red[x] = (x, slp.terminal(inverse[letter[x]]))
                self.depth[x] = 0
                continue
            rl, bl = self.red[left[x]]
            rr, br = self.red[right[x]]
            k = lcp_nodes(slp, bl, rr, self.explicit_limit, self.stats)
            nl = 0 if rl is None else length[rl]
            nr = 0 if rr is None else length[rr]
            r = slp.concat(slp.cut(rl, 0, nl - k), slp.cut(rr, k, nr))
            b = slp.concat(slp.cut(br, 0, nr - k), slp.cut(bl, k, nl))
            self.red[x] = (r, b)
            self.depth[x] = k
        self.stats["junctions"] = len(self.depth)
        return self.red[u]


class Workspace:
    """Shared grammar in which programs are loaded, reduced and compared."""

    def __init__(self, alphabet, explicit_limit: int = EXPLICIT_LIMIT):
        if not alphabet.is_group:
            raise NotGroupAlphabet("free-group operations need a group alphabet")
        self.alphabet = alphabet
        self.slp = SLPBuilder(inverse=alphabet.involution)
        self.stats = {}
        self.reducer = FreeReducer(self.slp, explicit_limit, self.stats)

    def load(self, p: Program) -> Optional[int]:
        if not p.alphabet.is_group:
            raise NotGroupAlphabet("free-group operations need a group alphabet")
        return load_program(self.slp, p)[p.root]

    def reduce(self, u):
        return self.reducer.reduce(u)

    def equal(self, u, v) -> bool:
        return equal_nodes(self.slp, u, v, stats=self.stats)

    def length(self, u) -> int:
        return 0 if u is None else self.slp.length[u]

    def cyclic(self, u):
        """``(r, rbar, k)`` for the reduced word of ``u`` and its cyclic depth."""
        r, b = self.reduce(u)
        k = lcp_nodes(self.slp, r, b, self.reducer.explicit_limit, self.stats)
        n = self.length(r)
        if n and 2 * k > n:
            raise AssertionError(f"cyclic depth {k} exceeds half of reduced length {n}")
        return r, b, k

    def export(self, u, root_name: str = "R") -> Program:
        return self.slp.to_program(u, self.alphabet, root_name=root_name)


def _normal_input(p: Program) -> Program:
    if not p.alphabet.is_group:
        raise NotGroupAlphabet("free reduction needs a group alphabet")
    return cs_to_slp(p) if p.has_truncation else normalize(p)


def free_reduce(p: Program, explicit_limit: int = EXPLICIT_LIMIT,
                stats: Optional[dict] = None) -> ReducedProgram:
    """Composition system producing the free reduction of ``w_p``."""
    q = _normal_input(p)
    ws = Workspace(q.alphabet, explicit_limit)
    nodes = load_program(ws.slp, q)
    ws.reduce(nodes[q.root])
    b = ProgramBuilder(q.alphabet)
    out_len = {}
    depths = []
    for idx, (name, prod) in enumerate(zip(q.names, q.productions)):
        if isinstance(prod, Terminal):
            b.add(name, prod)
            out_len[idx] = 1
            depths.append(0)
            continue
        if isinstance(prod, Empty):
            b.add(name, prod)
            out_len[idx] = 0
            depths.append(0)
            continue
        left, right = prod.items[0].target, prod.items[1].target
        k = ws.reducer.depth[nodes[idx]]
        nl, nr = out_len[left], out_len[right]
        items = []
        if nl - k > 0:
            items.append(Ref(left, False, (None, -k)) if k else Ref(left))
        if nr - k > 0:
            items.append(Ref(right, False, (k, None)) if k else Ref(right))
        b.add(name, Seq(tuple(items)) if items else Empty())
        out_len[idx] = nl + nr - 2 * k
        depths.append(k)
    out = b.build(q.root)
    if stats is not None:
        stats.update(ws.stats)
    return ReducedProgram(out, True, tuple(depths))


def junction_violations(p: Program) -> list:
    """Names of productions where adjacent non-empty segments cancel."""
    if not p.alphabet.is_group:
        raise NotGroupAlphabet("junction check needs a group alphabet")
    bad = []
    inv = p.alphabet.inverse
    for b, prod in enumerate(p.productions):
        if not isinstance(prod, Seq):
            continue
        st = p.table.starts[b]
        prev_end = None
        for (lo, hi), start in zip(p.table.spans[b], st):
            if hi == lo:
                continue
            if prev_end is not None:
                last = char_at(p, prev_end - 1, node=b)
                first = char_at(p, start, node=b)
                if first == inv(last):
                    bad.append(p.names[b])
                    break
            prev_end = start + (hi - lo)
    return bad


def is_trivial(p: Program, stats: Optional[dict] = None) -> bool:
    return free_reduce(p, stats=stats).length == 0


def _with_extra(p: Program, name: str, trunc) -> Program:
    b = ProgramBuilder(p.alphabet)
    for nm, prod in zip(p.names, p.productions):
        b.add(nm, prod)
    nm = name if name not in b else b.fresh(name)
    b.add(nm, Seq((Ref(p.root, False, trunc),)))
    return b.build(nm)


def cyclic_reduce(p: Program, stats: Optional[dict] = None) -> CyclicDecomposition:
    """Split the reduced word as ``conjugator . core . inverse(conjugator)``."""
    red = free_reduce(p, stats=stats)
    q = red.program
    ws = Workspace(q.alphabet)
    q_slp = cs_to_slp(q)
    u = ws.load(q_slp)
    _, _, k = ws.cyclic(u)
    n = q.length
    conj = _with_extra(q, "CONJ", (0, k))
    core = _with_extra(q, "CORE", (k, n - k))
    if stats is not None:
        stats.update(ws.stats)
    return CyclicDecomposition(conj, core, k)


# -- conjugacy -------------------------------------------------------------------

class Matcher(Protocol):
    def first_occurrence(self, pattern: Program, text: Program) -> Optional[int]:
        ...


class DecompressingMatcher:
    """Reference matcher: decompress both words and search explicitly."""

    def __init__(self, cap: int = 10 ** 6):
        self.cap = cap

    def first_occurrence(self, pattern: Program, text: Program) -> Optional[int]:
        if pattern.length > self.cap:
            raise MatcherCapExceeded(
                f"pattern of length {pattern.length} exceeds the matcher cap {self.cap}")
        try:
            pw = decompress(pattern, self.cap)
            tw = decompress(text, 2 * self.cap)
        except CapExceeded as exc:
            raise MatcherCapExceeded(str(exc)) from None
        code = {}
        for a in tw:
            code.setdefault(a, chr(0x100 + len(code)))
        if any(a not in code for a in pw):
            return None
        pos = "".join(code[a] for a in tw).find("".join(code[a] for a in pw))
        return None if pos < 0 else pos


def conjugate(a: Program, x: Program, matcher: Optional[Matcher] = None,
              matcher_cap: int = 10 ** 6) -> Verdict:
    """Decide whether ``w_a = U w_x U'`` for some U; the witness is U."""
    if matcher is None:
        matcher = DecompressingMatcher(matcher_cap)
    if not (a.alphabet.is_group and x.alphabet.is_group):
        raise NotGroupAlphabet("conjugacy needs a group alphabet")
    alphabet = a.alphabet
    ws = Workspace(alphabet)
    slp = ws.slp
    ua = ws.load(a)
    ux = ws.load(x)
    ra, _, ka = ws.cyclic(ua)
    rx, _, kx = ws.cyclic(ux)
    na, nx = ws.length(ra), ws.length(rx)
    core_a = slp.cut(ra, ka, na - ka)
    core_x = slp.cut(rx, kx, nx - kx)
    conj_a = slp.cut(ra, 0, ka)
    conj_x = slp.cut(rx, 0, kx)
    la, lx = na - 2 * ka, nx - 2 * kx
    stats = ws.stats
    stats["core_length"] = [la, lx]
    if la != lx:
        return Verdict(False, None, stats)
    if la == 0:
        offset = 0
        rot = None
    else:
        text = slp.pair(core_x, core_x)
        offset = matcher.first_occurrence(ws.export(core_a), ws.export(text))
        if offset is None or offset > lx:
            return Verdict(False, None, stats)
        offset %= lx
        # core_x = P Q and core_a = Q P = P' core_x P = Q core_x Q'
        if lx - offset <= offset:
            rot = slp.cut(core_x, offset, lx)
        else:
            rot = slp.bar(slp.cut(core_x, 0, offset))
    stats["offset"] = offset
    # w_a = U w_x U' with U = conj_a . rot . conj_x'
    u_node = slp.concat_all([conj_a, rot, slp.bar(conj_x)])
    lhs = slp.concat_all([u_node, ux, slp.bar(u_node)])
    r_lhs, _ = ws.reduce(lhs)
    if not ws.equal(r_lhs, ra):
        raise AssertionError("conjugacy witness failed verification")
    return Verdict(True, ws.export(u_node, root_name="U"), stats)
