"""Command line interface.

Verdict verbs exit with 0 for yes/true/trivial/member and 1 for no.  Usage
errors exit with 2 and runtime errors (bad input files, caps exceeded, ...)
with 3.  ``--json`` prints ``{"verdict": ..., "witness": ..., "stats": {...}}``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import core, freegroup, groups, oracle, plandowski
from .core import GroupAlphabet
from .errors import SLPError
from .hagenah import cs_to_slp
from .textformat import dumps, loads

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class Result:
    """What a verb hands back to the printer."""

    def __init__(self, verdict=None, witness=None, text=None, stats=None):
        self.verdict = verdict
        self.witness = witness
        self.text = text
        self.stats = stats or {}


def _read_program(path: str):
    if path == "-":
        return loads(sys.stdin.read())
    return loads(Path(path).read_text(encoding="utf-8"))


def _words(text: str) -> list:
    return text.split()


def _fmt_word(w) -> str:
    return " ".join(w)


def _jsonable(stats: dict) -> dict:
    out = {}
    for k, v in sorted(stats.items()):
        if isinstance(v, (list, tuple)):
            v = list(v)
        out[k] = v
    return out


def _emit(result: Result, as_json: bool) -> int:
    if as_json:
        witness = result.witness
        if isinstance(witness, core.Program):
            witness = dumps(witness)
        doc = {"verdict": result.verdict, "witness": witness, "stats": _jsonable(result.stats)}
        print(json.dumps(doc, sort_keys=True))
    else:
        if result.text is not None:
            sys.stdout.write(result.text if result.text.endswith("\n") or not result.text else result.text + "\n")
            if result.text == "":
                sys.stdout.write("\n")
        elif result.verdict is not None:
            print("true" if result.verdict else "false")
            if result.witness is not None:
                w = result.witness
                sys.stdout.write(dumps(w) if isinstance(w, core.Program) else f"{w}\n")
    if result.verdict is None:
        return EXIT_YES
    return EXIT_YES if result.verdict else EXIT_NO


# -- slp verbs ----------------------------------------------------------------------

def cmd_slp_decompress(a):
    p = _read_program(a.program)
    w = core.decompress(p, a.max_decompress)
    return Result(text=_fmt_word(w), stats={"length": p.length})


def cmd_slp_length(a):
    p = _read_program(a.program)
    return Result(text=str(p.length), stats={"length": p.length, "height": p.height, "kind": p.kind})


def cmd_slp_char_at(a):
    p = _read_program(a.program)
    return Result(text=core.char_at(p, a.index), stats={"value": core.char_at(p, a.index)})


def cmd_slp_substring(a):
    p = _read_program(a.program)
    w = core.substring(p, a.i, a.j)
    if len(w) > a.max_decompress:
        raise SLPError(f"substring of length {len(w)} exceeds --max-decompress {a.max_decompress}")
    return Result(text=_fmt_word(w), stats={"value": _fmt_word(w)})


def _program_result(p):
    return Result(text=dumps(p), witness=p, stats={"length": p.length, "size": len(p)})


def cmd_slp_invert(a):
    return _program_result(core.invert(_read_program(a.program)))


def cmd_slp_project(a):
    p = _read_program(a.program)
    keep = {x.strip() for x in a.keep.split(",") if x.strip()}
    if p.alphabet.is_group:
        # naming a generator keeps its inverse as well
        keep |= {p.alphabet.inverse(x) for x in keep if x in p.alphabet}
    return _program_result(core.project(p, keep))


def cmd_slp_normalize(a):
    p = _read_program(a.program)
    if a.eliminate_truncations:
        stats = {}
        q = core.normalize(cs_to_slp(p, stats=stats))
        res = _program_result(q)
        res.stats.update(stats)
        return res
    return _program_result(core.normalize(p))


def cmd_slp_equal(a):
    pa, px = _read_program(a.a), _read_program(a.x)
    lines = []
    stats = {}
    value = plandowski.equal(pa, px, trace=lines.append if a.trace else None, stats=stats)
    if a.trace:
        if a.json:
            stats["trace"] = lines
        else:
            for line in lines:
                print(line)
    return Result(verdict=value, stats=stats)


def cmd_slp_lcp(a):
    stats = {}
    k = plandowski.lcp(_read_program(a.a), _read_program(a.x), stats=stats)
    stats["value"] = k
    return Result(text=str(k), stats=stats)


# -- free group verbs ---------------------------------------------------------------

def cmd_fg_reduce(a):
    stats = {}
    red = freegroup.free_reduce(_read_program(a.program), stats=stats)
    res = _program_result(red.program)
    res.stats.update(stats)
    return res


def cmd_fg_trivial(a):
    stats = {}
    red = freegroup.free_reduce(_read_program(a.program), stats=stats)
    stats["reduced_length"] = red.length
    return Result(verdict=red.length == 0, stats=stats)


def cmd_fg_cyclic_reduce(a):
    stats = {}
    cd = freegroup.cyclic_reduce(_read_program(a.program), stats=stats)
    stats.update(k=cd.k, core=dumps(cd.core), core_length=cd.core.length)
    text = "# conjugator\n" + dumps(cd.conjugator) + "# core\n" + dumps(cd.core)
    return Result(text=text, witness=cd.conjugator, stats=stats)


def cmd_fg_conjugate(a):
    v = freegroup.conjugate(_read_program(a.a), _read_program(a.x), matcher_cap=a.matcher_cap)
    return Result(verdict=v.value, witness=v.witness, stats=v.stats)


# -- automorphism verbs -------------------------------------------------------------

def cmd_aut_trivial(a):
    stats = {}
    value = groups.aut_is_identity(groups.parse_nielsen(a.word, a.rank), stats=stats)
    return Result(verdict=value, stats=stats)


def cmd_aut_apply(a):
    phi = groups.parse_nielsen(a.word, a.rank)
    p = groups.aut_apply(phi, _words(a.input))
    if a.reduce:
        p = freegroup.free_reduce(p).program
    return _program_result(p)


def cmd_aut_inn(a):
    v = groups.inn_membership(groups.parse_nielsen(a.word, a.rank))
    return Result(verdict=v.value, witness=v.witness, stats=v.stats)


def cmd_braid_trivial(a):
    stats = {}
    value = groups.braid_is_trivial(a.word, a.strands, stats=stats)
    return Result(verdict=value, stats=stats)


def _alphabet_for(letters, rank: Optional[int]) -> GroupAlphabet:
    if rank is not None:
        return GroupAlphabet.of_rank(rank)
    base = sorted({x.rstrip("'") for x in letters if x not in ("t", "t'")},
                  key=lambda s: (s.rstrip("0123456789"), int(s[len(s.rstrip("0123456789")):] or 0)))
    if base and all(x.startswith("a") and x[1:].isdigit() for x in base):
        return GroupAlphabet.of_rank(max(int(x[1:]) for x in base))
    return GroupAlphabet(tuple(base) or ("a1",))


def cmd_fbc_trivial(a):
    text = Path(a.phi).read_text(encoding="utf-8")
    raw = groups.parse_map(text)
    word = _words(a.word)
    letters = list(raw) + [x for img in raw.values() for x in img] + word
    alphabet = _alphabet_for(letters, a.rank)
    phi = groups.Endomorphism.from_mapping(alphabet, groups.parse_map(text, alphabet))
    stats = {}
    value = groups.fbc_is_trivial(phi, word, stats=stats)
    return Result(verdict=value, stats=stats)


def _actions(a):
    alphabet = groups.genus_alphabet(a.genus)
    if a.actions is None:
        if a.genus != 2:
            raise groups.GeneratorTableMissing(f"no built-in twist table for genus {a.genus}; pass --actions")
        return groups.load_genus2_actions()
    return groups.parse_actions(Path(a.actions).read_text(encoding="utf-8"), alphabet)


def cmd_mcg_handlebody(a):
    return Result(verdict=groups.handlebody_membership(a.word, a.genus, _actions(a)))


def cmd_mcg_heegaard(a):
    return Result(verdict=groups.heegaard_membership(a.word, a.genus, _actions(a)))


def cmd_mcg_punctured_disk(a):
    return Result(verdict=groups.punctured_disk_mcg_membership(groups.parse_nielsen(a.word, a.rank)))


# -- parser ---------------------------------------------------------------------------

def _common(suppress: bool) -> argparse.ArgumentParser:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=d(False), help="machine-readable output")
    p.add_argument("--trace", action="store_true", default=d(False), help="print per-round assertion counts")
    p.add_argument("--matcher-cap", type=int, default=d(10 ** 6), help="reference matcher length cap")
    p.add_argument("--max-decompress", type=int, default=d(10 ** 6), help="largest word printed explicitly")
    return p


def build_parser(prog: str = "compwords") -> argparse.ArgumentParser:
    common = _common(suppress=True)
    parser = argparse.ArgumentParser(prog=prog, parents=[_common(suppress=False)],
                                     description="Grammar-compressed words and free group algorithms.")
    groups_ = parser.add_subparsers(dest="group", required=True, metavar="GROUP")

    def verb(sub, name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    slp = groups_.add_parser("slp", help="straight line programs").add_subparsers(dest="verb", required=True)
    p = verb(slp, "decompress", cmd_slp_decompress, "print the word")
    p.add_argument("program")
    p = verb(slp, "length", cmd_slp_length, "print the word length")
    p.add_argument("program")
    p = verb(slp, "char-at", cmd_slp_char_at, "print one letter (negative indices count from the end)")
    p.add_argument("program")
    p.add_argument("index", type=int)
    p = verb(slp, "substring", cmd_slp_substring, "print w[i:j]")
    p.add_argument("program")
    p.add_argument("i", type=int)
    p.add_argument("j", type=int)
    p = verb(slp, "invert", cmd_slp_invert, "program for the group inverse")
    p.add_argument("program")
    p = verb(slp, "project", cmd_slp_project, "delete letters outside --keep")
    p.add_argument("program")
    p.add_argument("--keep", required=True, help="comma separated letters to keep")
    p = verb(slp, "normalize", cmd_slp_normalize, "Chomsky normal form")
    p.add_argument("program")
    p.add_argument("--eliminate-truncations", action="store_true", help="convert truncations first")
    p = verb(slp, "equal", cmd_slp_equal, "word equality")
    p.add_argument("a")
    p.add_argument("x")
    p = verb(slp, "lcp", cmd_slp_lcp, "longest common prefix length")
    p.add_argument("a")
    p.add_argument("x")

    fg = groups_.add_parser("fg", help="free group").add_subparsers(dest="verb", required=True)
    p = verb(fg, "reduce", cmd_fg_reduce, "free reduction")
    p.add_argument("program")
    p = verb(fg, "trivial", cmd_fg_trivial, "word problem")
    p.add_argument("program")
    p = verb(fg, "cyclic-reduce", cmd_fg_cyclic_reduce, "conjugator and cyclically reduced core")
    p.add_argument("program")
    p = verb(fg, "conjugate", cmd_fg_conjugate, "conjugacy with witness U, a = U x U'")
    p.add_argument("a")
    p.add_argument("x")

    aut = groups_.add_parser("aut", help="automorphisms of free groups").add_subparsers(dest="verb", required=True)
    for name, func, text in (("trivial", cmd_aut_trivial, "is the Nielsen word the identity"),
                             ("inn", cmd_aut_inn, "is the Nielsen word an inner automorphism")):
        p = verb(aut, name, func, text)
        p.add_argument("word", help="tokens such as 'inv3 mul2,5 mul2,5^-1'")
        p.add_argument("--rank", type=int)
    p = verb(aut, "apply", cmd_aut_apply, "program for the image of a word")
    p.add_argument("word")
    p.add_argument("input", help="word such as \"a1 a2'\"")
    p.add_argument("--rank", type=int)
    p.add_argument("--reduce", action="store_true", help="freely reduce the image")

    braid = groups_.add_parser("braid", help="braid groups").add_subparsers(dest="verb", required=True)
    p = verb(braid, "trivial", cmd_braid_trivial, "braid word problem")
    p.add_argument("word", help="e.g. 's1 s2^-1 s1'")
    p.add_argument("--strands", type=int, required=True)

    fbc = groups_.add_parser("fbc", help="free-by-cyclic groups").add_subparsers(dest="verb", required=True)
    p = verb(fbc, "trivial", cmd_fbc_trivial, "word problem in the mapping torus")
    p.add_argument("word", help="mixed word, e.g. \"t a1 t' a2'\"")
    p.add_argument("--phi", required=True, help="map file with lines 'a1 -> a1 a2'")
    p.add_argument("--rank", type=int)

    mcg = groups_.add_parser("mcg", help="mapping class subgroups").add_subparsers(dest="verb", required=True)
    for name, func, text in (("handlebody", cmd_mcg_handlebody, "handlebody group membership"),
                             ("heegaard", cmd_mcg_heegaard, "membership for both handlebodies")):
        p = verb(mcg, name, func, text)
        p.add_argument("word", help="twist names, '^-1' for inverses")
        p.add_argument("--genus", type=int, required=True)
        p.add_argument("--actions", help="twist action table (built-in table for genus 2)")
    p = verb(mcg, "punctured-disk", cmd_mcg_punctured_disk, "punctured disk mapping class membership")
    p.add_argument("word")
    p.add_argument("--rank", type=int)
    return parser


def _run(parser, argv) -> int:
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except (SLPError, OSError, ValueError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return _emit(result, args.json)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        return _run(parser, argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE


# -- oracle binary -------------------------------------------------------------------

def _oracle_word(a, name="program"):
    return oracle.program_word(_read_program(getattr(a, name)), a.max_decompress)


def _oracle_program(alphabet, w):
    return _program_result(core.from_word(alphabet, w))


def build_oracle_parser() -> argparse.ArgumentParser:
    common = _common(suppress=True)
    parser = argparse.ArgumentParser(prog="slp-oracle", parents=[_common(suppress=False)],
                                     description="Naive reference answers for differential testing.")
    sub = parser.add_subparsers(dest="group", required=True, metavar="GROUP")

    def verb(s, name, func):
        p = s.add_parser(name, parents=[common])
        p.set_defaults(func=func)
        return p

    slp = sub.add_parser("slp").add_subparsers(dest="verb", required=True)
    p = verb(slp, "decompress", lambda a: Result(text=_fmt_word(_oracle_word(a))))
    p.add_argument("program")
    p = verb(slp, "length", lambda a: Result(text=str(len(_oracle_word(a)))))
    p.add_argument("program")
    p = verb(slp, "char-at", lambda a: Result(text=_oracle_word(a)[a.index]))
    p.add_argument("program")
    p.add_argument("index", type=int)
    p = verb(slp, "substring", lambda a: Result(text=_fmt_word(_oracle_word(a)[a.i:a.j])))
    p.add_argument("program")
    p.add_argument("i", type=int)
    p.add_argument("j", type=int)
    p = verb(slp, "invert", lambda a: _oracle_program(_read_program(a.program).alphabet,
                                                      oracle.naive_invert(_oracle_word(a))))
    p.add_argument("program")
    p = verb(slp, "equal", lambda a: Result(verdict=oracle.naive_equal(_oracle_word(a, "a"), _oracle_word(a, "x"))))
    p.add_argument("a")
    p.add_argument("x")
    p = verb(slp, "lcp", lambda a: Result(text=str(oracle.naive_lcp(_oracle_word(a, "a"), _oracle_word(a, "x")))))
    p.add_argument("a")
    p.add_argument("x")

    fg = sub.add_parser("fg").add_subparsers(dest="verb", required=True)
    p = verb(fg, "reduce", lambda a: _oracle_program(_read_program(a.program).alphabet,
                                                     oracle.naive_free_reduce(_oracle_word(a))))
    p.add_argument("program")
    p = verb(fg, "trivial", lambda a: Result(verdict=not oracle.naive_free_reduce(_oracle_word(a))))
    p.add_argument("program")

    def cyc(a):
        c, k = oracle.naive_cyclic_reduce(_oracle_word(a))
        return Result(text=f"conjugator: {_fmt_word(c)}\ncore: {_fmt_word(k)}", witness=_fmt_word(c))

    p = verb(fg, "cyclic-reduce", cyc)
    p.add_argument("program")
    p = verb(fg, "conjugate", lambda a: Result(verdict=oracle.naive_conjugate(_oracle_word(a, "a"),
                                                                              _oracle_word(a, "x"))))
    p.add_argument("a")
    p.add_argument("x")

    def aut_trivial(a):
        w = groups.parse_nielsen(a.word, a.rank)
        return Result(verdict=oracle.naive_aut_is_identity(w.tokens, w.rank))

    aut = sub.add_parser("aut").add_subparsers(dest="verb", required=True)
    p = verb(aut, "trivial", aut_trivial)
    p.add_argument("word")
    p.add_argument("--rank", type=int)
    return parser


def oracle_main(argv=None) -> int:
    parser = build_oracle_parser()
    try:
        return _run(parser, argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
