"""Exception hierarchy shared by every module."""


class SLPError(Exception):
    """Base class for all errors raised by compwords."""


class ParseError(SLPError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CyclicReference(SLPError):
    pass


class DanglingReference(SLPError):
    pass


class TruncationOutOfRange(SLPError):
    def __init__(self, nonterminal, lo, hi, length):
        self.nonterminal = nonterminal
        self.lo, self.hi, self.length = lo, hi, length
        super().__init__(
            f"truncation [{lo}:{hi}] of {nonterminal} out of range for length {length}")


class IndexOutOfRange(SLPError, IndexError):
    pass


class HasTruncation(SLPError):
    pass


class NotGroupAlphabet(SLPError):
    pass


class KeepSetNotInvolutionClosed(SLPError):
    pass


class CapExceeded(SLPError):
    def __init__(self, length, cap):
        self.length = length
        self.cap = cap
        super().__init__(f"word length {length} exceeds decompression cap {cap}")


class PNotMaximal(SLPError):
    pass


class POutOfRange(SLPError, ValueError):
    pass


class MatcherCapExceeded(SLPError):
    pass


class RankMismatch(SLPError):
    pass


class LetterOutsideAlphabet(SLPError):
    pass


class StrandIndexOutOfRange(SLPError):
    pass


class UnknownTwistGenerator(SLPError):
    pass


class GeneratorTableMissing(SLPError):
    pass


class NotAnAutomorphism(SLPError):
    pass
