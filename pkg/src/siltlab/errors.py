"""Exception types shared across the package."""


class SiltlabError(Exception):
    """Base class for all library errors."""


class ParseError(SiltlabError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(msg + where)


class NotFiniteDimensional(SiltlabError):
    pass


class InadmissibleRelation(SiltlabError):
    pass


class NotAssociative(SiltlabError):
    pass


class IdempotentNotPrimitive(SiltlabError):
    pass


class DecompositionFailed(SiltlabError):
    """No splitting idempotent found; usually means the prime is too small."""


class Truncated(SiltlabError):
    """A bounded search stopped before it could certify completeness."""


class TruncatedInput(SiltlabError):
    pass


class NotTwoTerm(SiltlabError):
    pass


class AlreadySilting(SiltlabError):
    pass


class SummandMissing(SiltlabError):
    pass


class PreconditionError(SiltlabError):
    pass


class TheoremViolation(AssertionError):
    """A computed instance contradicts a statement the library relies on.

    Deliberately an AssertionError: it signals a bug or a counterexample,
    never bad user input.
    """
