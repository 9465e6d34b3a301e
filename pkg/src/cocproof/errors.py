"""Exception hierarchy shared by all engine layers."""


class ProverError(Exception):
    """Base class for every error the engine can signal."""


class FuelExhausted(ProverError):
    """A reduction or solving loop ran out of its step budget."""


class ParseError(ProverError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class UnboundName(ProverError):
    pass


class OutOfScope(ProverError):
    """The name is local to a closed section."""


class TypingError(ProverError):
    pass


class Mismatch(TypingError):
    def __init__(self, inferred, expected):
        super().__init__(f"type mismatch: inferred {inferred}, expected {expected}")
        self.inferred = inferred
        self.expected = expected


class IllFormed(ProverError):
    pass


class NameClash(ProverError):
    pass


class NotASort(ProverError):
    pass


class RegisterEmpty(ProverError):
    pass


class OutOfBounds(ProverError):
    pass


class NotExistentialAtIndex(ProverError):
    pass


class NotExistential(ProverError):
    pass


class FailureContext(ProverError):
    """Instantiation produced a failure context."""


class SectionHasExistentials(ProverError):
    pass


class GoalNotProduct(ProverError):
    pass


class NoGoalAccepts(ProverError):
    pass


class NotExact(ProverError):
    pass


class GoalsRemain(ProverError):
    pass


class HistoryEmpty(ProverError):
    pass


class ModeError(ProverError):
    """Command not legal in the current session mode."""
