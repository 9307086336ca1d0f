"""Exception types shared across the package."""


class OpacityError(Exception):
    """Base class for all errors raised by this package."""


class UnknownEvent(OpacityError):
    """An event is not declared, or is not observable where it must be."""


class NotDeterministic(OpacityError):
    """An operation required a deterministic automaton."""


class AlphabetMismatch(OpacityError):
    """Two automata were combined over incompatible alphabets."""


class InvalidInstance(OpacityError):
    """A problem instance failed validation.  Carries the diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class NotUnary(OpacityError):
    """An operation restricted to a single observable event got more."""


class UnaryObstruction(OpacityError):
    """Event-count preservation was requested where it cannot exist."""


class TooFewEvents(OpacityError):
    """Binary encoding needs at least three events to encode."""


class NameClash(OpacityError):
    """A reserved fresh name is already taken."""


class EmptyInitial(OpacityError):
    """The automaton has no initial state."""


class MalformedWitness(OpacityError):
    """A witness does not fit the instance it is checked against."""


class InvalidParams(OpacityError):
    """Generator parameters are out of range."""


class BudgetExceeded(OpacityError):
    """An enumeration exceeded its work budget."""


class InstanceSyntaxError(OpacityError):
    """A textual instance file is structurally malformed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InstanceSemanticError(OpacityError):
    """A well-formed instance file describes an invalid instance."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
