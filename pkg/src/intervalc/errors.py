"""Exception hierarchy shared by every layer of the package."""


class IntervalcError(Exception):
    """Base class for all errors raised by intervalc."""


class ModelError(IntervalcError):
    """A model object or constraint was built with invalid arguments."""


class EmptyDomain(ModelError):
    pass


class BadIntensity(ModelError):
    pass


class DuplicateInterval(ModelError):
    pass


class DuplicateId(ModelError):
    pass


class LengthMismatch(ModelError):
    pass


class UnknownInterval(ModelError):
    pass


class EmptyChildren(ModelError):
    pass


class BadCardinality(ModelError):
    pass


class BadTransitionMatrix(ModelError):
    pass


class NotInSequence(ModelError):
    pass


class NoCommonIntervals(ModelError):
    pass


class BadBounds(ModelError):
    pass


class StateOutOfDomain(ModelError):
    pass


class BadPeriod(ModelError):
    pass


class BadK(ModelError):
    pass


class BadMin(ModelError):
    pass


class BadWindow(ModelError):
    pass


class DivisionByZero(IntervalcError, ZeroDivisionError):
    pass


class IndexOutOfTable(IntervalcError, IndexError):
    """An element lookup used an index outside the (extended) table."""


class PartialAssignment(IntervalcError):
    pass


class CompileError(IntervalcError):
    pass


class StrategyUnsupported(CompileError):
    pass


class TupleExplosion(CompileError):
    pass


class NoFeasibleTuple(CompileError):
    pass


class IndexDomainExceedsTable(CompileError):
    pass


class UnsupportedConstraint(IntervalcError):
    pass


class MalformedDocument(IntervalcError):
    pass


class UnknownElement(MalformedDocument):
    pass


class SearchSpaceTooLarge(IntervalcError):
    pass


class NoSolution(IntervalcError):
    pass


class ParseError(IntervalcError):
    """An instance file could not be read or does not follow the schema."""
