"""Exception hierarchy.

Every domain error carries its class name as its public identity; the CLI
prints that name on stderr before exiting with status 1.
"""


class PhiGraphError(ValueError):
    """Base class for all domain errors raised by the library."""


class EmptyGraph(PhiGraphError):
    pass


class Disconnected(PhiGraphError):
    pass


class NonpositiveLength(PhiGraphError):
    pass


class NegativeLength(PhiGraphError):
    pass


class UnknownVertex(PhiGraphError):
    pass


class UnknownEdge(PhiGraphError):
    pass


class InvalidPoint(PhiGraphError):
    pass


class UnstablePolarization(PhiGraphError):
    def __init__(self, vertex, message=None):
        self.vertex = vertex
        super().__init__(message or f"stability fails at vertex {vertex!r}")


class SingularSystem(PhiGraphError):
    pass


class GenusTooSmall(PhiGraphError):
    pass


class NotProbability(PhiGraphError):
    pass


class DomainMismatch(PhiGraphError):
    pass


class TotalCollapse(PhiGraphError):
    pass


class EmptyExponentSet(PhiGraphError):
    pass


class ZeroExponent(PhiGraphError):
    pass


class ArityMismatch(PhiGraphError):
    pass


class NegativeInput(PhiGraphError):
    pass


class OutOfDomain(PhiGraphError):
    pass


class BadMesh(PhiGraphError):
    pass


class BadType(PhiGraphError):
    pass
