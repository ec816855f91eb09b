"""Exception types shared across the package."""


class FiberError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(FiberError, ValueError):
    """Input violates a documented precondition (empty, non-finite, malformed)."""


class TieError(InvalidInputError):
    """A vector has two equal coordinates where distinct ones are required.

    Carries the first offending index pair (i, j) with i < j.
    """

    def __init__(self, i: int, j: int):
        self.i = int(i)
        self.j = int(j)
        super().__init__(f"coordinates {i} and {j} are equal; input must have pairwise-distinct values")


class StringValidationError(InvalidInputError):
    """A symbol word is not a valid cellular string; names the violated rule."""

    def __init__(self, word: str, clause: str, detail: str):
        self.word = word
        self.clause = clause
        super().__init__(f"invalid cellular string {word!r}: [{clause}] {detail}")


class InvalidPairError(InvalidInputError):
    """Two arguments are individually fine but mutually incompatible."""


class InfeasibleError(InvalidInputError):
    """The requested combinatorial object cannot exist for these parameters."""


class InvalidDiagramError(InvalidInputError):
    """A persistence diagram violates a structural requirement of the operation."""


class DomainError(InvalidInputError):
    """Argument lies outside the domain of a partial map (e.g. wrong prefix level)."""


class StructuralError(FiberError):
    """An internal structural guarantee failed; indicates a bug, not bad input."""


class DivergenceError(FiberError):
    """Numerical integration produced a non-finite state.

    ``last_time`` is the last time at which the state was still finite.
    """

    def __init__(self, last_time: float):
        self.last_time = float(last_time)
        super().__init__(f"trajectory diverged; last finite state at t={last_time:g}")
