"""Exception types shared across the package."""


class GraphValidationError(ValueError):
    """A matching graph violates one or more structural invariants."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class DecodeError(RuntimeError):
    """A syndrome cannot be decoded on the given matching graph."""


class InfeasibleMatchingError(DecodeError):
    """The syndrome graph admits no perfect matching."""
