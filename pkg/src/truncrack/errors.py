"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class ConstraintViolated(ToolkitError):
    """A protocol parameter constraint does not hold.

    ``name`` identifies the violated inequality, e.g. ``"p>m+q+r"``.
    """

    def __init__(self, name: str, detail: str = ""):
        self.name = name
        msg = f"constraint violated: {name}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class DegenerateInput(ToolkitError):
    """An input that leaves the lattice problem undefined (e.g. z = 0)."""


class SingularBasis(ToolkitError):
    """The basis determinant is zero; coefficients cannot be solved."""


class IterationCapExceeded(ToolkitError):
    """Reduction ran past its iteration safety cap (diagnostic, never expected)."""


class SearchSpaceExceeded(ToolkitError):
    """The rectangle search coefficient box holds more pairs than the cap allows."""


class NoCandidates(ToolkitError):
    """Key recovery was asked for, but the preimage candidate list is empty."""


class OracleTooLarge(ToolkitError):
    """The brute-force oracle was asked to scan a range beyond its guard."""
