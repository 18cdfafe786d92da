"""Exception types shared across the package.

Configuration mistakes (bad arguments, malformed spec strings) raise
ValueError or a subclass; conditions discovered mid-computation (poles,
divergent products) raise ArithmeticError subclasses.  The CLI maps the
first group to exit code 2 and the second to exit code 3.
"""


class DomainError(ValueError):
    """Input lies outside the implemented domain of a function."""


class SpecGrammarError(ValueError):
    """A textual function spec failed to parse."""


class DegenerateSpecError(ValueError):
    """An operation requires a nonzero normalizing constant and got zero."""


class PoleError(ArithmeticError):
    """Evaluation hit a pole or a log/power branch point."""

    def __init__(self, message, *, prime=None):
        super().__init__(message)
        self.prime = prime


class DivergentLocalFactorError(ArithmeticError):
    """A local Euler factor series diverges at the requested point."""

    def __init__(self, message, *, prime=None):
        super().__init__(message)
        self.prime = prime
