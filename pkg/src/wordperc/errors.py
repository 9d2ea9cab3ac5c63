"""Exception hierarchy shared by all modules.

Exit-code mapping used by the CLI: DomainError / ValidationError -> 2,
CapacityError -> 3.
"""


class WordpercError(Exception):
    """Base class for all library errors."""


class DomainError(WordpercError):
    """A precondition on argument values was violated."""


class CapacityError(WordpercError):
    """A guard against combinatorial blow-up was triggered."""


class ValidationError(WordpercError):
    """An experiment spec failed validation; carries every violation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
