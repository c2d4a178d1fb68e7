"""
Utilities
"""
from sympy import isprime


class InvalidInputError(ValueError):
    """An argument is outside the domain of an operation."""


class GroupTooLargeError(ValueError):
    """A group enumeration would exceed the size guard."""


class NotInKernelError(ValueError):
    """A matrix is not congruent to the identity modulo p^(r-1)."""


class NotInSubfieldError(ValueError):
    """A cyclotomic number does not lie in the quadratic subfield."""


class ConsistencyError(ArithmeticError):
    """An exact identity that must hold did not."""


def verify_set(name, value, set_):
    """Verify that an argument has a value within a specified set."""
    if value not in set_:
        raise InvalidInputError(
            f"The value of '{value}' for the argument '{name}' is not in the set {set_}."
        )


def verify_odd_prime(name, value):
    """Verify that an argument is an odd prime."""
    if not isinstance(value, int) or value == 2 or not isprime(value):
        raise InvalidInputError(
            f"The value of {value} for the argument '{name}' is not an odd prime."
        )


def verify_level(name, value, lower_limit=2):
    """Verify that a level r is an integer not below `lower_limit`."""
    if not isinstance(value, int) or value < lower_limit:
        raise InvalidInputError(
            f"The value of {value} for the argument '{name}' should be an integer "
            f">= {lower_limit}."
        )


def exact_quotient(numerator, denominator, what):
    """Divide two integers, raising ConsistencyError if the division is not exact."""
    quotient, remainder = divmod(numerator, denominator)
    if remainder != 0:
        raise ConsistencyError(
            f"{what}: {numerator}/{denominator} is not an integer."
        )
    return quotient


class CheckResult:
    """Outcome of a single verification: a name, a status and both sides as strings."""

    STATUSES = ("pass", "fail", "skipped")

    __slots__ = ("name", "status", "lhs", "rhs")

    def __init__(self, name, status, lhs="", rhs=""):
        verify_set("status", status, CheckResult.STATUSES)
        self.name = name
        self.status = status
        self.lhs = str(lhs)
        self.rhs = str(rhs)

    @classmethod
    def compare(cls, name, lhs, rhs):
        return cls(name, "pass" if lhs == rhs else "fail", lhs, rhs)

    @classmethod
    def skipped(cls, name, reason):
        return cls(name, "skipped", reason, "")

    @property
    def passed(self):
        return self.status == "pass"

    def as_dict(self):
        return {"name": self.name, "status": self.status, "lhs": self.lhs, "rhs": self.rhs}

    def __repr__(self):
        return f"CheckResult({self.name!r}, {self.status!r}, {self.lhs!r}, {self.rhs!r})"
