"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a documented contract.

    The CLI maps this to exit code 1.
    """


class InternalCheckError(RuntimeError):
    """Raised when a solver postcondition fails.

    These checks guard invariants that should hold by construction
    (e.g. a bandwidth update changing the attacker's success probability).
    The CLI maps this to exit code 2.
    """
