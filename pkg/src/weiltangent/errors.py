"""Exception types shared across the library."""


class WeilError(Exception):
    """Base class for all library errors."""


class ObjectMismatch(WeilError):
    """Operands belong to different Weil objects."""


class ConstantPartNonzero(WeilError):
    """A generator image has a nonzero coefficient on the unit monomial."""

    def __init__(self, factor, generator):
        self.factor = factor
        self.generator = generator
        super().__init__(
            f"image of generator {generator} of factor {factor} has a "
            f"nonzero constant part"
        )


class RelationViolation(WeilError):
    """A generator-image table breaks a nilpotency relation."""

    def __init__(self, factor, pair):
        self.factor = factor
        self.pair = pair
        super().__init__(
            f"images of generators {pair} of factor {factor} have a "
            f"nonzero product"
        )


class BudgetExceeded(WeilError):
    """An enumeration or search exceeded its configured cap.

    Signals that a bounded sweep could not be completed, never that the
    thing searched for fails to exist.
    """


class ExpressBudgetExceeded(BudgetExceeded):
    """No structural term was found within the depth budget."""


class TruncationTooLarge(BudgetExceeded):
    """A truncation-wide enumeration exceeded its configured cap."""


class NotACone(WeilError):
    """Pairing legs do not agree after projection to the base."""


class BadName(WeilError):
    """Unknown structural component name."""


class IllTyped(WeilError):
    """A structural term's shapes do not match."""


class InvalidPresentation(WeilError):
    """A finite-category presentation fails closure, identity or associativity."""
