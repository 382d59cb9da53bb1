"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible shapes or subsystem dimensions."""


class ValidationError(ValueError):
    """An object violates one of its defining conditions.

    ``condition`` names the violated condition (``"hermitian"``, ``"psd"``,
    ``"trace"``, ``"normalization"``, ...), so callers can report it without
    parsing the message.
    """

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition
