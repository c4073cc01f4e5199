class InputError(ValueError):
    """Malformed or inconsistent input (wrong uniformity, out-of-range vertex, ...)."""


class CapabilityError(RuntimeError):
    """The request exceeds a desk-scale cap and needs an explicit override."""


class ConstructionError(RuntimeError):
    """A constructive procedure failed; carries the violated condition."""

    def __init__(self, condition, detail=""):
        self.condition = condition
        self.detail = detail
        super().__init__(f"{condition}: {detail}" if detail else condition)
