"""Exception hierarchy shared by every module of the package."""


class TribeError(Exception):
    """Base class for all errors raised by :mod:`tribes`."""


class Violation:
    """One broken law, with the elements that witness it."""

    __slots__ = ("kind", "witness", "detail")

    def __init__(self, kind, witness=(), detail=""):
        self.kind = kind
        self.witness = tuple(witness)
        self.detail = detail

    def __eq__(self, other):
        return (
            isinstance(other, Violation)
            and self.kind == other.kind
            and self.witness == other.witness
        )

    def __hash__(self):
        return hash((self.kind, self.witness))

    def __repr__(self):
        args = ", ".join(repr(w) for w in self.witness)
        return f"{self.kind}({args})"

    def as_dict(self):
        return {"kind": self.kind, "witness": list(self.witness), "detail": self.detail}


class ValidationError(TribeError):
    def __init__(self, violations, message=None):
        self.violations = list(violations)
        if message is None:
            shown = ", ".join(repr(v) for v in self.violations[:5])
            more = len(self.violations) - 5
            message = shown + (f" (+{more} more)" if more > 0 else "")
        super().__init__(message)


class DomainMismatch(TribeError):
    pass


class CodomainMismatch(TribeError):
    pass


class NotACone(TribeError):
    pass


class NotAFibration(TribeError):
    def __init__(self, obj, arrow):
        self.obj = obj
        self.arrow = arrow
        super().__init__(f"NotAFibration({obj!r}, {arrow!r}): no lift of {arrow!r} starts at {obj!r}")

    def violation(self):
        return Violation("NotAFibration", (self.obj, self.arrow))


class PreconditionViolated(TribeError):
    pass


class NoWitness(TribeError):
    pass


class BudgetExceeded(TribeError):
    def __init__(self, message, bound=None):
        self.bound = bound
        super().__init__(message)


class DocumentSyntaxError(TribeError):
    def __init__(self, message, line, column):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class SchemaError(TribeError):
    def __init__(self, field, message=""):
        self.field = field
        super().__init__(f"SchemaError({field})" + (f": {message}" if message else ""))


class InvalidFibration(ValidationError):
    pass
