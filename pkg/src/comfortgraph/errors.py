"""Exception hierarchy.

``ValidationError`` subclasses signal bad input (CLI exit code 1);
``OSError`` is left to signal I/O trouble (exit code 2).
"""


class ValidationError(ValueError):
    """Input rejected by a contract check."""


class SchemaError(ValidationError):
    pass


class GeometryError(ValidationError):
    pass


class DanglingRef(ValidationError):
    pass


class StepSyntaxError(ValidationError):
    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class UnresolvedRef(ValidationError):
    def __init__(self, ref: int, lineno: int):
        super().__init__(f"line {lineno}: reference #{ref} is never defined")
        self.ref = ref
        self.lineno = lineno


class OutOfRange(ValidationError):
    pass


class MissingAoiParams(ValidationError):
    pass


class EmptyIndex(ValidationError):
    pass


class NoCellOnLevel(ValidationError):
    pass


class CollinearBeacons(ValidationError):
    pass


class Underdetermined(ValidationError):
    pass


class EmptyCorpus(ValidationError):
    pass


class ZeroVector(ValidationError):
    pass


class UnknownCell(ValidationError):
    pass


class KTooLarge(ValidationError):
    pass


class MissingEmbedding(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ConfigError(ValidationError):
    pass
