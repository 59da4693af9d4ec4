"""
Exception hierarchy for subfactor-lab.

Library code raises these; the suite runner and the CLI translate them into
report entries and exit codes.
"""


class SubfactorLabError(Exception):
    """Base class for every error raised by the package"""


class StructuralError(SubfactorLabError):
    """Operands do not live in the same algebra, or shapes do not conform"""


class InclusionError(SubfactorLabError):
    """An inclusion matrix does not describe a connected unital inclusion"""

    NOT_CONNECTED = 'not connected'
    NOT_UNITAL = 'not unital'
    DEGENERATE = 'degenerate inclusion'

    def __init__(self, kind, detail=''):
        self.kind = kind
        message = kind if not detail else f"{kind}: {detail}"
        super().__init__(message)


class NumericError(SubfactorLabError):
    """A numerical procedure failed to converge or missed its tolerance"""


class ConsistencyError(SubfactorLabError):
    """A constructed object violates an internal invariant"""


class DepthError(SubfactorLabError):
    """The tower is not deep enough, or cannot be built that deep"""

    def __init__(self, message, needed=None, available=None):
        self.needed = needed
        self.available = available
        super().__init__(message)


class PreconditionError(SubfactorLabError):
    """An operation was called on inputs outside its domain"""


class SpecParseError(SubfactorLabError):
    """A spec file could not be parsed"""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ''
        super().__init__(f"{prefix}{message}")
