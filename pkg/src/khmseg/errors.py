"""Exception hierarchy shared by all khmseg modules.

Two top-level families map onto the CLI exit codes: InputError (exit 1,
bad files / bad text) and InvariantError (exit 2, a loaded database or
table violates one of its declared invariants).
"""


class KhmsegError(Exception):
    pass


class InputError(KhmsegError):
    pass


class InvariantError(KhmsegError):
    pass


class TablesParseError(InputError):
    """Tables file could not be parsed; carries the 1-based line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class TablesInvariantError(InvariantError):
    pass


class DanglingCoengError(InputError):
    """A coeng (U+17D2) with no following consonant in strict mode."""

    def __init__(self, column, message="coeng has no following consonant"):
        super().__init__(f"column {column}: {message}")
        self.column = column


class MalformedLabelSequenceError(KhmsegError):
    """Label sequence cannot be merged into syllables; names the offending position."""

    def __init__(self, position, message):
        super().__init__(f"position {position}: {message}")
        self.position = position


class DatabaseParseError(InputError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DatabaseInvariantError(InvariantError):
    pass


class EvalInputError(InputError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
