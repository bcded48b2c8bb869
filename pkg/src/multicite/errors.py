"""Exception types shared across the package."""

from __future__ import annotations


class CiteError(ValueError):
    """Domain or validation failure with a machine-readable ``code``."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"[{code}] {message}")


class InputError(CiteError):
    """A problem located in an input file.

    ``line`` is 1-based and counts the header line; ``column`` is the
    header name of the offending cell when one can be pinned down.
    """

    def __init__(self, code: str, message: str, line: int | None = None,
                 column: str | None = None, source: str | None = None):
        self.line = line
        self.column = column
        self.source = source
        where = []
        if source:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if column:
            where.append(f"column {column!r}")
        prefix = ", ".join(where)
        super().__init__(code, f"{prefix}: {message}" if prefix else message)
