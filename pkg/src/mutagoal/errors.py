"""Exception hierarchy shared by every layer of the engine."""

from __future__ import annotations


class MutagoalError(Exception):
    pass


class MiniLangError(MutagoalError):
    """Any load-time problem with MiniLang sources."""


class MiniLangSyntaxError(MiniLangError):
    def __init__(self, path: str, line: int, col: int, message: str,
                 expected: frozenset[str] = frozenset()):
        self.path = path
        self.line = line
        self.col = col
        self.expected = expected
        detail = message
        if expected:
            detail += f" (expected one of: {', '.join(sorted(expected))})"
        super().__init__(f"{path}:{line}:{col}: {detail}")


class ResolutionError(MiniLangError):
    pass


class DuplicateDeclarationError(MiniLangError):
    pass


class StaleMutantError(MutagoalError):
    """A mutant patch no longer matches the program it is applied to."""


class ManifestDriftError(MutagoalError):
    """A bundled corpus no longer agrees with its committed manifest."""


class MissingBaselineError(MutagoalError):
    pass
