"""Exception hierarchy shared by every module.

Input validation problems raise :class:`InputError` (a ``ValueError``), so
callers that only care about "bad arguments" can catch the builtin.
"""

from __future__ import annotations


class RamseyFitError(Exception):
    """Base class for all library errors."""


class InputError(RamseyFitError, ValueError):
    """Arguments violate an operation's preconditions."""


class FormatError(InputError):
    """A graph, coloring or partition file could not be parsed."""


class BudgetExhausted(RamseyFitError):
    """A search ran out of its node or time budget before concluding."""


class RepairFailure(RamseyFitError):
    """The switching repair found no usable crossing edge."""


class ConstructionFailure(RamseyFitError):
    """``build_fit_graph`` exhausted its retries.

    ``certificate`` holds the certificate of the last attempt (may be None
    if the last attempt died before certification).
    """

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class ExtensionFailure(RamseyFitError):
    """Rotation-extension found no qualifying pair of good neighbours."""


class PathBuildError(RamseyFitError):
    """Bipartite path construction failed.

    ``code`` is one of ``"parity"``, ``"length_cap"``, ``"dead_end"``,
    ``"precondition"``.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"[{code}] {message}")
        self.code = code


class PreconditionError(InputError):
    """A constructive builder was called on an instance outside its regime."""


class UnsupportedRegime(InputError):
    """A reference formula was asked about parameters it does not cover."""


class ClassicalException(InputError):
    """(n, k) = (3, 3): the classical value r(C3, C3) = 6 breaks the 2n-1 rule."""

    value = 6
