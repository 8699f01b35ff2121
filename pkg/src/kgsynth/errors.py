"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes, so new failure modes should subclass
one of the three families below rather than raising bare exceptions.
"""


class KgsynthError(Exception):
    """Base class for all toolkit errors."""


class LoadError(KgsynthError):
    """A dataset file is missing or unreadable."""


class ValidationError(KgsynthError):
    """Input data violates a structural invariant (bad ids, duplicates, ...)."""


class InfeasibleError(KgsynthError):
    """A requested random object (derangement, matching) does not exist."""


class UniquenessError(KgsynthError):
    """Could not produce the requested number of distinct random strings."""


class SamplingError(KgsynthError):
    """String sampling hit its hard length cap (degenerate model)."""
