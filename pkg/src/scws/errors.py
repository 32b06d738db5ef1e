"""Exception types raised across the package.

Everything derives from :class:`CwsError`, itself a ``ValueError`` so callers
that only care about "bad input" can catch the builtin.
"""


class CwsError(ValueError):
    pass


# weighted sets / ingestion
class NegativeWeightError(CwsError):
    pass


class NonFiniteWeightError(CwsError):
    pass


class DuplicateFeatureError(CwsError):
    pass


class MalformedLineError(CwsError):
    pass


class NonMonotonicIndexError(CwsError):
    pass


class EmptyDatasetError(CwsError):
    pass


# pool
class ZeroSizeError(CwsError):
    pass


class EmptyPoolError(CwsError):
    pass


# sketching
class EmptySetError(CwsError):
    pass


class WrongSchemeError(CwsError):
    pass


class SchemeMismatchError(CwsError):
    pass


class LengthMismatchError(CwsError):
    pass


class PoolMismatchError(CwsError):
    pass


class SketchFormatError(CwsError):
    pass


# estimation / retrieval
class BothEmptyError(CwsError):
    pass


class KappaTooLargeError(CwsError):
    pass


class ListTooShortError(CwsError):
    pass
