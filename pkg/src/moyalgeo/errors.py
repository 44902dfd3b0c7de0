"""Exception hierarchy shared by all modules."""


class MoyalGeoError(Exception):
    """Base class for every error raised by the package."""


class InvalidTruncation(MoyalGeoError, ValueError):
    """Truncation too small for the requested construction."""


class TruncationTooSmall(MoyalGeoError):
    """A post-hoc residual shows the truncation cannot represent the object."""


class ContractViolation(MoyalGeoError, ValueError):
    """An input breaks a documented precondition (e.g. non-Hermitian)."""


class DomainError(MoyalGeoError, ValueError):
    pass


class FormulaInapplicable(MoyalGeoError):
    """A closed form was requested outside its range of validity."""


class UnsupportedPair(MoyalGeoError):
    """No analytic result is known for the given pair of states."""


class UndefinedLimit(MoyalGeoError, ValueError):
    pass
