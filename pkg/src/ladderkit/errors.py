"""Exception hierarchy shared by all ladderkit modules."""


class LadderkitError(Exception):
    """Base class for every error raised by ladderkit."""


# symbolic algebra


class ParseError(LadderkitError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnknownIdentifier(ParseError):
    pass


class NonMonomialDivisor(ParseError):
    """Division by something that is not coefficient * x^p."""


class OrderOverflow(LadderkitError):
    pass


class UnboundConstant(LadderkitError):
    pass


class DenominatorVanishes(LadderkitError):
    pass


class NotRepresentable(LadderkitError):
    """A result leaves the span of integer powers of the variable."""


class NotPerfectSquare(LadderkitError):
    pass


# coordinate systems


class DomainError(LadderkitError):
    """Point outside the validity box of a coordinate system."""


class DegeneratePoint(LadderkitError):
    """Some scale factor vanishes (symmetry axis, origin)."""


class UndefinedEntry(LadderkitError):
    """A Staeckel matrix entry or f function is undefined at a point."""


class MissingStaeckelData(LadderkitError):
    pass


class ConfigError(LadderkitError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# factorization


class NotFactorizableInBasis(LadderkitError):
    pass


class NonPositiveRadicand(LadderkitError):
    def __init__(self, lam, epsilon, radicand):
        self.lam = lam
        self.epsilon = epsilon
        self.radicand = radicand
        super().__init__(
            f"normalization radicand {radicand} is not positive "
            f"(lambda={lam}, epsilon_engine={epsilon})"
        )


# states and numerics


class NonNormalizable(LadderkitError):
    pass


class UnsupportedSuperpotential(LadderkitError):
    pass


class NoSignChange(LadderkitError):
    pass


class StiffnessError(LadderkitError):
    pass


class NumericsError(LadderkitError):
    pass
