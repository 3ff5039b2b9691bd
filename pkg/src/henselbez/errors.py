"""Exception types shared across the package."""


class HenselbezError(Exception):
    """Base class for all library errors."""


class ShapeError(HenselbezError):
    """Operands have incompatible ambient data (variable counts, precision, domains)."""


class NotAUnit(HenselbezError):
    """Inversion requested for a non-unit (zero constant term, zero divisor, ...)."""


class UnsupportedScalar(HenselbezError):
    """An exact-only algorithm was handed inexact scalars, or vice versa."""


class NotZeroDimensional(HenselbezError):
    """The quotient algebra is infinite-dimensional."""


class OriginNotAZero(HenselbezError):
    """A generator does not vanish at the origin."""


class NotIsolated(HenselbezError):
    """The origin is not an isolated zero of the system."""


class RequiresCertifiedBasis(HenselbezError):
    """Operation needs a border basis whose multiplication matrices commute."""


class ResidualMismatch(HenselbezError):
    """A residual rewriting rule does not belong to the residual ideal."""


class NotSimpleZero(HenselbezError):
    """The residual Newton system is singular at the start point."""


class AmbiguousClusters(HenselbezError):
    """Eigenvalue clusters too close to separate at the configured gap."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DiscsOverlap(HenselbezError):
    """Root discs of radius eps are not pairwise disjoint."""


class DegenerateSystem(HenselbezError):
    """Perturbation trials kept producing degenerate systems past the resample budget."""


class ParseError(HenselbezError):
    """Syntax error in a system file or polynomial/series expression."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column
