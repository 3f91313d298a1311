"""Exception types shared across the package."""


class ResonanceLabError(Exception):
    """Base class for all library errors."""


class DomainError(ResonanceLabError):
    """A function was evaluated outside its declared domain."""


class BranchCutError(DomainError):
    """A branched complex power was evaluated on its cut."""


class PoleError(ResonanceLabError):
    """Evaluation requested at (or too close to) a pole."""


class OrdinaryPointError(ResonanceLabError):
    """The discrete map is undefined here: the point sits in a funnel gap."""


class BoundaryPointError(ResonanceLabError):
    """The discrete map is undefined on branch-interval endpoints."""


class ExceptionalPointError(ResonanceLabError):
    """A piecewise section was evaluated at one of its singular points."""


class ConvergenceError(ResonanceLabError):
    """A series, quadrature or iteration did not reach its tolerance."""


class ResourceGuardError(ResonanceLabError):
    """An enumeration exceeded its configured size cap."""
