"""Exception types raised by the billiard engine."""


class BilliardError(Exception):
    """Base class for all engine errors."""


class Escape(BilliardError):
    """Ray left the table without hitting any boundary piece."""


class CornerHit(BilliardError):
    """Trajectory landed within the corner tolerance of a piece endpoint."""


class Grazing(BilliardError):
    """Trajectory hit the boundary tangentially; dynamics undefined."""


class DegenerateWavefront(BilliardError):
    """Velocity is parallel to the spin axis; wavefront frame undefined."""


class NonRealizable(BilliardError):
    """Requested period-2 chord is inconsistent with the closed form."""


class ChartExit(BilliardError):
    """Wedge return-map chart left its domain of validity."""


class NoSolution(BilliardError):
    """No parameter value solves the requested rotation-number equation."""
