"""
HilbertLab - Error hierarchy
Every failure the library reports is a HilbertGeoError subclass. The
exit_code attribute is what the management commands hand back to the shell.
"""


class HilbertGeoError(Exception):
    """Base class for all hilbertgeo errors"""
    exit_code = 1

    def __init__(self, message='', **context):
        super().__init__(message)
        self.context = context


# ==================== LINEAR ALGEBRA ====================

class DegenerateMatrix(HilbertGeoError):
    """Matrix is singular, non-finite or has the wrong determinant sign"""


class NotHyperbolic(HilbertGeoError):
    """Spectrum is not three distinct positive reals"""


class NotCollinear(HilbertGeoError):
    pass


class CoincidentPoints(HilbertGeoError):
    pass


# ==================== DOMAINS ====================

class PointOutsideDomain(HilbertGeoError):
    pass


class ZeroVector(HilbertGeoError):
    pass


class RegionNotContained(HilbertGeoError):
    pass


class ChartMismatch(HilbertGeoError):
    pass


class InvalidDomain(HilbertGeoError):
    """Vertex list is not a strictly convex counterclockwise polygon"""


class PointAtInfinity(HilbertGeoError):
    pass


class NoSeparatingLine(HilbertGeoError):
    pass


# ==================== GROUPS ====================

class EmptyWord(HilbertGeoError):
    pass


class UnknownGenerator(HilbertGeoError):
    pass


class BudgetExceeded(HilbertGeoError):
    """Enumeration would exceed its configured cap"""
    exit_code = 3


class PingPongFailed(HilbertGeoError):
    pass


class NoSplitting(HilbertGeoError):
    pass


# ==================== ESTIMATION ====================

class InsufficientData(HilbertGeoError):
    pass


class InfeasibleM(HilbertGeoError):
    pass


class NotConverged(HilbertGeoError):
    pass


# ==================== I/O ====================

class IoFailure(HilbertGeoError):
    pass


class ConfigError(HilbertGeoError):
    """Invalid or unreadable run configuration"""
    exit_code = 2
