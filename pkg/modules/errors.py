"""
Exception hierarchy shared by the analysis modules.
Every error a caller can fix by changing its input derives from IsoGrowthError,
which the CLI turns into exit code 2.
"""


class IsoGrowthError(Exception):
    """Base class for validation, margin and resource errors"""


class ParameterError(IsoGrowthError):
    """Invalid parameter or generator spec"""


class MarginError(IsoGrowthError):
    """A truncation margin rule does not hold, so the result would not be exact"""
    def __init__(self, message, vertex=None, needed=None, radius=None):
        self.vertex = vertex
        self.needed = needed
        self.radius = radius
        super().__init__(message)


class ResourceLimitError(IsoGrowthError):
    """Materialization exceeded the configured vertex cap"""
    def __init__(self, count, limit, radius):
        self.count = count
        self.limit = limit
        self.radius = radius
        super().__init__(
            f"Materialization stopped at {count} vertices (cap {limit}); "
            f"radius {radius} is too large for this family."
        )


class OutOfRangeError(IsoGrowthError):
    """phi(n) cannot be certified inside the truncation"""


class DegenerateFitError(IsoGrowthError):
    """A least-squares fit has no usable slope"""


class UnverifiedPinchError(IsoGrowthError):
    """Pinch constants failed verification on the radii a certificate needs"""
    def __init__(self, message, violations=None):
        self.violations = violations or []
        super().__init__(message)


class RangeError(IsoGrowthError):
    """Set size outside the range a bound is stated for"""


class DisconnectedGraphError(IsoGrowthError):
    """Operation needs a connected graph"""


class NotATreeError(IsoGrowthError):
    """Operation needs an acyclic connected graph"""


class GraphFormatError(IsoGrowthError):
    """Malformed edge-list or vertex-set file"""
    def __init__(self, message, path=None, line_number=None):
        self.path = path
        self.line_number = line_number
        where = f"{path}:{line_number}: " if line_number is not None else ""
        super().__init__(f"{where}{message}")


class InconsistentGraphError(IsoGrowthError):
    """Adjacency is not symmetric after normalization"""


class SchemaError(IsoGrowthError):
    """A CSV does not have the columns the consumer expects"""
