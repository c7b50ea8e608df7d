import logging
import threading

from modules.errors import IsoGrowthError, ParameterError


class BudgetExceeded(IsoGrowthError):
    """Exception raised when a work budget is exhausted"""
    def __init__(self, used, limit, name="generic", message=None):
        self.used = used
        self.limit = limit
        self.name = name
        self.message = message or f"Work budget '{name}' exhausted after {used} units (limit {limit})."
        super().__init__(self.message)


class WorkBudget:
    """Counts work units for one call and stops it at a fixed limit"""

    def __init__(self, limit: int, name: str = "generic"):
        """
        Initialize a work budget

        Parameters:
        - limit: Maximum number of work units (sets visited, moves made)
        - name: Name for this budget for logging purposes
        """
        if limit is not None and limit < 0:
            raise ParameterError(f"Budget must be non-negative, got {limit}")
        self.limit = limit
        self.name = name
        self.used = 0
        self._lock = threading.Lock()

    def charge(self, units: int = 1):
        """
        Record work units, raising BudgetExceeded once the limit is passed

        Parameters:
        - units: Number of units to charge
        """
        with self._lock:
            self.used += units
            if self.limit is not None and self.used > self.limit:
                logging.info(f"Budget hit: {self.name} used {self.used} of {self.limit}")
                raise BudgetExceeded(self.used, self.limit, self.name)

    def __repr__(self):
        return f"WorkBudget(name={self.name!r}, used={self.used}, limit={self.limit})"
