"""Exception hierarchy shared by all modules.

Every error carries a short ``kind`` tag so the CLI can print a single
machine-parseable line.
"""


class SupercoherentError(Exception):
    kind = "error"


class InvalidSectorError(SupercoherentError, ValueError):
    kind = "invalid-sector"


class SectorViolationError(SupercoherentError, ValueError):
    kind = "sector-violation"


class NormalizationError(SupercoherentError, ValueError):
    kind = "normalization"


class CapacityError(SupercoherentError):
    kind = "capacity"


class ConvergenceError(SupercoherentError):
    kind = "convergence"

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class OrderingError(SupercoherentError, ValueError):
    kind = "ordering"


class ParityError(SupercoherentError, ValueError):
    kind = "parity"


class NoDegeneracyError(SupercoherentError):
    kind = "no-degeneracy"


class StructureError(SupercoherentError):
    kind = "structure"


class BracketError(SupercoherentError, ValueError):
    kind = "bracket"


class UndefinedAxisError(SupercoherentError, ValueError):
    kind = "undefined-axis"


class LeakageError(SupercoherentError):
    kind = "leakage"

    def __init__(self, message, j_inter=None):
        super().__init__(message)
        self.j_inter = j_inter


class NoEntanglementError(SupercoherentError):
    kind = "no-entanglement"


class ManifoldError(SupercoherentError):
    kind = "manifold"


class DomainError(SupercoherentError, ValueError):
    kind = "domain"
