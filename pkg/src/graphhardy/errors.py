"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`GraphHardyError`, so callers (and the CLI) can tell input problems
apart from bugs.
"""


class GraphHardyError(Exception):
    """Base class for all library errors."""


class InputError(GraphHardyError, ValueError):
    """Malformed or inadmissible input."""


class AsymmetricInput(InputError):
    pass


class Disconnected(InputError):
    pass


class NonpositiveWeight(InputError):
    pass


class SelfLoop(InputError):
    pass


class NonpositiveFunction(InputError):
    pass


class NonpositiveGroundState(NonpositiveFunction):
    pass


class NonpositiveInput(NonpositiveFunction):
    pass


class NonpositiveSupersolution(NonpositiveFunction):
    pass


class OrderViolation(InputError):
    """``v - u`` is not strictly positive where it was sampled."""


class InfiniteSupport(InputError):
    """A function expected to be finitely supported has no finite support."""


class DomainError(InputError):
    pass


class ConstantFunction(InputError):
    pass


class NegativeF(InputError):
    pass


class LevelSetTouchesBoundary(GraphHardyError):
    """A level set reaches the boundary layer of the truncation."""


class UnsupportedFamily(InputError):
    pass


class ZeroWeightRegion(InputError):
    pass


class NotSuperharmonic(GraphHardyError):
    """A supersolution candidate fails ``Hu >= 0`` on the verification ball."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class SolverDivergence(GraphHardyError):
    pass


class NotPositiveDefinite(GraphHardyError):
    pass


class EigSolverFailure(GraphHardyError):
    pass
