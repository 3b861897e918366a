"""Exception types shared across the package."""


class MoaError(Exception):
    """Base class for array-algebra errors."""


class IndexBoundsError(MoaError, IndexError):
    """An index component or offset lies outside its shape."""


class ArityError(MoaError, ValueError):
    """Wrong number of index components, or a malformed permutation."""


class ShapeError(MoaError, ValueError):
    """Operand shapes do not satisfy an operation's shape rule."""


class CellShapeError(ShapeError):
    """An omega cell produced a result shape different from the first cell."""


class ConfigError(ValueError):
    """Invalid FFT configuration (size, processor count, breakpoint).

    ``requirement`` names the violated bound when one applies.
    """

    def __init__(self, message, requirement=None):
        super().__init__(message)
        self.requirement = requirement


class MapError(ValueError):
    """Local/global index relation used outside its domain."""


class StateError(RuntimeError):
    """Data residency or message protocol violated in the simulators."""


class DeadlockError(RuntimeError):
    """Every live virtual processor is blocked on a receive.

    ``blocked`` maps processor id to the sender it is waiting on.
    """

    def __init__(self, blocked):
        self.blocked = dict(blocked)
        detail = ", ".join(f"processor {p} waits on {s}" for p, s in sorted(self.blocked.items()))
        super().__init__(f"deadlock: {detail}")


class ContractViolation(RuntimeError):
    """A shared-memory worker broke the private/shared access contract."""
