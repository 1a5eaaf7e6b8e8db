"""Exception hierarchy shared by every qnetsim module."""


class QNetSimError(Exception):
    """Base class for all errors raised by qnetsim."""


class SizeError(QNetSimError, ValueError):
    """A requested system or ensemble is larger than allowed."""


class ShapeError(QNetSimError, ValueError):
    """An operator does not match the dimension of the state it acts on."""


class NumericalError(QNetSimError, ArithmeticError):
    """The state is numerically corrupt (e.g. vanishing outcome probabilities)."""


class CrossSystemError(QNetSimError, ValueError):
    """Qubits passed to one gate live in different quantum systems."""


class ConfigurationError(QNetSimError, ValueError):
    """Invalid network wiring or run configuration."""


class RoutingError(QNetSimError, LookupError):
    """No channel exists between an agent and the requested peer."""


class BrokenLinkError(QNetSimError):
    """A peer terminated while the receiving side still waits on an empty conduit."""


class HolderViolation(QNetSimError):
    """An agent tried to send a qubit it does not currently hold."""


class UsageError(QNetSimError):
    """An API was called in a way its contract forbids (e.g. publishing twice)."""


class SimulationError(QNetSimError):
    """An agent program failed; ``agent`` names the failing agent."""

    def __init__(self, agent, cause):
        self.agent = agent
        self.cause = cause
        super().__init__(f"agent {agent!r} failed: {type(cause).__name__}: {cause}")


class DeadlockError(SimulationError):
    """Every live agent stayed blocked on a receive past the watchdog timeout."""

    def __init__(self, blocked):
        self.blocked = dict(blocked)
        self.agent = None
        self.cause = None
        detail = ", ".join(f"{a} <- {ep}" for a, ep in sorted(self.blocked.items()))
        QNetSimError.__init__(self, f"deadlock detected; blocked endpoints: {detail}")
