"""Exception hierarchy shared across the package."""


class SimonBenchError(Exception):
    """Base class for all errors raised by simonbench."""


class CircuitError(SimonBenchError, ValueError):
    pass


class TopologyError(SimonBenchError, ValueError):
    pass


class RoutingError(SimonBenchError):
    pass


class SimulationError(SimonBenchError):
    pass


class NoiseModelError(SimonBenchError, ValueError):
    pass


class Gf2Error(SimonBenchError):
    pass


class RankError(Gf2Error):
    """Basis rank is not n-1, so the secret is not pinned down."""


class NoPeriodError(Gf2Error):
    """The function has no collision, so there is no period to find."""


class ExperimentError(SimonBenchError):
    pass


class ConfigError(ExperimentError, ValueError):
    pass
