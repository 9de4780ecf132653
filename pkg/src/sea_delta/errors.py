"""Exception hierarchy shared by the kinematic, static and simulation layers."""


class SeaDeltaError(Exception):
    """Base class for all package errors."""


class KinematicsError(SeaDeltaError):
    pass


class Unreachable(KinematicsError):
    """A pose lies outside the reach of at least one chain."""

    def __init__(self, chain, message=None):
        self.chain = chain
        super().__init__(message or f"pose unreachable by chain {chain}")


class DegenerateBranch(KinematicsError):
    """The half-angle quadratic collapsed and has no usable root."""

    def __init__(self, chain):
        self.chain = chain
        super().__init__(f"degenerate half-angle equation on chain {chain}")


class NoIntersection(KinematicsError):
    """The three distal-link spheres have no common point."""


class SingularConfiguration(KinematicsError):
    """The virtual sphere centres are collinear."""


class StaticsError(SeaDeltaError):
    pass


class StaticSingularity(StaticsError):
    def __init__(self, chain=None, message=None):
        self.chain = chain
        if message is None:
            message = (
                f"zero moment arm on chain {chain}" if chain is not None
                else "static force map is rank deficient"
            )
        super().__init__(message)


class ZeroLengthVector(StaticsError):
    pass


class EquilibriumNotConverged(SeaDeltaError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"equilibrium solve stopped after {iterations} iterations "
            f"(residual {residual:.3e} N*mm)"
        )


class ConfigError(SeaDeltaError):
    """Invalid scenario configuration; ``key`` is the dotted key path."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class SimulationError(SeaDeltaError):
    def __init__(self, tick, cause):
        self.tick = tick
        self.cause = cause
        super().__init__(f"tick {tick}: {cause}")
