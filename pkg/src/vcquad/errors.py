"""Exception hierarchy shared by the library and the CLI."""


class VcquadError(Exception):
    """Base class for every error raised by this package."""


class NotSkew(VcquadError, ValueError):
    pass


class Degenerate(VcquadError, ValueError):
    pass


class InvalidRotation(VcquadError, ValueError):
    pass


class ControlError(VcquadError):
    """A control law is undefined at the current state."""


class TargetCollision(ControlError):
    """The vehicle is closer to the target than the distance threshold."""


class InfeasibleGeometry(VcquadError):
    """A requested on-manifold configuration violates the attitude threshold."""


class SingularAttitude(ControlError):
    pass


class SingularSystem(ControlError):
    """The invariance linear system is (numerically) singular."""


class DimensionMismatch(ControlError, ValueError):
    pass


class PolicyFailure(VcquadError):
    def __init__(self, message: str, stage: int | None = None):
        super().__init__(message)
        self.stage = stage


class InfeasibleEncountered(VcquadError):
    """Raised by ``simulate`` when the trajectory leaves the feasible set.

    ``last_valid`` is the index of the last sample that passed the
    regularity test and ``samples`` holds everything recorded up to it.
    """

    def __init__(self, message: str, last_valid: int, samples: list):
        super().__init__(message)
        self.last_valid = last_valid
        self.samples = samples


class ConfigError(VcquadError, ValueError):
    pass
