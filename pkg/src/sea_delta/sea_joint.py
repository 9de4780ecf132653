"""Series-elastic transmission: motor -> torsion spring -> belt reduction -> link.

The spring sits between the motor shaft and the belt, so its output side
turns ``N`` times faster than the link.  Torques are in N*mm.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

# k_s = 1 N*m/rad, expressed in the internal N*mm/rad
DEFAULT_SPRING_STIFFNESS = 1000.0


@dataclass(frozen=True)
class SeaJointParams:
    k_s: float = DEFAULT_SPRING_STIFFNESS
    N: float = 2.0
    eta: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.k_s) and self.k_s > 0):
            raise ValueError(f"spring stiffness must be positive, got {self.k_s!r}")
        if not self.N >= 1:
            raise ValueError(f"reduction ratio must be >= 1, got {self.N!r}")
        if not 0 < self.eta <= 1:
            raise ValueError(f"efficiency must lie in (0, 1], got {self.eta!r}")

    @property
    def k_s_Nm(self) -> float:
        """Spring stiffness in N*m/rad."""
        return self.k_s / 1000.0

    @property
    def gain(self) -> float:
        """Load torque per radian of spring deflection."""
        return self.k_s * self.N * self.eta

    @property
    def load_stiffness(self) -> float:
        """Stiffness felt at the link with the motor held still (N*mm/rad)."""
        return self.gain * self.N


class SeaJointState(NamedTuple):
    theta_m: float
    theta_l: float


def spring_deflection(params: SeaJointParams, state: SeaJointState) -> float:
    return state.theta_m - params.N * state.theta_l


def load_torque(params: SeaJointParams, state: SeaJointState) -> float:
    return params.gain * (state.theta_m - params.N * state.theta_l)


def motor_angle_for_torque(params: SeaJointParams, theta_l: float, tau_l: float) -> float:
    """Motor angle that makes the spring deliver ``tau_l`` at link angle ``theta_l``."""
    return params.N * theta_l + tau_l / params.gain
