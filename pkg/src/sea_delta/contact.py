"""Flat elastic surface with regularised Coulomb friction (the weighing-scale stand-in)."""

import math
from dataclasses import dataclass

from .statics import EEForce

GRAVITY = 9.80665


@dataclass(frozen=True)
class ElasticPlane:
    z_s: float = -101.0
    k_c: float = 2.0
    mu: float = 0.3
    v_eps: float = 0.5
    # scale readout step in N; 0 disables quantisation
    resolution: float = 0.0

    def __post_init__(self):
        if not self.k_c > 0:
            raise ValueError(f"contact stiffness must be positive, got {self.k_c!r}")
        if not self.mu >= 0:
            raise ValueError(f"friction coefficient must be non-negative, got {self.mu!r}")
        if not self.v_eps > 0:
            raise ValueError(f"friction regularisation velocity must be positive, got {self.v_eps!r}")
        if not self.resolution >= 0:
            raise ValueError(f"scale resolution must be non-negative, got {self.resolution!r}")


SCALE_RESOLUTION_N = 0.005 * GRAVITY


def penetration(plane: ElasticPlane, p) -> float:
    return max(0.0, plane.z_s - p[2])


def contact_force(plane: ElasticPlane, p, velocity=(0.0, 0.0)) -> EEForce:
    """Force exerted by the surface on the tool; +z pushes the tool up.

    ``velocity`` is the tangential tool velocity in mm/s (extra components
    are ignored).
    """
    d = plane.z_s - p[2]
    if d <= 0.0:
        return EEForce(0.0, 0.0, 0.0)
    normal = plane.k_c * d
    vx, vy = velocity[0], velocity[1]
    speed = math.hypot(vx, vy)
    g = plane.mu * normal / (speed + plane.v_eps)
    return EEForce(-g * vx, -g * vy, normal)


def scale_reading(plane: ElasticPlane, force: float) -> float:
    """Quantise a force the way the scale display would."""
    if plane.resolution <= 0:
        return force
    return round(force / plane.resolution) * plane.resolution
