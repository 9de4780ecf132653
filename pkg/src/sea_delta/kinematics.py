"""Closed-form position kinematics of the three-chain translational manipulator.

Frame {B} sits at the centre of the fixed base with z pointing up, so the
moving platform hangs at negative z.  Chain ``i`` (1-based) is placed at
angle ``phi_i = -pi/2 + 2*pi*(i-1)/3`` about z.  An actuated angle of zero
points the proximal link radially outward; positive angles swing it down.

Units are millimetres and radians throughout.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional

from . import _vec as v
from .errors import DegenerateBranch, NoIntersection, SingularConfiguration, Unreachable

CHAINS = (1, 2, 3)


def chain_angle(chain: int) -> float:
    """Placement angle of a chain's base joint about z."""
    return -math.pi / 2 + 2 * math.pi * (chain - 1) / 3


def wrap_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    w = math.remainder(theta, 2 * math.pi)
    if w <= -math.pi:
        w += 2 * math.pi
    return w


class EEPosition(NamedTuple):
    x: float
    y: float
    z: float


class JointAngles(NamedTuple):
    theta1: float
    theta2: float
    theta3: float


class IkChainCoefficients(NamedTuple):
    """Coefficients of ``E cos(theta) + F sin(theta) + G = 0`` for one chain."""

    E: float
    F: float
    G: float

    @property
    def discriminant(self) -> float:
        return self.E * self.E + self.F * self.F - self.G * self.G


class IkSolutionPair(NamedTuple):
    first: float
    second: float


@dataclass(frozen=True)
class RobotGeometry:
    """Base radius ``a``, platform radius ``b``, proximal ``l_a`` and distal ``l_b`` lengths (mm)."""

    a: float = 100.0
    b: float = 50.0
    l_a: float = 80.0
    l_b: float = 160.0

    def __post_init__(self):
        for name in ("a", "b", "l_a", "l_b"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite length, got {value!r}")
        if not self.a > self.b:
            raise ValueError(f"base radius a={self.a} must exceed platform radius b={self.b}")

    # offsets appearing in the distal-link vectors
    @property
    def k(self) -> float:
        return self.a - self.b

    @property
    def m(self) -> float:
        return math.sqrt(3) / 2 * (self.b - self.a)

    @property
    def n(self) -> float:
        return (self.b - self.a) / 2

    @cached_property
    def radial(self):
        """Outward unit vector of each chain in the xy-plane."""
        return tuple(
            (math.cos(chain_angle(i)), math.sin(chain_angle(i)), 0.0) for i in CHAINS
        )

    def base_joint(self, chain: int):
        """Position of base revolute joint B_i in {B}."""
        return v.scale(self.a, self.radial[chain - 1])

    def platform_joint(self, chain: int):
        """Attachment point P_i expressed in the platform frame."""
        return v.scale(self.b, self.radial[chain - 1])


def proximal_vector(geom: RobotGeometry, chain: int, theta: float):
    """Vector B_i -> A_i along the proximal link, in {B}."""
    u = geom.radial[chain - 1]
    c = geom.l_a * math.cos(theta)
    return (c * u[0], c * u[1], -geom.l_a * math.sin(theta))


def distal_vector(geom: RobotGeometry, chain: int, theta: float, p):
    """Vector A_i -> P_i along the distal link, in {B}."""
    u = geom.radial[chain - 1]
    r = geom.b - geom.a - geom.l_a * math.cos(theta)
    return (p[0] + r * u[0], p[1] + r * u[1], p[2] + geom.l_a * math.sin(theta))


def loop_residual(geom: RobotGeometry, theta, p):
    """Squared distal length minus ``l_b**2`` for each chain."""
    lb2 = geom.l_b * geom.l_b
    out = []
    for i in CHAINS:
        d = distal_vector(geom, i, theta[i - 1], p)
        out.append(v.dot(d, d) - lb2)
    return tuple(out)


def chain_coefficients(geom: RobotGeometry, p, chain: int) -> IkChainCoefficients:
    u = geom.radial[chain - 1]
    off = geom.b - geom.a
    d = (p[0] + off * u[0], p[1] + off * u[1], p[2])
    E = -2.0 * geom.l_a * (d[0] * u[0] + d[1] * u[1])
    F = 2.0 * geom.l_a * p[2]
    G = v.dot(d, d) + geom.l_a * geom.l_a - geom.l_b * geom.l_b
    return IkChainCoefficients(E, F, G)


def _half_angle_roots(coef: IkChainCoefficients, chain: int) -> IkSolutionPair:
    E, F, G = coef
    disc = coef.discriminant
    if disc < 0:
        raise Unreachable(chain)
    s = math.sqrt(disc)
    lead = G - E
    if lead == 0.0 and F == 0.0:
        raise DegenerateBranch(chain)
    # t = (-F +/- s) / (G - E) = (G + E) / (-F -/+ s); pick the form without
    # cancellation for each root and let atan2 absorb a vanishing denominator.
    roots = []
    for sign in (1.0, -1.0):
        num = -F + sign * s
        if abs(num) >= abs(F):
            theta = 2.0 * math.atan2(num, lead)
        else:
            theta = 2.0 * math.atan2(G + E, -F - sign * s)
        roots.append(wrap_angle(theta))
    return IkSolutionPair(*roots)


def ipk_candidates(geom: RobotGeometry, p):
    """Both half-angle roots for every chain."""
    return tuple(_half_angle_roots(chain_coefficients(geom, p, i), i) for i in CHAINS)


def select_branch(pair: IkSolutionPair, prev: Optional[float] = None) -> float:
    """Pick the outward-and-down root, breaking ties by continuity."""
    inside = [t for t in pair if -math.pi / 2 < t < math.pi / 2]
    pool = inside or list(pair)
    if len(pool) == 1:
        return pool[0]
    if prev is None:
        return min(pool, key=abs)
    return min(pool, key=lambda t: abs(wrap_angle(t - prev)))


def ipk(geom: RobotGeometry, p, prev=None) -> JointAngles:
    """Joint angles placing the platform origin at ``p``.

    ``prev`` is the previous solution, used only to choose between two
    admissible roots so that trajectories stay on one branch.
    """
    pairs = ipk_candidates(geom, p)
    return JointAngles(*(
        select_branch(pair, None if prev is None else prev[i]) for i, pair in enumerate(pairs)
    ))


def virtual_sphere_centers(geom: RobotGeometry, theta):
    """Elbow points A_i shifted by -P_i so all three spheres pass through the platform origin."""
    out = []
    for i in CHAINS:
        u = geom.radial[i - 1]
        r = geom.a - geom.b + geom.l_a * math.cos(theta[i - 1])
        out.append((r * u[0], r * u[1], -geom.l_a * math.sin(theta[i - 1])))
    return tuple(out)


def fpk(geom: RobotGeometry, theta, prev=None) -> EEPosition:
    """Platform position from the actuated angles by three-sphere intersection.

    Subtracting the third sphere from the first two gives two planes; two
    coordinates are eliminated as affine functions of the third and the
    result substituted back into the third sphere.  The free coordinate is
    the one the planes' intersection line varies fastest along, so the
    elimination never divides by a vanishing pivot unless the centres are
    collinear.
    """
    c1, c2, c3 = virtual_sphere_centers(geom, theta)
    n1 = v.sub(c1, c3)
    n2 = v.sub(c2, c3)
    h1 = 0.5 * (v.dot(c1, c1) - v.dot(c3, c3))
    h2 = 0.5 * (v.dot(c2, c2) - v.dot(c3, c3))
    w = v.cross(n1, n2)
    scale = v.norm(n1) * v.norm(n2)
    if scale == 0.0 or v.norm(w) <= 1e-12 * scale:
        raise SingularConfiguration("virtual sphere centres are collinear")

    k = max(range(3), key=lambda j: abs(w[j]))
    i, j = [idx for idx in range(3) if idx != k]
    # [n1_i n1_j; n2_i n2_j] [q_i; q_j] = [h1 - n1_k s; h2 - n2_k s]
    det = n1[i] * n2[j] - n1[j] * n2[i]
    qi0 = (h1 * n2[j] - h2 * n1[j]) / det
    qi1 = (-n1[k] * n2[j] + n2[k] * n1[j]) / det
    qj0 = (n1[i] * h2 - n2[i] * h1) / det
    qj1 = (-n1[i] * n2[k] + n2[i] * n1[k]) / det

    # substitute q_i = qi0 + qi1 s, q_j = qj0 + qj1 s into sphere 3
    di = qi0 - c3[i]
    dj = qj0 - c3[j]
    A = 1.0 + qi1 * qi1 + qj1 * qj1
    B = 2.0 * (di * qi1 + dj * qj1 - c3[k])
    C = di * di + dj * dj + c3[k] * c3[k] - geom.l_b * geom.l_b
    disc = B * B - 4.0 * A * C
    if disc < 0:
        raise NoIntersection(f"distal spheres do not intersect (discriminant {disc:.3e})")
    root = math.sqrt(disc)
    q = -0.5 * (B + math.copysign(root, B))
    s_values = (q / A, C / q) if q != 0.0 else (0.0, 0.0)

    points = []
    for s in s_values:
        pt = [0.0, 0.0, 0.0]
        pt[k] = s
        pt[i] = qi0 + qi1 * s
        pt[j] = qj0 + qj1 * s
        points.append(EEPosition(*pt))
    return _select_assembly(points, prev)


def _select_assembly(points, prev):
    below = [pt for pt in points if pt.z < 0]
    if not below:
        raise NoIntersection("no intersection below the base plane")
    if len(below) == 1:
        return below[0]
    if prev is None:
        return min(below, key=lambda pt: pt.z)
    return min(below, key=lambda pt: v.norm(v.sub(pt, prev)))


def is_reachable(geom: RobotGeometry, p) -> bool:
    """True when every chain reaches ``p`` with its proximal link outward, |theta| < pi/2."""
    try:
        theta = ipk(geom, p)
    except (Unreachable, DegenerateBranch):
        return False
    return all(abs(t) < math.pi / 2 for t in theta)
