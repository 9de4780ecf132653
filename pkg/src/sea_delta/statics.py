"""Static force mapping between joint load torques and the end-effector force.

``resultant_force`` follows the distal links: each unit vector along A_i P_i
is expressed in the chain's local frame O_i (x along the joint axis), the
link force magnitude is solved from the moment about that axis, and the
three link forces are rotated back to {B} and summed.  The result is the
force the mechanism applies through the platform, which equals
``J^T tau`` with ``J = d(theta)/d(p)``.  ``virtual_work_force`` computes the
same quantity from finite differences of the inverse kinematics and serves
as an independent check.

Forces are in N, torques in N*mm.
"""

import math
from typing import NamedTuple

from . import _vec as v
from .errors import StaticSingularity, Unreachable, ZeroLengthVector
from .kinematics import CHAINS, RobotGeometry, distal_vector, ipk, proximal_vector


class ChainTorques(NamedTuple):
    tau1: float
    tau2: float
    tau3: float


class EEForce(NamedTuple):
    x: float
    y: float
    z: float


def frame_rotations():
    """The z-rotations by +2*pi/3 and -2*pi/3 (R_B2, R_B3)."""
    return v.rot_z(2 * math.pi / 3), v.rot_z(-2 * math.pi / 3)


_R_B2, _R_B3 = frame_rotations()
_IDENTITY = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))

# O_2 is {B} turned +2pi/3 and O_3 is {B} turned -2pi/3.  Expressing a {B}
# vector in O_i applies the inverse turn, and going back applies the turn
# itself, so chain 2 maps in with R_B3 and out with R_B2 (chain 3 the reverse).
TO_LOCAL = (_IDENTITY, _R_B3, _R_B2)
TO_BASE = (_IDENTITY, _R_B2, _R_B3)

MOMENT_ARM_EPS = 1e-9


def distal_unit_vectors(geom: RobotGeometry, theta, p):
    out = []
    for i in CHAINS:
        d = distal_vector(geom, i, theta[i - 1], p)
        length = v.norm(d)
        if length < 1e-9:
            raise ZeroLengthVector(f"distal vector of chain {i} has zero length")
        out.append(v.scale(1.0 / length, d))
    return tuple(out)


def moment_arms(geom: RobotGeometry, theta, p, to_local=TO_LOCAL):
    """Per-chain joint torque produced by a unit compressive distal-link force.

    Returns ``(arms, unit_vectors)``; both the proximal link and the distal
    direction are taken into the local frame before the x-component of their
    cross product is read off.
    """
    units = distal_unit_vectors(geom, theta, p)
    arms = []
    for i in CHAINS:
        rot = to_local[i - 1]
        r = v.matvec(rot, proximal_vector(geom, i, theta[i - 1]))
        e = v.matvec(rot, units[i - 1])
        arms.append(r[1] * e[2] - r[2] * e[1])
    return tuple(arms), units


def chain_force_magnitudes(geom: RobotGeometry, theta, p, tau, to_local=TO_LOCAL):
    arms, _ = moment_arms(geom, theta, p, to_local)
    return _magnitudes(arms, tau, geom.l_a)


def _magnitudes(arms, tau, l_a):
    out = []
    for i, (arm, t) in enumerate(zip(arms, tau), start=1):
        if abs(arm) < MOMENT_ARM_EPS * l_a:
            raise StaticSingularity(i)
        out.append(t / arm)
    return tuple(out)


def resultant_force(geom: RobotGeometry, theta, p, tau, to_local=TO_LOCAL, to_base=TO_BASE) -> EEForce:
    """End-effector force transmitted by the three distal links for joint torques ``tau``.

    ``to_local``/``to_base`` select the frame convention; the defaults are the
    ones that agree with :func:`virtual_work_force`.
    """
    units = distal_unit_vectors(geom, theta, p)
    total = (0.0, 0.0, 0.0)
    for i in CHAINS:
        rot = to_local[i - 1]
        r = v.matvec(rot, proximal_vector(geom, i, theta[i - 1]))
        e = v.matvec(rot, units[i - 1])
        arm = r[1] * e[2] - r[2] * e[1]
        if abs(arm) < MOMENT_ARM_EPS * geom.l_a:
            raise StaticSingularity(i)
        f_local = v.scale(tau[i - 1] / arm, e)
        total = v.add(total, v.matvec(to_base[i - 1], f_local))
    return EEForce(*total)


def force_columns(geom: RobotGeometry, theta, p):
    """Force produced by a unit torque on each joint, as three {B} vectors."""
    arms, units = moment_arms(geom, theta, p)
    cols = []
    for i, (arm, e) in enumerate(zip(arms, units), start=1):
        if abs(arm) < MOMENT_ARM_EPS * geom.l_a:
            raise StaticSingularity(i)
        cols.append(v.scale(1.0 / arm, e))
    return tuple(cols)


def torques_for_force(geom: RobotGeometry, theta, p, force) -> ChainTorques:
    """Joint torques whose transmitted end-effector force is ``force``."""
    cols = force_columns(geom, theta, p)
    tau, det = v.solve_columns(cols, tuple(force))
    scale = v.norm(cols[0]) * v.norm(cols[1]) * v.norm(cols[2])
    if tau is None or abs(det) < 1e-10 * scale:
        raise StaticSingularity(message="static force map is rank deficient")
    return ChainTorques(*tau)


def joint_jacobian_fd(geom: RobotGeometry, p, step=1e-5):
    """d(theta_i)/d(p_j) by central differences of the inverse kinematics."""
    base = ipk(geom, p)
    rows = [[0.0] * 3 for _ in CHAINS]
    for j in range(3):
        hi = list(p)
        lo = list(p)
        hi[j] += step
        lo[j] -= step
        try:
            t_hi = ipk(geom, hi, prev=base)
            t_lo = ipk(geom, lo, prev=base)
        except Unreachable as exc:
            raise Unreachable(exc.chain, f"finite-difference probe left the workspace on chain {exc.chain}")
        for i in range(3):
            rows[i][j] = (t_hi[i] - t_lo[i]) / (2 * step)
    return rows


def virtual_work_force(geom: RobotGeometry, p, tau, step=1e-5) -> EEForce:
    """End-effector force from virtual work, ``F = (d theta / d p)^T tau``."""
    jac = joint_jacobian_fd(geom, p, step)
    return EEForce(*(sum(jac[i][j] * tau[i] for i in range(3)) for j in range(3)))
