"""Hybrid force-position controller driven only by the two joint encoders.

The outer force loop turns the normal-force error into a z-offset on the
reference path; the inner loop servoes motor angles towards ``N`` times the
inverse-kinematics solution of the shifted setpoint and emits motor
velocities.  Position and force feedback both come from the load and motor
encoders through forward kinematics and the spring model.
"""

import enum
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional, Tuple

from .errors import KinematicsError
from .kinematics import EEPosition, JointAngles, RobotGeometry, fpk, ipk
from .sea_joint import SeaJointParams, SeaJointState, load_torque
from .statics import ChainTorques, EEForce, resultant_force


class Mode(str, enum.Enum):
    POSITION_ONLY = "PositionOnly"
    FORCE_ACTIVE = "ForceActive"


@dataclass(frozen=True)
class PidGains:
    k_p: float = 0.0
    k_i: float = 0.0
    k_d: float = 0.0
    i_max: float = 1.0
    out_max: float = 1.0

    def __post_init__(self):
        for name in ("k_p", "k_i", "k_d"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")
        if not (self.i_max > 0 and self.out_max > 0):
            raise ValueError("integrator and output clamps must be positive")


class PidState(NamedTuple):
    integral: float = 0.0
    prev_error: float = 0.0
    primed: bool = False


def _clamp(x, limit):
    return min(limit, max(-limit, x))


def pid_step(gains: PidGains, state: PidState, error: float, dt: float):
    """One discrete PID update; returns ``(output, new_state)``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    integral = _clamp(state.integral + error * dt, gains.i_max)
    deriv = (error - state.prev_error) / dt if state.primed else 0.0
    out = gains.k_p * error + gains.k_i * integral + gains.k_d * deriv
    return _clamp(out, gains.out_max), PidState(integral, error, True)


def default_force_gains():
    # mm/N, mm/(N*s); the output clamp is the z-offset saturation in mm
    return PidGains(k_p=0.4, k_i=2.0, k_d=0.0, i_max=5.0, out_max=10.0)


def default_position_gains():
    # 1/s on motor-angle error; output clamp in rad/s
    return PidGains(k_p=40.0, k_i=0.0, k_d=0.0, i_max=1.0, out_max=10.0)


@dataclass(frozen=True)
class HybridControllerConfig:
    f_z_ref: float = 5.0
    f_trigger: float = 0.6
    latch: bool = True
    f_release: float = 0.3
    force_enabled: bool = True
    force_gains: PidGains = field(default_factory=default_force_gains)
    position_gains: PidGains = field(default_factory=default_position_gains)
    dt: float = 0.001

    def __post_init__(self):
        if not self.f_trigger < self.f_z_ref:
            raise ValueError(
                f"trigger threshold {self.f_trigger} must be below the reference force {self.f_z_ref}"
            )
        if not self.f_release <= self.f_trigger:
            raise ValueError("release threshold must not exceed the trigger threshold")
        if not self.dt > 0:
            raise ValueError("dt must be positive")


@dataclass(frozen=True)
class ControllerState:
    dpz: float = 0.0
    mode: Mode = Mode.POSITION_ONLY
    force_pid: PidState = PidState()
    position_pid: Tuple[PidState, PidState, PidState] = (PidState(), PidState(), PidState())
    command: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    target: Optional[JointAngles] = None


class EstimatedEEState(NamedTuple):
    position: EEPosition
    force: EEForce
    torques: ChainTorques


class HybridStep(NamedTuple):
    commands: Tuple[float, float, float]
    state: ControllerState
    setpoint: EEPosition
    unreachable: bool


def estimate_state(geom: RobotGeometry, sea: SeaJointParams, joints, prev_position=None) -> EstimatedEEState:
    """Platform position and external contact force from encoder readings.

    ``joints`` holds one :class:`SeaJointState` per chain.  The returned force
    is the load acting on the tool (the reaction of what the links transmit),
    so pressing on a surface below gives a positive z component.
    """
    theta_l = JointAngles(*(j.theta_l for j in joints))
    p = fpk(geom, theta_l, prev=prev_position)
    tau = ChainTorques(*(load_torque(sea, j) for j in joints))
    transmitted = resultant_force(geom, theta_l, p, tau)
    return EstimatedEEState(p, EEForce(-transmitted.x, -transmitted.y, -transmitted.z), tau)


def hybrid_step(cfg: HybridControllerConfig, geom: RobotGeometry, sea: SeaJointParams,
                state: ControllerState, reference, estimate: EstimatedEEState,
                motor_angles) -> HybridStep:
    """Advance the controller by one period.

    ``reference`` is a trajectory sample (``p_ref`` and optional
    ``force_ref``); ``motor_angles`` are the motor encoder readings.
    """
    f_ref = cfg.f_z_ref if getattr(reference, "force_ref", None) is None else reference.force_ref
    f_z = estimate.force.z
    mode, dpz, force_pid = state.mode, state.dpz, state.force_pid

    if cfg.force_enabled:
        if mode is Mode.POSITION_ONLY and f_z >= cfg.f_trigger:
            mode = Mode.FORCE_ACTIVE
        elif mode is Mode.FORCE_ACTIVE and not cfg.latch and f_z < cfg.f_release:
            mode, dpz, force_pid = Mode.POSITION_ONLY, 0.0, PidState()
        if mode is Mode.FORCE_ACTIVE:
            out, force_pid = pid_step(cfg.force_gains, force_pid, f_ref - f_z, cfg.dt)
            # more force wanted -> go deeper (more negative z)
            dpz = -out

    p_ref = reference.p_ref
    setpoint = EEPosition(p_ref[0], p_ref[1], p_ref[2] + dpz)
    try:
        target = ipk(geom, setpoint, prev=state.target)
    except KinematicsError:
        new_state = replace(state, mode=mode, dpz=dpz, force_pid=force_pid)
        return HybridStep(state.command, new_state, setpoint, True)

    commands = []
    pids = []
    for i in range(3):
        err = sea.N * target[i] - motor_angles[i]
        out, pid = pid_step(cfg.position_gains, state.position_pid[i], err, cfg.dt)
        commands.append(out)
        pids.append(pid)
    new_state = ControllerState(
        dpz=dpz, mode=mode, force_pid=force_pid, position_pid=tuple(pids),
        command=tuple(commands), target=target,
    )
    return HybridStep(tuple(commands), new_state, setpoint, False)


def joints_from(theta_m, theta_l):
    return tuple(SeaJointState(m, l) for m, l in zip(theta_m, theta_l))


def quantize_angle(theta: float, bits: int) -> float:
    """Round an angle to an encoder with ``2**bits`` counts per revolution."""
    if bits <= 0:
        return theta
    step = 2 * math.pi / (1 << bits)
    return round(theta / step) * step
