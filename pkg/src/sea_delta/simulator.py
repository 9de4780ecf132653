"""Fixed-step quasi-static plant and closed-loop scenario runner.

Motors are ideal rate-limited velocity sources.  After each motor update
the load angles are found by a damped Newton iteration that balances the
spring torques against the joint torques needed to hold off the contact
force.  The unknowns are the three load angles; the platform pose follows
from forward kinematics.  Inertia is neglected.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from . import _vec as v
from .contact import ElasticPlane, contact_force, scale_reading
from .control import (ControllerState, HybridControllerConfig, Mode, estimate_state,
                      hybrid_step, joints_from, quantize_angle)
from .errors import EquilibriumNotConverged, KinematicsError, SeaDeltaError, SimulationError, StaticsError
from .kinematics import EEPosition, JointAngles, RobotGeometry, fpk, ipk
from .sea_joint import SeaJointParams
from .statics import ChainTorques, EEForce, torques_for_force
from .trajectories import Phase, TrajectorySample


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.001
    theta_dot_max: float = 10.0
    tolerance: float = 1e-6
    max_iterations: int = 50
    seed: int = 0
    # encoder counts per revolution = 2**encoder_bits; 0 disables quantisation
    encoder_bits: int = 0
    # constant tool weight in N acting along -z
    ee_weight: float = 0.0
    # run past the last setpoint, holding it, until this time
    t_end: Optional[float] = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.theta_dot_max > 0:
            raise ValueError("theta_dot_max must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.encoder_bits < 0:
            raise ValueError("encoder_bits must be non-negative")
        if not self.ee_weight >= 0:
            raise ValueError("ee_weight must be non-negative")


class PlantState(NamedTuple):
    theta_m: Tuple[float, float, float]
    theta_l: JointAngles
    p: EEPosition
    f_contact: EEForce
    t: float
    residual: float = 0.0


class TraceRecord(NamedTuple):
    t: float
    p_ref: EEPosition
    dpz: float
    p: EEPosition
    f_est: EEForce
    f_true: EEForce
    theta_m: Tuple[float, float, float]
    theta_l: JointAngles
    tau: ChainTorques
    mode: Mode
    phase: Phase
    force_ref: float
    residual: float
    flags: Tuple[str, ...] = ()


TRACE_COLUMNS = (
    "t_s", "pref_x_mm", "pref_y_mm", "pref_z_mm", "dpz_mm",
    "p_x_mm", "p_y_mm", "p_z_mm",
    "fest_x_N", "fest_y_N", "fest_z_N", "ftrue_x_N", "ftrue_y_N", "ftrue_z_N",
    "thm_1_rad", "thm_2_rad", "thm_3_rad", "thl_1_rad", "thl_2_rad", "thl_3_rad",
    "tau_1_Nm", "tau_2_Nm", "tau_3_Nm", "mode",
)


class Plant:
    """Equilibrium solver bound to one robot, transmission and surface."""

    def __init__(self, geom: RobotGeometry, sea: SeaJointParams, plane: ElasticPlane,
                 cfg: SimConfig = SimConfig()):
        self.geom = geom
        self.sea = sea
        self.plane = plane
        self.cfg = cfg

    def external_force(self, p, p_prev, dt):
        vel = ((p[0] - p_prev[0]) / dt, (p[1] - p_prev[1]) / dt)
        fc = contact_force(self.plane, p, vel)
        return fc, (fc.x, fc.y, fc.z - self.cfg.ee_weight)

    def residual(self, theta_m, theta_l, p_prev, dt):
        """Spring torque minus the torque the external load demands, per joint."""
        p = fpk(self.geom, theta_l, prev=p_prev)
        fc, f_ext = self.external_force(p, p_prev, dt)
        # the links must transmit the negative of the external load
        need = torques_for_force(self.geom, theta_l, p, v.scale(-1.0, f_ext))
        gain, n = self.sea.gain, self.sea.N
        r = tuple(gain * (theta_m[i] - n * theta_l[i]) - need[i] for i in range(3))
        return r, p, fc

    def _try(self, theta_m, theta_l, p_prev, dt):
        try:
            return self.residual(theta_m, theta_l, p_prev, dt)
        except (KinematicsError, StaticsError):
            return None

    def solve(self, theta_m, guess, p_prev, dt):
        """Load angles in equilibrium with motor angles ``theta_m``.

        Returns ``(theta_l, p, f_contact, residual_norm)``.
        """
        n = self.sea.N
        free = JointAngles(*(tm / n for tm in theta_m))
        if self.cfg.ee_weight == 0.0:
            hit = self._try(theta_m, free, p_prev, dt)
            if hit is not None and hit[1].z >= self.plane.z_s:
                return free, hit[1], hit[2], max(map(abs, hit[0]))

        tol = self.cfg.tolerance
        x = JointAngles(*guess)
        cur = self._try(theta_m, x, p_prev, dt)
        if cur is None:
            x = free
            cur = self._try(theta_m, x, p_prev, dt)
            if cur is None:
                raise EquilibriumNotConverged(0, math.inf)
        # converge on the max-norm, but backtrack on the 2-norm: the Newton
        # direction is only guaranteed to descend the latter
        rnorm = max(map(abs, cur[0]))
        merit = v.dot(cur[0], cur[0])
        h = 1e-9
        for it in range(self.cfg.max_iterations):
            if rnorm < tol:
                return x, cur[1], cur[2], rnorm
            cols = []
            for j in range(3):
                xp = list(x)
                xp[j] += h
                probe = self._try(theta_m, xp, p_prev, dt)
                if probe is None:
                    raise EquilibriumNotConverged(it, rnorm)
                cols.append(tuple((probe[0][i] - cur[0][i]) / h for i in range(3)))
            step, _ = v.solve_columns(cols, v.scale(-1.0, cur[0]))
            if step is None:
                raise EquilibriumNotConverged(it, rnorm)
            alpha = 1.0
            while alpha > 1e-6:
                trial_x = JointAngles(*(x[i] + alpha * step[i] for i in range(3)))
                trial = self._try(theta_m, trial_x, p_prev, dt)
                if trial is not None:
                    tmerit = v.dot(trial[0], trial[0])
                    if tmerit < (1.0 - 1e-4 * alpha) * merit:
                        x, cur, merit = trial_x, trial, tmerit
                        rnorm = max(map(abs, cur[0]))
                        break
                alpha *= 0.5
            else:
                raise EquilibriumNotConverged(it, rnorm)
        if rnorm < tol:
            return x, cur[1], cur[2], rnorm
        raise EquilibriumNotConverged(self.cfg.max_iterations, rnorm)

    def initial_state(self, p0, t=0.0) -> PlantState:
        """Plant resting at ``p0`` with relaxed springs, then settled against any contact."""
        theta_l = ipk(self.geom, p0)
        theta_m = tuple(self.sea.N * t_ for t_ in theta_l)
        state = PlantState(theta_m, theta_l, EEPosition(*p0), EEForce(0.0, 0.0, 0.0), t)
        return self.step(state, (0.0, 0.0, 0.0), self.cfg.dt, advance_time=False)

    def step(self, state: PlantState, commands, dt, advance_time=True, previous=None) -> PlantState:
        """Advance the motors by one period and re-solve the equilibrium.

        ``previous`` is the state one tick earlier; when given, the Newton
        guess extrapolates the load angles linearly from the last two ticks.
        """
        lim = self.cfg.theta_dot_max
        theta_m = tuple(
            state.theta_m[i] + min(lim, max(-lim, commands[i])) * dt for i in range(3)
        )
        guess = state.theta_l
        if previous is not None:
            guess = tuple(2.0 * a - b for a, b in zip(state.theta_l, previous.theta_l))
        theta_l, p, fc, res = self.solve(theta_m, guess, state.p, dt)
        return PlantState(theta_m, theta_l, p, fc, state.t + (dt if advance_time else 0.0), res)


def plant_step(geom, sea, plane, state, commands, dt, cfg: SimConfig = SimConfig()) -> PlantState:
    return Plant(geom, sea, plane, cfg).step(state, commands, dt)


@dataclass(frozen=True)
class Scenario:
    samples: Sequence[TrajectorySample]
    geometry: RobotGeometry = field(default_factory=RobotGeometry)
    sea: SeaJointParams = field(default_factory=SeaJointParams)
    plane: ElasticPlane = field(default_factory=ElasticPlane)
    controller: HybridControllerConfig = field(default_factory=HybridControllerConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    name: str = "scenario"

    @property
    def mode_name(self) -> str:
        return "hybrid" if self.controller.force_enabled else "position"


class ScenarioResult(NamedTuple):
    trace: List[TraceRecord]
    metrics: Dict[str, object]


def _reference_stream(samples, dt, t_end):
    for s in samples:
        yield s
    if t_end is None:
        return
    last = samples[-1]
    k = len(samples)
    while k * dt <= t_end + 1e-9:
        yield last._replace(t=k * dt)
        k += 1


def run_scenario(scn: Scenario) -> ScenarioResult:
    """Close the loop trajectory -> controller -> plant at a fixed step."""
    if not scn.samples:
        raise SimulationError(0, "empty trajectory")
    dt = scn.sim.dt
    ctrl_cfg = scn.controller
    if ctrl_cfg.dt != dt:
        raise SimulationError(0, f"controller period {ctrl_cfg.dt} differs from simulation step {dt}")
    plant = Plant(scn.geometry, scn.sea, scn.plane, scn.sim)
    bits = scn.sim.encoder_bits
    try:
        state = plant.initial_state(scn.samples[0].p_ref)
    except SeaDeltaError as exc:
        raise SimulationError(0, exc) from exc

    ctrl = ControllerState(target=state.theta_l)
    est_prev = state.p
    before = None
    trace: List[TraceRecord] = []
    for tick, ref in enumerate(_reference_stream(scn.samples, dt, scn.sim.t_end)):
        flags = []
        meas_m = tuple(quantize_angle(a, bits) for a in state.theta_m)
        meas_l = tuple(quantize_angle(a, bits) for a in state.theta_l)
        try:
            est = estimate_state(scn.geometry, scn.sea, joints_from(meas_m, meas_l), prev_position=est_prev)
        except SeaDeltaError as exc:
            raise SimulationError(tick, exc) from exc
        est_prev = est.position
        out = hybrid_step(ctrl_cfg, scn.geometry, scn.sea, ctrl, ref, est, meas_m)
        ctrl = out.state
        if out.unreachable:
            flags.append("unreachable")
        tau = ChainTorques(*(scn.sea.gain * (state.theta_m[i] - scn.sea.N * state.theta_l[i]) for i in range(3)))
        f_true = state.f_contact
        if scn.plane.resolution > 0:
            f_true = f_true._replace(z=scale_reading(scn.plane, f_true.z))
        f_ref = ctrl_cfg.f_z_ref if ref.force_ref is None else ref.force_ref
        trace.append(TraceRecord(
            tick * dt, ref.p_ref, ctrl.dpz, state.p, est.force, f_true,
            state.theta_m, state.theta_l, tau, ctrl.mode, ref.phase, f_ref, state.residual,
        ))
        try:
            nxt = plant.step(state, out.commands, dt, previous=before)
        except EquilibriumNotConverged:
            flags.append("not_converged")
            nxt = state._replace(t=state.t + dt)
        except SeaDeltaError as exc:
            raise SimulationError(tick, exc) from exc
        if flags:
            trace[-1] = trace[-1]._replace(flags=tuple(flags))
        before, state = state, nxt
    return ScenarioResult(trace, summarize(trace, scn))


def summarize(trace: Sequence[TraceRecord], scn: Scenario) -> Dict[str, object]:
    dt = scn.sim.dt
    m: Dict[str, object] = {
        "scenario": scn.name,
        "mode": scn.mode_name,
        "dt_s": dt,
        "ticks": len(trace),
        "duration_s": trace[-1].t if trace else 0.0,
        "f_z_ref_N": scn.controller.f_z_ref,
        "seed": scn.sim.seed,
    }
    trigger = next((k for k, r in enumerate(trace) if r.mode is Mode.FORCE_ACTIVE), None)
    if trigger is not None:
        m["trigger_tick"] = trigger
        m["trigger_time_s"] = trace[trigger].t
        m["trigger_force_N"] = trace[trigger].f_est.z

    execute = [k for k, r in enumerate(trace) if r.phase is Phase.EXECUTE]
    settle = None
    if execute:
        first = trigger if trigger is not None else execute[0]
        last = execute[-1]
        band = 0.05
        bad = [k for k in range(first, last + 1)
               if abs(trace[k].f_true.z - trace[k].force_ref) > band * abs(trace[k].force_ref)]
        settle = first if not bad else bad[-1] + 1
        if settle > last:
            settle = None
        if settle is not None:
            m["settle_tick"] = settle
            m["settle_time_s"] = trace[settle].t
        window = [k for k in execute if settle is None or k >= settle]
        m["steady_force_error_N"] = _mean(abs(trace[k].f_true.z - trace[k].force_ref) for k in window)
        m["steady_force_mean_N"] = _mean(trace[k].f_true.z for k in window)
        if trigger is not None and trigger <= last:
            errs = [(trace[k].f_true.z - trace[k].force_ref) ** 2 for k in range(trigger, last + 1)]
            m["force_rmse_after_trigger_N"] = math.sqrt(_mean(errs))
    m["position_rmse_xy_mm"] = math.sqrt(_mean(
        (r.p.x - r.p_ref.x) ** 2 + (r.p.y - r.p_ref.y) ** 2 for r in trace))
    m["max_abs_dpz_mm"] = max((abs(r.dpz) for r in trace), default=0.0)
    m["max_equilibrium_residual_Nmm"] = max((r.residual for r in trace), default=0.0)
    m["unconverged_ticks"] = sum("not_converged" in r.flags for r in trace)
    m["unreachable_ticks"] = sum("unreachable" in r.flags for r in trace)
    return m


def _mean(values):
    values = list(values)
    return sum(values) / len(values) if values else float("nan")


def trace_rows(trace: Sequence[TraceRecord]):
    """CSV rows in :data:`TRACE_COLUMNS` order, torques converted to N*m."""
    for r in trace:
        yield [
            repr(r.t), *map(repr, r.p_ref), repr(r.dpz), *map(repr, r.p),
            *map(repr, r.f_est), *map(repr, r.f_true),
            *map(repr, r.theta_m), *map(repr, r.theta_l),
            *(repr(t / 1000.0) for t in r.tau), r.mode.value,
        ]
