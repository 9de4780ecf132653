"""Setpoint streams for the four massage primitives.

Every primitive is built from straight moves, holds and (for rolling) a
circle, each stretched to a whole number of control ticks so that phase
boundaries fall exactly on the sampling grid.  Only positions are emitted;
a primitive's hold force travels along as ``force_ref`` metadata for the
force loop.
"""

import bisect
import enum
import math
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Sequence

from .errors import Unreachable
from .kinematics import EEPosition, RobotGeometry, is_reachable


class Variant(str, enum.Enum):
    PRESSING = "pressing"
    TAPPING = "tapping"
    ROLLING = "rolling"
    PUSHING = "pushing"


class Phase(str, enum.Enum):
    APPROACH = "Approach"
    ENGAGE = "Engage"
    EXECUTE = "Execute"
    RETRACT = "Retract"


class TrajectorySample(NamedTuple):
    t: float
    p_ref: EEPosition
    phase: Phase
    force_ref: Optional[float] = None


@dataclass(frozen=True)
class MassagePrimitive:
    variant: Variant
    target: EEPosition
    duration: float = 5.0
    hold_force: Optional[float] = None
    approach_speed: float = 20.0
    hover_height: float = 10.0
    retract: bool = True
    # tapping
    pre_tap_height: float = 10.0
    descent_speed: float = 60.0
    tap_dwell: float = 0.1
    hover_dwell: float = 0.2
    # rolling
    circle_radius: float = 3.0
    angular_rate: float = 2 * math.pi
    # pushing; duration is the dwell at depth before the stroke
    end_point: Optional[EEPosition] = None
    push_speed: float = 5.0

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "target", EEPosition(*self.target))
        if self.end_point is not None:
            object.__setattr__(self, "end_point", EEPosition(*self.end_point))
        if not self.duration > 0:
            raise ValueError("duration must be positive")
        for name in ("approach_speed", "descent_speed", "circle_radius",
                     "angular_rate", "push_speed", "pre_tap_height"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("hover_height", "tap_dwell", "hover_dwell"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")
        if self.variant is Variant.PUSHING and self.end_point is None:
            raise ValueError("pushing needs an end_point")

    @property
    def max_speed(self) -> float:
        """Fastest commanded setpoint speed (mm/s)."""
        speeds = [self.approach_speed]
        if self.variant is Variant.TAPPING:
            speeds.append(self.descent_speed)
        elif self.variant is Variant.ROLLING:
            speeds.append(self.circle_radius * self.angular_rate)
        elif self.variant is Variant.PUSHING:
            speeds.append(self.push_speed)
        return max(speeds)


class _Segment(NamedTuple):
    phase: Phase
    n: int
    at: Callable[[int], EEPosition]


def _ticks(duration, dt):
    return max(1, math.ceil(duration / dt - 1e-9))


def _line(phase, a, b, speed, dt):
    a, b = EEPosition(*a), EEPosition(*b)
    dist = math.dist(a, b)
    if dist == 0.0:
        return []
    n = _ticks(dist / speed, dt)

    def at(k):
        if k >= n:
            return b
        f = k / n
        return EEPosition(*(p + (q - p) * f for p, q in zip(a, b)))

    return [_Segment(phase, n, at)]


def _hold(phase, point, duration, dt):
    if duration <= 0:
        return []
    point = EEPosition(*point)
    return [_Segment(phase, _ticks(duration, dt), lambda k: point)]


def _above(p, h):
    return EEPosition(p[0], p[1], p[2] + h)


def _segments(prim: MassagePrimitive, dt, start):
    h = prim.hover_height
    v = prim.approach_speed
    tgt = prim.target
    segs = []
    if prim.variant is Variant.PRESSING:
        hover = _above(tgt, h)
        segs += _line(Phase.APPROACH, start or hover, hover, v, dt)
        segs += _line(Phase.ENGAGE, hover, tgt, v, dt)
        segs += _hold(Phase.EXECUTE, tgt, prim.duration, dt)
        end = tgt
    elif prim.variant is Variant.TAPPING:
        top = _above(tgt, prim.pre_tap_height)
        segs += _line(Phase.APPROACH, start or top, top, v, dt)
        cycle = (_line(Phase.EXECUTE, top, tgt, prim.descent_speed, dt)
                 + _hold(Phase.EXECUTE, tgt, prim.tap_dwell, dt)
                 + _line(Phase.EXECUTE, tgt, top, v, dt)
                 + _hold(Phase.EXECUTE, top, prim.hover_dwell, dt))
        period = sum(s.n for s in cycle) * dt
        n_cycles = max(1, math.floor(prim.duration / period + 1e-9))
        segs += cycle * n_cycles
        h = 0.0
        end = top
    elif prim.variant is Variant.ROLLING:
        r, w = prim.circle_radius, prim.angular_rate
        rim = EEPosition(tgt.x + r, tgt.y, tgt.z)
        hover = _above(rim, h)
        segs += _line(Phase.APPROACH, start or hover, hover, v, dt)
        segs += _line(Phase.ENGAGE, hover, rim, v, dt)
        n = _ticks(prim.duration, dt)

        def circle(k):
            phi = w * k * dt
            return EEPosition(tgt.x + r * math.cos(phi), tgt.y + r * math.sin(phi), tgt.z)

        segs.append(_Segment(Phase.EXECUTE, n, circle))
        end = circle(n)
    else:
        hover = _above(tgt, h)
        segs += _line(Phase.APPROACH, start or hover, hover, v, dt)
        segs += _line(Phase.ENGAGE, hover, tgt, v, dt)
        segs += _hold(Phase.ENGAGE, tgt, prim.duration, dt)
        segs += _line(Phase.EXECUTE, tgt, prim.end_point, prim.push_speed, dt)
        end = prim.end_point
    if prim.retract and h > 0:
        segs += _line(Phase.RETRACT, end, _above(end, h), v, dt)
    return segs, end


def _sample(segments, dt, force_ref=None, t0_index=0):
    out = []
    idx = t0_index
    for seg in segments:
        for k in range(seg.n):
            out.append(TrajectorySample(idx * dt, seg.at(k), seg.phase, force_ref))
            idx += 1
    return out, idx


def generate(primitive: MassagePrimitive, dt: float, start=None,
             geom: Optional[RobotGeometry] = None) -> List[TrajectorySample]:
    """Sample one primitive at period ``dt``, optionally starting from ``start``."""
    return generate_sequence([primitive], dt, start=start, geom=geom)


def generate_sequence(primitives: Sequence[MassagePrimitive], dt: float, start=None,
                      geom: Optional[RobotGeometry] = None) -> List[TrajectorySample]:
    """Chain several primitives, moving between them at each one's approach speed."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    samples: List[TrajectorySample] = []
    idx = 0
    pos = None if start is None else EEPosition(*start)
    last = None
    for prim in primitives:
        segs, end = _segments(prim, dt, pos)
        chunk, idx = _sample(segs, dt, prim.hold_force, idx)
        samples += chunk
        last = TrajectorySample(idx * dt, segs[-1].at(segs[-1].n), segs[-1].phase, prim.hold_force)
        pos = last.p_ref
    if last is not None:
        samples.append(last)
    if geom is not None:
        check_reachable(geom, samples)
    return samples


def from_waypoints(waypoints, dt: float, geom: Optional[RobotGeometry] = None,
                   force_ref=None) -> List[TrajectorySample]:
    """Piecewise-linear interpolation through ``(t, x, y, z)`` waypoints starting at t = 0."""
    pts = [tuple(map(float, w)) for w in waypoints]
    if len(pts) < 2:
        raise ValueError("need at least two waypoints")
    if pts[0][0] != 0.0:
        raise ValueError("first waypoint must be at t = 0")
    times = [p[0] for p in pts]
    for i in range(1, len(pts)):
        if not times[i] > times[i - 1]:
            raise ValueError(f"waypoint {i} time does not increase")
    n = _ticks(times[-1], dt)
    samples = []
    for k in range(n + 1):
        t = k * dt
        j = min(bisect.bisect_right(times, t), len(pts) - 1)
        (ta, *a), (tb, *b) = pts[j - 1], pts[j]
        f = min(1.0, (t - ta) / (tb - ta))
        pos = EEPosition(*(p + (q - p) * f for p, q in zip(a, b)))
        samples.append(TrajectorySample(t, pos, Phase.EXECUTE, force_ref))
    if geom is not None:
        check_reachable(geom, samples)
    return samples


def check_reachable(geom: RobotGeometry, samples):
    for i, s in enumerate(samples):
        if not is_reachable(geom, s.p_ref):
            raise Unreachable(None, f"trajectory sample {i} (t={s.t:.3f} s) at {tuple(s.p_ref)} is outside the workspace")
