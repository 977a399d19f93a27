"""User pose, locomotion, easing, and angular measurements.

Conventions: quaternions are [w, x, y, z]; the identity orientation looks
down -z ("forward"), with +x right and +y up. Locomotion never touches
orientation; view direction changes only when the client re-points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError

JUMP_DURATION_S = 3.0  # study-mode jump time, ease-in/out included
TELEPORT_DURATION_S = 2.0  # smooth overview<->detail switch outside studies
OVERVIEW_DISTANCE_FACTOR = 2.5  # camera distance in bounding-sphere radii
OVERVIEW_FALLBACK_RADIUS = 10.0  # degenerate scenes (single node)

_FORWARD = np.array([0.0, 0.0, -1.0])
_RIGHT = np.array([1.0, 0.0, 0.0])
_UP = np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True)
class NavParams:
    max_fly_speed: float  # layout units per second, scene-calibrated
    fly_acceleration: float = math.inf  # study mode: instant (pure kinematics)
    teleport_duration: float = TELEPORT_DURATION_S

    def validate(self) -> None:
        if self.max_fly_speed <= 0:
            raise ParameterError("max_fly_speed must be positive")


@dataclass(frozen=True, eq=False)
class Pose:
    position: np.ndarray
    orientation: np.ndarray = field(
        default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0])
    )
    ray_origin: np.ndarray | None = None
    ray_direction: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        q = np.asarray(self.orientation, dtype=float)
        object.__setattr__(self, "orientation", q / np.linalg.norm(q))
        if self.ray_origin is None:
            object.__setattr__(self, "ray_origin", self.position.copy())
        else:
            object.__setattr__(self, "ray_origin", np.asarray(self.ray_origin, dtype=float))
        if self.ray_direction is None:
            object.__setattr__(self, "ray_direction", quat_rotate(self.orientation, _FORWARD))
        else:
            d = np.asarray(self.ray_direction, dtype=float)
            n = np.linalg.norm(d)
            if n == 0:
                raise ParameterError("ray direction must be nonzero")
            object.__setattr__(self, "ray_direction", d / n)

    def moved_to(self, position: np.ndarray) -> "Pose":
        """Same pose translated; the controller ray rides along."""
        position = np.asarray(position, dtype=float)
        delta = position - self.position
        return replace(self, position=position, ray_origin=self.ray_origin + delta)


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    u = np.array([x, y, z])
    return v + 2.0 * np.cross(u, np.cross(u, v) + w * v)


def quat_from_matrix(m: np.ndarray) -> np.ndarray:
    # Shepperd's method, numerically safe for all branches.
    t = np.trace(m)
    if t > 0:
        s = math.sqrt(t + 1.0) * 2
        return np.array(
            [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
        )
    i = int(np.argmax(np.diag(m)))
    j, k = (i + 1) % 3, (i + 2) % 3
    s = math.sqrt(max(m[i, i] - m[j, j] - m[k, k] + 1.0, 0.0)) * 2
    q = np.zeros(4)
    q[0] = (m[k, j] - m[j, k]) / s
    q[1 + i] = 0.25 * s
    q[1 + j] = (m[j, i] + m[i, j]) / s
    q[1 + k] = (m[k, i] + m[i, k]) / s
    return q / np.linalg.norm(q)


def look_rotation(direction: np.ndarray, up: np.ndarray = _UP) -> np.ndarray:
    """Quaternion whose forward (-z) points along `direction`."""
    f = np.asarray(direction, dtype=float)
    n = np.linalg.norm(f)
    if n == 0:
        raise ParameterError("look direction must be nonzero")
    f = f / n
    if abs(float(np.dot(f, up))) > 1.0 - 1e-9:
        up = np.array([0.0, 0.0, 1.0])
    z_axis = -f
    x_axis = np.cross(up, z_axis)
    x_axis = x_axis / np.linalg.norm(x_axis)
    y_axis = np.cross(z_axis, x_axis)
    return quat_from_matrix(np.column_stack([x_axis, y_axis, z_axis]))


def view_forward(orientation: np.ndarray) -> np.ndarray:
    return quat_rotate(orientation, _FORWARD)


def view_right(orientation: np.ndarray) -> np.ndarray:
    return quat_rotate(orientation, _RIGHT)


def fly_step(pose: Pose, axes: tuple[float, float], dt: float, params: NavParams) -> Pose:
    """Advance the pose by trackpad-style planar input.

    axis_y moves along the view direction, axis_x perpendicular to it; the
    combined velocity is clamped to max_fly_speed. Linear in dt, so frame
    rate cannot change the trajectory.
    """
    if dt <= 0:
        raise ParameterError("dt must be positive")
    ax = float(np.clip(axes[0], -1.0, 1.0))
    ay = float(np.clip(axes[1], -1.0, 1.0))
    velocity = params.max_fly_speed * (
        ay * view_forward(pose.orientation) + ax * view_right(pose.orientation)
    )
    speed = float(np.linalg.norm(velocity))
    if speed > params.max_fly_speed:
        velocity *= params.max_fly_speed / speed
    return pose.moved_to(pose.position + dt * velocity)


def ease(t: float) -> float:
    """Smootherstep: zero velocity and acceleration at both endpoints."""
    t = min(max(float(t), 0.0), 1.0)
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


@dataclass(frozen=True, eq=False)
class JumpAnimation:
    """Eased translation between positions; also reused for teleports."""

    start_position: np.ndarray
    target_position: np.ndarray
    start_time: float
    duration: float
    base_pose: Pose
    target_node: int | None = None
    from_view: object | None = None  # EgoViewState before departure
    to_view: object | None = None  # EgoViewState at arrival
    kind: str = "jump"

    def progress(self, session_time: float) -> float:
        if self.duration <= 0:
            return 1.0
        return min(max((session_time - self.start_time) / self.duration, 0.0), 1.0)

    def done(self, session_time: float) -> bool:
        return session_time >= self.start_time + self.duration

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration


def start_jump(
    session_time: float,
    pose: Pose,
    target_node: int,
    target_position: np.ndarray,
    from_view: object | None = None,
    to_view: object | None = None,
    duration: float = JUMP_DURATION_S,
) -> JumpAnimation:
    return JumpAnimation(
        start_position=pose.position.copy(),
        target_position=np.asarray(target_position, dtype=float),
        start_time=session_time,
        duration=duration,
        base_pose=pose,
        target_node=target_node,
        from_view=from_view,
        to_view=to_view,
        kind="jump",
    )


def jump_sample(anim: JumpAnimation, session_time: float) -> Pose:
    """Pose along the animation; at the end time it is exactly the target."""
    t = anim.progress(session_time)
    if t >= 1.0:
        return anim.base_pose.moved_to(anim.target_position)
    if t <= 0.0:
        return anim.base_pose.moved_to(anim.start_position)
    s = ease(t)
    pos = (1.0 - s) * anim.start_position + s * anim.target_position
    return anim.base_pose.moved_to(pos)


def teleport(
    session_time: float,
    pose: Pose,
    target_pose: Pose,
    duration: float = TELEPORT_DURATION_S,
) -> JumpAnimation:
    """Smooth (or, with duration 0, instantaneous) pose translation."""
    return JumpAnimation(
        start_position=pose.position.copy(),
        target_position=target_pose.position.copy(),
        start_time=session_time,
        duration=duration,
        base_pose=pose,
        kind="teleport",
    )


def overview_pose(positions: np.ndarray, fallback_radius: float = OVERVIEW_FALLBACK_RADIUS) -> Pose:
    """External vantage point: +z of the centroid, looking back at it."""
    positions = np.asarray(positions, dtype=float)
    if positions.size == 0:
        raise ParameterError("overview_pose needs at least one position")
    centroid = positions.mean(axis=0)
    radius = float(np.linalg.norm(positions - centroid[None, :], axis=1).max())
    radius = max(radius, fallback_radius)
    position = centroid + np.array([0.0, 0.0, OVERVIEW_DISTANCE_FACTOR * radius])
    return Pose(position=position, orientation=look_rotation(centroid - position))


def angular_deviation(
    ray_origin: np.ndarray, ray_direction: np.ndarray, target_position: np.ndarray
) -> float:
    """Angle in degrees between a pointed ray and the true target direction."""
    truth = np.asarray(target_position, dtype=float) - np.asarray(ray_origin, dtype=float)
    n = float(np.linalg.norm(truth))
    if n < 1e-12:
        raise ParameterError("target coincides with the ray origin")
    d = np.asarray(ray_direction, dtype=float)
    d = d / np.linalg.norm(d)
    return math.degrees(math.acos(float(np.clip(np.dot(d, truth / n), -1.0, 1.0))))


def pick_node(
    ray_origin: np.ndarray,
    ray_direction: np.ndarray,
    positions: np.ndarray,
    node_radius: float,
) -> int | None:
    """First node sphere hit by the ray, or None."""
    o = np.asarray(ray_origin, dtype=float)
    d = np.asarray(ray_direction, dtype=float)
    d = d / np.linalg.norm(d)
    f = np.asarray(positions, dtype=float) - o[None, :]
    b = f @ d
    disc = b * b - (np.einsum("ij,ij->i", f, f) - node_radius**2)
    hit = disc >= 0.0
    if not hit.any():
        return None
    sq = np.sqrt(np.where(hit, disc, 0.0))
    t0 = b - sq
    t1 = b + sq
    # origin inside a sphere counts as an immediate hit
    t = np.where(t0 >= 0.0, t0, np.where(t1 >= 0.0, 0.0, np.inf))
    t = np.where(hit, t, np.inf)
    best = int(np.argmin(t))
    return best if np.isfinite(t[best]) else None
