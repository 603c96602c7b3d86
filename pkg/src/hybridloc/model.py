"""Forward RSSI model and planar geometry for the rover antennas.

Distances are fed to the path-loss term in raw millimetres. The same forward
model is used to synthesize measurements and to estimate positions, so the
unit choice cancels end to end.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

PATH_LOSS_SLOPE = 14.69
PATH_LOSS_OFFSET = 0.31
PATH_LOSS_INTERCEPT = -49.17
HORIZONTAL_GAIN_AMPLITUDE = 2.5

# antenna offsets from the rover centre in its body frame, mm (50 mm body)
ANTENNA_A_OFFSET = (-25.0, 0.0)
ANTENNA_B_OFFSET = (0.0, -25.0)


class ModelDomainError(ValueError):
    """Input outside the domain of a model formula."""


class MeasurementInconsistencyError(ValueError):
    """Measured RSSI values that no position/orientation can explain."""


class Channel(str, enum.Enum):
    AA = "AA"
    BB = "BB"
    AB = "AB"
    BA = "BA"


def _wrap_heading(heading: float) -> float:
    wrapped = (heading + math.pi) % (2.0 * math.pi) - math.pi
    # float modulo can land exactly on +pi for tiny negative inputs
    return -math.pi if wrapped >= math.pi else wrapped


@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.heading)):
            raise ModelDomainError(f"pose must be finite, got {self}")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "heading", _wrap_heading(float(self.heading)))

    @property
    def distance(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class RelativePosition3:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ModelDomainError(f"relative position must be finite, got {self}")


@dataclass(frozen=True)
class AnglePair:
    phi: float
    theta: float = 0.0


@dataclass(frozen=True)
class RssiSample:
    channel: Channel
    value: float
    rover_pair: tuple[int, int]


def _check_distance(distance: float) -> float:
    if not math.isfinite(distance) or distance < 0:
        raise ModelDomainError(f"distance must be finite and >= 0, got {distance!r}")
    return distance


def path_loss(distance: float) -> float:
    """Distance-dependent RSSI term in dBm; strictly decreasing in ``distance``."""
    _check_distance(distance)
    return -PATH_LOSS_SLOPE * math.log10(distance + PATH_LOSS_OFFSET) + PATH_LOSS_INTERCEPT


def horizontal_gain(phi: float) -> float:
    if not math.isfinite(phi):
        raise ModelDomainError(f"phi must be finite, got {phi!r}")
    return HORIZONTAL_GAIN_AMPLITUDE * (math.cos(2.0 * phi) - 1.0)


def vertical_gain(theta: float) -> float:
    """Elevation-dependent gain, evaluated verbatim from the reference formula.

    The formula carries a factor cos(5*pi/2), which is zero, so the result is
    -1 on the whole domain (up to float round-off in cos(5*pi/2)). The intended
    dipole pattern is unknown; this is kept verbatim on purpose.
    """
    if not math.isfinite(theta):
        raise ModelDomainError(f"theta must be finite, got {theta!r}")
    arg = 2.5 * math.pi - abs(theta)
    denom = math.sin(arg)
    if abs(denom) < 1e-12:
        raise ModelDomainError(f"vertical_gain undefined at theta={theta!r}")
    return 25.0 * (math.cos(2.5 * math.pi) * math.cos(arg) / denom) - 1.0


def horizontal_angle(rel: RelativePosition3) -> float:
    """Bearing of ``rel`` in the x-y plane, arctan(y/x) extended to x = 0.

    Only the right half-plane is representable by the arctan formulation, so
    x < 0 is rejected.
    """
    if rel.x == 0.0 and rel.y == 0.0:
        raise ModelDomainError("horizontal angle undefined at the origin")
    if rel.x < 0.0:
        raise ModelDomainError(f"horizontal angle needs x >= 0, got x={rel.x!r}")
    if rel.x == 0.0:
        # arctan(y/0) limit; -pi/2 is excluded from the angle range
        if rel.y < 0.0:
            raise ModelDomainError("bearing -pi/2 is outside the representable range")
        return math.pi / 2
    return math.atan2(rel.y, rel.x)


def elevation_angle(rel: RelativePosition3) -> float:
    planar = math.hypot(rel.x, rel.y)
    if planar == 0.0:
        raise ModelDomainError("elevation angle undefined when x = y = 0")
    return math.atan(rel.z / planar)


def _rotate(x: float, y: float, angle: float) -> tuple[float, float]:
    c, s = math.cos(angle), math.sin(angle)
    return c * x - s * y, s * x + c * y


def relative_position(
    origin_pose: Pose2D,
    target_pose: Pose2D,
    antenna_offset_origin: tuple[float, float] = (0.0, 0.0),
    antenna_offset_target: tuple[float, float] = (0.0, 0.0),
) -> RelativePosition3:
    """Position of the target antenna in the origin antenna's body frame.

    Antennas are assumed to share their rover's orientation, so the frame
    rotation is the inverse of the origin rover's heading.
    """
    ox, oy = _rotate(*antenna_offset_origin, origin_pose.heading)
    tx, ty = _rotate(*antenna_offset_target, target_pose.heading)
    dx = (target_pose.x + tx) - (origin_pose.x + ox)
    dy = (target_pose.y + ty) - (origin_pose.y + oy)
    bx, by = _rotate(dx, dy, -origin_pose.heading)
    return RelativePosition3(bx, by, 0.0)


def rssi_2d(channel: Channel, x: float, y: float, phi: float) -> float:
    """Planar RSSI between like antennas of two equally oriented rovers.

    The AA channel sees the bearing ``phi`` at both ends and the BB channel
    sees its complement, hence the doubled gain amplitude.
    """
    if x == 0.0 and y == 0.0:
        raise ModelDomainError("rssi_2d undefined at the origin")
    channel = Channel(channel)
    loss = path_loss(math.hypot(x, y))
    if channel is Channel.AA:
        return loss + 5.0 * (math.cos(2.0 * phi) - 1.0)
    if channel is Channel.BB:
        return loss + 5.0 * (math.cos(2.0 * (math.pi / 2 - phi)) - 1.0)
    raise ModelDomainError(f"rssi_2d supports AA and BB only, got {channel.value}")


def rssi_3d(rel: RelativePosition3, angles_fwd: AnglePair, angles_rev: AnglePair) -> float:
    if rel.x == 0.0 and rel.y == 0.0 and rel.z == 0.0:
        raise ModelDomainError("rssi_3d undefined for coincident antennas")
    distance = math.sqrt(rel.x * rel.x + rel.y * rel.y + rel.z * rel.z)
    return (
        path_loss(distance)
        + horizontal_gain(angles_fwd.phi)
        + horizontal_gain(angles_rev.phi)
        + vertical_gain(angles_fwd.theta)
        + vertical_gain(angles_rev.theta)
    )


def recover_phi(r_aa: float, r_bb: float, tol_clamp: float = 1e-6) -> float:
    """Bearing in [0, pi/2] from the AA/BB difference, r_aa - r_bb = 10 cos 2phi."""
    diff = r_aa - r_bb
    if not math.isfinite(diff):
        raise MeasurementInconsistencyError(f"non-finite RSSI pair ({r_aa!r}, {r_bb!r})")
    if abs(diff) > 10.0 + tol_clamp:
        raise MeasurementInconsistencyError(
            f"|r_aa - r_bb| = {abs(diff):.6g} dBm exceeds the model bound of 10 dBm"
        )
    return 0.5 * math.acos(min(1.0, max(-1.0, diff / 10.0)))
