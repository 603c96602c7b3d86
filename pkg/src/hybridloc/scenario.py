"""Rover scenarios: JSON I/O, validation and noiseless/noisy RSSI synthesis."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .measurements import ConfigurationError, MeasurementSet, noise_rng
from .model import Channel, ModelDomainError, Pose2D, RelativePosition3, RssiSample, horizontal_angle, rssi_2d


@dataclass(frozen=True)
class Rover:
    id: int
    pose: Pose2D


@dataclass
class Scenario:
    name: str
    rovers: list[Rover]
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        ids = [r.id for r in self.rovers]
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        if dupes:
            raise ConfigurationError(f"duplicate rover ids: {dupes}")
        origin = self.rover(0) if 0 in ids else None
        if origin is None or origin.pose.x != 0.0 or origin.pose.y != 0.0:
            raise ConfigurationError("scenario needs rover 0 placed at the origin (0, 0)")
        if not (math.isfinite(self.noise_sigma) and self.noise_sigma >= 0):
            raise ConfigurationError(f"noise_sigma must be finite and >= 0, got {self.noise_sigma}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def rover(self, rover_id: int) -> Rover:
        for r in self.rovers:
            if r.id == rover_id:
                return r
        raise ConfigurationError(f"no rover with id {rover_id}")

    @property
    def targets(self) -> list[Rover]:
        return [r for r in self.rovers if r.id != 0]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
            "rovers": [
                {"id": r.id, "x": r.pose.x, "y": r.pose.y, "heading": r.pose.heading}
                for r in self.rovers
            ],
        }

    @classmethod
    def from_dict(cls, data: dict, source: str = "<scenario>") -> Scenario:
        if not isinstance(data, dict):
            raise ConfigurationError(f"{source}: top level must be a JSON object")
        rovers = []
        for i, item in enumerate(data.get("rovers", [])):
            try:
                pose = Pose2D(float(item["x"]), float(item["y"]), float(item.get("heading", 0.0)))
                rovers.append(Rover(id=int(item["id"]), pose=pose))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigurationError(f"{source}: rovers[{i}]: {exc!r}") from exc
        try:
            return cls(
                name=str(data.get("name", Path(source).stem)),
                rovers=rovers,
                noise_sigma=float(data.get("noise_sigma", 0.0)),
                seed=int(data.get("seed", 0)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise ConfigurationError(f"{source}: {exc}") from exc
            raise ConfigurationError(f"{source}: {exc!r}") from exc


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"{path}: cannot read scenario: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return Scenario.from_dict(data, source=str(path))


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario.to_dict(), indent=2) + "\n", encoding="utf-8")


def fig5_scenario() -> Scenario:
    """The bundled nine-rover layout (rover 0 at the origin)."""
    text = resources.files("hybridloc").joinpath("data/fig5.json").read_text(encoding="utf-8")
    return Scenario.from_dict(json.loads(text), source="fig5.json")


def true_bearing(pose: Pose2D) -> float:
    return horizontal_angle(RelativePosition3(pose.x, pose.y, 0.0))


def synthesize_measurements(scenario: Scenario) -> MeasurementSet:
    """AA/BB samples for every (0, i) pair from the planar forward model.

    Gaussian noise uses one stream per rover id, so the samples of a rover
    do not depend on which other rovers are present.
    """
    samples = []
    for rover in scenario.targets:
        pose = rover.pose
        if pose.x == 0.0 and pose.y == 0.0:
            raise ModelDomainError(f"target rover {rover.id} sits on the origin")
        phi = true_bearing(pose)
        values = [rssi_2d(ch, pose.x, pose.y, phi) for ch in (Channel.AA, Channel.BB)]
        if scenario.noise_sigma > 0:
            values = list(values + noise_rng(scenario.seed, rover.id).normal(0.0, scenario.noise_sigma, 2))
        for ch, value in zip((Channel.AA, Channel.BB), values):
            samples.append(RssiSample(channel=ch, value=float(value), rover_pair=(0, rover.id)))
    return MeasurementSet(samples=samples, noise_sigma=scenario.noise_sigma)
