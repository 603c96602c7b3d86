"""Containers for measured RSSI samples and seed derivation for random streams."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import Channel, RssiSample

# first spawn-key element separates independent stream families
_GA_STREAM = 0
_NOISE_STREAM = 1


class ConfigurationError(ValueError):
    """Invalid scenario, configuration or measurement layout."""


def ga_restart_rng(seed: int, rover: int, restart: int) -> np.random.Generator:
    """Generator for one GA restart, independent of execution order."""
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(_GA_STREAM, rover, restart))
    )


def noise_rng(seed: int, rover: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(_NOISE_STREAM, rover))
    )


@dataclass
class MeasurementSet:
    samples: list[RssiSample] = field(default_factory=list)
    noise_sigma: float = 0.0

    def __post_init__(self):
        seen = set()
        for s in self.samples:
            key = (tuple(s.rover_pair), Channel(s.channel))
            if key in seen:
                raise ConfigurationError(
                    f"duplicate {key[1].value} sample for rover pair {key[0]}"
                )
            if not math.isfinite(s.value):
                raise ConfigurationError(f"non-finite RSSI sample {s}")
            seen.add(key)

    def value(self, rover_pair: tuple[int, int], channel: Channel) -> float:
        channel = Channel(channel)
        for s in self.samples:
            if tuple(s.rover_pair) == tuple(rover_pair) and Channel(s.channel) is channel:
                return s.value
        raise ConfigurationError(
            f"no {channel.value} measurement for rover pair {tuple(rover_pair)}"
        )

    def pair(self, rover: int, origin: int = 0) -> tuple[float, float]:
        """(AA, BB) measurements between the origin rover and ``rover``."""
        return (
            self.value((origin, rover), Channel.AA),
            self.value((origin, rover), Channel.BB),
        )

    def to_dict(self) -> dict:
        return {
            "noise_sigma": self.noise_sigma,
            "samples": [
                {
                    "rover_pair": list(s.rover_pair),
                    "channel": Channel(s.channel).value,
                    "value": s.value,
                }
                for s in self.samples
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> MeasurementSet:
        try:
            samples = [
                RssiSample(
                    channel=Channel(item["channel"]),
                    value=float(item["value"]),
                    rover_pair=(int(item["rover_pair"][0]), int(item["rover_pair"][1])),
                )
                for item in data["samples"]
            ]
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ConfigurationError(f"malformed measurement set: {exc}") from exc
        return cls(samples=samples, noise_sigma=float(data.get("noise_sigma", 0.0)))
