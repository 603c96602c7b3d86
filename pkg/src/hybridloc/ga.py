"""Bit-string genetic algorithm used to seed the Newton refinement.

Minimizes the squared AA/BB residual between measured and modelled RSSI with
roulette-wheel selection over windowed fitness, single-point crossover,
per-bit mutation and single-individual elitism. ``multi_start`` repeats the
whole run with independent seeds and keeps the overall best.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .measurements import ConfigurationError, MeasurementSet, ga_restart_rng
from .model import (
    PATH_LOSS_INTERCEPT,
    PATH_LOSS_OFFSET,
    PATH_LOSS_SLOPE,
    Channel,
    ModelDomainError,
    rssi_2d,
)

WINDOW_EPSILON = 0.01


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    generations: int = 200
    crossover_rate: float = 0.9
    mutation_rate: float = 0.01
    restarts: int = 100
    bounds: tuple[tuple[float, float], tuple[float, float]] = ((0.0, 100000.0), (0.0, 100000.0))
    bits_per_var: int = 24
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigurationError("population_size must be >= 2")
        if self.generations < 0:
            raise ConfigurationError("generations must be >= 0")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ConfigurationError("crossover_rate must lie in [0, 1]")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigurationError("mutation_rate must lie in [0, 1]")
        if self.restarts < 1:
            raise ConfigurationError("restarts must be >= 1")
        if not 1 <= self.bits_per_var <= 52:
            raise ConfigurationError("bits_per_var must lie in [1, 52]")
        if len(self.bounds) != 2 or any(not lo < hi for lo, hi in self.bounds):
            raise ConfigurationError(f"bounds must be two (lo, hi) pairs, got {self.bounds}")
        if not 0 <= self.rng_seed < 2**64:
            raise ConfigurationError("rng_seed must be a 64-bit unsigned integer")

    @property
    def genome_length(self) -> int:
        return 2 * self.bits_per_var


@dataclass
class Genome:
    bits: np.ndarray
    bounds: tuple[tuple[float, float], tuple[float, float]]
    bits_per_var: int

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8)
        if self.bits.shape != (2 * self.bits_per_var,):
            raise ValueError(
                f"genome needs {2 * self.bits_per_var} bits, got shape {self.bits.shape}"
            )


@dataclass
class GaResult:
    best_candidate: tuple[float, float]
    best_fitness: float
    trace: list[float] = field(default_factory=list)
    best_bits: np.ndarray | None = None
    restart_fitness: list[float] = field(default_factory=list)
    best_restart: int = 0


def _place_values(bits_per_var: int) -> np.ndarray:
    return 2.0 ** np.arange(bits_per_var - 1, -1, -1)


def decode_population(bits: np.ndarray, bounds, bits_per_var: int) -> np.ndarray:
    """Map an (N, 2*b) bit array to (N, 2) coordinates, MSB first."""
    bits = np.asarray(bits)
    weights = _place_values(bits_per_var)
    scale = 2.0**bits_per_var - 1.0
    out = np.empty((bits.shape[0], 2))
    for v, (lo, hi) in enumerate(bounds):
        ints = bits[:, v * bits_per_var : (v + 1) * bits_per_var] @ weights
        out[:, v] = lo + ints * ((hi - lo) / scale)
    # guard against round-off at the top of the range
    for v, (lo, hi) in enumerate(bounds):
        np.clip(out[:, v], lo, hi, out=out[:, v])
    return out


def decode(genome: Genome) -> tuple[float, float]:
    x, y = decode_population(genome.bits[None, :], genome.bounds, genome.bits_per_var)[0]
    return float(x), float(y)


def _phi_gains(phi: float) -> tuple[float, float]:
    return 5.0 * (math.cos(2.0 * phi) - 1.0), 5.0 * (math.cos(2.0 * (math.pi / 2 - phi)) - 1.0)


def fitness_population(
    candidates: np.ndarray, phi: float, r_aa: float, r_bb: float
) -> np.ndarray:
    """Vectorized squared AA/BB residual for (N, 2) candidates."""
    rho = np.hypot(candidates[:, 0], candidates[:, 1])
    loss = -PATH_LOSS_SLOPE * np.log10(rho + PATH_LOSS_OFFSET) + PATH_LOSS_INTERCEPT
    gain_aa, gain_bb = _phi_gains(phi)
    return (r_aa - (loss + gain_aa)) ** 2 + (r_bb - (loss + gain_bb)) ** 2


def fitness(
    candidate: tuple[float, float], phi: float, measured: MeasurementSet, rover: int
) -> float:
    """Squared residual of the AA and BB channels for the (0, rover) pair."""
    x, y = candidate
    if x == 0.0 and y == 0.0:
        raise ModelDomainError("fitness undefined at the origin")
    r_aa, r_bb = measured.pair(rover)
    return (r_aa - rssi_2d(Channel.AA, x, y, phi)) ** 2 + (
        r_bb - rssi_2d(Channel.BB, x, y, phi)
    ) ** 2


def roulette_weights(fitnesses, epsilon: float = WINDOW_EPSILON) -> np.ndarray:
    """Windowed selection weights favouring small fitness.

    s_i = (f_max - f_i) + epsilon * (f_max - f_min); uniform when all equal.
    """
    f = np.asarray(fitnesses, dtype=float)
    f_max, f_min = f.max(), f.min()
    span = f_max - f_min
    if span == 0.0 or not np.isfinite(span):
        return np.full(f.shape, 1.0 / f.size)
    s = (f_max - f) + epsilon * span
    return s / s.sum()


def _sample(weights: np.ndarray, rng: np.random.Generator, size: int) -> np.ndarray:
    cumulative = np.cumsum(weights)
    idx = np.searchsorted(cumulative, rng.random(size) * cumulative[-1], side="right")
    return np.minimum(idx, weights.size - 1)


def select_roulette(
    population, fitnesses, rng: np.random.Generator, epsilon: float = WINDOW_EPSILON
) -> int:
    if len(population) == 0:
        raise ValueError("cannot select from an empty population")
    return int(_sample(roulette_weights(fitnesses, epsilon), rng, 1)[0])


def crossover_single_point(
    parent_a: Genome,
    parent_b: Genome,
    rng: np.random.Generator,
    crossover_rate: float = 0.9,
    cut: int | None = None,
) -> tuple[Genome, Genome]:
    """Swap suffixes at a uniform cut in [1, len-1] with probability ``crossover_rate``.

    ``cut`` forces the crossover at that position (mainly for tests).
    """
    a, b = parent_a.bits, parent_b.bits
    if a.shape != b.shape:
        raise ValueError("parents must have equal length")
    if cut is None:
        if rng.random() >= crossover_rate:
            return _like(parent_a, a.copy()), _like(parent_b, b.copy())
        cut = int(rng.integers(1, a.size))
    child_a = np.concatenate([a[:cut], b[cut:]])
    child_b = np.concatenate([b[:cut], a[cut:]])
    return _like(parent_a, child_a), _like(parent_b, child_b)


def mutate(genome: Genome, mutation_rate: float, rng: np.random.Generator) -> Genome:
    if not 0.0 <= mutation_rate <= 1.0:
        raise ValueError("mutation_rate must lie in [0, 1]")
    flips = rng.random(genome.bits.size) < mutation_rate
    return _like(genome, genome.bits ^ flips.astype(np.uint8))


def _like(template: Genome, bits: np.ndarray) -> Genome:
    return Genome(bits=bits, bounds=template.bounds, bits_per_var=template.bits_per_var)


def _next_generation(
    pop: np.ndarray, fit: np.ndarray, elite: int, config: GaConfig, rng: np.random.Generator
) -> np.ndarray:
    n, length = pop.shape
    n_children = n - 1
    n_pairs = (n_children + 1) // 2
    parents = _sample(roulette_weights(fit), rng, 2 * n_pairs)
    pa, pb = pop[parents[0::2]], pop[parents[1::2]]

    do_cross = rng.random(n_pairs) < config.crossover_rate
    cuts = rng.integers(1, length, n_pairs)
    swap = (np.arange(length)[None, :] >= cuts[:, None]) & do_cross[:, None]
    children = np.concatenate([np.where(swap, pb, pa), np.where(swap, pa, pb)])[:n_children]

    flips = rng.random(children.shape) < config.mutation_rate
    children ^= flips.astype(np.uint8)
    return np.concatenate([pop[elite : elite + 1], children])


def run_ga(
    config: GaConfig,
    phi: float,
    measured: MeasurementSet | tuple[float, float],
    rover: int = 1,
    rng: np.random.Generator | None = None,
) -> GaResult:
    """One GA run; returns the best-ever individual and the per-generation best.

    ``measured`` is either a MeasurementSet (the (0, rover) pair is used) or
    an explicit (r_aa, r_bb) tuple. Without ``rng`` the generator is seeded
    from ``config.rng_seed``.
    """
    if isinstance(measured, MeasurementSet):
        r_aa, r_bb = measured.pair(rover)
    else:
        r_aa, r_bb = measured
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)

    pop = rng.integers(0, 2, size=(config.population_size, config.genome_length), dtype=np.uint8)
    trace = []
    for gen in range(config.generations + 1):
        fit = fitness_population(
            decode_population(pop, config.bounds, config.bits_per_var), phi, r_aa, r_bb
        )
        elite = int(np.argmin(fit))
        trace.append(float(fit[elite]))
        if gen == config.generations:
            break
        pop = _next_generation(pop, fit, elite, config, rng)

    # elitism keeps the best-ever individual in the final population
    best_bits = pop[elite].copy()
    x, y = decode_population(best_bits[None, :], config.bounds, config.bits_per_var)[0]
    return GaResult(
        best_candidate=(float(x), float(y)),
        best_fitness=trace[-1],
        trace=trace,
        best_bits=best_bits,
    )


def multi_start(
    config: GaConfig,
    phi: float,
    measured: MeasurementSet | tuple[float, float],
    rover: int = 1,
    restarts: int | None = None,
) -> GaResult:
    """Best of ``restarts`` independent GA runs (defaults to ``config.restarts``).

    Restart k draws from a stream derived from (rng_seed, rover, k), so any
    prefix of restarts is shared between calls with different counts. Ties go
    to the lowest restart index.
    """
    k = config.restarts if restarts is None else restarts
    if k < 1:
        raise ConfigurationError("restarts must be >= 1")
    best: GaResult | None = None
    per_restart = []
    best_index = 0
    for i in range(k):
        result = run_ga(config, phi, measured, rover, rng=ga_restart_rng(config.rng_seed, rover, i))
        per_restart.append(result.best_fitness)
        if best is None or result.best_fitness < best.best_fitness:
            best, best_index = result, i
    best.restart_fitness = per_restart
    best.best_restart = best_index
    return best
