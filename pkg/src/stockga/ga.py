"""Uniform-crossover genetic algorithm over historical inventory patterns.

A chromosome is a product id plus one signed stock deviation per chain member.
Its fitness is ``ln(1 - N_rep / N_t)`` where ``N_rep`` is the number of
validated records exactly equal to it and ``N_t`` the number of validated
records, so the most frequent pattern has the lowest fitness. The engine
minimises fitness.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .data import Dataset, DatasetError, InventoryRecord, count_occurrences

NEG_INF = float("-inf")
DEFAULT_SEED = 20100101

BUDGET_EXHAUSTED = "budget-exhausted"
STABILIZED = "stabilized"

RECORD_SEEDED = "record-seeded"
POOL_SAMPLED = "pool-sampled"
UNIFORM_BOUNDS = "uniform-bounds"

_BOUNDS_RE = re.compile(r"^uniform-bounds\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)$")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GenerationPolicy:
    """How fresh chromosomes (and mutated genes) are drawn.

    ``record-seeded`` copies a validated record, ``pool-sampled`` builds one
    gene at a time from the values seen for that product and member, and
    ``uniform-bounds`` draws nonzero integers in ``[lower, upper]``. Mutation
    draws from the per-product pools unless the policy is ``uniform-bounds``.
    """

    kind: str = RECORD_SEEDED
    lower: int | None = None
    upper: int | None = None

    def __post_init__(self):
        if self.kind == UNIFORM_BOUNDS:
            if self.lower is None or self.upper is None:
                raise ConfigError("uniform-bounds needs lower and upper")
            if not self.lower < self.upper:
                raise ConfigError(f"uniform-bounds needs lower < upper, got ({self.lower}, {self.upper})")
        elif self.kind in (RECORD_SEEDED, POOL_SAMPLED):
            if self.lower is not None or self.upper is not None:
                raise ConfigError(f"{self.kind} takes no bounds")
        else:
            raise ConfigError(f"unknown generation policy {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "GenerationPolicy":
        text = text.strip()
        m = _BOUNDS_RE.match(text)
        if m:
            return cls(UNIFORM_BOUNDS, int(m.group(1)), int(m.group(2)))
        return cls(text)

    def __str__(self) -> str:
        if self.kind == UNIFORM_BOUNDS:
            return f"{self.kind}({self.lower}, {self.upper})"
        return self.kind


@dataclass(frozen=True)
class GaConfig:
    max_iterations: int = 200
    stabilization_window: int | None = 50
    crossover_rate: float = 0.8
    swap_probability: float = 0.5
    mutation_points: int = 4
    generation_policy: GenerationPolicy = field(default_factory=GenerationPolicy)
    population_size: int = 2
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if self.stabilization_window is not None and self.stabilization_window < 1:
            raise ConfigError("stabilization_window must be >= 1 or disabled")
        for name in ("crossover_rate", "swap_probability"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {p}")
        if self.mutation_points < 0:
            raise ConfigError("mutation_points must be >= 0")
        if self.population_size < 2:
            raise ConfigError("population_size must be >= 2")
        if not -(2**63) <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")

    def check_arity(self, n_members: int) -> None:
        if self.mutation_points > n_members:
            raise ConfigError(
                f"mutation_points={self.mutation_points} exceeds chromosome length {n_members}"
            )


@dataclass(slots=True)
class Individual:
    product_id: int
    genes: tuple[int, ...]
    occurrence: int | None = field(default=None, compare=False)
    fitness: float | None = field(default=None, compare=False)

    @classmethod
    def from_record(cls, record: InventoryRecord) -> "Individual":
        return cls(record.product_id, record.deviations)

    def as_record(self) -> InventoryRecord:
        return InventoryRecord(self.product_id, self.genes)

    def fresh_copy(self) -> "Individual":
        """Same chromosome, caches cleared."""
        return Individual(self.product_id, self.genes)


class TraceRow(NamedTuple):
    iteration: int
    best_fitness: float
    best_count: int


@dataclass(frozen=True)
class OptimizationResult:
    best: Individual
    trace: tuple[TraceRow, ...]
    evaluations: int
    stop_reason: str
    n_total: int
    mutation_skips: int = 0

    @property
    def probability(self) -> float:
        return self.best.occurrence / self.n_total


def fitness_of(occurrence: int, total: int) -> float:
    """``ln(1 - occurrence/total)``; ``-inf`` when every record matches."""
    if total < 1:
        raise ValueError("total must be >= 1")
    if not 0 <= occurrence <= total:
        raise ValueError(f"occurrence {occurrence} outside [0, {total}]")
    if occurrence == 0:
        return 0.0
    if occurrence == total:
        return NEG_INF
    return math.log1p(-occurrence / total)


def evaluate(individual: Individual, dataset: Dataset) -> float:
    """Count matches, compute fitness and cache both on ``individual``."""
    occurrence = count_occurrences(dataset, individual)
    individual.occurrence = occurrence
    individual.fitness = fitness_of(occurrence, dataset.n_total)
    return individual.fitness


def _nonzero_between(rng: random.Random, lower: int, upper: int) -> int:
    while True:
        v = rng.randint(lower, upper)
        if v != 0:
            return v


def random_individual(dataset: Dataset, policy: GenerationPolicy, rng: random.Random) -> Individual:
    if dataset.n_total == 0:
        raise DatasetError("cannot draw from an empty dataset")
    if policy.kind == RECORD_SEEDED:
        return Individual.from_record(rng.choice(dataset.records))

    product = rng.choice(dataset.products)
    if policy.kind == POOL_SAMPLED:
        genes = []
        for pos in range(dataset.n_members):
            pool = dataset.pool(product, pos)
            if not pool:
                raise DatasetError(f"empty value pool for product {product} at position {pos}")
            genes.append(rng.choice(pool))
        return Individual(product, tuple(genes))

    genes = tuple(_nonzero_between(rng, policy.lower, policy.upper) for _ in range(dataset.n_members))
    return Individual(product, genes)


def select(population: Sequence[Individual]) -> tuple[Individual, Individual]:
    """Two lowest-fitness individuals, best first; ties keep sequence order."""
    if len(population) < 2:
        raise ValueError("selection needs at least two individuals")
    if any(ind.fitness is None for ind in population):
        raise ValueError("selection needs evaluated individuals")
    ranked = sorted(population, key=lambda ind: ind.fitness)
    return ranked[0], ranked[1]


def uniform_crossover(
    parent_a: Individual,
    parent_b: Individual,
    swap_probability: float,
    rng: random.Random,
) -> tuple[Individual, Individual]:
    """Recombine two parents under a random binary mask.

    Mask bit 1 (drawn with ``swap_probability``) gives child 1 the gene of
    ``parent_a``, bit 0 the gene of ``parent_b``; child 2 uses the inverse
    mask. Each child keeps the product id of its lineage parent.
    """
    n = len(parent_a.genes)
    if len(parent_b.genes) != n:
        raise ValueError(f"parent arity mismatch: {n} vs {len(parent_b.genes)}")
    mask = [rng.random() < swap_probability for _ in range(n)]
    genes_1 = tuple(a if bit else b for bit, a, b in zip(mask, parent_a.genes, parent_b.genes))
    genes_2 = tuple(b if bit else a for bit, a, b in zip(mask, parent_a.genes, parent_b.genes))
    return Individual(parent_a.product_id, genes_1), Individual(parent_b.product_id, genes_2)


def _value_set_size(dataset: Dataset, policy: GenerationPolicy, product: int, pos: int) -> int:
    if policy.kind == UNIFORM_BOUNDS:
        size = policy.upper - policy.lower + 1
        return size - 1 if policy.lower <= 0 <= policy.upper else size
    return len(dataset.pool(product, pos))


def mutate(
    individual: Individual,
    k: int,
    dataset: Dataset,
    policy: GenerationPolicy,
    rng: random.Random,
) -> tuple[Individual, int]:
    """Redraw ``k`` distinct, randomly chosen genes.

    Returns the mutant (caches cleared) and the number of chosen positions
    left unchanged because their candidate value set has a single element.
    """
    n = len(individual.genes)
    if not 0 <= k <= n:
        raise ValueError(f"mutation points must lie in [0, {n}], got {k}")
    genes = list(individual.genes)
    skipped = 0
    for pos in rng.sample(range(n), k):
        old = genes[pos]
        if _value_set_size(dataset, policy, individual.product_id, pos) < 2:
            skipped += 1
            continue
        if policy.kind == UNIFORM_BOUNDS:
            draw = lambda: _nonzero_between(rng, policy.lower, policy.upper)  # noqa: E731
        else:
            pool = dataset.pool(individual.product_id, pos)
            draw = lambda: rng.choice(pool)  # noqa: E731
        new = draw()
        while new == old:
            new = draw()
        genes[pos] = new
    return Individual(individual.product_id, tuple(genes)), skipped


def _rank(population: list[Individual]) -> list[Individual]:
    return sorted(population, key=lambda ind: ind.fitness)


def evolve(dataset: Dataset, config: GaConfig) -> OptimizationResult:
    """Run the elitist GA until the budget is spent or the best stops improving.

    Iteration 0 evaluates ``population_size`` fresh chromosomes. Every later
    iteration injects one fresh chromosome, picks the two best, recombines
    them (or clones them when no crossover happens), mutates both children
    and keeps the ``population_size`` best of everything seen this round.
    """
    if dataset.n_total == 0:
        raise DatasetError("cannot optimise over an empty dataset")
    config.check_arity(dataset.n_members)
    rng = random.Random(config.seed)
    policy = config.generation_policy
    evaluations = 0
    skips = 0

    def evaluated(ind: Individual) -> Individual:
        nonlocal evaluations
        evaluate(ind, dataset)
        evaluations += 1
        return ind

    population = _rank(
        [evaluated(random_individual(dataset, policy, rng)) for _ in range(config.population_size)]
    )
    best = population[0]
    trace = [TraceRow(0, best.fitness, best.occurrence)]
    stop_reason = BUDGET_EXHAUSTED
    stall = 0

    for iteration in range(1, config.max_iterations):
        pool = population + [evaluated(random_individual(dataset, policy, rng))]
        parent_a, parent_b = select(pool)
        if rng.random() < config.crossover_rate:
            child_a, child_b = uniform_crossover(parent_a, parent_b, config.swap_probability, rng)
        else:
            child_a, child_b = parent_a.fresh_copy(), parent_b.fresh_copy()
        children = []
        for child in (child_a, child_b):
            mutant, skipped = mutate(child, config.mutation_points, dataset, policy, rng)
            skips += skipped
            children.append(evaluated(mutant))

        population = _rank(pool + children)[: config.population_size]
        if population[0].fitness < best.fitness:
            best = population[0]
            stall = 0
        else:
            stall += 1
        trace.append(TraceRow(iteration, best.fitness, best.occurrence))
        if config.stabilization_window is not None and stall >= config.stabilization_window:
            stop_reason = STABILIZED
            break

    return OptimizationResult(
        best=best,
        trace=tuple(trace),
        evaluations=evaluations,
        stop_reason=stop_reason,
        n_total=dataset.n_total,
        mutation_skips=skips,
    )
