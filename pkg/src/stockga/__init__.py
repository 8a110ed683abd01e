"""Find the most probable excess/shortage inventory pattern with a uniform-crossover GA."""

from .data import (
    Dataset,
    DatasetError,
    InventoryRecord,
    count_occurrences,
    format_dataset,
    load_dataset,
    parse_dataset,
    value_pool,
)
from .ga import (
    GaConfig,
    GenerationPolicy,
    Individual,
    OptimizationResult,
    evaluate,
    evolve,
    fitness_of,
    mutate,
    random_individual,
    select,
    uniform_crossover,
)
from .oracle import ModeResult, brute_force_mode, exhaustive_fitness
from .report import RecommendationReport, recommend, render
from .synth import SynthSpec, generate

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DatasetError",
    "GaConfig",
    "GenerationPolicy",
    "Individual",
    "InventoryRecord",
    "ModeResult",
    "OptimizationResult",
    "RecommendationReport",
    "SynthSpec",
    "brute_force_mode",
    "count_occurrences",
    "evaluate",
    "evolve",
    "exhaustive_fitness",
    "fitness_of",
    "format_dataset",
    "generate",
    "load_dataset",
    "mutate",
    "parse_dataset",
    "random_individual",
    "recommend",
    "render",
    "select",
    "uniform_crossover",
    "value_pool",
]
