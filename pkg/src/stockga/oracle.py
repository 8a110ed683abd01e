"""Exhaustive reference answers for the GA: the exact mode and fitness landscape."""

from __future__ import annotations

from dataclasses import dataclass

from .data import Dataset, DatasetError, InventoryRecord
from .ga import fitness_of


@dataclass(frozen=True)
class ModeResult:
    record: InventoryRecord
    count: int
    total: int
    fitness: float

    @property
    def probability(self) -> float:
        return self.count / self.total


def _require_records(dataset: Dataset) -> None:
    if dataset.n_total == 0:
        raise DatasetError("oracle needs a nonempty dataset")


def brute_force_mode(dataset: Dataset) -> ModeResult:
    """Most frequent record; on ties the one that appears first in the file."""
    _require_records(dataset)
    best_record, best_count = None, 0
    for record, count in dataset.freq_index.items():
        if count > best_count:
            best_record, best_count = record, count
    return ModeResult(best_record, best_count, dataset.n_total, fitness_of(best_count, dataset.n_total))


def exhaustive_fitness(dataset: Dataset) -> dict[InventoryRecord, tuple[int, float]]:
    """Count and fitness of every distinct record, in first-occurrence order."""
    _require_records(dataset)
    total = dataset.n_total
    return {rec: (c, fitness_of(c, total)) for rec, c in dataset.freq_index.items()}


def top_counts(dataset: Dataset, k: int = 10) -> list[tuple[InventoryRecord, int]]:
    _require_records(dataset)
    # sorted() is stable, so equal counts stay in first-occurrence order
    ranked = sorted(dataset.freq_index.items(), key=lambda item: -item[1])
    return ranked[:k]
