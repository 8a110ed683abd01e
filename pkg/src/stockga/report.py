"""Turn a best chromosome into per-member stock adjustments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .ga import Individual

DECREASE = "decrease"
INCREASE = "increase"


class Action(NamedTuple):
    member: str
    direction: str
    magnitude: int


@dataclass(frozen=True)
class RecommendationReport:
    product_id: int
    lines: tuple[Action, ...]
    source: Individual


def recommend(best: Individual, members: Sequence[str]) -> RecommendationReport:
    """An excess (positive gene) is cut back, a shortage (negative gene) topped up."""
    if len(members) != len(best.genes):
        raise ValueError(f"{len(best.genes)} genes but {len(members)} member names")
    lines = tuple(
        Action(name, DECREASE if gene > 0 else INCREASE, abs(gene))
        for name, gene in zip(members, best.genes)
        if gene != 0
    )
    return RecommendationReport(best.product_id, lines, best)


def format_fitness(value: float | None) -> str:
    if value is None:
        return "n/a"
    if math.isinf(value):
        return "-inf"
    return f"{value:.12g}"


def render(report: RecommendationReport, n_total: int | None = None) -> str:
    src = report.source
    out = [f"Best chromosome: product {report.product_id}; genes {' '.join(map(str, src.genes))}"]
    if src.fitness is not None:
        prob = ""
        if n_total and src.occurrence is not None:
            prob = f" (probability {src.occurrence}/{n_total} = {src.occurrence / n_total:.12g})"
        out.append(f"Fitness: {format_fitness(src.fitness)}; occurrence {src.occurrence}{prob}")
    out.append(f"Recommended adjustments for product {report.product_id}:")
    if not report.lines:
        out.append("  (none)")
    width = max((len(a.member) for a in report.lines), default=0)
    for action in report.lines:
        out.append(f"  {action.member:<{width}}  {action.direction} by {action.magnitude} units")
    return "\n".join(out) + "\n"
