"""Deterministic synthetic datasets with planted frequent records.

Noise rows never coincide with a planted record and, by default, are pairwise
distinct, so the planted record with the highest count is the exact mode.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Sequence

from .data import Dataset, InventoryRecord

# ten-member serial chain: one factory, three distribution centres, six agents
CHAIN_MEMBERS = ("F1", "DC1", "DC2", "DC3", "A1", "A2", "A3", "A4", "A5", "A6")


class SynthError(ValueError):
    pass


def default_members(n: int) -> tuple[str, ...]:
    if n == len(CHAIN_MEMBERS):
        return CHAIN_MEMBERS
    return tuple(f"M{i}" for i in range(1, n + 1))


@dataclass(frozen=True)
class SynthSpec:
    n_members: int
    products: tuple[int, ...]
    total_records: int
    planted: tuple[tuple[InventoryRecord, int], ...] = ()
    noise_value_range: tuple[int, int] = (-999, 999)
    seed: int = 0
    guarantee_noise_distinct: bool = True
    members: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n_members < 1:
            raise SynthError("n_members must be >= 1")
        if not self.products or any(p <= 0 for p in self.products):
            raise SynthError("products must be a nonempty list of positive ids")
        if self.total_records < 1:
            raise SynthError("total_records must be >= 1")
        lo, hi = self.noise_value_range
        if lo > hi or (lo == hi == 0):
            raise SynthError(f"noise range {self.noise_value_range} admits no nonzero value")
        if self.members is not None and len(self.members) != self.n_members:
            raise SynthError("members must have n_members names")
        seen = set()
        for record, count in self.planted:
            if record.arity != self.n_members:
                raise SynthError(f"planted record {record} has wrong arity")
            if record.product_id <= 0 or 0 in record.deviations:
                raise SynthError(f"planted record {record} must be a valid record")
            if count < 1:
                raise SynthError("planted counts must be >= 1")
            if record in seen:
                raise SynthError(f"planted record {record} listed twice")
            seen.add(record)
        if self.planted_total > self.total_records:
            raise SynthError(
                f"planted counts sum to {self.planted_total} > total_records {self.total_records}"
            )

    @property
    def planted_total(self) -> int:
        return sum(c for _, c in self.planted)

    @property
    def member_names(self) -> tuple[str, ...]:
        return self.members or default_members(self.n_members)


def _nonzero(rng: random.Random, lo: int, hi: int) -> int:
    while True:
        v = rng.randint(lo, hi)
        if v:
            return v


def _draw_record(rng: random.Random, spec: SynthSpec) -> InventoryRecord:
    lo, hi = spec.noise_value_range
    product = rng.choice(spec.products)
    return InventoryRecord(product, tuple(_nonzero(rng, lo, hi) for _ in range(spec.n_members)))


def _noise_capacity(spec: SynthSpec) -> int:
    lo, hi = spec.noise_value_range
    values = hi - lo + 1 - (1 if lo <= 0 <= hi else 0)
    capacity = len(set(spec.products)) * values**spec.n_members
    lo_hi = range(lo, hi + 1)
    in_space = sum(
        1
        for rec, _ in spec.planted
        if rec.product_id in spec.products and all(v in lo_hi for v in rec.deviations)
    )
    return capacity - in_space


def generate(spec: SynthSpec) -> Dataset:
    noise_needed = spec.total_records - spec.planted_total
    if spec.guarantee_noise_distinct and noise_needed > _noise_capacity(spec):
        raise SynthError(
            f"cannot draw {noise_needed} distinct noise rows from range {spec.noise_value_range}"
        )
    if not spec.guarantee_noise_distinct and noise_needed and _noise_capacity(spec) < 1:
        raise SynthError("every possible noise row collides with a planted record")

    rng = random.Random(spec.seed)
    planted = {rec for rec, _ in spec.planted}
    taken = set(planted)
    rows = [rec for rec, count in spec.planted for _ in range(count)]
    while len(rows) < spec.total_records:
        rec = _draw_record(rng, spec)
        if rec in taken:
            continue
        if spec.guarantee_noise_distinct:
            taken.add(rec)
        rows.append(rec)
    rng.shuffle(rows)
    return Dataset.from_records(spec.member_names, rows)


def planted_mode_spec(
    *,
    n_members: int = 10,
    products: Sequence[int] = tuple(range(1, 8)),
    total_records: int = 2000,
    mode_fraction: float = 0.05,
    seed: int = 0,
    noise_value_range: tuple[int, int] = (-999, 999),
) -> SynthSpec:
    """Spec with one randomly drawn record planted ``round(fraction * total)`` times."""
    count = round(mode_fraction * total_records)
    base = SynthSpec(n_members, tuple(products), total_records, (), noise_value_range, seed)
    record = _draw_record(random.Random(f"{seed}:planted"), base)
    return SynthSpec(
        n_members, tuple(products), total_records, ((record, count),), noise_value_range, seed
    )


def spec_from_dict(raw: dict) -> SynthSpec:
    """Build a spec from its JSON form.

    A planted entry may omit ``deviations``; it is then drawn from the seed.
    """
    raw = dict(raw)
    known = {
        "n_members", "products", "total_records", "planted", "noise_value_range",
        "seed", "guarantee_noise_distinct", "members",
    }
    unknown = set(raw) - known
    if unknown:
        raise SynthError(f"unknown spec keys: {sorted(unknown)}")
    try:
        n = int(raw["n_members"])
        products = tuple(int(p) for p in raw["products"])
        total = int(raw["total_records"])
    except KeyError as exc:
        raise SynthError(f"spec is missing {exc.args[0]!r}") from None
    lo, hi = raw.get("noise_value_range", (-999, 999))
    seed = int(raw.get("seed", 0))
    members = raw.get("members")

    draw_base = SynthSpec(n, products, total, (), (int(lo), int(hi)), seed)
    draw_rng = random.Random(f"{seed}:planted")
    planted = []
    for entry in raw.get("planted", []):
        if "deviations" in entry:
            rec = InventoryRecord(int(entry["product_id"]), tuple(int(v) for v in entry["deviations"]))
        else:
            rec = _draw_record(draw_rng, draw_base)
            if "product_id" in entry:
                rec = InventoryRecord(int(entry["product_id"]), rec.deviations)
        planted.append((rec, int(entry["count"])))

    return SynthSpec(
        n_members=n,
        products=products,
        total_records=total,
        planted=tuple(planted),
        noise_value_range=(int(lo), int(hi)),
        seed=seed,
        guarantee_noise_distinct=bool(raw.get("guarantee_noise_distinct", True)),
        members=tuple(members) if members else None,
    )


def manifest(spec: SynthSpec) -> str:
    """Sidecar JSON describing what was planted."""
    doc = {
        "seed": spec.seed,
        "members": list(spec.member_names),
        "products": list(spec.products),
        "total_records": spec.total_records,
        "noise_value_range": list(spec.noise_value_range),
        "guarantee_noise_distinct": spec.guarantee_noise_distinct,
        "planted": [
            {"product_id": rec.product_id, "deviations": list(rec.deviations), "count": count}
            for rec, count in spec.planted
        ],
    }
    return json.dumps(doc, indent=2) + "\n"
