"""Historical inventory records: parsing, validation and exact-match indexing.

A dataset file is comma separated text with a header ``PI,<member1>,...``
followed by one record per line. Each member field holds the signed stock
deviation of that product at that chain member (positive = excess units,
negative = shortage units). Rows with an empty, missing or zero member field
are dropped during validation; anything that is present but is not an integer
is an error.
"""

from __future__ import annotations

import csv
import io
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, TextIO

log = logging.getLogger(__name__)

PRODUCT_COLUMN = "PI"


class DatasetError(ValueError):
    """Raised for malformed dataset files or invalid dataset queries."""


@dataclass(frozen=True, slots=True)
class InventoryRecord:
    product_id: int
    deviations: tuple[int, ...]

    @property
    def arity(self) -> int:
        return len(self.deviations)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable collection of validated records with its lookup tables.

    Build one with :func:`parse_dataset` or :meth:`Dataset.from_records`;
    the indexes are derived, never passed in.
    """

    members: tuple[str, ...]
    records: tuple[InventoryRecord, ...]
    freq_index: Mapping[InventoryRecord, int]
    rejected_count: int = 0
    rejected_lines: tuple[int, ...] = ()
    _pools: Mapping[tuple[int, int], tuple[int, ...]] = field(default_factory=dict, repr=False)
    _products: tuple[int, ...] = field(default=(), repr=False)

    @classmethod
    def from_records(
        cls,
        members: Sequence[str],
        records: Iterable[InventoryRecord],
        rejected_lines: Sequence[int] = (),
    ) -> "Dataset":
        members = tuple(members)
        if not members:
            raise DatasetError("a dataset needs at least one chain member")
        if len(set(members)) != len(members):
            raise DatasetError(f"duplicate member names in {list(members)}")
        records = tuple(records)
        n = len(members)

        # dict keeps first-occurrence order, which the mode tie-break relies on
        freq: dict[InventoryRecord, int] = {}
        by_product: dict[int, list[tuple[int, ...]]] = defaultdict(list)
        for rec in records:
            if rec.arity != n:
                raise DatasetError(
                    f"record {rec} has {rec.arity} deviations, expected {n}"
                )
            if rec.product_id <= 0:
                raise DatasetError(f"product id must be positive, got {rec.product_id}")
            if any(v == 0 for v in rec.deviations):
                raise DatasetError(f"record {rec} contains a zero deviation")
            freq[rec] = freq.get(rec, 0) + 1
            by_product[rec.product_id].append(rec.deviations)

        pools: dict[tuple[int, int], tuple[int, ...]] = {}
        for pid, rows in by_product.items():
            for pos, column in enumerate(zip(*rows)):
                pools[(pid, pos)] = tuple(sorted(set(column)))

        return cls(
            members=members,
            records=records,
            freq_index=MappingProxyType(freq),
            rejected_count=len(rejected_lines),
            rejected_lines=tuple(rejected_lines),
            _pools=MappingProxyType(pools),
            _products=tuple(sorted(by_product)),
        )

    @property
    def n_members(self) -> int:
        return len(self.members)

    @property
    def n_total(self) -> int:
        return len(self.records)

    @property
    def pools(self) -> Mapping[tuple[int, int], tuple[int, ...]]:
        """Observed values keyed by ``(product_id, position)``, each sorted."""
        return self._pools

    @property
    def products(self) -> tuple[int, ...]:
        """Distinct product ids present, ascending."""
        return self._products

    def pool(self, product_id: int, position: int) -> tuple[int, ...]:
        """Sorted observed values at ``(product_id, position)``; empty if unseen."""
        if not 0 <= position < self.n_members:
            raise DatasetError(
                f"position {position} out of range for {self.n_members} members"
            )
        return self._pools.get((product_id, position), ())

    def __eq__(self, other: object) -> bool:
        # rejection bookkeeping is diagnostic only and does not survive a round trip
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.members == other.members and self.records == other.records

    __hash__ = None  # type: ignore[assignment]


def _parse_int(token: str, line: int, column: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise DatasetError(
            f"line {line}, column {column}: {token!r} is not an integer"
        ) from None


def parse_dataset(
    source: TextIO | str,
    expected_members: Sequence[str] | None = None,
) -> Dataset:
    """Parse and validate a dataset from a text stream (or a string).

    Rejected rows are reported through the module logger with their 1-based
    line number in the file (the header is line 1).

    Raises:
        DatasetError: on a malformed header, a non-integer token, a
            non-positive product id, an over-long row, or when no valid
            records remain.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)

    header = next(reader, None)
    if header is None:
        raise DatasetError("empty input: missing header row")
    header = [h.strip() for h in header]
    if header[0] != PRODUCT_COLUMN:
        raise DatasetError(
            f"malformed header: first column must be {PRODUCT_COLUMN!r}, got {header[0]!r}"
        )
    members = tuple(header[1:])
    if not members or any(not m for m in members):
        raise DatasetError(f"malformed header: empty or missing member names in {header}")
    if len(set(members)) != len(members):
        raise DatasetError(f"malformed header: duplicate member names in {header}")
    if expected_members is not None and tuple(expected_members) != members:
        raise DatasetError(
            f"header members {list(members)} do not match expected {list(expected_members)}"
        )

    n = len(members)
    records: list[InventoryRecord] = []
    rejected: list[int] = []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue  # blank line
        if len(row) > n + 1:
            raise DatasetError(f"line {line}: {len(row)} fields, header has {n + 1}")
        fields = [c.strip() for c in row] + [""] * (n + 1 - len(row))

        reason = None
        if not fields[0]:
            reason = f"empty {PRODUCT_COLUMN}"
        else:
            pid = _parse_int(fields[0], line, PRODUCT_COLUMN)
            if pid <= 0:
                raise DatasetError(f"line {line}: product id must be positive, got {pid}")
        values = []
        for name, token in zip(members, fields[1:]):
            if not token:
                reason = reason or f"empty field {name}"
                continue
            value = _parse_int(token, line, name)
            if value == 0:
                reason = reason or f"zero field {name}"
            values.append(value)

        if reason is not None:
            log.warning("line %d: rejected (%s)", line, reason)
            rejected.append(line)
            continue
        records.append(InventoryRecord(pid, tuple(values)))

    if not records:
        raise DatasetError(f"no valid records ({len(rejected)} rejected)")
    return Dataset.from_records(members, records, rejected_lines=rejected)


def load_dataset(path, expected_members: Sequence[str] | None = None) -> Dataset:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_dataset(fh, expected_members)


def format_dataset(dataset: Dataset) -> str:
    """Render the valid records back into the tabular file format."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow((PRODUCT_COLUMN, *dataset.members))
    for rec in dataset.records:
        writer.writerow((rec.product_id, *rec.deviations))
    return buf.getvalue()


def count_occurrences(dataset: Dataset, candidate) -> int:
    """Number of validated records exactly equal to ``candidate``.

    ``candidate`` is anything with ``product_id`` and either ``genes`` or
    ``deviations``.
    """
    genes = candidate.genes if hasattr(candidate, "genes") else candidate.deviations
    genes = tuple(genes)
    if len(genes) != dataset.n_members:
        raise DatasetError(
            f"candidate has {len(genes)} genes, dataset has {dataset.n_members} members"
        )
    return dataset.freq_index.get(InventoryRecord(candidate.product_id, genes), 0)


def value_pool(dataset: Dataset, product_id: int, position: int) -> frozenset[int]:
    return frozenset(dataset.pool(product_id, position))
