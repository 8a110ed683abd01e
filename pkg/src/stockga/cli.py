"""Command-line entry point: ``stockga {optimize,oracle,gen,validate,report}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import config_to_dict, load_config
from .data import DatasetError, format_dataset, load_dataset
from .ga import DEFAULT_SEED, ConfigError, GaConfig, Individual, OptimizationResult, evolve
from .oracle import brute_force_mode, top_counts
from .report import format_fitness, recommend, render
from .synth import SynthError, generate, manifest, spec_from_dict

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CONFIG = 4
EXIT_DATA = 5

log = logging.getLogger("stockga")


class _ArgumentParser(argparse.ArgumentParser):
    def exit(self, status=0, message=None):
        if message:
            self._print_message(message, sys.stderr)
        raise SystemExit(status)


def atomic_write(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fitness_json(value: float):
    return "-inf" if math.isinf(value) else value


def trace_csv(result: OptimizationResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("iteration", "best_fitness", "best_count"))
    for row in result.trace:
        writer.writerow((row.iteration, _fitness_json(row.best_fitness), row.best_count))
    return buf.getvalue()


def result_document(result: OptimizationResult, config: GaConfig, members) -> dict:
    best = result.best
    return {
        "members": list(members),
        "n_total": result.n_total,
        "config": config_to_dict(config),
        "seed": config.seed,
        "best": {"product_id": best.product_id, "genes": list(best.genes)},
        "fitness": _fitness_json(best.fitness),
        "occurrence": best.occurrence,
        "probability": result.probability,
        "stop_reason": result.stop_reason,
        "evaluations": result.evaluations,
        "iterations": len(result.trace),
        "mutation_skips": result.mutation_skips,
    }


def _cmd_optimize(args) -> int:
    config = load_config(args.config) if args.config else GaConfig()
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    dataset = load_dataset(args.data)
    result = evolve(dataset, config)

    best = result.best
    print(f"Records: {dataset.n_total} valid, {dataset.rejected_count} rejected")
    print(
        f"Stopped: {result.stop_reason} after {len(result.trace)} iterations, "
        f"{result.evaluations} chromosomes evaluated (seed {config.seed})"
    )
    print(render(recommend(best, dataset.members), dataset.n_total), end="")

    if args.trace:
        atomic_write(args.trace, trace_csv(result))
    if args.result:
        doc = result_document(result, config, dataset.members)
        atomic_write(args.result, json.dumps(doc, indent=2) + "\n")
    return 0


def _cmd_oracle(args) -> int:
    dataset = load_dataset(args.data)
    mode = brute_force_mode(dataset)
    rec = mode.record
    print(f"Mode record: product {rec.product_id}; genes {' '.join(map(str, rec.deviations))}")
    print(
        f"Count: {mode.count} of {mode.total} (probability {mode.probability:.12g}); "
        f"fitness {format_fitness(mode.fitness)}"
    )
    print("Top counts:")
    for record, count in top_counts(dataset, 10):
        print(f"  {count:>6}  product {record.product_id}; {' '.join(map(str, record.deviations))}")
    return 0


def _cmd_gen(args) -> int:
    with open(args.spec, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SynthError(f"spec file is not valid JSON: {exc}") from None
    if args.seed is not None:
        raw["seed"] = args.seed
    spec = spec_from_dict(raw)
    dataset = generate(spec)
    atomic_write(args.out, format_dataset(dataset))
    manifest_path = args.manifest or f"{args.out}.manifest.json"
    atomic_write(manifest_path, manifest(spec))
    print(f"Wrote {dataset.n_total} records to {args.out} (manifest {manifest_path})")
    return 0


def _cmd_validate(args) -> int:
    dataset = load_dataset(args.data)
    print(f"Members ({dataset.n_members}): {', '.join(dataset.members)}")
    print(f"Products: {', '.join(map(str, dataset.products))}")
    print(f"N_t = {dataset.n_total}")
    print(f"Rejected = {dataset.rejected_count}")
    if dataset.rejected_lines:
        print(f"Rejected lines: {', '.join(map(str, dataset.rejected_lines))}")
    print(f"Distinct records = {len(dataset.freq_index)}")
    return 0


def _cmd_report(args) -> int:
    with open(args.result, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
            best = Individual(
                int(doc["best"]["product_id"]),
                tuple(int(g) for g in doc["best"]["genes"]),
                occurrence=doc.get("occurrence"),
                fitness=float(doc["fitness"]) if "fitness" in doc else None,
            )
            members = doc["members"]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DatasetError(f"malformed result file: {exc}") from None
    print(render(recommend(best, members), doc.get("n_total")), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="stockga", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress rejected-row diagnostics")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("optimize", help="run the GA on a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--config", help="key = value GA config file")
    p.add_argument("--seed", type=int, help=f"overrides the config seed (default {DEFAULT_SEED})")
    p.add_argument("--trace", help="write iteration,best_fitness,best_count CSV here")
    p.add_argument("--result", help="write a JSON result document here")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("oracle", help="exact mode record by exhaustive count")
    p.add_argument("--data", required=True)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gen", help="generate a synthetic dataset from a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--manifest", help="manifest path (default <out>.manifest.json)")
    p.add_argument("--seed", type=int, help="overrides the spec seed")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("validate", help="parse a dataset and summarise validation")
    p.add_argument("--data", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("report", help="re-render recommendations from a result file")
    p.add_argument("--result", required=True)
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.ERROR if args.quiet else logging.WARNING)
    log.propagate = False
    try:
        return args.func(args)
    except OSError as exc:
        print(f"stockga: cannot access file: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"stockga: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DatasetError, SynthError) as exc:
        print(f"stockga: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    finally:
        log.removeHandler(handler)
        log.propagate = True


run_cli = main

if __name__ == "__main__":
    sys.exit(main())
