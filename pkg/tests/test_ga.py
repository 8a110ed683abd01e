import math
import random
from decimal import Decimal, getcontext

import pytest

from stockga import ga
from stockga.data import Dataset, DatasetError, InventoryRecord
from stockga.ga import (
    BUDGET_EXHAUSTED,
    NEG_INF,
    STABILIZED,
    ConfigError,
    GaConfig,
    GenerationPolicy,
    Individual,
    evaluate,
    evolve,
    fitness_of,
    mutate,
    random_individual,
    select,
    uniform_crossover,
)
from stockga.oracle import brute_force_mode
from stockga.synth import SynthSpec, generate

P3 = Individual(3, (7000, -200, -600, -500, 450, -350, 800, -400, 700, -600))
P2 = Individual(2, (5000, 400, -800, 500, 445, 315, -820, 405, -150, 100))

RECORD_SEEDED = GenerationPolicy()
POOL_SAMPLED = GenerationPolicy("pool-sampled")


def decimal_fitness(occurrence, total):
    getcontext().prec = 50
    return float((1 - Decimal(occurrence) / Decimal(total)).ln())


def evaluated(product, genes, fitness):
    return Individual(product, genes, occurrence=None, fitness=fitness)


# -- fitness ---------------------------------------------------------------


def test_fitness_five_in_a_hundred():
    expected = decimal_fitness(5, 100)
    assert expected == pytest.approx(-0.051293294387550533, abs=1e-15)
    assert fitness_of(5, 100) == pytest.approx(expected, abs=1e-12)


def test_fitness_zero_occurrence_is_exactly_zero():
    value = fitness_of(0, 37)
    assert value == 0.0
    assert math.copysign(1.0, value) == 1.0


def test_fitness_all_records_is_negative_infinity():
    assert fitness_of(12, 12) == NEG_INF
    assert fitness_of(12, 12) < fitness_of(11, 12)
    assert fitness_of(12, 12) < -1.7976931348623157e308


@pytest.mark.parametrize("total", [1, 2, 7, 100, 2000])
def test_fitness_matches_decimal_and_decreases(total):
    values = [fitness_of(c, total) for c in range(total + 1)]
    for c, v in enumerate(values[:-1]):
        assert v == pytest.approx(decimal_fitness(c, total), rel=1e-13, abs=1e-15)
    assert all(a > b for a, b in zip(values, values[1:]))


def test_fitness_rejects_bad_counts():
    with pytest.raises(ValueError):
        fitness_of(3, 2)
    with pytest.raises(ValueError):
        fitness_of(-1, 2)
    with pytest.raises(ValueError):
        fitness_of(0, 0)


def test_evaluate_caches(sample):
    ind = Individual.from_record(sample.records[0])
    f = evaluate(ind, sample)
    assert ind.occurrence == 1
    assert ind.fitness == f == fitness_of(1, 20)

    absent = Individual(99, sample.records[0].deviations)
    assert evaluate(absent, sample) == 0.0
    assert absent.occurrence == 0


def test_evaluate_arity_mismatch(sample):
    with pytest.raises(DatasetError):
        evaluate(Individual(1, (1, 2)), sample)


# -- generation ------------------------------------------------------------


def test_record_seeded_single_record():
    rec = InventoryRecord(5, (1, -2, 3))
    ds = Dataset.from_records(("a", "b", "c"), [rec])
    rng = random.Random(0)
    for _ in range(20):
        assert random_individual(ds, RECORD_SEEDED, rng).as_record() == rec


@pytest.mark.parametrize("policy", [RECORD_SEEDED, POOL_SAMPLED, GenerationPolicy("uniform-bounds", -50, 50)])
def test_generation_is_deterministic(sample, policy):
    a = [random_individual(sample, policy, random.Random(99)) for _ in range(3)]
    assert a[0] == a[1] == a[2]


def test_record_seeded_draw_frequency():
    target = InventoryRecord(1, (9, 9, 9))
    others = [InventoryRecord(2, (i, -i, i)) for i in range(1, 96)]
    ds = Dataset.from_records(("a", "b", "c"), [target] * 5 + others)
    rng = random.Random(2024)
    draws = 10_000
    hits = sum(random_individual(ds, RECORD_SEEDED, rng).as_record() == target for _ in range(draws))
    assert abs(hits / draws - 0.05) <= 0.01


def test_pool_sampled_uses_observed_values(sample):
    rng = random.Random(3)
    for _ in range(200):
        ind = random_individual(sample, POOL_SAMPLED, rng)
        assert ind.product_id in sample.products
        for pos, g in enumerate(ind.genes):
            assert g in sample.pool(ind.product_id, pos)


def test_uniform_bounds_draws_nonzero_in_range(sample):
    rng = random.Random(3)
    policy = GenerationPolicy.parse("uniform-bounds(-2, 2)")
    for _ in range(200):
        ind = random_individual(sample, policy, rng)
        assert ind.product_id in sample.products
        assert all(g in (-2, -1, 1, 2) for g in ind.genes)


def test_generation_from_empty_dataset():
    empty = Dataset.from_records(("a",), [])
    with pytest.raises(DatasetError):
        random_individual(empty, RECORD_SEEDED, random.Random(0))


def test_policy_parse_and_validation():
    assert str(GenerationPolicy.parse(" uniform-bounds( -999 ,999 )")) == "uniform-bounds(-999, 999)"
    assert GenerationPolicy.parse("pool-sampled").kind == "pool-sampled"
    with pytest.raises(ConfigError):
        GenerationPolicy.parse("uniform-bounds(5, 5)")
    with pytest.raises(ConfigError):
        GenerationPolicy.parse("roulette")
    with pytest.raises(ConfigError):
        GenerationPolicy("record-seeded", 1, 2)


# -- selection -------------------------------------------------------------


def test_select_pair():
    a, b = evaluated(1, (1,), 0.0), evaluated(2, (2,), -0.1)
    assert select([a, b]) == (b, a)


def test_select_tie_keeps_creation_order():
    z = evaluated(1, (1,), 0.0)
    a = evaluated(2, (2,), -0.05)
    b = evaluated(3, (3,), -0.05)
    first, second = select([z, a, b])
    assert first is a and second is b


def test_select_negative_infinity_first():
    pop = [evaluated(i, (i,), -0.5) for i in range(1, 5)]
    pop.insert(2, evaluated(9, (9,), NEG_INF))
    assert select(pop)[0].product_id == 9


def test_select_errors():
    with pytest.raises(ValueError):
        select([evaluated(1, (1,), 0.0)])
    with pytest.raises(ValueError):
        select([Individual(1, (1,)), Individual(2, (2,))])


# -- crossover -------------------------------------------------------------


def test_crossover_identical_parents():
    rng = random.Random(1)
    for _ in range(10):
        c1, c2 = uniform_crossover(P3, Individual(P3.product_id, P3.genes), 0.5, rng)
        assert c1 == P3 and c2 == P3


def test_crossover_degenerate_masks():
    c1, c2 = uniform_crossover(P3, P2, 0.0, random.Random(0))
    assert c1.genes == P2.genes and c2.genes == P3.genes
    assert (c1.product_id, c2.product_id) == (3, 2)
    c1, c2 = uniform_crossover(P3, P2, 1.0, random.Random(0))
    assert c1 == P3 and c2 == P2


def test_crossover_ten_gene_parents_per_position():
    before = (P3.genes, P2.genes)
    c1, c2 = uniform_crossover(P3, P2, 0.5, random.Random(42))
    for i in range(10):
        assert sorted((c1.genes[i], c2.genes[i])) == sorted((P3.genes[i], P2.genes[i]))
    assert (c1.product_id, c2.product_id) == (3, 2)
    assert (P3.genes, P2.genes) == before
    assert c1.fitness is None and c2.occurrence is None


def test_crossover_arity_mismatch():
    with pytest.raises(ValueError):
        uniform_crossover(P3, Individual(2, (1, 2)), 0.5, random.Random(0))


# -- mutation --------------------------------------------------------------


def wide_pool_dataset(n=10, rows=6):
    # every (product, position) pool gets `rows` distinct values
    recs = [InventoryRecord(1, tuple((r + 1) * (p + 1) for p in range(n))) for r in range(rows)]
    return Dataset.from_records([f"M{i}" for i in range(n)], recs)


def test_mutate_zero_points_is_identity(sample):
    ind = Individual.from_record(sample.records[0])
    evaluate(ind, sample)
    out, skipped = mutate(ind, 0, sample, RECORD_SEEDED, random.Random(0))
    assert out == ind and skipped == 0
    assert out.fitness is None and ind.fitness is not None


def test_mutate_four_points_changes_four_genes():
    ds = wide_pool_dataset()
    ind = Individual.from_record(ds.records[0])
    rng = random.Random(11)
    for _ in range(100):
        out, skipped = mutate(ind, 4, ds, RECORD_SEEDED, rng)
        diff = [i for i in range(10) if out.genes[i] != ind.genes[i]]
        assert len(diff) == 4 and skipped == 0
        assert out.product_id == ind.product_id
        for i in diff:
            assert out.genes[i] in ds.pool(1, i)


def test_mutate_singleton_pools_skip():
    rec = InventoryRecord(2, tuple(range(1, 11)))
    ds = Dataset.from_records([f"M{i}" for i in range(10)], [rec] * 3)
    ind = Individual.from_record(rec)
    out, skipped = mutate(ind, 4, ds, POOL_SAMPLED, random.Random(0))
    assert out == ind and skipped == 4


def test_mutate_uniform_bounds():
    ds = wide_pool_dataset(n=5)
    ind = Individual.from_record(ds.records[0])
    out, skipped = mutate(ind, 5, ds, GenerationPolicy("uniform-bounds", -3, 3), random.Random(4))
    assert skipped == 0
    assert all(a != b and b != 0 and -3 <= b <= 3 for a, b in zip(ind.genes, out.genes))

    out, skipped = mutate(ind, 5, ds, GenerationPolicy("uniform-bounds", 0, 1), random.Random(4))
    assert out == ind and skipped == 5


def test_mutate_rejects_too_many_points(sample):
    ind = Individual.from_record(sample.records[0])
    with pytest.raises(ValueError):
        mutate(ind, 11, sample, RECORD_SEEDED, random.Random(0))


# -- evolve ----------------------------------------------------------------


def test_evolve_identical_records():
    rec = InventoryRecord(4, (3, -1, 2))
    ds = Dataset.from_records(("a", "b", "c"), [rec] * 30)
    result = evolve(ds, GaConfig(mutation_points=2, seed=5))
    assert result.best.as_record() == rec
    assert result.best.fitness == NEG_INF
    assert result.stop_reason == STABILIZED
    assert len(result.trace) == 51


def test_evolve_all_distinct(sample):
    result = evolve(sample, GaConfig(seed=8))
    assert result.best.occurrence == 1
    assert result.best.fitness == pytest.approx(math.log(1 - 1 / 20), abs=1e-15)


def test_evolve_planted_ten_percent_matches_oracle():
    record = InventoryRecord(3, (101, -202, 303, -404, 505, -606, 707, -808, 909, -111))
    spec = SynthSpec(10, tuple(range(1, 8)), 221 + 1990, ((record, 221),), seed=42)
    ds = generate(spec)
    mode = brute_force_mode(ds)
    assert mode.record == record and mode.count == 221

    result = evolve(ds, GaConfig(seed=42))
    assert result.best.as_record() == mode.record
    assert result.best.occurrence == mode.count


def test_evolve_deterministic(sample):
    a = evolve(sample, GaConfig(seed=77, stabilization_window=None))
    b = evolve(sample, GaConfig(seed=77, stabilization_window=None))
    assert a == b
    assert a.best.fitness == b.best.fitness


def test_evolve_budget_and_bookkeeping(sample):
    cfg = GaConfig(seed=3, stabilization_window=None, population_size=4)
    result = evolve(sample, cfg)
    assert result.stop_reason == BUDGET_EXHAUSTED
    assert [row.iteration for row in result.trace] == list(range(200))
    # initial population, then one injection and two children per iteration
    assert result.evaluations == 4 + 3 * 199
    fits = [row.best_fitness for row in result.trace]
    assert all(a >= b for a, b in zip(fits, fits[1:]))
    assert result.trace[-1] == (199, result.best.fitness, result.best.occurrence)


def test_evolve_never_discards_better_candidate(monkeypatch):
    seen = []
    real = ga.evaluate

    def spy(ind, ds):
        f = real(ind, ds)
        seen.append(ind.occurrence)
        return f

    monkeypatch.setattr(ga, "evaluate", spy)
    spec = SynthSpec(
        5, (1, 2), 300,
        ((InventoryRecord(1, (1, 2, 3, 4, 5)), 9), (InventoryRecord(2, (5, 4, 3, 2, 1)), 4)),
        noise_value_range=(-3, 3), seed=1, guarantee_noise_distinct=False,
    )
    ds = generate(spec)
    for seed in range(10):
        seen.clear()
        result = evolve(ds, GaConfig(seed=seed))
        assert len(seen) == result.evaluations
        assert result.best.occurrence >= max(seen)


def test_evolve_pool_sampled_runs(sample):
    result = evolve(sample, GaConfig(seed=1, generation_policy=POOL_SAMPLED))
    assert result.best.occurrence in (0, 1)


def test_config_validation(sample):
    for bad in (
        dict(max_iterations=0),
        dict(stabilization_window=0),
        dict(crossover_rate=1.5),
        dict(swap_probability=-0.1),
        dict(mutation_points=-1),
        dict(population_size=1),
        dict(seed=2**64),
    ):
        with pytest.raises(ConfigError):
            GaConfig(**bad)
    with pytest.raises(ConfigError, match="exceeds chromosome length"):
        evolve(sample, GaConfig(mutation_points=11))
