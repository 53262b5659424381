"""Tests for linear-objective optimization over fair allocations."""

import random
from fractions import Fraction

import pytest

from fairmatch.core import FormatError, generate_instance, validate_instance
from fairmatch.fairness import check_allocation, enumerate_wsdprop1
from fairmatch.optimize import (
    MAXIMIZE,
    MINIMIZE,
    CostSpec,
    IncompleteCostSpec,
    optimize_allocation,
    parse_costs,
)


def make(kind, items, agents):
    return validate_instance(kind, items, agents)


def e1():
    return make(
        "chores",
        ["b1", "b2", "b3"],
        [
            ("a1", Fraction(1, 2), ["b1", "b2", "b3"]),
            ("a2", Fraction(1, 2), ["b1", "b2", "b3"]),
        ],
    )


def spec_from_rows(instance, rows, direction):
    values = {
        (i, item): Fraction(rows[i][j])
        for i in range(instance.n)
        for j, item in enumerate(instance.items)
    }
    return CostSpec(values=values, direction=direction)


def brute_force_best(instance, spec):
    best = None
    for allocation in enumerate_wsdprop1(instance):
        owners = allocation.owner_map()
        value = sum(
            (spec.values[(owners[item], item)] for item in instance.items),
            Fraction(0),
        )
        if best is None:
            best = value
        elif spec.direction == MAXIMIZE:
            best = max(best, value)
        else:
            best = min(best, value)
    return best


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------

def test_maximize_competence_e1():
    spec = spec_from_rows(e1(), [[1, 0, 0], [0, 1, 1]], MAXIMIZE)
    allocation, objective = optimize_allocation(e1(), spec)
    assert objective == 3
    assert allocation.bundles == (frozenset({"b1"}), frozenset({"b2", "b3"}))


def test_all_zero_costs():
    spec = spec_from_rows(e1(), [[0, 0, 0], [0, 0, 0]], MINIMIZE)
    allocation, objective = optimize_allocation(e1(), spec)
    assert objective == 0
    assert check_allocation(e1(), allocation).passes


def test_goods_transport_minimum_matches_brute_force():
    inst = make(
        "goods",
        ["b1", "b2", "b3"],
        [
            ("a1", Fraction(1, 2), ["b1", "b2", "b3"]),
            ("a2", Fraction(1, 2), ["b1", "b2", "b3"]),
        ],
    )
    spec = spec_from_rows(inst, [[0, 1, 1], [1, 0, 0]], MINIMIZE)
    allocation, objective = optimize_allocation(inst, spec)
    assert objective == brute_force_best(inst, spec)
    assert check_allocation(inst, allocation).passes


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

def test_optimum_matches_brute_force_random():
    rng = random.Random(31)
    for seed in range(40):
        kind = "chores" if seed % 2 else "goods"
        inst = generate_instance(1 + seed % 3, 1 + seed % 6, kind, seed)
        values = {
            (i, item): Fraction(rng.randint(-12, 12), rng.randint(1, 7))
            for i in range(inst.n)
            for item in inst.items
        }
        for direction in (MINIMIZE, MAXIMIZE):
            spec = CostSpec(values=values, direction=direction)
            allocation, objective = optimize_allocation(inst, spec)
            assert objective == brute_force_best(inst, spec)
            assert check_allocation(inst, allocation).passes


def test_scaling_leaves_the_optimal_set_unchanged():
    rng = random.Random(37)
    for seed in range(10):
        inst = generate_instance(2 + seed % 2, 2 + seed % 4, "chores", seed)
        values = {
            (i, item): Fraction(rng.randint(0, 9))
            for i in range(inst.n)
            for item in inst.items
        }
        factor = Fraction(rng.randint(1, 5), rng.randint(1, 5))
        spec = CostSpec(values=values, direction=MINIMIZE)
        scaled = CostSpec(
            values={k: v * factor for k, v in values.items()}, direction=MINIMIZE
        )
        _, objective = optimize_allocation(inst, spec)
        scaled_allocation, scaled_objective = optimize_allocation(inst, scaled)
        assert scaled_objective == objective * factor
        # the allocation returned under scaling is optimal for the original costs
        owners = scaled_allocation.owner_map()
        original_value = sum(
            (values[(owners[item], item)] for item in inst.items), Fraction(0)
        )
        assert original_value == objective


def test_incomplete_cost_spec_rejected():
    spec = CostSpec(values={(0, "b1"): Fraction(1)}, direction=MINIMIZE)
    with pytest.raises(IncompleteCostSpec):
        optimize_allocation(e1(), spec)


# ---------------------------------------------------------------------------
# cost files
# ---------------------------------------------------------------------------

def test_parse_costs_whitespace_and_commas():
    inst = e1()
    spec = parse_costs("1/2 0 3\n1, 2, 1/3\n", inst, MINIMIZE)
    assert spec.values[(0, "b1")] == Fraction(1, 2)
    assert spec.values[(1, "b3")] == Fraction(1, 3)
    spec = parse_costs("# comment\n1 2 3\n\n4 5 6\n", inst, MAXIMIZE)
    assert spec.values[(1, "b1")] == 4


def test_parse_costs_shape_errors():
    inst = e1()
    with pytest.raises(FormatError):
        parse_costs("1 2 3\n", inst, MINIMIZE)
    with pytest.raises(FormatError):
        parse_costs("1 2\n3 4\n", inst, MINIMIZE)
    with pytest.raises(FormatError):
        parse_costs("1 2 x\n3 4 5\n", inst, MINIMIZE)
