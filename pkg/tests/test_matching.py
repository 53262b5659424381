"""Tests for matching primitives against brute-force oracles."""

import itertools
import random
from fractions import Fraction

import pytest

from fairmatch.allocgraph import (
    build_allocation_graph,
    extend_allocation_graph,
    ranked_graph,
)
from fairmatch.core import generate_instance, validate_instance
from fairmatch.fairness import check_allocation, simulate_picking_sequence
from fairmatch.matching import (
    LexCost,
    Matching,
    NoPerfectMatching,
    NotDoublyStochastic,
    NotRankMaximal,
    allocation_from_matching,
    assignment_min_cost,
    bvn_decompose,
    enumerate_side_perfect_matchings,
    extract_picking_sequence,
    max_matching,
    normalize_slot_order,
    perfect_allocation,
    rank_maximal_perfect_matching,
    signature,
    solve_with_sequence,
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


def fig2_graph():
    """Four agents, four items, two ranked edges per agent."""
    edges = {
        (0, 0): 2, (0, 1): 1,
        (1, 0): 1, (1, 1): 2,
        (2, 2): 2, (2, 3): 1,
        (3, 1): 1, (3, 3): 2,
    }
    return ranked_graph(["a1", "a2", "a3", "a4"], ["b1", "b2", "b3", "b4"], edges)


def random_ranked_graph(rng, left, right, density=0.6, max_rank=None):
    max_rank = max_rank or right
    edges = {}
    for i in range(left):
        for j in range(right):
            if rng.random() < density:
                edges[(i, j)] = rng.randint(1, max_rank)
    return ranked_graph(
        [f"l{i}" for i in range(left)], [f"r{j}" for j in range(right)], edges
    )


def brute_force_max_matching_size(graph):
    # bitmask DP over used right vertices; independent of the solver
    from functools import lru_cache

    masks = [sum(1 << j for j in row) for row in graph.adjacency]
    n = graph.left_count

    @lru_cache(maxsize=None)
    def go(i, used):
        if i == n:
            return 0
        best = go(i + 1, used)
        avail = masks[i] & ~used
        while avail:
            bit = avail & -avail
            avail ^= bit
            best = max(best, 1 + go(i + 1, used | bit))
        return best

    return go(0, 0)


def all_perfect_matchings(graph):
    """Every perfect matching of a balanced graph, as row->col tuples."""
    p = graph.left_count
    adjacency = [set(row) for row in graph.adjacency]
    for perm in itertools.permutations(range(p)):
        if all(perm[i] in adjacency[i] for i in range(p)):
            yield perm


# ---------------------------------------------------------------------------
# maximum matching
# ---------------------------------------------------------------------------

def test_max_matching_e1_saturates_chores():
    graph = build_allocation_graph(e1())
    match = max_matching(graph)
    assert len(match) == 3
    assert {j for _, j in match.pairs} == {0, 1, 2}


def test_max_matching_empty_graph():
    graph = ranked_graph(["l0"], ["r0"], {})
    assert max_matching(graph).pairs == ()


def test_max_matching_complete_graph():
    edges = {(i, j): 1 for i in range(3) for j in range(3)}
    graph = ranked_graph(["x", "y", "z"], ["u", "v", "w"], edges)
    assert len(max_matching(graph)) == 3


def test_max_matching_equals_brute_force():
    rng = random.Random(5)
    for _ in range(40):
        left, right = rng.randint(0, 8), rng.randint(0, 8)
        graph = random_ranked_graph(rng, left, right, density=rng.uniform(0.2, 0.9))
        assert len(max_matching(graph)) == brute_force_max_matching_size(graph)


# ---------------------------------------------------------------------------
# exact assignment
# ---------------------------------------------------------------------------

def test_assignment_two_by_two_diagonal():
    edges = {(i, j): 1 for i in range(2) for j in range(2)}
    graph = ranked_graph(["l0", "l1"], ["r0", "r1"], edges)
    costs = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}
    match = assignment_min_cost(graph, lambda i, j: Fraction(costs[(i, j)]))
    assert match.pairs == ((0, 0), (1, 1))


def test_assignment_unit_costs_any_perfect_matching():
    rng = random.Random(1)
    graph = random_ranked_graph(rng, 4, 4, density=1.0)
    match = assignment_min_cost(graph, lambda i, j: Fraction(1))
    assert len(match) == 4


def test_assignment_matches_brute_force_min():
    rng = random.Random(7)
    for trial in range(30):
        p = rng.randint(1, 6)
        graph = random_ranked_graph(rng, p, p, density=rng.uniform(0.5, 1.0))
        if not any(graph.adjacency):
            continue
        costs = {
            (i, j): Fraction(rng.randint(-20, 20), rng.randint(1, 9))
            for i in range(p)
            for j in graph.adjacency[i]
        }
        perfect = list(all_perfect_matchings(graph))
        if not perfect:
            with pytest.raises(NoPerfectMatching):
                assignment_min_cost(graph, lambda i, j: costs[(i, j)])
            continue
        best = min(sum(costs[(i, perm[i])] for i in range(p)) for perm in perfect)
        match = assignment_min_cost(graph, lambda i, j: costs[(i, j)])
        got = sum(costs[pair] for pair in match.pairs)
        assert got == best, f"trial {trial}"


def test_assignment_maximize():
    edges = {(i, j): 1 for i in range(2) for j in range(2)}
    graph = ranked_graph(["l0", "l1"], ["r0", "r1"], edges)
    costs = {(0, 0): 5, (0, 1): 1, (1, 0): 1, (1, 1): 5}
    match = assignment_min_cost(graph, lambda i, j: Fraction(costs[(i, j)]), maximize=True)
    assert match.pairs == ((0, 0), (1, 1))


def test_assignment_e1_extended_competence():
    # cost 1 - u on real edges, 0 on dummy edges; the cheapest perfect
    # matching is the most competent fair allocation
    inst = e1()
    graph = extend_allocation_graph(build_allocation_graph(inst), inst)
    skill = {
        (0, "b1"): Fraction(1), (0, "b2"): Fraction(0), (0, "b3"): Fraction(0),
        (1, "b1"): Fraction(0), (1, "b2"): Fraction(1), (1, "b3"): Fraction(1),
    }

    def cost(i, j):
        if graph.is_dummy_item(j):
            return Fraction(0)
        return 1 - skill[(graph.slots[i].agent, graph.right_labels[j])]

    match = assignment_min_cost(graph, cost)
    allocation = allocation_from_matching(match, graph, inst)
    assert allocation.bundles == (frozenset({"b1"}), frozenset({"b2", "b3"}))


def test_assignment_lexcost_maximize_flips_the_order():
    edges = {(i, j): 1 for i in range(2) for j in range(2)}
    graph = ranked_graph(["l0", "l1"], ["r0", "r1"], edges)
    vec = {
        (0, 0): LexCost([1, 0]), (0, 1): LexCost([0, 1]),
        (1, 0): LexCost([0, 1]), (1, 1): LexCost([1, 0]),
    }
    low = assignment_min_cost(graph, lambda i, j: vec[(i, j)])
    high = assignment_min_cost(graph, lambda i, j: vec[(i, j)], maximize=True)
    assert low.pairs == ((0, 1), (1, 0))
    assert high.pairs == ((0, 0), (1, 1))


def test_assignment_lexcost_agrees_with_scalar_encoding():
    # a LexCost built from a single rank behaves like the rank-maximal cost
    rng = random.Random(9)
    for _ in range(15):
        p = rng.randint(1, 4)
        graph = random_ranked_graph(rng, p, p, density=1.0, max_rank=3)
        width = 3
        match = assignment_min_cost(
            graph,
            lambda i, j: LexCost.unit(graph.rank_of(i, j), width),
            maximize=False,
        )
        # compare against scalar positional encoding of the same order
        base = p + 1
        scalar = assignment_min_cost(
            graph,
            lambda i, j: Fraction(base ** (width - graph.rank_of(i, j))),
        )
        sig_lex = signature(match, graph)
        sig_scalar = signature(scalar, graph)
        assert sig_lex == sig_scalar


# ---------------------------------------------------------------------------
# rank-maximal perfect matchings
# ---------------------------------------------------------------------------

def test_fig2_rank_maximal_matching_and_sequence():
    graph = fig2_graph()
    match = rank_maximal_perfect_matching(graph)
    assert match.pairs == ((0, 1), (1, 0), (2, 2), (3, 3))
    assert signature(match, graph) == (2, 2)
    seq = extract_picking_sequence(match, graph)
    assert seq.sequence == (0, 1, 3, 2)
    # greedy graph-level simulation reproduces the matching
    available = set(range(graph.right_count))
    picked = {}
    for s in seq.slots:
        best = min(
            (j for j in graph.adjacency[s] if j in available),
            key=lambda j: graph.rank_of(s, j),
        )
        picked[s] = best
        available.discard(best)
    assert picked == match.left_map()


def test_unique_perfect_matching_is_returned():
    edges = {(0, 0): 2, (1, 1): 2}
    graph = ranked_graph(["l0", "l1"], ["r0", "r1"], edges)
    match = rank_maximal_perfect_matching(graph)
    assert match.pairs == ((0, 0), (1, 1))
    assert signature(match, graph) == (0, 2)


def test_rank_maximal_beats_every_perfect_matching():
    rng = random.Random(3)
    checked = 0
    for _ in range(60):
        p = rng.randint(1, 6)
        graph = random_ranked_graph(rng, p, p, density=rng.uniform(0.5, 1.0), max_rank=4)
        perfect = list(all_perfect_matchings(graph))
        if not perfect:
            with pytest.raises(NoPerfectMatching):
                rank_maximal_perfect_matching(graph)
            continue
        checked += 1
        best = rank_maximal_perfect_matching(graph)
        best_sig = signature(best, graph)
        for perm in perfect:
            other = Matching(pairs=tuple((i, perm[i]) for i in range(p)))
            assert best_sig >= signature(other, graph)
    assert checked >= 20


def test_rank_maximal_e1_extended_brute_force():
    inst = e1()
    graph = extend_allocation_graph(build_allocation_graph(inst), inst)
    match = rank_maximal_perfect_matching(graph)
    sig = signature(match, graph)
    for perm in all_perfect_matchings(graph):
        other = Matching(pairs=tuple((i, perm[i]) for i in range(4)))
        assert sig >= signature(other, graph)


def test_rank_maximal_unbalanced_saturates_left():
    # goods-style: fewer slots than items; the left side must be saturated
    rng = random.Random(11)
    for _ in range(20):
        left = rng.randint(1, 4)
        right = left + rng.randint(1, 3)
        graph = random_ranked_graph(rng, left, right, density=1.0, max_rank=right)
        match = rank_maximal_perfect_matching(graph)
        assert len(match) == left


# ---------------------------------------------------------------------------
# slot-order normalization
# ---------------------------------------------------------------------------

def test_normalize_swaps_low_rank_to_high_slot():
    inst = e1()
    graph = build_allocation_graph(inst)
    # agent 1: slot 1 holds its rank-1 chore (b3), slot 2 holds rank-2 (b2)
    match = Matching(pairs=((0, 2), (1, 1), (2, 0)))
    fixed = normalize_slot_order(match, graph)
    held = {s: j for s, j in fixed.pairs}
    assert held[0] == 1 and held[1] == 2  # slot 2 now holds the rank-1 chore
    assert held[2] == 0  # the single-slot agent is untouched
    assert signature(fixed, graph) == signature(match, graph)


def test_normalize_single_slot_and_idempotence():
    inst = e1()
    graph = extend_allocation_graph(build_allocation_graph(inst), inst)
    match = rank_maximal_perfect_matching(graph)
    once = normalize_slot_order(match, graph)
    twice = normalize_slot_order(once, graph)
    assert once.pairs == twice.pairs


def test_normalize_preserves_signature_random():
    rng = random.Random(13)
    for seed in range(30):
        kind = "chores" if seed % 2 else "goods"
        inst = generate_instance(1 + seed % 4, 1 + seed % 7, kind, seed)
        plain = build_allocation_graph(inst)
        graph = extend_allocation_graph(plain, inst) if kind == "chores" else plain
        match = rank_maximal_perfect_matching(graph)
        fixed = normalize_slot_order(match, graph)
        assert signature(fixed, graph) == signature(match, graph)
        assert allocation_from_matching(fixed, graph, inst) == allocation_from_matching(
            match, graph, inst
        )
        by_agent = {}
        for s, j in fixed.pairs:
            if not graph.is_dummy_item(j):
                slot = graph.slots[s]
                by_agent.setdefault(slot.agent, []).append(
                    (slot.position, graph.rank_of(s, j))
                )
        for pairs in by_agent.values():
            pairs.sort()
            ranks = [r for _, r in pairs]
            if kind == "chores":
                assert ranks == sorted(ranks, reverse=True)
            else:
                assert ranks == sorted(ranks)


# ---------------------------------------------------------------------------
# picking-sequence extraction
# ---------------------------------------------------------------------------

def test_extract_rank_one_only_is_index_order():
    edges = {(i, i): 1 for i in range(3)}
    graph = ranked_graph(["l0", "l1", "l2"], ["r0", "r1", "r2"], edges)
    match = Matching(pairs=((0, 0), (1, 1), (2, 2)))
    seq = extract_picking_sequence(match, graph)
    assert seq.slots == (0, 1, 2)


def test_extract_rejects_non_rank_maximal():
    graph = fig2_graph()
    bad = Matching(pairs=((0, 0), (1, 1), (2, 2), (3, 3)))  # signature (0, 4)
    with pytest.raises(NotRankMaximal):
        extract_picking_sequence(bad, graph)


def test_extract_requires_full_cover():
    graph = fig2_graph()
    with pytest.raises(ValueError):
        extract_picking_sequence(Matching(pairs=((0, 1),)), graph)


def test_sequence_round_trip_random_instances():
    for seed in range(60):
        kind = "chores" if seed % 2 else "goods"
        inst = generate_instance(1 + seed % 5, 1 + seed % 8, kind, seed)
        allocation, seq = solve_with_sequence(inst)
        replay = simulate_picking_sequence(inst, seq.sequence)
        assert replay.bundles == allocation.bundles
        assert check_allocation(inst, allocation).passes


# ---------------------------------------------------------------------------
# Birkhoff-von Neumann decomposition
# ---------------------------------------------------------------------------

def test_bvn_half_matrix():
    half = Fraction(1, 2)
    parts = bvn_decompose([[half, half], [half, half]])
    assert sorted(w for w, _ in parts) == [half, half]
    assert {perm for _, perm in parts} == {(0, 1), (1, 0)}


def test_bvn_permutation_input():
    one, zero = Fraction(1), Fraction(0)
    parts = bvn_decompose([[zero, one], [one, zero]])
    assert parts == [(one, (1, 0))]


def test_bvn_cyclic_three_by_three():
    a, b = Fraction(1, 2), Fraction(1, 4)
    matrix = [[a, b, b], [b, a, b], [b, b, a]]
    parts = bvn_decompose(matrix)
    assert sum(w for w, _ in parts) == 1
    assert len(parts) <= 3 * 3 - 3 + 2
    rebuilt = [[Fraction(0)] * 3 for _ in range(3)]
    for w, perm in parts:
        for i, j in enumerate(perm):
            rebuilt[i][j] += w
    assert rebuilt == matrix


def test_bvn_random_exact_reconstruction():
    rng = random.Random(21)
    for _ in range(20):
        p = rng.randint(1, 5)
        matrix = [[Fraction(0)] * p for _ in range(p)]
        total = Fraction(0)
        perms = list(itertools.permutations(range(p)))
        for _ in range(rng.randint(1, 6)):
            w = Fraction(rng.randint(1, 5), rng.randint(6, 20))
            if total + w > 1:
                break
            total += w
            perm = rng.choice(perms)
            for i, j in enumerate(perm):
                matrix[i][j] += w
        if total < 1:
            perm = rng.choice(perms)
            for i, j in enumerate(perm):
                matrix[i][j] += 1 - total
        support = {(i, j) for i in range(p) for j in range(p) if matrix[i][j] > 0}
        parts = bvn_decompose(matrix)
        assert sum(w for w, _ in parts) == 1
        assert len(parts) <= p * p - p + 2
        rebuilt = [[Fraction(0)] * p for _ in range(p)]
        for w, perm in parts:
            assert w > 0
            for i, j in enumerate(perm):
                assert (i, j) in support
                rebuilt[i][j] += w
        assert rebuilt == matrix


def test_bvn_rejects_bad_input():
    one, zero = Fraction(1), Fraction(0)
    with pytest.raises(NotDoublyStochastic):
        bvn_decompose([[one, zero]])
    with pytest.raises(NotDoublyStochastic):
        bvn_decompose([[Fraction(1, 2), Fraction(1, 2)], [one, zero]])
    with pytest.raises(NotDoublyStochastic):
        bvn_decompose([[Fraction(3, 2), Fraction(-1, 2)], [Fraction(-1, 2), Fraction(3, 2)]])


# ---------------------------------------------------------------------------
# perfect allocations
# ---------------------------------------------------------------------------

def test_perfect_allocation_e1_is_a_two_one_split():
    alloc = perfect_allocation(e1())
    sizes = sorted(len(b) for b in alloc.bundles)
    assert sizes == [1, 2]
    assert check_allocation(e1(), alloc).passes


def test_perfect_allocation_single_agent_goods():
    inst = make("goods", ["b1", "b2"], [("a1", Fraction(1), ["b1", "b2"])])
    alloc = perfect_allocation(inst)
    assert alloc.bundles[0] == frozenset({"b1", "b2"})


def test_perfect_allocation_goods_top_items_reachable():
    # with equal halves and identical rankings over four goods, every slot
    # bound is three, so each agent ends up with at least one top-3 good
    inst = make(
        "goods",
        ["b1", "b2", "b3", "b4"],
        [
            ("a1", Fraction(1, 2), ["b1", "b2", "b3", "b4"]),
            ("a2", Fraction(1, 2), ["b1", "b2", "b3", "b4"]),
        ],
    )
    alloc = perfect_allocation(inst)
    top = {"b1", "b2", "b3"}
    for bundle in alloc.bundles:
        assert bundle & top


def test_perfect_allocation_random_instances_verify():
    for seed in range(50):
        for kind in ("chores", "goods"):
            inst = generate_instance(1 + seed % 6, seed % 10, kind, seed)
            alloc = perfect_allocation(inst)
            report = check_allocation(inst, alloc)
            assert report.passes
            if kind == "chores":
                assert sum(len(b) for b in alloc.bundles) == inst.m
            else:
                assert sum(len(b) for b in alloc.bundles) == inst.m


def test_enumerate_side_perfect_matchings_e1():
    graph = build_allocation_graph(e1())
    matchings = enumerate_side_perfect_matchings(graph, saturate="right")
    # every chore matched, no slot reused
    for match in matchings:
        assert len({j for _, j in match.pairs}) == 3
        assert len({i for i, _ in match.pairs}) == 3
    allocations = {
        allocation_from_matching(m, graph, e1()).bundles for m in matchings
    }
    assert len(allocations) == 6
