"""Optimizing over the set of all fair allocations.

Fair allocations are exactly the perfect matchings of the extended
allocation graph, and that matching polytope is integral, so any linear
objective, say each agent's competence at each chore, or the shipping
cost of sending a good to an agent, can be optimized exactly with one
assignment solve, without giving up the fairness guarantee.
"""

import itertools
from fractions import Fraction

from fairmatch import (
    CostSpec,
    check_allocation,
    enumerate_wsdprop1,
    optimize_allocation,
    validate_instance,
)

items = ["cook", "drive", "mow"]
instance = validate_instance(
    "chores",
    items,
    [("ada", Fraction(1, 2), items), ("ben", Fraction(1, 2), items)],
)

competence = {
    (0, "cook"): Fraction(9, 10), (0, "drive"): Fraction(1, 10), (0, "mow"): Fraction(1, 2),
    (1, "cook"): Fraction(2, 10), (1, "drive"): Fraction(1), (1, "mow"): Fraction(3, 5),
}
spec = CostSpec(values=competence, direction="maximize")
allocation, objective = optimize_allocation(instance, spec)
print("most competent fair split:", {
    a.name: sorted(b) for a, b in zip(instance.agents, allocation.bundles)
})
print("total competence:", objective)
assert check_allocation(instance, allocation).passes

# cross-check against brute force over every fair allocation
best = max(
    sum((competence[(alloc.owner_map()[item], item)] for item in items), Fraction(0))
    for alloc in enumerate_wsdprop1(instance)
)
assert objective == best
print(f"matches the brute-force optimum over {len(enumerate_wsdprop1(instance))} "
      "fair allocations.")
