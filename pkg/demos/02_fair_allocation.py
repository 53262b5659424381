"""Computing and verifying fair allocations.

A matching that saturates every chore hands each chore to the owner of
its matched slot; the result is proportional up to one item under every
valuation consistent with the rankings.  The verifier is independent of
the solver: it checks the bundle-size and rank bounds directly, and when
a bundle fails it produces a concrete 0/1 valuation witnessing the
failure.
"""

from fractions import Fraction

from fairmatch import (
    IntegralAllocation,
    check_allocation,
    check_wprop1_cardinal,
    generate_instance,
    perfect_allocation,
    validate_instance,
)
from fairmatch.fairness import render_report

items = ["dishes", "laundry", "garden", "attic", "windows"]
instance = validate_instance(
    "chores",
    items,
    [
        ("ada", Fraction(3, 5), ["attic", "windows", "dishes", "laundry", "garden"]),
        ("ben", Fraction(2, 5), ["garden", "attic", "laundry", "windows", "dishes"]),
    ],
)

allocation = perfect_allocation(instance)
for agent, bundle in zip(instance.agents, allocation.bundles):
    print(f"{agent.name} ({agent.entitlement}): {sorted(bundle)}")
report = check_allocation(instance, allocation)
print(render_report(instance, report))
assert report.passes

# hand everything to ada: the verifier refuses and names a witness
hog = IntegralAllocation(bundles=(frozenset(items), frozenset()))
report = check_allocation(instance, hog)
print(render_report(instance, report))
assert not report.passes
witness = report.reports[0].witness
values = witness.values(instance, 0)
assert not check_wprop1_cardinal("chores", items, values, Fraction(3, 5))
print("the witness valuation confirms the failure under the cardinal definition.")

# existence holds for every instance, whatever the entitlements
for seed in range(5):
    random_instance = generate_instance(4, 9, "goods", seed)
    assert check_allocation(random_instance, perfect_allocation(random_instance)).passes
print("five random goods instances solved and verified.")
